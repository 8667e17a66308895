//! Exact finite model of `M / m^N M` for `M = coker(phi)`.
//!
//! # Why truncation is exact
//!
//! `M / m^N M = Q^t / (im phi + n^N Q^t)`. The image of `phi` is spanned over
//! the field by the products `x^a * phi_j` (column `j`), and any such product
//! whose degree-`< N` part is dropped differs from that part by an element of
//! `n^N Q^t`. So the span of the truncated products `x^a * phi_j` with
//! `|a| + ord(phi_j) < N`, inside the space of vectors of polynomials of
//! degree `< N`, is exactly the relation space, and every length below level
//! `N` computed from it is the true length, not an approximation.
//!
//! # Coordinates
//!
//! Ambient columns are `(monomial, component)` pairs sorted by degree. After
//! row reduction with first-nonzero pivots, every relation row starts at its
//! lowest-degree column, so the non-pivot ("standard") columns form a basis
//! of `M / m^N M` in which the image of `m^n M` is the span of the standard
//! columns of degree `>= n`. The filtration is thus a coordinate tail, and
//! all lengths reduce to ranks of small matrices on the standard basis.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{axpy, lazy_bound, reduce_all, Echelon, Mat, Subspace};
use crate::poly::{Monomial, Order, Poly};
use crate::presentation::Presentation;

#[derive(Clone, Debug)]
pub struct TruncatedModule {
    pres: Presentation,
    truncation: usize,
    t: usize,
    monomials: Vec<Monomial>,
    mono_index: HashMap<Vec<u16>, usize>,
    rel: Echelon,
    std_cols: Vec<usize>,
    std_of_col: Vec<Option<usize>>,
    std_start: Vec<usize>,
    mult: Vec<Mat>,
}

impl TruncatedModule {
    pub fn build(pres: &Presentation, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Precondition("truncation degree must be at least 1".into()));
        }
        let field = pres.field();
        let nvars = pres.nvars();
        let t = pres.size();
        let n = truncation as u32;

        let mut monomials = Vec::new();
        for d in 0..n {
            monomials.extend(Monomial::all_of_degree(nvars, d));
        }
        let mono_index: HashMap<Vec<u16>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.exps().to_vec(), i)).collect();
        let width = monomials.len() * t;

        let mut rel = Echelon::new(field, width);
        let mut row = vec![0u32; width];
        for j in 0..t {
            let Order::Finite(o) = pres.column_order(j) else { continue };
            for a in monomials.iter().take_while(|a| a.degree() + o < n) {
                row.iter_mut().for_each(|x| *x = 0);
                for i in 0..t {
                    for (b, c) in pres.entry(i, j).terms() {
                        if a.degree() + b.degree() >= n {
                            break;
                        }
                        let col = mono_index[&a.mul(b).exps().to_vec()] * t + i;
                        row[col] = field.add(row[col], c);
                    }
                }
                rel.insert(&row);
            }
        }

        let mut std_cols = Vec::new();
        let mut std_of_col = vec![None; width];
        for c in 0..width {
            if !rel.is_pivot(c) {
                std_of_col[c] = Some(std_cols.len());
                std_cols.push(c);
            }
        }
        let mut std_start = vec![0usize; truncation + 1];
        for (k, &c) in std_cols.iter().enumerate() {
            let d = monomials[c / t].degree() as usize;
            std_start[d + 1] = k + 1;
        }
        for d in 1..=truncation {
            std_start[d] = std_start[d].max(std_start[d - 1]);
        }

        let mut model = TruncatedModule {
            pres: pres.clone(),
            truncation,
            t,
            monomials,
            mono_index,
            rel,
            std_cols,
            std_of_col,
            std_start,
            mult: Vec::new(),
        };
        model.mult = model.multiplication_maps();
        if let Some(g) = pres.hypersurface() {
            model.check_annihilates(g)?;
        }
        Ok(model)
    }

    /// Normal forms `nf(e_c)` on the standard basis for every pivot column,
    /// obtained by back-substitution restricted to the standard columns.
    fn pivot_normal_forms(&self) -> HashMap<usize, Vec<u32>> {
        let f = self.field();
        let p = f.characteristic() as u64;
        let bound = lazy_bound(f);
        let pivots = self.rel.pivot_columns();
        // std_part[c] = standard-column part of the fully reduced row with
        // pivot c. Fully reduced rows vanish on other pivot columns, so the
        // coefficients read from the stored row remain valid throughout.
        let mut std_part: HashMap<usize, Vec<u32>> = HashMap::with_capacity(pivots.len());
        for &c in pivots.iter().rev() {
            let row = self.rel.row_for_pivot(c).unwrap();
            let mut acc: Vec<u64> = self.std_cols.iter().map(|&sc| row[sc] as u64).collect();
            let mut pending = 0;
            for (cc, &coef) in row.iter().enumerate().skip(c + 1) {
                if coef == 0 || self.std_of_col[cc].is_some() {
                    continue;
                }
                if pending == bound {
                    reduce_all(f, &mut acc);
                    pending = 0;
                }
                axpy(&mut acc, p - coef as u64, &std_part[&cc]);
                pending += 1;
            }
            let v: Vec<u32> = acc.iter().map(|a| (a % p) as u32).collect();
            std_part.insert(c, v);
        }
        for v in std_part.values_mut() {
            for x in v.iter_mut() {
                *x = f.neg(*x);
            }
        }
        std_part
    }

    fn multiplication_maps(&self) -> Vec<Mat> {
        let f = self.field();
        let nf = self.pivot_normal_forms();
        let s = self.std_cols.len();
        let nvars = self.pres.nvars();
        let mut maps = Vec::with_capacity(nvars);
        for j in 0..nvars {
            let mut m = Mat::zeros(f, s, s);
            for (k, &c) in self.std_cols.iter().enumerate() {
                let mono = &self.monomials[c / self.t];
                if mono.degree() as usize + 1 >= self.truncation {
                    continue;
                }
                let target = mono.mul(&Monomial::var(nvars, j));
                let col = self.mono_index[&target.exps().to_vec()] * self.t + c % self.t;
                match self.std_of_col[col] {
                    Some(sk) => m.set(k, sk, 1),
                    None => {
                        for (l, &x) in nf[&col].iter().enumerate() {
                            if x != 0 {
                                m.set(k, l, x);
                            }
                        }
                    }
                }
            }
            maps.push(m);
        }
        maps
    }

    fn check_annihilates(&self, g: &Poly) -> Result<()> {
        let width = self.rel.width();
        for i in 0..self.t {
            let mut v = vec![0u32; width];
            for (m, c) in g.terms() {
                if m.degree() as usize >= self.truncation {
                    break;
                }
                v[self.mono_index[&m.exps().to_vec()] * self.t + i] = c;
            }
            if !self.rel.contains(&v) {
                return Err(Error::InvalidPresentation(
                    "the declared hypersurface does not annihilate the cokernel".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn field(&self) -> FieldSpec {
        self.pres.field()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn nvars(&self) -> usize {
        self.pres.nvars()
    }

    /// Dimension of the ambient space of truncated vectors.
    pub fn ambient_dim(&self) -> usize {
        self.rel.width()
    }

    /// `l(M / m^N M)`.
    pub fn len(&self) -> usize {
        self.std_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.std_cols.is_empty()
    }

    /// Number of standard basis vectors of degree `< d`, i.e. `l(M / m^d M)`.
    pub fn std_start(&self, d: usize) -> usize {
        self.std_start[d]
    }

    /// `l(m^n M / m^N M)`, the dimension of the image of `m^n M`.
    pub fn filtration_dim(&self, n: usize) -> usize {
        self.len() - self.std_start[n.min(self.truncation)]
    }

    fn check_level(&self, level: usize, what: &str) -> Result<()> {
        if level > self.truncation {
            return Err(Error::truncation(
                self.truncation,
                format!("{what} needs level {level}"),
            ));
        }
        Ok(())
    }

    /// Hilbert-Samuel function `l(M / m^{n+1} M)`; needs `n + 1 <= N`.
    pub fn hilbert_function(&self, n: usize) -> Result<usize> {
        self.check_level(n + 1, "hilbert_function")?;
        Ok(self.std_start[n + 1])
    }

    /// `l(m^n M / m^{n+1} M)`; needs `n + 1 <= N`.
    pub fn graded_length(&self, n: usize) -> Result<usize> {
        self.check_level(n + 1, "graded_length")?;
        Ok(self.std_start[n + 1] - self.std_start[n])
    }

    /// All graded lengths for `n < N`.
    pub fn graded_lengths(&self) -> Vec<usize> {
        (0..self.truncation).map(|n| self.std_start[n + 1] - self.std_start[n]).collect()
    }

    /// Matrix of multiplication by `x_j`; row `k` is the image of the k-th
    /// standard basis vector.
    pub fn mult(&self, j: usize) -> &Mat {
        &self.mult[j]
    }

    /// Matrix of multiplication by `sum_j c_j x_j`, same convention as
    /// [`TruncatedModule::mult`].
    pub fn form_matrix(&self, coeffs: &[u32]) -> Mat {
        assert_eq!(coeffs.len(), self.nvars(), "form has the wrong number of coefficients");
        let f = self.field();
        let s = self.len();
        let mut acc = Mat::zeros(f, s, s);
        for (j, &c) in coeffs.iter().enumerate() {
            let c = c % f.characteristic();
            if c == 0 {
                continue;
            }
            for k in 0..s {
                for l in 0..s {
                    let x = self.mult[j].get(k, l);
                    if x != 0 {
                        acc.set(k, l, f.add(acc.get(k, l), f.mul(c, x)));
                    }
                }
            }
        }
        acc
    }

    /// Image of `m^n M` as a subspace of `M / m^N M`.
    pub fn filtration(&self, n: usize) -> Subspace {
        let s = self.len();
        let start = self.std_start[n.min(self.truncation)];
        let vecs: Vec<Vec<u32>> = (start..s)
            .map(|k| {
                let mut v = vec![0u32; s];
                v[k] = 1;
                v
            })
            .collect();
        Subspace::span(self.field(), s, &vecs)
    }

    /// Image of `J m^n M` where `J` is generated by the forms given as
    /// multiplication matrices.
    pub fn ideal_times_filtration(&self, forms: &[Mat], n: usize) -> Subspace {
        let s = self.len();
        let start = self.std_start[n.min(self.truncation)];
        let mut e = Echelon::new(self.field(), s);
        for l in forms {
            for k in start..s {
                e.insert(l.row(k));
            }
        }
        Subspace::from_echelon(e)
    }

    /// `l((m^n M : J) / m^{n-1} M)` for `1 <= n <= N`, where `J` is generated by
    /// the given forms.
    pub fn colon_length(&self, forms: &[Mat], n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::Precondition("colon_length needs n >= 1".into()));
        }
        self.check_level(n, "colon_length")?;
        let rows = self.std_start[n - 1];
        let cols = self.std_start[n];
        let f = self.field();
        let mut e = Echelon::new(f, rows);
        // The map v -> (l_1 v, ..., l_k v) mod m^n M on M / m^{n-1} M; its
        // kernel has dimension rows - rank, and rank is computed on the
        // transposed blocks.
        for l in forms {
            for c in 0..cols {
                let col: Vec<u32> = (0..rows).map(|k| l.get(k, c)).collect();
                e.insert(&col);
            }
        }
        Ok(rows - e.rank())
    }

    /// `b_n = l((m^{n+1} M : x) / m^n M)` for `n = 0 .. N-1`.
    pub fn b_series(&self, coeffs: &[u32]) -> Vec<usize> {
        let l = self.form_matrix(coeffs);
        self.b_series_of(&l)
    }

    pub fn b_series_of(&self, l: &Mat) -> Vec<usize> {
        (0..self.truncation)
            .map(|n| self.colon_length(std::slice::from_ref(l), n + 1).expect("level within truncation"))
            .collect()
    }

    /// `dim ker(x : M/m^n M -> M/m^n M)` for `1 <= n <= N`.
    pub fn kernel_on_quotient(&self, l: &Mat, n: usize) -> usize {
        let rows = self.std_start[n];
        let mut e = Echelon::new(self.field(), rows);
        for c in 0..rows {
            let col: Vec<u32> = (0..rows).map(|k| l.get(k, c)).collect();
            e.insert(&col);
        }
        rows - e.rank()
    }

    /// `rho_n = l(m^{n+1} M / x m^n M)` for `n = 0 .. N-1`, as computed in the
    /// model. Exact when `x m^{N-1} M = m^N M` (i.e. `N - 1 >= red_x(M)`).
    pub fn rho_series(&self, coeffs: &[u32]) -> Result<Vec<usize>> {
        if self.pres.dim() != 1 {
            return Err(Error::Precondition(format!(
                "rho_n is defined for one-dimensional modules, this one has dimension {}",
                self.pres.dim()
            )));
        }
        let l = self.form_matrix(coeffs);
        Ok((0..self.truncation)
            .map(|n| {
                let img = self.ideal_times_filtration(std::slice::from_ref(&l), n);
                self.filtration_dim(n + 1) - img.dim()
            })
            .collect())
    }

    /// `red_J(M)`: least `n` with `m^{n+1} M = J m^n M`.
    ///
    /// Equality in the model means `m^{n+1} M = J m^n M + m^N M`; when
    /// `n + 2 <= N` the right side is inside `J m^n M + m^{n+2} M`, and
    /// Nakayama turns this into a genuine equality. Larger `n` cannot be
    /// certified and is reported as a truncation problem.
    pub fn reduction_number(&self, forms: &[Mat]) -> Result<usize> {
        for n in 0..self.truncation.saturating_sub(1) {
            let img = self.ideal_times_filtration(forms, n);
            if img.dim() == self.filtration_dim(n + 1) {
                return Ok(n);
            }
        }
        Err(Error::truncation(self.truncation, "reduction number not reached"))
    }

    /// `vv_n = l((m^{n+1} M ∩ J M) / J m^n M)` for `n = 0 .. N-1`.
    pub fn vv_series(&self, forms: &[Mat]) -> Vec<usize> {
        let jm = self.ideal_times_filtration(forms, 0);
        (0..self.truncation)
            .map(|n| {
                let top = self.filtration(n + 1);
                let inter = top.intersect(&jm).expect("same ambient space");
                let jf = self.ideal_times_filtration(forms, n);
                inter.dim() - jf.dim()
            })
            .collect()
    }

    /// Normal form of an ambient vector on the standard basis.
    pub fn to_quotient(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        self.rel.reduce_into(&mut w);
        self.std_cols.iter().map(|&c| w[c]).collect()
    }

    /// Ambient subspace `W[n]` = relations plus all vectors of degree `>= n`.
    /// Only used to cross-check the coordinate description.
    pub fn ambient_filtration(&self, n: usize) -> Subspace {
        let mut e = self.rel.clone();
        let width = e.width();
        for c in 0..width {
            if self.monomials[c / self.t].degree() as usize >= n {
                let mut v = vec![0u32; width];
                v[c] = 1;
                e.insert(&v);
            }
        }
        Subspace::from_echelon(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(vars: &[&str], rows: &[Vec<&str>]) -> Presentation {
        Presentation::from_strings(FieldSpec::default(), vars, rows, None).unwrap()
    }

    #[test]
    fn cyclic_module() {
        let m = TruncatedModule::build(&pres(&["x", "y"], &[vec!["y"]]), 4).unwrap();
        for n in 0..4 {
            assert_eq!(m.hilbert_function(n).unwrap(), n + 1);
        }
        assert!(m.hilbert_function(4).is_err());
    }

    #[test]
    fn graded_pieces_of_examples() {
        let a = TruncatedModule::build(&pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]]), 4).unwrap();
        assert_eq!(&a.graded_lengths()[..3], &[2, 3, 3]);
        assert_eq!(a.hilbert_function(1).unwrap(), 5);
        let b = TruncatedModule::build(&pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]), 4).unwrap();
        assert_eq!(&b.graded_lengths()[..3], &[2, 2, 3]);
    }

    #[test]
    fn coordinate_filtration_matches_ambient() {
        let p = pres(&["x", "y"], &[vec!["y^2 + x^3", "x*y"], vec!["x^2", "y - x^2"]]);
        let m = TruncatedModule::build(&p, 6).unwrap();
        let w: Vec<Subspace> = (0..=6).map(|n| m.ambient_filtration(n)).collect();
        assert_eq!(w[0].dim(), m.ambient_dim());
        for n in 0..6 {
            assert!(w[n].contains_subspace(&w[n + 1]));
            assert_eq!(w[n].quotient_dim(&w[n + 1]).unwrap(), m.graded_length(n).unwrap());
        }
    }

    #[test]
    fn multiplication_is_consistent_with_ambient_products() {
        let p = pres(&["x", "y"], &[vec!["y^2", "x*y"], vec!["x^2", "y"]]);
        let m = TruncatedModule::build(&p, 7).unwrap();
        // x * (y * v) == y * (x * v) on the quotient.
        let xy = m.mult(0).mul(m.mult(1));
        let yx = m.mult(1).mul(m.mult(0));
        assert_eq!(xy, yx);
    }

    #[test]
    fn annihilator_check() {
        let f = FieldSpec::default();
        let ok = Presentation::from_strings(f, &["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]], Some("y^3"));
        assert!(TruncatedModule::build(&ok.unwrap(), 8).is_ok());
        let bad = Presentation::from_strings(f, &["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]], Some("x^3"));
        assert!(matches!(TruncatedModule::build(&bad.unwrap(), 8), Err(Error::InvalidPresentation(_))));
    }
}
