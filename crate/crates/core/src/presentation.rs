//! Square presentation matrices `phi` with `M = coker(phi)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{check_invertible, parse, Order, Poly};

/// Largest matrix size accepted; the determinant is expanded exactly.
pub const MAX_SIZE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    field: FieldSpec,
    vars: Vec<String>,
    phi: Vec<Vec<Poly>>,
    g: Option<Poly>,
    det: Poly,
}

impl Presentation {
    /// Validates and wraps a matrix. Entries must lie in the maximal ideal
    /// (no constant terms) and the determinant must be nonzero. A declared
    /// hypersurface must be nonzero of order at least 2; that it annihilates
    /// the cokernel is checked when a truncated model is built.
    pub fn new(
        field: FieldSpec,
        vars: Vec<String>,
        phi: Vec<Vec<Poly>>,
        g: Option<Poly>,
    ) -> Result<Self> {
        let n = vars.len();
        if n == 0 {
            return Err(Error::InvalidPresentation("at least one variable is required".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            let ok = v.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::InvalidPresentation(format!("bad variable name '{v}'")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidPresentation(format!("duplicate variable '{v}'")));
            }
        }
        let t = phi.len();
        if t == 0 {
            return Err(Error::InvalidPresentation("empty matrix".into()));
        }
        if t > MAX_SIZE {
            return Err(Error::InvalidPresentation(format!(
                "matrix size {t} exceeds the supported maximum {MAX_SIZE}"
            )));
        }
        for (i, row) in phi.iter().enumerate() {
            if row.len() != t {
                return Err(Error::InvalidPresentation(format!(
                    "matrix is not square: row {} has {} entries, expected {t}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, e) in row.iter().enumerate() {
                if e.field() != field || e.nvars() != n {
                    return Err(Error::InvalidPresentation("entry ring mismatch".into()));
                }
                if e.ord() == Order::Finite(0) {
                    return Err(Error::InvalidPresentation(format!(
                        "entry ({}, {}) has a nonzero constant term; the presentation is not minimal",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(g) = &g {
            if g.field() != field || g.nvars() != n {
                return Err(Error::InvalidPresentation("hypersurface ring mismatch".into()));
            }
            match g.ord() {
                Order::Infinite => {
                    return Err(Error::InvalidPresentation("hypersurface equation is zero".into()))
                }
                Order::Finite(o) if o < 2 => {
                    return Err(Error::InvalidPresentation(
                        "hypersurface equation must have order at least 2".into(),
                    ))
                }
                _ => {}
            }
        }
        let det = determinant(&phi, field, n);
        if det.is_zero() {
            return Err(Error::InvalidPresentation("determinant is zero".into()));
        }
        Ok(Presentation { field, vars, phi, g, det })
    }

    /// Parses entries given as expression strings.
    pub fn from_strings(
        field: FieldSpec,
        vars: &[&str],
        rows: &[Vec<&str>],
        g: Option<&str>,
    ) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let phi = rows
            .iter()
            .map(|r| r.iter().map(|e| parse(e, &vars, field)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let g = g.map(|s| parse(s, &vars, field)).transpose()?;
        Presentation::new(field, vars, phi, g)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Number of generators `t = mu(M)`.
    pub fn size(&self) -> usize {
        self.phi.len()
    }

    /// Krull dimension of the cokernel: one less than the number of variables.
    pub fn dim(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.phi[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.phi
    }

    pub fn hypersurface(&self) -> Option<&Poly> {
        self.g.as_ref()
    }

    pub fn det(&self) -> &Poly {
        &self.det
    }

    pub fn ord_det(&self) -> u32 {
        self.det.ord().finite().expect("determinant is nonzero")
    }

    /// Largest `i` with every entry in the i-th power of the maximal ideal.
    pub fn i_m(&self) -> u32 {
        self.phi
            .iter()
            .flatten()
            .filter_map(|e| e.ord().finite())
            .min()
            .expect("a matrix with nonzero determinant has a nonzero entry")
    }

    pub fn entry_orders(&self) -> Vec<Vec<Order>> {
        self.phi.iter().map(|r| r.iter().map(|e| e.ord()).collect()).collect()
    }

    /// Minimal order of the entries of column `j`.
    pub fn column_order(&self, j: usize) -> Order {
        self.phi.iter().map(|r| r[j].ord()).min().unwrap_or(Order::Infinite)
    }

    pub fn matrix_strings(&self) -> Vec<Vec<String>> {
        self.phi.iter().map(|r| r.iter().map(|e| e.to_string_with(&self.vars)).collect()).collect()
    }

    pub fn hypersurface_string(&self) -> Option<String> {
        self.g.as_ref().map(|g| g.to_string_with(&self.vars))
    }

    pub fn with_hypersurface(&self, g: Option<Poly>) -> Result<Self> {
        Presentation::new(self.field, self.vars.clone(), self.phi.clone(), g)
    }

    /// The presentation of `M / ell M` over one variable fewer.
    ///
    /// With `k` the last index where `ell` has a nonzero coefficient, the
    /// coordinates `y_i = x_i (i != k), y_k = ell` are an invertible change in
    /// which `ell` is a variable. Setting it to zero amounts to substituting
    /// `x_k = -sum_{i != k} (c_i / c_k) x_i`; the other variables keep their
    /// names.
    pub fn quotient_by_form(&self, coeffs: &[u32]) -> Result<Quotient> {
        let f = self.field;
        let n = self.nvars();
        if coeffs.len() != n {
            return Err(Error::Dimension(format!("linear form has {} coefficients, expected {n}", coeffs.len())));
        }
        let Some(k) = coeffs.iter().rposition(|&c| c % f.characteristic() != 0) else {
            return Err(Error::ZeroForm);
        };
        let inv = f.inv(coeffs[k] % f.characteristic());
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            if i == k {
                let mut form = vec![0u32; n - 1];
                for (j, &c) in coeffs.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    let jj = if j < k { j } else { j - 1 };
                    form[jj] = f.neg(f.mul(c % f.characteristic(), inv));
                }
                images.push(Poly::linear_form(f, &form));
            } else {
                let ii = if i < k { i } else { i - 1 };
                images.push(Poly::var(f, n - 1, ii));
            }
        }
        let phi: Vec<Vec<Poly>> =
            self.phi.iter().map(|r| r.iter().map(|e| e.substitute(&images)).collect()).collect();
        let g = match &self.g {
            Some(g) => {
                let gb = g.substitute(&images);
                if gb.is_zero() {
                    return Err(Error::HypersurfaceKilled);
                }
                Some(gb)
            }
            None => None,
        };
        let mut vars = self.vars.clone();
        vars.remove(k);
        if vars.is_empty() {
            return Err(Error::Precondition("cannot cut a zero-dimensional module further".into()));
        }
        let pres = Presentation::new(f, vars, phi, g)?;
        Ok(Quotient { pres, eliminated: k })
    }

    /// Applies `x_i -> sum_j change[i][j] x_j` to every entry and to `g`.
    pub fn change_coordinates(&self, change: &[Vec<u32>]) -> Result<Self> {
        check_invertible(self.field, self.nvars(), change)?;
        let images: Vec<Poly> = change.iter().map(|r| Poly::linear_form(self.field, r)).collect();
        let phi = self.phi.iter().map(|r| r.iter().map(|e| e.substitute(&images)).collect()).collect();
        let g = self.g.as_ref().map(|g| g.substitute(&images));
        Presentation::new(self.field, self.vars.clone(), phi, g)
    }

    /// `u * phi * v` for square polynomial matrices `u`, `v`. The caller is
    /// responsible for `u`, `v` being invertible over the local ring.
    pub fn transform(&self, u: &[Vec<Poly>], v: &[Vec<Poly>]) -> Result<Self> {
        let t = self.size();
        if u.len() != t || v.len() != t || u.iter().chain(v).any(|r| r.len() != t) {
            return Err(Error::Dimension(format!("transforms must be {t}x{t}")));
        }
        let uphi = mat_mul(u, &self.phi, self.field, self.nvars());
        let phi = mat_mul(&uphi, v, self.field, self.nvars());
        Presentation::new(self.field, self.vars.clone(), phi, self.g.clone())
    }

    /// The same matrix over a polynomial ring with extra variables appended.
    pub fn extend_vars(&self, names: &[&str]) -> Result<Self> {
        let extra = names.len();
        let mut vars = self.vars.clone();
        vars.extend(names.iter().map(|s| s.to_string()));
        let phi = self.phi.iter().map(|r| r.iter().map(|e| e.extend_vars(extra)).collect()).collect();
        let g = self.g.as_ref().map(|g| g.extend_vars(extra));
        Presentation::new(self.field, vars, phi, g)
    }
}

/// Result of cutting by a linear form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub pres: Presentation,
    /// Index (in the parent's variables) of the eliminated variable.
    pub eliminated: usize,
}

/// Lifts a form written in the quotient's variables back to the parent's by
/// inserting a zero coefficient at the eliminated position.
pub fn lift_form(coeffs: &[u32], eliminated: usize) -> Vec<u32> {
    let mut out = coeffs.to_vec();
    out.insert(eliminated, 0);
    out
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], field: FieldSpec, nvars: usize) -> Vec<Vec<Poly>> {
    let t = a.len();
    (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    (0..t).fold(Poly::zero(field, nvars), |acc, k| acc.add(&a[i][k].mul(&b[k][j])))
                })
                .collect()
        })
        .collect()
}

/// Exact determinant by Laplace expansion along rows, memoized over the set
/// of columns already used (`O(2^t t)` polynomial products).
pub fn determinant(m: &[Vec<Poly>], field: FieldSpec, nvars: usize) -> Poly {
    let t = m.len();
    let mut minors: HashMap<u32, Poly> = HashMap::new();
    minors.insert(0, Poly::constant(field, nvars, 1));
    for (row, entries) in m.iter().enumerate() {
        let mut next: HashMap<u32, Poly> = HashMap::new();
        let mut keys: Vec<u32> = minors.keys().copied().collect();
        keys.sort_unstable();
        for mask in keys {
            let minor = &minors[&mask];
            if minor.is_zero() {
                continue;
            }
            for (j, e) in entries.iter().enumerate() {
                if mask & (1 << j) != 0 || e.is_zero() {
                    continue;
                }
                // Sign of placing column j after the columns already used in
                // the first `row` rows: (-1)^(number of used columns > j).
                let larger = (mask >> (j + 1)).count_ones();
                let mut term = minor.mul(e);
                if larger % 2 == 1 {
                    term = term.neg();
                }
                let slot = next.entry(mask | (1 << j)).or_insert_with(|| Poly::zero(field, nvars));
                *slot = slot.add(&term);
            }
        }
        minors = next;
        debug_assert!(minors.keys().all(|k| k.count_ones() as usize == row + 1));
    }
    minors.remove(&((1u32 << t) - 1)).unwrap_or_else(|| Poly::zero(field, nvars))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    #[test]
    fn determinant_matches_expansion() {
        let p = Presentation::from_strings(f(), &["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]], None)
            .unwrap();
        assert_eq!(p.det(), &parse("y^3", &["x".into(), "y".into()], f()).unwrap());
        let q = Presentation::from_strings(
            f(),
            &["x", "y", "z"],
            &[vec!["x", "y", "z"], vec!["x^2", "x^2", "0"], vec!["0", "0", "x^2"]],
            Some("x^2*(x-y)"),
        )
        .unwrap();
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        // x*(x^4) - y*(x^4) + z*0 along the first row.
        assert_eq!(q.det(), &parse("x^5 - x^4*y", &vars, f()).unwrap());
        assert_eq!(q.ord_det(), 5);
    }

    #[test]
    fn basic_invariants() {
        let p = Presentation::from_strings(f(), &["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]], None)
            .unwrap();
        assert_eq!((p.size(), p.i_m(), p.ord_det(), p.dim()), (2, 1, 3, 1));
        let s = Presentation::from_strings(
            f(),
            &["x", "y"],
            &[vec!["y", "0", "0"], vec!["0", "y", "0"], vec!["0", "0", "y"]],
            None,
        )
        .unwrap();
        assert_eq!((s.size(), s.i_m(), s.ord_det(), s.dim()), (3, 1, 3, 1));
    }

    #[test]
    fn rejects_invalid() {
        let bad = |rows: &[Vec<&str>], g: Option<&str>| Presentation::from_strings(f(), &["x", "y"], rows, g);
        assert!(matches!(bad(&[vec!["1 + x"]], None), Err(Error::InvalidPresentation(_))));
        assert!(matches!(bad(&[vec!["x", "y"], vec!["x", "y"]], None), Err(Error::InvalidPresentation(_))));
        assert!(matches!(bad(&[vec!["x", "y"]], None), Err(Error::InvalidPresentation(_))));
        assert!(matches!(bad(&[vec!["x"]], Some("x")), Err(Error::InvalidPresentation(_))));
        assert!(matches!(bad(&[vec!["x"]], Some("0")), Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn quotient_drops_variable() {
        let p = Presentation::from_strings(f(), &["x", "y"], &[vec!["y", "0"], vec!["0", "y"]], None).unwrap();
        let q = p.quotient_by_form(&[1, 0]).unwrap();
        assert_eq!(q.eliminated, 0);
        assert_eq!(q.pres.vars(), &["y".to_string()]);
        assert_eq!(q.pres.matrix_strings(), vec![vec!["y", "0"], vec!["0", "y"]]);
        assert_eq!(p.quotient_by_form(&[0, 0]).unwrap_err(), Error::ZeroForm);
        // Cutting by y kills the determinant.
        assert!(p.quotient_by_form(&[0, 1]).is_err());
    }

    #[test]
    fn quotient_kills_hypersurface() {
        let p = Presentation::from_strings(f(), &["x", "y"], &[vec!["y"]], Some("x*y")).unwrap();
        assert_eq!(p.quotient_by_form(&[1, 0]).unwrap_err(), Error::HypersurfaceKilled);
    }

    #[test]
    fn transforms_preserve_determinant_order() {
        let p = Presentation::from_strings(f(), &["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], None).unwrap();
        let vars = p.vars().to_vec();
        let e = |s: &str| parse(s, &vars, f()).unwrap();
        let u = vec![vec![e("1 + x"), e("y")], vec![e("0"), e("1")]];
        let v = vec![vec![e("1"), e("0")], vec![e("x*y"), e("2")]];
        let q = p.transform(&u, &v).unwrap();
        assert_eq!(q.ord_det(), p.ord_det());
        let c = p.change_coordinates(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(c.ord_det(), 3);
        let w = p.extend_vars(&["w"]).unwrap();
        assert_eq!(w.dim(), 2);
    }
}
