//! Cross-checks against naive recomputations that share no code with the
//! library's linear algebra: dense Gaussian elimination over monomial
//! coordinates, minors by permutation expansion, and closed forms for direct
//! sums of cyclic modules.

use std::collections::HashMap;

use assocgr::depth::{analyze, analyze_at, ratliff_rush_lengths, AnalysisOptions};
use assocgr::family::{generate_family, FamilySpec};
use assocgr::invariants::{dvr_decomposition, h_dim_zero, HData, IntPoly};
use assocgr::{FieldSpec, Monomial, Poly, Presentation, TruncatedModule};

const P: u64 = 32003;

fn pres(vars: &[&str], rows: &[Vec<&str>]) -> Presentation {
    Presentation::from_strings(FieldSpec::default(), vars, rows, None).unwrap()
}

fn monomials_below(nvars: usize, d: u32) -> Vec<Vec<u16>> {
    (0..d).flat_map(|k| Monomial::all_of_degree(nvars, k)).map(|m| m.exps().to_vec()).collect()
}

/// Coordinates on `F / m^D F` with basis `(monomial, component)`.
struct Coords {
    index: HashMap<(Vec<u16>, usize), usize>,
    nvars: usize,
    d: u32,
}

impl Coords {
    fn new(nvars: usize, t: usize, d: u32) -> Self {
        let mut index = HashMap::new();
        for m in monomials_below(nvars, d) {
            for c in 0..t {
                let k = index.len();
                index.insert((m.clone(), c), k);
            }
        }
        Coords { index, nvars, d }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    /// `u * column` truncated below degree `D`.
    fn shifted(&self, u: &[u16], column: &[Poly]) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        for (c, f) in column.iter().enumerate() {
            for (m, a) in f.terms() {
                let e: Vec<u16> = m.exps().iter().zip(u).map(|(x, y)| x + y).collect();
                if e.iter().map(|&x| x as u32).sum::<u32>() < self.d {
                    let k = self.index[&(e, c)];
                    v[k] = (v[k] + a as u64) % P;
                }
            }
        }
        v
    }

    fn unit(&self, u: &[u16], c: usize) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        v[self.index[&(u.to_vec(), c)]] = 1;
        v
    }

    /// All relations `x^a phi_j` of degree below `D`.
    fn relations(&self, pres: &Presentation) -> Vec<Vec<u64>> {
        let t = pres.size();
        let mut out = Vec::new();
        for u in monomials_below(self.nvars, self.d) {
            for j in 0..t {
                let col: Vec<Poly> = (0..t).map(|i| pres.entry(i, j).clone()).collect();
                out.push(self.shifted(&u, &col));
            }
        }
        out
    }
}

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// Reduced row echelon basis of the span.
struct Span {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Span {
    fn new(vectors: Vec<Vec<u64>>) -> Self {
        let mut s = Span { rows: Vec::new() };
        for v in vectors {
            s.insert(v);
        }
        s
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (p, r) in &self.rows {
            let c = v[*p];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = (*x + (P - c) * y) % P;
                }
            }
        }
        v
    }

    fn insert(&mut self, v: Vec<u64>) {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|&x| x != 0) else { return };
        let s = inv(v[p]);
        v.iter_mut().for_each(|x| *x = *x * s % P);
        for (_, r) in self.rows.iter_mut() {
            let c = r[p];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(&v) {
                    *x = (*x + (P - c) * y) % P;
                }
            }
        }
        self.rows.push((p, v));
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// `l(M / m^{n+1} M)` by brute force.
fn naive_hilbert(pres: &Presentation, n: usize) -> usize {
    let c = Coords::new(pres.nvars(), pres.size(), n as u32 + 1);
    c.len() - Span::new(c.relations(pres)).dim()
}

/// `l(m~M / mM)` for the Ratliff-Rush closure, as the space of `v` in
/// `M / mM` with `m^j v` inside `m^{1+j} M`, for growing `j` until stable.
fn naive_rr_first(pres: &Presentation, j_max: u32) -> usize {
    let t = pres.size();
    let mut last = None;
    let mut stable = 0;
    for j in 1..=j_max {
        let c = Coords::new(pres.nvars(), t, j + 1);
        let w = Span::new(c.relations(pres));
        // Residues of u e_i for |u| = j, one block per generator e_i.
        let blocks: Vec<Vec<Vec<u64>>> = (0..t)
            .map(|i| Monomial::all_of_degree(pres.nvars(), j).iter().map(|u| w.reduce(c.unit(u.exps(), i))).collect())
            .collect();
        // The map k^t -> residues; its kernel is the closure modulo mM.
        let image = Span::new(blocks.iter().map(|b| b.iter().flat_map(|r| r.iter().copied()).collect()).collect());
        let k = t - image.dim();
        if last == Some(k) {
            stable += 1;
            if stable >= 2 {
                return k;
            }
        } else {
            stable = 0;
        }
        last = Some(k);
    }
    last.unwrap()
}

fn small_family(spec: FamilySpec, n: usize, seed: u64) -> Vec<Presentation> {
    generate_family(&spec, n, seed, FieldSpec::default()).unwrap().0
}

#[test]
fn hilbert_function_agrees_with_brute_force() {
    let mut instances = vec![
        pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]]),
        pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]),
        pres(&["x", "y", "z"], &[vec!["x", "y", "z"], vec!["x^2", "x^2", "0"], vec!["0", "0", "x^2"]]),
    ];
    for (size, nvars) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        instances.extend(small_family(FamilySpec::Random { size, nvars, max_degree: 3 }, 3, size as u64 * 10 + nvars as u64));
    }
    for p in &instances {
        let m = TruncatedModule::build(p, 7).unwrap();
        for n in 0..6 {
            assert_eq!(m.hilbert_function(n).unwrap(), naive_hilbert(p, n), "n = {n} on {:?}", p.matrix_strings());
        }
    }
}

#[test]
fn published_graded_lengths() {
    // l(m^n M / m^{n+1} M) for n = 0, 1, 2.
    let graded = |p: &Presentation| -> Vec<usize> {
        let h: Vec<usize> = (0..3).map(|n| naive_hilbert(p, n)).collect();
        vec![h[0], h[1] - h[0], h[2] - h[1]]
    };
    let mm = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]]);
    let dz = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]);
    assert_eq!(graded(&mm), vec![2, 3, 3]);
    assert_eq!(graded(&dz), vec![2, 2, 3]);
    for p in [&mm, &dz] {
        let m = TruncatedModule::build(p, 8).unwrap();
        assert_eq!(m.graded_lengths()[..3].to_vec(), graded(p));
    }
}

#[test]
fn ratliff_rush_closure_by_definition() {
    let dz = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]);
    let mm = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]]);
    // The second generator lies in the closure of mM but not in mM.
    assert_eq!(naive_rr_first(&dz, 7), 1);
    assert_eq!(naive_rr_first(&mm, 7), 0);
    for (p, expect) in [(&dz, 1), (&mm, 0)] {
        let m = TruncatedModule::build(p, 12).unwrap();
        assert_eq!(ratliff_rush_lengths(&m, 2).unwrap()[0], expect);
    }
}

/// Determinant of a polynomial matrix by cofactor expansion.
fn det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    let f = m[0][0].field();
    let nv = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Poly::zero(f, nv);
    for c in 0..n {
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, p)| p.clone()).collect()).collect();
        let term = m[0][c].mul(&det(&minor));
        total = if c % 2 == 0 { total.add(&term) } else { total.sub(&term) };
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// Elementary divisor exponents from determinantal divisors
/// `d_k = min ord of k x k minors`.
fn divisor_exponents(p: &Presentation) -> Vec<u32> {
    let t = p.size();
    let mut d = vec![0u32];
    for k in 1..=t {
        let mut best = u32::MAX;
        for rows in subsets(t, k) {
            for cols in subsets(t, k) {
                let sub: Vec<Vec<Poly>> = rows.iter().map(|&i| cols.iter().map(|&j| p.entry(i, j).clone()).collect()).collect();
                if let Some(o) = det(&sub).ord().finite() {
                    best = best.min(o);
                }
            }
        }
        d.push(best);
    }
    let mut a: Vec<u32> = (1..=t).map(|k| d[k] - d[k - 1]).collect();
    a.sort();
    a
}

#[test]
fn one_variable_decomposition_matches_minors() {
    for size in 1..=3 {
        for p in small_family(FamilySpec::Random { size, nvars: 1, max_degree: 3 }, 6, 100 + size as u64) {
            let expect = divisor_exponents(&p);
            let n = expect.iter().sum::<u32>() as usize + 3;
            let mut got: Vec<u32> = dvr_decomposition(&p, n).unwrap().a.iter().map(|&x| x).collect();
            got.sort();
            assert_eq!(got, expect, "{:?}", p.matrix_strings());
            // k[[x]]/(x^a) has h = 1 + z + ... + z^{a-1}.
            let h = expect.iter().fold(IntPoly::zero(), |acc, &a| acc.add(&IntPoly::geometric(a as usize)));
            assert_eq!(h_dim_zero(&TruncatedModule::build(&p, n).unwrap()).unwrap(), h);
        }
    }
}

#[test]
fn samuel_polynomial_matches_hilbert_function() {
    for p in [
        pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]),
        pres(&["x", "y", "z"], &[vec!["x", "y", "0"], vec!["x^2", "x^2", "0"], vec!["0", "0", "x^2"]]),
        pres(&["x", "y", "z"], &[vec!["x+z", "y^2"], vec!["z^2", "x-y"]]),
    ] {
        let run = analyze(&p, &AnalysisOptions { seed: 3, ..Default::default() }).unwrap();
        let hd = HData::new(run.analysis.h().h, p.dim());
        let deg = hd.h.degree().unwrap_or(0);
        for n in deg..deg + 3 {
            assert_eq!(hd.samuel_polynomial_at(n as i64), naive_hilbert(&p, n) as i64, "n = {n}");
        }
    }
}

#[test]
fn b_series_stable_under_larger_truncation() {
    let p = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]);
    let f = FieldSpec::default();
    let x = [f.from_i64(3), f.from_i64(-5)];
    let a = TruncatedModule::build(&p, 10).unwrap().b_series(&x);
    let b = TruncatedModule::build(&p, 12).unwrap().b_series(&x);
    assert_eq!(a[..8], b[..8]);
    let opts = AnalysisOptions { seed: 5, ..Default::default() };
    let lo = analyze_at(&p, 8, &opts).unwrap().fingerprint();
    let hi = analyze_at(&p, 11, &opts).unwrap().fingerprint();
    assert_eq!(lo.0, hi.0);
    assert_eq!(lo.1, hi.1);
}

#[test]
fn direct_sums_of_cyclic_modules() {
    // Q/(l^a) has h = 1 + ... + z^{a-1} and Cohen-Macaulay G; sums add h.
    let f = FieldSpec::default();
    let specs: [(usize, &[u32]); 4] = [(2, &[1, 3]), (3, &[2, 2]), (3, &[1, 2, 3]), (2, &[3, 3, 1])];
    for (k, (nvars, exps)) in specs.iter().enumerate() {
        let t = exps.len();
        let phi: Vec<Vec<Poly>> = (0..t)
            .map(|i| {
                (0..t)
                    .map(|j| {
                        if i == j {
                            let c: Vec<u32> = (0..*nvars).map(|v| f.from_i64(((i + v + k) % 3) as i64 + 1)).collect();
                            Poly::linear_form(f, &c).pow(exps[i])
                        } else {
                            Poly::zero(f, *nvars)
                        }
                    })
                    .collect()
            })
            .collect();
        let names: Vec<String> = assocgr::poly::default_var_names(*nvars);
        let p = Presentation::new(f, names, phi, None).unwrap();
        let run = analyze(&p, &AnalysisOptions { seed: k as u64, ..Default::default() }).unwrap();
        let h = exps.iter().fold(IntPoly::zero(), |acc, &a| acc.add(&IntPoly::geometric(a as usize)));
        assert_eq!(run.analysis.h().h, h);
        assert!(run.analysis.cohen_macaulay());
    }
}
