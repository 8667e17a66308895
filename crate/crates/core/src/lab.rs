//! Executable theorem checks.
//!
//! Each check analyzes an instance, decides whether the hypotheses hold and,
//! if so, whether the conclusion does. An instance on which the analysis
//! itself gives up (no superficial form, truncation cap reached) yields an
//! inconclusive verdict, never a failing one.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{analyze, ratliff_rush_data, rr_residual, AnalysisOptions, Escalated};
use crate::corpus::corpus_in;
use crate::error::{Error, Result};
use crate::family::{derive_seed, generate_family, FamilySpec};
use crate::field::FieldSpec;
use crate::instance::InstanceFile;
use crate::invariants::{dvr_decomposition, h_dim_zero, h_direct_fit, HData, IntPoly};
use crate::linalg::Mat;
use crate::model::TruncatedModule;
use crate::poly::Poly;
use crate::presentation::Presentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypotheses {
    Met,
    NotMet,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    /// Hypotheses not met (or not decidable); the conclusion is not tested.
    Skipped,
}

/// Invariants a verdict was based on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub mu: usize,
    pub i_m: u32,
    pub ord_det: u32,
    pub dim: usize,
    pub h: Option<IntPoly>,
    pub depth: Option<usize>,
    pub reduction_number: Option<usize>,
    pub truncation: Option<usize>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem: String,
    pub fingerprint: String,
    pub seed: u64,
    pub hypotheses: Hypotheses,
    /// Meaningful only when the hypotheses are met.
    pub conclusion: Option<bool>,
    pub witness: Witness,
    /// Failed assertions, or the reason for an inconclusive verdict.
    pub messages: Vec<String>,
}

impl TheoremVerdict {
    pub fn status(&self) -> Status {
        match (self.hypotheses, self.conclusion) {
            (Hypotheses::Met, Some(true)) => Status::Pass,
            (Hypotheses::Met, Some(false)) => Status::Fail,
            (Hypotheses::Met, None) => Status::Inconclusive,
            _ => Status::Skipped,
        }
    }
}

pub fn fingerprint(pres: &Presentation) -> String {
    let rows: Vec<String> = pres.matrix_strings().iter().map(|r| format!("[{}]", r.join(", "))).collect();
    let mut s = format!("[{}] over {}", rows.join(", "), pres.vars().join(","));
    if let Some(g) = pres.hypersurface_string() {
        s.push_str(&format!(" with g = {g}"));
    }
    s
}

fn base_witness(pres: &Presentation) -> Witness {
    Witness { mu: pres.size(), i_m: pres.i_m(), ord_det: pres.ord_det(), dim: pres.dim(), ..Witness::default() }
}

fn fill_witness(w: &mut Witness, run: &Escalated) {
    let a = &run.analysis;
    w.h = Some(a.levels[0].h.clone());
    w.depth = Some(a.depth);
    w.reduction_number = Some(a.reduction_number);
    w.truncation = Some(a.truncation);
}

fn verdict(theorem: &str, pres: &Presentation, seed: u64) -> TheoremVerdict {
    TheoremVerdict {
        theorem: theorem.to_string(),
        fingerprint: fingerprint(pres),
        seed,
        hypotheses: Hypotheses::Met,
        conclusion: None,
        witness: base_witness(pres),
        messages: Vec::new(),
    }
}

/// Collects assertion outcomes into a verdict.
struct Asserts<'a> {
    v: &'a mut TheoremVerdict,
    ok: bool,
}

impl<'a> Asserts<'a> {
    fn new(v: &'a mut TheoremVerdict) -> Self {
        Asserts { v, ok: true }
    }

    fn check(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            self.v.messages.push(what());
        }
    }

    fn finish(self) {
        self.v.conclusion = Some(self.ok);
    }
}

fn inconclusive(mut v: TheoremVerdict, e: &Error) -> TheoremVerdict {
    v.conclusion = None;
    v.messages.push(e.to_string());
    v
}

/// `mu (1 + z + ... + z^{i-1})`.
fn flat_part(mu: usize, i: u32) -> IntPoly {
    IntPoly::geometric(i as usize).scale(mu as i64)
}

pub fn check_almost_minimal(pres: &Presentation, opts: &AnalysisOptions) -> TheoremVerdict {
    match analyze(pres, opts) {
        Ok(run) => almost_minimal_from(pres, opts.seed, &run),
        Err(e) => inconclusive(hyp_almost_minimal(pres, opts.seed), &e),
    }
}

fn hyp_almost_minimal(pres: &Presentation, seed: u64) -> TheoremVerdict {
    let mut v = verdict("thm3.1", pres, seed);
    let (mu, i) = (pres.size() as u32, pres.i_m());
    if pres.ord_det() != mu * i + 1 {
        v.hypotheses = Hypotheses::NotMet;
    }
    v
}

pub fn almost_minimal_from(pres: &Presentation, seed: u64, run: &Escalated) -> TheoremVerdict {
    let mut v = hyp_almost_minimal(pres, seed);
    fill_witness(&mut v.witness, run);
    if v.hypotheses != Hypotheses::Met {
        return v;
    }
    let a = &run.analysis;
    let d = pres.dim() as i64;
    let (mu, i) = (pres.size(), pres.i_m());
    let h = &a.levels[0].h;
    let rest = h.sub(&flat_part(mu, i));
    let s = rest.degree();
    let shaped = s.is_some_and(|s| rest == IntPoly::new({
        let mut c = vec![0; s + 1];
        c[s] = 1;
        c
    }));
    let mut chk = Asserts::new(&mut v);
    chk.check(a.depth as i64 >= d - 1, || format!("depth {} < d - 1 = {}", a.depth, d - 1));
    chk.check(shaped, || format!("h = {h} is not mu(1+..+z^(i-1)) + z^s"));
    if let Some(s) = s {
        chk.check(s >= i as usize, || format!("s = {s} < i(M) = {i}"));
        chk.check(a.cohen_macaulay() == (s == i as usize), || {
            format!("Cohen-Macaulay = {} but s = {s}, i(M) = {i}", a.cohen_macaulay())
        });
    }
    chk.finish();
    v
}

pub fn check_order_mu_plus_one(pres: &Presentation, opts: &AnalysisOptions) -> TheoremVerdict {
    match analyze(pres, opts) {
        Ok(run) => order_mu_plus_one_from(pres, opts.seed, &run),
        Err(e) => inconclusive(hyp_order_mu_plus_one(pres, opts.seed), &e),
    }
}

fn hyp_order_mu_plus_one(pres: &Presentation, seed: u64) -> TheoremVerdict {
    let mut v = verdict("cor3.2", pres, seed);
    if pres.ord_det() as usize != pres.size() + 1 {
        v.hypotheses = Hypotheses::NotMet;
    }
    v
}

pub fn order_mu_plus_one_from(pres: &Presentation, seed: u64, run: &Escalated) -> TheoremVerdict {
    let mut v = hyp_order_mu_plus_one(pres, seed);
    fill_witness(&mut v.witness, run);
    if v.hypotheses != Hypotheses::Met {
        return v;
    }
    let a = &run.analysis;
    let d = pres.dim() as i64;
    let r = pres.size() as i64;
    let h = a.levels[0].h.clone();
    let r_plus_z = IntPoly::new(vec![r, 1]);
    let r_plus_z2 = IntPoly::new(vec![r, 0, 1]);
    let red_ok = a.reduction_number <= 2;
    v.witness.notes.push(format!("red <= 2: {red_ok}"));
    let mut chk = Asserts::new(&mut v);
    chk.check(a.depth as i64 >= d - 1, || format!("depth {} < d - 1 = {}", a.depth, d - 1));
    if red_ok {
        chk.check(h == r_plus_z || h == r_plus_z2, || format!("h = {h} is neither r + z nor r + z^2"));
        chk.check(a.cohen_macaulay() == (h == r_plus_z), || {
            format!("Cohen-Macaulay = {} with h = {h}", a.cohen_macaulay())
        });
        chk.check((a.depth as i64 == d - 1) == (h == r_plus_z2), || {
            format!("depth {} with h = {h}", a.depth)
        });
    }
    chk.finish();
    v
}

/// The hypersurface of order 3 used for the `e(A) = 3` checks: the declared
/// one, or `x_1^{3 - ord det} det` when `ord det <= 3`.
pub fn e3_hypersurface(pres: &Presentation) -> std::result::Result<Poly, Hypotheses> {
    if let Some(g) = pres.hypersurface() {
        return if g.ord().finite() == Some(3) { Ok(g.clone()) } else { Err(Hypotheses::NotMet) };
    }
    let o = pres.ord_det();
    if o <= 3 {
        let x = Poly::var(pres.field(), pres.nvars(), 0);
        Ok(x.pow(3 - o).mul(pres.det()))
    } else {
        Err(Hypotheses::Unknown)
    }
}

/// Case lists for modules without free summands over `k[[..]]/(g)`,
/// `ord g = 3`, indexed by the number of generators.
pub fn e3_case_list(mu: usize) -> Vec<IntPoly> {
    let p = |c: &[i64]| IntPoly::new(c.to_vec());
    match mu {
        0 => vec![p(&[])],
        1 => vec![p(&[1]), p(&[1, 1])],
        2 => vec![p(&[2]), p(&[2, 1]), p(&[2, 0, 1]), p(&[2, 2])],
        3 => vec![
            p(&[3]),
            p(&[3, 1]),
            p(&[3, 0, 1]),
            p(&[3, 2]),
            p(&[3, 1, 1]),
            p(&[3, 0, 3, -1]),
            p(&[3, 3]),
        ],
        _ => Vec::new(),
    }
}

pub fn check_e3(pres: &Presentation, mu_required: usize, opts: &AnalysisOptions) -> TheoremVerdict {
    let id = if mu_required == 2 { "e3mu2" } else { "e3mu3" };
    let mut v = verdict(id, pres, opts.seed);
    if pres.size() != mu_required {
        v.hypotheses = Hypotheses::NotMet;
        return v;
    }
    let g = match e3_hypersurface(pres) {
        Ok(g) => g,
        Err(h) => {
            v.hypotheses = h;
            return v;
        }
    };
    let with_g = match pres.with_hypersurface(Some(g)) {
        Ok(p) => p,
        Err(e) => return inconclusive(v, &e),
    };
    v.witness.notes.push(format!("g = {}", with_g.hypersurface_string().unwrap_or_default()));
    match analyze(&with_g, opts) {
        Ok(run) => e3_from(v, &with_g, &run),
        Err(e) => inconclusive(v, &e),
    }
}

fn e3_from(mut v: TheoremVerdict, pres: &Presentation, run: &Escalated) -> TheoremVerdict {
    fill_witness(&mut v.witness, run);
    let a = &run.analysis;
    let d = pres.dim() as i64;
    let mu = pres.size();
    let bound = if mu == 2 { d - 1 } else { d - 2 };
    let last = a.chain.levels.last().expect("nonempty chain");
    let dvr = match dvr_decomposition(last.presentation(), last.truncation()) {
        Ok(x) => x,
        Err(e) => return inconclusive(v, &e),
    };
    let free = dvr.free_summands(3);
    let h = &a.levels[0].h;
    let non_free = h.sub(&IntPoly::geometric(3).scale(free as i64));
    let cases = e3_case_list(mu - free);
    v.witness.notes.push(format!("elementary divisors {:?}, free summands {free}", dvr.a));
    let mut chk = Asserts::new(&mut v);
    chk.check(a.depth as i64 >= bound, || format!("depth {} < {bound}", a.depth));
    chk.check(cases.contains(&non_free), || {
        format!("h - {free}(1+z+z^2) = {non_free} is not in the case list for mu = {}", mu - free)
    });
    chk.finish();
    v
}

/// Unconditional identities, one verdict each.
pub fn universal_property_suite(pres: &Presentation, opts: &AnalysisOptions) -> Vec<TheoremVerdict> {
    let run = match analyze(pres, opts) {
        Ok(r) => r,
        Err(e) => return vec![inconclusive(verdict("universal", pres, opts.seed), &e)],
    };
    universal_from(pres, opts.seed, &run)
}

fn colon_free_length(m: &TruncatedModule, forms: &[Mat], n: usize) -> usize {
    m.filtration_dim(n + 1) - m.ideal_times_filtration(forms, n).dim()
}

fn matrices(m: &TruncatedModule, forms: &[Vec<u32>]) -> Vec<Mat> {
    forms.iter().map(|v| m.form_matrix(v)).collect()
}

pub fn universal_from(pres: &Presentation, seed: u64, run: &Escalated) -> Vec<TheoremVerdict> {
    let a = &run.analysis;
    let chain = &a.chain;
    let r = a.dim();
    let n_top = a.truncation;
    let mut out = Vec::new();
    let start = |id: &str| {
        let mut v = verdict(id, pres, seed);
        fill_witness(&mut v.witness, run);
        v
    };

    // Singh's equality at every level of the chain.
    {
        let mut v = start("singh-equality");
        let mut chk = Asserts::new(&mut v);
        for c in 0..r {
            let (m, q) = (&chain.levels[c], &chain.levels[c + 1]);
            for (n, &b) in chain.b_series[c].iter().enumerate() {
                let lhs = m.graded_length(n).unwrap() as i64;
                let rhs = q.hilbert_function(n).unwrap() as i64 - b as i64;
                chk.check(lhs == rhs, || format!("level {c}, n = {n}: {lhs} != {rhs}"));
            }
        }
        chk.finish();
        out.push(v);
    }

    let hd = a.h();
    {
        let mut v = start("multiplicity-bound");
        let (e, mu, i) = (hd.multiplicity(), pres.size() as i64, pres.i_m() as i64);
        let mut chk = Asserts::new(&mut v);
        chk.check(e == pres.ord_det() as i64, || format!("e = {e} differs from ord det"));
        chk.check(e >= mu * i, || format!("e = {e} < mu i = {}", mu * i));
        chk.finish();
        out.push(v);
    }
    {
        let mut v = start("e2-nonnegative");
        let e2 = hd.hilbert_coefficient(2);
        let mut chk = Asserts::new(&mut v);
        chk.check(e2 >= 0, || format!("e_2 = {e2}"));
        chk.finish();
        out.push(v);
    }

    // Direct fits at every level, independent of the colon recursion.
    let direct: Vec<Result<IntPoly>> = (0..=r)
        .map(|c| {
            let m = &chain.levels[c];
            if c == r {
                h_dim_zero(m)
            } else {
                h_direct_fit(&m.graded_lengths(), r - c)
            }
        })
        .collect();
    {
        let mut v = start("h-two-routes");
        if let Some(Err(e)) = direct.iter().find(|d| d.is_err()) {
            out.push(inconclusive(v, e));
        } else {
            let mut chk = Asserts::new(&mut v);
            for (c, d) in direct.iter().enumerate() {
                let d = d.as_ref().unwrap();
                chk.check(*d == a.levels[c].h, || format!("level {c}: recursion {} vs fit {d}", a.levels[c].h));
            }
            chk.finish();
            out.push(v);
        }
    }
    {
        let mut v = start("coefficient-invariance");
        if direct.iter().any(|d| d.is_err()) {
            v.conclusion = None;
            v.messages.push("direct fit unavailable".into());
            out.push(v);
        } else {
            let mut chk = Asserts::new(&mut v);
            for c in 0..r {
                let rc = r - c;
                let hm = HData::new(direct[c].clone().unwrap(), rc);
                let hn = HData::new(direct[c + 1].clone().unwrap(), rc - 1);
                chk.check(hm.h.coeff(0) == hn.h.coeff(0), || format!("level {c}: h_0 changes"));
                for i in 0..rc {
                    let (x, y) = (hm.hilbert_coefficient(i), hn.hilbert_coefficient(i));
                    chk.check(x == y, || format!("level {c}: e_{i} = {x} vs {y}"));
                }
                let sum_b: i64 = chain.b_series[c].iter().map(|&b| b as i64).sum();
                let sign = if rc.is_multiple_of(2) { 1 } else { -1 };
                let (x, y) = (hm.hilbert_coefficient(rc), hn.hilbert_coefficient(rc));
                chk.check(x == y - sign * sum_b, || format!("level {c}: e_{rc} = {x}, expected {}", y - sign * sum_b));
                chk.check((x == y) == (sum_b == 0), || format!("level {c}: e_{rc} equality vs b = 0"));
            }
            chk.finish();
            out.push(v);
        }
    }
    if r >= 1 {
        let mut v = start("ratliff-rush-identity");
        match rr_residual(a) {
            Some(res) => {
                let mut chk = Asserts::new(&mut v);
                chk.check(res.is_zero(), || format!("residual {res}"));
                chk.finish();
            }
            None => v.messages.push("Ratliff-Rush data not computed".into()),
        }
        out.push(v);
    }

    // Five-term sequence for the two-dimensional module in the chain.
    if r >= 2 {
        let c = r - 2;
        let mut v = start("five-term-sequence");
        let m = &chain.levels[c];
        let mb = &chain.levels[c + 1];
        let j = matrices(m, &chain.forms_at_level(c));
        let yb = matrices(mb, &chain.forms_at_level(c + 1));
        match (m.reduction_number(&j), mb.reduction_number(&yb)) {
            (Ok(r1), Ok(r2)) => {
                let b = &chain.b_series[c];
                let mut chk = Asserts::new(&mut v);
                let top = n_top.saturating_sub(1 + r1.max(r2));
                for n in 1..=top {
                    let a1 = m.colon_length(&j, n).unwrap() as i64;
                    let a2 = b[n - 1] as i64;
                    let a3 = b[n] as i64;
                    let a4 = colon_free_length(m, &j, n) as i64;
                    let a5 = colon_free_length(mb, &yb, n) as i64;
                    chk.check(a1 - a2 + a3 - a4 + a5 == 0, || format!("n = {n}: {a1} - {a2} + {a3} - {a4} + {a5} != 0"));
                }
                chk.finish();
            }
            (Err(e), _) | (_, Err(e)) => v.messages.push(e.to_string()),
        }
        out.push(v);
    }

    // Short exact sequence at n = 1 for every level of positive dimension.
    if r >= 1 {
        let mut v = start("degree-two-sequence");
        let mut chk = Asserts::new(&mut v);
        let mut unavailable = None;
        for c in 0..r {
            let m = &chain.levels[c];
            let q = &chain.levels[c + 1];
            let j = matrices(m, &chain.forms_at_level(c));
            let jb = matrices(q, &chain.forms_at_level(c + 1));
            if let Err(e) = m.reduction_number(&j) {
                unavailable = Some(e);
                break;
            }
            let b1 = chain.b_series[c][1] as i64;
            let lhs = b1 + colon_free_length(q, &jb, 1) as i64;
            let rhs = colon_free_length(m, &j, 1) as i64;
            chk.check(lhs == rhs, || format!("level {c}: {lhs} != {rhs}"));
        }
        chk.finish();
        if let Some(e) = unavailable {
            v.conclusion = None;
            v.messages = vec![e.to_string()];
        }
        out.push(v);
    }

    // One-dimensional sequence at n = 2 on the last module of positive
    // dimension.
    if r >= 1 {
        let c = r - 1;
        let mut v = start("dimension-one-sequence");
        let m = &chain.levels[c];
        let q = &chain.levels[c + 1];
        let x = matrices(m, &chain.forms_at_level(c));
        match m.reduction_number(&x) {
            Ok(red) if n_top > red.max(2) => {
                let left = m.kernel_on_quotient(&x[0], 2) as i64;
                let middle = (m.filtration_dim(2) - m.ideal_times_filtration(&x, 2).dim()) as i64;
                let right = q.filtration_dim(2) as i64;
                let b1g1 = (chain.b_series[c][1] + m.graded_length(1).unwrap()) as i64;
                let mut chk = Asserts::new(&mut v);
                chk.check(left + right == middle, || format!("{left} + {right} != {middle}"));
                chk.check(left == b1g1, || format!("kernel {left} != b_1 + g_1 = {b1g1}"));
                chk.finish();
            }
            Ok(red) => v.messages.push(format!("reduction number {red} too close to the truncation")),
            Err(e) => v.messages.push(e.to_string()),
        }
        out.push(v);
    }

    // Shape of G(M)/(x*)G(M) on e(A) = 3 instances.
    {
        let mut v = start("fiber-shape");
        if pres.dim() == 0 || e3_hypersurface(pres).is_err() {
            v.hypotheses = Hypotheses::NotMet;
        } else {
            let m = &chain.levels[0];
            let j = matrices(m, &chain.forms_at_level(0));
            let jm = m.ideal_times_filtration(&j, 0);
            let jm1 = m.ideal_times_filtration(&j, 1);
            let f = |n: usize| m.filtration(n);
            let alpha = f(1).dim() - f(2).sum(&jm).unwrap().dim();
            let beta = f(2).dim() - f(3).sum(&jm1).unwrap().dim();
            let mu = pres.size();
            v.witness.notes.push(format!("alpha = {alpha}, beta = {beta}"));
            let mut chk = Asserts::new(&mut v);
            chk.check(beta <= alpha && alpha <= mu, || format!("beta {beta}, alpha {alpha}, mu {mu}"));
            chk.check(a.reduction_number <= 2, || format!("reduction number {}", a.reduction_number));
            chk.finish();
        }
        out.push(v);
    }

    // Ratliff-Rush sequence inequalities.
    if let Some(rr) = a.rr.as_ref() {
        let mut v = start("ratliff-rush-sequence");
        let below = if r >= 2 { Some(ratliff_rush_data(chain, 1)) } else { None };
        match below {
            Some(Err(e)) => {
                v.messages.push(e.to_string());
            }
            _ => {
                let below = below.map(|b| b.unwrap());
                let b = &chain.b_series[0];
                let rt = |n: usize| rr.length(n) as i64;
                let rn = |n: usize| below.as_ref().map_or(0, |x| x.length(n) as i64);
                let top = rr.bound.max(below.as_ref().map_or(0, |x| x.bound)) + 1;
                let mut chk = Asserts::new(&mut v);
                for n in 0..top.min(b.len()) {
                    let bn = b[n] as i64;
                    chk.check(bn <= rt(n), || format!("n = {n}: b_n = {bn} > {}", rt(n)));
                    chk.check(rt(n) - bn <= rt(n + 1), || format!("n = {n}: middle term too large"));
                    if r >= 2 {
                        chk.check(rt(n + 1) - (rt(n) - bn) <= rn(n + 1), || format!("n = {n}: cokernel exceeds the quotient"));
                    }
                }
                if r >= 2 {
                    chk.check(rt(1) <= rn(1), || format!("{} > {}", rt(1), rn(1)));
                }
                chk.finish();
            }
        }
        out.push(v);
    }

    // Known shapes of h.
    if r >= 1 {
        let c = r - 1;
        let mut v = start("dimension-one-h-shape");
        let p = chain.levels[c].presentation();
        let (mu, i) = (p.size() as i64, p.i_m() as usize);
        let h = &a.levels[c].h;
        let mut chk = Asserts::new(&mut v);
        for k in 0..=h.degree().unwrap_or(0).max(i) {
            if k < i {
                chk.check(h.coeff(k) == mu, || format!("h_{k} = {} != mu", h.coeff(k)));
            } else {
                chk.check(h.coeff(k) >= 0, || format!("h_{k} = {} < 0", h.coeff(k)));
            }
        }
        chk.finish();
        out.push(v);
    }
    {
        let mut v = start("minimal-multiplicity-bound");
        let (mu, i) = (pres.size(), pres.i_m());
        if pres.ord_det() as usize != mu * i as usize {
            v.hypotheses = Hypotheses::NotMet;
        } else {
            let mut chk = Asserts::new(&mut v);
            chk.check(a.cohen_macaulay(), || "not Cohen-Macaulay".into());
            chk.check(a.levels[0].h == flat_part(mu, i), || format!("h = {}", a.levels[0].h));
            chk.finish();
        }
        out.push(v);
    }
    {
        let mut v = start("cyclic-cohen-macaulay");
        if pres.size() != 1 {
            v.hypotheses = Hypotheses::NotMet;
        } else {
            let mut chk = Asserts::new(&mut v);
            chk.check(a.cohen_macaulay(), || "cyclic module without Cohen-Macaulay G(M)".into());
            chk.finish();
        }
        out.push(v);
    }
    {
        let mut v = start("truncation-robustness");
        let mut chk = Asserts::new(&mut v);
        chk.check(run.recheck == Some(a.truncation + 2), || "no recomputation at N + 2".into());
        chk.finish();
        out.push(v);
    }
    out
}

/// Theorems runnable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    /// `e = mu i + 1`: depth and shape of h. Command-line id `thm3.1`.
    AlmostMinimal,
    /// `ord det = mu + 1` with reduction number at most 2. Id `cor3.2`.
    OrderMuPlusOne,
    /// Two generators over a hypersurface of order 3.
    E3Mu2,
    /// Three generators over a hypersurface of order 3.
    E3Mu3,
    /// Unconditional identities.
    Universal,
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm3.1" => Ok(TheoremId::AlmostMinimal),
            "cor3.2" => Ok(TheoremId::OrderMuPlusOne),
            "e3mu2" => Ok(TheoremId::E3Mu2),
            "e3mu3" => Ok(TheoremId::E3Mu3),
            "universal" => Ok(TheoremId::Universal),
            _ => Err(Error::Precondition(format!(
                "unknown theorem '{s}' (expected thm3.1, cor3.2, e3mu2, e3mu3 or universal)"
            ))),
        }
    }
}

impl TheoremId {
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::AlmostMinimal => "thm3.1",
            TheoremId::OrderMuPlusOne => "cor3.2",
            TheoremId::E3Mu2 => "e3mu2",
            TheoremId::E3Mu3 => "e3mu3",
            TheoremId::Universal => "universal",
        }
    }

    pub fn check(self, pres: &Presentation, opts: &AnalysisOptions) -> Vec<TheoremVerdict> {
        match self {
            TheoremId::AlmostMinimal => vec![check_almost_minimal(pres, opts)],
            TheoremId::OrderMuPlusOne => vec![check_order_mu_plus_one(pres, opts)],
            TheoremId::E3Mu2 => vec![check_e3(pres, 2, opts)],
            TheoremId::E3Mu3 => vec![check_e3(pres, 3, opts)],
            TheoremId::Universal => universal_property_suite(pres, opts),
        }
    }
}

/// Runs a check over many instances in parallel; trial `k` uses the seed
/// derived from `(opts.seed, k)`. Output order follows the input order.
pub fn run_trials(theorem: TheoremId, instances: &[Presentation], opts: &AnalysisOptions) -> Vec<(usize, TheoremVerdict)> {
    instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, p)| {
            let o = AnalysisOptions { seed: derive_seed(opts.seed, k as u64), ..*opts };
            theorem.check(p, &o).into_iter().map(move |v| (k, v))
        })
        .collect()
}

fn profile(mu: usize, i: u32) -> Vec<u32> {
    let mut p = vec![i; mu - 1];
    p.push(i + 1);
    p
}

/// Sub-families a theorem is exercised on, and the number of leading
/// trials that run the untransformed seeds.
fn standard_specs(theorem: TheoremId, field: FieldSpec) -> (Vec<FamilySpec>, Vec<Presentation>) {
    let corpus = corpus_in(field);
    let seeds = |pred: &dyn Fn(&str) -> bool| -> Vec<Presentation> {
        corpus.iter().filter(|e| pred(&e.name)).map(|e| e.presentation.clone()).collect()
    };
    let transforms = |seeds: &[Presentation], extra: &[usize]| -> Vec<FamilySpec> {
        extra
            .iter()
            .flat_map(|&k| seeds.iter().map(move |s| FamilySpec::Transforms { seed: Some(Box::new(s.clone())), extra_vars: k }))
            .collect()
    };
    let r_gen = |n: &str| n.starts_with("rgen-");
    match theorem {
        TheoremId::AlmostMinimal => {
            let mut specs = Vec::new();
            for nvars in 2..=4 {
                for (mu, i) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
                    specs.push(FamilySpec::Profile { nvars, profile: profile(mu, i) });
                }
            }
            specs.extend(transforms(&seeds(&r_gen), &[0, 1, 2]));
            (specs, Vec::new())
        }
        TheoremId::OrderMuPlusOne => {
            let mut specs = Vec::new();
            for nvars in 2..=4 {
                for r in 1..=4 {
                    specs.push(FamilySpec::Profile { nvars, profile: profile(r, 1) });
                }
            }
            specs.extend(transforms(&seeds(&r_gen), &[0, 1, 2]));
            (specs, Vec::new())
        }
        TheoremId::E3Mu2 => {
            let s = seeds(&|n| n.starts_with("2gen-") && !n.ends_with("transformed"));
            (transforms(&s, &[0, 1]), s)
        }
        TheoremId::E3Mu3 => {
            let s = seeds(&|n| n.starts_with("3gen-"));
            (transforms(&s, &[0, 1]), s)
        }
        TheoremId::Universal => {
            let mut specs = Vec::new();
            for nvars in 1..=3 {
                for size in 1..=3 {
                    specs.push(FamilySpec::Random { size, nvars, max_degree: 3 });
                }
            }
            (specs, Vec::new())
        }
    }
}

/// The built-in family for a theorem: the untransformed seeds (if any)
/// followed by instances cycling through the sub-families.
pub fn standard_family(theorem: TheoremId, trials: usize, seed: u64, field: FieldSpec) -> Result<Vec<Presentation>> {
    let (specs, seeds) = standard_specs(theorem, field);
    let mut out: Vec<Presentation> = seeds.into_iter().take(trials).collect();
    for k in out.len()..trials {
        let spec = &specs[k % specs.len()];
        let (mut one, _) = generate_family(spec, 1, derive_seed(seed, k as u64), field)?;
        out.push(one.pop().expect("one instance"));
    }
    Ok(out)
}

/// `count` instances of a user-supplied family.
pub fn custom_family(spec: &FamilySpec, trials: usize, seed: u64, field: FieldSpec) -> Result<Vec<Presentation>> {
    Ok(generate_family(spec, trials, seed, field)?.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

impl Tally {
    pub fn of<'a>(verdicts: impl IntoIterator<Item = &'a TheoremVerdict>) -> Self {
        let mut t = Tally::default();
        for v in verdicts {
            match v.status() {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inconclusive => t.inconclusive += 1,
                Status::Skipped => t.skipped += 1,
            }
        }
        t
    }
}

/// Writes a failing instance in the instance-file format and returns its
/// path.
pub fn dump_reproducer(dir: &Path, pres: &Presentation, v: &TheoremVerdict, index: usize) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut file = InstanceFile::from_presentation(pres);
    file.seed = Some(v.seed);
    file.truncation = v.witness.truncation;
    let mut text = format!("# {} failed\n", v.theorem);
    for m in &v.messages {
        text.push_str(&format!("# {m}\n"));
    }
    text.push_str(&file.to_text());
    let path = dir.join(format!("{}-{index:04}.txt", v.theorem));
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(seed: u64) -> AnalysisOptions {
        AnalysisOptions { seed, ..AnalysisOptions::default() }
    }

    fn pres(vars: &[&str], rows: &[Vec<&str>], g: Option<&str>) -> Presentation {
        Presentation::from_strings(FieldSpec::default(), vars, rows, g).unwrap()
    }

    #[test]
    fn theorem_hypotheses() {
        let p = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], None);
        let v = check_almost_minimal(&p, &opts(1));
        assert_eq!(v.status(), Status::Pass, "{:?}", v.messages);
        let q = pres(&["x", "y"], &[vec!["y", "0"], vec!["0", "y"]], None);
        assert_eq!(check_almost_minimal(&q, &opts(1)).status(), Status::Skipped);
    }

    #[test]
    fn e3_needs_a_cubic() {
        let p = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], Some("y^3"));
        let v = check_e3(&p, 2, &opts(4));
        assert_eq!(v.status(), Status::Pass, "{:?}", v.messages);
        let q = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y^3"]], None);
        assert_eq!(check_e3(&q, 2, &opts(4)).hypotheses, Hypotheses::Unknown);
        let big = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], Some("y^4"));
        assert_eq!(check_e3(&big, 2, &opts(4)).hypotheses, Hypotheses::NotMet);
    }

    #[test]
    fn unknown_theorem_id() {
        assert!("thm9".parse::<TheoremId>().is_err());
        assert_eq!("e3mu3".parse::<TheoremId>().unwrap(), TheoremId::E3Mu3);
    }

    #[test]
    fn universal_suite_on_small_instance() {
        let p = pres(&["x", "y", "z"], &[vec!["x", "y"], vec!["z^2", "x+z"]], None);
        let vs = universal_property_suite(&p, &opts(2));
        for v in &vs {
            assert_ne!(v.status(), Status::Fail, "{}: {:?}", v.theorem, v.messages);
        }
        assert!(vs.iter().filter(|v| v.status() == Status::Pass).count() >= 10);
    }
}
