//! Depth of the associated graded module and the Ratliff-Rush side.
//!
//! Depth is read off a verified superficial chain `M = M_0 -> ... -> M_r`:
//! `depth G(M) >= c + 1` exactly when `h(M_c) = h(M_{c+1})`. The h-polynomials
//! come from the zero-dimensional end of the chain and the colon series
//! `b^(c)` via `h(M_c) = h(M_{c+1}) - (1-z)^{dim M_c} b^(c)`.
//!
//! The Ratliff-Rush lengths `l(m~^n M / m^n M)` are computed from colon chains
//! `C_{k,0} = m^k M`, `C_{k,i+1} = (C_{k,i} : m)`, so that `C_{n+j,j} =
//! (m^{n+j} M : m^j)`. They give `r_M(z)`, whose vanishing is an independent
//! test of `depth G(M) >= 1`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{h_dim_zero, h_direct_fit, HData, IntPoly};
use crate::linalg::{Mat, Subspace};
use crate::model::TruncatedModule;
use crate::presentation::Presentation;
use crate::superficial::{form_rng, superficial_sequence, Chain, Flavor, DEFAULT_RETRIES};

/// Consecutive equal colon dimensions required before a Ratliff-Rush length
/// is accepted.
const RR_AGREEMENT: usize = 4;

pub const DEFAULT_TRUNCATION_CAP: usize = 24;

/// Colon chains `C_{k,i}` on a fixed model, stored modulo `m^{k-i} M`.
pub struct RatliffRush<'a> {
    model: &'a TruncatedModule,
    chains: HashMap<usize, Vec<Subspace>>,
}

impl<'a> RatliffRush<'a> {
    pub fn new(model: &'a TruncatedModule) -> Self {
        RatliffRush { model, chains: HashMap::new() }
    }

    /// `(prev : m)` where `prev` is a subspace of `M / m^{l+1} M` containing
    /// nothing below `m^{l+1} M`; the result lives in `M / m^l M`.
    fn colon_by_m(&self, prev: &Subspace, l: usize) -> Subspace {
        let m = self.model;
        let rows = m.std_start(l);
        let cols = m.std_start(l + 1);
        let nv = m.nvars();
        let f = m.field();
        let mut data = vec![vec![0u32; nv * cols]; rows];
        for (k, row) in data.iter_mut().enumerate() {
            for j in 0..nv {
                let image = &m.mult(j).row(k)[..cols];
                let res = if prev.dim() == 0 { image.to_vec() } else { prev.residual(image) };
                row[j * cols..(j + 1) * cols].copy_from_slice(&res);
            }
        }
        let r = Mat::from_rows_width(f, nv * cols, &data);
        // left kernel of r
        r.transpose().kernel()
    }

    /// `dim C_{k,i}` in `M / m^{k-i} M`.
    fn chain_dim(&mut self, k: usize, i: usize) -> usize {
        if !self.chains.contains_key(&k) {
            let zero = Subspace::zero(self.model.field(), self.model.std_start(k));
            self.chains.insert(k, vec![zero]);
        }
        loop {
            let have = self.chains[&k].len();
            if have > i {
                return self.chains[&k][i].dim();
            }
            let l = k - have;
            let next = self.colon_by_m(self.chains[&k].last().unwrap(), l);
            self.chains.get_mut(&k).unwrap().push(next);
        }
    }

    /// `l(m~^n M / m^n M)` for `n >= 1`, accepted once
    /// `l((m^{n+j} M : m^j) / m^n M)` is constant for four consecutive `j`.
    pub fn length(&mut self, n: usize) -> Result<usize> {
        if n == 0 {
            return Ok(0);
        }
        let top = self.model.truncation();
        let mut run = 0;
        let mut last = None;
        let mut j = 0;
        while n + j <= top {
            let d = self.chain_dim(n + j, j);
            if Some(d) == last {
                run += 1;
            } else {
                run = 1;
                last = Some(d);
            }
            if run == RR_AGREEMENT {
                return Ok(d);
            }
            j += 1;
        }
        Err(Error::truncation(top, format!("Ratliff-Rush colon chain for n = {n} did not stabilize")))
    }
}

/// An index `B >= 1` with `l(m~^n M_c / m^n M_c) = 0` for every `n >= B`.
///
/// At dimension one, `m^{n+1} M = x m^n M` for `n >= red_x` and `x` regular
/// give `m~^n M = m^n M`. Going up one level, when `b_n = 0` and
/// `m~^{n+1} N = m^{n+1} N` the Ratliff-Rush lengths of `M` at `n` and `n+1`
/// agree; since they vanish eventually they vanish from that point on.
pub fn rr_vanishing_bound(chain: &Chain, level: usize) -> Result<usize> {
    let r = chain.forms.len();
    if level >= r {
        return Err(Error::Precondition("Ratliff-Rush lengths need a module of positive dimension".into()));
    }
    let last = r - 1;
    let model = &chain.levels[last];
    let x = model.form_matrix(&chain.forms[last].coefficients);
    let mut bound = model.reduction_number(std::slice::from_ref(&x))?.max(1);
    for c in (level..last).rev() {
        let lnz = chain.b_series[c].iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
        bound = (bound.saturating_sub(1)).max(lnz).max(1);
    }
    Ok(bound)
}

/// Ratliff-Rush data of `M_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RrData {
    pub bound: usize,
    /// `lengths[n] = l(m~^n M / m^n M)` for `n < bound`; zero from `bound` on.
    pub lengths: Vec<usize>,
    pub r_poly: IntPoly,
    pub h_tilde: IntPoly,
}

impl RrData {
    pub fn length(&self, n: usize) -> usize {
        self.lengths.get(n).copied().unwrap_or(0)
    }
}

pub fn ratliff_rush_data(chain: &Chain, level: usize) -> Result<RrData> {
    let bound = rr_vanishing_bound(chain, level)?;
    let model = &chain.levels[level];
    let mut rr = RatliffRush::new(model);
    let mut lengths = vec![0usize];
    for n in 1..bound {
        lengths.push(rr.length(n)?);
    }
    let rho = |n: usize| lengths.get(n).copied().unwrap_or(0) as i64;
    let r_poly = IntPoly::new((0..bound).map(|n| rho(n + 1)).collect());
    let graded = model.graded_lengths();
    if graded.len() < bound + 1 {
        return Err(Error::truncation(model.truncation(), "Ratliff-Rush graded lengths out of range"));
    }
    let tilde: Vec<usize> = graded
        .iter()
        .enumerate()
        .map(|(n, &g)| (g as i64 + rho(n) - rho(n + 1)) as usize)
        .collect();
    let h_tilde = h_direct_fit(&tilde, model.presentation().dim())?;
    Ok(RrData { bound, lengths, r_poly, h_tilde })
}

/// Ratliff-Rush lengths for `n = 1 ..= n_max`, without a vanishing bound.
pub fn ratliff_rush_lengths(model: &TruncatedModule, n_max: usize) -> Result<Vec<usize>> {
    if model.presentation().dim() == 0 {
        return Err(Error::Precondition("Ratliff-Rush lengths need a module of positive depth".into()));
    }
    let mut rr = RatliffRush::new(model);
    (1..=n_max).map(|n| rr.length(n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub seed: u64,
    /// Starting truncation; the default is derived from the presentation.
    pub truncation: Option<usize>,
    pub cap: usize,
    pub flavor: Flavor,
    pub retries: usize,
    pub ratliff_rush: bool,
    /// Recompute at `N + 2` and demand identical invariants.
    pub recheck: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            seed: 0,
            truncation: None,
            cap: DEFAULT_TRUNCATION_CAP,
            flavor: Flavor::Phi,
            retries: DEFAULT_RETRIES,
            ratliff_rush: true,
            recheck: true,
        }
    }
}

/// `(e - mu) + dim + 4`.
pub fn default_truncation(pres: &Presentation) -> usize {
    let e = pres.ord_det() as usize;
    e.saturating_sub(pres.size()) + pres.dim() + 4
}

fn next_truncation(n: usize, cap: usize) -> usize {
    (n + (n / 2).max(4)).min(cap)
}

/// Per-level data along the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub dim: usize,
    pub h: IntPoly,
    /// `h(M_c) = h(M_{c+1})`; absent at the zero-dimensional end.
    pub h_agrees: Option<bool>,
}

/// Everything computed at one truncation.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub truncation: usize,
    pub chain: Chain,
    pub levels: Vec<Level>,
    pub h_direct: IntPoly,
    pub depth: usize,
    pub reduction_number: usize,
    pub rr: Option<RrData>,
}

impl Analysis {
    pub fn h(&self) -> HData {
        HData::new(self.levels[0].h.clone(), self.levels[0].dim)
    }

    pub fn dim(&self) -> usize {
        self.levels[0].dim
    }

    pub fn trace(&self) -> Vec<bool> {
        self.levels.iter().filter_map(|l| l.h_agrees).collect()
    }

    pub fn cohen_macaulay(&self) -> bool {
        self.depth == self.dim()
    }

    /// The numbers that must not depend on the truncation or on the chosen
    /// forms.
    pub fn fingerprint(&self) -> (Vec<IntPoly>, usize, usize, Option<(IntPoly, IntPoly)>) {
        (
            self.levels.iter().map(|l| l.h.clone()).collect(),
            self.depth,
            self.reduction_number,
            self.rr.as_ref().map(|r| (r.r_poly.clone(), r.h_tilde.clone())),
        )
    }
}

/// One pass at a fixed truncation.
pub fn analyze_at(pres: &Presentation, n: usize, opts: &AnalysisOptions) -> Result<Analysis> {
    let model = TruncatedModule::build(pres, n)?;
    let dim = pres.dim();
    let mut rng = form_rng(opts.seed, n);
    let chain = superficial_sequence(model, dim, opts.flavor, &mut rng, opts.retries)?;

    let base = h_dim_zero(&chain.levels[dim])?;
    let mut levels = vec![Level { dim: 0, h: base, h_agrees: None }];
    for c in (0..dim).rev() {
        let below = &levels[0].h;
        let d = dim - c;
        let b = IntPoly::from_usize(&chain.b_series[c]);
        let h = below.sub(&IntPoly::one_minus_z_pow(d).mul(&b));
        let agrees = h == *below;
        levels.insert(0, Level { dim: d, h, h_agrees: Some(agrees) });
    }

    let h_direct = h_direct_fit(&chain.levels[0].graded_lengths(), dim)?;

    let trace: Vec<bool> = levels.iter().filter_map(|l| l.h_agrees).collect();
    let depth = trace.iter().rposition(|&t| t).map_or(0, |c| c + 1);
    if trace[..depth].iter().any(|&t| !t) {
        return Err(Error::truncation(n, "depth flags along the chain are not monotone"));
    }

    let forms: Vec<Mat> =
        chain.forms_at_level(0).iter().map(|v| chain.levels[0].form_matrix(v)).collect();
    let reduction_number = chain.levels[0].reduction_number(&forms)?;

    let rr = if opts.ratliff_rush && dim > 0 {
        let data = ratliff_rush_data(&chain, 0)?;
        if data.r_poly.is_zero() != (depth >= 1) {
            return Err(Error::truncation(n, "depth and the Ratliff-Rush criterion disagree"));
        }
        Some(data)
    } else {
        None
    };

    Ok(Analysis { truncation: n, chain, levels, h_direct, depth, reduction_number, rr })
}

/// Outcome of the escalation loop.
#[derive(Clone, Debug)]
pub struct Escalated {
    pub analysis: Analysis,
    /// Truncation used for the independent recomputation, if any.
    pub recheck: Option<usize>,
    /// Reasons for each escalation step, in order.
    pub escalations: Vec<String>,
}

/// Runs [`analyze_at`] from the default truncation upwards until it
/// succeeds, then recomputes at `N + 2` and escalates again on any mismatch.
pub fn analyze(pres: &Presentation, opts: &AnalysisOptions) -> Result<Escalated> {
    let mut n = opts.truncation.unwrap_or_else(|| default_truncation(pres)).max(3);
    let mut escalations = Vec::new();
    loop {
        let outcome = analyze_at(pres, n, opts).and_then(|a| {
            if !opts.recheck {
                return Ok((a, None));
            }
            let b = analyze_at(pres, n + 2, opts)?;
            if a.fingerprint() != b.fingerprint() {
                return Err(Error::truncation(n, format!("invariants differ at truncation {}", n + 2)));
            }
            Ok((a, Some(n + 2)))
        });
        match outcome {
            Ok((analysis, recheck)) => return Ok(Escalated { analysis, recheck, escalations }),
            Err(Error::TruncationInsufficient { reason, .. }) => {
                if n >= opts.cap {
                    return Err(Error::TruncationExhausted { cap: opts.cap, reason });
                }
                escalations.push(format!("N = {n}: {reason}"));
                n = next_truncation(n, opts.cap);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Depth of `G(M)` with the per-level trace and the Ratliff-Rush witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub depth: usize,
    pub dim: usize,
    /// `method_trace[c]` is the outcome of `h(M_c) = h(M_{c+1})`.
    pub method_trace: Vec<bool>,
    pub r_poly: Option<IntPoly>,
    pub h_tilde: Option<HData>,
    pub cohen_macaulay: bool,
    pub truncation: usize,
}

impl DepthReport {
    pub fn from_analysis(a: &Analysis) -> Self {
        DepthReport {
            depth: a.depth,
            dim: a.dim(),
            method_trace: a.trace(),
            r_poly: a.rr.as_ref().map(|r| r.r_poly.clone()),
            h_tilde: a.rr.as_ref().map(|r| HData::new(r.h_tilde.clone(), a.dim())),
            cohen_macaulay: a.cohen_macaulay(),
            truncation: a.truncation,
        }
    }
}

pub fn depth_g(pres: &Presentation, seed: u64) -> Result<DepthReport> {
    let opts = AnalysisOptions { seed, ..AnalysisOptions::default() };
    Ok(DepthReport::from_analysis(&analyze(pres, &opts)?.analysis))
}

/// `h - h~ - (1-z)^{r+1} r_M`, which must vanish.
pub fn rr_residual(a: &Analysis) -> Option<IntPoly> {
    let rr = a.rr.as_ref()?;
    let r = a.dim();
    Some(a.levels[0].h.sub(&rr.h_tilde).sub(&IntPoly::one_minus_z_pow(r + 1).mul(&rr.r_poly)))
}

/// Checks `h = h~ + (1-z)^{r+1} r_M` with `h` taken from the recursion.
pub fn rr_decomposition_check(pres: &Presentation, seed: u64) -> Result<(bool, IntPoly)> {
    if pres.dim() == 0 {
        return Err(Error::Precondition("the Ratliff-Rush decomposition needs dim M >= 1".into()));
    }
    let opts = AnalysisOptions { seed, ..AnalysisOptions::default() };
    let a = analyze(pres, &opts)?.analysis;
    let res = rr_residual(&a).expect("Ratliff-Rush data computed");
    Ok((res.is_zero(), res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn pres(vars: &[&str], rows: &[Vec<&str>]) -> Presentation {
        Presentation::from_strings(FieldSpec::default(), vars, rows, None).unwrap()
    }

    #[test]
    fn cyclic_module_is_cohen_macaulay() {
        let p = pres(&["x", "y"], &[vec!["y"]]);
        let r = depth_g(&p, 3).unwrap();
        assert_eq!(r.depth, 1);
        assert!(r.cohen_macaulay);
        assert_eq!(r.r_poly, Some(IntPoly::zero()));
    }

    #[test]
    fn zero_dimensional_module() {
        let p = pres(&["y"], &[vec!["y^2", "0"], vec!["0", "y^3"]]);
        let r = depth_g(&p, 0).unwrap();
        assert_eq!(r.depth, 0);
        assert!(r.cohen_macaulay);
        assert!(r.method_trace.is_empty());
    }

    #[test]
    fn monotone_trace() {
        let p = pres(&["x", "y", "z"], &[vec!["x", "y", "0"], vec!["x^2", "x^2", "0"], vec!["0", "0", "x^2"]]);
        let r = depth_g(&p, 11).unwrap();
        assert_eq!(r.method_trace, vec![true, false]);
        assert_eq!(r.depth, 1);
    }

    #[test]
    fn rr_lengths_vanish_at_positive_depth() {
        let p = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x^2", "y"]]);
        let m = TruncatedModule::build(&p, 9).unwrap();
        assert_eq!(ratliff_rush_lengths(&m, 3).unwrap(), vec![0, 0, 0]);
        assert_eq!(ratliff_rush_lengths(&m, 0).unwrap(), Vec::<usize>::new());
    }
}
