//! The invariant report: every number computed for one instance, in a form
//! that can be serialized, parsed back and re-checked.

use serde::{Deserialize, Serialize};

use crate::depth::{analyze, AnalysisOptions, Escalated};
use crate::error::Result;
use crate::instance::InstanceFile;
use crate::invariants::{HData, IntPoly, Predicates};
use crate::presentation::Presentation;
use crate::superficial::VerifiedForm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub characteristic: u32,
    pub variables: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub hypersurface: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub instance: InstanceSummary,
    pub seed: u64,
    pub truncation: usize,
    pub recheck_truncation: Option<usize>,
    pub escalations: Vec<String>,
    pub mu: usize,
    pub i_m: u32,
    pub ord_det: u32,
    pub dim: usize,
    pub multiplicity: i64,
    pub h: IntPoly,
    pub hilbert_coefficients: Vec<i64>,
    pub samuel_polynomial: String,
    /// `H(M, n) = l(M / m^{n+1} M)` for the levels the model covers.
    pub hilbert_function: Vec<usize>,
    pub reduction_number: usize,
    pub depth: usize,
    pub cohen_macaulay: bool,
    pub method_trace: Vec<bool>,
    /// h-polynomials of `M_0, ..., M_dim` along the chain.
    pub chain_h: Vec<IntPoly>,
    pub r_poly: Option<IntPoly>,
    pub h_tilde: Option<IntPoly>,
    pub ratliff_rush_lengths: Vec<usize>,
    pub predicates: Predicates,
    pub forms: Vec<VerifiedForm>,
}

impl InvariantReport {
    pub fn from_escalated(pres: &Presentation, seed: u64, run: &Escalated) -> Self {
        let a = &run.analysis;
        let hd = a.h();
        let model = &a.chain.levels[0];
        let hilbert_function = (0..model.truncation()).map(|n| model.std_start(n + 1)).collect();
        let file = InstanceFile::from_presentation(pres);
        InvariantReport {
            instance: InstanceSummary {
                characteristic: file.characteristic,
                variables: file.variables,
                matrix: file.matrix,
                hypersurface: file.hypersurface,
            },
            seed,
            truncation: a.truncation,
            recheck_truncation: run.recheck,
            escalations: run.escalations.clone(),
            mu: pres.size(),
            i_m: pres.i_m(),
            ord_det: pres.ord_det(),
            dim: pres.dim(),
            multiplicity: hd.multiplicity(),
            h: hd.h.clone(),
            hilbert_coefficients: hd.hilbert_coefficients(),
            samuel_polynomial: hd.samuel_polynomial_string(),
            hilbert_function,
            reduction_number: a.reduction_number,
            depth: a.depth,
            cohen_macaulay: a.cohen_macaulay(),
            method_trace: a.trace(),
            chain_h: a.levels.iter().map(|l| l.h.clone()).collect(),
            r_poly: a.rr.as_ref().map(|r| r.r_poly.clone()),
            h_tilde: a.rr.as_ref().map(|r| r.h_tilde.clone()),
            ratliff_rush_lengths: a.rr.as_ref().map(|r| r.lengths.clone()).unwrap_or_default(),
            predicates: hd.predicates(),
            forms: a.chain.forms.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Re-derives every dependent field from the primary ones and reports
    /// the first inconsistency.
    pub fn recheck(&self) -> std::result::Result<(), String> {
        let hd = HData::new(self.h.clone(), self.dim);
        let expect = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
        expect(hd.multiplicity() == self.multiplicity, "multiplicity differs from h(1)")?;
        expect(self.multiplicity == self.ord_det as i64, "multiplicity differs from ord det")?;
        expect(hd.hilbert_coefficients() == self.hilbert_coefficients, "Hilbert coefficients")?;
        expect(hd.samuel_polynomial_string() == self.samuel_polynomial, "Samuel polynomial")?;
        for (n, &v) in self.hilbert_function.iter().enumerate() {
            expect(hd.samuel(n) == v as i64, &format!("Hilbert function at {n}"))?;
        }
        expect(hd.predicates() == self.predicates, "predicate flags")?;
        expect(self.depth <= self.dim, "depth exceeds dimension")?;
        expect(self.cohen_macaulay == (self.depth == self.dim), "Cohen-Macaulay flag")?;
        expect(self.method_trace.len() == self.dim, "trace length")?;
        let depth_from_trace = self.method_trace.iter().rposition(|&t| t).map_or(0, |c| c + 1);
        expect(depth_from_trace == self.depth, "depth does not match the trace")?;
        expect(self.chain_h.len() == self.dim + 1, "chain length")?;
        expect(self.chain_h[0] == self.h, "h differs from the top of the chain")?;
        for (c, &t) in self.method_trace.iter().enumerate() {
            expect((self.chain_h[c] == self.chain_h[c + 1]) == t, &format!("trace entry {c}"))?;
        }
        expect(self.forms.len() == self.dim, "number of superficial forms")?;
        expect(
            self.multiplicity >= self.mu as i64 * self.i_m as i64,
            "multiplicity below mu * i",
        )?;
        if let (Some(r), Some(ht)) = (&self.r_poly, &self.h_tilde) {
            expect(r.is_zero() == (self.depth >= 1), "r_M vanishing disagrees with depth")?;
            let rebuilt = ht.add(&IntPoly::one_minus_z_pow(self.dim + 1).mul(r));
            expect(rebuilt == self.h, "h differs from h~ + (1-z)^(r+1) r_M")?;
            let from_lengths = IntPoly::new(
                (0..self.ratliff_rush_lengths.len().max(1))
                    .map(|n| self.ratliff_rush_lengths.get(n + 1).copied().unwrap_or(0) as i64)
                    .collect(),
            );
            expect(from_lengths == *r, "r_M differs from the Ratliff-Rush lengths")?;
        }
        Ok(())
    }
}

/// Analyzes a presentation and builds its report.
pub fn report(pres: &Presentation, opts: &AnalysisOptions) -> Result<InvariantReport> {
    let run = analyze(pres, opts)?;
    Ok(InvariantReport::from_escalated(pres, opts.seed, &run))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn report_round_trips_and_rechecks() {
        let p = Presentation::from_strings(FieldSpec::default(), &["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], None)
            .unwrap();
        let r = report(&p, &AnalysisOptions { seed: 9, ..Default::default() }).unwrap();
        r.recheck().unwrap();
        let back = InvariantReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let mut broken = r.clone();
        broken.depth = 1;
        assert!(broken.recheck().is_err());
    }
}
