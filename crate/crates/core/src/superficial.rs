//! Randomized search for superficial linear forms, with verification.
//!
//! Superficiality cannot be certified from finitely many lengths. A candidate
//! is accepted when it passes every consequence that downstream computations
//! rely on, checked at the working truncation:
//!
//! * the quotient presentation is valid (nonzero determinant, hypersurface
//!   not killed);
//! * multiplicity is preserved: `ord det` of the quotient equals `ord det`;
//! * the colon lengths `b_n` vanish at the top of the truncation window;
//! * Singh's equality `l(m^n M/m^{n+1} M) = l(N/m^{n+1} N) - b_n` holds for
//!   every level, with both sides taken from independent models;
//! * the kernel of multiplication on `M/m^n M` has length
//!   `b_{n-1} + l(m^{n-1} M/m^n M)`;
//! * for the `Phi` flavor, orders of all entries, of the determinant and of
//!   the hypersurface equation are preserved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TruncatedModule;
use crate::presentation::{lift_form, Presentation};

pub const DEFAULT_RETRIES: usize = 25;

/// How many candidates with a nonvanishing colon tail are tolerated before
/// the truncation itself is blamed.
const TAIL_STRIKES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Module,
    Phi,
}

/// A linear form that passed verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedForm {
    /// Coefficients in the variables of the module it cuts.
    pub coefficients: Vec<u32>,
    pub variables: Vec<String>,
    /// The same form in the coordinates of the original presentation.
    pub lifted: Vec<u32>,
    pub flavor: Flavor,
    pub attempt: usize,
    pub truncation: usize,
    pub checks: Vec<String>,
}

impl VerifiedForm {
    pub fn display(&self) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .zip(&self.variables)
            .filter(|(c, _)| **c != 0)
            .map(|(c, v)| format!("{c}*{v}"))
            .collect();
        terms.join(" + ")
    }
}

/// Why a candidate was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    Quotient(String),
    MultiplicityChanged { before: u32, after: u32 },
    EntryOrderChanged,
    HypersurfaceOrderChanged,
    ColonTail(Vec<usize>),
    Singh(usize),
    Regularity(usize),
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::Quotient(e) => write!(f, "invalid quotient ({e})"),
            Rejection::MultiplicityChanged { before, after } => {
                write!(f, "ord det changed from {before} to {after}")
            }
            Rejection::EntryOrderChanged => write!(f, "entry orders not preserved"),
            Rejection::HypersurfaceOrderChanged => write!(f, "hypersurface order not preserved"),
            Rejection::ColonTail(b) => write!(f, "colon lengths do not vanish at the top: {b:?}"),
            Rejection::Singh(n) => write!(f, "Singh's equality fails at level {n}"),
            Rejection::Regularity(n) => write!(f, "kernel length mismatch at level {n}"),
        }
    }
}

/// One verified cut `M -> M / x M`.
#[derive(Clone, Debug)]
pub struct Cut {
    pub form: VerifiedForm,
    pub b_series: Vec<usize>,
    pub eliminated: usize,
    pub quotient: TruncatedModule,
}

/// Runs every check on a candidate form.
pub fn verify_form(
    model: &TruncatedModule,
    coeffs: &[u32],
    flavor: Flavor,
) -> std::result::Result<(Vec<usize>, usize, TruncatedModule, Vec<String>), Rejection> {
    let pres = model.presentation();
    let n = model.truncation();
    let q = pres.quotient_by_form(coeffs).map_err(|e| Rejection::Quotient(e.to_string()))?;
    let qp = &q.pres;
    let mut checks = vec!["quotient".to_string()];

    if qp.ord_det() != pres.ord_det() {
        return Err(Rejection::MultiplicityChanged { before: pres.ord_det(), after: qp.ord_det() });
    }
    checks.push("multiplicity".into());

    if flavor == Flavor::Phi {
        if qp.entry_orders() != pres.entry_orders() {
            return Err(Rejection::EntryOrderChanged);
        }
        if let (Some(g), Some(gq)) = (pres.hypersurface(), qp.hypersurface()) {
            if g.ord() != gq.ord() {
                return Err(Rejection::HypersurfaceOrderChanged);
            }
        }
        checks.push("orders".into());
    }

    let l = model.form_matrix(coeffs);
    let b = model.b_series_of(&l);
    if n >= 3 && (b[n - 1] != 0 || b[n - 2] != 0) {
        return Err(Rejection::ColonTail(b));
    }
    checks.push("colon-tail".into());

    let qm = TruncatedModule::build(qp, n).map_err(|e| Rejection::Quotient(e.to_string()))?;
    for (lvl, &bn) in b.iter().enumerate() {
        let lhs = model.graded_length(lvl).expect("level below truncation") as i64;
        let rhs = qm.hilbert_function(lvl).expect("level below truncation") as i64 - bn as i64;
        if lhs != rhs {
            return Err(Rejection::Singh(lvl));
        }
    }
    checks.push("singh".into());

    for lvl in 1..=n {
        let ker = model.kernel_on_quotient(&l, lvl);
        let expected = b[lvl - 1] + model.graded_length(lvl - 1).expect("level below truncation");
        if ker != expected {
            return Err(Rejection::Regularity(lvl));
        }
    }
    checks.push("regularity".into());

    Ok((b, q.eliminated, qm, checks))
}

/// Deterministic generator for the forms tried at a given seed and truncation.
pub fn form_rng(seed: u64, truncation: usize) -> ChaCha8Rng {
    let mut x = seed ^ (truncation as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

/// Draws random forms with all coefficients nonzero until one verifies.
pub fn find_superficial(
    model: &TruncatedModule,
    rng: &mut ChaCha8Rng,
    flavor: Flavor,
    retries: usize,
) -> Result<Cut> {
    let pres = model.presentation();
    if pres.dim() == 0 {
        return Err(Error::Precondition("a zero-dimensional module has no superficial element".into()));
    }
    let p = pres.field().characteristic();
    let mut diagnostics = Vec::new();
    let mut tail_strikes = 0;
    for attempt in 1..=retries {
        let coeffs: Vec<u32> = (0..pres.nvars()).map(|_| rng.gen_range(1..p)).collect();
        match verify_form(model, &coeffs, flavor) {
            Ok((b_series, eliminated, quotient, checks)) => {
                let form = VerifiedForm {
                    lifted: coeffs.clone(),
                    coefficients: coeffs,
                    variables: pres.vars().to_vec(),
                    flavor,
                    attempt,
                    truncation: model.truncation(),
                    checks,
                };
                return Ok(Cut { form, b_series, eliminated, quotient });
            }
            Err(Rejection::ColonTail(b)) => {
                tail_strikes += 1;
                diagnostics.push(format!("attempt {attempt}: {}", Rejection::ColonTail(b)));
                if tail_strikes >= TAIL_STRIKES {
                    return Err(Error::truncation(model.truncation(), "colon lengths b_n do not vanish"));
                }
            }
            Err(r) => diagnostics.push(format!("attempt {attempt}: {r}")),
        }
    }
    Err(Error::SuperficialExhausted { attempts: retries, diagnostics: diagnostics.join("; ") })
}

/// Find a superficial element of `pres` at truncation `n`.
pub fn find_superficial_for(
    pres: &Presentation,
    n: usize,
    seed: u64,
    flavor: Flavor,
) -> Result<VerifiedForm> {
    let model = TruncatedModule::build(pres, n)?;
    let mut rng = form_rng(seed, n);
    Ok(find_superficial(&model, &mut rng, flavor, DEFAULT_RETRIES)?.form)
}

/// A superficial sequence with the models of every successive quotient.
#[derive(Clone, Debug)]
pub struct Chain {
    /// `levels[c]` models `M / (x_1..x_c) M`.
    pub levels: Vec<TruncatedModule>,
    pub forms: Vec<VerifiedForm>,
    pub b_series: Vec<Vec<usize>>,
    /// Variable index eliminated at each cut, in the parent's coordinates.
    pub eliminated: Vec<usize>,
}

impl Chain {
    pub fn truncation(&self) -> usize {
        self.levels[0].truncation()
    }

    /// Forms `x_{c+1} .. x_r` written in the coordinates of level `c`.
    pub fn forms_at_level(&self, c: usize) -> Vec<Vec<u32>> {
        (c..self.forms.len())
            .map(|k| {
                let mut v = self.forms[k].coefficients.clone();
                for m in (c..k).rev() {
                    v = lift_form(&v, self.eliminated[m]);
                }
                v
            })
            .collect()
    }
}

/// Chooses and verifies `length` forms one at a time against successive
/// quotients.
pub fn superficial_sequence(
    model: TruncatedModule,
    length: usize,
    flavor: Flavor,
    rng: &mut ChaCha8Rng,
    retries: usize,
) -> Result<Chain> {
    if length > model.presentation().dim() {
        return Err(Error::Precondition(format!(
            "a superficial sequence of length {length} exceeds the dimension {}",
            model.presentation().dim()
        )));
    }
    let mut chain = Chain { levels: vec![model], forms: Vec::new(), b_series: Vec::new(), eliminated: Vec::new() };
    for _ in 0..length {
        let cut = find_superficial(chain.levels.last().unwrap(), rng, flavor, retries)?;
        chain.eliminated.push(cut.eliminated);
        chain.b_series.push(cut.b_series);
        chain.forms.push(cut.form);
        chain.levels.push(cut.quotient);
    }
    for k in 0..chain.forms.len() {
        let mut v = chain.forms[k].coefficients.clone();
        for m in (0..k).rev() {
            v = lift_form(&v, chain.eliminated[m]);
        }
        chain.forms[k].lifted = v;
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn pres(vars: &[&str], rows: &[Vec<&str>]) -> Presentation {
        Presentation::from_strings(FieldSpec::default(), vars, rows, None).unwrap()
    }

    #[test]
    fn x_is_superficial_on_cyclic() {
        let p = pres(&["x", "y"], &[vec!["y", "0"], vec!["0", "y"]]);
        let m = TruncatedModule::build(&p, 8).unwrap();
        assert!(verify_form(&m, &[1, 0], Flavor::Phi).is_ok());
        assert!(matches!(verify_form(&m, &[0, 1], Flavor::Module), Err(Rejection::Quotient(_))));
    }

    #[test]
    fn phi_flavor_rejects_order_drop() {
        let p = pres(&["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]]);
        let m = TruncatedModule::build(&p, 10).unwrap();
        assert_eq!(verify_form(&m, &[1, 0], Flavor::Phi).unwrap_err(), Rejection::EntryOrderChanged);
        assert!(verify_form(&m, &[3, 7], Flavor::Module).is_ok());
        assert!(verify_form(&m, &[3, 7], Flavor::Phi).is_ok());
    }

    #[test]
    fn sequence_is_replayable() {
        let p = pres(&["x", "y", "z"], &[vec!["x", "0"], vec!["y", "z^2"]]);
        let run = || {
            let m = TruncatedModule::build(&p, 7).unwrap();
            let mut rng = form_rng(42, 7);
            superficial_sequence(m, 2, Flavor::Phi, &mut rng, DEFAULT_RETRIES).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.forms, b.forms);
        assert_eq!(a.levels.len(), 3);
        assert_eq!(a.levels[2].nvars(), 1);
    }

    #[test]
    fn empty_sequence() {
        let p = pres(&["x", "y"], &[vec!["y"]]);
        let m = TruncatedModule::build(&p, 5).unwrap();
        let chain = superficial_sequence(m, 0, Flavor::Phi, &mut form_rng(1, 5), 5).unwrap();
        assert!(chain.forms.is_empty());
        assert_eq!(chain.levels.len(), 1);
    }
}
