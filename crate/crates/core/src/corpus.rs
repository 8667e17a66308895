//! The golden corpus: worked examples with known Hilbert series and depth.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::depth::{analyze, AnalysisOptions};
use crate::error::Result;
use crate::family::transform_instance;
use crate::field::FieldSpec;
use crate::invariants::IntPoly;
use crate::presentation::Presentation;
use crate::report::InvariantReport;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub presentation: Presentation,
    /// Expected h-polynomial, when it is known.
    pub h: Option<IntPoly>,
    pub depth: usize,
}

type Row = (String, Vec<&'static str>, Vec<Vec<String>>, Option<&'static str>, Option<Vec<i64>>, usize);

fn entry(name: &str, vars: &[&'static str], rows: Vec<Vec<String>>, g: Option<&'static str>, h: Option<&[i64]>, depth: usize) -> Row {
    (name.to_string(), vars.to_vec(), rows, g, h.map(|c| c.to_vec()), depth)
}

fn rows(r: &[&[&str]]) -> Vec<Vec<String>> {
    r.iter().map(|row| row.iter().map(|s| s.to_string()).collect()).collect()
}

/// The `r x r` matrix with `y^2` in the corner, `y` on the rest of the
/// diagonal and `corner` below the corner.
pub fn two_by_r_matrix(r: usize, corner: &str) -> Vec<Vec<String>> {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| match (i, j) {
                    (0, 0) => "y^2".to_string(),
                    (1, 0) => corner.to_string(),
                    _ if i == j => "y".to_string(),
                    _ => "0".to_string(),
                })
                .collect()
        })
        .collect()
}

/// All corpus entries over the default field, in a fixed order.
pub fn corpus() -> Vec<CorpusEntry> {
    corpus_in(FieldSpec::default())
}

/// The corpus over another field; entries that degenerate there (zero
/// determinant, a hypersurface that no longer annihilates) are dropped.
pub fn corpus_in(field: FieldSpec) -> Vec<CorpusEntry> {
    let mut out: Vec<CorpusEntry> = corpus_rows()
        .into_iter()
        .filter_map(|(name, vars, rows, g, h, depth)| {
            let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
            let presentation = Presentation::from_strings(field, &vars, &rows, g).ok()?;
            Some(CorpusEntry { name, presentation, h: h.map(IntPoly::new), depth })
        })
        .collect();
    // The depth-zero example with a variable adjoined and coordinates mixed:
    // same h, depth one higher.
    if let Some(base) = out.iter().find(|e| e.name == "2gen-depth-zero") {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        if let Ok(disguised) = transform_instance(&base.presentation, 1, &mut rng) {
            out.push(CorpusEntry {
                name: "2gen-depth-zero-transformed".into(),
                presentation: disguised,
                h: Some(IntPoly::new(vec![2, 0, 1])),
                depth: 1,
            });
        }
    }
    out
}

fn corpus_rows() -> Vec<Row> {
    let xy = ["x", "y"];
    let xyz = ["x", "y", "z"];
    let mut out = Vec::new();
    // Two generators over k[[x, y]].
    out.push(entry("2gen-linear", &xy, rows(&[&["x+y", "x-y"], &["2*x+3*y", "y"]]), None, Some(&[2]), 1));
    for a1 in 1..=3usize {
        for a2 in a1..=3usize {
            // Direct sum of k[[x,y]]/(y^a): h is the sum of the two h's.
            let mut h = vec![0i64; a2];
            for (k, c) in h.iter_mut().enumerate() {
                *c = (k < a1) as i64 + (k < a2) as i64;
            }
            let m = rows(&[&[&format!("y^{a1}"), "0"], &["0", &format!("y^{a2}")]]);
            out.push(entry(&format!("2gen-diagonal-{a1}-{a2}"), &xy, m, Some("y^3"), Some(&h), 1));
        }
    }
    out.push(entry("2gen-minimal-multiplicity", &xy, rows(&[&["y^2", "0"], &["x^2", "y"]]), Some("y^3"), Some(&[2, 1]), 1));
    out.push(entry("2gen-depth-zero", &xy, rows(&[&["y^2", "0"], &["x", "y"]]), Some("y^3"), Some(&[2, 0, 1]), 0));
    // Three generators over k[[x, y, z]].
    let g3 = Some("x^2*(x-y)");
    out.push(entry("3gen-depth-0", &xyz, rows(&[&["x", "y", "z"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]]), g3, None, 0));
    out.push(entry("3gen-depth-1", &xyz, rows(&[&["x", "y", "0"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]]), g3, None, 1));
    out.push(entry("3gen-depth-2", &xyz, rows(&[&["x", "0", "0"], &["0", "x^2", "0"], &["0", "0", "x^2"]]), g3, Some(&[3, 2]), 2));
    // r generators with det of order r + 1.
    for r in 2..=4usize {
        let mut cm = vec![1i64; 2];
        cm[0] = r as i64;
        out.push(entry(&format!("rgen-{r}-cohen-macaulay"), &xy, two_by_r_matrix(r, "x^2"), None, Some(&cm), 1));
        let dz = [r as i64, 0, 1];
        out.push(entry(&format!("rgen-{r}-depth-zero"), &xy, two_by_r_matrix(r, "x"), None, Some(&dz), 0));
    }
    // Sanity rows.
    out.push(entry("cyclic", &xy, rows(&[&["y"]]), None, Some(&[1]), 1));
    out.push(entry("diagonal-three-vars", &xyz, rows(&[&["y", "0"], &["0", "y^2"]]), None, Some(&[2, 1]), 2));
    out
}

#[derive(Clone, Debug)]
pub struct CorpusOutcome {
    pub name: String,
    pub expected_h: Option<IntPoly>,
    pub expected_depth: usize,
    pub report: Option<InvariantReport>,
    pub error: Option<String>,
    pub elapsed: Duration,
}

impl CorpusOutcome {
    pub fn matches(&self) -> bool {
        let Some(r) = &self.report else { return false };
        self.expected_h.as_ref().is_none_or(|h| *h == r.h) && r.depth == self.expected_depth
    }

    /// Whether the invariants were reproduced at a second truncation.
    pub fn rechecked(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.recheck_truncation == Some(r.truncation + 2))
    }
}

pub fn run_entry(e: &CorpusEntry, opts: &AnalysisOptions) -> CorpusOutcome {
    let t = Instant::now();
    let result: Result<_> = analyze(&e.presentation, opts);
    let (report, error) = match result {
        Ok(run) => (Some(InvariantReport::from_escalated(&e.presentation, opts.seed, &run)), None),
        Err(err) => (None, Some(err.to_string())),
    };
    CorpusOutcome {
        name: e.name.clone(),
        expected_h: e.h.clone(),
        expected_depth: e.depth,
        report,
        error,
        elapsed: t.elapsed(),
    }
}
