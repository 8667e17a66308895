//! Deterministic instance families for fuzzing.
//!
//! Ground truth has to stay known, so the families are either random
//! matrices (checked only against unconditional identities), triangular
//! matrices with a prescribed diagonal order profile (so `ord det` and
//! `i(M)` are known by construction), or transforms of a seed presentation
//! that preserve the isomorphism class of the module.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::instance::InstanceFile;
use crate::linalg::Mat;
use crate::poly::{default_var_names, Monomial, Poly};
use crate::presentation::Presentation;

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// Random `t x t` matrices over `nvars` variables; entries have order 1
    /// or 2 and degree at most `max_degree`.
    Random { size: usize, nvars: usize, max_degree: u32 },
    /// Lower triangular matrices with `ord` of the diagonal given by
    /// `profile`; off-diagonal entries have order at least the profile
    /// minimum, so `i(M) = min(profile)` and `ord det = sum(profile)`.
    Profile { nvars: usize, profile: Vec<u32> },
    /// Unimodular row/column operations and linear coordinate changes of a
    /// seed presentation, optionally after adjoining variables.
    Transforms {
        seed: Option<Box<Presentation>>,
        extra_vars: usize,
    },
}

/// Splitmix-style derivation of independent seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut x = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn small(rng: &mut ChaCha8Rng, f: FieldSpec) -> u32 {
    // Small signed coefficients keep printed instances readable.
    let v = rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    f.from_i64(v)
}

fn random_linear(rng: &mut ChaCha8Rng, f: FieldSpec, nvars: usize) -> Poly {
    loop {
        let c: Vec<u32> = (0..nvars).map(|_| if rng.gen_bool(0.6) { small(rng, f) } else { 0 }).collect();
        if c.iter().any(|&x| x != 0) {
            return Poly::linear_form(f, &c);
        }
    }
}

/// Random polynomial with order exactly `ord` (if nonzero) and at most
/// `terms` monomials of degree in `ord ..= max_deg`.
fn random_poly(rng: &mut ChaCha8Rng, f: FieldSpec, nvars: usize, ord: u32, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(f, nvars);
    let lead = Monomial::all_of_degree(nvars, ord);
    p.add_term(lead.choose(rng).unwrap().clone(), small(rng, f));
    for _ in 1..terms {
        let d = rng.gen_range(ord..=max_deg.max(ord));
        let mons = Monomial::all_of_degree(nvars, d);
        p.add_term(mons.choose(rng).unwrap().clone(), small(rng, f));
    }
    if p.ord().finite() != Some(ord) {
        p.add_term(lead[0].clone(), 1);
    }
    p
}

fn random_matrix(rng: &mut ChaCha8Rng, f: FieldSpec, size: usize, nvars: usize, max_degree: u32) -> Vec<Vec<Poly>> {
    (0..size)
        .map(|_| {
            (0..size)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        Poly::zero(f, nvars)
                    } else {
                        let ord = if max_degree >= 2 && rng.gen_bool(0.35) { 2 } else { 1 };
                        let terms = rng.gen_range(1..=3);
                        random_poly(rng, f, nvars, ord, max_degree, terms)
                    }
                })
                .collect()
        })
        .collect()
}

fn profile_matrix(rng: &mut ChaCha8Rng, f: FieldSpec, nvars: usize, profile: &[u32]) -> Vec<Vec<Poly>> {
    let t = profile.len();
    let i = *profile.iter().min().expect("nonempty profile");
    (0..t)
        .map(|r| {
            (0..t)
                .map(|c| {
                    if r == c {
                        random_linear(rng, f, nvars).pow(profile[r])
                    } else if c < r && rng.gen_bool(0.5) {
                        let ord = if rng.gen_bool(0.5) { i } else { i + 1 };
                        random_poly(rng, f, nvars, ord, ord + 1, 2)
                    } else {
                        Poly::zero(f, nvars)
                    }
                })
                .collect()
        })
        .collect()
}

/// Random square matrix over the power series ring whose constant part is
/// invertible: a unimodular transformation.
fn unimodular(rng: &mut ChaCha8Rng, f: FieldSpec, t: usize, nvars: usize) -> Vec<Vec<Poly>> {
    let constant = loop {
        let rows: Vec<Vec<u32>> =
            (0..t).map(|_| (0..t).map(|_| if rng.gen_bool(0.5) { small(rng, f) } else { 0 }).collect()).collect();
        let m = Mat::from_rows_width(f, t, &rows);
        if m.inverse().is_some() {
            break rows;
        }
    };
    (0..t)
        .map(|r| {
            (0..t)
                .map(|c| {
                    let mut p = Poly::constant(f, nvars, constant[r][c]);
                    if rng.gen_bool(0.3) {
                        p = p.add(&random_linear(rng, f, nvars));
                    }
                    p
                })
                .collect()
        })
        .collect()
}

fn coordinate_change(rng: &mut ChaCha8Rng, f: FieldSpec, n: usize) -> Vec<Vec<u32>> {
    loop {
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|r| (0..n).map(|c| if r == c || rng.gen_bool(0.4) { small(rng, f) } else { 0 }).collect())
            .collect();
        if Mat::from_rows_width(f, n, &rows).inverse().is_some() {
            return rows;
        }
    }
}

/// One transform of `seed`: optional extra variables, a coordinate change
/// and unimodular row and column operations.
pub fn transform_instance(seed: &Presentation, extra_vars: usize, rng: &mut ChaCha8Rng) -> Result<Presentation> {
    let f = seed.field();
    let base = if extra_vars > 0 {
        let taken: Vec<String> = seed.vars().to_vec();
        let mut names = Vec::new();
        let mut k = 0;
        while names.len() < extra_vars {
            k += 1;
            let candidate = ["z", "w", "u", "v"].get(k - 1).map_or(format!("t{k}"), |s| s.to_string());
            if !taken.contains(&candidate) {
                names.push(candidate);
            }
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        seed.extend_vars(&refs)?
    } else {
        seed.clone()
    };
    let n = base.nvars();
    let t = base.size();
    let changed = base.change_coordinates(&coordinate_change(rng, f, n))?;
    let u = unimodular(rng, f, t, n);
    let v = unimodular(rng, f, t, n);
    changed.transform(&u, &v)
}

/// Generates `count` valid presentations; candidates with zero determinant
/// are discarded and logged.
pub fn generate_family(
    spec: &FamilySpec,
    count: usize,
    seed: u64,
    field: FieldSpec,
) -> Result<(Vec<Presentation>, Vec<String>)> {
    let mut out = Vec::with_capacity(count);
    let mut log = Vec::new();
    let mut attempt: u64 = 0;
    while out.len() < count {
        if attempt as usize > 20 * count + 100 {
            return Err(Error::Precondition(format!(
                "family produced only {} valid instances out of {attempt} candidates",
                out.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt));
        attempt += 1;
        let candidate = match spec {
            FamilySpec::Random { size, nvars, max_degree } => {
                let phi = random_matrix(&mut rng, field, *size, *nvars, *max_degree);
                Presentation::new(field, default_var_names(*nvars), phi, None)
            }
            FamilySpec::Profile { nvars, profile } => {
                let phi = profile_matrix(&mut rng, field, *nvars, profile);
                Presentation::new(field, default_var_names(*nvars), phi, None)
            }
            FamilySpec::Transforms { seed: Some(s), extra_vars } => transform_instance(s, *extra_vars, &mut rng),
            FamilySpec::Transforms { seed: None, .. } => {
                return Err(Error::Precondition("a transform family needs a seed presentation".into()))
            }
        };
        match candidate {
            Ok(p) => out.push(p),
            Err(e) => log.push(format!("candidate {}: discarded ({e})", attempt - 1)),
        }
    }
    Ok((out, log))
}

/// Parses a family spec file:
///
/// ```text
/// kind: profile        # random | profile | transforms
/// variables: 3         # number of variables (random, profile)
/// size: 2              # matrix size (random)
/// degree: 3            # maximal entry degree (random)
/// profile: 1, 1, 2     # diagonal orders (profile)
/// instance: seed.txt   # seed instance file (transforms), relative to this file
/// extra-variables: 1   # variables adjoined before transforming
/// ```
pub fn parse_family_spec(text: &str, base: &Path) -> Result<FamilySpec> {
    let err = |line: usize, column: usize, message: String| Error::Instance { line, column, message };
    let mut fields: Vec<(String, String, usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(colon) = line.find(':') else {
            return Err(err(idx + 1, 1, "expected 'key: value'".into()));
        };
        let key = line[..colon].trim().to_string();
        let vcol = colon + 2 + line[colon + 1..].chars().take_while(|c| c.is_whitespace()).count();
        if fields.iter().any(|f| f.0 == key) {
            return Err(err(idx + 1, 1, format!("duplicate key '{key}'")));
        }
        fields.push((key, line[colon + 1..].trim().to_string(), idx + 1, vcol));
    }
    let last = text.lines().count().max(1);
    let get = |k: &str| fields.iter().find(|f| f.0 == k);
    let number = |k: &str, default: Option<usize>| -> Result<usize> {
        match get(k) {
            Some((_, v, l, c)) => v.parse().map_err(|_| err(*l, *c, format!("'{k}' must be a nonnegative integer"))),
            None => default.ok_or_else(|| err(last, 1, format!("missing '{k}'"))),
        }
    };
    let (kind, kl, kc) = match get("kind") {
        Some((_, v, l, c)) => (v.as_str(), *l, *c),
        None => return Err(err(last, 1, "missing 'kind'".into())),
    };
    let allowed: &[&str] = match kind {
        "random" => &["kind", "variables", "size", "degree"],
        "profile" => &["kind", "variables", "profile"],
        "transforms" => &["kind", "instance", "extra-variables"],
        _ => return Err(err(kl, kc, format!("unknown family kind '{kind}'"))),
    };
    if let Some((k, _, l, _)) = fields.iter().find(|f| !allowed.contains(&f.0.as_str())) {
        return Err(err(*l, 1, format!("key '{k}' does not apply to a {kind} family")));
    }
    let spec = match kind {
        "random" => FamilySpec::Random {
            size: number("size", None)?,
            nvars: number("variables", None)?,
            max_degree: number("degree", Some(2))? as u32,
        },
        "profile" => {
            let Some((_, v, l, c)) = get("profile") else {
                return Err(err(last, 1, "missing 'profile'".into()));
            };
            let profile: std::result::Result<Vec<u32>, _> = v.split(',').map(|s| s.trim().parse::<u32>()).collect();
            match profile {
                Ok(p) if !p.is_empty() && p.iter().all(|&a| a >= 1) => {
                    FamilySpec::Profile { nvars: number("variables", None)?, profile: p }
                }
                _ => return Err(err(*l, *c, "profile must be a list of positive integers".into())),
            }
        }
        _ => {
            let Some((_, v, l, c)) = get("instance") else {
                return Err(err(last, 1, "missing 'instance'".into()));
            };
            let path = base.join(v);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| err(*l, *c, format!("cannot read {}: {e}", path.display())))?;
            let seed = InstanceFile::parse(&text)?.presentation()?;
            FamilySpec::Transforms { seed: Some(Box::new(seed)), extra_vars: number("extra-variables", Some(0))? }
        }
    };
    let positive = |k: &str, v: usize| {
        if v == 0 {
            let (l, c) = get(k).map_or((last, 1), |f| (f.2, f.3));
            Err(err(l, c, format!("'{k}' must be positive")))
        } else {
            Ok(())
        }
    };
    match &spec {
        FamilySpec::Random { size, nvars, .. } => {
            positive("size", *size)?;
            positive("variables", *nvars)?;
        }
        FamilySpec::Profile { nvars, .. } => positive("variables", *nvars)?,
        FamilySpec::Transforms { .. } => {}
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic() {
        let spec = FamilySpec::Random { size: 2, nvars: 2, max_degree: 2 };
        let (a, _) = generate_family(&spec, 5, 7, FieldSpec::default()).unwrap();
        let (b, _) = generate_family(&spec, 5, 7, FieldSpec::default()).unwrap();
        assert_eq!(a, b);
        let (c, _) = generate_family(&spec, 5, 8, FieldSpec::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn profile_fixes_order_data() {
        let spec = FamilySpec::Profile { nvars: 3, profile: vec![1, 1, 2] };
        let (fam, _) = generate_family(&spec, 6, 1, FieldSpec::default()).unwrap();
        for p in fam {
            assert_eq!(p.ord_det(), 4);
            assert_eq!(p.i_m(), 1);
            assert_eq!(p.size(), 3);
        }
    }

    #[test]
    fn transforms_preserve_order_data() {
        let seed =
            Presentation::from_strings(FieldSpec::default(), &["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], Some("y^3"))
                .unwrap();
        let spec = FamilySpec::Transforms { seed: Some(Box::new(seed)), extra_vars: 1 };
        let (fam, _) = generate_family(&spec, 4, 3, FieldSpec::default()).unwrap();
        for p in fam {
            assert_eq!(p.nvars(), 3);
            assert_eq!(p.ord_det(), 3);
            assert_eq!(p.i_m(), 1);
            assert!(p.hypersurface().is_some());
        }
    }

    #[test]
    fn spec_files() {
        let dir = std::env::temp_dir();
        let spec = parse_family_spec("kind: profile\nvariables: 2\nprofile: 1, 2\n", &dir).unwrap();
        assert_eq!(spec, FamilySpec::Profile { nvars: 2, profile: vec![1, 2] });
        let spec = parse_family_spec("kind: random # comment\nsize: 2\nvariables: 3\n", &dir).unwrap();
        assert_eq!(spec, FamilySpec::Random { size: 2, nvars: 3, max_degree: 2 });
        let e = parse_family_spec("kind: random\nsize: two\nvariables: 3\n", &dir).unwrap_err();
        assert!(matches!(e, Error::Instance { line: 2, column: 7, .. }), "{e:?}");
        let e = parse_family_spec("kind: profile\nvariables: 2\nsize: 2\n", &dir).unwrap_err();
        assert!(matches!(e, Error::Instance { line: 3, .. }));
        assert!(parse_family_spec("kind: other\n", &dir).is_err());
    }
}
