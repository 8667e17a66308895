use assocgr::depth::{analyze, AnalysisOptions};
use assocgr::family::{generate_family, transform_instance, FamilySpec};
use assocgr::invariants::{HData, IntPoly};
use assocgr::report::report;
use assocgr::{FieldSpec, InstanceFile, Presentation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_instance(size: usize, nvars: usize, seed: u64) -> Presentation {
    let spec = FamilySpec::Random { size, nvars, max_degree: 3 };
    generate_family(&spec, 1, seed, FieldSpec::default()).unwrap().0.remove(0)
}

fn opts(seed: u64) -> AnalysisOptions {
    AnalysisOptions { seed, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn instance_files_round_trip(size in 1usize..=3, nvars in 1usize..=3, seed in any::<u64>()) {
        let p = random_instance(size, nvars, seed);
        let text = InstanceFile::from_presentation(&p).to_text();
        let back = InstanceFile::parse(&text).unwrap().presentation().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn multiplicity_is_order_of_determinant(size in 1usize..=3, nvars in 1usize..=3, seed in any::<u64>()) {
        let p = random_instance(size, nvars, seed);
        let run = analyze(&p, &opts(seed)).unwrap();
        let h = run.analysis.h();
        prop_assert_eq!(h.multiplicity(), p.ord_det() as i64);
        prop_assert!(h.multiplicity() >= (p.size() as i64) * (p.i_m() as i64));
        prop_assert_eq!(h.h.coeff(0), p.size() as i64);
        prop_assert!(run.analysis.depth <= p.dim());
    }

    #[test]
    fn invariants_survive_transforms(seed in any::<u64>(), extra in 0usize..=1, which in 0usize..3) {
        let rows: [&[Vec<&str>]; 3] = [
            &[vec!["y^2", "0"], vec!["x", "y"]],
            &[vec!["y^2", "0"], vec!["x^2", "y"]],
            &[vec!["x+y", "y^2"], vec!["x^2", "x-y"]],
        ];
        let p = Presentation::from_strings(FieldSpec::default(), &["x", "y"], rows[which], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = transform_instance(&p, extra, &mut rng).unwrap();
        let a = analyze(&p, &opts(1)).unwrap().analysis;
        let b = analyze(&q, &opts(seed)).unwrap().analysis;
        prop_assert_eq!(a.h().h, b.h().h);
        prop_assert_eq!(a.depth + extra, b.depth);
        prop_assert_eq!(q.ord_det(), p.ord_det());
        prop_assert_eq!(q.i_m(), p.i_m());
    }

    #[test]
    fn samuel_function_sums_graded_lengths(coeffs in prop::collection::vec(-3i64..=5, 1..5), r in 0usize..4) {
        let hd = HData::new(IntPoly::new(coeffs), r);
        let mut total = 0;
        for n in 0..8 {
            total += hd.graded_length(n);
            prop_assert_eq!(hd.samuel(n), total);
        }
    }

    #[test]
    fn int_poly_ring_laws(a in prop::collection::vec(-9i64..=9, 0..6), b in prop::collection::vec(-9i64..=9, 0..6)) {
        let (a, b) = (IntPoly::new(a), IntPoly::new(b));
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).eval_one(), a.eval_one() * b.eval_one());
    }
}

#[test]
fn reports_are_deterministic() {
    let p = random_instance(2, 3, 11);
    let a = report(&p, &opts(4)).unwrap().to_json();
    let b = report(&p, &opts(4)).unwrap().to_json();
    assert_eq!(a, b);
}
