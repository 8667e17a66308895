use std::hint::black_box;

use assocgr::depth::{analyze, ratliff_rush_lengths, AnalysisOptions};
use assocgr::linalg::Mat;
use assocgr::{FieldSpec, Presentation, TruncatedModule};
use criterion::{criterion_group, criterion_main, Criterion};

fn three_generators() -> Presentation {
    Presentation::from_strings(
        FieldSpec::default(),
        &["x", "y", "z"],
        &[vec!["x", "y", "z"], vec!["x^2", "x^2", "0"], vec!["0", "0", "x^2"]],
        None,
    )
    .unwrap()
}

fn depth_zero() -> Presentation {
    Presentation::from_strings(FieldSpec::default(), &["x", "y"], &[vec!["y^2", "0"], vec!["x", "y"]], None).unwrap()
}

fn echelon(c: &mut Criterion) {
    let f = FieldSpec::default();
    let n = 120;
    let mut state = 1u64;
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) % 32003) as u32
                })
                .collect()
        })
        .collect();
    let m = Mat::from_rows(f, &rows);
    c.bench_function("kernel 120x120", |b| b.iter(|| black_box(&m).kernel()));
}

fn model(c: &mut Criterion) {
    let p = three_generators();
    c.bench_function("build model N=10, 3 vars", |b| b.iter(|| TruncatedModule::build(black_box(&p), 10).unwrap()));
}

fn analysis(c: &mut Criterion) {
    let p = three_generators();
    let opts = AnalysisOptions { seed: 1, ..Default::default() };
    c.bench_function("analyze three generators", |b| b.iter(|| analyze(black_box(&p), &opts).unwrap()));
    let q = depth_zero();
    let m = TruncatedModule::build(&q, 14).unwrap();
    c.bench_function("Ratliff-Rush lengths n <= 4", |b| b.iter(|| ratliff_rush_lengths(black_box(&m), 4).unwrap()));
}

criterion_group!(benches, echelon, model, analysis);
criterion_main!(benches);
