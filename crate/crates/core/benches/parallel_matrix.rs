//! Compares the parallel and sequential pairwise distance matrix
//! implementations on a small peak-loop family.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use curveshape::estimation::EstimateConfig;
use curveshape::shape::{pairwise_matrix, pairwise_matrix_serial, AnalysisInput, DistanceMethod};
use curveshape::synth::peak_loop_family;
use curveshape::RegistrationConfig;

fn inputs() -> Vec<AnalysisInput> {
    peak_loop_family(8, 60.5, 0.15, 256, 1)
        .unwrap()
        .into_iter()
        .map(|(loc, s)| {
            AnalysisInput::with_theta(format!("loop-{loc:.3}"), s.curve, s.theta.unwrap())
        })
        .collect()
}

fn bench_matrix(c: &mut Criterion) {
    let inputs = inputs();
    let reg = RegistrationConfig {
        dp_grid: 128,
        ..RegistrationConfig::default()
    };
    let est = EstimateConfig::default();

    let mut group = c.benchmark_group("pairwise_src_8x8");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || inputs.clone(),
            |ins| pairwise_matrix(&ins, DistanceMethod::Src, &reg, &est),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("serial", |b| {
        b.iter_batched(
            || inputs.clone(),
            |ins| pairwise_matrix_serial(&ins, DistanceMethod::Src, &reg, &est),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_matrix);
criterion_main!(benches);
