//! Sequential against rayon-parallel execution for a small study and for a
//! large spectral reference evaluation.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fracfem::analysis::ErrorEvaluator;
use fracfem::special::FracOrder;
use fracfem::study::{run_study, ExampleId, StudyConfig};
use fracfem::Execution;

const STUDY: &str = r#"{
  "schema_version": 1,
  "example": "2a",
  "alphas": [0.1, 0.5, 0.95],
  "levels": [3, 4, 5],
  "aggregation": {"kind": "at_time", "t": 1.0},
  "tolerances": {"reference_truncation": 256}
}"#;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn study(c: &mut Criterion) {
    let config = StudyConfig::from_json(STUDY).unwrap();
    let mut group = c.benchmark_group("study_2a_k3_5");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_study(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

fn reference(c: &mut Criterion) {
    let source = ExampleId::Square2a.source();
    let order = FracOrder::new(0.5).unwrap();
    let mut group = c.benchmark_group("reference_2a_J512");
    group.sample_size(10);
    for (name, exec) in modes() {
        let evaluator = ErrorEvaluator::new(&source, order, 512, exec).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evaluator.reference_at(black_box(1.0)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, study, reference);
criterion_main!(benches);
