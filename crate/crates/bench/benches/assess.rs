use chrono::{TimeZone, Utc};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use trustrisk_core::dataset::{
    derive_histories, generate_synthetic, ActorHistories, HistoryDerivationRule,
};
use trustrisk_core::pipeline::assess_rows;
use trustrisk_core::report::{sweep_grid, Axis, GridSpec};
use trustrisk_core::selftest::{reference_histories, REFERENCE_CORPUS};
use trustrisk_core::{assess, AssessmentConfig};

fn benches(c: &mut Criterion) {
    let config = AssessmentConfig::default();
    let at = Utc.with_ymd_and_hms(2024, 3, 1, 12, 0, 0).unwrap();

    let rows = trustrisk_core::dataset::parse_corpus(REFERENCE_CORPUS.as_bytes()).unwrap();
    let record = trustrisk_core::dataset::to_record(rows[0].as_ref().unwrap()).unwrap();
    let mut histories = ActorHistories::default();
    histories.apply_side_table(reference_histories());
    let inputs = histories.inputs_for(&record);
    c.bench_function("assess/single", |b| {
        b.iter(|| assess(black_box(&inputs), &config, at).unwrap())
    });

    let corpus = generate_synthetic(9000, 42);
    let wrapped: Vec<_> = corpus.iter().cloned().map(Ok).collect();
    let derived = derive_histories(&corpus, HistoryDerivationRule::default());
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);
    group.bench_function("derive_histories/9000", |b| {
        b.iter(|| derive_histories(black_box(&corpus), HistoryDerivationRule::default()))
    });
    group.bench_function("assess_rows/9000", |b| {
        b.iter(|| assess_rows(black_box(&wrapped), &derived, &config, at).unwrap())
    });
    group.bench_function("grid/20x21", |b| {
        let spec = GridSpec {
            x: Axis::range("developer_weight", 0.0, 1.0, 0.05),
            y: Axis::range("developer_risk", 1.0, 191.0, 10.0),
            fixed: Default::default(),
            output: "final_risk_penalized".into(),
        };
        b.iter(|| sweep_grid(black_box(&spec), &inputs, &config).unwrap())
    });
    group.finish();
}

criterion_group!(assessment, benches);
criterion_main!(assessment);
