use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use polyscale::layout::{EnergyConfig, EnergyModel, Phase, Sizes};
use polyscale::metrics::overlap_report;
use polyscale::pipeline::{run_pipeline, PipelineConfig, SimplifyManifest};
use polyscale::planarity::ForbiddenReport;
use polyscale::simplify::{SimplifyConfig, TerminationCriteria};
use polyscale::stats;
use polyscale_bench::{clustered, initial_layout, polygon_tree};

fn statistics(c: &mut Criterion) {
    let h = clustered(1);
    c.bench_function("betweenness/clustered", |b| b.iter(|| stats::betweenness_all(&h).unwrap()));
    c.bench_function("forbidden/clustered", |b| b.iter(|| ForbiddenReport::compute(&h).unwrap()));
}

fn simplification(c: &mut Criterion) {
    let h = clustered(2);
    let cfg = SimplifyConfig {
        criteria: TerminationCriteria {
            target_vertices: Some(1),
            ..Default::default()
        },
        ..Default::default()
    };
    c.bench_function("simplify/clustered", |b| b.iter(|| SimplifyManifest::run(&h, &cfg).unwrap()));
}

fn energy(c: &mut Criterion) {
    let h = clustered(3);
    let cfg = EnergyConfig::default();
    let sizes = Sizes::of(&h);
    let l = initial_layout(&h, true, 3);
    for phase in [Phase::Separation, Phase::Regularity] {
        let model = EnergyModel::new(&h, &sizes, true, phase, &cfg, None).unwrap();
        let x = model.pack(&l).unwrap();
        let mut g = vec![0.0; x.len()];
        c.bench_function(&format!("energy/{phase:?}"), |b| b.iter(|| model.eval(&x, &mut g)));
    }
    c.bench_function("overlap_report/clustered", |b| {
        b.iter(|| overlap_report(&h, &l, &Default::default()).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let h = polygon_tree(4, 10);
    let cfg = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("polygon_tree", |b| {
        b.iter_batched(|| h.clone(), |h| run_pipeline(&h, &cfg, None).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, statistics, simplification, energy, pipeline);
criterion_main!(benches);
