use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use regsub::fixtures;
use regsub::regularity::{is_regular, verify_certificate, wall_forms, Domain, Regularity};
use regsub::subdivision::{derived, sd_k};

fn workloads(c: &mut Criterion) {
    let sd2 = sd_k(&fixtures::spiral6(), 2);
    let regular = sd_k(&fixtures::square_triangulations().0, 2);
    let Regularity::Regular(cert) = is_regular(Domain::triangulation(&regular)).unwrap() else {
        panic!("derived subdivisions of a regular triangulation are regular");
    };

    let pools: Vec<(&str, rayon::ThreadPool)> = vec![
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ];

    let mut group = c.benchmark_group("derived");
    for (name, pool) in &pools {
        group.bench_function(BenchmarkId::new(*name, sd2.facets().len()), |b| {
            pool.install(|| b.iter(|| derived(&sd2)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("wall_forms");
    for (name, pool) in &pools {
        group.bench_function(BenchmarkId::new(*name, sd2.facets().len()), |b| {
            pool.install(|| b.iter(|| wall_forms(Domain::triangulation(&sd2)).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("verify_certificate");
    group.sample_size(10);
    for (name, pool) in &pools {
        group.bench_function(BenchmarkId::new(*name, regular.facets().len()), |b| {
            pool.install(|| b.iter(|| verify_certificate(Domain::triangulation(&regular), &cert).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, workloads);
criterion_main!(benches);
