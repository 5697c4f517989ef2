use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minlift::criteria::{check_hs, check_injectivity_boundary, check_local_univalence, DiskGrid};
use minlift::mappings::{catalog, combine, IMAGINARY_DIRECTION};
use minlift::surface::build_mesh;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let label = format!("rayon-{}", default.current_num_threads());
    vec![
        ("sequential-1".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        (label, default),
    ]
}

fn grid_checks(c: &mut Criterion) {
    let f = combine(&catalog("enneper").unwrap(), &catalog("scherk-singly").unwrap(), 0.4).unwrap();
    let grid = DiskGrid::new(100, 256, 0.95).unwrap();
    let phi = f.shear(IMAGINARY_DIRECTION);
    let mut group = c.benchmark_group("grid_checks");
    for (label, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("local_univalence", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| check_local_univalence(&f, &grid).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("hs", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| check_hs(&phi, &grid).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("injectivity_2000", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| check_injectivity_boundary(&f, 0.855, 2000).unwrap()))
        });
    }
    group.finish();
}

fn meshes(c: &mut Criterion) {
    let f = combine(&catalog("enneper4").unwrap(), &catalog("noid4").unwrap(), 0.5).unwrap();
    let grid = DiskGrid::new(40, 128, 0.94).unwrap();
    let mut group = c.benchmark_group("build_mesh");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("noid_blend_40x128", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| build_mesh(&f, &grid, 64).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, grid_checks, meshes);
criterion_main!(benches);
