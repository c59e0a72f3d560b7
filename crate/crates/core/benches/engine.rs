use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use branetile::consistency::check_consistency;
use branetile::cy3::cy3_scan_pieces;
use branetile::dt::dt_series;
use branetile::fterm::{Engine, Model};
use branetile::{examples, par, FaceId};

// One worker thread is the sequential baseline; 0 uses the whole pool.
const THREADS: [(&str, usize); 2] = [("sequential", 1), ("parallel", 0)];

fn consistency(c: &mut Criterion) {
    let m = Model::new(&examples::conifold());
    let mut g = c.benchmark_group("consistency_conifold_b6");
    for (name, threads) in THREADS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || check_consistency(&m, 6, 7).unwrap()))
        });
    }
    g.finish();
}

fn cy3(c: &mut Criterion) {
    let m = Model::new(&examples::cube());
    let mut g = c.benchmark_group("cy3_cube_b6");
    for (name, threads) in THREADS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || cy3_scan_pieces(&m, 6, 7).unwrap()))
        });
    }
    g.finish();
}

fn dt(c: &mut Criterion) {
    let m = Model::new(&examples::c3());
    let mut g = c.benchmark_group("dt_c3_n5");
    g.sample_size(10);
    for (name, threads) in THREADS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::with_threads(threads, || {
                    let e = Engine::develop(&m, FaceId(0), 14).unwrap();
                    dt_series(&e, 5).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, consistency, cy3, dt);
criterion_main!(benches);
