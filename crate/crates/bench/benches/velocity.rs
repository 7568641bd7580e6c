use std::hint::black_box;

use bohmpair_bench::{configurations, spreading_params};
use bohmpair_core::velocity::{velocity_closed_form, velocity_oracle};
use bohmpair_core::SpinStatistics;
use criterion::{criterion_group, criterion_main, Criterion};

fn velocity_field(c: &mut Criterion) {
    let p = spreading_params();
    let points = configurations(&p, 256);
    let mut group = c.benchmark_group("velocity");
    for stats in [SpinStatistics::Boson, SpinStatistics::Fermion] {
        group.bench_function(format!("closed_form/{}", stats.name()), |b| {
            b.iter(|| {
                for q in &points {
                    black_box(velocity_closed_form(q, stats, &p).ok());
                }
            })
        });
        group.bench_function(format!("oracle/{}", stats.name()), |b| {
            b.iter(|| {
                for q in &points {
                    black_box(velocity_oracle(q, stats, &p, 1e-4 * p.sigma0).ok());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, velocity_field);
criterion_main!(benches);
