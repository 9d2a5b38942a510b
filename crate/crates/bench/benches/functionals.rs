use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use evlab_bench::fixture_configuration;
use evlab_core::drift::{drift_oracle, verify_drift, DriftFunctional};
use evlab_core::kernel::ExactParams;
use evlab_core::lyapunov::{f1, f2, g_rect, inequality_audit, phi, rho2};
use evlab_core::{rat, Rat};

fn bench_functionals(c: &mut Criterion) {
    let mut group = c.benchmark_group("functionals");
    for size in [32u64, 256, 2048] {
        let s = fixture_configuration(size);
        group.bench_with_input(BenchmarkId::new("f1_f2_rho2_g", size), &s, |b, s| {
            b.iter(|| black_box((f1(s), f2(s), rho2(s), g_rect(s).g)));
        });
    }
    let s = fixture_configuration(48);
    group.bench_function("phi1_size_48", |b| b.iter(|| black_box(phi(&s, 1.0))));
    group.bench_function("audit_size_48", |b| {
        b.iter(|| black_box(inequality_audit(&s).all_pass()))
    });
    group.finish();
}

fn bench_drift_verification(c: &mut Criterion) {
    let params = ExactParams::new(rat(1, 3), rat(2, 5));
    let s = fixture_configuration(12);
    c.bench_function("drift_oracle_f1_size_12", |b| {
        b.iter(|| {
            black_box(drift_oracle(&s, params, |c| {
                Rat::from_integer(f1(c) as i128)
            }))
        });
    });
    c.bench_function("verify_drift_phi1_size_12", |b| {
        b.iter(|| {
            black_box(
                verify_drift(&s, params, DriftFunctional::Phi(1.0))
                    .unwrap()
                    .gap,
            )
        });
    });
}

criterion_group!(benches, bench_functionals, bench_drift_verification);
criterion_main!(benches);
