use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use reebflow_bench::{default_model, interior_points};
use reebflow_core::contact::reeb_field;
use reebflow_core::dynamics::integrate;
use reebflow_core::ode::IntegratorConfig;
use reebflow_core::phase::PhasePoint;
use reebflow_core::quadratic::check_lemma_l;

fn evaluate(c: &mut Criterion) {
    let m = default_model();
    let pts = interior_points(&m, 256);
    c.bench_function("evaluate_h_256", |b| {
        b.iter(|| pts.iter().map(|p| m.evaluate(black_box(p)).h).sum::<f64>())
    });
    c.bench_function("reeb_field_256", |b| {
        b.iter(|| {
            pts.iter()
                .map(|p| reeb_field(&m, black_box(p)).comps[4])
                .sum::<f64>()
        })
    });
}

fn orbit(c: &mut Criterion) {
    let m = default_model();
    let x0 = PhasePoint::from_polar(&[1.1, 1.2], &[0.3, 2.0], -0.2);
    let cfg = IntegratorConfig::default();
    c.bench_function("integrate_t10", |b| {
        b.iter(|| integrate(&m, black_box(&x0), 10.0, &cfg).unwrap().len())
    });
}

fn certificate(c: &mut Criterion) {
    let m = default_model();
    let g = m.grids();
    c.bench_function("check_lemma_l_b4", |b| {
        b.iter(|| {
            check_lemma_l(black_box(4.0), m.c(), m.field(), g.per_axis, g.r_grid)
                .unwrap()
                .margin
        })
    });
}

criterion_group!(benches, evaluate, orbit, certificate);
criterion_main!(benches);
