use criterion::{black_box, criterion_group, criterion_main, Criterion};
use polyode::{check_theorem, d_kernel, find_closed, integrate, parse, s_poly, scan_closed, Params, TheoremId};
use polyode_bench::{cubic, degree_six};

fn expressions(c: &mut Criterion) {
    let text = "-sin(t)^2*abs(cos(pi*t)) + 2*exp(-t)*arctan(t^3)";
    c.bench_function("parse", |b| b.iter(|| parse(black_box(text)).unwrap()));
    let e = parse(text).unwrap();
    c.bench_function("eval", |b| b.iter(|| e.eval(black_box(0.37)).unwrap()));
}

fn kernels(c: &mut Criterion) {
    c.bench_function("s_poly k=12", |b| {
        b.iter(|| s_poly(12, black_box(1.3), black_box(-0.7)))
    });
    let ode = degree_six();
    c.bench_function("d_kernel degree 6", |b| {
        b.iter(|| d_kernel(&ode, black_box(0.4), black_box(0.3), black_box(-0.2)).unwrap())
    });
}

fn integration(c: &mut Criterion) {
    let ode = degree_six();
    c.bench_function("integrate degree 6", |b| {
        b.iter(|| integrate(&ode, 0.0, black_box(0.1), 1.0, 1e-10).unwrap())
    });
    let cubic = cubic();
    let t = cubic.horizon();
    c.bench_function("integrate cubic", |b| {
        b.iter(|| integrate(&cubic, 0.0, black_box(0.5), t, 1e-10).unwrap())
    });
}

fn searches(c: &mut Criterion) {
    let cubic = cubic();
    c.bench_function("find_closed cubic", |b| {
        b.iter(|| find_closed(&cubic, (-1.0, 1.0), 1e-10).unwrap())
    });
    let ode = degree_six();
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("scan_closed degree 6", |b| {
        b.iter(|| scan_closed(&ode, (-3.0, 3.0), 64, 1e-10).unwrap())
    });
    g.bench_function("check T4.4 degree 6", |b| {
        b.iter(|| check_theorem(&ode, TheoremId::T4_4, &Params::default()))
    });
    g.finish();
}

criterion_group!(benches, expressions, kernels, integration, searches);
criterion_main!(benches);
