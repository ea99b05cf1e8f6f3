use cechlab::{
    betti_numbers, build_complex, count_theta_cycles_in, enumerate_critical_points, is_covered, sample_poisson,
    GeometryContext, RngStream, ThetaParams,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn stages(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for (d, n, lambda) in [(2usize, 1000.0, 8.0), (3, 300.0, 4.0)] {
        let ctx = GeometryContext::new(d).unwrap();
        let r = ctx.radius_for_lambda(n, lambda);
        let label = format!("d{d}_n{n}_L{lambda}");
        let cloud = sample_poisson(n, &ctx, RngStream::new(1, 0)).unwrap();
        let cplx = build_complex(&cloud, r, d + 1, &ctx).unwrap();
        let census = enumerate_critical_points(&cloud, r, &ctx).unwrap();
        let params = ThetaParams::new(r, lambda, 0.1).unwrap();

        group.bench_function(BenchmarkId::new("sample", &label), |b| {
            b.iter(|| sample_poisson(n, &ctx, RngStream::new(1, 0)).unwrap())
        });
        group.bench_function(BenchmarkId::new("complex", &label), |b| {
            b.iter(|| build_complex(&cloud, r, d + 1, &ctx).unwrap())
        });
        group.bench_function(BenchmarkId::new("betti", &label), |b| {
            b.iter(|| betti_numbers(&cplx).unwrap())
        });
        group.bench_function(BenchmarkId::new("critical", &label), |b| {
            b.iter(|| enumerate_critical_points(&cloud, r, &ctx).unwrap())
        });
        group.bench_function(BenchmarkId::new("theta", &label), |b| {
            b.iter(|| count_theta_cycles_in(&cloud, &census, &params).unwrap())
        });
        group.bench_function(BenchmarkId::new("coverage", &label), |b| {
            b.iter(|| is_covered(&cloud, r, &ctx).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
