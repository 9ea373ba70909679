use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use troplog_bench::{elliptic_star, plane_curve, triangle_chamber, triangle_with_trees};
use troplog_core::{
    alignment_chambers, complete_to_toric, contract_circle, contraction_radius_for_m,
    enumerate_strata, is_wellspaced, EnumerationRequest, MonoidForm, Radius, TargetModel,
};

fn alignment(c: &mut Criterion) {
    let mut g = c.benchmark_group("alignment_chambers");
    g.sample_size(10);
    for k in [1, 2, 3] {
        let curve = elliptic_star(k);
        g.bench_with_input(BenchmarkId::from_parameter(k), &curve, |b, curve| {
            b.iter(|| alignment_chambers(curve).unwrap())
        });
    }
    g.finish();
}

fn contraction(c: &mut Criterion) {
    let curve = triangle_with_trees();
    let ch = triangle_chamber();
    c.bench_function("contraction_radius_for_m/5", |b| {
        b.iter(|| contraction_radius_for_m(&curve, 5, &ch).unwrap())
    });
    let r = Radius::Exact(MonoidForm::sum_of(&[0, 2]));
    c.bench_function("contract_circle", |b| {
        b.iter(|| contract_circle(&curve, &r, &ch).unwrap())
    });
}

fn completion(c: &mut Criterion) {
    let mut g = c.benchmark_group("complete_to_toric");
    for d in [3, 6, 12] {
        let m = plane_curve(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &m, |b, m| {
            b.iter(|| complete_to_toric(m).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let quadric = TargetModel::new(vec![1, 1], vec![]).unwrap();
    let req = EnumerationRequest::new(quadric, 0, vec![2, 2], 2);
    let mut g = c.benchmark_group("enumeration");
    g.sample_size(10);
    g.bench_function("quadric_2_2_v2", |b| {
        b.iter(|| enumerate_strata(&req).unwrap())
    });
    let strata = enumerate_strata(&req).unwrap();
    g.bench_function("well_spaced_quadric_strata", |b| {
        b.iter(|| {
            strata
                .iter()
                .filter(|s| is_wellspaced(&s.map, &s.chamber, 3).unwrap().well_spaced)
                .count()
        })
    });
    g.finish();
}

criterion_group!(benches, alignment, contraction, completion, enumeration);
criterion_main!(benches);
