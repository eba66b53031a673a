use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use powercount::genfun::{gf_ortho, gf_sp, GfRequest, GroupFamily, Statistic, Weighting};
use powercount::oracle::{build_group, FormFamily, FormSpec};
use powercount::powerclass::{companion_power_charpoly, power_profile};
use powercount::{FieldCtx, MonicPoly};

fn x_n_minus_one(q: u64, n: usize) -> MonicPoly {
    let field = FieldCtx::of_order(q).unwrap();
    let mut coeffs = vec![0; n + 1];
    coeffs[0] = -1;
    coeffs[n] = 1;
    MonicPoly::from_ints(&field, &coeffs).unwrap()
}

fn polynomials(c: &mut Criterion) {
    let f2 = x_n_minus_one(2, 65);
    let f5 = x_n_minus_one(5, 26);
    c.bench_function("factor x^65-1 over F2", |b| b.iter(|| black_box(&f2).factorize().unwrap()));
    c.bench_function("factor x^26-1 over F5", |b| b.iter(|| black_box(&f5).factorize().unwrap()));

    let f3 = FieldCtx::of_order(3).unwrap();
    let g = MonicPoly::from_ints(&f3, &[1, 2, 2, 2, 1, 0, 1, 0, 1, 2, 2, 2, 1]).unwrap();
    c.bench_function("power profile deg 12 M=73", |b| b.iter(|| power_profile(black_box(&g), 73).unwrap()));
    c.bench_function("companion power deg 12 M=73", |b| {
        b.iter(|| companion_power_charpoly(black_box(&g), 73).unwrap())
    });
}

fn series(c: &mut Criterion) {
    let sp = GfRequest::new(GroupFamily::Sp, Statistic::Regular, Weighting::Probability, 3, 2, 12).unwrap();
    c.bench_function("symplectic regular q=3 M=2 to u^12", |b| b.iter(|| gf_sp(black_box(&sp)).unwrap()));
    let o = GfRequest::new(GroupFamily::O, Statistic::Semisimple, Weighting::Classes, 5, 2, 8).unwrap();
    c.bench_function("orthogonal semisimple q=5 M=2 to u^8", |b| b.iter(|| gf_ortho(black_box(&o)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let sp = FormSpec::new(FormFamily::Sp, 2, 5).unwrap();
    group.bench_function("Sp(2,5) build and profile", |b| {
        b.iter(|| build_group(black_box(&sp)).unwrap().class_profiles().unwrap().len())
    });
    let o = FormSpec::new(FormFamily::Oodd, 3, 5).unwrap();
    group.bench_function("O0(3,5) build and profile", |b| {
        b.iter(|| build_group(black_box(&o)).unwrap().class_profiles().unwrap().len())
    });
    group.finish();
}

criterion_group!(benches, polynomials, series, oracle);
criterion_main!(benches);
