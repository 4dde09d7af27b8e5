use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gltkit::shuffle::Permutation;
use gltkit::toeplitz::toeplitz;
use gltkit::{MultiIndex, TrigPoly};
use gltkit_bench::{laplacian, random_hermitian, random_square};

fn kron_and_shuffle(c: &mut Criterion) {
    let x = random_square(24, 1);
    let y = random_square(24, 2);
    let xy = x.kron(&y).unwrap();
    let p = Permutation::p_shuffle(24, 24).unwrap();
    c.bench_function("kron 24x24", |b| b.iter(|| black_box(&x).kron(black_box(&y)).unwrap()));
    c.bench_function("shuffle conjugate 576", |b| b.iter(|| p.conjugate(black_box(&xy), &p).unwrap()));
    let sigma = Permutation::from_one_line(&[3, 1, 4, 2]).unwrap();
    c.bench_function("gamma 4 levels of 5", |b| b.iter(|| Permutation::gamma(black_box(&[5, 5, 5, 5]), &sigma).unwrap()));
}

fn toeplitz_build(c: &mut Criterion) {
    let f = TrigPoly::laplacian().tensor(&TrigPoly::laplacian()).unwrap();
    let n = MultiIndex::sizes(&[32, 32]);
    c.bench_function("toeplitz 2-level 32x32", |b| b.iter(|| toeplitz(black_box(&n), &f).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectra");
    g.sample_size(10);
    for n in [64, 128, 256] {
        let h = random_hermitian(n, 3);
        g.bench_with_input(BenchmarkId::new("eigh", n), &h, |b, h| b.iter(|| h.eigh().unwrap()));
        g.bench_with_input(BenchmarkId::new("eigh_jacobi", n), &h, |b, h| b.iter(|| h.eigh_jacobi().unwrap()));
        let a = random_square(n, 4);
        g.bench_with_input(BenchmarkId::new("svd_values", n), &a, |b, a| b.iter(|| a.svd_values()));
    }
    let t = laplacian(512);
    g.bench_function("eigh laplacian 512", |b| b.iter(|| t.eigh().unwrap()));
    g.finish();
}

criterion_group!(benches, kron_and_shuffle, toeplitz_build, spectra);
criterion_main!(benches);
