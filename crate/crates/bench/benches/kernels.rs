use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hadapow_bench::{cosine, curve_spec, poly_gram};
use hadapow_core::exppoly::expand_minor;
use hadapow_core::oracle::{hp_det, hp_min_eigenvalue};
use hadapow_core::scan::{scan, ScanConfig};
use hadapow_core::spectra::{classify_psd, determinant, eigenvalues};
use hadapow_core::{Alpha, FamilySpec};
use std::hint::black_box;

fn working_precision(c: &mut Criterion) {
    let alpha = Alpha::new(1.5).unwrap();
    let mut g = c.benchmark_group("working");
    for n in [4, 8, 16] {
        let a = poly_gram(n).hadamard_power(alpha).unwrap();
        g.bench_with_input(BenchmarkId::new("eigenvalues", n), &a, |b, a| b.iter(|| eigenvalues(black_box(a))));
        g.bench_with_input(BenchmarkId::new("determinant", n), &a, |b, a| b.iter(|| determinant(black_box(a))));
        g.bench_with_input(BenchmarkId::new("classify", n), &a, |b, a| b.iter(|| classify_psd(black_box(a))));
        let c = cosine(n);
        g.bench_with_input(BenchmarkId::new("abs_power", n), &c, |b, c| b.iter(|| black_box(c).abs_power(alpha)));
    }
    g.finish();
}

fn extended_precision(c: &mut Criterion) {
    let spec = curve_spec();
    let alpha = Alpha::new(1.5).unwrap();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(20);
    for digits in [50, 100] {
        g.bench_with_input(BenchmarkId::new("hp_det", digits), &digits, |b, &d| {
            b.iter(|| hp_det(&spec, false, alpha, d))
        });
        g.bench_with_input(BenchmarkId::new("hp_min_eigenvalue", digits), &digits, |b, &d| {
            b.iter(|| hp_min_eigenvalue(&spec, false, alpha, d))
        });
    }
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("exppoly");
    for m in [4, 6] {
        let a = poly_gram(m);
        let idx: Vec<usize> = (0..m).collect();
        g.bench_with_input(BenchmarkId::new("expand_minor", m), &idx, |b, idx| b.iter(|| expand_minor(&a, idx)));
        let p = expand_minor(&a, &idx).unwrap();
        g.bench_with_input(BenchmarkId::new("eval", m), &p, |b, p| b.iter(|| p.eval(black_box(2.5))));
    }
    g.finish();
}

fn scanning(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    let spec = FamilySpec::cos_toeplitz(6);
    let cfg = ScanConfig::new(0.0, 6.0).with_abs(true);
    g.bench_function("abs_cos6", |b| b.iter(|| scan(&spec, &cfg)));
    g.finish();
}

criterion_group!(benches, working_precision, extended_precision, expansion, scanning);
criterion_main!(benches);
