use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zernlets_bench::{keratoconus_samples, spiral_points};
use zernlets_core::fit::{least_squares_fit, wavelet_analysis};
use zernlets_core::kernel::{kernel_eval_cd, kernel_eval_direct};
use zernlets_core::mra::reconstruct;
use zernlets_core::sampling::{approximate_fekete, regular_points};
use zernlets_core::wavelet::{wavelet_block, wavelet_dimension};
use zernlets_core::zernike::ZernikeTable;
use zernlets_core::{MultiscaleBasis, PointStrategy};

fn zernike_rows(c: &mut Criterion) {
    let points = spiral_points(1000);
    let mut group = c.benchmark_group("zernike_rows");
    for degree in [8, 16, 32] {
        let table = ZernikeTable::new(degree);
        let mut row = vec![0.0; table.len()];
        group.bench_with_input(BenchmarkId::from_parameter(degree), &degree, |b, _| {
            b.iter(|| {
                for &p in &points {
                    table.real_row_into(p, &mut row);
                    black_box(&row);
                }
            })
        });
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let points = spiral_points(200);
    let anchor = points[37];
    let mut group = c.benchmark_group("kernel");
    for degree in [8, 16] {
        group.bench_with_input(BenchmarkId::new("direct", degree), &degree, |b, &n| {
            b.iter(|| {
                points
                    .iter()
                    .map(|&x| kernel_eval_direct(n, anchor, x).unwrap())
                    .sum::<f64>()
            })
        });
        group.bench_with_input(
            BenchmarkId::new("christoffel_darboux", degree),
            &degree,
            |b, &n| {
                b.iter(|| {
                    points
                        .iter()
                        .map(|&x| kernel_eval_cd(n, anchor, x).unwrap())
                        .sum::<f64>()
                })
            },
        );
    }
    group.finish();
}

fn fekete(c: &mut Criterion) {
    let mut group = c.benchmark_group("approximate_fekete");
    for level in [2, 4, 8] {
        let candidates = regular_points(2 * level);
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &m| {
            b.iter(|| {
                approximate_fekete(candidates.points(), wavelet_block(m), wavelet_dimension(m))
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let samples = keratoconus_samples();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("ladder_build_n8", |b| {
        b.iter(|| MultiscaleBasis::build(8, PointStrategy::Fekete).unwrap())
    });
    group.bench_function("fit_d10200_n8", |b| {
        b.iter(|| least_squares_fit(&samples, 8).unwrap())
    });
    let bases = Arc::new(MultiscaleBasis::build(8, PointStrategy::Fekete).unwrap());
    let fit = least_squares_fit(&samples, 8).unwrap();
    group.bench_function("analysis_and_reconstruction_n8", |b| {
        b.iter(|| reconstruct(&wavelet_analysis(&fit, &bases).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, zernike_rows, kernel, fekete, pipeline);
criterion_main!(benches);
