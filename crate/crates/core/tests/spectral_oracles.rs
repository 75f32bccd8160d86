//! Transforms and the projected nonlinearity against direct O(N⁴)
//! summation over the eigenfunctions.

use std::f64::consts::PI;
use std::sync::Arc;

use dnls_core::nonlinearity::apply_nonlinearity;
use dnls_core::sampling::{gaussian_field, rng_from_seed};
use dnls_core::{DomainSpec, GridField, QuarticPotential, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn phi(lx: f64, ly: f64, j: usize, k: usize, x: f64, y: f64) -> f64 {
    2.0 / (lx * ly).sqrt() * (j as f64 * PI * x / lx).sin() * (k as f64 * PI * y / ly).sin()
}

/// Field values by explicit summation of every retained eigenfunction.
fn direct_value(f: &SpectralField, x: f64, y: f64) -> Complex64 {
    let d = f.domain();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..=d.mx() {
        for k in 1..=d.my() {
            acc += f.get(j, k) * phi(d.lx(), d.ly(), j, k, x, y);
        }
    }
    acc
}

fn random_field(d: &Arc<DomainSpec>, seed: u64) -> SpectralField {
    gaussian_field(d, 3.0, &mut rng_from_seed(seed))
}

#[test]
fn synthesis_matches_direct_sum() {
    for (lx, ly, nx, ny, mx, my) in [(PI, PI, 8, 8, 5, 5), (1.0, 2.5, 7, 8, 3, 6), (2.0, 1.0, 6, 5, 5, 4)] {
        let d = DomainSpec::build(lx, ly, nx, ny, mx, my).unwrap();
        let f = random_field(&d, 1);
        let grid = f.to_grid();
        let (hx, hy) = (lx / nx as f64, ly / ny as f64);
        let scale = f.l2_norm();
        for ((i, l), v) in grid.values().indexed_iter() {
            let expected = direct_value(&f, (i + 1) as f64 * hx, (l + 1) as f64 * hy);
            assert!((v - expected).norm() <= 1e-12 * scale, "({i},{l}) {v} vs {expected}");
        }
    }
}

#[test]
fn analysis_matches_direct_quadrature() {
    // for a grid function g, c_jk = (Lx/Nx)(Ly/Ny) Σ g(x_i, y_l) φ_jk(x_i, y_l)
    let (lx, ly, nx, ny, mx, my) = (1.5, 2.0, 8, 7, 6, 5);
    let d = DomainSpec::build(lx, ly, nx, ny, mx, my).unwrap();
    let g = GridField::from_fn(&d, |x, y| Complex64::new(x * (lx - x) * y, (x * y).sin() * (ly - y)));
    let coeffs = g.to_coeffs();
    let w = (lx / nx as f64) * (ly / ny as f64);
    for j in 1..=mx {
        for k in 1..=my {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((i, l), v) in g.values().indexed_iter() {
                let (x, y) = ((i + 1) as f64 * lx / nx as f64, (l + 1) as f64 * ly / ny as f64);
                acc += v * phi(lx, ly, j, k, x, y);
            }
            assert!((coeffs.get(j, k) - acc * w).norm() < 1e-13, "mode ({j},{k})");
        }
    }
}

#[test]
fn projected_nonlinearity_matches_fine_quadrature() {
    // P[g(|ψ|²)ψ] for a quartic U is a trigonometric polynomial of degree
    // 3M per axis; a direct midpoint-free sum on 4(M+1) intervals is exact.
    let p = QuarticPotential::new(1.3, -0.4, 0.2).unwrap();
    for (lx, ly, mx, my) in [(PI, PI, 4, 4), (1.0, 2.0, 3, 5)] {
        let d = DomainSpec::build(lx, ly, 2 * mx + 2, 2 * my + 2, mx, my).unwrap();
        let f = random_field(&d, 7);
        let projected = apply_nonlinearity(&f, &p);
        let (gx, gy) = (4 * (mx + 1), 4 * (my + 1));
        let w = (lx / gx as f64) * (ly / gy as f64);
        let mut values = Vec::new();
        for i in 1..gx {
            for l in 1..gy {
                let (x, y) = (i as f64 * lx / gx as f64, l as f64 * ly / gy as f64);
                values.push((x, y, p.gradient(direct_value(&f, x, y))));
            }
        }
        for j in 1..=mx {
            for k in 1..=my {
                let acc: Complex64 = values.iter().map(|&(x, y, v)| v * phi(lx, ly, j, k, x, y)).sum();
                let diff = (projected.get(j, k) - acc * w).norm();
                assert!(diff < 1e-11 * (1.0 + acc.norm() * w), "mode ({j},{k}): {diff:e}");
            }
        }
    }
}

#[test]
fn inner_real_matches_grid_quadrature() {
    let d = DomainSpec::build(PI, 2.0, 20, 20, 6, 7).unwrap();
    for seed in 0..5 {
        let f = random_field(&d, seed);
        let g = random_field(&d, seed + 100);
        let (gf, gg) = (f.to_grid(), g.to_grid());
        let quad: f64 = gf
            .values()
            .iter()
            .zip(gg.values())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
            * d.collocation_weight();
        let spectral = f.inner_real(&g).unwrap();
        assert!((quad - spectral).abs() <= 1e-12 * f.l2_norm() * g.l2_norm());
        assert!(f.inner_real(&(&f * Complex64::new(0.0, 1.0))).unwrap().abs() < 1e-12 * f.norm_sqr());
        assert!((f.inner_real(&f).unwrap() - f.norm_sqr()).abs() < 1e-12 * f.norm_sqr());
    }
}

fn domain_strategy() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (2usize..10, 2usize..10).prop_flat_map(|(nx, ny)| (Just(nx), Just(ny), 1..nx, 1..ny))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_round_trip_is_identity((nx, ny, mx, my) in domain_strategy(), lx in 0.5f64..4.0, ly in 0.5f64..4.0, seed in any::<u64>()) {
        let d = DomainSpec::build(lx, ly, nx, ny, mx, my).unwrap();
        let f = random_field(&d, seed);
        let back = f.to_grid().to_coeffs();
        let err = (&back - &f).l2_norm();
        prop_assert!(err <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn parseval_and_laplacian_identity((nx, ny, mx, my) in domain_strategy(), lx in 0.5f64..4.0, ly in 0.5f64..4.0, seed in any::<u64>()) {
        let d = DomainSpec::build(lx, ly, nx, ny, mx, my).unwrap();
        let f = random_field(&d, seed);
        let sum: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((f.sobolev_norm(0.0).powi(2) - sum).abs() <= 1e-12 * sum);
        // grid Parseval: the collocation quadrature is exact for products of retained modes
        prop_assert!((f.to_grid().l2_norm().powi(2) - sum).abs() <= 1e-12 * sum);
        let lap = f.apply_laplacian().inner_real(&f).unwrap();
        let h1 = f.sobolev_norm(1.0).powi(2);
        prop_assert!((lap - h1).abs() <= 1e-12 * h1);
    }

    #[test]
    fn sobolev_norm_monotone_on_unit_pi_square(seed in any::<u64>(), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let d = DomainSpec::build(PI, PI, 12, 12, 6, 6).unwrap();
        let f = random_field(&d, seed);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(f.sobolev_norm(lo) <= f.sobolev_norm(hi) * (1.0 + 1e-14));
    }

    #[test]
    fn projected_nonlinearity_is_gauge_covariant(seed in any::<u64>(), theta in -10.0f64..10.0) {
        let d = DomainSpec::build(PI, 1.5, 14, 14, 5, 6).unwrap();
        let p = QuarticPotential::new(0.7, -1.1, 0.3).unwrap();
        let f = random_field(&d, seed);
        let rot = Complex64::from_polar(1.0, theta);
        let lhs = apply_nonlinearity(&(&f * rot), &p);
        let rhs = &apply_nonlinearity(&f, &p) * rot;
        let scale = apply_nonlinearity(&f, &p).l2_norm();
        prop_assert!((&lhs - &rhs).l2_norm() <= 1e-12 * scale);
        // Re⟨P f(ψ), iψ⟩ = 0: the nonlinearity never changes the charge
        let pairing = apply_nonlinearity(&f, &p).inner_real(&(&f * Complex64::new(0.0, 1.0))).unwrap();
        prop_assert!(pairing.abs() <= 1e-12 * scale * f.l2_norm());
    }
}
