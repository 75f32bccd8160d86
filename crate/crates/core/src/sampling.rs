//! Seeded random fields for attractor and ensemble studies.
//!
//! The generator is `Pcg64` (PCG XSL-RR 128/64) seeded through
//! `SeedableRng::seed_from_u64`; normal variates come from
//! `rand_distr::StandardNormal`. The same seed yields the same fields on
//! every platform.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_distr::StandardNormal;
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::spectral::{DomainSpec, SpectralField};

pub fn rng_from_seed(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// Field with i.i.d. standard complex Gaussian coefficients, rescaled to
/// `‖ψ‖_E = e_norm`.
pub fn gaussian_field(domain: &Arc<DomainSpec>, e_norm: f64, rng: &mut Pcg64) -> SpectralField {
    let coeffs = Array2::from_shape_fn((domain.mx(), domain.my()), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let mut field = SpectralField::from_coeffs(domain, coeffs).expect("shape matches domain");
    let norm = field.e_norm();
    if norm > 0.0 {
        field.scale(Complex64::new(e_norm / norm, 0.0));
    }
    field
}

/// `count` fields drawn inside the E-ball of the given radius: random
/// directions with radius `radius·u`, `u` uniform on `(0, 1]`.
pub fn seeds_in_ball(domain: &Arc<DomainSpec>, radius: f64, count: usize, seed: u64) -> Result<Vec<SpectralField>> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "seed radius must be nonnegative, got {radius}"
        )));
    }
    if count == 0 {
        return Err(Error::EmptySet);
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..count)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            gaussian_field(domain, radius * u, &mut rng)
        })
        .collect())
}
