//! Driving term `p(x, t) = Σ_j q_j(x)·e^{i(ω_j t + φ_j)}`.
//!
//! Finite trigonometric polynomials in `t` are uniformly almost periodic and
//! have closed-form translates, which is all the attractor harness needs.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nonlinearity::l4_norm;
use crate::spectral::{DomainSpec, SpectralField};

#[derive(Clone, Debug)]
pub struct PumpMode {
    pub profile: SpectralField,
    /// Angular frequency, rad per unit time.
    pub omega: f64,
    pub phase: f64,
}

impl PumpMode {
    #[inline]
    pub fn factor(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.omega * t + self.phase)
    }
}

#[derive(Clone, Debug)]
pub struct QuasiPeriodicPump {
    domain: Arc<DomainSpec>,
    modes: Vec<PumpMode>,
}

impl QuasiPeriodicPump {
    pub fn new(domain: &Arc<DomainSpec>, modes: Vec<PumpMode>) -> Result<Self> {
        for m in &modes {
            if !m.profile.domain().same_as(domain) {
                return Err(Error::DomainMismatch);
            }
            if !(m.omega.is_finite() && m.phase.is_finite()) {
                return Err(Error::InvalidArgument("pump frequency and phase must be finite".into()));
            }
        }
        Ok(QuasiPeriodicPump {
            domain: Arc::clone(domain),
            modes,
        })
    }

    pub fn zero(domain: &Arc<DomainSpec>) -> Self {
        QuasiPeriodicPump {
            domain: Arc::clone(domain),
            modes: Vec::new(),
        }
    }

    /// Time-independent forcing by a single profile.
    pub fn autonomous(profile: SpectralField) -> Self {
        let domain = Arc::clone(profile.domain());
        QuasiPeriodicPump {
            domain,
            modes: vec![PumpMode {
                profile,
                omega: 0.0,
                phase: 0.0,
            }],
        }
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    pub fn modes(&self) -> &[PumpMode] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.profile.norm_sqr() == 0.0)
    }

    /// `p(t)`.
    pub fn eval(&self, t: f64) -> SpectralField {
        let mut out = SpectralField::zeros(&self.domain);
        for m in &self.modes {
            out.axpy(m.factor(t), &m.profile);
        }
        out
    }

    /// `ṗ(t) = Σ iω_j q_j e^{i(ω_j t + φ_j)}`.
    pub fn derivative(&self, t: f64) -> SpectralField {
        let mut out = SpectralField::zeros(&self.domain);
        for m in &self.modes {
            out.axpy(Complex64::new(0.0, m.omega) * m.factor(t), &m.profile);
        }
        out
    }

    /// `Σ_j ‖q_j‖_E`, an upper bound for `sup_t ‖p(t)‖_E`; equal to the
    /// supremum when there is a single mode.
    pub fn sup_norm(&self) -> f64 {
        self.modes.iter().map(|m| m.profile.e_norm()).sum()
    }

    /// `Σ_j ‖q_j‖_{L²}`, bounding `sup_t ‖p(t)‖`.
    pub fn l2_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.profile.l2_norm()).sum()
    }

    /// `Σ_j ‖q_j‖_{L⁴}`, bounding `sup_t ‖p(t)‖_{L⁴}`.
    pub fn l4_bound(&self) -> f64 {
        self.modes.iter().map(|m| l4_norm(&m.profile)).sum()
    }

    /// The pump seen from a shifted clock: `translate(τ).eval(t) == eval(t + τ)`.
    pub fn translate(&self, tau: f64) -> QuasiPeriodicPump {
        QuasiPeriodicPump {
            domain: Arc::clone(&self.domain),
            modes: self
                .modes
                .iter()
                .map(|m| PumpMode {
                    profile: m.profile.clone(),
                    omega: m.omega,
                    phase: m.phase + m.omega * tau,
                })
                .collect(),
        }
    }

    /// Same pump restricted or zero-extended to another cut of the rectangle.
    pub fn transfer_to(&self, target: &Arc<DomainSpec>) -> Result<QuasiPeriodicPump> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                Ok(PumpMode {
                    profile: m.profile.transfer_to(target)?,
                    omega: m.omega,
                    phase: m.phase,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuasiPeriodicPump {
            domain: Arc::clone(target),
            modes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn domain() -> Arc<DomainSpec> {
        DomainSpec::build(PI, PI, 16, 16, 5, 5).unwrap()
    }

    fn mode(d: &Arc<DomainSpec>, j: usize, k: usize, c: Complex64, omega: f64, phase: f64) -> PumpMode {
        PumpMode {
            profile: SpectralField::single_mode(d, j, k, c).unwrap(),
            omega,
            phase,
        }
    }

    #[test]
    fn empty_pump_is_zero() {
        let d = domain();
        let p = QuasiPeriodicPump::zero(&d);
        for t in [0.0, 1.3, -7.0] {
            assert_eq!(p.eval(t).norm_sqr(), 0.0);
        }
        assert_eq!(p.sup_norm(), 0.0);
    }

    #[test]
    fn constant_and_half_period_values() {
        let d = domain();
        let q = Complex64::new(0.4, -0.2);
        let p = QuasiPeriodicPump::new(&d, vec![mode(&d, 2, 1, q, 0.0, 0.0)]).unwrap();
        assert_eq!(p.eval(12.5).get(2, 1), q);

        let p = QuasiPeriodicPump::new(&d, vec![mode(&d, 2, 1, q, 1.0, 0.0)]).unwrap();
        assert!((p.eval(PI).get(2, 1) + q).norm() < 1e-15);
        assert_relative_eq!(p.sup_norm(), q.norm() * 5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn sup_bound_dominates_sampled_supremum() {
        let d = domain();
        let p = QuasiPeriodicPump::new(
            &d,
            vec![
                mode(&d, 1, 1, Complex64::new(0.3, 0.0), 1.0, 0.0),
                mode(&d, 1, 2, Complex64::new(0.0, 0.2), 2f64.sqrt(), 0.4),
            ],
        )
        .unwrap();
        let bound = p.sup_norm();
        let sampled = (0..=100_000)
            .map(|i| p.eval(i as f64 * 0.1).e_norm())
            .fold(0.0, f64::max);
        assert!(sampled <= bound);
    }

    #[test]
    fn periodic_translate_is_identity() {
        let d = domain();
        let p = QuasiPeriodicPump::new(&d, vec![mode(&d, 1, 1, Complex64::new(1.0, 0.5), 1.0, 0.3)]).unwrap();
        let shifted = p.translate(2.0 * PI);
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let diff = &shifted.eval(t) - &p.eval(t);
            assert!(diff.l2_norm() < 1e-14);
        }
        let same = p.translate(0.0);
        assert_eq!(same.modes()[0].phase, p.modes()[0].phase);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let d = domain();
        let p = QuasiPeriodicPump::new(
            &d,
            vec![
                mode(&d, 1, 1, Complex64::new(0.3, 0.0), 1.0, 0.0),
                mode(&d, 3, 2, Complex64::new(0.0, 0.2), 2.7, -1.0),
            ],
        )
        .unwrap();
        let t = 0.81;
        let h = 1e-5;
        let fd = &(&p.eval(t + h) - &p.eval(t - h)) * (0.5 / h);
        let diff = &fd - &p.derivative(t);
        assert!(diff.l2_norm() < 1e-8);
    }
}
