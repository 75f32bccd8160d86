//! Time integration of the Galerkin system
//!
//! ```text
//! i·ċ = Λc − iγc + P_m f(ψ) + p(t)
//! ```
//!
//! The default scheme is a Strang splitting `A(h/2)·B(h)·A(h/2)`:
//!
//! * `B` is the exact flow of the linear part, damping and pump,
//!   `ċ = (−i(λ + 2a₁) − γ)c − i·p(t)`, solved per mode with the pump
//!   integrated in closed form for every frequency.
//! * `A` is the flow of the projected quartic term `i·ċ = P[4a₂|ψ|²ψ]`,
//!   advanced with the implicit midpoint rule. `Re⟨P[g(|ψ|²)ψ], iψ⟩ = 0`
//!   for real `g`, so the midpoint rule keeps `‖c‖` fixed; the fixed-point
//!   iteration is run to round-off and the last ulps of the norm are
//!   restored explicitly.
//!
//! The quadratic coefficient `a₁` is a global phase rotation that commutes
//! with every other term, so it lives in `B`.
//!
//! With `p ≡ 0` the scheme therefore reproduces `‖ψ(t)‖ = e^{−γt}‖ψ(0)‖`
//! to round-off. A classical RK4 on [`rhs`] is kept as a reference scheme.

use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nonlinearity::{QuadratureWorkspace, QuarticPotential};
use crate::pumping::QuasiPeriodicPump;
use crate::spectral::{DomainSpec, SpectralField};

/// Runs abort once `‖ψ‖_E` exceeds this value.
pub const BLOW_UP_E_NORM: f64 = 1e8;

const MIDPOINT_TOL: f64 = 1e-14;
const MIDPOINT_MAX_ITER: usize = 80;
const MAX_SUBDIVISION_DEPTH: u32 = 16;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    StrangSplit,
    Rk4Reference,
}

#[derive(Clone, Debug)]
pub struct SolverParams {
    pub gamma: f64,
    pub potential: QuarticPotential,
    pub pump: QuasiPeriodicPump,
    pub dt: f64,
    pub scheme: Scheme,
}

impl SolverParams {
    pub fn new(
        gamma: f64,
        potential: QuarticPotential,
        pump: QuasiPeriodicPump,
        dt: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got dt={dt}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "friction must be nonnegative, got gamma={gamma}"
            )));
        }
        Ok(SolverParams {
            gamma,
            potential,
            pump,
            dt,
            scheme,
        })
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        self.pump.domain()
    }

    pub fn with_pump(&self, pump: QuasiPeriodicPump) -> SolverParams {
        SolverParams { pump, ..self.clone() }
    }

    pub fn with_dt(&self, dt: f64) -> SolverParams {
        SolverParams { dt, ..self.clone() }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> SolverParams {
        SolverParams { scheme, ..self.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: SpectralField,
}

/// Sampled solution; time stamps are strictly monotone (increasing for
/// forward runs, decreasing for backward ones).
#[derive(Clone, Debug)]
pub struct Trajectory {
    samples: Vec<TrajectorySample>,
    params: Arc<SolverParams>,
}

impl Trajectory {
    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn params(&self) -> &Arc<SolverParams> {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory is never empty")
    }
}

/// `ċ = −iΛc − γc − i(P f(ψ) + p(t))`.
pub fn rhs(state: &SpectralField, t: f64, params: &SolverParams) -> SpectralField {
    let mut stepper = Stepper::new(params, state.domain());
    let mut out = Array2::zeros(state.coeffs().dim());
    stepper.rhs_into(state.coeffs(), t, &mut out);
    SpectralField::from_coeffs(state.domain(), out).expect("shape matches domain")
}

/// One Strang step of size `params.dt` starting at time `t`.
pub fn step_strang(state: &SpectralField, t: f64, params: &SolverParams) -> Result<SpectralField> {
    step_with(state, t, params.dt, params, Scheme::StrangSplit)
}

/// One classical RK4 step of size `params.dt` starting at time `t`.
pub fn step_rk4(state: &SpectralField, t: f64, params: &SolverParams) -> Result<SpectralField> {
    step_with(state, t, params.dt, params, Scheme::Rk4Reference)
}

fn step_with(state: &SpectralField, t: f64, h: f64, params: &SolverParams, scheme: Scheme) -> Result<SpectralField> {
    check_domains(state, params)?;
    let mut stepper = Stepper::new(params, state.domain());
    let mut c = state.coeffs().clone();
    stepper.step(&mut c, t, h, scheme)?;
    Ok(SpectralField::from_coeffs(state.domain(), c).expect("shape matches domain"))
}

fn check_domains(state: &SpectralField, params: &SolverParams) -> Result<()> {
    if !state.domain().same_as(params.domain()) {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Integrates from `t0` to `t1` with steps of `params.dt` (the last one
/// shortened to land on `t1`), recording the initial state, every
/// `sample_every`-th step and the final state.
///
/// `t1 < t0` runs the equation backwards in time; damping then acts as
/// exponential growth.
pub fn evolve(
    state0: &SpectralField,
    t0: f64,
    t1: f64,
    params: &Arc<SolverParams>,
    sample_every: usize,
) -> Result<Trajectory> {
    check_domains(state0, params)?;
    if !(t0.is_finite() && t1.is_finite()) || t1 == t0 {
        return Err(Error::InvalidArgument(format!(
            "integration interval must be nonempty, got [{t0}, {t1}]"
        )));
    }
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
    }
    let domain = Arc::clone(state0.domain());
    let dir = (t1 - t0).signum();
    let dt = params.dt;
    let steps = (((t1 - t0).abs() / dt) - 1e-9).ceil().max(1.0) as usize;

    let mut stepper = Stepper::new(params, &domain);
    let mut c = state0.coeffs().clone();
    let mut samples = vec![TrajectorySample {
        t: t0,
        state: state0.clone(),
    }];

    for n in 0..steps {
        let t = t0 + dir * n as f64 * dt;
        let (h, t_next) = if n + 1 == steps {
            (t1 - t, t1)
        } else {
            (dir * dt, t0 + dir * (n + 1) as f64 * dt)
        };
        let blow_up = |reason: String| Error::BlowUp {
            t: t_next,
            step: n + 1,
            sample: samples_len_hint(n + 1, sample_every),
            reason,
        };
        stepper.step(&mut c, t, h, params.scheme).map_err(|e| match e {
            Error::BlowUp { reason, .. } => blow_up(reason),
            other => other,
        })?;
        let finite = c.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(blow_up("nonfinite coefficients".into()));
        }
        let e_norm = Zip::from(&c)
            .and(domain.eigenvalues())
            .fold(0.0, |acc, z, &lam| acc + lam * z.norm_sqr())
            .sqrt();
        if e_norm > BLOW_UP_E_NORM {
            return Err(blow_up(format!(
                "energy norm {e_norm:e} exceeds guard {BLOW_UP_E_NORM:e}"
            )));
        }
        if (n + 1) % sample_every == 0 || n + 1 == steps {
            samples.push(TrajectorySample {
                t: t_next,
                state: SpectralField::from_coeffs(&domain, c.clone()).expect("shape matches domain"),
            });
        }
    }

    Ok(Trajectory {
        samples,
        params: Arc::clone(params),
    })
}

/// Index the next recorded sample row would get after `step` steps.
fn samples_len_hint(step: usize, sample_every: usize) -> usize {
    step / sample_every + 1
}

/// `φ₁(w) = (e^w − 1)/w`, accurate near zero.
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // Taylor series; 18 terms reach round-off for |w| < 0.5
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..=18 {
            term = term * w / n as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// Exact linear/damping/pump propagator for one step size.
struct LinearPropagator {
    h: f64,
    decay: Array2<Complex64>,
    /// Per pump mode: `∫₀^h e^{μ(h−s)}(−i)q e^{iωs} ds`, to be multiplied by
    /// the pump phase factor at the start of the step.
    forcing: Vec<Array2<Complex64>>,
}

impl LinearPropagator {
    fn new(params: &SolverParams, domain: &DomainSpec, h: f64) -> Self {
        let shift = 2.0 * params.potential.a1;
        let gamma = params.gamma;
        let rate = |lam: f64| Complex64::new(-gamma, -(lam + shift));
        let decay = domain.eigenvalues().mapv(|lam| (rate(lam) * h).exp());
        let forcing = params
            .pump
            .modes()
            .iter()
            .map(|m| {
                let mut f = Array2::zeros((domain.mx(), domain.my()));
                Zip::from(&mut f)
                    .and(m.profile.coeffs())
                    .and(domain.eigenvalues())
                    .for_each(|f, &q, &lam| {
                        let mu = rate(lam);
                        let z = Complex64::new(0.0, m.omega) - mu;
                        *f = -I * q * (mu * h).exp() * h * phi1(z * h);
                    });
                f
            })
            .collect();
        LinearPropagator { h, decay, forcing }
    }

    fn apply(&self, c: &mut Array2<Complex64>, t: f64, pump: &QuasiPeriodicPump) {
        Zip::from(&mut *c).and(&self.decay).for_each(|c, &d| *c *= d);
        for (forcing, mode) in self.forcing.iter().zip(pump.modes()) {
            let phase = mode.factor(t);
            Zip::from(&mut *c).and(forcing).for_each(|c, &f| *c += f * phase);
        }
    }
}

struct Stepper<'a> {
    params: &'a SolverParams,
    domain: Arc<DomainSpec>,
    ws: QuadratureWorkspace,
    nonlinear: Array2<Complex64>,
    mid: Array2<Complex64>,
    propagator: Option<LinearPropagator>,
    rk: [Array2<Complex64>; 5],
}

impl<'a> Stepper<'a> {
    fn new(params: &'a SolverParams, domain: &Arc<DomainSpec>) -> Self {
        let shape = (domain.mx(), domain.my());
        Stepper {
            params,
            domain: Arc::clone(domain),
            ws: QuadratureWorkspace::new(domain),
            nonlinear: Array2::zeros(shape),
            mid: Array2::zeros(shape),
            propagator: None,
            rk: std::array::from_fn(|_| Array2::zeros(shape)),
        }
    }

    fn step(&mut self, c: &mut Array2<Complex64>, t: f64, h: f64, scheme: Scheme) -> Result<()> {
        match scheme {
            Scheme::StrangSplit => {
                self.nonlinear_substep(c, 0.5 * h, 0)?;
                self.linear_substep(c, t, h);
                self.nonlinear_substep(c, 0.5 * h, 0)?;
            }
            Scheme::Rk4Reference => self.rk4(c, t, h),
        }
        Ok(())
    }

    fn linear_substep(&mut self, c: &mut Array2<Complex64>, t: f64, h: f64) {
        let stale = self.propagator.as_ref().is_none_or(|p| p.h != h);
        if stale {
            self.propagator = Some(LinearPropagator::new(self.params, &self.domain, h));
        }
        self.propagator
            .as_ref()
            .expect("propagator just built")
            .apply(c, t, &self.params.pump);
    }

    /// Implicit midpoint for `i·ċ = P[4a₂|ψ|²ψ]`, subdividing when the
    /// fixed-point iteration does not contract.
    fn nonlinear_substep(&mut self, c: &mut Array2<Complex64>, h: f64, depth: u32) -> Result<()> {
        let a2 = self.params.potential.a2;
        if a2 == 0.0 {
            return Ok(());
        }
        let norm0: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if norm0 == 0.0 {
            return Ok(());
        }
        if self.midpoint(c, h) {
            let norm1: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let fix = (norm0 / norm1).sqrt();
            c.mapv_inplace(|z| z * fix);
            return Ok(());
        }
        if depth >= MAX_SUBDIVISION_DEPTH {
            return Err(Error::BlowUp {
                t: f64::NAN,
                step: 0,
                sample: 0,
                reason: "nonlinear substep failed to converge".into(),
            });
        }
        self.nonlinear_substep(c, 0.5 * h, depth + 1)?;
        self.nonlinear_substep(c, 0.5 * h, depth + 1)
    }

    /// Solves `m = c − i(h/2)·P N(m)` by fixed-point iteration and sets
    /// `c ← 2m − c`. Leaves `c` untouched and returns false on failure.
    fn midpoint(&mut self, c: &mut Array2<Complex64>, h: f64) -> bool {
        let a2 = self.params.potential.a2;
        let coef = -I * (0.5 * h);
        self.mid.assign(c);
        let mut prev_delta = f64::INFINITY;
        for iter in 0..MIDPOINT_MAX_ITER {
            self.ws
                .project_radial(&self.domain, self.mid.view(), |s| 4.0 * a2 * s, &mut self.nonlinear);
            let mut delta = 0.0;
            let mut size = 0.0;
            Zip::from(&mut self.mid)
                .and(&*c)
                .and(&self.nonlinear)
                .for_each(|m, &c0, &n| {
                    let next = c0 + coef * n;
                    delta += (next - *m).norm_sqr();
                    size += next.norm_sqr();
                    *m = next;
                });
            let (delta, size) = (delta.sqrt(), size.sqrt());
            if !delta.is_finite() {
                return false;
            }
            if delta <= MIDPOINT_TOL * size {
                Zip::from(&mut *c).and(&self.mid).for_each(|c, &m| *c = 2.0 * m - *c);
                return true;
            }
            if iter >= 2 && delta > 0.8 * prev_delta {
                return false;
            }
            prev_delta = delta;
        }
        false
    }

    fn rhs_into(&mut self, c: &Array2<Complex64>, t: f64, out: &mut Array2<Complex64>) {
        let p = self.params.potential;
        self.ws
            .project_radial(&self.domain, c.view(), |s| p.radial_factor(s), out);
        let gamma = self.params.gamma;
        Zip::from(&mut *out)
            .and(c)
            .and(self.domain.eigenvalues())
            .for_each(|o, &c, &lam| {
                *o = -I * (*o + c * lam) - c * gamma;
            });
        for mode in self.params.pump.modes() {
            let phase = -I * mode.factor(t);
            Zip::from(&mut *out)
                .and(mode.profile.coeffs())
                .for_each(|o, &q| *o += phase * q);
        }
    }

    fn rk4(&mut self, c: &mut Array2<Complex64>, t: f64, h: f64) {
        let [mut k1, mut k2, mut k3, mut k4, mut tmp] =
            std::mem::replace(&mut self.rk, std::array::from_fn(|_| Array2::zeros((0, 0))));
        self.rhs_into(c, t, &mut k1);
        Zip::from(&mut tmp)
            .and(&*c)
            .and(&k1)
            .for_each(|o, &c, &k| *o = c + k * (0.5 * h));
        self.rhs_into(&tmp, t + 0.5 * h, &mut k2);
        Zip::from(&mut tmp)
            .and(&*c)
            .and(&k2)
            .for_each(|o, &c, &k| *o = c + k * (0.5 * h));
        self.rhs_into(&tmp, t + 0.5 * h, &mut k3);
        Zip::from(&mut tmp)
            .and(&*c)
            .and(&k3)
            .for_each(|o, &c, &k| *o = c + k * h);
        self.rhs_into(&tmp, t + h, &mut k4);
        Zip::from(&mut *c)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|c, &a, &b, &d, &e| *c += (a + 2.0 * b + 2.0 * d + e) * (h / 6.0));
        self.rk = [k1, k2, k3, k4, tmp];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pumping::PumpMode;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_pi(m: usize) -> Arc<DomainSpec> {
        DomainSpec::build(PI, PI, 2 * m + 2, 2 * m + 2, m, m).unwrap()
    }

    #[test]
    fn phi1_series_and_direct_agree_at_switch() {
        let w = c(0.3, 0.39);
        let direct = (w.exp() - 1.0) / w;
        assert!((phi1(w) - direct).norm() < 1e-15);
        assert_eq!(phi1(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn rhs_linear_single_mode() {
        let d = unit_pi(3);
        let params = SolverParams::new(
            0.0,
            QuarticPotential::linear(0.0, 0.0),
            QuasiPeriodicPump::zero(&d),
            0.01,
            Scheme::StrangSplit,
        )
        .unwrap();
        let s = SpectralField::single_mode(&d, 2, 1, c(0.7, -0.2)).unwrap();
        let r = rhs(&s, 0.3, &params);
        assert!((r.get(2, 1) - (-I * 5.0 * c(0.7, -0.2))).norm() < 1e-14);
    }

    #[test]
    fn rhs_of_zero_state_is_pump() {
        let d = unit_pi(3);
        let q = SpectralField::single_mode(&d, 1, 2, c(0.5, 0.1)).unwrap();
        let pump = QuasiPeriodicPump::new(
            &d,
            vec![PumpMode {
                profile: q.clone(),
                omega: 1.7,
                phase: 0.0,
            }],
        )
        .unwrap();
        let params = SolverParams::new(
            0.3,
            QuarticPotential::new(1.0, 0.5, 0.0).unwrap(),
            pump,
            0.01,
            Scheme::StrangSplit,
        )
        .unwrap();
        let t = 0.9;
        let r = rhs(&SpectralField::zeros(&d), t, &params);
        let expected = -I * c(0.5, 0.1) * Complex64::from_polar(1.0, 1.7 * t);
        assert!((r.get(1, 2) - expected).norm() < 1e-15);
    }

    #[test]
    fn pure_linear_step_is_exact_decay() {
        let d = unit_pi(3);
        let gamma = 0.4;
        let params = SolverParams::new(
            gamma,
            QuarticPotential::linear(0.0, 0.0),
            QuasiPeriodicPump::zero(&d),
            0.05,
            Scheme::StrangSplit,
        )
        .unwrap();
        let s = SpectralField::single_mode(&d, 2, 3, c(1.0, 0.5)).unwrap();
        let next = step_strang(&s, 0.0, &params).unwrap();
        let expected = c(1.0, 0.5) * (c(-gamma, -13.0) * 0.05).exp();
        assert!((next.get(2, 3) - expected).norm() < 1e-15);
    }

    #[test]
    fn pump_integral_matches_quadrature() {
        // single mode, linear dynamics: compare with composite Simpson of
        // the variation-of-constants integral
        let d = unit_pi(2);
        let (gamma, omega, phase, t, h) = (0.3, 2.1, 0.4, 0.7, 0.25);
        let q = c(0.2, -0.6);
        let pump = QuasiPeriodicPump::new(
            &d,
            vec![PumpMode {
                profile: SpectralField::single_mode(&d, 1, 1, q).unwrap(),
                omega,
                phase,
            }],
        )
        .unwrap();
        let params =
            SolverParams::new(gamma, QuarticPotential::linear(0.0, 0.0), pump, h, Scheme::StrangSplit).unwrap();
        let out = step_strang(&SpectralField::zeros(&d), t, &params).unwrap();
        let mu = c(-gamma, -2.0);
        let integrand = |s: f64| (mu * (h - s)).exp() * (-I) * q * Complex64::from_polar(1.0, omega * (t + s) + phase);
        let n = 2000;
        let dx = h / n as f64;
        let mut acc = integrand(0.0) + integrand(h);
        for i in 1..n {
            acc += integrand(i as f64 * dx) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let simpson = acc * dx / 3.0;
        assert!((out.get(1, 1) - simpson).norm() < 1e-12);
    }

    #[test]
    fn nonlinear_substep_preserves_modulus() {
        // λ ignored: zero-length linear part, no damping, no pump
        let d = unit_pi(1);
        let params = SolverParams::new(
            0.0,
            QuarticPotential::new(1.0, 0.0, 0.0).unwrap(),
            QuasiPeriodicPump::zero(&d),
            0.1,
            Scheme::StrangSplit,
        )
        .unwrap();
        let mut stepper = Stepper::new(&params, &d);
        let mut coeffs = Array2::from_elem((1, 1), c(0.8, 0.6));
        for _ in 0..100 {
            stepper.nonlinear_substep(&mut coeffs, 0.1, 0).unwrap();
        }
        assert_relative_eq!(coeffs[[0, 0]].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn backward_then_forward_returns_linear_state() {
        let d = unit_pi(3);
        let params = Arc::new(
            SolverParams::new(
                0.2,
                QuarticPotential::linear(0.3, 0.0),
                QuasiPeriodicPump::autonomous(SpectralField::single_mode(&d, 1, 1, c(0.3, 0.0)).unwrap()),
                0.05,
                Scheme::StrangSplit,
            )
            .unwrap(),
        );
        let s = SpectralField::from_sparse(&d, &[(1, 1, c(1.0, 0.0)), (3, 2, c(0.0, 0.4))]).unwrap();
        let back = evolve(&s, 0.0, -2.0, &params, 10).unwrap();
        assert_eq!(back.last().t, -2.0);
        let fwd = evolve(&back.last().state, -2.0, 0.0, &params, 10).unwrap();
        let diff = &fwd.last().state - &s;
        assert!(diff.l2_norm() < 1e-12);
    }

    #[test]
    fn evolve_sampling_and_partial_last_step() {
        let d = unit_pi(2);
        let params = Arc::new(
            SolverParams::new(
                0.1,
                QuarticPotential::new(1.0, 0.0, 0.0).unwrap(),
                QuasiPeriodicPump::zero(&d),
                0.1,
                Scheme::StrangSplit,
            )
            .unwrap(),
        );
        let s = SpectralField::single_mode(&d, 1, 1, c(0.5, 0.0)).unwrap();
        let traj = evolve(&s, 0.0, 1.05, &params, 5).unwrap();
        let times = traj.times();
        assert_eq!(times.len(), 4);
        assert_relative_eq!(times[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(times[2], 1.0, epsilon = 1e-15);
        assert_eq!(times[3], 1.05);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn evolve_rejects_bad_arguments() {
        let d = unit_pi(2);
        let params = Arc::new(
            SolverParams::new(
                0.1,
                QuarticPotential::new(1.0, 0.0, 0.0).unwrap(),
                QuasiPeriodicPump::zero(&d),
                0.1,
                Scheme::StrangSplit,
            )
            .unwrap(),
        );
        let s = SpectralField::zeros(&d);
        assert!(evolve(&s, 1.0, 1.0, &params, 1).is_err());
        assert!(evolve(&s, 0.0, 1.0, &params, 0).is_err());
        let other = SpectralField::zeros(&unit_pi(3));
        assert_eq!(evolve(&other, 0.0, 1.0, &params, 1).unwrap_err(), Error::DomainMismatch);
        assert!(SolverParams::new(
            0.1,
            QuarticPotential::new(1.0, 0.0, 0.0).unwrap(),
            QuasiPeriodicPump::zero(&d),
            0.0,
            Scheme::StrangSplit
        )
        .is_err());
    }

    #[test]
    fn zero_state_stays_zero() {
        let d = unit_pi(4);
        let params = Arc::new(
            SolverParams::new(
                0.5,
                QuarticPotential::new(1.0, 0.2, 0.0).unwrap(),
                QuasiPeriodicPump::zero(&d),
                0.02,
                Scheme::StrangSplit,
            )
            .unwrap(),
        );
        let traj = evolve(&SpectralField::zeros(&d), 0.0, 1.0, &params, 10).unwrap();
        assert!(traj.samples().iter().all(|s| s.state.norm_sqr() == 0.0));
    }
}
