//! Energy functionals, energy-balance residuals and a priori decay envelopes.
//!
//! With `K = ½‖∇ψ‖²`, `𝒰 = ∫U(ψ)` and `⟨·,·⟩` the real `L²` pairing:
//!
//! ```text
//! 𝓗(ψ)   = K + 𝒰
//! Φ(ψ,t) = 𝓗(ψ) + ⟨p(t),ψ⟩
//! Ψ(ψ,t) = 𝒰 − ½⟨f(ψ),ψ⟩ + ½⟨p(t),ψ⟩
//!
//! d𝓗/dt = ⟨−Δψ + f(ψ), −γψ − ip⟩
//! dΦ/dt = −2γΦ + 2γΨ + ⟨ṗ,ψ⟩
//! ```
//!
//! Both identities hold exactly for the Galerkin system because `p(t)` lies
//! in the retained span, so `⟨P f, v⟩ = ⟨f, v⟩` for every `v` that appears.
//! Residuals are reported in differential form (three-point finite
//! differences of the sampled functionals) and in integrated form
//! (composite trapezoid); both are second order in the time step when the
//! sampling interval is a fixed number of steps.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{evolve, SolverParams, Trajectory};
use crate::nonlinearity::{
    condition_constants, potential_energy, potential_energy_with, QuadratureWorkspace, QuarticPotential,
};
use crate::pumping::QuasiPeriodicPump;
use crate::spectral::SpectralField;
use std::sync::Arc;

/// One row of the diagnostics time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub l2: f64,
    pub e_norm: f64,
    pub kinetic: f64,
    pub u: f64,
    pub h: f64,
    pub phi: f64,
    pub psi: f64,
    pub balance_residual: f64,
    pub phi_residual: f64,
}

/// `½‖∇ψ‖²`.
pub fn kinetic_energy(f: &SpectralField) -> f64 {
    let e = f.e_norm();
    0.5 * e * e
}

/// `𝓗(ψ) = ½‖∇ψ‖² + 𝒰(ψ)`.
pub fn hamiltonian(f: &SpectralField, potential: &QuarticPotential) -> f64 {
    kinetic_energy(f) + potential_energy(f, potential)
}

/// `Φ(ψ,t) = 𝓗(ψ) + ⟨p(t),ψ⟩`.
pub fn phi_functional(
    f: &SpectralField,
    t: f64,
    potential: &QuarticPotential,
    pump: &QuasiPeriodicPump,
) -> Result<f64> {
    let mut ev = Evaluator::new(f);
    let v = ev.values(f, t, 0.0, potential, pump)?;
    Ok(v.phi)
}

/// `Ψ(ψ,t) = 𝒰(ψ) − ½⟨f(ψ),ψ⟩ + ½⟨p(t),ψ⟩`.
pub fn psi_functional(
    f: &SpectralField,
    t: f64,
    potential: &QuarticPotential,
    pump: &QuasiPeriodicPump,
) -> Result<f64> {
    let mut ev = Evaluator::new(f);
    let v = ev.values(f, t, 0.0, potential, pump)?;
    Ok(v.psi)
}

/// Right side of the energy equation, `⟨−Δψ + f(ψ), −γψ − ip(t)⟩`.
pub fn energy_rate(f: &SpectralField, t: f64, params: &SolverParams) -> Result<f64> {
    let mut ev = Evaluator::new(f);
    let v = ev.values(f, t, params.gamma, &params.potential, &params.pump)?;
    Ok(v.h_rate)
}

/// Everything the residuals need at one state.
#[derive(Clone, Copy, Debug)]
struct Functionals {
    l2: f64,
    e_norm: f64,
    kinetic: f64,
    u: f64,
    h: f64,
    phi: f64,
    psi: f64,
    /// `⟨−Δψ + f, −γψ − ip⟩`
    h_rate: f64,
    /// `⟨−Δψ, ip⟩ = ⟨∇ψ, i∇p⟩`
    grad_pump: f64,
    /// `⟨f, γψ + ip⟩`
    f_drive: f64,
    /// `2γΨ + ⟨ṗ,ψ⟩`
    phi_source: f64,
}

struct Evaluator {
    ws: QuadratureWorkspace,
    nl: Array2<Complex64>,
}

impl Evaluator {
    fn new(f: &SpectralField) -> Self {
        let d = f.domain();
        Evaluator {
            ws: QuadratureWorkspace::new(d),
            nl: Array2::zeros((d.mx(), d.my())),
        }
    }

    fn values(
        &mut self,
        f: &SpectralField,
        t: f64,
        gamma: f64,
        potential: &QuarticPotential,
        pump: &QuasiPeriodicPump,
    ) -> Result<Functionals> {
        if !f.domain().same_as(pump.domain()) {
            return Err(Error::DomainMismatch);
        }
        let d = f.domain();
        let p = pump.eval(t);
        let p_dot = pump.derivative(t);
        let u = potential_energy_with(&mut self.ws, f, potential);
        self.ws
            .project_radial(d, f.coeffs().view(), |s| potential.radial_factor(s), &mut self.nl);

        let mut pairing_f = 0.0; // ⟨Pf, ψ⟩
        let mut f_ip = 0.0; // ⟨Pf, ip⟩
        let mut lap_ip = 0.0; // ⟨Λc, ip⟩
        let mut lap_c = 0.0; // ⟨Λc, c⟩
        let mut l2 = 0.0;
        Zip::from(f.coeffs())
            .and(&self.nl)
            .and(p.coeffs())
            .and(d.eigenvalues())
            .for_each(|&c, &n, &q, &lam| {
                let iq = Complex64::new(-q.im, q.re);
                pairing_f += (n * c.conj()).re;
                f_ip += (n * iq.conj()).re;
                lap_ip += lam * (c * iq.conj()).re;
                lap_c += lam * c.norm_sqr();
                l2 += c.norm_sqr();
            });
        let p_psi = p.inner_real_unchecked(f);
        let p_dot_psi = p_dot.inner_real_unchecked(f);
        let kinetic = 0.5 * lap_c;
        let h = kinetic + u;
        let psi = u - 0.5 * pairing_f + 0.5 * p_psi;
        Ok(Functionals {
            l2: l2.sqrt(),
            e_norm: lap_c.sqrt(),
            kinetic,
            u,
            h,
            phi: h + p_psi,
            psi,
            h_rate: -gamma * (lap_c + pairing_f) - lap_ip - f_ip,
            grad_pump: lap_ip,
            f_drive: gamma * pairing_f + f_ip,
            phi_source: 2.0 * gamma * psi + p_dot_psi,
        })
    }
}

fn trajectory_functionals(traj: &Trajectory, window: Option<(f64, f64)>) -> Result<(Vec<f64>, Vec<Functionals>)> {
    let params = traj.params();
    let first = &traj.first().state;
    let mut ev = Evaluator::new(first);
    let (lo, hi) = match window {
        Some((a, b)) => (a.min(b), a.max(b)),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let mut times = Vec::new();
    let mut values = Vec::new();
    for s in traj.samples().iter().filter(|s| s.t >= lo && s.t <= hi) {
        times.push(s.t);
        values.push(ev.values(&s.state, s.t, params.gamma, &params.potential, &params.pump)?);
    }
    Ok((times, values))
}

/// Derivative at `x` of the quadratic through three points.
fn lagrange_derivative(x: f64, xs: [f64; 3], ys: [f64; 3]) -> f64 {
    let [x0, x1, x2] = xs;
    let l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    let l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    let l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    l0 * ys[0] + l1 * ys[1] + l2 * ys[2]
}

/// Second-order derivative estimates on a (possibly nonuniform) grid:
/// centered three-point stencils inside, one-sided ones at the ends.
pub fn sampled_derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 3 || y.len() != n {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: n.min(y.len()),
        });
    }
    Ok((0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            lagrange_derivative(t[i], [t[c - 1], t[c], t[c + 1]], [y[c - 1], y[c], y[c + 1]])
        })
        .collect())
}

/// Running composite trapezoid `∫_{t₀}^{tᵢ} g`.
pub fn cumulative_trapezoid(t: &[f64], g: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (g[i] + g[i - 1]) * (t[i] - t[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Residual series of an identity, per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    /// Finite-difference derivative minus the right side.
    pub differential: Vec<f64>,
    /// Integrated identity, left minus right side, from the first sample.
    pub integral: Vec<f64>,
}

/// Residuals of the energy equation along `traj`, optionally restricted to
/// samples with `t` in `window`.
///
/// The integrated form is
/// `½[e^{2γs}‖∇ψ‖²]₀ᵗ = −[e^{2γs}𝒰]₀ᵗ + ∫₀ᵗ e^{2γs}(2γ𝒰 − ⟨f, γψ + ip⟩ − ⟨∇ψ, i∇p⟩) ds`
/// with `s` measured from the first sample.
pub fn balance_residual(traj: &Trajectory, window: Option<(f64, f64)>) -> Result<ResidualSeries> {
    let (t, v) = trajectory_functionals(traj, window)?;
    balance_from(&t, &v, traj.params().gamma)
}

fn balance_from(t: &[f64], v: &[Functionals], gamma: f64) -> Result<ResidualSeries> {
    let h: Vec<f64> = v.iter().map(|x| x.h).collect();
    let dh = sampled_derivative(t, &h)?;
    let differential = dh.iter().zip(v).map(|(d, x)| d - x.h_rate).collect();

    let t0 = t[0];
    let w: Vec<f64> = t.iter().map(|&s| (2.0 * gamma * (s - t0)).exp()).collect();
    let g: Vec<f64> = v
        .iter()
        .zip(&w)
        .map(|(x, w)| w * (2.0 * gamma * x.u - x.f_drive - x.grad_pump))
        .collect();
    let acc = cumulative_trapezoid(t, &g);
    let integral = (0..t.len())
        .map(|i| {
            let lhs = w[i] * v[i].kinetic - v[0].kinetic;
            let rhs = -(w[i] * v[i].u - v[0].u) + acc[i];
            lhs - rhs
        })
        .collect();
    Ok(ResidualSeries {
        times: t.to_vec(),
        differential,
        integral,
    })
}

/// Residuals of `dΦ/dt = −2γΦ + 2γΨ + ⟨ṗ,ψ⟩` and of its integrated form
/// `Φ(t) = e^{−2γ(t−t₀)}Φ(t₀) + ∫ e^{−2γ(t−s)}(2γΨ + ⟨ṗ,ψ⟩) ds`.
pub fn phi_ode_residual(traj: &Trajectory) -> Result<ResidualSeries> {
    let (t, v) = trajectory_functionals(traj, None)?;
    phi_from(&t, &v, traj.params().gamma)
}

fn phi_from(t: &[f64], v: &[Functionals], gamma: f64) -> Result<ResidualSeries> {
    let phi: Vec<f64> = v.iter().map(|x| x.phi).collect();
    let dphi = sampled_derivative(t, &phi)?;
    let differential = dphi
        .iter()
        .zip(v)
        .map(|(d, x)| d - (-2.0 * gamma * x.phi + x.phi_source))
        .collect();

    let t0 = t[0];
    let g: Vec<f64> = t
        .iter()
        .zip(v)
        .map(|(&s, x)| (2.0 * gamma * (s - t0)).exp() * x.phi_source)
        .collect();
    let acc = cumulative_trapezoid(t, &g);
    let integral = (0..t.len())
        .map(|i| {
            let decay = (-2.0 * gamma * (t[i] - t0)).exp();
            v[i].phi - decay * (v[0].phi + acc[i])
        })
        .collect();
    Ok(ResidualSeries {
        times: t.to_vec(),
        differential,
        integral,
    })
}

/// Diagnostics rows for every sample; the residual columns hold the
/// differential residuals of the energy and Φ equations (NaN when the
/// trajectory has fewer than three samples).
pub fn energy_samples(traj: &Trajectory) -> Result<Vec<EnergySample>> {
    let (t, v) = trajectory_functionals(traj, None)?;
    let gamma = traj.params().gamma;
    let (bal, phi) = if t.len() >= 3 {
        (
            balance_from(&t, &v, gamma)?.differential,
            phi_from(&t, &v, gamma)?.differential,
        )
    } else {
        (vec![f64::NAN; t.len()], vec![f64::NAN; t.len()])
    };
    Ok(t.iter()
        .zip(&v)
        .zip(bal.iter().zip(&phi))
        .map(|((&t, x), (&b, &r))| EnergySample {
            t,
            l2: x.l2,
            e_norm: x.e_norm,
            kinetic: x.kinetic,
            u: x.u,
            h: x.h,
            phi: x.phi,
            psi: x.psi,
            balance_residual: b,
            phi_residual: r,
        })
        .collect())
}

/// Median of `|r_coarse(t)| / |r_fine(t)|` over the sample times both runs
/// share. Pairs where either residual vanishes exactly are skipped.
pub fn refinement_ratio(coarse_t: &[f64], coarse_r: &[f64], fine_t: &[f64], fine_r: &[f64]) -> Result<f64> {
    let mut ratios = Vec::new();
    let dir = match (fine_t.first(), fine_t.last()) {
        (Some(a), Some(b)) => (b - a).signum(),
        _ => 1.0,
    };
    let mut j = 0;
    for (&tc, &rc) in coarse_t.iter().zip(coarse_r) {
        let tol = 1e-9 * (1.0 + tc.abs());
        // advance past fine samples that lie strictly before tc
        while j < fine_t.len() && (tc - fine_t[j]) * dir > tol {
            j += 1;
        }
        if j < fine_t.len() && (fine_t[j] - tc).abs() <= tol {
            let rf = fine_r[j];
            if rc != 0.0 && rf != 0.0 {
                ratios.push((rc / rf).abs());
            }
        }
    }
    if ratios.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(median(&mut ratios))
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Refinement ratios of all four residual series under `dt → dt/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementReport {
    pub dt: f64,
    pub balance_differential: f64,
    pub balance_integral: f64,
    pub phi_differential: f64,
    pub phi_integral: f64,
}

impl RefinementReport {
    pub fn ratios(&self) -> [(&'static str, f64); 4] {
        [
            ("balance_differential", self.balance_differential),
            ("balance_integral", self.balance_integral),
            ("phi_differential", self.phi_differential),
            ("phi_integral", self.phi_integral),
        ]
    }

    pub fn all_within(&self, lo: f64, hi: f64) -> bool {
        self.ratios().iter().all(|(_, r)| (lo..=hi).contains(r))
    }
}

/// Runs `params.dt` and `params.dt/2` with the same `sample_every`, so the
/// sampling interval halves as well, and compares residuals at shared times.
pub fn residual_refinement(
    ic: &SpectralField,
    t0: f64,
    t1: f64,
    params: &SolverParams,
    sample_every: usize,
) -> Result<RefinementReport> {
    let coarse = evolve(ic, t0, t1, &Arc::new(params.clone()), sample_every)?;
    let fine = evolve(ic, t0, t1, &Arc::new(params.with_dt(0.5 * params.dt)), sample_every)?;
    refinement_from(&coarse, &fine)
}

/// Refinement ratios between two runs of the same problem; `fine` should
/// use half the step of `coarse` and the same `sample_every`.
pub fn refinement_from(coarse: &Trajectory, fine: &Trajectory) -> Result<RefinementReport> {
    let (bc, bf) = (balance_residual(coarse, None)?, balance_residual(fine, None)?);
    let (pc, pf) = (phi_ode_residual(coarse)?, phi_ode_residual(fine)?);
    let ratio = |c: &ResidualSeries, f: &ResidualSeries, integral: bool| {
        if integral {
            refinement_ratio(&c.times, &c.integral, &f.times, &f.integral)
        } else {
            refinement_ratio(&c.times, &c.differential, &f.times, &f.differential)
        }
    };
    Ok(RefinementReport {
        dt: coarse.params().dt,
        balance_differential: ratio(&bc, &bf, false)?,
        balance_integral: ratio(&bc, &bf, true)?,
        phi_differential: ratio(&pc, &pf, false)?,
        phi_integral: ratio(&pc, &pf, true)?,
    })
}

/// `α₊ = (γ/2)·min(3, κ₂)`.
pub fn alpha_plus(gamma: f64, kappa2: f64) -> f64 {
    0.5 * gamma * kappa2.min(3.0)
}

/// A priori bounds `𝓗(t) ≤ 𝓗(0)e^{−α₊t} + D` and
/// `‖ψ(t)‖²_E ≤ C₀e^{−α₊t} + D₀` for the forward flow.
///
/// `D = C₁/α₊` where `𝓗̇ ≤ −α₊𝓗 + C₁`; `C₁` is obtained by tracing the
/// differential inequality with the structure constants of the potential:
///
/// * `−γ‖∇ψ‖² − ⟨∇ψ, i∇p⟩ ≤ −(3γ/4)‖∇ψ‖² + p₀²/γ`, with `p₀ = sup‖∇p‖`;
/// * `−γ⟨f,ψ⟩ ≤ −γκ₂𝒰 + γb₂|Ω|`;
/// * `|⟨f, ip⟩| ≤ κ₃|Ω|^{½}‖p‖ + ε‖ψ‖⁴_{L⁴} + C_ε‖p‖⁴_{L⁴}` (Young with
///   exponents 4/3 and 4, `ε = γκ₁κ₂/2`, `C_ε = (κ₃/4)(4ε/3κ₃)^{−3}`);
/// * `−(γκ₂/2)𝒰 + ε‖ψ‖⁴_{L⁴} ≤ (γκ₂/2)b₁|Ω|`, and the leftover
///   `−(γκ₂/2 − α₊)𝒰 ≤ (γκ₂/2 − α₊)·max(0,b₁)|Ω|`.
///
/// `C₀ = 2·max(𝓗(0), 0)` and `D₀ = 2(D + max(0,b₁)|Ω|)` follow from
/// `‖ψ‖²_E = 2(𝓗 − 𝒰)` and `𝒰 ≥ −b₁|Ω|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayEnvelope {
    pub alpha_plus: f64,
    /// Backward growth rate, filled in by [`fit_backward_rate`] when measured.
    pub alpha_minus: Option<f64>,
    pub c0: f64,
    pub d0: f64,
    /// Hamiltonian-level constant `D`.
    pub d: f64,
    /// Constant of the differential inequality, `D = C₁/α₊`.
    pub c1: f64,
    /// `𝓗(0)` of the trajectory the envelope was calibrated for.
    pub h0: f64,
    /// `p₀ = sup_t ‖p(t)‖_E` (upper bound).
    pub p0: f64,
}

impl DecayEnvelope {
    pub fn calibrate(gamma: f64, potential: &QuarticPotential, pump: &QuasiPeriodicPump, h0: f64) -> Result<Self> {
        let k = condition_constants(potential)?;
        let a = alpha_plus(gamma, k.kappa2);
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "decay envelope needs gamma>0 and kappa2>0, got gamma={gamma}"
            )));
        }
        let area = pump.domain().area();
        let p0 = pump.sup_norm();
        let l2 = pump.l2_bound();
        let l4 = pump.l4_bound();
        let eps = 0.5 * gamma * k.kappa1 * k.kappa2;
        let eta = 4.0 * eps / (3.0 * k.kappa3);
        let c_eps = 0.25 * k.kappa3 / eta.powi(3);
        let b1_pos = k.b1.max(0.0);
        let mut c1 = gamma * k.b2 * area
            + p0 * p0 / gamma
            + k.kappa3 * area.sqrt() * l2
            + 0.5 * gamma * k.kappa2 * k.b1 * area
            + c_eps * l4.powi(4);
        let leftover = 0.5 * gamma * k.kappa2 - a;
        if leftover > 0.0 {
            c1 += leftover * b1_pos * area;
        }
        let d = (c1 / a).max(0.0);
        Ok(DecayEnvelope {
            alpha_plus: a,
            alpha_minus: None,
            c0: 2.0 * h0.max(0.0),
            d0: 2.0 * (d + b1_pos * area),
            d,
            c1,
            h0,
            p0,
        })
    }

    /// `𝓗(0)e^{−α₊s} + D`, `s` the time elapsed since the initial sample.
    pub fn hamiltonian_bound(&self, elapsed: f64) -> f64 {
        self.h0 * (-self.alpha_plus * elapsed).exp() + self.d
    }

    /// `C₀e^{−α₊s} + D₀`.
    pub fn e_norm_sqr_bound(&self, elapsed: f64) -> f64 {
        self.c0 * (-self.alpha_plus * elapsed).exp() + self.d0
    }

    /// Radius `√(D₀ + 1)` of the absorbing ball in the energy norm.
    pub fn absorbing_radius(&self) -> f64 {
        (self.d0 + 1.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeReport {
    pub samples: usize,
    /// Samples with `𝓗(t) > 𝓗(0)e^{−α₊t} + D`.
    pub violations: usize,
    /// `min_t [bound − 𝓗(t)]`; negative iff there is a violation.
    pub margin: f64,
    /// Same check for `‖ψ‖²_E ≤ C₀e^{−α₊t} + D₀`.
    pub e_norm_violations: usize,
    /// Smallest `D` making the Hamiltonian envelope hold at every sample.
    pub empirical_d: f64,
}

/// Checks the forward envelope at every sample of `traj`; elapsed time is
/// measured from the first sample.
pub fn envelope_check(traj: &Trajectory, env: &DecayEnvelope) -> Result<EnvelopeReport> {
    let (t, v) = trajectory_functionals(traj, None)?;
    let t0 = t[0];
    let mut violations = 0;
    let mut e_violations = 0;
    let mut margin = f64::INFINITY;
    let mut empirical_d = f64::NEG_INFINITY;
    for (&s, x) in t.iter().zip(&v) {
        let elapsed = s - t0;
        let gap = env.hamiltonian_bound(elapsed) - x.h;
        if gap < 0.0 {
            violations += 1;
        }
        margin = margin.min(gap);
        empirical_d = empirical_d.max(x.h - env.h0 * (-env.alpha_plus * elapsed).exp());
        if x.e_norm * x.e_norm > env.e_norm_sqr_bound(elapsed) {
            e_violations += 1;
        }
    }
    Ok(EnvelopeReport {
        samples: t.len(),
        violations,
        margin,
        e_norm_violations: e_violations,
        empirical_d,
    })
}

/// Growth envelope `𝓗(ψ(t)) ≤ 𝓗(0)e^{α₋|t−t₀|} + C` of a backward run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardFit {
    /// Smallest `α₋ ≥ 0` for which the envelope holds at every sample.
    pub alpha_minus: f64,
    pub c: f64,
    pub h0: f64,
    /// `max_t 𝓗(t)` along the run.
    pub h_max: f64,
    pub samples: usize,
}

impl BackwardFit {
    pub fn bound(&self, elapsed: f64) -> f64 {
        self.h0 * (self.alpha_minus * elapsed.abs()).exp() + self.c
    }
}

/// Fits `α₋` for a given additive constant `c ≥ 0`; needs `𝓗(0) > 0`.
pub fn fit_backward_rate(traj: &Trajectory, c: f64) -> Result<BackwardFit> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "envelope constant must be nonnegative, got {c}"
        )));
    }
    let (t, v) = trajectory_functionals(traj, None)?;
    let h0 = v[0].h;
    if !(h0 > 0.0) {
        return Err(Error::InvalidArgument(format!("growth fit needs H(0)>0, got {h0}")));
    }
    let mut alpha: f64 = 0.0;
    let mut h_max = f64::NEG_INFINITY;
    for (&s, x) in t.iter().zip(&v).skip(1) {
        h_max = h_max.max(x.h);
        let excess = x.h - c;
        if excess > h0 {
            alpha = alpha.max((excess / h0).ln() / (s - t[0]).abs());
        }
    }
    Ok(BackwardFit {
        alpha_minus: alpha,
        c,
        h0,
        h_max: h_max.max(h0),
        samples: t.len(),
    })
}
