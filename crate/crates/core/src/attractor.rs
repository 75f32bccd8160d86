//! Dissipativity and attractor studies: absorbing balls, pullback
//! ensembles, Galerkin convergence and continuous dependence on data.
//!
//! The solution operator `S(t, τ)` maps a state at time `τ` to time `t`
//! under the (time-dependent) pump. Every study is a set of independent
//! runs dispatched through an [`Execution`] policy; outputs are collected
//! in input order, so results do not depend on scheduling.

use std::sync::Arc;

use num_complex::Complex64;

use crate::energy::{envelope_check, hamiltonian, DecayEnvelope, EnvelopeReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integrator::{evolve, SolverParams, Trajectory};
use crate::nonlinearity::{apply_nonlinearity, weighted_difference_integral};
use crate::sampling::{gaussian_field, rng_from_seed};
use crate::spectral::{DomainSpec, SpectralField};

/// Ball `{‖ψ‖_E ≤ radius}` in the energy space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorbingBall {
    pub radius: f64,
}

impl AbsorbingBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(AbsorbingBall { radius })
    }

    /// `B̂` with radius `√(D₀ + 1)`.
    pub fn from_envelope(env: &DecayEnvelope) -> Self {
        AbsorbingBall {
            radius: env.absorbing_radius(),
        }
    }

    pub fn contains(&self, f: &SpectralField) -> bool {
        f.e_norm() <= self.radius
    }
}

/// First sample time from which every later sample lies in `ball`;
/// `None` if the last sample is outside.
pub fn absorbing_entry_time(traj: &Trajectory, ball: &AbsorbingBall) -> Option<f64> {
    let mut entry = None;
    for s in traj.samples() {
        if ball.contains(&s.state) {
            entry.get_or_insert(s.t);
        } else {
            entry = None;
        }
    }
    entry
}

/// One-sided Hausdorff distance `sup_{a∈A} inf_{b∈B} ‖a − b‖_E`.
pub fn hausdorff_e(a: &[SpectralField], b: &[SpectralField]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sup: f64 = 0.0;
    for x in a {
        let mut inf = f64::INFINITY;
        for y in b {
            if !x.same_domain(y) {
                return Err(Error::DomainMismatch);
            }
            inf = inf.min((x - y).e_norm());
        }
        sup = sup.max(inf);
    }
    Ok(sup)
}

/// `max_{a,b∈A} ‖a − b‖_E`.
pub fn diameter_e(a: &[SpectralField]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut diam: f64 = 0.0;
    for (i, x) in a.iter().enumerate() {
        for y in &a[i + 1..] {
            if !x.same_domain(y) {
                return Err(Error::DomainMismatch);
            }
            diam = diam.max((x - y).e_norm());
        }
    }
    Ok(diam)
}

/// `S(t1, t0)ψ`, the state at `t1` of the run started from `state` at `t0`.
pub fn flow(state: &SpectralField, t0: f64, t1: f64, params: &Arc<SolverParams>) -> Result<SpectralField> {
    if t1 == t0 {
        return Ok(state.clone());
    }
    let traj = evolve(state, t0, t1, params, usize::MAX)?;
    Ok(traj.last().state.clone())
}

/// Images of a seed set at one observation time; see [`pullback_ensemble`].
#[derive(Clone, Debug)]
pub struct EnsembleSnapshot {
    pub t: f64,
    pub members: Vec<SpectralField>,
    /// Pullback time `τ`: the members were started at time `−τ`.
    pub pump_origin: f64,
}

/// Pullback images `𝒜_τ = S(t_obs, −τ)·seeds` for every `τ` in `tau_list`.
pub fn pullback_ensemble(
    params: &Arc<SolverParams>,
    seeds: &[SpectralField],
    tau_list: &[f64],
    t_obs: f64,
    exec: Execution,
) -> Result<Vec<EnsembleSnapshot>> {
    if seeds.is_empty() {
        return Err(Error::EmptySet);
    }
    if tau_list
        .iter()
        .any(|&tau| !(tau.is_finite() && tau >= 0.0 && -tau <= t_obs))
    {
        return Err(Error::InvalidArgument(format!(
            "pullback times must satisfy 0 <= tau and -tau <= t_obs={t_obs}"
        )));
    }
    let jobs: Vec<(usize, &SpectralField)> = (0..tau_list.len())
        .flat_map(|k| seeds.iter().map(move |s| (k, s)))
        .collect();
    let images = exec.try_map(&jobs, |&(k, seed)| flow(seed, -tau_list[k], t_obs, params))?;
    Ok(images
        .chunks(seeds.len())
        .zip(tau_list)
        .map(|(members, &tau)| EnsembleSnapshot {
            t: t_obs,
            members: members.to_vec(),
            pump_origin: tau,
        })
        .collect())
}

/// `hausdorff_e(𝒜_{τ_{k+1}}, 𝒜_{τ_k})` for consecutive snapshots.
pub fn pullback_cauchy_distances(snapshots: &[EnsembleSnapshot]) -> Result<Vec<f64>> {
    snapshots
        .windows(2)
        .map(|w| hausdorff_e(&w[1].members, &w[0].members))
        .collect()
}

/// Attraction of a fresh set toward a reference set: for every horizon `t`,
/// `(t, hausdorff_e(S(t_obs, t_obs − t)·fresh, reference))`.
pub fn forward_attraction(
    params: &Arc<SolverParams>,
    fresh: &[SpectralField],
    horizons: &[f64],
    t_obs: f64,
    reference: &[SpectralField],
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    let snaps = pullback_ensemble(params, fresh, horizons, t_obs, exec)?;
    snaps
        .iter()
        .map(|s| Ok((s.pump_origin, hausdorff_e(&s.members, reference)?)))
        .collect()
}

/// Bounded steady state of the linear, autonomously pumped system
/// `c* = −i·Σ q_j e^{iφ_j} / (i(λ + 2a₁) + γ)`.
///
/// Requires `a₂ = 0` and every pump frequency zero.
pub fn linear_steady_state(params: &SolverParams) -> Result<SpectralField> {
    if params.potential.a2 != 0.0 {
        return Err(Error::InvalidArgument(
            "steady state is closed-form only for linear dynamics".into(),
        ));
    }
    if params.pump.modes().iter().any(|m| m.omega != 0.0) {
        return Err(Error::InvalidArgument("steady state needs an autonomous pump".into()));
    }
    let d = params.domain();
    let mut out = SpectralField::zeros(d);
    let shift = 2.0 * params.potential.a1;
    for m in params.pump.modes() {
        let phase = m.factor(0.0);
        ndarray::Zip::from(out.coeffs_mut())
            .and(m.profile.coeffs())
            .and(d.eigenvalues())
            .for_each(|o, &q, &lam| {
                *o += Complex64::new(0.0, -1.0) * q * phase / Complex64::new(params.gamma, lam + shift);
            });
    }
    Ok(out)
}

/// Result of an absorbing-set run from one initial condition.
#[derive(Clone, Debug)]
pub struct AbsorbRun {
    pub initial_e_norm: f64,
    pub entry_time: Option<f64>,
    pub envelope: DecayEnvelope,
    pub report: EnvelopeReport,
}

/// Evolves `count` seeded random initial conditions with `‖ψ(0)‖_E ≤ radius`
/// over `[t0, t1]`, checks the forward envelope sample-wise and records the
/// entry time into the absorbing ball derived from the pump.
#[allow(clippy::too_many_arguments)]
pub fn absorbing_study(
    params: &Arc<SolverParams>,
    radius: f64,
    count: usize,
    seed: u64,
    t0: f64,
    t1: f64,
    sample_every: usize,
    exec: Execution,
) -> Result<(AbsorbingBall, Vec<AbsorbRun>)> {
    let ics = crate::sampling::seeds_in_ball(params.domain(), radius, count, seed)?;
    let reference = DecayEnvelope::calibrate(params.gamma, &params.potential, &params.pump, 0.0)?;
    let ball = AbsorbingBall::from_envelope(&reference);
    let runs = exec.try_map(&ics, |ic| {
        let env = DecayEnvelope::calibrate(
            params.gamma,
            &params.potential,
            &params.pump,
            hamiltonian(ic, &params.potential),
        )?;
        let traj = evolve(ic, t0, t1, params, sample_every)?;
        Ok::<_, Error>(AbsorbRun {
            initial_e_norm: ic.e_norm(),
            entry_time: absorbing_entry_time(&traj, &ball),
            envelope: env,
            report: envelope_check(&traj, &env)?,
        })
    })?;
    Ok((ball, runs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalerkinRow {
    /// Per-axis cuts `(M_coarse, M_fine)`; mode counts are their squares.
    pub cut_coarse: usize,
    pub cut_fine: usize,
    /// `sup_t ‖ψ_coarse − ψ_fine‖_{H^s}`, one entry per requested `s`.
    pub sup_diff: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalerkinTable {
    pub s_values: Vec<f64>,
    pub rows: Vec<GalerkinRow>,
}

impl GalerkinTable {
    /// Column of `sup_diff` for the `i`-th requested `s`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.sup_diff[i]).collect()
    }
}

/// Runs the square cuts `M×M` for `M` in `cuts` on the grid family of the
/// initial condition's domain and tabulates the sup-in-time `H^s` distance
/// between consecutive cuts (coarser solutions are zero-extended).
pub fn galerkin_convergence_study(
    params: &SolverParams,
    ic: &SpectralField,
    cuts: &[usize],
    t_end: f64,
    s_values: &[f64],
    sample_every: usize,
    exec: Execution,
) -> Result<GalerkinTable> {
    if cuts.len() < 2 || cuts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "cuts must be strictly increasing with at least two entries".into(),
        ));
    }
    if s_values.is_empty() || s_values.iter().any(|&s| !(0.0..1.0).contains(&s)) {
        return Err(Error::InvalidArgument("Sobolev indices must lie in [0, 1)".into()));
    }
    let base = ic.domain();
    let domains = cuts
        .iter()
        .map(|&m| DomainSpec::build(base.lx(), base.ly(), base.nx(), base.ny(), m, m))
        .collect::<Result<Vec<_>>>()?;
    let trajectories = exec.try_map(&domains, |d| {
        let p = Arc::new(params.with_pump(params.pump.transfer_to(d)?));
        evolve(&ic.transfer_to(d)?, 0.0, t_end, &p, sample_every)
    })?;
    let pairs: Vec<usize> = (0..cuts.len() - 1).collect();
    let rows = exec.try_map(&pairs, |&i| {
        let (coarse, fine) = (&trajectories[i], &trajectories[i + 1]);
        let target = &domains[i + 1];
        let mut sup = vec![0.0_f64; s_values.len()];
        for (a, b) in coarse.samples().iter().zip(fine.samples()) {
            let diff = &a.state.transfer_to(target)? - &b.state;
            for (acc, &s) in sup.iter_mut().zip(s_values) {
                *acc = acc.max(diff.sobolev_norm(s));
            }
        }
        Ok::<_, Error>(GalerkinRow {
            cut_coarse: cuts[i],
            cut_fine: cuts[i + 1],
            sup_diff: sup,
        })
    })?;
    Ok(GalerkinTable {
        s_values: s_values.to_vec(),
        rows,
    })
}

/// Outcome of the two-solution difference check.
#[derive(Clone, Debug, PartialEq)]
pub struct DependenceReport {
    pub delta: f64,
    pub t_end: f64,
    /// `sup_t ‖z(t)‖ / ‖z(0)‖` (1 when `z(0) = 0`).
    pub growth_factor: f64,
    /// Smallest `C` with `|d/dt‖w‖²| ≤ C∫(1+h²)|w|²` at every sample.
    pub fitted_c: f64,
    /// Samples where the inequality fails for `fitted_c` (always 0 unless
    /// the fit is degenerate).
    pub violations: usize,
    /// `growth_factor ≤ e^{C·T}·1.05`.
    pub gronwall_ok: bool,
    pub samples: usize,
}

/// Perturbs `ic` by `delta` times a seeded random field of unit energy
/// norm and compares the two solutions on `[0, t_end]`.
pub fn continuous_dependence_check(
    params: &Arc<SolverParams>,
    ic: &SpectralField,
    delta: f64,
    t_end: f64,
    seed: u64,
    sample_every: usize,
) -> Result<DependenceReport> {
    let direction = gaussian_field(ic.domain(), 1.0, &mut rng_from_seed(seed));
    continuous_dependence_along(params, ic, &direction, delta, t_end, sample_every)
}

/// As [`continuous_dependence_check`] with an explicit perturbation
/// direction; `ψ₂(0) = ψ₁(0) + δ·direction`.
///
/// With `z = ψ₁ − ψ₂` and `w = e^{γt}z` the Galerkin system gives exactly
/// `d/dt‖w‖² = 2e^{2γt}⟨−i(P f(ψ₁) − P f(ψ₂)), z⟩`, which is compared with
/// `∫(1 + h²)|w|²`, `h = |ψ₁| + |ψ₂|`.
pub fn continuous_dependence_along(
    params: &Arc<SolverParams>,
    ic: &SpectralField,
    direction: &SpectralField,
    delta: f64,
    t_end: f64,
    sample_every: usize,
) -> Result<DependenceReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perturbation size must be positive, got delta={delta}"
        )));
    }
    if !ic.same_domain(direction) {
        return Err(Error::DomainMismatch);
    }
    let mut ic2 = ic.clone();
    ic2.axpy(Complex64::new(delta, 0.0), direction);
    let a = evolve(ic, 0.0, t_end, params, sample_every)?;
    let b = evolve(&ic2, 0.0, t_end, params, sample_every)?;
    let gamma = params.gamma;
    let z0 = (&a.first().state - &b.first().state).l2_norm();

    let mut lhs = Vec::with_capacity(a.len());
    let mut rhs = Vec::with_capacity(a.len());
    let mut growth: f64 = 1.0;
    for (s1, s2) in a.samples().iter().zip(b.samples()) {
        let z = &s1.state - &s2.state;
        if z0 > 0.0 {
            growth = growth.max(z.l2_norm() / z0);
        }
        let scale = (gamma * s1.t).exp();
        let w = &z * scale;
        let df = &apply_nonlinearity(&s1.state, &params.potential) - &apply_nonlinearity(&s2.state, &params.potential);
        let minus_i_df = &df * Complex64::new(0.0, -1.0);
        lhs.push((2.0 * scale * scale * minus_i_df.inner_real(&z)?).abs());
        rhs.push(weighted_difference_integral(&s1.state, &s2.state, &w));
    }
    let fitted_c = lhs
        .iter()
        .zip(&rhs)
        .filter(|(_, &r)| r > 0.0)
        .map(|(l, r)| l / r)
        .fold(0.0, f64::max);
    let violations = lhs
        .iter()
        .zip(&rhs)
        .filter(|(&l, &r)| l > fitted_c * r * (1.0 + 1e-12))
        .count();
    Ok(DependenceReport {
        delta,
        t_end,
        growth_factor: growth,
        fitted_c,
        violations,
        gronwall_ok: violations == 0 && growth <= (fitted_c * t_end).exp() * 1.05,
        samples: a.len(),
    })
}
