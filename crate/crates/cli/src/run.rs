//! Subcommand drivers: each one integrates, writes its artifacts into the
//! output directory and returns a [`Summary`] whose checks decide the exit
//! code.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use dnls_core::attractor::{
    absorbing_study, continuous_dependence_check, forward_attraction, galerkin_convergence_study,
    pullback_cauchy_distances, pullback_ensemble, AbsorbingBall,
};
use dnls_core::energy::{
    energy_samples, envelope_check, fit_backward_rate, hamiltonian, refinement_from, DecayEnvelope,
};
use dnls_core::sampling::seeds_in_ball;
use dnls_core::{condition_constants, evolve, DomainSpec, Execution, SolverParams};
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::output::{write_table, write_timeseries, Check, Constants, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Simulate,
    Audit,
    Absorb,
    Converge,
    Attract,
    Depend,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Audit => "audit",
            Subcommand::Absorb => "absorb",
            Subcommand::Converge => "converge",
            Subcommand::Attract => "attract",
            Subcommand::Depend => "depend",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Solver(#[from] dnls_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// Process exit code: 3 for numerical blow-up, 2 for everything that
    /// prevents the run from completing.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Solver(dnls_core::Error::BlowUp { .. }) => 3,
            _ => 2,
        }
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64, RunError> {
    seed.ok_or_else(|| {
        ConfigError::Invalid {
            key: "run.seed".into(),
            message: format!("{what} needs a seed (set run.seed or pass --seed)"),
        }
        .into()
    })
}

fn missing(key: &str, what: &str) -> RunError {
    ConfigError::Invalid {
        key: key.into(),
        message: format!("required for {what}"),
    }
    .into()
}

struct Setup {
    domain: Arc<DomainSpec>,
    params: Arc<SolverParams>,
    /// Forward envelope with `𝓗(0) = 0`; `None` without damping.
    reference: Option<DecayEnvelope>,
}

fn setup(cfg: &RunConfig) -> Result<Setup, RunError> {
    let domain = cfg.build_domain();
    let params = cfg.solver_params(&domain);
    let reference = if params.gamma > 0.0 {
        Some(DecayEnvelope::calibrate(
            params.gamma,
            &params.potential,
            &params.pump,
            0.0,
        )?)
    } else {
        None
    };
    Ok(Setup {
        domain,
        params,
        reference,
    })
}

fn constants(setup: &Setup) -> Result<Constants, RunError> {
    let k = condition_constants(&setup.params.potential)?;
    let env = setup.reference.as_ref();
    Ok(Constants {
        kappa1: k.kappa1,
        kappa2: k.kappa2,
        kappa3: k.kappa3,
        kappa4: k.kappa4,
        kappa5: k.kappa5,
        b1: k.b1,
        b2: k.b2,
        b3: k.b3,
        alpha_plus: env.map(|e| e.alpha_plus),
        d: env.map(|e| e.d),
        d0: env.map(|e| e.d0),
        c1: env.map(|e| e.c1),
        p0: setup.params.pump.sup_norm(),
        absorbing_radius: env.map(|e| e.absorbing_radius()),
    })
}

/// Parameters whose pump clock starts at `t0`, for studies that integrate
/// from time zero.
fn shifted(params: &Arc<SolverParams>, t0: f64) -> Arc<SolverParams> {
    if t0 == 0.0 {
        params.clone()
    } else {
        Arc::new(params.with_pump(params.pump.translate(t0)))
    }
}

/// Runs `sub`, writing artifacts and `summary.json` into `out`.
pub fn run(sub: Subcommand, cfg: &RunConfig, out: &Path, seed_override: Option<u64>) -> Result<Summary, RunError> {
    let started = Instant::now();
    fs::create_dir_all(out).map_err(io_at(out))?;
    let seed = cfg.seed(seed_override);
    let setup = setup(cfg)?;
    let (checks, results) = match sub {
        Subcommand::Simulate => simulate(cfg, &setup, out, seed)?,
        Subcommand::Audit => audit(cfg, &setup, out, seed)?,
        Subcommand::Absorb => absorb(cfg, &setup, out, seed)?,
        Subcommand::Converge => converge(cfg, &setup, out, seed)?,
        Subcommand::Attract => attract(cfg, &setup, out, seed)?,
        Subcommand::Depend => depend(cfg, &setup, out, seed)?,
    };
    let summary = Summary {
        subcommand: sub.name().into(),
        config: cfg.to_toml(),
        seed,
        constants: constants(&setup)?,
        checks,
        results,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = out.join("summary.json");
    summary.write(&path).map_err(io_at(&path))?;
    Ok(summary)
}

type Outcome = Result<(Vec<Check>, serde_json::Value), RunError>;

fn timeseries(out: &Path, name: &str, traj: &dnls_core::Trajectory) -> Result<(), RunError> {
    let path = out.join(name);
    write_timeseries(&path, &energy_samples(traj)?).map_err(io_at(&path))
}

fn simulate(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let r = &cfg.run;
    let ic = cfg.initial_state(&setup.domain, seed)?;
    let traj = evolve(&ic, r.t0, r.t1, &setup.params, r.sample_every)?;
    timeseries(out, "timeseries.csv", &traj)?;
    let last = &traj.last().state;
    let mut checks = Vec::new();
    let mut results = json!({
        "samples": traj.len(),
        "final_t": traj.last().t,
        "final_e_norm": last.e_norm(),
        "final_l2": last.l2_norm(),
    });
    if r.t1 > r.t0 {
        if setup.params.gamma > 0.0 {
            let env = DecayEnvelope::calibrate(
                setup.params.gamma,
                &setup.params.potential,
                &setup.params.pump,
                hamiltonian(&ic, &setup.params.potential),
            )?;
            let report = envelope_check(&traj, &env)?;
            checks.push(Check::new(
                "forward_envelope_violations",
                report.violations == 0,
                report.violations as f64,
                0.0,
            ));
            results["envelope_margin"] = json!(report.margin);
            results["empirical_d"] = json!(report.empirical_d);
        }
    } else {
        let h0 = hamiltonian(&ic, &setup.params.potential);
        let fit = fit_backward_rate(&traj, h0)?;
        results["alpha_minus"] = json!(fit.alpha_minus);
        results["h_max"] = json!(fit.h_max);
        checks.push(Check::new(
            "alpha_minus_finite",
            fit.alpha_minus.is_finite(),
            fit.alpha_minus,
            f64::INFINITY,
        ));
    }
    Ok((checks, results))
}

/// Ratios must fall in this band for second-order residual convergence.
const REFINEMENT_BAND: (f64, f64) = (3.2, 4.8);

fn audit(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let r = &cfg.run;
    let ic = cfg.initial_state(&setup.domain, seed)?;
    let fine_params = Arc::new(setup.params.with_dt(0.5 * r.dt));
    let coarse = evolve(&ic, r.t0, r.t1, &setup.params, r.sample_every)?;
    let fine = evolve(&ic, r.t0, r.t1, &fine_params, r.sample_every)?;
    timeseries(out, "timeseries_dt.csv", &coarse)?;
    timeseries(out, "timeseries_dt_half.csv", &fine)?;
    let report = refinement_from(&coarse, &fine)?;
    let (lo, hi) = REFINEMENT_BAND;
    let checks = report
        .ratios()
        .iter()
        .map(|&(name, ratio)| Check::new(format!("refinement_{name}"), (lo..=hi).contains(&ratio), ratio, lo))
        .collect();
    let results = json!({
        "dt": report.dt,
        "band": [lo, hi],
        "ratios": report.ratios().iter().map(|&(n, v)| (n.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    Ok((checks, results))
}

fn absorb(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let r = &cfg.run;
    let seed = need_seed(seed, "absorb")?;
    let radius = cfg.study.radius.unwrap_or(10.0);
    let count = cfg.study.ensemble_size.unwrap_or(20);
    let (ball, runs) = absorbing_study(
        &setup.params,
        radius,
        count,
        seed,
        r.t0,
        r.t1,
        r.sample_every,
        Execution::Parallel,
    )?;
    let rows: Vec<Vec<f64>> = runs
        .iter()
        .enumerate()
        .map(|(i, run)| {
            vec![
                i as f64,
                run.initial_e_norm,
                run.envelope.h0,
                run.entry_time.unwrap_or(f64::NAN),
                run.report.violations as f64,
                run.report.margin,
            ]
        })
        .collect();
    let path = out.join("absorb.csv");
    write_table(
        &path,
        &["ic", "initial_e_norm", "h0", "entry_time", "violations", "margin"],
        &rows,
    )
    .map_err(io_at(&path))?;
    let entered = runs.iter().filter(|run| run.entry_time.is_some()).count();
    let violations: usize = runs.iter().map(|run| run.report.violations).sum();
    let last_entry = runs.iter().filter_map(|run| run.entry_time).fold(f64::NAN, f64::max);
    let checks = vec![
        Check::new(
            "entered_absorbing_ball",
            entered == runs.len(),
            entered as f64,
            runs.len() as f64,
        ),
        Check::new("envelope_violations", violations == 0, violations as f64, 0.0),
    ];
    let results = json!({
        "ball_radius": ball.radius,
        "initial_radius": radius,
        "ensemble_size": count,
        "latest_entry_time": last_entry,
    });
    Ok((checks, results))
}

fn converge(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let r = &cfg.run;
    let m_list = cfg
        .study
        .m_list
        .as_ref()
        .ok_or_else(|| missing("study.m_list", "converge"))?;
    let cuts: Vec<usize> = m_list.iter().map(|&m| (m as f64).sqrt().round() as usize).collect();
    let s_values = cfg.study.s.clone().unwrap_or_else(|| vec![0.5]);
    let ic = cfg.initial_state(&setup.domain, seed)?;
    let params = shifted(&setup.params, r.t0);
    let table = galerkin_convergence_study(
        &params,
        &ic,
        &cuts,
        r.t1 - r.t0,
        &s_values,
        r.sample_every,
        Execution::Parallel,
    )?;
    let mut columns = vec!["m_coarse".to_string(), "m_fine".to_string()];
    columns.extend(s_values.iter().map(|s| format!("sup_diff_s{s}")));
    let rows: Vec<Vec<f64>> = table
        .rows
        .iter()
        .map(|row| {
            let mut v = vec![
                (row.cut_coarse * row.cut_coarse) as f64,
                (row.cut_fine * row.cut_fine) as f64,
            ];
            v.extend(&row.sup_diff);
            v
        })
        .collect();
    let path = out.join("converge.csv");
    let header: Vec<&str> = columns.iter().map(String::as_str).collect();
    write_table(&path, &header, &rows).map_err(io_at(&path))?;
    let mut checks = Vec::new();
    for (i, s) in s_values.iter().enumerate() {
        let col = table.column(i);
        let decreasing = col.windows(2).all(|w| w[1] < w[0]);
        let ratio = col[col.len() - 1] / col[0];
        checks.push(Check::new(format!("strictly_decreasing_s{s}"), decreasing, ratio, 1.0));
    }
    let results = json!({
        "m_list": m_list,
        "s": s_values,
        "sup_diff": table.rows.iter().map(|row| row.sup_diff.clone()).collect::<Vec<_>>(),
    });
    Ok((checks, results))
}

/// The last fresh-set distance must shrink to this fraction of the first.
const ATTRACTION_FACTOR: f64 = 0.2;

fn attract(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let seed = need_seed(seed, "attract")?;
    let study = &cfg.study;
    let radius = match (study.radius, setup.reference) {
        (Some(r), _) => r,
        (None, Some(env)) => AbsorbingBall::from_envelope(&env).radius,
        (None, None) => return Err(missing("study.radius", "attract without damping")),
    };
    let count = study.ensemble_size.unwrap_or(16);
    let taus = study.tau_list.clone().unwrap_or_else(|| vec![5.0, 10.0, 20.0, 40.0]);
    let horizons = study
        .horizons
        .clone()
        .unwrap_or_else(|| vec![5.0, taus[taus.len() - 1]]);
    let t_obs = study.t_obs.unwrap_or(cfg.run.t0);

    let seeds = seeds_in_ball(&setup.domain, radius, count, seed)?;
    let snaps = pullback_ensemble(&setup.params, &seeds, &taus, t_obs, Execution::Parallel)?;
    let cauchy = pullback_cauchy_distances(&snaps)?;
    let fresh = seeds_in_ball(&setup.domain, radius, count, seed.wrapping_add(1))?;
    let reference = &snaps[snaps.len() - 1].members;
    let attraction = forward_attraction(&setup.params, &fresh, &horizons, t_obs, reference, Execution::Parallel)?;

    let rows: Vec<Vec<f64>> = taus
        .windows(2)
        .zip(&cauchy)
        .map(|(w, &d)| vec![w[0], w[1], d])
        .collect();
    let path = out.join("pullback.csv");
    write_table(&path, &["tau", "tau_next", "hausdorff_e"], &rows).map_err(io_at(&path))?;
    let rows: Vec<Vec<f64>> = attraction.iter().map(|&(t, d)| vec![t, d]).collect();
    let path = out.join("attraction.csv");
    write_table(&path, &["horizon", "hausdorff_e"], &rows).map_err(io_at(&path))?;

    let mut checks = Vec::new();
    if !cauchy.is_empty() {
        let nonincreasing = cauchy.windows(2).all(|w| w[1] <= w[0]);
        checks.push(Check::new(
            "pullback_cauchy_nonincreasing",
            nonincreasing,
            cauchy[cauchy.len() - 1],
            cauchy[0],
        ));
    }
    if attraction.len() >= 2 {
        let (first, last) = (attraction[0].1, attraction[attraction.len() - 1].1);
        let threshold = ATTRACTION_FACTOR * first;
        checks.push(Check::new("fresh_set_attracted", last <= threshold, last, threshold));
    }
    let results = json!({
        "seed_radius": radius,
        "ensemble_size": count,
        "t_obs": t_obs,
        "tau_list": taus,
        "cauchy_distances": cauchy,
        "horizons": horizons,
        "attraction_distances": attraction.iter().map(|&(_, d)| d).collect::<Vec<_>>(),
    });
    Ok((checks, results))
}

/// Slack on the Gronwall growth bound `e^{CT}`.
const GRONWALL_SLACK: f64 = 1.05;

fn depend(cfg: &RunConfig, setup: &Setup, out: &Path, seed: Option<u64>) -> Outcome {
    let r = &cfg.run;
    let seed = need_seed(seed, "depend")?;
    let ic = cfg.initial_state(&setup.domain, Some(seed))?;
    let delta = cfg.study.delta.unwrap_or_else(|| 1e-8 * ic.e_norm().max(1.0));
    let t_end = r.t1 - r.t0;
    if t_end <= 0.0 {
        return Err(ConfigError::Invalid {
            key: "run.t1".into(),
            message: "depend runs forward in time; need t1 > t0".into(),
        }
        .into());
    }
    let params = shifted(&setup.params, r.t0);
    let report = continuous_dependence_check(&params, &ic, delta, t_end, seed.wrapping_add(1), r.sample_every)?;
    let traj = evolve(&ic, r.t0, r.t1, &setup.params, r.sample_every)?;
    timeseries(out, "timeseries.csv", &traj)?;
    let bound = (report.fitted_c * t_end).exp() * GRONWALL_SLACK;
    let checks = vec![
        Check::new(
            "derivative_bound_violations",
            report.violations == 0,
            report.violations as f64,
            0.0,
        ),
        Check::new(
            "gronwall_growth",
            report.growth_factor <= bound,
            report.growth_factor,
            bound,
        ),
    ];
    let results = json!({
        "delta": report.delta,
        "t_end": report.t_end,
        "fitted_c": report.fitted_c,
        "growth_factor": report.growth_factor,
        "samples": report.samples,
    });
    Ok((checks, results))
}
