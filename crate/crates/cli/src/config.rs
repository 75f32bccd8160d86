//! Run configuration: TOML text with one table per concern.
//!
//! ```toml
//! [domain]
//! lx = 3.141592653589793
//! ly = 3.141592653589793
//! nx = 64
//! ny = 64
//! mx = 21
//! my = 21
//!
//! [physics]
//! gamma = 0.5
//! a2 = 1.0
//!
//! [[pump]]
//! omega = 1.0
//! entries = [[1, 1, 0.3, 0.0]]   # (j, k, re, im)
//!
//! [run]
//! t1 = 10.0
//! dt = 0.01
//! ```
//!
//! Unknown keys are rejected; every validation error names the offending
//! key.

use std::f64::consts::PI;
use std::sync::Arc;

use dnls_core::sampling::{gaussian_field, rng_from_seed};
use dnls_core::{DomainSpec, PumpMode, QuarticPotential, QuasiPeriodicPump, Scheme, SolverParams, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

/// A sparse coefficient `(j, k, re, im)`, 1-based mode indices.
pub type ModeEntry = (usize, usize, f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default = "default_side", alias = "Lx")]
    pub lx: f64,
    #[serde(default = "default_side", alias = "Ly")]
    pub ly: f64,
    #[serde(alias = "Nx")]
    pub nx: usize,
    #[serde(alias = "Ny")]
    pub ny: usize,
    #[serde(alias = "Mx")]
    pub mx: usize,
    #[serde(alias = "My")]
    pub my: usize,
}

fn default_side() -> f64 {
    PI
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub gamma: f64,
    pub a2: f64,
    #[serde(default)]
    pub a1: f64,
    #[serde(default)]
    pub a0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpModeConfig {
    pub entries: Vec<ModeEntry>,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    #[default]
    Strang,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub scheme: SchemeName,
}

fn default_sample_every() -> usize {
    10
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    #[default]
    Zero,
    Modes,
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub kind: InitialKind,
    /// Coefficients for `kind = "modes"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<ModeEntry>,
    /// Energy norm for `kind = "random"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_norm: Option<f64>,
}

/// Parameters of the individual studies; each subcommand reads what it
/// needs and falls back to documented defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Total mode counts of the square cuts (perfect squares), `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<usize>>,
    /// Sobolev indices for `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    /// Pullback times for `attract`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<Vec<f64>>,
    /// Horizons of the fresh-set attraction check in `attract`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_obs: Option<f64>,
    /// Perturbation size for `depend`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Initial-condition radius for `absorb` (energy norm).
    #[serde(default, alias = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub physics: PhysicsConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pump: Vec<PumpModeConfig>,
    pub run: RunBlock,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub study: StudyConfig,
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string().trim_end().to_owned()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn check_entries(entries: &[ModeEntry], key: &str, mx: usize, my: usize) -> Result<(), ConfigError> {
    for (i, &(j, k, re, im)) in entries.iter().enumerate() {
        if j == 0 || k == 0 || j > mx || k > my {
            return Err(invalid(
                format!("{key}[{i}]"),
                format!("mode ({j},{k}) is outside the retained cut {mx}x{my}"),
            ));
        }
        if !(re.is_finite() && im.is_finite()) {
            return Err(invalid(format!("{key}[{i}]"), "coefficients must be finite"));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = &self.domain;
        DomainSpec::build(d.lx, d.ly, d.nx, d.ny, d.mx, d.my).map_err(|e| {
            let msg = e.to_string();
            let key = if msg.contains("Mx") {
                "domain.mx"
            } else if msg.contains("My") {
                "domain.my"
            } else if msg.contains("Nx") || msg.contains("intervals") {
                "domain.nx"
            } else {
                "domain"
            };
            invalid(key, msg.trim_start_matches("invalid domain: "))
        })?;

        let p = &self.physics;
        if !(p.gamma.is_finite() && p.gamma >= 0.0) {
            return Err(invalid(
                "physics.gamma",
                format!("friction must be nonnegative, got {}", p.gamma),
            ));
        }
        if !(p.a2 > 0.0 && p.a2.is_finite()) {
            return Err(invalid("physics.a2", format!("defocusing requires a2>0, got {}", p.a2)));
        }
        if !(p.a1.is_finite() && p.a0.is_finite()) {
            return Err(invalid("physics", "a1 and a0 must be finite"));
        }

        for (i, mode) in self.pump.iter().enumerate() {
            check_entries(&mode.entries, &format!("pump[{i}].entries"), d.mx, d.my)?;
            if !(mode.omega.is_finite() && mode.phase.is_finite()) {
                return Err(invalid(format!("pump[{i}]"), "omega and phase must be finite"));
            }
        }

        let r = &self.run;
        if !(r.dt.is_finite() && r.dt > 0.0) {
            return Err(invalid("run.dt", format!("time step must be positive, got {}", r.dt)));
        }
        if !(r.t0.is_finite() && r.t1.is_finite()) || r.t1 == r.t0 {
            return Err(invalid(
                "run.t1",
                format!("integration interval [{}, {}] is empty", r.t0, r.t1),
            ));
        }
        if r.sample_every == 0 {
            return Err(invalid("run.sample_every", "must be at least 1"));
        }

        let init = &self.initial;
        match init.kind {
            InitialKind::Zero => {}
            InitialKind::Modes => {
                if init.entries.is_empty() {
                    return Err(invalid("initial.entries", "kind = \"modes\" needs at least one entry"));
                }
                check_entries(&init.entries, "initial.entries", d.mx, d.my)?;
            }
            InitialKind::Random => match init.e_norm {
                Some(e) if e.is_finite() && e >= 0.0 => {}
                Some(e) => return Err(invalid("initial.e_norm", format!("must be nonnegative, got {e}"))),
                None => return Err(invalid("initial.e_norm", "kind = \"random\" needs e_norm")),
            },
        }

        let s = &self.study;
        if let Some(list) = &s.m_list {
            if list.len() < 2 {
                return Err(invalid("study.m_list", "needs at least two mode counts"));
            }
            for &m in list {
                let side = integer_sqrt(m);
                if side * side != m || m == 0 {
                    return Err(invalid(
                        "study.m_list",
                        format!("{m} is not a perfect square (square cuts only)"),
                    ));
                }
                if side >= d.nx || side >= d.ny {
                    return Err(invalid(
                        "study.m_list",
                        format!("cut {side}x{side} requires Mx<Nx and My<Ny"),
                    ));
                }
            }
            if list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("study.m_list", "mode counts must be strictly increasing"));
            }
        }
        if let Some(list) = &s.s {
            if list.is_empty() || list.iter().any(|&x| !(x.is_finite() && (0.0..1.0).contains(&x))) {
                return Err(invalid("study.s", "Sobolev indices must lie in [0, 1)"));
            }
        }
        if let Some(list) = &s.tau_list {
            if list.is_empty()
                || list.iter().any(|&x| !(x.is_finite() && x >= 0.0))
                || list.windows(2).any(|w| w[1] <= w[0])
            {
                return Err(invalid(
                    "study.tau_list",
                    "must be nonempty, nonnegative and strictly increasing",
                ));
            }
        }
        if let Some(list) = &s.horizons {
            if list.is_empty() || list.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
                return Err(invalid("study.horizons", "must be nonempty and nonnegative"));
            }
        }
        if let Some(delta) = s.delta {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(invalid("study.delta", format!("must be positive, got {delta}")));
            }
        }
        if let Some(radius) = s.radius {
            if !(radius.is_finite() && radius > 0.0) {
                return Err(invalid("study.radius", format!("must be positive, got {radius}")));
            }
        }
        if s.ensemble_size == Some(0) {
            return Err(invalid("study.ensemble_size", "must be at least 1"));
        }
        if s.t_obs.is_some_and(|t| !t.is_finite()) {
            return Err(invalid("study.t_obs", "must be finite"));
        }
        Ok(())
    }

    /// Seed from the command line, else from `run.seed`.
    pub fn seed(&self, override_seed: Option<u64>) -> Option<u64> {
        override_seed.or(self.run.seed)
    }

    pub fn build_domain(&self) -> Arc<DomainSpec> {
        let d = &self.domain;
        DomainSpec::build(d.lx, d.ly, d.nx, d.ny, d.mx, d.my).expect("validated domain")
    }

    pub fn potential(&self) -> QuarticPotential {
        QuarticPotential::new(self.physics.a2, self.physics.a1, self.physics.a0).expect("validated potential")
    }

    pub fn build_pump(&self, domain: &Arc<DomainSpec>) -> QuasiPeriodicPump {
        let modes = self
            .pump
            .iter()
            .map(|m| PumpMode {
                profile: sparse_field(domain, &m.entries),
                omega: m.omega,
                phase: m.phase,
            })
            .collect();
        QuasiPeriodicPump::new(domain, modes).expect("validated pump")
    }

    pub fn solver_params(&self, domain: &Arc<DomainSpec>) -> Arc<SolverParams> {
        let scheme = match self.run.scheme {
            SchemeName::Strang => Scheme::StrangSplit,
            SchemeName::Rk4 => Scheme::Rk4Reference,
        };
        Arc::new(
            SolverParams::new(
                self.physics.gamma,
                self.potential(),
                self.build_pump(domain),
                self.run.dt,
                scheme,
            )
            .expect("validated solver parameters"),
        )
    }

    /// Initial condition; random fields need a seed.
    pub fn initial_state(&self, domain: &Arc<DomainSpec>, seed: Option<u64>) -> Result<SpectralField, ConfigError> {
        Ok(match self.initial.kind {
            InitialKind::Zero => SpectralField::zeros(domain),
            InitialKind::Modes => sparse_field(domain, &self.initial.entries),
            InitialKind::Random => {
                let seed = seed.ok_or_else(|| invalid("run.seed", "required for kind = \"random\" initial data"))?;
                gaussian_field(
                    domain,
                    self.initial.e_norm.expect("validated"),
                    &mut rng_from_seed(seed),
                )
            }
        })
    }

    /// TOML rendering that parses back to an equal configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn sparse_field(domain: &Arc<DomainSpec>, entries: &[ModeEntry]) -> SpectralField {
    let sparse: Vec<(usize, usize, Complex64)> = entries
        .iter()
        .map(|&(j, k, re, im)| (j, k, Complex64::new(re, im)))
        .collect();
    SpectralField::from_sparse(domain, &sparse).expect("validated entries")
}

fn integer_sqrt(m: usize) -> usize {
    let mut r = (m as f64).sqrt() as usize;
    while r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
nx = 16
ny = 16
mx = 5
my = 5

[physics]
gamma = 0.5
a2 = 1.0

[run]
t1 = 1.0
dt = 0.01
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.run.sample_every, 10);
        assert_eq!(cfg.run.t0, 0.0);
        assert_eq!(cfg.domain.lx, PI);
        assert_eq!(cfg.physics.a1, 0.0);
        assert_eq!(cfg.initial.kind, InitialKind::Zero);
        assert!(cfg.pump.is_empty());
        assert_eq!(cfg.run.scheme, SchemeName::Strang);
    }

    #[test]
    fn echo_reparses_to_equal_config() {
        let text = format!(
            "{MINIMAL}\n[[pump]]\nomega = 1.5\nentries = [[1, 2, 0.25, -0.5]]\n\n[initial]\nkind = \"modes\"\nentries = [[1, 1, 1, 0]]\n\n[study]\ntau_list = [5.0, 10.0]\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn aliased_cut_is_rejected() {
        let text = MINIMAL.replace("mx = 5", "mx = 16");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("mode cut requires Mx<Nx"), "{err}");
        assert!(err.to_string().starts_with("domain.mx"), "{err}");
    }

    #[test]
    fn focusing_potential_is_rejected() {
        let err = parse_config(&MINIMAL.replace("a2 = 1.0", "a2 = -1.0")).unwrap_err();
        assert!(err.to_string().contains("defocusing requires a2>0"), "{err}");
        assert!(err.to_string().starts_with("physics.a2"));
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let err = parse_config(&MINIMAL.replace("a2 = 1.0", "a2 = 1.0\nbeta = 2.0")).unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
        let err = parse_config(&MINIMAL.replace("dt = 0.01", "")).unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
        let err = parse_config(&MINIMAL.replace("dt = 0.01", "dt = \"fast\"")).unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
    }

    #[test]
    fn invariant_violations_name_the_key() {
        let cases = [
            (MINIMAL.replace("dt = 0.01", "dt = 0.0"), "run.dt"),
            (MINIMAL.replace("t1 = 1.0", "t1 = 0.0"), "run.t1"),
            (
                format!("{MINIMAL}\n[[pump]]\nentries = [[6, 1, 1.0, 0.0]]\n"),
                "pump[0].entries[0]",
            ),
            (format!("{MINIMAL}\n[study]\nm_list = [4, 10]\n"), "study.m_list"),
            (format!("{MINIMAL}\n[study]\ns = [1.0]\n"), "study.s"),
            (format!("{MINIMAL}\n[initial]\nkind = \"random\"\n"), "initial.e_norm"),
        ];
        for (text, key) in cases {
            let err = parse_config(&text).unwrap_err();
            assert!(err.to_string().starts_with(key), "expected {key}: {err}");
        }
    }

    #[test]
    fn random_initial_state_needs_seed() {
        let text = format!("{MINIMAL}\n[initial]\nkind = \"random\"\ne_norm = 2.0\n");
        let cfg = parse_config(&text).unwrap();
        let d = cfg.build_domain();
        assert!(cfg.initial_state(&d, None).is_err());
        let a = cfg.initial_state(&d, Some(3)).unwrap();
        assert!((a.e_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn capitalised_aliases_are_accepted() {
        let text = MINIMAL
            .replace("nx =", "Nx =")
            .replace("mx =", "Mx =")
            .replace("[physics]", "Lx = 2.0\n\n[physics]");
        let cfg = parse_config(&format!("{text}\n[study]\nR = 4.0\n")).unwrap();
        assert_eq!((cfg.domain.nx, cfg.domain.mx, cfg.domain.lx), (16, 5, 2.0));
        assert_eq!(cfg.study.radius, Some(4.0));
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn integer_sqrt_is_exact() {
        for m in [1usize, 4, 36, 441, 442, 1 << 40] {
            let r = integer_sqrt(m);
            assert!(r * r <= m && (r + 1) * (r + 1) > m);
        }
    }
}
