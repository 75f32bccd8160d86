//! Galerkin-level properties of the time integrator.

use std::f64::consts::PI;
use std::sync::Arc;

use dnls_core::energy::{hamiltonian, DecayEnvelope};
use dnls_core::{
    evolve, DomainSpec, PumpMode, QuarticPotential, QuasiPeriodicPump, Scheme, SolverParams, SpectralField,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pump(d: &Arc<DomainSpec>) -> QuasiPeriodicPump {
    QuasiPeriodicPump::new(
        d,
        vec![
            PumpMode {
                profile: SpectralField::single_mode(d, 1, 1, c(0.3, 0.0)).unwrap(),
                omega: 1.0,
                phase: 0.0,
            },
            PumpMode {
                profile: SpectralField::single_mode(d, 2, 1, c(0.0, 0.2)).unwrap(),
                omega: 2f64.sqrt(),
                phase: 0.5,
            },
        ],
    )
    .unwrap()
}

#[test]
fn energy_bound_is_uniform_in_the_mode_cut() {
    // m ∈ {4, 16, 64, 256} modes: every cut obeys the envelope built from the
    // same constants (C₀ from the common initial condition, D₀ from the pump).
    let gamma = 0.5;
    let potential = QuarticPotential::new(1.0, 0.0, 0.0).unwrap();
    let largest = DomainSpec::build(PI, PI, 40, 40, 16, 16).unwrap();
    let ic = SpectralField::from_sparse(
        &largest,
        &[(1, 1, c(2.0, 0.0)), (2, 1, c(0.0, 1.0)), (1, 2, c(0.5, 0.5))],
    )
    .unwrap();
    let env = DecayEnvelope::calibrate(gamma, &potential, &pump(&largest), hamiltonian(&ic, &potential)).unwrap();
    for cut in [2, 4, 8, 16] {
        let d = DomainSpec::build(PI, PI, 40, 40, cut, cut).unwrap();
        let psi0 = ic.transfer_to(&d).unwrap();
        let h0 = hamiltonian(&psi0, &potential);
        assert!(
            (h0 - env.h0).abs() <= 1e-12 * env.h0,
            "common IC lies in the smallest cut"
        );
        let p = Arc::new(
            SolverParams::new(
                gamma,
                potential,
                pump(&largest).transfer_to(&d).unwrap(),
                0.01,
                Scheme::StrangSplit,
            )
            .unwrap(),
        );
        let traj = evolve(&psi0, 0.0, 20.0, &p, 10).unwrap();
        for s in traj.samples() {
            let e2 = s.state.e_norm().powi(2);
            assert!(
                e2 <= env.e_norm_sqr_bound(s.t),
                "cut {cut}, t={}: {e2} > {}",
                s.t,
                env.e_norm_sqr_bound(s.t)
            );
        }
    }
}

#[test]
fn refining_dt_converges_to_the_galerkin_flow() {
    // the split-step solution approaches the RK4 solution of the same
    // m-mode system at second order
    let d = DomainSpec::build(PI, PI, 16, 16, 4, 4).unwrap();
    let potential = QuarticPotential::new(1.0, -0.3, 0.1).unwrap();
    let ic = SpectralField::from_sparse(&d, &[(1, 1, c(1.0, 0.0)), (2, 3, c(0.0, 0.5)), (4, 1, c(0.2, -0.1))]).unwrap();
    let run = |dt: f64, scheme: Scheme| {
        let p = Arc::new(SolverParams::new(0.3, potential, pump(&d), dt, scheme).unwrap());
        evolve(&ic, 0.0, 2.0, &p, usize::MAX).unwrap().last().state.clone()
    };
    let reference = run(1e-4, Scheme::Rk4Reference);
    let errors: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| (&run(dt, Scheme::StrangSplit) - &reference).l2_norm())
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn charge_decays_exactly_for_the_whole_family() {
    let d = DomainSpec::build(2.0, 1.0, 24, 24, 8, 8).unwrap();
    let gamma = 0.4;
    for (a2, a1, a0) in [(1.0, 0.0, 0.0), (0.5, -2.0, 1.0), (2.0, 1.5, -0.5)] {
        let potential = QuarticPotential::new(a2, a1, a0).unwrap();
        let p = Arc::new(
            SolverParams::new(gamma, potential, QuasiPeriodicPump::zero(&d), 0.02, Scheme::StrangSplit).unwrap(),
        );
        let ic = dnls_core::sampling::gaussian_field(&d, 8.0, &mut dnls_core::sampling::rng_from_seed(4));
        let n0 = ic.l2_norm();
        let traj = evolve(&ic, 0.0, 10.0, &p, 5).unwrap();
        for s in traj.samples() {
            assert!((s.state.l2_norm() - (-gamma * s.t).exp() * n0).abs() <= 1e-12 * n0);
        }
    }
}

#[test]
fn blow_up_guard_reports_the_step() {
    // backward integration with strong damping amplifies until the guard trips
    let d = DomainSpec::build(PI, PI, 8, 8, 3, 3).unwrap();
    let p = Arc::new(
        SolverParams::new(
            5.0,
            QuarticPotential::linear(0.0, 0.0),
            QuasiPeriodicPump::zero(&d),
            0.1,
            Scheme::StrangSplit,
        )
        .unwrap(),
    );
    let ic = SpectralField::single_mode(&d, 1, 1, c(1.0, 0.0)).unwrap();
    match evolve(&ic, 0.0, -10.0, &p, 7) {
        Err(dnls_core::Error::BlowUp { t, step, sample, .. }) => {
            // ‖ψ‖_E = √2·e^{5|t|} crosses 1e8 just after |t| = 3.62
            assert!(t < -3.6 && t > -3.8, "t={t}");
            assert_eq!(step, (-t / 0.1).round() as usize);
            assert_eq!(sample, step / 7 + 1);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}
