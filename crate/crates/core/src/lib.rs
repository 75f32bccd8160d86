//! Spectral Galerkin simulation of the damped, driven nonlinear
//! Schrödinger equation
//!
//! ```text
//! i·∂ₜψ = −Δψ − iγψ + f(ψ) + p(x, t)
//! ```
//!
//! on a rectangle with homogeneous Dirichlet conditions, together with
//! diagnostics for energy balance, dissipativity and the pullback attractor.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: sine eigenbasis, transforms, norms.
//! * [`nonlinearity`]: the quartic potential family and its projection.
//! * [`pumping`]: quasi-periodic driving terms.
//! * [`integrator`]: split-step and RK4 time stepping.
//! * [`energy`]: energy functionals, balance residuals, decay envelopes.
//! * [`attractor`]: absorbing balls, pullback ensembles, Galerkin
//!   convergence and continuous-dependence studies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attractor;
pub mod energy;
pub mod error;
pub mod exec;
pub mod integrator;
pub mod nonlinearity;
pub mod pumping;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use integrator::{evolve, rhs, step_rk4, step_strang, Scheme, SolverParams, Trajectory, TrajectorySample};
pub use nonlinearity::{
    apply_nonlinearity, condition_constants, potential_energy, ConditionConstants, QuarticPotential,
};
pub use pumping::{PumpMode, QuasiPeriodicPump};
pub use spectral::{DomainSpec, GridField, SpectralField};
