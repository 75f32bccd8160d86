//! Quartic potential `U(ψ) = a₂|ψ|⁴ + a₁|ψ|² + a₀`, its real gradient
//! `f = U'` and the Galerkin-projected nonlinear term.
//!
//! Complex numbers are identified with vectors of ℝ², so `f(ψ)` is the
//! gradient `(∂₁U, ∂₂U)` and `f'(ψ)` is the real Hessian of `U`.

use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{DomainSpec, SineScratch, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticPotential {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl QuarticPotential {
    /// Defocusing potential; `a2` must be strictly positive.
    pub fn new(a2: f64, a1: f64, a0: f64) -> Result<Self> {
        if !(a2.is_finite() && a1.is_finite() && a0.is_finite()) {
            return Err(Error::InvalidPotential("coefficients must be finite".into()));
        }
        if a2 <= 0.0 {
            return Err(Error::InvalidPotential(format!(
                "defocusing requires a2>0, got a2={a2}"
            )));
        }
        Ok(QuarticPotential { a2, a1, a0 })
    }

    /// Potential without the quartic head (`a2 = 0`). The resulting flow is
    /// linear; it is meant for reference runs with closed-form solutions and
    /// has no [`ConditionConstants`].
    pub fn linear(a1: f64, a0: f64) -> Self {
        QuarticPotential { a2: 0.0, a1, a0 }
    }

    /// `f(ψ) = g(|ψ|²)·ψ` with `g(s) = 4a₂s + 2a₁`.
    #[inline]
    pub fn radial_factor(&self, modulus_sqr: f64) -> f64 {
        4.0 * self.a2 * modulus_sqr + 2.0 * self.a1
    }

    #[inline]
    pub fn value(&self, psi: Complex64) -> f64 {
        let s = psi.norm_sqr();
        self.a2 * s * s + self.a1 * s + self.a0
    }

    #[inline]
    pub fn gradient(&self, psi: Complex64) -> Complex64 {
        psi * self.radial_factor(psi.norm_sqr())
    }

    /// Hessian `∂_j∂_i U` in the `(Re, Im)` coordinates.
    pub fn jacobian(&self, psi: Complex64) -> [[f64; 2]; 2] {
        let v = [psi.re, psi.im];
        let diag = self.radial_factor(psi.norm_sqr());
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = 8.0 * self.a2 * v[i] * v[j] + if i == j { diag } else { 0.0 };
            }
        }
        m
    }

    /// Third derivatives `∂_j∂_k f_i = 8a₂(δ_ik ψ_j + δ_jk ψ_i + δ_ij ψ_k)`.
    pub fn third_derivative(&self, psi: Complex64) -> [[[f64; 2]; 2]; 2] {
        let v = [psi.re, psi.im];
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut t = [[[0.0; 2]; 2]; 2];
        for (i, ti) in t.iter_mut().enumerate() {
            for (j, tij) in ti.iter_mut().enumerate() {
                for (k, e) in tij.iter_mut().enumerate() {
                    *e = 8.0 * self.a2 * (delta(i, k) * v[j] + delta(j, k) * v[i] + delta(i, j) * v[k]);
                }
            }
        }
        t
    }
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn symmetric_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let r = half_diff.hypot(m[0][1]);
    (mean - r, mean + r)
}

/// Structure constants for the growth conditions on `U`:
///
/// * `κ₁|ψ|⁴ − b₁ ≤ U(ψ) ≤ C(1 + |ψ|⁴)`
/// * `Re f(ψ)ψ̄ ≥ κ₂U(ψ) − b₂`
/// * `|f(ψ)| ≤ κ₃(1 + |ψ|³)`
/// * `|f'(ψ)| ≤ κ₄(1 + |ψ|²)` (operator norm)
/// * `f'(ψ) ≥ −b₃` (smallest eigenvalue)
/// * `|f''(ψ)| ≤ κ₅(1 + |ψ|)` (Frobenius norm)
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionConstants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub upper_c: f64,
}

/// Closed-form constants for the quartic family.
pub fn condition_constants(p: &QuarticPotential) -> Result<ConditionConstants> {
    if !(p.a2 > 0.0) {
        return Err(Error::InvalidPotential(format!(
            "defocusing requires a2>0, got a2={}",
            p.a2
        )));
    }
    let QuarticPotential { a2, a1, a0 } = *p;
    // (a2/2)s² + a1·s attains its minimum −a1²/(2a2) at s = −a1/a2 when a1 < 0
    let b1 = if a1 < 0.0 { a1 * a1 / (2.0 * a2) } else { 0.0 } - a0;
    // Re fψ̄ − κ₂U = (4 − κ₂)a₂s² + (2 − κ₂)a₁s − κ₂a₀
    let (kappa2, b2) = if a1 <= 0.0 {
        (4.0, (4.0 * a0).max(0.0))
    } else {
        (2.0, (2.0 * a0).max(0.0))
    };
    Ok(ConditionConstants {
        kappa1: a2 / 2.0,
        kappa2,
        kappa3: 4.0 * a2 + 2.0 * a1.abs(),
        kappa4: 12.0 * a2 + 2.0 * a1.abs(),
        kappa5: 16.0 * 3f64.sqrt() * a2,
        b1,
        b2,
        b3: (-2.0 * a1).max(0.0),
        upper_c: a2 + 0.5 * a1.abs() + a0.abs(),
    })
}

impl ConditionConstants {
    /// Checks all six pointwise bounds on a polar grid of `ψ` with
    /// `|ψ| ≤ max_modulus`. Returns a description of the first violation.
    pub fn verify_sampled(
        &self,
        p: &QuarticPotential,
        max_modulus: f64,
        radial: usize,
        angular: usize,
    ) -> std::result::Result<(), String> {
        let slack = |scale: f64| 1e-12 * (1.0 + scale.abs());
        for ir in 0..=radial {
            // quadratic spacing resolves the small-|ψ| region
            let u = ir as f64 / radial as f64;
            let r = max_modulus * u * u;
            for ia in 0..angular {
                let theta = 2.0 * std::f64::consts::PI * ia as f64 / angular as f64;
                let psi = Complex64::from_polar(r, theta);
                let r2 = r * r;
                let r4 = r2 * r2;
                let u_val = p.value(psi);
                let f = p.gradient(psi);

                let lower = self.kappa1 * r4 - self.b1;
                if u_val < lower - slack(lower) {
                    return Err(format!("lower quartic bound fails at |ψ|={r}"));
                }
                let upper = self.upper_c * (1.0 + r4);
                if u_val > upper + slack(upper) {
                    return Err(format!("upper quartic bound fails at |ψ|={r}"));
                }
                let pairing = (f * psi.conj()).re;
                let rhs = self.kappa2 * u_val - self.b2;
                if pairing < rhs - slack(rhs) {
                    return Err(format!("coercivity bound fails at |ψ|={r}"));
                }
                let bound3 = self.kappa3 * (1.0 + r * r2);
                if f.norm() > bound3 + slack(bound3) {
                    return Err(format!("gradient growth bound fails at |ψ|={r}"));
                }
                let jac = p.jacobian(psi);
                let (lo, hi) = symmetric_eigenvalues(&jac);
                let op_norm = lo.abs().max(hi.abs());
                let bound4 = self.kappa4 * (1.0 + r2);
                if op_norm > bound4 + slack(bound4) {
                    return Err(format!("Hessian growth bound fails at |ψ|={r}"));
                }
                if lo < -self.b3 - slack(self.b3 + hi) {
                    return Err(format!("Hessian lower bound fails at |ψ|={r}"));
                }
                let t = p.third_derivative(psi);
                let frob = t.iter().flatten().flatten().map(|x| x * x).sum::<f64>().sqrt();
                let bound5 = self.kappa5 * (1.0 + r);
                if frob > bound5 + slack(bound5) {
                    return Err(format!("third-derivative bound fails at |ψ|={r}"));
                }
            }
        }
        Ok(())
    }
}

/// Buffers for evaluating pointwise nonlinearities on the quadrature grid.
pub(crate) struct QuadratureWorkspace {
    scratch: SineScratch,
    grid: Array2<Complex64>,
}

impl QuadratureWorkspace {
    pub(crate) fn new(domain: &DomainSpec) -> Self {
        let plan = domain.quadrature();
        QuadratureWorkspace {
            scratch: plan.scratch(),
            grid: Array2::zeros(plan.grid_shape()),
        }
    }

    /// Synthesizes `coeffs` on the quadrature grid and returns the values.
    pub(crate) fn synthesize(&mut self, domain: &DomainSpec, coeffs: ArrayView2<Complex64>) -> &Array2<Complex64> {
        domain
            .quadrature()
            .synthesize_into(coeffs, &mut self.scratch, &mut self.grid);
        &self.grid
    }

    /// `out = P[g(|ψ|²)·ψ]` for `ψ` given by `coeffs`.
    pub(crate) fn project_radial(
        &mut self,
        domain: &DomainSpec,
        coeffs: ArrayView2<Complex64>,
        g: impl Fn(f64) -> f64,
        out: &mut Array2<Complex64>,
    ) {
        let plan = domain.quadrature();
        plan.synthesize_into(coeffs, &mut self.scratch, &mut self.grid);
        self.grid.mapv_inplace(|v| v * g(v.norm_sqr()));
        plan.analyze_into(self.grid.view(), &mut self.scratch, out);
    }
}

/// Galerkin nonlinear term `P_m f(ψ)`, evaluated on the dealiasing grid.
pub fn apply_nonlinearity(field: &SpectralField, p: &QuarticPotential) -> SpectralField {
    let domain = field.domain();
    let mut ws = QuadratureWorkspace::new(domain);
    let mut out = Array2::zeros((domain.mx(), domain.my()));
    ws.project_radial(domain, field.coeffs().view(), |s| p.radial_factor(s), &mut out);
    SpectralField::from_coeffs(domain, out).expect("shape matches domain")
}

/// Values of `ψ` on the interior nodes of the dealiasing grid, with the
/// per-node quadrature weight. Integrals of polynomials of degree ≤ 4 in
/// `ψ, ψ̄` over these nodes are exact.
pub fn quadrature_grid(field: &SpectralField) -> (Array2<Complex64>, f64) {
    let plan = field.domain().quadrature();
    (plan.synthesize(field.coeffs().view()), plan.weight())
}

/// `𝒰(ψ) = ∫ U(ψ) dx`.
pub fn potential_energy(field: &SpectralField, p: &QuarticPotential) -> f64 {
    let domain = field.domain();
    let mut ws = QuadratureWorkspace::new(domain);
    potential_energy_with(&mut ws, field, p)
}

pub(crate) fn potential_energy_with(ws: &mut QuadratureWorkspace, field: &SpectralField, p: &QuarticPotential) -> f64 {
    let domain = field.domain();
    let weight = domain.quadrature().weight();
    let grid = ws.synthesize(domain, field.coeffs().view());
    let sum = grid.iter().fold(0.0, |acc, v| {
        let s = v.norm_sqr();
        acc + p.a2 * s * s + p.a1 * s
    });
    // the constant term is integrated exactly rather than over interior nodes
    weight * sum + p.a0 * domain.area()
}

/// `⟨f(ψ), ψ⟩ = ∫ Re f(ψ)ψ̄ dx`.
pub fn nonlinear_pairing(field: &SpectralField, p: &QuarticPotential) -> f64 {
    let (grid, weight) = quadrature_grid(field);
    weight
        * grid.iter().fold(0.0, |acc, v| {
            let s = v.norm_sqr();
            acc + p.radial_factor(s) * s
        })
}

/// Exact `‖ψ‖_{L⁴}`.
pub fn l4_norm(field: &SpectralField) -> f64 {
    let (grid, weight) = quadrature_grid(field);
    let sum: f64 = grid.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum();
    (weight * sum).powf(0.25)
}

/// `∫ (1 + h²)|w|² dx` with `h = |ψ₁| + |ψ₂|`, the weight in the
/// difference inequality for two solutions.
pub fn weighted_difference_integral(psi1: &SpectralField, psi2: &SpectralField, w: &SpectralField) -> f64 {
    let (g1, weight) = quadrature_grid(psi1);
    let (g2, _) = quadrature_grid(psi2);
    let (gw, _) = quadrature_grid(w);
    let mut acc = 0.0;
    Zip::from(&g1).and(&g2).and(&gw).for_each(|a, b, c| {
        let h = a.norm() + b.norm();
        acc += (1.0 + h * h) * c.norm_sqr();
    });
    weight * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn potential_values() {
        let p = QuarticPotential::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.value(ONE), 1.0);
        let p = QuarticPotential::new(1.0, -1.0, 0.25).unwrap();
        assert_eq!(p.value(Complex64::new(0.0, 0.0)), 0.25);
        assert_relative_eq!(p.value(Complex64::new(0.0, 1.0)), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn gradient_values() {
        let p = QuarticPotential::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.gradient(ONE), Complex64::new(4.0, 0.0));
        assert_eq!(p.gradient(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        assert_eq!(p.gradient(Complex64::new(1.0, 1.0)), Complex64::new(8.0, 8.0));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = QuarticPotential::new(1.0, 0.0, 0.0).unwrap();
        let psi = Complex64::new(1.0, 1.0);
        let h = 1e-5;
        let d1 = (p.value(psi + h) - p.value(psi - h)) / (2.0 * h);
        let d2 = (p.value(psi + Complex64::i() * h) - p.value(psi - Complex64::i() * h)) / (2.0 * h);
        assert_relative_eq!(d1, 8.0, max_relative = 1e-6);
        assert_relative_eq!(d2, 8.0, max_relative = 1e-6);
    }

    #[test]
    fn jacobian_values() {
        let p = QuarticPotential::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.jacobian(ONE), [[12.0, 0.0], [0.0, 4.0]]);
        let q = QuarticPotential::new(2.0, 0.7, 0.0).unwrap();
        assert_eq!(q.jacobian(Complex64::new(0.0, 0.0)), [[1.4, 0.0], [0.0, 1.4]]);
        let m = q.jacobian(Complex64::new(0.3, -1.7));
        assert_eq!(m[0][1], m[1][0]);
    }

    #[test]
    fn constants_for_pure_quartic() {
        let c = condition_constants(&QuarticPotential::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(c.kappa2, 4.0);
        assert_eq!(c.b2, 0.0);
        assert_eq!(c.kappa3, 4.0);
        assert_eq!(c.kappa1, 0.5);
        c.verify_sampled(&QuarticPotential::new(1.0, 0.0, 0.0).unwrap(), 1e3, 400, 16)
            .unwrap();
    }

    #[test]
    fn constants_with_positive_quadratic_term() {
        let p = QuarticPotential::new(1.0, 1.0, 0.0).unwrap();
        let c = condition_constants(&p).unwrap();
        assert_eq!(c.b3, 0.0);
        // smallest Hessian eigenvalue over |ψ| ≤ 10³ stays ≥ 2a₁ = 2
        for i in 0..=1000 {
            let r = i as f64;
            let (lo, _) = symmetric_eigenvalues(&p.jacobian(Complex64::new(r, 0.0)));
            assert!(lo >= 2.0 - 1e-9);
        }
        c.verify_sampled(&p, 1e3, 400, 16).unwrap();
    }

    #[test]
    fn constants_hold_across_the_family() {
        for &(a2, a1, a0) in &[
            (1.0, -1.0, 0.25),
            (0.5, -3.0, -2.0),
            (2.0, 0.5, 4.0),
            (0.1, 0.0, -1.0),
            (3.0, 5.0, 0.0),
        ] {
            let p = QuarticPotential::new(a2, a1, a0).unwrap();
            condition_constants(&p)
                .unwrap()
                .verify_sampled(&p, 1e3, 600, 24)
                .unwrap_or_else(|e| panic!("{:?}: {e}", (a2, a1, a0)));
        }
    }

    #[test]
    fn rejects_focusing_or_linear() {
        assert!(QuarticPotential::new(-1.0, 0.0, 0.0).is_err());
        assert!(QuarticPotential::new(0.0, 0.0, 0.0).is_err());
        assert!(condition_constants(&QuarticPotential::linear(1.0, 0.0)).is_err());
    }

    #[test]
    fn potential_energy_closed_forms() {
        let d = DomainSpec::build(PI, PI, 64, 64, 21, 21).unwrap();
        let zero = SpectralField::zeros(&d);
        assert_eq!(
            potential_energy(&zero, &QuarticPotential::new(1.0, 0.0, 0.0).unwrap()),
            0.0
        );
        let e = potential_energy(&zero, &QuarticPotential::new(1.0, 0.0, 2.5).unwrap());
        assert_relative_eq!(e, 2.5 * PI * PI, max_relative = 1e-15);

        let f = SpectralField::single_mode(&d, 1, 1, ONE).unwrap();
        let e = potential_energy(&f, &QuarticPotential::new(1.0, 0.0, 0.0).unwrap());
        assert_relative_eq!(e, 9.0 / (4.0 * PI * PI), max_relative = 1e-13);
    }

    #[test]
    fn linear_nonlinearity_is_a_multiple() {
        let d = DomainSpec::build(PI, 2.0, 16, 16, 5, 4).unwrap();
        let f = SpectralField::from_sparse(
            &d,
            &[
                (1, 1, ONE),
                (5, 4, Complex64::new(-0.3, 0.7)),
                (2, 3, Complex64::new(0.0, 1.1)),
            ],
        )
        .unwrap();
        let p = QuarticPotential::linear(0.75, 0.0);
        let out = apply_nonlinearity(&f, &p);
        for (a, b) in out.coeffs().iter().zip(f.coeffs().iter()) {
            assert!((a - b * 1.5).norm() < 1e-14);
        }
        assert_eq!(apply_nonlinearity(&SpectralField::zeros(&d), &p).norm_sqr(), 0.0);
    }

    #[test]
    fn l4_norm_of_single_mode() {
        let d = DomainSpec::build(PI, PI, 16, 16, 4, 4).unwrap();
        let f = SpectralField::single_mode(&d, 1, 1, ONE).unwrap();
        assert_relative_eq!(l4_norm(&f).powi(4), 9.0 / (4.0 * PI * PI), max_relative = 1e-13);
    }
}
