//! Dirichlet sine eigenbasis on a rectangle.
//!
//! A [`SpectralField`] stores coefficients with respect to the
//! L²-orthonormal eigenfunctions
//! `φ_jk(x, y) = 2/√(Lx·Ly) · sin(jπx/Lx) · sin(kπy/Ly)`, `1 ≤ j ≤ Mx`,
//! `1 ≤ k ≤ My`, in row-major `(j, k)` order. Grid values live on the
//! interior nodes `x_i = i·Lx/Nx`, `y_l = l·Ly/Ny`; the boundary nodes are
//! implicitly zero.
//!
//! Two grids are attached to every domain: the collocation grid `(Nx, Ny)`
//! used by [`SpectralField::to_grid`] / [`GridField::to_coeffs`], and a
//! quadrature grid with `2·(M + 1)` intervals per axis on which products of
//! four retained modes integrate exactly. All nonlinear functionals use the
//! latter.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Separable sine synthesis/analysis between `mx × my` coefficients and the
/// `(gx-1) × (gy-1)` interior nodes of a uniform grid.
#[derive(Clone)]
pub(crate) struct SinePlan {
    gx: usize,
    gy: usize,
    /// `mx × (gx-1)`, entries `√(2/Lx)·sin(jπi/gx)`.
    sx: Array2<Complex64>,
    sx_t: Array2<Complex64>,
    sy: Array2<Complex64>,
    sy_t: Array2<Complex64>,
    weight: f64,
}

fn sine_table(len: f64, intervals: usize, modes: usize) -> Array2<Complex64> {
    let scale = (2.0 / len).sqrt();
    Array2::from_shape_fn((modes, intervals - 1), |(j, i)| {
        let arg = ((j + 1) * (i + 1)) as f64 * PI / intervals as f64;
        Complex64::new(scale * arg.sin(), 0.0)
    })
}

impl SinePlan {
    fn new(lx: f64, ly: f64, gx: usize, gy: usize, mx: usize, my: usize) -> Self {
        let sx = sine_table(lx, gx, mx);
        let sy = sine_table(ly, gy, my);
        SinePlan {
            gx,
            gy,
            sx_t: sx.t().to_owned(),
            sy_t: sy.t().to_owned(),
            sx,
            sy,
            weight: (lx / gx as f64) * (ly / gy as f64),
        }
    }

    pub(crate) fn grid_shape(&self) -> (usize, usize) {
        (self.gx - 1, self.gy - 1)
    }

    /// Quadrature weight per interior node.
    pub(crate) fn weight(&self) -> f64 {
        self.weight
    }

    pub(crate) fn scratch(&self) -> SineScratch {
        let (mx, my) = (self.sx.nrows(), self.sy.nrows());
        let (nx, ny) = self.grid_shape();
        SineScratch {
            mode_by_node: Array2::zeros((mx, ny)),
            node_by_mode: Array2::zeros((nx, my)),
        }
    }

    pub(crate) fn synthesize_into(
        &self,
        coeffs: ArrayView2<Complex64>,
        scratch: &mut SineScratch,
        out: &mut Array2<Complex64>,
    ) {
        general_mat_mul(C1, &coeffs, &self.sy, C0, &mut scratch.mode_by_node);
        general_mat_mul(C1, &self.sx_t, &scratch.mode_by_node, C0, out);
    }

    pub(crate) fn analyze_into(
        &self,
        grid: ArrayView2<Complex64>,
        scratch: &mut SineScratch,
        out: &mut Array2<Complex64>,
    ) {
        general_mat_mul(C1, &grid, &self.sy_t, C0, &mut scratch.node_by_mode);
        general_mat_mul(
            Complex64::new(self.weight, 0.0),
            &self.sx,
            &scratch.node_by_mode,
            C0,
            out,
        );
    }

    pub(crate) fn synthesize(&self, coeffs: ArrayView2<Complex64>) -> Array2<Complex64> {
        let mut scratch = self.scratch();
        let mut out = Array2::zeros(self.grid_shape());
        self.synthesize_into(coeffs, &mut scratch, &mut out);
        out
    }

    pub(crate) fn analyze(&self, grid: ArrayView2<Complex64>) -> Array2<Complex64> {
        let mut scratch = self.scratch();
        let mut out = Array2::zeros((self.sx.nrows(), self.sy.nrows()));
        self.analyze_into(grid, &mut scratch, &mut out);
        out
    }
}

/// Intermediate buffers for one [`SinePlan`]; one per thread.
pub(crate) struct SineScratch {
    mode_by_node: Array2<Complex64>,
    node_by_mode: Array2<Complex64>,
}

/// Rectangle, collocation grid and retained-mode cut.
///
/// Immutable once built; share it behind the returned `Arc`.
pub struct DomainSpec {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    mx: usize,
    my: usize,
    eigenvalues: Array2<f64>,
    collocation: SinePlan,
    quadrature: SinePlan,
}

impl DomainSpec {
    /// Validates the geometry and precomputes eigenvalues and sine tables.
    ///
    /// The mode cut must leave headroom on the collocation grid:
    /// `1 ≤ Mx < Nx` and `1 ≤ My < Ny`.
    pub fn build(lx: f64, ly: f64, nx: usize, ny: usize, mx: usize, my: usize) -> Result<Arc<Self>> {
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "side lengths must be positive, got Lx={lx}, Ly={ly}"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidDomain(format!(
                "need at least 2 grid intervals per axis, got Nx={nx}, Ny={ny}"
            )));
        }
        if mx == 0 || my == 0 {
            return Err(Error::InvalidDomain("mode cut must be at least 1x1".into()));
        }
        if mx >= nx {
            return Err(Error::InvalidDomain(format!(
                "mode cut requires Mx<Nx (Mx={mx}, Nx={nx})"
            )));
        }
        if my >= ny {
            return Err(Error::InvalidDomain(format!(
                "mode cut requires My<Ny (My={my}, Ny={ny})"
            )));
        }
        let eigenvalues = Array2::from_shape_fn((mx, my), |(j, k)| {
            let a = (j + 1) as f64 * PI / lx;
            let b = (k + 1) as f64 * PI / ly;
            a * a + b * b
        });
        Ok(Arc::new(DomainSpec {
            lx,
            ly,
            nx,
            ny,
            mx,
            my,
            eigenvalues,
            collocation: SinePlan::new(lx, ly, nx, ny, mx, my),
            quadrature: SinePlan::new(lx, ly, 2 * (mx + 1), 2 * (my + 1), mx, my),
        }))
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn my(&self) -> usize {
        self.my
    }

    /// Number of retained modes `m = Mx·My`.
    pub fn mode_count(&self) -> usize {
        self.mx * self.my
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// `λ(j,k) = (jπ/Lx)² + (kπ/Ly)²`, 1-based indices.
    pub fn eigenvalue(&self, j: usize, k: usize) -> f64 {
        self.eigenvalues[[j - 1, k - 1]]
    }

    pub fn eigenvalues(&self) -> &Array2<f64> {
        &self.eigenvalues
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues[[0, 0]]
    }

    /// Collocation quadrature weight `Lx·Ly/(Nx·Ny)`.
    pub fn collocation_weight(&self) -> f64 {
        self.collocation.weight()
    }

    /// Interior collocation grid shape `(Nx-1, Ny-1)`.
    pub fn grid_shape(&self) -> (usize, usize) {
        self.collocation.grid_shape()
    }

    /// Interior shape of the dealiasing quadrature grid.
    pub fn quadrature_shape(&self) -> (usize, usize) {
        self.quadrature.grid_shape()
    }

    pub(crate) fn quadrature(&self) -> &SinePlan {
        &self.quadrature
    }

    /// True when both refer to the same rectangle, grid and cut.
    pub fn same_as(&self, other: &DomainSpec) -> bool {
        std::ptr::eq(self, other)
            || (self.lx == other.lx
                && self.ly == other.ly
                && self.nx == other.nx
                && self.ny == other.ny
                && self.mx == other.mx
                && self.my == other.my)
    }

    fn check_mode(&self, j: usize, k: usize) -> Result<()> {
        if j == 0 || k == 0 || j > self.mx || k > self.my {
            return Err(Error::ModeOutOfRange {
                j,
                k,
                mx: self.mx,
                my: self.my,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("mx", &self.mx)
            .field("my", &self.my)
            .finish()
    }
}

/// Coefficients of ψ in the Dirichlet sine eigenbasis.
#[derive(Clone, Debug)]
pub struct SpectralField {
    domain: Arc<DomainSpec>,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn zeros(domain: &Arc<DomainSpec>) -> Self {
        SpectralField {
            domain: Arc::clone(domain),
            coeffs: Array2::zeros((domain.mx, domain.my)),
        }
    }

    pub fn from_coeffs(domain: &Arc<DomainSpec>, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (domain.mx, domain.my) {
            return Err(Error::InvalidArgument(format!(
                "coefficient array has shape {:?}, expected ({}, {})",
                coeffs.dim(),
                domain.mx,
                domain.my
            )));
        }
        Ok(SpectralField {
            domain: Arc::clone(domain),
            coeffs,
        })
    }

    /// Field with a single nonzero coefficient at the 1-based mode `(j, k)`.
    pub fn single_mode(domain: &Arc<DomainSpec>, j: usize, k: usize, value: Complex64) -> Result<Self> {
        Self::from_sparse(domain, &[(j, k, value)])
    }

    /// Builds a field from `(j, k, c_jk)` entries; repeated modes accumulate.
    pub fn from_sparse(domain: &Arc<DomainSpec>, entries: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut field = Self::zeros(domain);
        for &(j, k, c) in entries {
            domain.check_mode(j, k)?;
            field.coeffs[[j - 1, k - 1]] += c;
        }
        Ok(field)
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    /// Coefficient at the 1-based mode `(j, k)`.
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.coeffs[[j - 1, k - 1]]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn same_domain(&self, other: &SpectralField) -> bool {
        self.domain.same_as(&other.domain)
    }

    /// `Σ|c_jk|²`, i.e. `‖ψ‖²` by Parseval.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Energy norm `‖∇ψ‖`.
    pub fn e_norm(&self) -> f64 {
        self.sobolev_norm(1.0)
    }

    /// `(Σ λ^s |c|²)^{1/2}`: `s = 0` is L², `s = 1` the energy norm and
    /// `s = -1` the dual norm.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = if s == 0.0 {
            self.norm_sqr()
        } else if s == 1.0 {
            Zip::from(&self.coeffs)
                .and(&self.domain.eigenvalues)
                .fold(0.0, |acc, c, &lam| acc + lam * c.norm_sqr())
        } else {
            Zip::from(&self.coeffs)
                .and(&self.domain.eigenvalues)
                .fold(0.0, |acc, c, &lam| acc + lam.powf(s) * c.norm_sqr())
        };
        sum.sqrt()
    }

    /// `-Δψ`: every coefficient multiplied by its eigenvalue.
    pub fn apply_laplacian(&self) -> SpectralField {
        let mut out = self.clone();
        Zip::from(&mut out.coeffs)
            .and(&self.domain.eigenvalues)
            .for_each(|c, &lam| *c *= lam);
        out
    }

    /// Real inner product `Re Σ c_jk(self)·conj(c_jk(other))`, which is the
    /// L² pairing of ℂ ≅ ℝ² valued functions.
    pub fn inner_real(&self, other: &SpectralField) -> Result<f64> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        Ok(self.inner_real_unchecked(other))
    }

    pub(crate) fn inner_real_unchecked(&self, other: &SpectralField) -> f64 {
        Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0, |acc, a, b| acc + a.re * b.re + a.im * b.im)
    }

    /// Grid values at the interior collocation nodes.
    pub fn to_grid(&self) -> GridField {
        GridField {
            domain: Arc::clone(&self.domain),
            values: self.domain.collocation.synthesize(self.coeffs.view()),
        }
    }

    /// Direct evaluation of the eigenfunction sum at a point.
    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        let d = &self.domain;
        let norm = 2.0 / d.area().sqrt();
        let sx: Vec<f64> = (1..=d.mx).map(|j| (j as f64 * PI * x / d.lx).sin()).collect();
        let sy: Vec<f64> = (1..=d.my).map(|k| (k as f64 * PI * y / d.ly).sin()).collect();
        let mut acc = C0;
        for ((j, k), c) in self.coeffs.indexed_iter() {
            acc += c * (sx[j] * sy[k]);
        }
        acc * norm
    }

    /// Copies this field onto another cut of the same rectangle: shared
    /// modes are kept, modes absent from `target` are dropped and new ones
    /// are zero. Moving to a larger cut is zero extension, to a smaller one
    /// the orthogonal projection.
    pub fn transfer_to(&self, target: &Arc<DomainSpec>) -> Result<SpectralField> {
        if self.domain.lx != target.lx || self.domain.ly != target.ly {
            return Err(Error::DomainMismatch);
        }
        let mut out = SpectralField::zeros(target);
        let mx = self.domain.mx.min(target.mx);
        let my = self.domain.my.min(target.my);
        for j in 0..mx {
            for k in 0..my {
                out.coeffs[[j, k]] = self.coeffs[[j, k]];
            }
        }
        Ok(out)
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: Complex64, other: &SpectralField) {
        assert!(self.same_domain(other), "axpy across domains");
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|s, &o| *s += a * o);
    }

    pub fn scale(&mut self, a: Complex64) {
        self.coeffs.mapv_inplace(|c| c * a);
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert!(self.same_domain(rhs), "addition across domains");
        self.coeffs += &rhs.coeffs;
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        assert!(self.same_domain(rhs), "subtraction across domains");
        self.coeffs -= &rhs.coeffs;
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| -c);
        out
    }
}

impl Mul<Complex64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: Complex64) -> SpectralField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self * Complex64::new(rhs, 0.0)
    }
}

/// Values on the interior collocation nodes.
#[derive(Clone, Debug)]
pub struct GridField {
    domain: Arc<DomainSpec>,
    values: Array2<Complex64>,
}

impl GridField {
    pub fn new(domain: &Arc<DomainSpec>, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != domain.grid_shape() {
            return Err(Error::InvalidArgument(format!(
                "grid values have shape {:?}, expected {:?}",
                values.dim(),
                domain.grid_shape()
            )));
        }
        Ok(GridField {
            domain: Arc::clone(domain),
            values,
        })
    }

    /// Samples `f(x, y)` at the interior nodes.
    pub fn from_fn(domain: &Arc<DomainSpec>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let hx = domain.lx / domain.nx as f64;
        let hy = domain.ly / domain.ny as f64;
        let values = Array2::from_shape_fn(domain.grid_shape(), |(i, l)| {
            f((i + 1) as f64 * hx, (l + 1) as f64 * hy)
        });
        GridField {
            domain: Arc::clone(domain),
            values,
        }
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// Projection of the sine interpolant onto the retained modes.
    pub fn to_coeffs(&self) -> SpectralField {
        SpectralField {
            domain: Arc::clone(&self.domain),
            coeffs: self.domain.collocation.analyze(self.values.view()),
        }
    }

    /// Discrete L² norm with the collocation weight.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * self.domain.collocation_weight()).sqrt()
    }
}
