//! Dense complex operators on the weighted space `L²(μ)`.
//!
//! Operators store their matrix on point values. All spectral work is done in
//! the orthonormal frame `Â = D·A·D⁻¹`, `D = diag(√μ_i)`, where the weighted
//! adjoint becomes the conjugate transpose.

mod jacobi;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::{FiniteMeasureSpace, MFunc};

pub use jacobi::{hermitian_jacobi, one_sided_jacobi_svd, Svd};

/// Relative rank cutoff for kernels, ranges and partial isometries.
pub const RANK_TOL_REL: f64 = 1e-12;

/// Relative asymmetry accepted by the Hermitian routines.
pub const HERMITIAN_TOL_REL: f64 = 1e-12;

/// Relative amount of negative spectrum `psd_power` tolerates before refusing.
pub const PSD_NEGATIVE_TOL_REL: f64 = 1e-10;

/// Eigenvalues at or below this fraction of the largest are treated as zero by
/// `psd_power`.
pub const PSD_FLOOR_REL: f64 = 1e-12;

/// A dense operator on `L²(μ)` for a finite measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOperator {
    matrix: DMatrix<Complex64>,
    space: FiniteMeasureSpace,
}

fn sqrt_masses(space: &FiniteMeasureSpace) -> Vec<f64> {
    space.masses().iter().map(|m| m.sqrt()).collect()
}

impl LinOperator {
    /// Wraps a matrix acting on point values.
    ///
    /// Panics if the matrix is not `n×n` for the space's `n`.
    pub fn from_point_matrix(matrix: DMatrix<Complex64>, space: FiniteMeasureSpace) -> Self {
        assert!(
            matrix.nrows() == space.len() && matrix.ncols() == space.len(),
            "operator matrix is {}x{} on a space of {} points",
            matrix.nrows(),
            matrix.ncols(),
            space.len()
        );
        Self { matrix, space }
    }

    /// Builds the operator whose frame matrix is `frame`.
    pub fn from_frame_matrix(frame: DMatrix<Complex64>, space: FiniteMeasureSpace) -> Self {
        let d = sqrt_masses(&space);
        let n = space.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| frame[(i, j)] * (d[j] / d[i]));
        Self::from_point_matrix(matrix, space)
    }

    pub fn identity(space: FiniteMeasureSpace) -> Self {
        let n = space.len();
        Self::from_point_matrix(DMatrix::identity(n, n), space)
    }

    pub fn zero(space: FiniteMeasureSpace) -> Self {
        let n = space.len();
        Self::from_point_matrix(DMatrix::zeros(n, n), space)
    }

    /// Multiplication operator `M_f`.
    pub fn multiplication(f: &MFunc, space: FiniteMeasureSpace) -> Result<Self> {
        space.check(f)?;
        let diag = DVector::from_column_slice(f.values());
        Ok(Self::from_point_matrix(DMatrix::from_diagonal(&diag), space))
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn point_matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `Â = D·A·D⁻¹`: the same operator expressed in an orthonormal basis.
    pub fn to_frame(&self) -> DMatrix<Complex64> {
        let d = sqrt_masses(&self.space);
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.matrix[(i, j)] * (d[i] / d[j]))
    }

    /// Adjoint with respect to the weighted inner product:
    /// `(A*)_{ij} = conj(A_{ji})·μ_j/μ_i`.
    pub fn adjoint(&self) -> Self {
        let mu = self.space.masses();
        let n = self.dim();
        let matrix = DMatrix::from_fn(n, n, |i, j| self.matrix[(j, i)].conj() * (mu[j] / mu[i]));
        Self { matrix, space: self.space.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOperator) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self { matrix: &self.matrix * &other.matrix, space: self.space.clone() }
    }

    pub fn add(&self, other: &LinOperator) -> Self {
        Self { matrix: &self.matrix + &other.matrix, space: self.space.clone() }
    }

    pub fn sub(&self, other: &LinOperator) -> Self {
        Self { matrix: &self.matrix - &other.matrix, space: self.space.clone() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { matrix: &self.matrix * c, space: self.space.clone() }
    }

    /// `A − λ·I`.
    pub fn shift(&self, lambda: Complex64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..self.dim() {
            matrix[(i, i)] -= lambda;
        }
        Self { matrix, space: self.space.clone() }
    }

    pub fn apply(&self, f: &MFunc) -> Result<MFunc> {
        self.space.check(f)?;
        let x = DVector::from_column_slice(f.values());
        Ok(MFunc::new((&self.matrix * x).iter().copied().collect()))
    }

    /// Frobenius norm of the frame matrix; an upper bound for the operator norm.
    pub fn frame_fro_norm(&self) -> f64 {
        self.to_frame().norm()
    }

    /// `‖Â − Â^H‖_F`: zero iff the operator is self-adjoint in `L²(μ)`.
    pub fn hermitian_defect(&self) -> f64 {
        let f = self.to_frame();
        (&f - f.adjoint()).norm()
    }

    pub fn svd(&self) -> Svd {
        one_sided_jacobi_svd(&self.to_frame())
    }

    /// Rank at `rel_tol · s_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        self.svd().rank(rel_tol)
    }
}

fn check_hermitian(h: &LinOperator) -> Result<DMatrix<Complex64>> {
    let f = h.to_frame();
    let defect = (&f - f.adjoint()).norm();
    let scale = f.norm();
    if defect > HERMITIAN_TOL_REL * scale {
        return Err(Error::Precondition(format!(
            "operator is not self-adjoint: asymmetry {defect:e} vs norm {scale:e}"
        )));
    }
    Ok(f)
}

fn from_spectral(values: &[f64], vectors: &DMatrix<Complex64>, space: &FiniteMeasureSpace) -> LinOperator {
    let n = values.len();
    let scaled = DMatrix::from_fn(n, n, |r, c| vectors[(r, c)] * values[c]);
    LinOperator::from_frame_matrix(scaled * vectors.adjoint(), space.clone())
}

/// Eigenvalues (descending) and frame eigenvectors of a self-adjoint operator.
pub fn hermitian_eig(h: &LinOperator) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let f = check_hermitian(h)?;
    Ok(hermitian_jacobi(&f))
}

/// Eigen-decomposition of a positive semidefinite operator, kept so that
/// several powers can be taken from one factorization.
#[derive(Debug, Clone)]
pub struct PsdSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
    space: FiniteMeasureSpace,
}

impl PsdSpectrum {
    /// Checks positivity: the smallest eigenvalue may not fall below
    /// `-PSD_NEGATIVE_TOL_REL · λ_max`.
    pub fn new(h: &LinOperator) -> Result<Self> {
        let (values, vectors) = hermitian_eig(h)?;
        let top = values.first().copied().unwrap_or(0.0).max(0.0);
        let bottom = values.last().copied().unwrap_or(0.0);
        if bottom < -PSD_NEGATIVE_TOL_REL * top || (top == 0.0 && bottom < 0.0) {
            return Err(Error::Precondition(format!(
                "operator is not positive semidefinite: eigenvalue {bottom:e} vs largest {top:e}"
            )));
        }
        Ok(Self { values, vectors, space: h.space().clone() })
    }

    /// `H^p` for `p > 0`. Eigenvalues at or below `PSD_FLOOR_REL · λ_max`
    /// (including the small negative ones roundoff produces) become zero.
    pub fn power(&self, p: f64) -> Result<LinOperator> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("psd_power exponent must be > 0, got {p}")));
        }
        let top = self.values.first().copied().unwrap_or(0.0).max(0.0);
        let floor = PSD_FLOOR_REL * top;
        let powered: Vec<f64> = self.values.iter().map(|&x| if x > floor { x.powf(p) } else { 0.0 }).collect();
        Ok(from_spectral(&powered, &self.vectors, &self.space))
    }
}

/// `H^p` for a positive semidefinite `H` and `p > 0`.
pub fn psd_power(h: &LinOperator, p: f64) -> Result<LinOperator> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("psd_power exponent must be > 0, got {p}")));
    }
    PsdSpectrum::new(h)?.power(p)
}

/// True iff the smallest eigenvalue is `≥ −tol · max(1, max |λ|)`.
pub fn is_psd(h: &LinOperator, tol: f64) -> Result<bool> {
    let (values, _) = hermitian_eig(h)?;
    Ok(psd_verdict(&values, tol))
}

pub(crate) fn psd_verdict(values: &[f64], tol: f64) -> bool {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    values.iter().all(|&v| v >= -tol * scale)
}

/// Largest singular value.
pub fn op_norm(a: &LinOperator) -> f64 {
    a.svd().s.first().copied().unwrap_or(0.0)
}

/// Polar decomposition `T = U·|T|` with `N(U) = N(|T|)`.
#[derive(Debug, Clone)]
pub struct Polar {
    /// The partial isometry.
    pub u: LinOperator,
    /// `|T| = (T*T)^{1/2}`.
    pub abs: LinOperator,
    /// Frame SVD of `T` the factors were assembled from.
    pub svd: Svd,
    /// Absolute cutoff below which singular values count as zero.
    pub rank_cut: f64,
}

impl Polar {
    pub fn rank(&self) -> usize {
        self.svd.s.iter().take_while(|&&s| s > self.rank_cut).count()
    }

    /// `|T|^p` for `p ≥ 0`; `p = 0` gives the orthogonal projection onto
    /// `range(|T|)` (the `0⁰ = 0` convention).
    pub fn abs_power(&self, p: f64) -> LinOperator {
        let values: Vec<f64> = self
            .svd
            .s
            .iter()
            .map(|&s| if s > self.rank_cut { if p == 0.0 { 1.0 } else { s.powf(p) } } else { 0.0 })
            .collect();
        from_spectral(&values, &self.svd.v, self.abs.space())
    }

    /// Orthogonal projection onto `range(|T|) = N(T)^⊥`.
    pub fn range_projection(&self) -> LinOperator {
        self.abs_power(0.0)
    }

    /// `|T*| = U·|T|·U*`.
    pub fn abs_adjoint(&self) -> LinOperator {
        let values: Vec<f64> =
            self.svd.s.iter().map(|&s| if s > self.rank_cut { s } else { 0.0 }).collect();
        from_spectral(&values, &self.svd.u, self.abs.space())
    }
}

/// Polar decomposition through the one-sided Jacobi SVD `T̂ = W·Σ·V^H`:
/// `|T| = V·Σ·V^H`, and `U` sends each right singular vector with
/// `s > 1e-12·s_max` to `T·v/s` and kills the rest.
pub fn polar(t: &LinOperator) -> Polar {
    let svd = t.svd();
    let n = t.dim();
    let s_max = svd.s.first().copied().unwrap_or(0.0);
    let rank_cut = RANK_TOL_REL * s_max;
    let space = t.space().clone();

    let abs_vals: Vec<f64> = svd.s.iter().map(|&s| if s > rank_cut { s } else { 0.0 }).collect();
    let abs = from_spectral(&abs_vals, &svd.v, &space);

    let mut u_frame = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        if svd.s[k] > rank_cut {
            u_frame += svd.u.column(k) * svd.v.column(k).adjoint();
        }
    }
    let u = LinOperator::from_frame_matrix(u_frame, space);
    Polar { u, abs, svd, rank_cut }
}
