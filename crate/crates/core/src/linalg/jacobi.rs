//! Cyclic Jacobi kernels for complex Hermitian matrices: the two-sided
//! eigensolver and the one-sided (Hestenes) singular value decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Couplings below this fraction of the (rescaled) matrix size are dropped:
/// they cannot move any eigenvalue or singular value by more than `ε²·‖A‖`,
/// and rotating them would work with subnormal numbers.
const NEGLIGIBLE: f64 = f64::EPSILON * f64::EPSILON;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Unitary 2×2 rotation `G = [[c, s], [-s·ē, c·ē]]` that diagonalizes the
/// Hermitian pencil `[[a, b], [conj(b), d]]`, where `e = b/|b|`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    g11: Complex64,
    g12: Complex64,
    g21: Complex64,
    g22: Complex64,
    /// `t·|b|`: the diagonal shift applied by the rotation.
    shift: f64,
}

impl Rotation {
    fn new(a: f64, d: f64, b: Complex64) -> Self {
        let mag = b.norm();
        let e = b / mag;
        let e_conj = (e / e.norm()).conj();
        let theta = (d - a) / (2.0 * mag);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + theta.hypot(1.0))
        };
        let c = 1.0 / t.hypot(1.0);
        let s = t * c;
        Self {
            g11: Complex64::new(c, 0.0),
            g12: Complex64::new(s, 0.0),
            g21: e_conj * (-s),
            g22: e_conj * c,
            shift: t * mag,
        }
    }

    /// `M ← M·G` on columns `p`, `q`.
    fn apply_right(&self, m: &mut DMatrix<Complex64>, p: usize, q: usize) {
        for k in 0..m.nrows() {
            let x = m[(k, p)];
            let y = m[(k, q)];
            m[(k, p)] = x * self.g11 + y * self.g21;
            m[(k, q)] = x * self.g12 + y * self.g22;
        }
    }

    /// `M ← G^H·M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut DMatrix<Complex64>, p: usize, q: usize) {
        for k in 0..m.ncols() {
            let x = m[(p, k)];
            let y = m[(q, k)];
            m[(p, k)] = self.g11.conj() * x + self.g21.conj() * y;
            m[(q, k)] = self.g12.conj() * x + self.g22.conj() * y;
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix. Returns eigenvalues in
/// descending order and the unitary matrix whose columns are the matching
/// eigenvectors. Only the Hermitian part of `h` is used.
pub fn hermitian_jacobi(h: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = h.nrows();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let scale = max_abs(h);
    if scale == 0.0 || !scale.is_finite() {
        return ((0..n).map(|i| h[(i, i)].re).collect(), v);
    }
    let mut a = (h + h.adjoint()) * Complex64::new(0.5 / scale, 0.0);
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let floor = NEGLIGIBLE * a.norm();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if b.norm() <= floor || b.norm() <= 0.5 * f64::EPSILON * (app * aqq).abs().sqrt() {
                    continue;
                }
                let rot = Rotation::new(app, aqq, b);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
                a[(p, p)] = Complex64::new(app - rot.shift, 0.0);
                a[(q, q)] = Complex64::new(aqq + rot.shift, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re * scale).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Thin singular value decomposition `A = U·diag(s)·V^H` of a square matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors; the column of a zero singular value is zero.
    pub u: DMatrix<Complex64>,
    /// Singular values, descending.
    pub s: Vec<f64>,
    /// Right singular vectors (unitary).
    pub v: DMatrix<Complex64>,
}

impl Svd {
    /// Number of singular values above `rel_tol · s_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.s.first().copied().unwrap_or(0.0);
        self.s.iter().take_while(|&&s| s > cut && s > 0.0).count()
    }
}

/// One-sided Jacobi SVD: orthogonalizes the columns of `a` by plane rotations,
/// which yields singular values with small absolute error relative to `s_max`.
pub fn one_sided_jacobi_svd(a: &DMatrix<Complex64>) -> Svd {
    let n = a.ncols();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let scale = max_abs(a);
    if scale == 0.0 || !scale.is_finite() {
        return Svd { u: DMatrix::zeros(a.nrows(), n), s: vec![0.0; n], v };
    }
    let mut w = a / Complex64::new(scale, 0.0);
    let floor = NEGLIGIBLE * w.norm_squared();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = w.column(p);
                    let cq = w.column(q);
                    (cp.norm_squared(), cq.norm_squared(), cp.dotc(&cq))
                };
                if gamma.norm() <= floor || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j] * scale).collect();
    let u = DMatrix::from_fn(w.nrows(), n, |r, c| {
        let j = order[c];
        if norms[j] > 0.0 {
            w[(r, j)] / norms[j]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let v = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Svd { u, s, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pseudo_random(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        DMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn rotation_is_unitary_and_diagonalizes() {
        let (a, d, b) = (2.0, -1.0, c(0.3, -0.7));
        let rot = Rotation::new(a, d, b);
        let g = DMatrix::from_row_slice(2, 2, &[rot.g11, rot.g12, rot.g21, rot.g22]);
        let m = DMatrix::from_row_slice(2, 2, &[c(a, 0.0), b, b.conj(), c(d, 0.0)]);
        let eye = g.adjoint() * &g;
        assert!((eye - DMatrix::identity(2, 2)).norm() < 1e-15);
        let out = g.adjoint() * m * g;
        assert!(out[(0, 1)].norm() < 1e-15);
        assert!((out[(0, 0)].re - (a - rot.shift)).abs() < 1e-14);
        assert!((out[(1, 1)].re - (d + rot.shift)).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        for seed in 0..5 {
            let x = pseudo_random(16, seed);
            let h = &x + x.adjoint();
            let (vals, vecs) = hermitian_jacobi(&h);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                16,
                vals.iter().map(|&x| c(x, 0.0)),
            ));
            let rebuilt = &vecs * lam * vecs.adjoint();
            assert!((rebuilt - &h).norm() <= 1e-12 * h.norm());
            assert!((vecs.adjoint() * &vecs - DMatrix::identity(16, 16)).norm() < 1e-12);
        }
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        for seed in 0..5 {
            let a = pseudo_random(12, 100 + seed);
            let svd = one_sided_jacobi_svd(&a);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
            let sig = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                12,
                svd.s.iter().map(|&x| c(x, 0.0)),
            ));
            let rebuilt = &svd.u * sig * svd.v.adjoint();
            assert!((rebuilt - &a).norm() <= 1e-13 * a.norm());
        }
    }

    #[test]
    fn svd_of_rank_deficient_matrix_has_tiny_tail() {
        let x = pseudo_random(10, 7);
        let mut a = x.clone();
        // rank 3 product
        let left = x.columns(0, 3).into_owned();
        let right = pseudo_random(10, 8).rows(0, 3).into_owned();
        a.copy_from(&(left * right));
        let svd = one_sided_jacobi_svd(&a);
        assert_eq!(svd.rank(1e-12), 3);
        assert!(svd.s[3] <= 1e-14 * svd.s[0]);
    }

    #[test]
    fn tiny_columns_keep_rotations_unitary() {
        // Column norms squared underflow to subnormals here.
        let mut a = pseudo_random(6, 11);
        for r in 0..6 {
            a[(r, 1)] *= 1e-160;
            a[(r, 4)] *= 1e-155;
        }
        let svd = one_sided_jacobi_svd(&a);
        let vv = svd.v.adjoint() * &svd.v - DMatrix::<Complex64>::identity(6, 6);
        assert!(vv.norm() < 1e-13);
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(6, svd.s.iter().map(|&x| c(x, 0.0))));
        assert!((&svd.u * s * svd.v.adjoint() - &a).norm() < 1e-14 * svd.s[0]);

        let h = a.adjoint() * &a;
        let (values, vecs) = hermitian_jacobi(&h);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(6, values.iter().map(|&x| c(x, 0.0))));
        assert!((&vecs * d * vecs.adjoint() - &h).norm() < 1e-13 * values[0]);
        assert!((vecs.adjoint() * &vecs - DMatrix::<Complex64>::identity(6, 6)).norm() < 1e-13);
    }

    #[test]
    fn zero_matrix_decomposes() {
        let z = DMatrix::<Complex64>::zeros(3, 3);
        assert_eq!(one_sided_jacobi_svd(&z).s, vec![0.0; 3]);
        assert_eq!(hermitian_jacobi(&z).0, vec![0.0; 3]);
    }
}
