//! Point spectrum, joint point spectrum and invertibility of `M_w E M_u`.
//!
//! The nonzero eigenvalues are read off structurally: on the range of `T`,
//! spanned by the functions `w·χ_B`, the operator acts diagonally with
//! `T(w·χ_B) = E(uw)|_B · w·χ_B`. Zero is an eigenvalue exactly when `T` is
//! rank deficient.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eig;
#[cfg(test)]
use crate::linalg::RANK_TOL_REL;
use crate::space::MFunc;
use crate::wct::WctInstance;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default merge tolerance: `1e-10 · (1 + max_B |E(uw)|_B|)`.
pub fn default_merge_tol(inst: &WctInstance) -> f64 {
    let top = inst.euw_blocks().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    1e-10 * (1.0 + top)
}

/// Collapses values closer than `tol` onto the first representative, then
/// sorts by real and imaginary part.
pub fn merge_values(values: impl IntoIterator<Item = Complex64>, tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for z in values {
        if !out.iter().any(|r| (r - z).norm() <= tol) {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Hausdorff distance between finite sets of complex numbers; zero for two
/// empty sets and infinite when exactly one is empty.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// True iff the two sets coincide after matching each element within `tol`.
pub fn same_set(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    hausdorff(a, b) <= tol
}

/// Distinct nonzero block values of `E(uw)` (merged at `tol`).
pub fn nonzero_point_spectrum(inst: &WctInstance, tol: f64) -> Vec<Complex64> {
    merge_values(inst.euw_blocks().iter().copied().filter(|z| z.norm() > tol), tol)
}

/// Rank of `T`: the number of blocks in `S ∩ G`. On a block `B` the operator
/// is `w·χ_B ⊗ ū·χ_B` up to scaling, which vanishes iff `u` or `w` does.
pub fn structural_rank(inst: &WctInstance) -> usize {
    inst.s_blocks().iter().zip(inst.g_blocks()).filter(|(s, g)| **s && **g).count()
}

/// `σ_p(T)`: the nonzero block values of `E(uw)`, plus `0` when `T` has a
/// nontrivial kernel (rank below `n`).
pub fn point_spectrum(inst: &WctInstance, tol: f64) -> Vec<Complex64> {
    let mut values = nonzero_point_spectrum(inst, tol);
    if structural_rank(inst) < inst.n() {
        values.push(ZERO);
    }
    merge_values(values, tol)
}

/// `σ_jp(T)` without forming `T`, for spaces too large for dense work.
///
/// `T` splits over the blocks. A nonzero `λ` is a joint eigenvalue iff some
/// block with `E(uw)|_B = λ` has vanishing Hölder gap (then `w ∝ ū` there).
/// `0` is one iff the common kernel of `T` and `T*` is nontrivial; on a block
/// in `S ∩ G` that kernel has dimension `|B| − 1` when the gap vanishes and
/// `|B| − 2` otherwise, and elsewhere it is the whole block. A gap counts as
/// zero when it is at most `gap_tol_rel · E|u|² E|w|²`.
pub fn joint_point_spectrum_structural(inst: &WctInstance, tol: f64, gap_tol_rel: f64) -> Vec<Complex64> {
    let mut values = Vec::new();
    let mut common_kernel = 0usize;
    for (b, block) in inst.partition().blocks().iter().enumerate() {
        let (a, c, z) = (inst.eu2_blocks()[b], inst.ew2_blocks()[b], inst.euw_blocks()[b]);
        if !(inst.s_blocks()[b] && inst.g_blocks()[b]) {
            common_kernel += block.len();
            continue;
        }
        let flat = a * c - z.norm_sqr() <= gap_tol_rel * a * c;
        if flat {
            if z.norm() > tol {
                values.push(z);
            }
            common_kernel += block.len() - 1;
        } else {
            common_kernel += block.len().saturating_sub(2);
        }
    }
    if common_kernel > 0 {
        values.push(ZERO);
    }
    merge_values(values, tol)
}

/// Eigenvector `w·χ_B` for the block `B` together with its eigenvalue `E(uw)|_B`.
pub fn eigen_witness(inst: &WctInstance, block: usize) -> Result<(MFunc, Complex64)> {
    let blocks = inst.partition().blocks();
    let members = blocks
        .get(block)
        .ok_or_else(|| Error::Parameter(format!("block {} does not exist ({} blocks)", block + 1, blocks.len())))?;
    let v = inst.w().restrict(members);
    if v.ess_sup() == 0.0 {
        return Err(Error::Precondition(format!("w vanishes on block {}; no witness", block + 1)));
    }
    Ok((v, inst.euw_blocks()[block]))
}

/// Smallest eigenvalue of `(T−λ)*(T−λ) + (T−λ)(T−λ)*`; zero iff `λ` has a
/// common eigenvector for `T` and `T*` (with `λ̄`).
pub fn joint_defect(inst: &WctInstance, lambda: Complex64) -> Result<f64> {
    let a = inst.as_operator().shift(lambda);
    let a_star = a.adjoint();
    let h = a_star.compose(&a).add(&a.compose(&a_star));
    let (values, _) = hermitian_eig(&h)?;
    Ok(values.last().copied().unwrap_or(0.0))
}

/// `σ_jp(T) ⊆ σ_p(T)`: the eigenvalues whose joint defect is at most
/// `tol · (1 + ‖T‖²)`.
pub fn joint_point_spectrum(inst: &WctInstance, tol: f64) -> Result<Vec<Complex64>> {
    let norm = inst.op_norm();
    let cut = tol * (1.0 + norm * norm);
    let mut out = Vec::new();
    for lambda in point_spectrum(inst, tol) {
        if joint_defect(inst, lambda)? <= cut {
            out.push(lambda);
        }
    }
    Ok(out)
}

/// True iff the smallest singular value exceeds `tol · s_max`.
pub fn is_invertible(inst: &WctInstance, tol: f64) -> bool {
    let svd = inst.as_operator().svd();
    let top = svd.s.first().copied().unwrap_or(0.0);
    let bottom = svd.s.last().copied().unwrap_or(0.0);
    top > 0.0 && bottom > tol * top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteMeasureSpace, Partition};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_blocks() -> Partition {
        Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    fn build(u: MFunc, w: MFunc, part: Partition) -> WctInstance {
        let n = u.len();
        WctInstance::build(FiniteMeasureSpace::uniform(n).unwrap(), part, u, w).unwrap()
    }

    fn nilpotent() -> WctInstance {
        build(MFunc::from_real(&[2.0, 0.0]), MFunc::from_real(&[0.0, 1.0]), Partition::single_block(2))
    }

    fn ramp() -> WctInstance {
        build(MFunc::ones(4), MFunc::from_real(&[1.0, 2.0, 3.0, 4.0]), two_blocks())
    }

    #[test]
    fn point_spectrum_examples() {
        let inst = build(MFunc::ones(4), MFunc::ones(4), two_blocks());
        let tol = default_merge_tol(&inst);
        assert!(same_set(&point_spectrum(&inst, tol), &[c(1.0, 0.0), c(0.0, 0.0)], 1e-12));

        let inst = ramp();
        let tol = default_merge_tol(&inst);
        assert!(same_set(&point_spectrum(&inst, tol), &[c(1.5, 0.0), c(3.5, 0.0), c(0.0, 0.0)], 1e-12));

        let inst = nilpotent();
        assert_eq!(point_spectrum(&inst, default_merge_tol(&inst)), vec![c(0.0, 0.0)]);
    }

    #[test]
    fn witness_examples() {
        let inst = ramp();
        let (v, lam) = eigen_witness(&inst, 0).unwrap();
        assert_eq!(v, MFunc::from_real(&[1.0, 2.0, 0.0, 0.0]));
        assert_eq!(lam, c(1.5, 0.0));
        let tv = inst.as_operator().apply(&v).unwrap();
        let norm = inst.space().norm(&v).unwrap();
        assert!(inst.space().norm(&tv.sub(&v.scale(lam))).unwrap() <= 1e-12 * norm * (1.0 + lam.norm()));

        let inst = build(MFunc::ones(4), MFunc::ones(4), two_blocks());
        let (v, lam) = eigen_witness(&inst, 0).unwrap();
        assert_eq!(v, MFunc::from_real(&[1.0, 1.0, 0.0, 0.0]));
        assert_eq!(lam, c(1.0, 0.0));

        let inst = nilpotent();
        let (v, lam) = eigen_witness(&inst, 0).unwrap();
        assert_eq!(v, MFunc::from_real(&[0.0, 1.0]));
        assert_eq!(lam, c(0.0, 0.0));
        assert_eq!(inst.as_operator().apply(&v).unwrap().ess_sup(), 0.0);
    }

    #[test]
    fn witness_requires_nonzero_w() {
        let inst = build(MFunc::ones(4), MFunc::from_real(&[0.0, 0.0, 1.0, 1.0]), two_blocks());
        assert!(matches!(eigen_witness(&inst, 0), Err(Error::Precondition(_))));
        assert!(matches!(eigen_witness(&inst, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn joint_spectrum_examples() {
        let inst = build(MFunc::ones(4), MFunc::ones(4), two_blocks());
        let tol = default_merge_tol(&inst);
        assert!(same_set(&joint_point_spectrum(&inst, tol).unwrap(), &[c(1.0, 0.0), c(0.0, 0.0)], 1e-12));

        let inst = nilpotent();
        assert!(joint_point_spectrum(&inst, default_merge_tol(&inst)).unwrap().is_empty());
    }

    #[test]
    fn joint_spectrum_of_normal_instance_equals_point_spectrum() {
        let u = MFunc::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0), c(0.7, 0.7)]);
        let k = [c(0.4, -1.1), c(2.0, 0.5)];
        let part = two_blocks();
        let w = MFunc::new((0..4).map(|i| k[part.block_of(i)] * u.get(i).conj()).collect());
        let inst = build(u, w, part);
        let tol = default_merge_tol(&inst);
        let sp = point_spectrum(&inst, tol);
        assert_eq!(sp.len(), 3);
        assert!(same_set(&joint_point_spectrum(&inst, tol).unwrap(), &sp, tol));
    }

    #[test]
    fn structural_joint_spectrum_matches_dense_examples() {
        for inst in [nilpotent(), ramp(), build(MFunc::ones(4), MFunc::ones(4), two_blocks())] {
            let tol = default_merge_tol(&inst);
            let dense = joint_point_spectrum(&inst, tol).unwrap();
            assert!(same_set(&dense, &joint_point_spectrum_structural(&inst, tol, 1e-10), tol));
            assert_eq!(structural_rank(&inst), inst.as_operator().rank(RANK_TOL_REL));
        }
    }

    #[test]
    fn invertibility_examples() {
        let inst = build(MFunc::ones(3), MFunc::ones(3), Partition::singletons(3));
        assert!(is_invertible(&inst, RANK_TOL_REL));
        let inst = build(
            MFunc::from_real(&[1.0, -2.0, 3.0, 0.5]),
            MFunc::from_real(&[2.0, 1.0, 1.0, 4.0]),
            two_blocks(),
        );
        assert!(!is_invertible(&inst, RANK_TOL_REL));
        let inst = build(MFunc::ones(2), MFunc::from_real(&[2.0, 0.0]), Partition::singletons(2));
        assert!(!is_invertible(&inst, RANK_TOL_REL));
    }

    #[test]
    fn merge_and_hausdorff() {
        let merged = merge_values([c(1.0, 0.0), c(1.0 + 1e-12, 0.0), c(-1.0, 0.0)], 1e-10);
        assert_eq!(merged, vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(hausdorff(&[], &[]), 0.0);
        assert!(hausdorff(&[c(0.0, 0.0)], &[]).is_infinite());
        assert!((hausdorff(&[c(0.0, 0.0), c(3.0, 0.0)], &[c(0.0, 1.0)]) - 10f64.sqrt()).abs() < 1e-15);
    }
}
