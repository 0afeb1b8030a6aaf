//! Conditional expectation onto a partition sub-algebra: μ-weighted block averaging.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::LinOperator;
use crate::space::{FiniteMeasureSpace, MFunc, Partition};

/// Per-block μ-weighted means of `f`, one value per block.
pub fn block_means(f: &MFunc, space: &FiniteMeasureSpace, part: &Partition) -> Result<Vec<Complex64>> {
    space.check(f)?;
    if part.len() != space.len() {
        return Err(crate::Error::Dimension { expected: space.len(), got: part.len() });
    }
    Ok(part
        .blocks()
        .iter()
        .map(|block| {
            let (num, den) = block.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(num, den), &i| {
                (num + f.get(i) * space.mass(i), den + space.mass(i))
            });
            num / den
        })
        .collect())
}

/// Spreads one value per block back onto the points.
pub fn from_block_values(values: &[Complex64], part: &Partition) -> MFunc {
    MFunc::new((0..part.len()).map(|i| values[part.block_of(i)]).collect())
}

/// `E(f)`: on each block `B`, `(Σ_B f_i μ_i) / μ(B)`.
pub fn cond_exp(f: &MFunc, space: &FiniteMeasureSpace, part: &Partition) -> Result<MFunc> {
    Ok(from_block_values(&block_means(f, space, part)?, part))
}

/// Dense matrix of `E`, for oracle comparisons. Hot paths use [`cond_exp`].
pub fn cond_exp_operator(space: &FiniteMeasureSpace, part: &Partition) -> LinOperator {
    let n = space.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for block in part.blocks() {
        let mass = space.measure(block);
        for &i in block {
            for &j in block {
                m[(i, j)] = Complex64::new(space.mass(j) / mass, 0.0);
            }
        }
    }
    LinOperator::from_point_matrix(m, space.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, op_norm};

    fn blocks_2x2() -> Partition {
        Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn cond_exp_examples() {
        let sp = FiniteMeasureSpace::uniform(4).unwrap();
        let f = MFunc::from_real(&[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(cond_exp(&f, &sp, &blocks_2x2()).unwrap(), MFunc::from_real(&[2.0, 2.0, 6.0, 6.0]));

        let skew = FiniteMeasureSpace::new(vec![0.2, 5.0, 1.5, 0.7]).unwrap();
        let e1 = cond_exp(&MFunc::ones(4), &skew, &blocks_2x2()).unwrap();
        assert!(e1.sub(&MFunc::ones(4)).ess_sup() < 1e-15);

        let sp2 = FiniteMeasureSpace::new(vec![1.0, 3.0]).unwrap();
        let f = MFunc::from_real(&[4.0, 0.0]);
        assert_eq!(cond_exp(&f, &sp2, &Partition::single_block(2)).unwrap(), MFunc::from_real(&[1.0, 1.0]));
    }

    #[test]
    fn cond_exp_dimension_mismatch() {
        let sp = FiniteMeasureSpace::uniform(3).unwrap();
        assert!(cond_exp(&MFunc::ones(2), &sp, &Partition::single_block(3)).is_err());
    }

    #[test]
    fn operator_examples() {
        let sp = FiniteMeasureSpace::new(vec![0.4, 2.0, 1.0]).unwrap();
        let e = cond_exp_operator(&sp, &Partition::singletons(3));
        assert!(e.sub(&LinOperator::identity(sp.clone())).frame_fro_norm() == 0.0);

        let half = FiniteMeasureSpace::uniform(2).unwrap();
        let e = cond_exp_operator(&half, &Partition::single_block(2));
        let (vals, _) = hermitian_eig(&e).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && vals[1].abs() < 1e-14);

        let sp4 = FiniteMeasureSpace::uniform(4).unwrap();
        let e = cond_exp_operator(&sp4, &blocks_2x2());
        let (vals, _) = hermitian_eig(&e).unwrap();
        let trace: f64 = vals.iter().sum();
        assert!((trace - 2.0).abs() < 1e-13);
        assert_eq!(vals.iter().filter(|v| v.abs() > 0.5).count(), 2);
        assert!((op_norm(&e) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn operator_matches_block_sums() {
        let sp = FiniteMeasureSpace::new(vec![0.3, 1.7, 2.2, 0.9, 4.0]).unwrap();
        let part = Partition::new(5, vec![vec![0, 3], vec![1, 2, 4]]).unwrap();
        let f = MFunc::new((0..5).map(|k| Complex64::new(k as f64 - 1.5, 0.3 * k as f64)).collect());
        let direct = cond_exp(&f, &sp, &part).unwrap();
        let via_matrix = cond_exp_operator(&sp, &part).apply(&f).unwrap();
        assert!(direct.sub(&via_matrix).ess_sup() < 1e-14);
    }
}
