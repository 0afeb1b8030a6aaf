//! Finite atomic measure spaces, partitions (sub-σ-algebras) and functions on them.
//!
//! Every subset of a finite atomic space is measurable, so a sub-σ-algebra is
//! exactly a partition of the points into blocks, and a function is measurable
//! for the sub-algebra iff it is constant on every block.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative threshold used to decide that a value is zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-14;

/// A finite set of points carrying strictly positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasureSpace {
    masses: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one point".into()));
        }
        if let Some((i, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::InvalidSpace(format!("mass of point {} is {m}, must be > 0", i + 1)));
        }
        Ok(Self { masses })
    }

    /// `n` points of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass of an index set.
    pub fn measure(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.masses[i]).sum()
    }

    /// Weighted inner product `Σ f_i conj(g_i) μ_i`.
    pub fn inner(&self, f: &MFunc, g: &MFunc) -> Result<Complex64> {
        self.check(f)?;
        self.check(g)?;
        Ok(f.values
            .iter()
            .zip(&g.values)
            .zip(&self.masses)
            .map(|((a, b), m)| a * b.conj() * *m)
            .sum())
    }

    pub fn norm(&self, f: &MFunc) -> Result<f64> {
        self.check(f)?;
        Ok(f.values
            .iter()
            .zip(&self.masses)
            .map(|(a, m)| a.norm_sqr() * m)
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn check(&self, f: &MFunc) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: f.len() });
        }
        Ok(())
    }
}

/// A partition of `{0, .., n-1}` into non-empty disjoint blocks.
///
/// Indices are 0-based internally; the instance file format uses 1-based ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "block {} contains index {} outside 1..={n}",
                        b + 1,
                        i + 1
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "index {} appears in blocks {} and {}",
                        i + 1,
                        block_of[i] + 1,
                        b + 1
                    )));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("index {} is not covered by any block", i + 1)));
        }
        Ok(Self { blocks, block_of })
    }

    /// The full algebra: every point is its own block.
    pub fn singletons(n: usize) -> Self {
        Self { blocks: (0..n).map(|i| vec![i]).collect(), block_of: (0..n).collect() }
    }

    /// The trivial algebra: one block holding every point.
    pub fn single_block(n: usize) -> Self {
        Self { blocks: vec![(0..n).collect()], block_of: vec![0; n] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }
}

/// A complex-valued function on a finite space, stored as point values.
#[derive(Debug, Clone, PartialEq)]
pub struct MFunc {
    values: Vec<Complex64>,
}

impl MFunc {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    /// Indicator function of an index set.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for &i in set {
            values[i] = Complex64::new(1.0, 0.0);
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// `|f|²` as a (real-valued) function.
    pub fn abs_sqr(&self) -> Self {
        self.map(|z| Complex64::new(z.norm_sqr(), 0.0))
    }

    pub fn abs(&self) -> Self {
        self.map(|z| Complex64::new(z.norm(), 0.0))
    }

    /// Pointwise product; panics on length mismatch.
    pub fn mul(&self, other: &MFunc) -> Self {
        assert_eq!(self.len(), other.len(), "pointwise product of functions of different length");
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn sub(&self, other: &MFunc) -> Self {
        assert_eq!(self.len(), other.len(), "difference of functions of different length");
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    /// Restriction to an index set (zero elsewhere).
    pub fn restrict(&self, set: &[usize]) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); self.len()];
        for &i in set {
            values[i] = self.values[i];
        }
        Self { values }
    }

    /// Essential supremum: on a space with positive masses this is `max |f_i|`.
    pub fn ess_sup(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Indices where `|f_i| > zero_tol · max_j |f_j|`; empty for the zero function.
    pub fn support(&self, zero_tol: f64) -> Vec<usize> {
        let top = self.ess_sup();
        if top == 0.0 {
            return Vec::new();
        }
        let cut = zero_tol * top;
        (0..self.len()).filter(|&i| self.values[i].norm() > cut).collect()
    }

    /// True iff `f` is constant on each block up to `tol·(1 + max|f|)`,
    /// measured against the μ-weighted block mean.
    pub fn is_block_constant(&self, space: &FiniteMeasureSpace, part: &Partition, tol: f64) -> bool {
        let bound = tol * (1.0 + self.ess_sup());
        part.blocks().iter().all(|block| {
            let mass = space.measure(block);
            let mean: Complex64 =
                block.iter().map(|&i| self.values[i] * space.mass(i)).sum::<Complex64>() / mass;
            block.iter().all(|&i| (self.values[i] - mean).norm() <= bound)
        })
    }
}

impl From<Vec<Complex64>> for MFunc {
    fn from(values: Vec<Complex64>) -> Self {
        Self::new(values)
    }
}
