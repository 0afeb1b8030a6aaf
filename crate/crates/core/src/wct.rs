//! Weighted conditional-type operators `T = M_w·E·M_u`, `T f = w·E(u·f)`.
//!
//! Every operator in the polar/Aluthge calculus of `T` has the factored shape
//! `f ↦ left · c · E(right · f)` with a block-constant coefficient `c`; the
//! closed forms below are assembled in that shape ([`FactoredOp`]) and only
//! materialized as dense matrices for comparison with the numeric route.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::condexp::{block_means, from_block_values};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, polar, LinOperator, Polar};
use crate::space::{FiniteMeasureSpace, MFunc, Partition, DEFAULT_ZERO_TOL};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `f ↦ left · coeff_B · E(right · f)`, with one coefficient per block.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredOp {
    pub left: MFunc,
    pub coeff: Vec<Complex64>,
    pub right: MFunc,
}

impl FactoredOp {
    /// Applies the operator blockwise in O(n).
    pub fn apply(&self, f: &MFunc, space: &FiniteMeasureSpace, part: &Partition) -> Result<MFunc> {
        let inner = block_means(&self.right.mul(f), space, part)?;
        let scaled: Vec<Complex64> = inner.iter().zip(&self.coeff).map(|(a, c)| a * c).collect();
        Ok(self.left.mul(&from_block_values(&scaled, part)))
    }

    /// Dense matrix form: entry `(i, j)` is `left_i · c_B · right_j · μ_j / μ(B)`
    /// when `i, j` share the block `B`, zero otherwise.
    pub fn to_operator(&self, space: &FiniteMeasureSpace, part: &Partition) -> LinOperator {
        let n = space.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (b, block) in part.blocks().iter().enumerate() {
            let c = self.coeff[b];
            if c == ZERO {
                continue;
            }
            let mass = space.measure(block);
            for &i in block {
                let li = self.left.get(i) * c;
                for &j in block {
                    m[(i, j)] = li * self.right.get(j) * (space.mass(j) / mass);
                }
            }
        }
        LinOperator::from_point_matrix(m, space.clone())
    }
}

/// `T = M_w E M_u` on a finite space, with the block-constant data its
/// calculus is written in.
#[derive(Debug, Clone)]
pub struct WctInstance {
    space: FiniteMeasureSpace,
    part: Partition,
    u: MFunc,
    w: MFunc,
    /// Per-block `E(|u|²)`.
    eu2: Vec<f64>,
    /// Per-block `E(|w|²)`.
    ew2: Vec<f64>,
    /// Per-block `E(uw)`.
    euw: Vec<Complex64>,
    /// Per-block `E(u)`.
    eu: Vec<Complex64>,
    /// Per-block membership in `S = S(E(|u|²))`.
    in_s: Vec<bool>,
    /// Per-block membership in `G = S(E(|w|²))`.
    in_g: Vec<bool>,
}

fn block_support(values: &[f64], zero_tol: f64) -> Vec<bool> {
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    values.iter().map(|v| top > 0.0 && v.abs() > zero_tol * top).collect()
}

fn real_parts(values: Vec<Complex64>) -> Vec<f64> {
    values.into_iter().map(|z| z.re).collect()
}

impl WctInstance {
    pub fn build(space: FiniteMeasureSpace, part: Partition, u: MFunc, w: MFunc) -> Result<Self> {
        Self::build_with_tol(space, part, u, w, DEFAULT_ZERO_TOL)
    }

    pub fn build_with_tol(
        space: FiniteMeasureSpace,
        part: Partition,
        u: MFunc,
        w: MFunc,
        zero_tol: f64,
    ) -> Result<Self> {
        space.check(&u)?;
        space.check(&w)?;
        if part.len() != space.len() {
            return Err(Error::Dimension { expected: space.len(), got: part.len() });
        }
        let eu2 = real_parts(block_means(&u.abs_sqr(), &space, &part)?);
        let ew2 = real_parts(block_means(&w.abs_sqr(), &space, &part)?);
        let euw = block_means(&u.mul(&w), &space, &part)?;
        let eu = block_means(&u, &space, &part)?;
        let in_s = block_support(&eu2, zero_tol);
        let in_g = block_support(&ew2, zero_tol);
        Ok(Self { space, part, u, w, eu2, ew2, euw, eu, in_s, in_g })
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn u(&self) -> &MFunc {
        &self.u
    }

    pub fn w(&self) -> &MFunc {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.part.num_blocks()
    }

    pub fn eu2_blocks(&self) -> &[f64] {
        &self.eu2
    }

    pub fn ew2_blocks(&self) -> &[f64] {
        &self.ew2
    }

    pub fn euw_blocks(&self) -> &[Complex64] {
        &self.euw
    }

    pub fn eu_blocks(&self) -> &[Complex64] {
        &self.eu
    }

    /// Which blocks lie in `S`.
    pub fn s_blocks(&self) -> &[bool] {
        &self.in_s
    }

    /// Which blocks lie in `G`.
    pub fn g_blocks(&self) -> &[bool] {
        &self.in_g
    }

    fn spread_real(&self, values: &[f64]) -> MFunc {
        let c: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        from_block_values(&c, &self.part)
    }

    /// `E(|u|²)` as a function on the points.
    pub fn eu2(&self) -> MFunc {
        self.spread_real(&self.eu2)
    }

    pub fn ew2(&self) -> MFunc {
        self.spread_real(&self.ew2)
    }

    pub fn euw(&self) -> MFunc {
        from_block_values(&self.euw, &self.part)
    }

    pub fn eu(&self) -> MFunc {
        from_block_values(&self.eu, &self.part)
    }

    fn points_where(&self, flags: &[bool]) -> Vec<usize> {
        (0..self.n()).filter(|&i| flags[self.part.block_of(i)]).collect()
    }

    /// Point set `S = S(E(|u|²))`.
    pub fn s_set(&self) -> Vec<usize> {
        self.points_where(&self.in_s)
    }

    /// Point set `G = S(E(|w|²))`.
    pub fn g_set(&self) -> Vec<usize> {
        self.points_where(&self.in_g)
    }

    /// Blockwise coefficient `f(B)` on the blocks selected by `mask`, zero elsewhere.
    fn coeff(&self, mask: impl Fn(usize) -> bool, f: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        (0..self.num_blocks()).map(|b| if mask(b) { f(b) } else { ZERO }).collect()
    }

    fn in_sg(&self, b: usize) -> bool {
        self.in_s[b] && self.in_g[b]
    }

    /// `T` itself in factored form.
    pub fn factored(&self) -> FactoredOp {
        FactoredOp { left: self.w.clone(), coeff: vec![Complex64::new(1.0, 0.0); self.num_blocks()], right: self.u.clone() }
    }

    /// `T` as a dense operator.
    pub fn as_operator(&self) -> LinOperator {
        self.factored().to_operator(&self.space, &self.part)
    }

    /// `T*`: `g ↦ ū·E(w̄·g)`.
    pub fn adjoint_factored(&self) -> FactoredOp {
        FactoredOp { left: self.u.conj(), coeff: vec![Complex64::new(1.0, 0.0); self.num_blocks()], right: self.w.conj() }
    }

    /// `‖T‖ = ‖(E|w|²)^{1/2} (E|u|²)^{1/2}‖_∞`.
    pub fn norm_formula(&self) -> f64 {
        self.eu2.iter().zip(&self.ew2).map(|(a, b)| (a * b).sqrt()).fold(0.0, f64::max)
    }

    /// `|T| f = (E|w|² / E|u|²)^{1/2} χ_S ū E(u f)`.
    pub fn abs_t_factored(&self) -> FactoredOp {
        FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_s[b], |b| Complex64::new((self.ew2[b] / self.eu2[b]).sqrt(), 0.0)),
            right: self.u.clone(),
        }
    }

    pub fn abs_t_closed(&self) -> LinOperator {
        self.abs_t_factored().to_operator(&self.space, &self.part)
    }

    /// `U f = (χ_{S∩G} / (E|w|² E|u|²))^{1/2} w E(u f)`.
    pub fn partial_isometry_factored(&self) -> FactoredOp {
        FactoredOp {
            left: self.w.clone(),
            coeff: self.coeff(|b| self.in_sg(b), |b| Complex64::new((self.ew2[b] * self.eu2[b]).sqrt().recip(), 0.0)),
            right: self.u.clone(),
        }
    }

    pub fn partial_isometry_closed(&self) -> LinOperator {
        self.partial_isometry_factored().to_operator(&self.space, &self.part)
    }

    /// Aluthge transform `T̂ f = χ_S E(uw)/E|u|² · ū E(u f)`.
    pub fn aluthge_factored(&self) -> FactoredOp {
        FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_s[b], |b| self.euw[b] / self.eu2[b]),
            right: self.u.clone(),
        }
    }

    pub fn aluthge_closed(&self) -> LinOperator {
        self.aluthge_factored().to_operator(&self.space, &self.part)
    }

    /// `T̂* f = χ_S conj(E(uw))/E|u|² · ū E(u f)`.
    pub fn aluthge_adjoint_closed(&self) -> LinOperator {
        FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_s[b], |b| self.euw[b].conj() / self.eu2[b]),
            right: self.u.clone(),
        }
        .to_operator(&self.space, &self.part)
    }

    /// `|T̂| = |T̂*|`: `f ↦ χ_S |E(uw)|/E|u|² · ū E(u f)`.
    pub fn aluthge_abs_closed(&self) -> LinOperator {
        FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_s[b], |b| Complex64::new(self.euw[b].norm() / self.eu2[b], 0.0)),
            right: self.u.clone(),
        }
        .to_operator(&self.space, &self.part)
    }

    /// Block coefficient `E|w|^{(r−1)/2} E|u|^{(r−3)/2}` on `S∩G`.
    fn gen_weight(&self, b: usize, r: f64) -> f64 {
        self.ew2[b].powf((r - 1.0) / 2.0) * self.eu2[b].powf((r - 3.0) / 2.0)
    }

    /// Generalized Aluthge transform
    /// `T̃ f = E|w|²^{(r−1)/2} E|u|²^{(r−3)/2} χ_{S∩G} E(uw) ū E(u f)`.
    /// The formula does not depend on `t`; it is still validated.
    pub fn gen_aluthge_factored(&self, r: f64, t: f64) -> Result<FactoredOp> {
        check_rt(r, t)?;
        Ok(FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_sg(b), |b| self.euw[b] * self.gen_weight(b, r)),
            right: self.u.clone(),
        })
    }

    pub fn gen_aluthge_closed(&self, r: f64, t: f64) -> Result<LinOperator> {
        Ok(self.gen_aluthge_factored(r, t)?.to_operator(&self.space, &self.part))
    }

    /// `|T̃| = |T̃*|`: the coefficient of `T̃` with `E(uw)` replaced by `|E(uw)|`.
    pub fn gen_aluthge_abs_closed(&self, r: f64, t: f64) -> Result<LinOperator> {
        check_rt(r, t)?;
        Ok(FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(|b| self.in_sg(b), |b| Complex64::new(self.euw[b].norm() * self.gen_weight(b, r), 0.0)),
            right: self.u.clone(),
        }
        .to_operator(&self.space, &self.part))
    }

    /// `|T|^p f = (E|w|² E|u|²)^{p/2} / E|u|² · χ_{S∩G} ū E(u f)` for `p > 0`.
    pub fn abs_t_power_closed(&self, p: f64) -> LinOperator {
        FactoredOp {
            left: self.u.conj(),
            coeff: self.coeff(
                |b| self.in_sg(b),
                |b| Complex64::new((self.ew2[b] * self.eu2[b]).powf(p / 2.0) / self.eu2[b], 0.0),
            ),
            right: self.u.clone(),
        }
        .to_operator(&self.space, &self.part)
    }

    /// Numeric polar decomposition of the dense `T`.
    pub fn polar_numeric(&self) -> Polar {
        polar(&self.as_operator())
    }

    /// `|T|^ε U |T|^{1−ε}` computed numerically.
    pub fn aluthge_eps_numeric(&self, eps: f64) -> Result<LinOperator> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        Ok(sandwich(&self.polar_numeric(), eps, 1.0 - eps))
    }

    /// `|T|^{1/2} U |T|^{1/2}` computed numerically.
    pub fn aluthge_numeric(&self) -> LinOperator {
        sandwich(&self.polar_numeric(), 0.5, 0.5)
    }

    /// `|T|^t U |T|^{r−t}` computed numerically (`|T|⁰` is the range projection).
    pub fn gen_aluthge_numeric(&self, r: f64, t: f64) -> Result<LinOperator> {
        check_rt(r, t)?;
        Ok(sandwich(&self.polar_numeric(), t, r - t))
    }

    /// Numeric operator norm of the dense `T`.
    pub fn op_norm(&self) -> f64 {
        op_norm(&self.as_operator())
    }
}

/// `|T|^a U |T|^b` from a computed polar decomposition.
pub fn sandwich(p: &Polar, a: f64, b: f64) -> LinOperator {
    p.abs_power(a).compose(&p.u).compose(&p.abs_power(b))
}

fn check_rt(r: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("r must be > 0, got {r}")));
    }
    if !(0.0..=r).contains(&t) {
        return Err(Error::Parameter(format!("t must lie in [0, r] = [0, {r}], got {t}")));
    }
    Ok(())
}
