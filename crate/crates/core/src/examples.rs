//! Discretized and truncated reproducers of four worked examples of
//! weighted conditional-type operators.
//!
//! Every reproducer returns the instance together with a report. The report
//! separates asserted invariants (`checks`), which must hold for any correct
//! implementation, from comparisons against stated closed forms and claimed
//! spectra (`comparisons`), which are recorded whichever way they come out.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condexp::cond_exp;
use crate::error::{Error, Result};
use crate::report::{Record, Value};
use crate::space::{FiniteMeasureSpace, MFunc, Partition};
use crate::spectral::{hausdorff, joint_point_spectrum_structural, merge_values, point_spectrum};
use crate::verifier::{holder_gap_blocks, holder_scale, CAUCHY_SCHWARZ_TOL};
use crate::wct::WctInstance;

/// Relative merge tolerance used for the example spectra.
const SPECTRUM_TOL_REL: f64 = 1e-10;
/// A Hölder gap at most this times `E|u|² E|w|²` counts as zero.
const FLAT_GAP_REL: f64 = 1e-10;
/// Samples used for the orbit inequality.
const ORBIT_SAMPLES: usize = 100;
const ORBIT_SEED: u64 = 31;
/// Largest space on which the orbit example also runs a dense norm check.
const DENSE_LIMIT: usize = 128;
/// Agreement tolerance for the geometric-series closed forms.
const SERIES_TOL: f64 = 1e-9;

pub type PointSampler<'a> = &'a dyn Fn(f64) -> Complex64;
pub type AtomSampler<'a> = &'a dyn Fn(usize) -> Complex64;

/// An asserted invariant: `value ≤ bound` (or `value > bound` when `lower`).
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub lower: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.to_string(), value, bound, lower: false }
    }

    fn above(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.to_string(), value, bound, lower: true }
    }

    pub fn pass(&self) -> bool {
        if self.lower {
            self.value > self.bound
        } else {
            self.value <= self.bound
        }
    }

    fn to_record(&self, id: &str) -> Record {
        Record::new()
            .with("kind", "example_check")
            .with("example", id)
            .with("name", self.name.as_str())
            .with("value", self.value)
            .with("bound", self.bound)
            .with("relation", if self.lower { ">" } else { "<=" })
            .with("pass", self.pass())
    }
}

/// A stated value set against the computed one; never affects the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub name: String,
    pub claimed: Value,
    pub computed: Value,
    pub discrepancy: f64,
    pub tol: f64,
}

impl Comparison {
    fn new(name: &str, claimed: impl Into<Value>, computed: impl Into<Value>, discrepancy: f64, tol: f64) -> Self {
        Self { name: name.to_string(), claimed: claimed.into(), computed: computed.into(), discrepancy, tol }
    }

    fn scalar(name: &str, claimed: f64, computed: f64, tol: f64) -> Self {
        Self::new(name, claimed, computed, (claimed - computed).abs(), tol)
    }

    pub fn agree(&self) -> bool {
        self.discrepancy <= self.tol
    }

    fn to_record(&self, id: &str) -> Record {
        Record::new()
            .with("kind", "example_comparison")
            .with("example", id)
            .with("name", self.name.as_str())
            .with("claimed", self.claimed.clone())
            .with("computed", self.computed.clone())
            .with("discrepancy", self.discrepancy)
            .with("tol", self.tol)
            .with("agree", self.agree())
    }
}

#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub id: &'static str,
    pub params: Record,
    pub checks: Vec<Check>,
    pub comparisons: Vec<Comparison>,
    /// Per-block table, one record per block.
    pub rows: Vec<Record>,
    pub data: Record,
}

impl ExampleReport {
    fn new(id: &'static str, params: Record) -> Self {
        Self { id, params, checks: Vec::new(), comparisons: Vec::new(), rows: Vec::new(), data: Record::new() }
    }

    /// True iff every asserted invariant holds.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn comparison(&self, name: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.name == name)
    }

    pub fn summary_record(&self) -> Record {
        Record::new()
            .with("kind", "example_summary")
            .with("example", self.id)
            .with("params", self.params.clone())
            .with("checks_passed", self.checks.iter().filter(|c| c.pass()).count())
            .with("checks_total", self.checks.len())
            .with("comparisons_agree", self.comparisons.iter().filter(|c| c.agree()).count())
            .with("comparisons_total", self.comparisons.len())
            .with("data", self.data.clone())
            .with("ok", self.ok())
    }

    /// Rows, then checks, then comparisons, then the summary.
    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self.rows.clone();
        out.extend(self.checks.iter().map(|c| c.to_record(self.id)));
        out.extend(self.comparisons.iter().map(|c| c.to_record(self.id)));
        out.push(self.summary_record());
        out
    }

    /// Invariants every reproduced instance must satisfy.
    fn push_core_checks(&mut self, inst: &WctInstance) {
        let scale = holder_scale(inst);
        let min_gap = holder_gap_blocks(inst).into_iter().fold(f64::INFINITY, f64::min);
        self.checks.push(Check::at_most("cauchy_schwarz", -min_gap / scale, CAUCHY_SCHWARZ_TOL));
        let (space, part) = (inst.space(), inst.partition());
        let constant = [inst.eu2(), inst.ew2(), inst.euw()].iter().all(|f| f.is_block_constant(space, part, 1e-12));
        self.checks.push(Check::at_most("cache_block_constancy", if constant { 0.0 } else { 1.0 }, 0.0));
    }
}

#[derive(Debug, Clone)]
pub struct Example {
    pub instance: WctInstance,
    pub report: ExampleReport,
}

fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn spectrum_tol(inst: &WctInstance) -> f64 {
    SPECTRUM_TOL_REL * (1.0 + inst.euw_blocks().iter().fold(0.0_f64, |m, z| m.max(z.norm())))
}

fn contains_zero(set: &[Complex64]) -> bool {
    set.iter().any(|z| *z == Complex64::new(0.0, 0.0))
}

fn nonzero(set: &[Complex64]) -> Vec<Complex64> {
    set.iter().copied().filter(|z| *z != Complex64::new(0.0, 0.0)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Equal-mass cells on `[0, 1]` with their midpoints.
fn midpoints(cells: usize) -> Vec<f64> {
    (0..cells).map(|k| (k as f64 + 0.5) / cells as f64).collect()
}

/// The rotation `x ↦ x + 1/n (mod 1)` on `n·cells` equal cells; expectation
/// onto its invariant sets is the average over each `n`-point orbit.
pub fn orbit_space(n: usize, cells: usize) -> Result<(FiniteMeasureSpace, Partition)> {
    if n < 2 {
        return Err(Error::Parameter(format!("orbit length n must be at least 2, got {n}")));
    }
    if cells < 1 {
        return Err(Error::Parameter("cells per interval must be at least 1".into()));
    }
    let total = n
        .checked_mul(cells)
        .ok_or_else(|| Error::Parameter(format!("grid n*cells overflows: {n}*{cells}")))?;
    let space = FiniteMeasureSpace::uniform(total)?;
    let blocks = (0..cells).map(|k| (0..n).map(|j| k + j * cells).collect()).collect();
    Ok((space, Partition::new(total, blocks)?))
}

pub fn example_3_1(n: usize, cells: usize, u: PointSampler, w: PointSampler) -> Result<Example> {
    let (space, part) = orbit_space(n, cells)?;
    let xs = midpoints(space.len());
    let uf = MFunc::new(xs.iter().map(|&x| u(x)).collect());
    let wf = MFunc::new(xs.iter().map(|&x| w(x)).collect());
    let inst = WctInstance::build(space, part, uf, wf)?;
    let (space, part) = (inst.space(), inst.partition());
    let len = space.len();

    let mut report = ExampleReport::new("3.1", Record::new().with("n", n).with("cells", cells).with("points", len));
    report.push_core_checks(&inst);

    let mut rng = ChaCha8Rng::seed_from_u64(ORBIT_SEED);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..ORBIT_SAMPLES {
        // Sparse samples make the bound tight: a lone spike has E|f| = f/n.
        let density: f64 = rng.random_range(0.05..1.0);
        let f: Vec<f64> =
            (0..len).map(|_| if rng.random::<f64>() < density { rng.random_range(0.0..10.0) } else { 0.0 }).collect();
        let f = MFunc::from_real(&f);
        let ef = cond_exp(&f.abs(), space, part)?;
        let top = 1.0 + f.ess_sup();
        for (fi, ei) in f.values().iter().zip(ef.values()) {
            worst = worst.max((fi.norm() - n as f64 * ei.re) / top);
        }
    }
    report.checks.push(Check::at_most("orbit_inequality", worst, 1e-12));

    let one = cond_exp(&MFunc::ones(len), space, part)?;
    let unital = one.values().iter().map(|z| (z - cplx(1.0)).norm()).fold(0.0, f64::max);
    report.checks.push(Check::at_most("unital", unital, 1e-12));

    let norm = inst.norm_formula();
    report.data.push("norm_formula", norm);
    if len <= DENSE_LIMIT {
        let dense = inst.op_norm();
        report.checks.push(Check::at_most("norm_formula_vs_dense", (norm - dense).abs() / (1.0 + dense), 1e-9));
    }

    let tol = spectrum_tol(&inst);
    report.data.push("point_spectrum", point_spectrum(&inst, tol));
    report.data.push("joint_point_spectrum", joint_point_spectrum_structural(&inst, tol, FLAT_GAP_REL));
    Ok(Example { instance: inst, report })
}

/// `[0,1]²` on a `grid × grid` midpoint lattice, integrating out the second
/// coordinate. Point `(x_i, y_j)` has index `i·grid + j`.
pub fn example_3_2(grid: usize) -> Result<Example> {
    if grid < 2 {
        return Err(Error::Parameter(format!("grid must be at least 2, got {grid}")));
    }
    let points = grid.checked_mul(grid).ok_or_else(|| Error::Parameter(format!("grid {grid} too large")))?;
    let space = FiniteMeasureSpace::uniform(points)?;
    let blocks = (0..grid).map(|i| (i * grid..(i + 1) * grid).collect()).collect();
    let part = Partition::new(points, blocks)?;
    let mids = midpoints(grid);
    let mut u = Vec::with_capacity(points);
    let mut w = Vec::with_capacity(points);
    for &x in &mids {
        for &y in &mids {
            u.push(cplx(y.powf(x / 8.0)));
            w.push(cplx(((4.0 + x) * y).sqrt()));
        }
    }
    let inst = WctInstance::build(space, part, MFunc::new(u), MFunc::new(w))?;

    let mut report = ExampleReport::new("3.2", Record::new().with("grid", grid).with("points", points));
    report.push_core_checks(&inst);

    let eu2 = inst.eu2_blocks();
    let ew2 = inst.ew2_blocks();
    let euw_sq: Vec<f64> = inst.euw_blocks().iter().map(|z| z.norm_sqr()).collect();
    let gaps = holder_gap_blocks(&inst);
    let eu2_c: Vec<f64> = mids.iter().map(|x| 4.0 / (4.0 + x)).collect();
    let ew2_c: Vec<f64> = mids.iter().map(|x| (4.0 + x) / 2.0).collect();
    let euw_sq_c: Vec<f64> = mids.iter().map(|x| 64.0 * (4.0 + x) / ((x + 12.0) * (x + 12.0))).collect();
    for (i, &x) in mids.iter().enumerate() {
        report.rows.push(
            Record::new()
                .with("kind", "example_row")
                .with("example", "3.2")
                .with("block", i)
                .with("x", x)
                .with("eu2", eu2[i])
                .with("eu2_closed", eu2_c[i])
                .with("ew2", ew2[i])
                .with("ew2_closed", ew2_c[i])
                .with("euw_sq", euw_sq[i])
                .with("euw_sq_closed", euw_sq_c[i])
                .with("holder_gap", gaps[i]),
        );
    }

    let quad = 5.0 / grid as f64;
    report.checks.push(Check::at_most("eu2_quadrature", max_abs_diff(eu2, &eu2_c), quad));
    report.checks.push(Check::at_most("ew2_quadrature", max_abs_diff(ew2, &ew2_c), quad));
    report.checks.push(Check::at_most("euw_sq_quadrature", max_abs_diff(&euw_sq, &euw_sq_c), quad));

    let scale = holder_scale(&inst);
    let sign_tol = CAUCHY_SCHWARZ_TOL * scale;
    let positive = gaps.iter().filter(|g| **g > sign_tol).count();
    let negative = gaps.iter().filter(|g| **g < -sign_tol).count();
    report.data.push(
        "gap_signs",
        Record::new()
            .with("positive", positive)
            .with("zero", grid - positive - negative)
            .with("negative", negative)
            .with("tol", sign_tol),
    );
    report.data.push("min_gap", gaps.iter().copied().fold(f64::INFINITY, f64::min));
    report.data.push("max_gap", gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max));

    let product: Vec<f64> = eu2.iter().zip(ew2).map(|(a, b)| a * b).collect();
    report.comparisons.push(Comparison::new(
        "eu2_ew2_product",
        2.0,
        product.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        product.iter().map(|v| (v - 2.0).abs()).fold(0.0, f64::max),
        quad,
    ));
    // The claimed direction E|u|²E|w|² ≤ |E(uw)|² a.e., measured by its worst violation.
    let worst = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.comparisons.push(Comparison::new(
        "holder_direction_product_le_euw_sq",
        "all rows",
        format!("{} of {grid} rows", gaps.iter().filter(|g| **g <= sign_tol).count()),
        worst.max(0.0),
        sign_tol,
    ));

    let tol = spectrum_tol(&inst);
    let claimed = vec![cplx(2.0_f64.sqrt())];
    let sp = point_spectrum(&inst, tol);
    let sjp = joint_point_spectrum_structural(&inst, tol, FLAT_GAP_REL);
    report.comparisons.push(Comparison::new(
        "point_spectrum",
        claimed.clone(),
        format!("{} values, 0 included: {}", sp.len(), contains_zero(&sp)),
        hausdorff(&claimed, &sp),
        tol,
    ));
    report.comparisons.push(Comparison::new(
        "joint_point_spectrum",
        claimed.clone(),
        sjp.clone(),
        hausdorff(&claimed, &sjp),
        tol,
    ));
    Ok(Example { instance: inst, report })
}

/// `grid` equal cells on `[0,1]` with cell `k` paired with `k + grid/2`,
/// `u = √x` and `w ≡ 1`.
pub fn example_3_3(grid: usize) -> Result<Example> {
    if grid < 2 || grid % 2 != 0 {
        return Err(Error::Parameter(format!("grid must be even and at least 2, got {grid}")));
    }
    let half = grid / 2;
    let space = FiniteMeasureSpace::uniform(grid)?;
    let part = Partition::new(grid, (0..half).map(|k| vec![k, k + half]).collect())?;
    let mids = midpoints(grid);
    let u = MFunc::from_real(&mids.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    let inst = WctInstance::build(space, part, u, MFunc::ones(grid))?;

    let mut report = ExampleReport::new("3.3", Record::new().with("grid", grid));
    report.push_core_checks(&inst);

    let eu2_c: Vec<f64> = (0..half).map(|k| (mids[k] + mids[k + half]) / 2.0).collect();
    let euw_c: Vec<f64> = (0..half).map(|k| (mids[k].sqrt() + mids[k + half].sqrt()) / 2.0).collect();
    let euw: Vec<f64> = inst.euw_blocks().iter().map(|z| z.re).collect();
    let gaps = holder_gap_blocks(&inst);
    for k in 0..half {
        report.rows.push(
            Record::new()
                .with("kind", "example_row")
                .with("example", "3.3")
                .with("block", k)
                .with("x", mids[k])
                .with("eu2", inst.eu2_blocks()[k])
                .with("eu2_closed", eu2_c[k])
                .with("euw", euw[k])
                .with("euw_closed", euw_c[k])
                .with("holder_gap", gaps[k]),
        );
    }

    let quad = 5.0 / grid as f64;
    report.checks.push(Check::at_most("eu2_two_point_average", max_abs_diff(inst.eu2_blocks(), &eu2_c), quad));
    let ew2_err = inst.ew2_blocks().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    report.checks.push(Check::at_most("ew2_two_point_average", ew2_err, quad));
    report.checks.push(Check::at_most("euw_two_point_average", max_abs_diff(&euw, &euw_c), quad));
    let min_step = euw.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    if half > 1 {
        report.checks.push(Check::above("block_values_increasing", min_step, 0.0));
    }
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    report.checks.push(Check::above("gap_positive_every_block", min_gap, 0.0));

    let tol = spectrum_tol(&inst);
    let sp = point_spectrum(&inst, tol);
    let simple = nonzero(&sp).len();
    report.checks.push(Check::at_most("distinct_block_values", (half - simple.min(half)) as f64, 0.0));
    let sjp = joint_point_spectrum_structural(&inst, tol, FLAT_GAP_REL);
    report.data.push("point_spectrum_nonzero_count", simple);
    report.data.push("point_spectrum_contains_zero", contains_zero(&sp));
    report.data.push("joint_point_spectrum", sjp);
    report.data.push("min_gap", min_gap);

    let sign_tol = CAUCHY_SCHWARZ_TOL * holder_scale(&inst);
    let worst = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.comparisons.push(Comparison::new(
        "holder_direction_euw_sq_ge_product",
        "all blocks",
        format!("{} of {half} blocks", gaps.iter().filter(|g| **g <= sign_tol).count()),
        worst.max(0.0),
        sign_tol,
    ));
    report.comparisons.push(Comparison::new(
        "point_spectrum_empty",
        Vec::<Complex64>::new(),
        format!("{} values, 0 included: {}", sp.len(), contains_zero(&sp)),
        sp.len() as f64,
        0.0,
    ));
    Ok(Example { instance: inst, report })
}

/// Sums `Σ g(x) q^{x−1}` over `xs`, smallest terms first.
fn geometric_sum(xs: &[usize], q: f64, g: impl Fn(usize) -> Complex64) -> Complex64 {
    xs.iter().rev().map(|&x| g(x) * q.powi(x as i32 - 1)).sum()
}

/// The two series ratios for `E(f)` on `{3m}` and its complement, summed
/// directly and independently of the block-mean code path.
fn series_alphas(q: f64, cutoff: usize, f: impl Fn(usize) -> Complex64) -> (Complex64, Complex64) {
    let all: Vec<usize> = (1..=cutoff).collect();
    let thirds: Vec<usize> = (1..=cutoff / 3).map(|m| 3 * m).collect();
    let one = |_| cplx(1.0);
    let a1 = geometric_sum(&thirds, q, &f) / geometric_sum(&thirds, q, one);
    let num = geometric_sum(&all, q, &f) - geometric_sum(&thirds, q, &f);
    let den = geometric_sum(&all, q, one) - geometric_sum(&thirds, q, one);
    (a1, num / den)
}

/// Atoms `x = 1..=cutoff` with masses `(1−q)q^{x−1}`, partitioned into the
/// multiples of three and the rest. No renormalization: the missing tail
/// mass is `q^cutoff`.
pub fn geometric_space(q: f64, cutoff: usize) -> Result<(FiniteMeasureSpace, Partition)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("q must lie in (0, 1), got {q}")));
    }
    if cutoff < 3 {
        return Err(Error::Parameter(format!("cutoff must be at least 3, got {cutoff}")));
    }
    if cutoff > i32::MAX as usize {
        return Err(Error::Parameter(format!("cutoff {cutoff} too large")));
    }
    let p = 1.0 - q;
    let masses: Vec<f64> = (1..=cutoff).map(|x| p * q.powi(x as i32 - 1)).collect();
    if masses.iter().any(|m| !m.is_normal()) {
        return Err(Error::Parameter(format!("masses underflow: q^{} is below the smallest normal float", cutoff - 1)));
    }
    let space = FiniteMeasureSpace::new(masses)?;
    let (thirds, rest): (Vec<usize>, Vec<usize>) = (0..cutoff).partition(|i| (i + 1) % 3 == 0);
    Ok((space, Partition::new(cutoff, vec![thirds, rest])?))
}

pub fn example_3_4(q: f64, cutoff: usize, u: AtomSampler, w: AtomSampler) -> Result<Example> {
    let (space, part) = geometric_space(q, cutoff)?;
    let uf = MFunc::new((1..=cutoff).map(u).collect());
    let wf = MFunc::new((1..=cutoff).map(w).collect());
    let inst = WctInstance::build(space, part, uf, wf)?;

    let params = Record::new().with("q", q).with("cutoff", cutoff);
    let mut report = ExampleReport::new("3.4", params);
    report.push_core_checks(&inst);
    report.data.push("truncation_tail", q.powi(cutoff as i32));

    let computed = inst.euw_blocks().to_vec();
    let (a1, a2) = series_alphas(q, cutoff, |x| u(x) * w(x));
    let rel = |z: Complex64, r: Complex64| (z - r).norm() / (1.0 + r.norm());
    report.checks.push(Check::at_most("alpha1_series", rel(computed[0], a1), 1e-12));
    report.checks.push(Check::at_most("alpha2_series", rel(computed[1], a2), 1e-12));
    report.data.push("alpha1", computed[0]);
    report.data.push("alpha2", computed[1]);

    let tol = spectrum_tol(&inst);
    let sp = point_spectrum(&inst, tol);
    let expected = merge_values([a1, a2].into_iter().filter(|z| z.norm() > tol), tol);
    report.checks.push(Check::at_most("point_spectrum_two_values", hausdorff(&expected, &nonzero(&sp)), tol));
    report.data.push("point_spectrum", sp.clone());
    report.data.push("point_spectrum_contains_zero", contains_zero(&sp));
    report.data.push("joint_point_spectrum", joint_point_spectrum_structural(&inst, tol, FLAT_GAP_REL));

    // The final display pairs u(3m) with w(2m); the derivation pairs it with w(3m).
    let (same, _) = series_alphas(q, cutoff, |x| u(x) * w(x));
    let (shifted, _) = series_alphas(q, cutoff, |x| if x % 3 == 0 { u(x) * w(2 * x / 3) } else { cplx(0.0) });
    report.comparisons.push(Comparison::new("alpha1_readings", same, shifted, (same - shifted).norm(), SERIES_TOL));
    Ok(Example { instance: inst, report })
}

/// `u(x) = x`, `w ≡ 1`, with the stated closed forms for `α₁`, `α₂`.
pub fn example_3_4_linear(q: f64, cutoff: usize) -> Result<Example> {
    let mut ex = example_3_4(q, cutoff, &|x| cplx(x as f64), &|_| cplx(1.0))?;
    let p = 1.0 - q;
    let (q2, q3) = (q * q, q * q * q);
    let alpha1 = 3.0 / (1.0 - q3);
    let alpha2 = (1.0 + q3 * q3 - 3.0 * q2 * q2 + 4.0 * q3 - 3.0 * q2) / ((1.0 - q2) * (1.0 - q3));
    // Summing the two geometric series for the complement directly.
    let alpha2_direct = (1.0 / (p * p) - 3.0 * q2 / ((1.0 - q3) * (1.0 - q3))) / (1.0 / p - q2 / (1.0 - q3));
    let got = ex.instance.euw_blocks().to_vec();
    let report = &mut ex.report;
    report.comparisons.push(Comparison::scalar("alpha1_closed_form", alpha1, got[0].re, SERIES_TOL));
    report.comparisons.push(Comparison::scalar("alpha2_closed_form", alpha2, got[1].re, SERIES_TOL));
    report.comparisons.push(Comparison::scalar("alpha2_closed_form_over_p", alpha2 / p, got[1].re, SERIES_TOL));
    report.comparisons.push(Comparison::scalar("alpha2_direct_series", alpha2_direct, got[1].re, SERIES_TOL));
    Ok(ex)
}
