//! Theorem checks for `T = M_w E M_u`, their predicates, seeded generators
//! and falsification campaigns.
//!
//! Every check returns a self-contained [`TheoremReport`]: the verdict can be
//! recomputed from the stored residuals and their bounds. Tolerances are
//! relative with an additive floor of 1, so zero operators pass trivially.

mod campaign;
mod generator;

use num_complex::Complex64;

use crate::linalg::{hermitian_jacobi, op_norm, psd_verdict, LinOperator, PsdSpectrum};
use crate::report::Record;
use crate::space::DEFAULT_ZERO_TOL;
use crate::spectral::{hausdorff, is_invertible, joint_point_spectrum, point_spectrum};
use crate::wct::WctInstance;
use crate::{Error, Result};

pub use campaign::{evaluate, run_campaign, CampaignOutcome, CampaignSummary, CheckParams, TheoremCounts};
pub use generator::{corpus_config, corpus_instance, gen_instance, gen_trial, Family, GeneratorConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceParams {
    /// Relative bound for operator identities.
    pub residual_rel: f64,
    /// Tolerance of the positive-semidefiniteness test.
    pub psd_tol: f64,
    /// Relative rank cutoff.
    pub rank_tol_rel: f64,
    /// Relative merge tolerance for eigenvalues, scaled by `1 + max |E(uw)|`.
    pub merge_tol: f64,
}

impl Default for ToleranceParams {
    fn default() -> Self {
        Self { residual_rel: 1e-8, psd_tol: 1e-9, rank_tol_rel: 1e-12, merge_tol: 1e-10 }
    }
}

impl ToleranceParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("residual_rel", self.residual_rel),
            ("psd_tol", self.psd_tol),
            ("rank_tol_rel", self.rank_tol_rel),
            ("merge_tol", self.merge_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("tolerance {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Absolute merge tolerance for an instance.
    pub fn merge_tol_for(&self, inst: &WctInstance) -> f64 {
        let top = inst.euw_blocks().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        self.merge_tol * (1.0 + top)
    }

    pub fn to_record(&self) -> Record {
        Record::new()
            .with("residual_rel", self.residual_rel)
            .with("psd_tol", self.psd_tol)
            .with("rank_tol_rel", self.rank_tol_rel)
            .with("merge_tol", self.merge_tol)
    }
}

/// Bound used for the unconditional Cauchy–Schwarz direction of the gap.
pub const CAUCHY_SCHWARZ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    /// The generalized Aluthge transform is normal.
    GenAluthgeNormal,
    /// p-hyponormal iff normal.
    HyponormalIffNormal,
    /// Invertible implies normal.
    InvertibleNormal,
    /// `|T̃| = |T̃*|`.
    GenAluthgeModulus,
    /// `|T̃| = |T̃*| = |T|^r` under p-hyponormality.
    GenAluthgeModulusPower,
    /// p-hyponormality forces Hölder equality on `S(E(u))`.
    HolderEquality,
    /// Hölder equality forces `σ_p = σ_jp`.
    SpectraCoincide,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::GenAluthgeNormal,
        TheoremId::HyponormalIffNormal,
        TheoremId::InvertibleNormal,
        TheoremId::GenAluthgeModulus,
        TheoremId::GenAluthgeModulusPower,
        TheoremId::HolderEquality,
        TheoremId::SpectraCoincide,
    ];

    /// Identifier used on the command line and in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::GenAluthgeNormal => "2.1",
            TheoremId::HyponormalIffNormal => "2.2",
            TheoremId::InvertibleNormal => "2.3",
            TheoremId::GenAluthgeModulus => "2.4",
            TheoremId::GenAluthgeModulusPower => "2.5",
            TheoremId::HolderEquality => "2.6",
            TheoremId::SpectraCoincide => "2.8",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| Error::Parameter(format!("unknown theorem id {s:?} (expected one of 2.1,2.2,2.3,2.4,2.5,2.6,2.8)")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable(String),
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable(_) => "not-applicable",
        }
    }
}

/// A named residual with its bound. Only `checked` residuals decide the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub checked: bool,
}

impl Residual {
    fn checked(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, checked: true }
    }

    fn info(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, checked: false }
    }

    pub fn within(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstanceDigest {
    pub seed: Option<u64>,
    pub trial: Option<u64>,
    pub n: usize,
    pub blocks: usize,
}

impl InstanceDigest {
    pub fn of(inst: &WctInstance) -> Self {
        Self { seed: None, trial: None, n: inst.n(), blocks: inst.num_blocks() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub digest: InstanceDigest,
    pub params: Vec<(String, f64)>,
    pub residuals: Vec<Residual>,
    /// `Some(reason)` when the hypothesis does not hold for this instance.
    pub not_applicable: Option<String>,
    pub verdict: Verdict,
    pub tolerances: ToleranceParams,
    /// Spectral sets reported alongside the residuals.
    pub sets: Vec<(String, Vec<Complex64>)>,
    /// Free-form diagnostic, e.g. the error that stopped an evaluation.
    pub note: Option<String>,
}

impl TheoremReport {
    fn new(theorem: TheoremId, inst: &WctInstance, tol: &ToleranceParams) -> Self {
        Self {
            theorem,
            digest: InstanceDigest::of(inst),
            params: Vec::new(),
            residuals: Vec::new(),
            not_applicable: None,
            verdict: Verdict::Pass,
            tolerances: *tol,
            sets: Vec::new(),
            note: None,
        }
    }

    /// A failing report for a check that could not be evaluated.
    pub fn evaluation_error(theorem: TheoremId, inst: &WctInstance, tol: &ToleranceParams, err: &Error) -> Self {
        let mut rep = Self::new(theorem, inst, tol);
        rep.residuals.push(Residual::checked("evaluation_error", f64::INFINITY, 0.0));
        rep.note = Some(err.to_string());
        rep.finish()
    }

    pub(crate) fn param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.into(), value));
        self
    }

    fn finish(mut self) -> Self {
        self.verdict = self.recompute_verdict();
        self
    }

    /// The verdict implied by the stored residuals.
    pub fn recompute_verdict(&self) -> Verdict {
        if let Some(reason) = &self.not_applicable {
            return Verdict::NotApplicable(reason.clone());
        }
        if self.residuals.iter().filter(|r| r.checked).all(Residual::within) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn residual(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn set(&self, name: &str) -> Option<&[Complex64]> {
        self.sets.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_record(&self) -> Record {
        let mut params = Record::new();
        for (k, v) in &self.params {
            params.push(k, *v);
        }
        let residuals: Vec<Record> = self
            .residuals
            .iter()
            .map(|r| {
                Record::new()
                    .with("name", r.name.as_str())
                    .with("value", r.value)
                    .with("bound", r.bound)
                    .with("checked", r.checked)
            })
            .collect();
        let mut sets = Record::new();
        for (k, v) in &self.sets {
            sets.push(k, v.clone());
        }
        let reason = match &self.verdict {
            Verdict::NotApplicable(r) => Some(r.clone()),
            _ => None,
        };
        Record::new()
            .with("kind", "report")
            .with("theorem", self.theorem.as_str())
            .with("seed", self.digest.seed)
            .with("trial", self.digest.trial)
            .with("n", self.digest.n)
            .with("blocks", self.digest.blocks)
            .with("params", params)
            .with("residuals", residuals)
            .with("sets", sets)
            .with("verdict", self.verdict.as_str())
            .with("reason", reason)
            .with("note", self.note.clone())
            .with("tolerances", self.tolerances.to_record())
    }
}

/// Normality residual `‖A*A − AA*‖ / (1 + ‖A‖²)` in operator norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityCheck {
    pub residual: f64,
    pub pass: bool,
}

pub fn check_normal(a: &LinOperator, tol: f64) -> NormalityCheck {
    let a_star = a.adjoint();
    let comm = a_star.compose(a).sub(&a.compose(&a_star));
    let norm = op_norm(a);
    let residual = op_norm(&comm) / (1.0 + norm * norm);
    NormalityCheck { residual, pass: residual <= tol }
}

/// Outcome of `(A*A)^p − (AA*)^p ≥ 0` at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyponormalCheck {
    /// Smallest eigenvalue of the difference divided by `max(1, max |λ|)`.
    pub min_eig_rel: f64,
    pub pass: bool,
}

/// Spectral data of `A*A` and `AA*`, reusable across exponents.
#[derive(Debug, Clone)]
pub struct HyponormalProbe {
    gram: PsdSpectrum,
    cogram: PsdSpectrum,
}

impl HyponormalProbe {
    pub fn new(a: &LinOperator) -> Result<Self> {
        let a_star = a.adjoint();
        Ok(Self { gram: PsdSpectrum::new(&a_star.compose(a))?, cogram: PsdSpectrum::new(&a.compose(&a_star))? })
    }

    pub fn check(&self, p: f64, tol: f64) -> Result<HyponormalCheck> {
        // Hermitian by construction; near-normal inputs make the difference
        // tiny, so the relative asymmetry test of `hermitian_eig` does not apply.
        let diff = self.gram.power(p)?.sub(&self.cogram.power(p)?);
        let (values, _) = hermitian_jacobi(&diff.to_frame());
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let min_eig_rel = values.last().copied().unwrap_or(0.0) / scale;
        Ok(HyponormalCheck { min_eig_rel, pass: psd_verdict(&values, tol) })
    }
}

/// `(A*A)^p ≥ (AA*)^p` up to `tol`.
pub fn check_p_hyponormal(a: &LinOperator, p: f64, tol: f64) -> Result<HyponormalCheck> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("hyponormality exponent must be > 0, got {p}")));
    }
    HyponormalProbe::new(a)?.check(p, tol)
}

/// Per-block conditional Hölder gap `E|u|² E|w|² − |E(uw)|²`.
pub fn holder_gap_blocks(inst: &WctInstance) -> Vec<f64> {
    inst.eu2_blocks()
        .iter()
        .zip(inst.ew2_blocks())
        .zip(inst.euw_blocks())
        .map(|((a, b), z)| a * b - z.norm_sqr())
        .collect()
}

/// The Hölder gap as a block-constant function on the points.
pub fn holder_gap(inst: &WctInstance) -> crate::space::MFunc {
    let gap: Vec<Complex64> = holder_gap_blocks(inst).into_iter().map(|g| Complex64::new(g, 0.0)).collect();
    crate::condexp::from_block_values(&gap, inst.partition())
}

/// Scale for the gap: `1 + max_B E|u|² E|w|²`.
pub fn holder_scale(inst: &WctInstance) -> f64 {
    1.0 + inst.eu2_blocks().iter().zip(inst.ew2_blocks()).map(|(a, b)| a * b).fold(0.0, f64::max)
}

/// Blocks in `S(E(u))`.
pub fn eu_support_blocks(inst: &WctInstance) -> Vec<bool> {
    let top = inst.eu_blocks().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    inst.eu_blocks().iter().map(|z| top > 0.0 && z.norm() > DEFAULT_ZERO_TOL * top).collect()
}

fn check_rt(r: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite() && (0.0..=r).contains(&t)) {
        return Err(Error::Parameter(format!("need r > 0 and 0 <= t <= r, got r={r}, t={t}")));
    }
    Ok(())
}

/// The generalized Aluthge transform is normal: both the closed form and the
/// numeric `|T|^t U |T|^{r−t}`.
pub fn check_thm_2_1(inst: &WctInstance, r: f64, t: f64, tol: &ToleranceParams) -> Result<TheoremReport> {
    check_rt(r, t)?;
    let closed = inst.gen_aluthge_closed(r, t)?;
    let numeric = inst.gen_aluthge_numeric(r, t)?;
    let mut rep = TheoremReport::new(TheoremId::GenAluthgeNormal, inst, tol).param("r", r).param("t", t);
    rep.residuals.push(Residual::checked("normality_closed", check_normal(&closed, tol.residual_rel).residual, tol.residual_rel));
    rep.residuals.push(Residual::checked("normality_numeric", check_normal(&numeric, tol.residual_rel).residual, tol.residual_rel));
    Ok(rep.finish())
}

/// `T` is p-hyponormal iff `T` is normal. The checked residual is 1 when the
/// two predicates disagree.
pub fn check_thm_2_2(inst: &WctInstance, p: f64, tol: &ToleranceParams) -> Result<TheoremReport> {
    let t = inst.as_operator();
    let normal = check_normal(&t, tol.residual_rel);
    let hypo = check_p_hyponormal(&t, p, tol.psd_tol)?;
    Ok(hyponormal_report(inst, p, tol, normal, hypo))
}

pub(crate) fn hyponormal_report(
    inst: &WctInstance,
    p: f64,
    tol: &ToleranceParams,
    normal: NormalityCheck,
    hypo: HyponormalCheck,
) -> TheoremReport {
    let mut rep = TheoremReport::new(TheoremId::HyponormalIffNormal, inst, tol).param("p", p);
    rep.residuals.push(Residual::info("normality", normal.residual, tol.residual_rel));
    rep.residuals.push(Residual::info("hyponormal_deficit", -hypo.min_eig_rel, tol.psd_tol));
    let disagree = if normal.pass == hypo.pass { 0.0 } else { 1.0 };
    rep.residuals.push(Residual::checked("predicates_disagree", disagree, 0.0));
    rep.finish()
}

/// Invertible implies normal.
pub fn check_thm_2_3(inst: &WctInstance, tol: &ToleranceParams) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new(TheoremId::InvertibleNormal, inst, tol);
    if !is_invertible(inst, tol.rank_tol_rel) {
        rep.not_applicable = Some("T is not invertible".into());
        return Ok(rep.finish());
    }
    let normal = check_normal(&inst.as_operator(), tol.residual_rel);
    rep.residuals.push(Residual::checked("normality", normal.residual, tol.residual_rel));
    Ok(rep.finish())
}

/// `|T̃| = |T̃*|` always, and `|T̃| = |T̃*| = |T|^r` when `T` is p-hyponormal.
/// Returns the two reports in that order.
pub fn check_lemma_2_4_thm_2_5(
    inst: &WctInstance,
    r: f64,
    t: f64,
    p: f64,
    tol: &ToleranceParams,
) -> Result<(TheoremReport, TheoremReport)> {
    check_rt(r, t)?;
    let polar_t = inst.polar_numeric();
    let gen = crate::wct::sandwich(&polar_t, t, r - t);
    let gen_polar = crate::linalg::polar(&gen);
    let abs_gen = &gen_polar.abs;
    let abs_gen_adj = gen_polar.abs_adjoint();
    let gen_norm = gen_polar.svd.s.first().copied().unwrap_or(0.0);

    let mut lemma = TheoremReport::new(TheoremId::GenAluthgeModulus, inst, tol).param("r", r).param("t", t);
    lemma.residuals.push(Residual::checked(
        "abs_vs_abs_adjoint",
        abs_gen.sub(&abs_gen_adj).frame_fro_norm() / (1.0 + gen_norm),
        tol.residual_rel,
    ));
    lemma.residuals.push(Residual::checked(
        "abs_closed_vs_numeric",
        inst.gen_aluthge_abs_closed(r, t)?.sub(abs_gen).frame_fro_norm() / (1.0 + gen_norm),
        tol.residual_rel,
    ));

    let t_norm = polar_t.svd.s.first().copied().unwrap_or(0.0);
    let mut thm = TheoremReport::new(TheoremId::GenAluthgeModulusPower, inst, tol)
        .param("r", r)
        .param("t", t)
        .param("p", p);
    let hypo = check_p_hyponormal(&inst.as_operator(), p, tol.psd_tol)?;
    thm.residuals.push(Residual::info("hyponormal_deficit", -hypo.min_eig_rel, tol.psd_tol));
    if hypo.pass {
        let abs_r = polar_t.abs_power(r);
        let scale = 1.0 + t_norm.powf(r);
        thm.residuals.push(Residual::checked(
            "abs_vs_abs_t_power",
            abs_gen.sub(&abs_r).frame_fro_norm() / scale,
            tol.residual_rel,
        ));
        thm.residuals.push(Residual::checked(
            "abs_adjoint_vs_abs_t_power",
            abs_gen_adj.sub(&abs_r).frame_fro_norm() / scale,
            tol.residual_rel,
        ));
    } else {
        thm.not_applicable = Some(format!("T is not {p}-hyponormal"));
    }
    Ok((lemma.finish(), thm.finish()))
}

/// Cauchy–Schwarz direction of the gap on every block, and Hölder equality on
/// the blocks of `S(E(u))` whenever `T` is p-hyponormal.
pub fn check_thm_2_6(inst: &WctInstance, p: f64, tol: &ToleranceParams) -> Result<TheoremReport> {
    let gap = holder_gap_blocks(inst);
    let scale = holder_scale(inst);
    let mut rep = TheoremReport::new(TheoremId::HolderEquality, inst, tol).param("p", p);
    let worst_negative = gap.iter().fold(0.0_f64, |m, g| m.max(-g));
    rep.residuals.push(Residual::checked("cauchy_schwarz_violation", worst_negative / scale, CAUCHY_SCHWARZ_TOL));

    let hypo = check_p_hyponormal(&inst.as_operator(), p, tol.psd_tol)?;
    rep.residuals.push(Residual::info("hyponormal_deficit", -hypo.min_eig_rel, tol.psd_tol));
    let on_support = eu_support_blocks(inst);
    let gap_on_s = gap.iter().zip(&on_support).filter(|(_, s)| **s).fold(0.0_f64, |m, (g, _)| m.max(g.abs()));
    let residual = Residual { checked: hypo.pass, ..Residual::info("gap_on_support_eu", gap_on_s / scale, tol.residual_rel) };
    rep.residuals.push(residual);
    Ok(rep.finish())
}

/// If the Hölder gap vanishes everywhere, `σ_p(T) = σ_jp(T)`.
pub fn check_thm_2_8(inst: &WctInstance, tol: &ToleranceParams) -> Result<TheoremReport> {
    let gap = holder_gap_blocks(inst);
    let scale = holder_scale(inst);
    let worst = gap.iter().fold(0.0_f64, |m, g| m.max(g.abs())) / scale;
    let merge = tol.merge_tol_for(inst);
    let sp = point_spectrum(inst, merge);
    let sjp = joint_point_spectrum(inst, merge)?;

    let mut rep = TheoremReport::new(TheoremId::SpectraCoincide, inst, tol);
    rep.residuals.push(Residual::info("holder_gap", worst, tol.residual_rel));
    rep.residuals.push(Residual::checked("spectra_distance", hausdorff(&sp, &sjp), merge));
    if worst > tol.residual_rel {
        rep.not_applicable = Some("Hölder gap does not vanish".into());
    }
    rep.sets.push(("point_spectrum".into(), sp));
    rep.sets.push(("joint_point_spectrum".into(), sjp));
    Ok(rep.finish())
}
