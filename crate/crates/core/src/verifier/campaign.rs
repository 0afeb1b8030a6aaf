//! Falsification campaigns: many seeded trials, one report per
//! (trial, theorem, parameter) combination, counterexamples dumped to disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::generator::{gen_trial, GeneratorConfig};
use super::{
    check_lemma_2_4_thm_2_5, check_normal, check_thm_2_1, check_thm_2_3, check_thm_2_6, check_thm_2_8,
    hyponormal_report, HyponormalProbe, TheoremId, TheoremReport, ToleranceParams, Verdict,
};
use crate::error::{Error, Result};
use crate::io::instance_to_string;
use crate::report::Record;
use crate::wct::WctInstance;

/// Trials evaluated in parallel before their reports are flushed in order.
const CHUNK: u64 = 256;

/// Parameter grid for the checks: hyponormality exponents `p` and
/// generalized Aluthge pairs `(r, t)`; pairs with `t > r` are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self { p: vec![0.5, 1.0], r: vec![1.0], t: vec![0.5] }
    }
}

impl CheckParams {
    pub fn validate(&self) -> Result<()> {
        if self.p.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Parameter("every p must be > 0".into()));
        }
        if self.r.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::Parameter("every r must be > 0".into()));
        }
        if self.t.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(Error::Parameter("every t must be >= 0".into()));
        }
        Ok(())
    }

    fn rt_pairs(&self) -> Vec<(f64, f64)> {
        self.r
            .iter()
            .flat_map(|&r| self.t.iter().filter(move |&&t| t <= r).map(move |&t| (r, t)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TheoremCounts {
    pub pass: u64,
    pub fail: u64,
    pub not_applicable: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub seed: u64,
    pub trials: u64,
    pub family: &'static str,
    pub counts: BTreeMap<TheoremId, TheoremCounts>,
    pub counterexamples: u64,
    pub dump_errors: Vec<String>,
}

impl CampaignSummary {
    pub fn failures(&self) -> u64 {
        self.counts.values().map(|c| c.fail).sum()
    }

    pub fn to_record(&self) -> Record {
        let mut theorems = Record::new();
        for (id, c) in &self.counts {
            theorems.push(
                id.as_str(),
                Record::new().with("pass", c.pass).with("fail", c.fail).with("not_applicable", c.not_applicable),
            );
        }
        Record::new()
            .with("kind", "summary")
            .with("seed", self.seed)
            .with("trials", self.trials)
            .with("family", self.family)
            .with("theorems", theorems)
            .with("counterexamples", self.counterexamples)
            .with("dump_errors", self.dump_errors.clone())
    }
}

/// Reports and the instance they were computed on, for one trial.
#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub trial: u64,
    pub instance: WctInstance,
    pub reports: Vec<TheoremReport>,
}

fn or_error(id: TheoremId, inst: &WctInstance, tol: &ToleranceParams, r: Result<TheoremReport>) -> TheoremReport {
    r.unwrap_or_else(|e| TheoremReport::evaluation_error(id, inst, tol, &e))
}

/// Runs every requested check on one instance.
pub fn evaluate(inst: &WctInstance, suite: &[TheoremId], params: &CheckParams, tol: &ToleranceParams) -> Vec<TheoremReport> {
    let mut out = Vec::new();
    for &id in suite {
        match id {
            TheoremId::GenAluthgeNormal => {
                for (r, t) in params.rt_pairs() {
                    out.push(or_error(id, inst, tol, check_thm_2_1(inst, r, t, tol)));
                }
            }
            TheoremId::HyponormalIffNormal => {
                let op = inst.as_operator();
                let normal = check_normal(&op, tol.residual_rel);
                match HyponormalProbe::new(&op) {
                    Ok(probe) => {
                        for &p in &params.p {
                            let rep = probe.check(p, tol.psd_tol).map(|h| hyponormal_report(inst, p, tol, normal, h));
                            out.push(or_error(id, inst, tol, rep));
                        }
                    }
                    Err(e) => out.push(TheoremReport::evaluation_error(id, inst, tol, &e)),
                }
            }
            TheoremId::InvertibleNormal => out.push(or_error(id, inst, tol, check_thm_2_3(inst, tol))),
            TheoremId::GenAluthgeModulus | TheoremId::GenAluthgeModulusPower => {
                let ps: &[f64] = if id == TheoremId::GenAluthgeModulus { &params.p[..1.min(params.p.len())] } else { &params.p };
                for (r, t) in params.rt_pairs() {
                    for &p in ps {
                        match check_lemma_2_4_thm_2_5(inst, r, t, p, tol) {
                            Ok((lemma, thm)) => out.push(if id == TheoremId::GenAluthgeModulus { lemma } else { thm }),
                            Err(e) => out.push(TheoremReport::evaluation_error(id, inst, tol, &e)),
                        }
                    }
                }
            }
            TheoremId::HolderEquality => {
                for &p in &params.p {
                    out.push(or_error(id, inst, tol, check_thm_2_6(inst, p, tol)));
                }
            }
            TheoremId::SpectraCoincide => out.push(or_error(id, inst, tol, check_thm_2_8(inst, tol))),
        }
    }
    out
}

fn dump(dir: &Path, seed: u64, outcome: &CampaignOutcome, rep: &TheoremReport) -> std::result::Result<(), String> {
    let stem = format!("seed{seed}-trial{}-thm{}", outcome.trial, rep.theorem.as_str());
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.json")), instance_to_string(&outcome.instance) + "\n")?;
        fs::write(dir.join(format!("{stem}.report.json")), rep.to_record().to_string() + "\n")?;
        Ok(())
    };
    write().map_err(|e| format!("{}: {e}", dir.join(&stem).display()))
}

/// Runs `trials` seeded trials of `suite`. Reports are handed to `sink` in
/// trial order; failing reports also dump the instance and a sidecar report
/// into `dump_dir` when given. Deterministic in `(cfg, trials, suite, params, tol)`.
pub fn run_campaign(
    cfg: &GeneratorConfig,
    trials: u64,
    suite: &[TheoremId],
    params: &CheckParams,
    tol: &ToleranceParams,
    dump_dir: Option<&Path>,
    mut sink: impl FnMut(&TheoremReport),
) -> Result<CampaignSummary> {
    if trials == 0 {
        return Err(Error::Parameter("a campaign needs at least one trial".into()));
    }
    cfg.validate()?;
    params.validate()?;
    tol.validate()?;

    let mut summary = CampaignSummary {
        seed: cfg.seed,
        trials,
        family: cfg.family.as_str(),
        counts: suite.iter().map(|&id| (id, TheoremCounts::default())).collect(),
        counterexamples: 0,
        dump_errors: Vec::new(),
    };
    if suite.is_empty() {
        return Ok(summary);
    }

    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        let outcomes: Vec<CampaignOutcome> = (start..end)
            .into_par_iter()
            .map(|trial| {
                let instance = gen_trial(cfg, trial);
                let mut reports = evaluate(&instance, suite, params, tol);
                for rep in &mut reports {
                    rep.digest.seed = Some(cfg.seed);
                    rep.digest.trial = Some(trial);
                }
                CampaignOutcome { trial, instance, reports }
            })
            .collect();
        for outcome in &outcomes {
            for rep in &outcome.reports {
                sink(rep);
                let counts = summary.counts.entry(rep.theorem).or_default();
                match rep.verdict {
                    Verdict::Pass => counts.pass += 1,
                    Verdict::NotApplicable(_) => counts.not_applicable += 1,
                    Verdict::Fail => {
                        counts.fail += 1;
                        summary.counterexamples += 1;
                        if let Some(dir) = dump_dir {
                            if let Err(e) = dump(dir, cfg.seed, outcome, rep) {
                                summary.dump_errors.push(e);
                            }
                        }
                    }
                }
            }
        }
        start = end;
    }
    Ok(summary)
}
