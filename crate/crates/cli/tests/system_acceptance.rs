//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances and sample sizes are fixed per criterion.

use std::cell::Cell;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use wctlab_core::condexp::{cond_exp, cond_exp_operator};
use wctlab_core::examples::{example_3_2, example_3_3, example_3_4_linear};
use wctlab_core::linalg::op_norm;
use wctlab_core::spectral::{eigen_witness, hausdorff, joint_point_spectrum, merge_values, point_spectrum};
use wctlab_core::verifier::{
    check_lemma_2_4_thm_2_5, check_p_hyponormal, check_thm_2_1, check_thm_2_8, corpus_instance, eu_support_blocks,
    gen_trial, holder_gap_blocks, holder_scale, run_campaign, CheckParams, Family, GeneratorConfig, TheoremId,
    ToleranceParams, Verdict,
};
use wctlab_core::report::Value;
use wctlab_core::wct::sandwich;
use wctlab_core::{Complex64, FiniteMeasureSpace, LinOperator, MFunc, Partition, WctInstance};

const CORPUS_SEED: u64 = 20_240_601;
const CORPUS_SIZE: u64 = 1000;
const CORPUS_N_MAX: usize = 32;
const R_VALUES: [f64; 3] = [0.75, 1.0, 2.0];
const EPS_VALUES: [f64; 3] = [0.1, 0.5, 0.9];
const P_VALUES: [f64; 2] = [0.5, 1.0];

fn rt_grid() -> Vec<(f64, f64)> {
    R_VALUES.iter().flat_map(|&r| [0.0, r / 3.0, r / 2.0, r].map(|t| (r, t))).collect()
}

/// Worst normalized Cauchy–Schwarz gap over every instance built by the suite.
struct CsLedger {
    worst: Cell<f64>,
    count: Cell<u64>,
}

impl CsLedger {
    fn see(&self, inst: &WctInstance) {
        let min = holder_gap_blocks(inst).into_iter().fold(f64::INFINITY, f64::min) / holder_scale(inst);
        self.worst.set(self.worst.get().min(min));
        self.count.set(self.count.get() + 1);
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn diff(a: &LinOperator, b: &LinOperator) -> f64 {
    a.sub(b).frame_fro_norm()
}

fn num(v: &Value) -> f64 {
    match v {
        Value::Num(x) => *x,
        _ => f64::NAN,
    }
}

fn fmt_set(set: &[Complex64]) -> String {
    let items: Vec<String> = set.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!("{{{}}}", items.join(", "))
}

fn sup(f: &MFunc) -> f64 {
    f.ess_sup()
}

fn criterion_1(cs: &CsLedger) -> Outcome {
    let start = Instant::now();
    let cfg = GeneratorConfig { seed: 11, n_min: 2, n_max: 64, ..GeneratorConfig::default() };
    let mut worst = 0.0_f64;
    for trial in 0..500 {
        let inst = gen_trial(&cfg, trial);
        cs.see(&inst);
        let (space, part) = (inst.space(), inst.partition());
        let (f, g, k) = (inst.u(), inst.w(), &inst.eu());
        let n = space.len();
        let e = |h: &MFunc| cond_exp(h, space, part).unwrap();
        let ef = e(f);
        let fs = 1.0 + sup(f);
        let mut r = Vec::new();
        r.push(sup(&e(&ef).sub(&ef)) / fs);
        let (lhs, rhs) = (space.inner(&ef, g).unwrap(), space.inner(f, &e(g)).unwrap());
        r.push((lhs - rhs).norm() / (1.0 + space.norm(f).unwrap() * space.norm(g).unwrap()));
        let p = cond_exp_operator(space, part);
        r.push(diff(&p.compose(&p), &p) / n as f64);
        r.push(p.hermitian_defect());
        let pos = e(&f.abs());
        let neg = pos.values().iter().map(|z| (-z.re).max(z.im.abs())).fold(0.0, f64::max);
        r.push(neg / fs);
        r.push(sup(&e(&MFunc::ones(n)).sub(&MFunc::ones(n))));
        for block in part.blocks() {
            let a: Complex64 = block.iter().map(|&i| f.get(i) * space.mass(i)).sum();
            let b: Complex64 = block.iter().map(|&i| ef.get(i) * space.mass(i)).sum();
            r.push((a - b).norm() / (space.measure(block) * fs));
        }
        r.push(sup(&e(&k.mul(f)).sub(&k.mul(&ef))) / ((1.0 + sup(k)) * fs));
        worst = r.into_iter().fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-10 && elapsed <= Duration::from_secs(10);
    outcome(pass, format!("conditional expectation axioms on 500 spaces: worst residual {worst:.3e} (<= 1e-10), {elapsed:.2?} (<= 10s)"))
}

fn criterion_2(corpus: &[WctInstance]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut failures = 0u64;
    for inst in corpus {
        let t = inst.as_operator();
        let nt = op_norm(&t);
        let polar = inst.polar_numeric();
        let range = polar.range_projection();
        let bound1 = 1e-8 * (1.0 + nt);
        let mut rs = vec![
            diff(&inst.abs_t_closed(), &polar.abs) / bound1,
            diff(&inst.partial_isometry_closed().compose(&range), &polar.u.compose(&range)) / bound1,
            diff(&inst.aluthge_closed(), &sandwich(&polar, 0.5, 0.5)) / bound1,
        ];
        for eps in EPS_VALUES {
            let numeric = inst.aluthge_eps_numeric(eps).unwrap();
            rs.push(diff(&inst.gen_aluthge_closed(1.0, eps).unwrap(), &numeric) / bound1);
        }
        for (r, tt) in rt_grid() {
            let bound = 1e-8 * (1.0 + nt.powf(r.max(1.0)));
            rs.push(diff(&inst.gen_aluthge_closed(r, tt).unwrap(), &sandwich(&polar, tt, r - tt)) / bound);
        }
        failures += rs.iter().filter(|&&x| !(x <= 1.0)).count() as u64;
        worst = rs.into_iter().fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed <= Duration::from_secs(120);
    outcome(
        pass,
        format!("closed-form calculus vs polar/psd_power on {} instances: {failures} failures, worst residual/bound {worst:.3e}, {elapsed:.2?} (<= 2 min)", corpus.len()),
    )
}

fn criterion_3(corpus: &[WctInstance]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut failures = 0;
    for inst in corpus {
        let (f, d) = (inst.norm_formula(), inst.op_norm());
        let rel = if f.max(d) == 0.0 { 0.0 } else { (f - d).abs() / f.max(d) };
        worst = worst.max(rel);
        failures += usize::from(rel > 1e-9);
    }
    outcome(failures == 0, format!("norm formula vs operator norm: {failures} failures, worst relative error {worst:.3e} (<= 1e-9)"))
}

fn criterion_4(corpus: &[WctInstance]) -> Outcome {
    let tol = ToleranceParams::default();
    let (mut failures, mut worst, mut checks) = (0u64, 0.0_f64, 0u64);
    for inst in corpus {
        for (r, t) in rt_grid() {
            let rep = check_thm_2_1(inst, r, t, &tol).unwrap();
            checks += 1;
            failures += u64::from(rep.verdict == Verdict::Fail);
            worst = rep.residuals.iter().fold(worst, |m, x| m.max(x.value));
        }
    }
    outcome(
        failures == 0,
        format!("generalized Aluthge transform is normal: {checks} checks, {failures} failures, worst residual {worst:.3e} (<= 1e-8)"),
    )
}

fn criterion_5(cs: &CsLedger) -> Outcome {
    let start = Instant::now();
    let tol = ToleranceParams::default();
    let params = CheckParams { p: P_VALUES.to_vec(), ..CheckParams::default() };
    let suite = [TheoremId::HyponormalIffNormal];
    let cfg = GeneratorConfig { seed: 5, n_max: 16, ..GeneratorConfig::default() };
    let trials = 100_000;
    let (mut counterexamples, mut hyponormal, mut disagreements) = (0u64, 0u64, 0u64);
    let summary = run_campaign(&cfg, trials, &suite, &params, &tol, None, |rep| {
        let normality = rep.residual("normality").unwrap().value;
        let is_hypo = rep.residual("hyponormal_deficit").unwrap().value <= tol.psd_tol;
        hyponormal += u64::from(is_hypo);
        counterexamples += u64::from(is_hypo && normality > 1e-6);
        disagreements += u64::from(rep.verdict == Verdict::Fail);
    })
    .unwrap();
    for trial in 0..trials {
        cs.see(&gen_trial(&cfg, trial));
    }

    let normal_cfg = GeneratorConfig { seed: 6, n_max: 16, family: Family::Normal, ..GeneratorConfig::default() };
    let (mut normal_reports, mut normal_hypo) = (0u64, 0u64);
    run_campaign(&normal_cfg, 1000, &suite, &params, &tol, None, |rep| {
        normal_reports += 1;
        normal_hypo += u64::from(rep.residual("hyponormal_deficit").unwrap().value <= tol.psd_tol);
    })
    .unwrap();
    for trial in 0..1000 {
        cs.see(&gen_trial(&normal_cfg, trial));
    }
    let elapsed = start.elapsed();
    let pass = counterexamples == 0 && normal_hypo == normal_reports && elapsed <= Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "p-hyponormal iff normal: {} checks over {trials} instances, {hyponormal} p-hyponormal, {counterexamples} with normality residual > 1e-6 ({disagreements} verdict disagreements at default tolerances); normal family {normal_hypo}/{normal_reports} p-hyponormal; {elapsed:.2?} (<= 10 min)",
            summary.counts[&TheoremId::HyponormalIffNormal].pass + summary.failures()
        ),
    )
}

fn criterion_6(corpus: &[WctInstance]) -> Outcome {
    let tol = ToleranceParams::default();
    let (mut lemma_fail, mut thm_fail, mut thm_applicable, mut worst) = (0u64, 0u64, 0u64, 0.0_f64);
    for inst in corpus {
        for (r, t) in rt_grid() {
            for (i, p) in P_VALUES.into_iter().enumerate() {
                let (lemma, thm) = check_lemma_2_4_thm_2_5(inst, r, t, p, &tol).unwrap();
                if i == 0 {
                    lemma_fail += u64::from(lemma.verdict == Verdict::Fail);
                    worst = worst.max(lemma.residual("abs_vs_abs_adjoint").unwrap().value);
                }
                if !matches!(thm.verdict, Verdict::NotApplicable(_)) {
                    thm_applicable += 1;
                    thm_fail += u64::from(thm.verdict == Verdict::Fail);
                    for name in ["abs_vs_abs_t_power", "abs_adjoint_vs_abs_t_power"] {
                        worst = worst.max(thm.residual(name).unwrap().value);
                    }
                }
            }
        }
    }
    outcome(
        lemma_fail == 0 && thm_fail == 0,
        format!("modulus identities: {lemma_fail} lemma failures, {thm_fail} failures in {thm_applicable} p-hyponormal checks, worst residual {worst:.3e} (<= 1e-8)"),
    )
}

fn criterion_7(corpus: &[WctInstance], cs: &CsLedger) -> Outcome {
    let tol = ToleranceParams::default();
    let (mut applicable, mut failures, mut worst) = (0u64, 0u64, 0.0_f64);
    for inst in corpus {
        let t = inst.as_operator();
        let gaps = holder_gap_blocks(inst);
        let scale = holder_scale(inst);
        let support = eu_support_blocks(inst);
        for p in P_VALUES {
            if !check_p_hyponormal(&t, p, tol.psd_tol).unwrap().pass {
                continue;
            }
            applicable += 1;
            let g = gaps.iter().zip(&support).filter(|(_, s)| **s).fold(0.0_f64, |m, (g, _)| m.max(g.abs())) / scale;
            worst = worst.max(g);
            failures += u64::from(g > 1e-8);
        }
    }
    for ex in [example_3_2(512).unwrap(), example_3_3(512).unwrap(), example_3_4_linear(0.5, 200).unwrap()] {
        cs.see(&ex.instance);
    }
    let seven = GeneratorConfig { seed: 7, ..GeneratorConfig::default() };
    for trial in 0..1000 {
        cs.see(&gen_trial(&seven, trial));
    }
    let cs_worst = cs.worst.get();
    outcome(
        failures == 0 && cs_worst >= -1e-12,
        format!(
            "Hölder equality on S(E(u)) for p-hyponormal instances: {failures} failures in {applicable} cases, worst gap/scale {worst:.3e} (<= 1e-8); Cauchy-Schwarz over {} instances: min gap/scale {cs_worst:.3e} (>= -1e-12)",
            cs.count.get()
        ),
    )
}

fn criterion_8(corpus: &[WctInstance]) -> Outcome {
    let (mut failures, mut witness_fail, mut worst, mut worst_witness) = (0u64, 0u64, 0.0_f64, 0.0_f64);
    for inst in corpus {
        let t = inst.as_operator();
        let nt = op_norm(&t);
        let cut = 1e-6 * (1.0 + nt);
        // Eigenvalues of the dense operator from an independent Schur solver.
        let Some(eigs) = nalgebra::Schur::new(t.to_frame()).eigenvalues() else {
            failures += 1;
            continue;
        };
        let dense: Vec<Complex64> = eigs.iter().copied().filter(|z| z.norm() > cut).collect();
        let blocks: Vec<Complex64> = inst.euw_blocks().iter().copied().filter(|z| z.norm() > cut).collect();
        let d = hausdorff(&merge_values(dense, 1e-8 * (1.0 + nt)), &merge_values(blocks, 1e-8 * (1.0 + nt)));
        worst = worst.max(d / (1.0 + nt));
        failures += u64::from(d > 1e-8 * (1.0 + nt));

        let scale = holder_scale(inst);
        for b in 0..inst.num_blocks() {
            let Ok((x, lambda)) = eigen_witness(inst, b) else { continue };
            let tx = t.apply(&x).unwrap();
            let res = sup(&tx.sub(&x.scale(lambda))) / (scale * (1.0 + sup(&x)));
            worst_witness = worst_witness.max(res);
            witness_fail += u64::from(res > 1e-12);
        }
    }
    outcome(
        failures == 0 && witness_fail == 0,
        format!("point spectrum vs dense eigenvalues: {failures} failures, worst distance/(1+|T|) {worst:.3e} (<= 1e-8); eigen witnesses: {witness_fail} failures, worst {worst_witness:.3e} (<= 1e-12)"),
    )
}

fn criterion_9(corpus: &[WctInstance]) -> Outcome {
    let tol = ToleranceParams::default();
    let (mut applicable, mut failures) = (0u64, 0u64);
    for inst in corpus {
        let rep = check_thm_2_8(inst, &tol).unwrap();
        if !matches!(rep.verdict, Verdict::NotApplicable(_)) {
            applicable += 1;
            failures += u64::from(rep.verdict == Verdict::Fail);
        }
    }
    let space = FiniteMeasureSpace::new(vec![0.5, 0.5]).unwrap();
    let fixture =
        WctInstance::build(space, Partition::single_block(2), MFunc::from_real(&[2.0, 0.0]), MFunc::from_real(&[0.0, 1.0]))
            .unwrap();
    let merge = tol.merge_tol_for(&fixture);
    let sp = point_spectrum(&fixture, merge);
    let sjp = joint_point_spectrum(&fixture, merge).unwrap();
    let exact = sp == vec![Complex64::new(0.0, 0.0)] && sjp.is_empty();
    outcome(
        failures == 0 && applicable > 0 && exact,
        format!("gap-free instances have equal point and joint point spectra: {failures} failures in {applicable} applicable; (2,0)/(0,1) fixture sigma_p={} sigma_jp={}", fmt_set(&sp), fmt_set(&sjp)),
    )
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let ex = example_3_4_linear(0.5, 200).unwrap();
    let r = &ex.report;
    let a1 = r.comparison("alpha1_closed_form").unwrap();
    let a2 = r.comparison("alpha2_closed_form").unwrap();
    let a2_direct = r.comparison("alpha2_direct_series").unwrap();
    let spectrum = r.check("point_spectrum_two_values").unwrap();
    let elapsed = start.elapsed();
    let pass = a1.agree() && a2.agree() && spectrum.pass() && r.ok() && elapsed <= Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "geometric example, q=1/2, cutoff 200: alpha1 {:.10} vs 3/(1-q^3) = {:.10} (diff {:.3e}, <= 1e-9); alpha2 {:.10} vs displayed rational expression {:.10} (diff {:.3e}, <= 1e-9; direct geometric-series value {:.10}); two-value point spectrum {}; {elapsed:.2?} (<= 1s)",
            num(&a1.computed), num(&a1.claimed), a1.discrepancy, num(&a2.computed), num(&a2.claimed), a2.discrepancy, num(&a2_direct.claimed),
            if spectrum.pass() { "ok" } else { "mismatch" }
        ),
    )
}

fn criterion_11() -> Outcome {
    let sq = example_3_2(512).unwrap();
    let half = example_3_3(512).unwrap();
    let mut pass = sq.report.ok() && half.report.ok();
    pass &= sq.report.data.get("gap_signs").is_some();
    pass &= !sq.report.comparisons.is_empty() && !half.report.comparisons.is_empty();
    let q = |r: &wctlab_core::examples::ExampleReport, name: &str| r.check(name).map_or(f64::NAN, |c| c.value);
    outcome(
        pass,
        format!(
            "square example grid 512: |Eu2 err| {:.3e}, |Ew2 err| {:.3e} (<= {:.3e}), CS {}; half-shift example grid 512: two-point average err {:.3e}, CS {}; {} + {} claim comparisons recorded",
            q(&sq.report, "eu2_quadrature"),
            q(&sq.report, "ew2_quadrature"),
            5.0 / 512.0,
            if sq.report.check("cauchy_schwarz").unwrap().pass() { "holds" } else { "violated" },
            q(&half.report, "eu2_two_point_average"),
            if half.report.check("cauchy_schwarz").unwrap().pass() { "holds" } else { "violated" },
            sq.report.comparisons.len(),
            half.report.comparisons.len()
        ),
    )
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_wctlab"))
            .args(["verify", "--seed", "7", "--trials", "1000", "--out", path.to_str().unwrap()])
            .env_remove("WCTLAB_OUT_DIR")
            .output()
            .unwrap();
        (status.status.code(), fs::read(&path).unwrap_or_default())
    };
    let (code_a, a) = run("a.jsonl");
    let (code_b, b) = run("b.jsonl");
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    outcome(
        a == b && !a.is_empty() && code_a == Some(0) && code_b == Some(0),
        format!("verify --seed 7 --trials 1000 twice: {lines} lines, {} bytes, identical: {}, exit codes {code_a:?}/{code_b:?}", a.len(), a == b),
    )
}

fn main() {
    let cs = CsLedger { worst: Cell::new(f64::INFINITY), count: Cell::new(0) };
    let corpus: Vec<WctInstance> = (0..CORPUS_SIZE).map(|i| corpus_instance(CORPUS_SEED, i, CORPUS_N_MAX)).collect();
    for inst in &corpus {
        cs.see(inst);
    }

    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&cs))),
        (2, Box::new(|| criterion_2(&corpus))),
        (3, Box::new(|| criterion_3(&corpus))),
        (4, Box::new(|| criterion_4(&corpus))),
        (5, Box::new(|| criterion_5(&cs))),
        (6, Box::new(|| criterion_6(&corpus))),
        (7, Box::new(|| criterion_7(&corpus, &cs))),
        (8, Box::new(|| criterion_8(&corpus))),
        (9, Box::new(|| criterion_9(&corpus))),
        (10, Box::new(criterion_10)),
        (11, Box::new(criterion_11)),
        (12, Box::new(criterion_12)),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = Vec::new();
    for (id, run) in &criteria {
        if only.is_some_and(|o| o != *id) {
            continue;
        }
        let o = run();
        println!("criterion {id:>2} [{}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
