//! `wctlab`: seeded theorem campaigns, spectra of instance files, and the
//! worked-example reproducers.
//!
//! Exit codes: 0 success, 1 a theorem check or asserted invariant failed,
//! 2 usage or input error, 3 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wctlab_core::examples::{example_3_1, example_3_2, example_3_3, example_3_4_linear, ExampleReport};
use wctlab_core::io::read_instance;
use wctlab_core::report::Record;
use wctlab_core::spectral::{joint_point_spectrum, point_spectrum};
use wctlab_core::verifier::{
    check_normal, holder_gap_blocks, holder_scale, run_campaign, CheckParams, Family, GeneratorConfig,
    HyponormalProbe, TheoremId, ToleranceParams,
};
use wctlab_core::{Complex64, Error};

/// Default directory for report files and counterexample dumps.
const OUT_DIR_VAR: &str = "WCTLAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "wctlab", version, about = "Numerical lab for weighted conditional-type operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded campaign of theorem checks on random instances.
    Verify(VerifyArgs),
    /// Spectra, Hölder gaps, normality and p-hyponormality of an instance file.
    Spectrum(SpectrumArgs),
    /// Reproduce a worked example (3.1, 3.2, 3.3 or 3.4).
    Example(ExampleArgs),
}

#[derive(Args)]
struct TolArgs {
    /// Relative bound for operator identities.
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    /// Tolerance of the positive-semidefiniteness test.
    #[arg(long, default_value_t = 1e-9)]
    psd_tol: f64,
    /// Relative rank cutoff.
    #[arg(long, default_value_t = 1e-12)]
    rank_tol: f64,
    /// Relative merge tolerance for eigenvalues.
    #[arg(long, default_value_t = 1e-10)]
    merge_tol: f64,
}

impl TolArgs {
    fn params(&self) -> ToleranceParams {
        ToleranceParams {
            residual_rel: self.residual_tol,
            psd_tol: self.psd_tol,
            rank_tol_rel: self.rank_tol,
            merge_tol: self.merge_tol,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Hyponormality exponent (repeatable).
    #[arg(long = "p")]
    p: Vec<f64>,
    /// Generalized Aluthge exponent r (repeatable).
    #[arg(long = "r")]
    r: Vec<f64>,
    /// Generalized Aluthge exponent t (repeatable); pairs with t > r are skipped.
    #[arg(long = "t")]
    t: Vec<f64>,
    /// Comma-separated theorem ids; all of them by default.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<TheoremId>,
    #[arg(long, default_value = "generic")]
    family: Family,
    /// Largest instance dimension.
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    #[command(flatten)]
    tol: TolArgs,
    /// Report stream (one JSON record per line).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for counterexample dumps.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    input: PathBuf,
    /// Relative merge tolerance for eigenvalues.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Hyponormality exponent (repeatable).
    #[arg(long = "p")]
    p: Vec<f64>,
    #[arg(long, default_value_t = 1e-9)]
    psd_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
}

#[derive(Args)]
struct ExampleArgs {
    id: String,
    /// Orbit length (3.1).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Cells per interval (3.1).
    #[arg(long, default_value_t = 8)]
    cells: usize,
    /// Grid size (3.2, 3.3).
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Geometric parameter (3.4).
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Truncation point (3.4).
    #[arg(long, default_value_t = 200)]
    cutoff: usize,
    /// Also write the records to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Example(args) => cmd_example(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn default_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let defaults = CheckParams::default();
    let params = CheckParams {
        p: if args.p.is_empty() { defaults.p } else { args.p },
        r: if args.r.is_empty() { defaults.r } else { args.r },
        t: if args.t.is_empty() { defaults.t } else { args.t },
    };
    let suite = if args.suite.is_empty() { TheoremId::ALL.to_vec() } else { args.suite };
    let cfg = GeneratorConfig { seed: args.seed, n_max: args.n_max, family: args.family, ..GeneratorConfig::default() };
    let tol = args.tol.params();

    let out_path = args
        .out
        .or_else(|| default_out_dir().map(|d| d.join(format!("verify-seed{}.jsonl", args.seed))));
    let dump_dir = args
        .dump_dir
        .or_else(|| out_path.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf))
        .or_else(default_out_dir)
        .unwrap_or_else(|| PathBuf::from("."));
    let dump_dir = if dump_dir.as_os_str().is_empty() { PathBuf::from(".") } else { dump_dir };

    let mut out = out_path.as_deref().map(create).transpose()?;
    let mut write_err: Option<io::Error> = None;
    let summary = run_campaign(&cfg, args.trials, &suite, &params, &tol, Some(&dump_dir), |rep| {
        if let (Some(w), None) = (out.as_mut(), write_err.as_ref()) {
            if let Err(e) = writeln!(w, "{}", rep.to_record()) {
                write_err = Some(e);
            }
        }
    })?;
    let summary_record = summary.to_record().with("tolerances", tol.to_record());
    if let Some(w) = out.as_mut() {
        if write_err.is_none() {
            write_err = writeln!(w, "{summary_record}").and_then(|_| w.flush()).err();
        }
    }
    println!("{summary_record}");
    if let Some(e) = write_err {
        return Err(Failure::Io(format!("{}: {e}", out_path.unwrap_or_default().display())));
    }
    if !summary.dump_errors.is_empty() {
        return Err(Failure::Io(summary.dump_errors.join("; ")));
    }
    Ok(summary.failures() == 0)
}

fn cmd_spectrum(args: SpectrumArgs) -> Outcome {
    let inst = read_instance(&args.input)?;
    let tol = ToleranceParams {
        merge_tol: args.tol,
        psd_tol: args.psd_tol,
        residual_rel: args.residual_tol,
        ..ToleranceParams::default()
    };
    tol.validate()?;
    let ps = if args.p.is_empty() { CheckParams::default().p } else { args.p };
    if let Some(bad) = ps.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Failure::Usage(format!("hyponormality exponent must be > 0, got {bad}")));
    }
    let merge = tol.merge_tol_for(&inst);
    let sp = point_spectrum(&inst, merge);
    let sjp = joint_point_spectrum(&inst, merge)?;
    let op = inst.as_operator();
    let normal = check_normal(&op, tol.residual_rel);
    let probe = HyponormalProbe::new(&op)?;

    let mut records = vec![
        Record::new()
            .with("kind", "spectrum")
            .with("point_spectrum", sp)
            .with("joint_point_spectrum", sjp)
            .with("merge_tol", merge),
        Record::new()
            .with("kind", "holder_gap")
            .with("blocks", holder_gap_blocks(&inst))
            .with("scale", holder_scale(&inst)),
        Record::new()
            .with("kind", "normality")
            .with("residual", normal.residual)
            .with("tol", tol.residual_rel)
            .with("normal", normal.pass),
    ];
    for p in ps {
        let h = probe.check(p, tol.psd_tol)?;
        records.push(
            Record::new()
                .with("kind", "p_hyponormal")
                .with("p", p)
                .with("min_eig_rel", h.min_eig_rel)
                .with("tol", tol.psd_tol)
                .with("p_hyponormal", h.pass),
        );
    }
    let stdout = io::stdout();
    let mut w = stdout.lock();
    for r in records {
        writeln!(w, "{r}")?;
    }
    Ok(true)
}

fn run_example(args: &ExampleArgs) -> Result<ExampleReport, Failure> {
    let ex = match args.id.as_str() {
        "3.1" => example_3_1(
            args.n,
            args.cells,
            &|x| Complex64::new(1.0 + x, 0.0),
            &|x| Complex64::from_polar(1.0, std::f64::consts::TAU * x),
        )?,
        "3.2" => example_3_2(args.grid)?,
        "3.3" => example_3_3(args.grid)?,
        "3.4" => example_3_4_linear(args.q, args.cutoff)?,
        other => return Err(Failure::Usage(format!("unknown example {other:?} (expected 3.1, 3.2, 3.3 or 3.4)"))),
    };
    Ok(ex.report)
}

fn cmd_example(args: ExampleArgs) -> Outcome {
    let report = run_example(&args)?;
    let records = report.records();
    let stdout = io::stdout();
    let mut w = stdout.lock();
    for r in &records {
        writeln!(w, "{r}")?;
    }
    if let Some(path) = &args.out {
        let mut f = create(path)?;
        for r in &records {
            writeln!(f, "{r}").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
        f.flush().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report.ok())
}
