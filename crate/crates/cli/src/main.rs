use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use assocgr::corpus::{corpus_in, run_entry, CorpusOutcome};
use assocgr::depth::{analyze, ratliff_rush_lengths, AnalysisOptions};
use assocgr::family::parse_family_spec;
use assocgr::lab::{custom_family, dump_reproducer, run_trials, standard_family, Status, Tally, TheoremId, TheoremVerdict};
use assocgr::report::InvariantReport;
use assocgr::{Error, FieldSpec, InstanceFile, Presentation, TruncatedModule};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_INPUT: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "assocgr", version, about = "Hilbert series and depth of associated graded modules of maximal Cohen-Macaulay modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for superficial element search and instance generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Starting truncation degree N (escalated automatically when too small).
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Largest truncation degree escalation may reach.
    #[arg(long, global = true, default_value_t = AnalysisOptions::default().cap)]
    max_truncation: usize,
    /// Field characteristic; overrides the instance file.
    #[arg(long = "char", global = true)]
    characteristic: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every invariant of one instance file.
    Report { file: PathBuf },
    /// Re-check a structured report produced by `report`.
    Recheck { file: PathBuf },
    /// Ratliff-Rush filtration lengths l(~(m^n M) / m^n M).
    Rr {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Test a theorem on a family of instances.
    Verify {
        /// thm3.1, cor3.2, e3mu2, e3mu3 or universal.
        theorem: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Family spec file replacing the built-in family.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Directory for instance files of failing trials.
        #[arg(long, default_value = "reproducers")]
        reproducers: PathBuf,
    },
    /// Run the built-in corpus of worked examples.
    Examples,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TruncationExhausted { .. } | Error::SuperficialExhausted { .. } | Error::TruncationInsufficient { .. } => {
                EXIT_EXHAUSTED
            }
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Report { file } => cmd_report(cli, file),
        Command::Recheck { file } => cmd_recheck(file),
        Command::Rr { file, n_max } => cmd_rr(cli, file, *n_max),
        Command::Verify { theorem, trials, family, reproducers } => {
            cmd_verify(cli, theorem, *trials, family.as_deref(), reproducers)
        }
        Command::Examples => cmd_examples(cli),
    }
}

fn field(cli: &Cli) -> Result<FieldSpec, Failure> {
    Ok(match cli.characteristic {
        Some(p) => FieldSpec::new(p)?,
        None => FieldSpec::default(),
    })
}

/// Reads an instance file; `--char`, `--seed` and `--truncation` override
/// the values it declares.
fn load(cli: &Cli, path: &Path) -> Result<(Presentation, AnalysisOptions), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let mut file = InstanceFile::parse(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if let Some(p) = cli.characteristic {
        file.characteristic = FieldSpec::new(p)?.characteristic();
    }
    let pres = file.presentation().map_err(|e| match e {
        Error::Instance { .. } => input_error(format!("{}: {e}", path.display())),
        other => other.into(),
    })?;
    let opts = AnalysisOptions {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        truncation: cli.truncation.or(file.truncation),
        cap: cli.max_truncation,
        ..AnalysisOptions::default()
    };
    Ok((pres, opts))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_report(cli: &Cli, path: &Path) -> Result<u8, Failure> {
    let (pres, opts) = load(cli, path)?;
    let run = analyze(&pres, &opts)?;
    let report = InvariantReport::from_escalated(&pres, opts.seed, &run);
    if cli.format == Format::Structured {
        println!("{}", report.to_json());
        return Ok(0);
    }
    let rows: Vec<String> = report.instance.matrix.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    println!("matrix               [{}] over {}", rows.join(", "), report.instance.variables.join(", "));
    if let Some(g) = &report.instance.hypersurface {
        println!("hypersurface         {g}");
    }
    println!("characteristic       {}", report.instance.characteristic);
    println!("mu, i(M), ord det    {}, {}, {}", report.mu, report.i_m, report.ord_det);
    println!("dimension            {}", report.dim);
    println!("multiplicity         {}", report.multiplicity);
    println!("h(z)                 {}", report.h);
    let coeffs: Vec<String> = report.hilbert_coefficients.iter().enumerate().map(|(i, e)| format!("e{i} = {e}")).collect();
    println!("Hilbert coefficients {}", coeffs.join(", "));
    println!("Samuel polynomial    {}", report.samuel_polynomial);
    let hf: Vec<String> = report.hilbert_function.iter().map(|v| v.to_string()).collect();
    println!("H(M, n), n >= 0      {}", hf.join(", "));
    println!("reduction number     {}", report.reduction_number);
    println!("depth G(M)           {}", report.depth);
    println!("Cohen-Macaulay       {}", yes_no(report.cohen_macaulay));
    let trace: Vec<String> = report
        .method_trace
        .iter()
        .enumerate()
        .map(|(c, t)| format!("{}: {}", report.chain_h[c], if *t { "regular" } else { "not regular" }))
        .collect();
    if !trace.is_empty() {
        println!("chain                {}", trace.join("; "));
    }
    if let (Some(r), Some(ht)) = (&report.r_poly, &report.h_tilde) {
        println!("r_M(z)               {r}");
        println!("h~(z)                {ht}");
    }
    println!("Ulrich               {}", yes_no(report.predicates.ulrich));
    println!("minimal multiplicity {}", yes_no(report.predicates.minimal_multiplicity));
    let forms: Vec<String> = report.forms.iter().map(|f| f.display()).collect();
    if !forms.is_empty() {
        println!("superficial forms    {}", forms.join("; "));
    }
    match report.recheck_truncation {
        Some(n2) => println!("truncation           {} (rechecked at {n2})", report.truncation),
        None => println!("truncation           {}", report.truncation),
    }
    for e in &report.escalations {
        println!("escalation           {e}");
    }
    Ok(0)
}

fn cmd_recheck(path: &Path) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let report = InvariantReport::from_json(&text).map_err(|e| {
        input_error(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    match report.recheck() {
        Ok(()) => {
            println!("report is consistent");
            Ok(0)
        }
        Err(what) => {
            println!("report is inconsistent: {what}");
            Ok(EXIT_FAILED)
        }
    }
}

#[derive(Serialize)]
struct RrOutput {
    truncation: usize,
    lengths: Vec<(usize, usize)>,
    r_poly: Option<String>,
    h_tilde: Option<String>,
}

fn cmd_rr(cli: &Cli, path: &Path, n_max: usize) -> Result<u8, Failure> {
    let (pres, opts) = load(cli, path)?;
    if pres.dim() == 0 {
        return Err(input_error("Ratliff-Rush lengths need a module of positive dimension".into()));
    }
    // The table itself needs room above n_max; the analysis supplies r_M.
    let run = analyze(&pres, &opts)?;
    let a = &run.analysis;
    let n = opts.truncation.unwrap_or(a.truncation).max(n_max + 8);
    let model = TruncatedModule::build(&pres, n)?;
    let lengths = ratliff_rush_lengths(&model, n_max)?;
    let out = RrOutput {
        truncation: n,
        lengths: lengths.iter().enumerate().map(|(k, &l)| (k + 1, l)).collect(),
        r_poly: a.rr.as_ref().map(|r| r.r_poly.to_string()),
        h_tilde: a.rr.as_ref().map(|r| r.h_tilde.to_string()),
    };
    if cli.format == Format::Structured {
        print_json(&out);
        return Ok(0);
    }
    println!("{:>4}  {:>10}", "n", "length");
    for (k, l) in &out.lengths {
        println!("{k:>4}  {l:>10}");
    }
    if let (Some(r), Some(ht)) = (&out.r_poly, &out.h_tilde) {
        println!("r_M(z) = {r}");
        println!("h~(z)  = {ht}");
    }
    println!("truncation {}", out.truncation);
    Ok(0)
}

#[derive(Serialize)]
struct VerifyOutput {
    theorem: String,
    seed: u64,
    trials: usize,
    tally: Tally,
    elapsed_seconds: f64,
    reproducers: Vec<String>,
    verdicts: Vec<TrialVerdict>,
}

#[derive(Serialize)]
struct TrialVerdict {
    trial: usize,
    status: Status,
    #[serde(flatten)]
    verdict: TheoremVerdict,
}

fn cmd_verify(cli: &Cli, theorem: &str, trials: usize, family: Option<&Path>, dir: &Path) -> Result<u8, Failure> {
    let id: TheoremId = theorem.parse().map_err(|e: Error| input_error(e.to_string()))?;
    let field = field(cli)?;
    let seed = cli.seed.unwrap_or(0);
    let instances = match family {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            let spec = parse_family_spec(&text, base).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            custom_family(&spec, trials, seed, field)?
        }
        None => standard_family(id, trials, seed, field)?,
    };
    let opts = AnalysisOptions { seed, truncation: cli.truncation, cap: cli.max_truncation, ..AnalysisOptions::default() };
    let t = Instant::now();
    let results = run_trials(id, &instances, &opts);
    let elapsed = t.elapsed().as_secs_f64();
    let tally = Tally::of(results.iter().map(|(_, v)| v));
    let mut reproducers = Vec::new();
    for (k, v) in results.iter().filter(|(_, v)| v.status() == Status::Fail) {
        let path = dump_reproducer(dir, &instances[*k], v, *k)
            .map_err(|e| Failure { code: 1, message: format!("cannot write reproducer: {e}") })?;
        reproducers.push(path.display().to_string());
    }
    let code = if tally.fail > 0 { EXIT_FAILED } else { 0 };
    if cli.format == Format::Structured {
        let verdicts =
            results.into_iter().map(|(trial, verdict)| TrialVerdict { trial, status: verdict.status(), verdict }).collect();
        print_json(&VerifyOutput {
            theorem: id.name().into(),
            seed,
            trials: instances.len(),
            tally,
            elapsed_seconds: elapsed,
            reproducers,
            verdicts,
        });
        return Ok(code);
    }
    for (k, v) in &results {
        if matches!(v.status(), Status::Fail | Status::Inconclusive) {
            println!("trial {k:>4} {:<13} {:<24} {}", format!("{:?}", v.status()).to_lowercase(), v.theorem, v.fingerprint);
            for m in &v.messages {
                println!("           {m}");
            }
        }
    }
    println!(
        "{}: {} trials, {} pass, {} fail, {} inconclusive, {} not applicable ({elapsed:.1} s)",
        id.name(),
        instances.len(),
        tally.pass,
        tally.fail,
        tally.inconclusive,
        tally.skipped
    );
    for r in &reproducers {
        println!("reproducer {r}");
    }
    Ok(code)
}

#[derive(Serialize)]
struct ExampleOutput {
    name: String,
    expected_h: Option<String>,
    expected_depth: usize,
    matches: bool,
    rechecked: bool,
    elapsed_seconds: f64,
    error: Option<String>,
    report: Option<InvariantReport>,
}

impl From<CorpusOutcome> for ExampleOutput {
    fn from(o: CorpusOutcome) -> Self {
        ExampleOutput {
            name: o.name.clone(),
            expected_h: o.expected_h.as_ref().map(|h| h.to_string()),
            expected_depth: o.expected_depth,
            matches: o.matches(),
            rechecked: o.rechecked(),
            elapsed_seconds: o.elapsed.as_secs_f64(),
            error: o.error,
            report: o.report,
        }
    }
}

fn cmd_examples(cli: &Cli) -> Result<u8, Failure> {
    let seed = cli.seed.unwrap_or(0);
    let opts = AnalysisOptions { seed, truncation: cli.truncation, cap: cli.max_truncation, ..AnalysisOptions::default() };
    let entries = corpus_in(field(cli)?);
    let outcomes: Vec<ExampleOutput> = {
        use rayon::prelude::*;
        entries.par_iter().map(|e| run_entry(e, &opts).into()).collect()
    };
    let all = outcomes.iter().all(|o| o.matches);
    if cli.format == Format::Structured {
        print_json(&outcomes);
    } else {
        println!("{:<30} {:<16} {:>5}  {:<16} {:>5}  {:<5} {:>8}", "example", "expected h", "depth", "computed h", "depth", "ok", "time");
        for o in &outcomes {
            let (h, d) = match &o.report {
                Some(r) => (r.h.to_string(), r.depth.to_string()),
                None => ("error".into(), "-".into()),
            };
            println!(
                "{:<30} {:<16} {:>5}  {:<16} {:>5}  {:<5} {:>7.3}s",
                o.name,
                o.expected_h.as_deref().unwrap_or("-"),
                o.expected_depth,
                h,
                d,
                yes_no(o.matches),
                o.elapsed_seconds
            );
            if let Some(e) = &o.error {
                println!("    {e}");
            }
        }
        println!("{} of {} examples reproduced", outcomes.iter().filter(|o| o.matches).count(), outcomes.len());
    }
    Ok(if all { 0 } else { EXIT_FAILED })
}
