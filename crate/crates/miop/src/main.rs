//! Command-line front end: build multi-indexed polynomial data, run
//! verification suites, and sweep parameter grids, emitting JSON or CSV
//! with all numbers as full-precision decimal strings.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use miop_core::classical::{Family, FamilyParams};
use miop_core::multi::MultiIndexedSystem;
use miop_core::num::Precision;
use miop_core::verify::{
    hermiticity_scan, identity_suite, ortho_suite, strip_zero_counts, VerificationReport,
};
use miop_core::virtual_states::DeletionSet;
use rug::{Complex, Float};
use serde_json::{json, Value};

/// Exit status 0: success / all checks pass.
const EXIT_OK: u8 = 0;
/// Exit status 1: a verification check failed or was not established.
const EXIT_FAIL: u8 = 1;
/// Exit status 2: invalid input.
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(
    name = "miop",
    about = "Multi-indexed Wilson and Askey-Wilson orthogonal polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the denominator polynomial and the polynomial family
    /// and write their coefficients with metadata.
    Build(BuildArgs),
    /// Run a verification suite and report each check.
    Verify(VerifyArgs),
    /// Sweep one parameter and record denominator zero counts.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "W")]
    W,
    #[value(name = "AW")]
    Aw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Ortho,
    Hermiticity,
    All,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Polynomial family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// The four parameters, comma-separated decimal strings.
    #[arg(long)]
    params: String,
    /// Base of the q-deformation (Askey-Wilson only).
    #[arg(long)]
    q: Option<String>,
    /// Deletion labels, e.g. "1I,2I,1II" (empty for the classical family).
    #[arg(long, default_value = "")]
    deletions: String,
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest polynomial index to construct.
    #[arg(long, default_value_t = 4)]
    nmax: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which suite to run.
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which parameter to sweep: a1, a2, a3, a4, or q.
    #[arg(long)]
    scan_param: String,
    /// First value of the sweep.
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Last value of the sweep (defaults to the first value).
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    /// Number of grid points (endpoints inclusive).
    #[arg(long, default_value_t = 1)]
    steps: usize,
}

/// An input problem parsed from the command line.
struct Job {
    params: FamilyParams,
    deletions: DeletionSet,
    family: FamilyArg,
    param_strings: Vec<String>,
    q_string: Option<String>,
    precision: u32,
}

fn parse_float(s: &str, wp: u32) -> Result<Float, String> {
    let parsed = Float::parse(s.trim()).map_err(|e| format!("cannot parse '{}': {}", s, e))?;
    Ok(Float::with_val(wp, parsed))
}

fn parse_job(common: &CommonArgs) -> Result<Job, String> {
    let prec = Precision::new(common.precision)
        .map_err(|e| format!("invalid precision: {}", e))?;
    let wp = common.precision + 32;
    let parts: Vec<&str> = common.params.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "--params needs exactly 4 comma-separated values, got {}",
            parts.len()
        ));
    }
    let mut a = Vec::with_capacity(4);
    for s in &parts {
        a.push(Complex::with_val(wp, parse_float(s, wp)?));
    }
    let a: [Complex; 4] = [a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone()];
    let params = match common.family {
        FamilyArg::W => {
            if common.q.is_some() {
                return Err("--q applies only to the Askey-Wilson family".into());
            }
            FamilyParams::wilson(a, prec)
        }
        FamilyArg::Aw => {
            let q = common
                .q
                .as_ref()
                .ok_or_else(|| "--q is required for the Askey-Wilson family".to_string())?;
            FamilyParams::askey_wilson(a, parse_float(q, wp)?, prec)
        }
    };
    let deletions = if common.deletions.trim().is_empty() {
        DeletionSet::empty()
    } else {
        DeletionSet::parse(&common.deletions).map_err(|e| format!("{}", e))?
    };
    Ok(Job {
        params,
        deletions,
        family: common.family,
        param_strings: parts.iter().map(|s| s.trim().to_string()).collect(),
        q_string: common.q.clone(),
        precision: common.precision,
    })
}

fn dec(f: &Float) -> String {
    f.to_string_radix(10, None)
}

fn family_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::W => "W",
        FamilyArg::Aw => "AW",
    }
}

fn job_header(job: &Job) -> Value {
    json!({
        "schema": "miop/1",
        "family": family_name(job.family),
        "parameters": job.param_strings,
        "q": job.q_string,
        "deletions": job.deletions.to_string_canonical(),
        "precision": job.precision,
    })
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), String> {
    let mut text = text.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &common.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| format!("cannot write {}: {}", path.display(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {}", e)),
    }
}

fn cmd_build(args: &BuildArgs) -> Result<u8, String> {
    let job = parse_job(&args.common)?;
    let sys = MultiIndexedSystem::new(job.params.clone(), job.deletions.clone())
        .map_err(|e| format!("{}", e))?;
    let mut polys = Vec::new();
    for n in 0..=args.nmax {
        let mp = sys
            .polynomial(n)
            .map_err(|e| format!("polynomial {}: {}", n, e))?;
        polys.push((n, mp));
    }
    let text = match args.common.format {
        FormatArg::Json => {
            let mut root = job_header(&job);
            let obj = root.as_object_mut().unwrap();
            obj.insert("ell".into(), json!(sys.ell()));
            obj.insert(
                "denominator".into(),
                json!({
                    "degree": sys.xi().degree(),
                    "leading": dec(sys.xi().leading()),
                    "degenerate": sys.xi().is_degenerate(),
                    "coefficients": sys.xi().coeffs().iter().map(dec).collect::<Vec<_>>(),
                }),
            );
            let items: Vec<Value> = polys
                .iter()
                .map(|(n, mp)| {
                    json!({
                        "n": n,
                        "degree": mp.poly.degree(),
                        "leading": dec(mp.poly.leading()),
                        "norm": dec(&mp.norm),
                        "degenerate": mp.poly.is_degenerate(),
                        "coefficients": mp.poly.coeffs().iter().map(dec).collect::<Vec<_>>(),
                    })
                })
                .collect();
            obj.insert("polynomials".into(), Value::Array(items));
            serde_json::to_string_pretty(&root).unwrap()
        }
        FormatArg::Csv => {
            let mut s = String::from("object,n,index,value\n");
            for (i, c) in sys.xi().coeffs().iter().enumerate() {
                s.push_str(&format!("denominator,,{},{}\n", i, dec(c)));
            }
            for (n, mp) in &polys {
                for (i, c) in mp.poly.coeffs().iter().enumerate() {
                    s.push_str(&format!("polynomial,{},{},{}\n", n, i, dec(c)));
                }
                s.push_str(&format!("norm,{},,{}\n", n, dec(&mp.norm)));
            }
            s
        }
    };
    emit(&args.common, &text)?;
    Ok(EXIT_OK)
}

fn report_to_json(job: &Job, suite: &str, rep: &VerificationReport) -> String {
    let mut root = job_header(job);
    let obj = root.as_object_mut().unwrap();
    obj.insert("suite".into(), json!(suite));
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "kind": c.kind,
                "target": dec(&c.target),
                "measured": dec(&c.measured),
                "tolerance": dec(&c.tolerance),
                "pass": c.pass,
            })
        })
        .collect();
    obj.insert("checks".into(), Value::Array(checks));
    let meta: serde_json::Map<String, Value> = rep
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    obj.insert("metadata".into(), Value::Object(meta));
    obj.insert("all_pass".into(), json!(rep.all_pass()));
    serde_json::to_string_pretty(&root).unwrap()
}

fn report_to_csv(rep: &VerificationReport) -> String {
    let mut s = String::from("name,kind,target,measured,tolerance,pass\n");
    for c in &rep.checks {
        s.push_str(&format!(
            "\"{}\",{},{},{},{},{}\n",
            c.name,
            c.kind,
            dec(&c.target),
            dec(&c.measured),
            dec(&c.tolerance),
            c.pass
        ));
    }
    s
}

/// Runs a fallible suite, turning an evaluation error into a single
/// failed check so the command exits 1 rather than aborting.
fn run_suite<F>(name: &str, rep: &mut VerificationReport, f: F)
where
    F: FnOnce() -> miop_core::Result<VerificationReport>,
{
    match f() {
        Ok(r) => rep.extend(r),
        Err(e) => {
            rep.meta(&format!("{} error", name), format!("{}", e));
            rep.record_flag(&format!("{} suite completed", name), false);
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    let job = parse_job(&args.common)?;
    let mut rep = VerificationReport::new();
    match args.suite {
        SuiteArg::Identities => run_suite("identities", &mut rep, || {
            identity_suite(&job.params, &job.deletions)
        }),
        SuiteArg::Ortho => run_suite("ortho", &mut rep, || {
            ortho_suite(&job.params, &job.deletions)
        }),
        SuiteArg::Hermiticity => rep.extend(hermiticity_scan(&job.params, &job.deletions)),
        SuiteArg::All => {
            run_suite("identities", &mut rep, || {
                identity_suite(&job.params, &job.deletions)
            });
            run_suite("ortho", &mut rep, || {
                ortho_suite(&job.params, &job.deletions)
            });
            rep.extend(hermiticity_scan(&job.params, &job.deletions));
        }
    }
    let suite_name = match args.suite {
        SuiteArg::Identities => "identities",
        SuiteArg::Ortho => "ortho",
        SuiteArg::Hermiticity => "hermiticity",
        SuiteArg::All => "all",
    };
    let text = match args.common.format {
        FormatArg::Json => report_to_json(&job, suite_name, &rep),
        FormatArg::Csv => report_to_csv(&rep),
    };
    emit(&args.common, &text)?;
    Ok(if rep.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_scan(args: &ScanArgs) -> Result<u8, String> {
    let job = parse_job(&args.common)?;
    let wp = job.precision + 32;
    let from = parse_float(&args.from, wp)?;
    let to = match &args.to {
        Some(t) => parse_float(t, wp)?,
        None => from.clone(),
    };
    if args.steps == 0 {
        return Err("--steps must be at least 1".into());
    }
    let which = args.scan_param.trim();
    let index = match which {
        "a1" => Some(0usize),
        "a2" => Some(1),
        "a3" => Some(2),
        "a4" => Some(3),
        "q" => None,
        other => return Err(format!("unknown scan parameter '{}'", other)),
    };
    if index.is_none() && !matches!(job.family, FamilyArg::Aw) {
        return Err("scan parameter 'q' applies only to the Askey-Wilson family".into());
    }
    let mut s = format!("{},strip_zeros,interval_zeros\n", which);
    for k in 0..args.steps {
        let frac = if args.steps == 1 {
            Float::with_val(wp, 0)
        } else {
            Float::with_val(wp, k as u32) / Float::with_val(wp, (args.steps - 1) as u32)
        };
        let value = Float::with_val(wp, Float::with_val(wp, &to - &from) * frac + &from);
        let params = build_scan_point(&job, index, &value);
        let row = params
            .and_then(|p| strip_zero_counts(&p, &job.deletions).ok())
            .map(|(strip, axis)| format!("{},{}", strip, axis))
            .unwrap_or_else(|| "invalid,invalid".to_string());
        s.push_str(&format!("{},{}\n", dec(&value), row));
    }
    emit(&args.common, &s)?;
    Ok(EXIT_OK)
}

fn build_scan_point(job: &Job, index: Option<usize>, value: &Float) -> Option<FamilyParams> {
    let wp = job.precision + 32;
    let prec = Precision::new(job.precision).ok()?;
    let mut a = job.params.a.clone();
    let mut q = job.params.q.clone();
    match index {
        Some(i) => a[i] = Complex::with_val(wp, value),
        None => q = Some(value.clone()),
    }
    let params = match job.params.family {
        Family::Wilson => FamilyParams::wilson(a, prec),
        Family::AskeyWilson => FamilyParams::askey_wilson(a, q?, prec),
    };
    params.check_base_range().ok()?;
    miop_core::virtual_states::validate_deletion(&params, &job.deletions).ok()?;
    Some(params)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_INVALID)
        }
    }
}
