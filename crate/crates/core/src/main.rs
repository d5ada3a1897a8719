use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use statenet::claims::ClaimId;
use statenet::degree::{degree_histogram, loglog_fit};
use statenet::export::{write_degree_csv, write_dot, write_graphml};
use statenet::report::{parse_mu, run_report, BitsRange, MuSpec, RunConfig};
use statenet::{build_network, Precision, QuantizationMode};

/// Relative `--out` paths are resolved against this directory when set.
const OUT_DIR_ENV: &str = "STATENET_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "statenet",
    version,
    about = "State networks of the fixed-point Logistic map"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the network as DOT or GraphML.
    Build(BuildArgs),
    /// Write the in-degree histogram as CSV (or JSON with the log-log fit).
    Degrees(DegreeArgs),
    /// Run selected claim checks and write their reports as JSON.
    Verify(VerifyArgs),
    /// Run the full battery and write the JSON report.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Control parameter, e.g. 121/2^5 or 121/32.
    #[arg(long, value_parser = parse_mu_arg)]
    mu: MuSpec,
    /// Precision in bits: a single value or an inclusive range a..b.
    #[arg(long = "n")]
    bits: BitsRange,
    #[arg(long, default_value = "round")]
    quant: QuantizationMode,
    /// Output path; `{n}` is replaced by the precision. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Graphml,
    Csv,
    Json,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
}

#[derive(Args)]
struct DegreeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Smallest degree used by the log-log fit.
    #[arg(long, default_value_t = 1)]
    k_min: u64,
}

#[derive(Args)]
struct BatteryArgs {
    #[arg(long, default_value_t = 1)]
    k_min: u64,
    /// Largest iteration count tallied for periodic points.
    #[arg(long, default_value_t = 16)]
    m_max: u32,
    /// Fail with exit code 2 when a conjecture is violated.
    #[arg(long)]
    assert_conjectures: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    battery: BatteryArgs,
    /// Claims to check, e.g. P1,P2,C1 or D1-D6 or all.
    #[arg(long, default_value = "all")]
    checks: String,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    battery: BatteryArgs,
}

fn parse_mu_arg(s: &str) -> Result<MuSpec, String> {
    parse_mu(s).map_err(|e| e.to_string())
}

type CliResult<T> = Result<T, String>;

fn out_path(common: &Common, bits: u32) -> CliResult<Option<PathBuf>> {
    let Some(out) = &common.out else {
        if common.bits.is_single() {
            return Ok(None);
        }
        return Err("a precision range needs --out with a {n} placeholder".into());
    };
    let text = out.to_string_lossy();
    if !common.bits.is_single() && !text.contains("{n}") {
        return Err("a precision range needs --out with a {n} placeholder".into());
    }
    Ok(Some(resolve(PathBuf::from(
        text.replace("{n}", &bits.to_string()),
    ))))
}

fn resolve(path: PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

fn emit(path: Option<PathBuf>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| e.to_string())
        }
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            let file = std::fs::File::create(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            let mut w = io::BufWriter::new(file);
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn precision(common: &Common, bits: u32) -> CliResult<Precision> {
    Precision::new(bits, &common.mu.mu()).map_err(|e| e.to_string())
}

fn run_build(args: BuildArgs) -> CliResult<i32> {
    let c = &args.common;
    c.bits.validate(&c.mu.mu()).map_err(|e| e.to_string())?;
    for bits in c.bits.iter() {
        let net =
            build_network(c.mu.mu(), precision(c, bits)?, c.quant).map_err(|e| e.to_string())?;
        let path = out_path(c, bits)?;
        match args.format {
            Format::Dot => emit(path, |w| write_dot(&net, w))?,
            Format::Graphml => emit(path, |w| write_graphml(&net, w))?,
            _ => return Err("build writes dot or graphml".into()),
        }
    }
    Ok(0)
}

fn run_degrees(args: DegreeArgs) -> CliResult<i32> {
    let c = &args.common;
    c.bits.validate(&c.mu.mu()).map_err(|e| e.to_string())?;
    for bits in c.bits.iter() {
        let net =
            build_network(c.mu.mu(), precision(c, bits)?, c.quant).map_err(|e| e.to_string())?;
        let dist = degree_histogram(&net);
        let path = out_path(c, bits)?;
        match args.format {
            Format::Csv => emit(path, |w| write_degree_csv(&dist, w))?,
            Format::Json => {
                let fit = loglog_fit(&dist, args.k_min);
                let value = serde_json::json!({ "distribution": dist, "fit": fit });
                emit(path, |w| {
                    serde_json::to_writer_pretty(&mut *w, &value)?;
                    writeln!(w)
                })?
            }
            _ => return Err("degrees writes csv or json".into()),
        }
    }
    Ok(0)
}

fn run_battery(
    common: Common,
    battery: BatteryArgs,
    claims: Vec<ClaimId>,
    include_network_data: bool,
) -> CliResult<i32> {
    if battery.format != Format::Json {
        return Err("reports are written as json".into());
    }
    let mut config = RunConfig::new(common.mu.clone(), common.bits);
    config.mode = common.quant;
    config.k_min = battery.k_min;
    config.m_max = battery.m_max;
    config.assert_conjectures = battery.assert_conjectures;
    config.claims = claims;
    config.include_network_data = include_network_data;
    let doc = run_report(&config).map_err(|e| e.to_string())?;
    emit(common.out.map(resolve), |w| doc.write_json(w))?;
    for r in doc.all_reports() {
        eprintln!(
            "{:<3} n={:>2}..{:<2} {:<11} {} ({} checked, {} violations)",
            r.claim.to_string(),
            r.bits_from,
            r.bits_to,
            format!("{:?}", r.kind).to_lowercase(),
            if r.holds { "holds" } else { "FAILS" },
            r.checked_count,
            r.violation_count
        );
    }
    for e in &doc.errors {
        eprintln!("error: {e}");
    }
    Ok(doc.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Build(a) => run_build(a),
        Command::Degrees(a) => run_degrees(a),
        Command::Verify(a) => ClaimId::parse_list(&a.checks)
            .and_then(|claims| run_battery(a.common, a.battery, claims, false)),
        Command::Report(a) => run_battery(a.common, a.battery, ClaimId::ALL.to_vec(), true),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("statenet: {e}");
            ExitCode::from(1)
        }
    }
}
