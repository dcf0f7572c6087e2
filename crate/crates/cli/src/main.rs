use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use realhurwitz::coverings::{real_hurwitz, theorem_check};
use realhurwitz::partitions::{format_profiles, parse_partition, parse_profiles, parse_values};
use realhurwitz::polysolve::{classify_real, enumerate};
use realhurwitz::real_signs::s_number;
use realhurwitz::series::{basis_fit, series_table};
use realhurwitz::verify::verify;
use realhurwitz::{
    count_factorizations, format_ratio, BranchSpec, Error, OutputFormat, Parity, RunConfig,
};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "realhurwitz", version, about = "Complex and real polynomial Hurwitz numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count factorizations of a full cycle: N and H = N/d.
    Hurwitz {
        #[arg(long)]
        profiles: String,
        #[command(flatten)]
        common: Common,
    },
    /// All normalized complex polynomials for the branch data.
    Solve {
        #[command(flatten)]
        branch: Branch,
        #[command(flatten)]
        common: Common,
    },
    /// Signed count of real normalized polynomials.
    SNumber {
        #[command(flatten)]
        branch: Branch,
        #[command(flatten)]
        common: Common,
    },
    /// Real polynomial Hurwitz number from covering classes.
    RealHurwitz {
        #[command(flatten)]
        branch: Branch,
        /// Build classes even where the value is zero by the parity rule.
        #[arg(long)]
        force_classes: bool,
        /// Also compare with the s-number.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep all branch data up to a degree and number of branch points.
    Verify {
        #[arg(long, default_value_t = 4)]
        dmax: usize,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[command(flatten)]
        common: Common,
    },
    /// One-part real double Hurwitz numbers h_λ(m) for m = 0..=mmax.
    Series {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        /// Fit both parity parts with basis exponent bound D.
        #[arg(long, value_name = "D")]
        fit: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Branch {
    /// Profiles, e.g. "2,1|2,1".
    #[arg(long)]
    profiles: String,
    /// Branch values attached to the profiles in order; default 1, 2, ..., k.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of random starts per spec.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    tol_dedup: Option<f64>,
    #[arg(long)]
    tol_real: Option<f64>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    /// Line-delimited JSON solution cache.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    workers: Option<usize>,
    /// Debug: corrupt one sign per s-number (negative control).
    #[arg(long)]
    corrupt_sign: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::from_env()?;
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.budget {
            cfg.budget = v;
        }
        if let Some(v) = self.tol_residual {
            cfg.tolerances.residual = v;
        }
        if let Some(v) = self.tol_dedup {
            cfg.tolerances.dedup = v;
        }
        if let Some(v) = self.tol_real {
            cfg.tolerances.realness = v;
        }
        if let Some(v) = self.tol_cluster {
            cfg.tolerances.cluster = v;
        }
        if let Some(p) = &self.cache {
            cfg.cache = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Text => OutputFormat::Text,
            };
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.corrupt_sign |= self.corrupt_sign;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Branch {
    fn spec(&self) -> Result<BranchSpec, Error> {
        let profiles = parse_profiles(&self.profiles)?;
        match &self.values {
            Some(v) => BranchSpec::from_attachment(profiles, parse_values(v)?),
            None => BranchSpec::with_default_values(profiles),
        }
    }
}

const EXIT_OTHER: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_INFRA: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MalformedToken { .. }
        | Error::NonPositivePart(_)
        | Error::EmptyPartition
        | Error::InvalidSpec(_)
        | Error::ScaleExceeded { .. }
        | Error::InsufficientData(_) => EXIT_VALIDATION,
        Error::BudgetExceeded { .. }
        | Error::IncompleteEnumeration { .. }
        | Error::OvercountDetected { .. }
        | Error::DegenerateConfiguration(_)
        | Error::AmbiguousRealness { .. }
        | Error::ClusterAmbiguity { .. } => EXIT_INFRA,
        Error::SignMismatch(..) | Error::InvolutionMismatch => EXIT_PROPERTY,
        _ => EXIT_OTHER,
    }
}

struct Outcome {
    command: &'static str,
    result: Value,
    code: u8,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn execute(command: &Command) -> Result<(Outcome, RunConfig), Error> {
    match command {
        Command::Hurwitz { profiles, common } => {
            let cfg = common.config()?;
            let profiles = parse_profiles(profiles)?;
            BranchSpec::with_default_values(profiles.clone())?;
            let count = count_factorizations(&profiles, cfg.enumeration_budget)?;
            let result = json!({
                "d": count.degree,
                "profiles": format_profiles(&profiles),
                "N": count.n,
                "H": format_ratio(&count.h),
                "visited": count.visited,
            });
            Ok((Outcome { command: "hurwitz", result, code: 0 }, cfg))
        }
        Command::Solve { branch, common } => {
            let cfg = common.config()?;
            let set = enumerate(&branch.spec()?, &cfg)?;
            let mut result = to_value(&set);
            let code = if set.is_complete() {
                let real = classify_real(&set, &cfg)?;
                result["real"] = to_value(&real);
                0
            } else {
                EXIT_INFRA
            };
            Ok((Outcome { command: "solve", result, code }, cfg))
        }
        Command::SNumber { branch, common } => {
            let cfg = common.config()?;
            let s = s_number(&branch.spec()?, &cfg)?;
            Ok((Outcome { command: "s-number", result: to_value(&s), code: 0 }, cfg))
        }
        Command::RealHurwitz { branch, force_classes, check, common } => {
            let mut cfg = common.config()?;
            cfg.force_classes |= *force_classes;
            let spec = branch.spec()?;
            let hr = real_hurwitz(&spec, &cfg)?;
            let mut result = to_value(&hr);
            let mut code = 0;
            if *check {
                let report = theorem_check(&spec, &cfg)?;
                if !report.pass {
                    code = EXIT_PROPERTY;
                }
                result["check"] = to_value(&report);
            }
            Ok((Outcome { command: "real-hurwitz", result, code }, cfg))
        }
        Command::Verify { dmax, kmax, common } => {
            let cfg = common.config()?;
            let report = verify(*dmax, *kmax, &cfg)?;
            let code = if report.summary.failed > 0 {
                EXIT_PROPERTY
            } else if report.summary.failed_infra > 0 {
                EXIT_INFRA
            } else {
                0
            };
            Ok((Outcome { command: "verify", result: to_value(&report), code }, cfg))
        }
        Command::Series { lambda, mmax, fit, common } => {
            let cfg = common.config()?;
            let table = series_table(&parse_partition(lambda)?, *mmax, &cfg)?;
            let mut result = to_value(&table);
            if let Some(bound) = fit {
                let mut fits = Map::new();
                for parity in [Parity::Even, Parity::Odd] {
                    let key = if parity == Parity::Even { "even" } else { "odd" };
                    fits.insert(
                        key.into(),
                        match basis_fit(&table, parity, *bound) {
                            Ok(f) => to_value(&f),
                            Err(e) => json!({ "error": e.to_string() }),
                        },
                    );
                }
                result["fits"] = Value::Object(fits);
            }
            Ok((Outcome { command: "series", result, code: 0 }, cfg))
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(if s.contains([',', '"']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.clone() }),
        _ => None,
    }
}

fn csv_rows(rows: &[Value]) -> String {
    let Some(Value::Object(first)) = rows.first() else { return String::new() };
    let columns: Vec<&String> = first.keys().filter(|k| scalar(&first[*k]).is_some()).collect();
    let mut out = vec![columns.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")];
    for row in rows {
        out.push(columns.iter().map(|c| scalar(&row[c.as_str()]).unwrap_or_default()).collect::<Vec<_>>().join(","));
    }
    out.join("\n")
}

/// Tables become rows; anything else a single row of its scalar fields.
fn render_csv(result: &Value) -> String {
    for key in ["entries", "records", "polynomials", "solutions"] {
        if let Some(Value::Array(rows)) = result.get(key) {
            return csv_rows(rows);
        }
    }
    csv_rows(std::slice::from_ref(result))
}

fn render_text(v: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match scalar(v) {
                Some(s) => format!("{pad}{k}: {s}"),
                None => format!("{pad}{k}:\n{}", render_text(v, indent + 1)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(items) => items
            .iter()
            .map(|v| match scalar(v) {
                Some(s) => format!("{pad}- {s}"),
                None => format!("{pad}-\n{}", render_text(v, indent + 1)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => format!("{pad}{}", scalar(other).unwrap_or_default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, cfg) = match execute(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let doc = json!({
        "command": outcome.command,
        "config": to_value(&cfg),
        "result": outcome.result,
    });
    let text = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&doc).expect("json"),
        OutputFormat::Csv => render_csv(&outcome.result),
        OutputFormat::Text => render_text(&doc, 0),
    };
    println!("{text}");
    ExitCode::from(outcome.code)
}
