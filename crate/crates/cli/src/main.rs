//! `awspace`: verify the circle-fiber submersion of `SU(3)/T_{k,l}` onto the
//! flag manifold and scan sectional curvature.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use awspace_core::report::{
    run_brackets, run_scan, run_verify, BracketsReport, ScanRequest, SCAN_HEADER,
};
use awspace_core::submersion::BaseMetricChoice;
use awspace_core::AwParams;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod render;

#[derive(Parser, Debug)]
#[command(name = "awspace", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every bracket, connection and submersion check for one (k, l, t).
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        t: f64,
        /// Base metric whose verdict decides the exit code.
        #[arg(long, value_enum, default_value_t = BaseMetric::InducedT)]
        base_metric: BaseMetric,
        /// Write the JSON report here instead of standard output.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Sample sectional curvature over a range of t; one CSV row per t.
    #[command(allow_negative_numbers = true)]
    Scan {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        t_steps: usize,
        /// Random 2-planes per t.
        #[arg(long, default_value_t = 10_000)]
        planes: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the CSV here instead of standard output.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Print the six bracket identities and the structure-constant table.
    #[command(allow_negative_numbers = true)]
    Brackets {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: i64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Emit JSON; with a PATH, write it there.
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        json: Option<Option<PathBuf>>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaseMetric {
    #[value(name = "induced_t")]
    InducedT,
    #[value(name = "round_0")]
    Round0,
}

impl From<BaseMetric> for BaseMetricChoice {
    fn from(b: BaseMetric) -> Self {
        match b {
            BaseMetric::InducedT => BaseMetricChoice::InducedT,
            BaseMetric::Round0 => BaseMetricChoice::Round0,
        }
    }
}

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

fn invalid(kind: &str, message: impl Into<String>) -> ExitCode {
    let obj = ErrorObject {
        error: ErrorBody {
            kind,
            message: message.into(),
        },
    };
    // The error object goes to stdout so scripts can parse it like a report.
    let text = serde_json::to_string_pretty(&obj).expect("error object serializes");
    println!("{text}");
    ExitCode::from(EXIT_INVALID)
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

fn verify(k: i64, l: i64, t: f64, base: BaseMetric, json: Option<PathBuf>) -> ExitCode {
    let report = match run_verify(AwParams::new(k, l, t), base.into()) {
        Ok(r) => r,
        Err(e) => return invalid("invalid_parameters", e.to_string()),
    };
    if let Err(e) = write_output(json.as_ref(), &to_json(&report)) {
        return invalid("io", e.to_string());
    }
    ExitCode::from(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn scan(req: ScanRequest, csv_path: Option<PathBuf>) -> ExitCode {
    let rows = match run_scan(&req) {
        Ok(rows) => rows,
        Err(e) => return invalid("invalid_parameters", e.to_string()),
    };
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let result = writer
        .write_record(SCAN_HEADER)
        .and_then(|_| rows.iter().try_for_each(|r| writer.serialize(r)));
    if let Err(e) = result {
        return invalid("io", e.to_string());
    }
    let bytes = writer.into_inner().expect("in-memory writer flushes");
    if let Err(e) = write_output(csv_path.as_ref(), &bytes) {
        return invalid("io", e.to_string());
    }
    ExitCode::from(EXIT_PASS)
}

fn brackets(k: i64, l: i64, t: f64, json: Option<Option<PathBuf>>) -> ExitCode {
    let report: BracketsReport = match run_brackets(AwParams::new(k, l, t)) {
        Ok(r) => r,
        Err(e) => return invalid("invalid_parameters", e.to_string()),
    };
    let written = match &json {
        Some(path) => write_output(path.as_ref(), &to_json(&report)),
        None => {
            let color = io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
            write_output(None, render::brackets_table(&report, color).as_bytes())
        }
    };
    if let Err(e) = written {
        return invalid("io", e.to_string());
    }
    ExitCode::from(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::from(EXIT_PASS);
        }
        Err(e) => return invalid("usage", e.to_string().trim_end()),
    };
    match cli.command {
        Command::Verify {
            k,
            l,
            t,
            base_metric,
            json,
        } => verify(k, l, t, base_metric, json),
        Command::Scan {
            k,
            l,
            t_min,
            t_max,
            t_steps,
            planes,
            seed,
            csv,
        } => scan(
            ScanRequest {
                k,
                l,
                t_min,
                t_max,
                t_steps,
                planes,
                seed,
            },
            csv,
        ),
        Command::Brackets { k, l, t, json } => brackets(k, l, t, json),
    }
}
