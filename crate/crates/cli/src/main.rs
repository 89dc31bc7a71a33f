use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use betastream::graph::{write_stream, StreamMode};
use betastream::harness::{
    load_instance, run_plan_on, summarize, write_csv, write_summary_csv, EstimatorKind, HarnessError, OracleMode,
    Params, Source, TrialPlan,
};

/// Run streaming Caro-Wei estimators over seeded trials and report CSV.
#[derive(Debug, Parser)]
#[command(name = "betastream", version)]
struct Args {
    /// Stream mode: edge or vertex (defaults to what the estimator needs).
    #[arg(long)]
    mode: Option<StreamMode>,
    /// Stream file in the text format.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generator: gnm:n=..,m=.. or gadget:k=..,z=..,c=..,x=1+3,y=..
    #[arg(long)]
    gen: Option<String>,
    /// Estimator: eps, phi, vertex or degtest.
    #[arg(long, default_value = "eps")]
    est: EstimatorKind,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Lower bound on beta (gamma' for phi). Defaults to the Turán bound.
    #[arg(long)]
    gamma: Option<f64>,
    /// Degree bound for degtest.
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// auto or off.
    #[arg(long, default_value = "auto")]
    oracle: OracleMode,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall_time_s column.
    #[arg(long)]
    timing: bool,
    /// Also write a one-row summary CSV here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write the generated stream here (plus `<path>.json` for gadgets).
    #[arg(long)]
    emit_stream: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_validation() { 2 } else { 1 })
        }
    }
}

fn run(args: Args) -> Result<(), HarnessError> {
    let source = match (&args.input, &args.gen) {
        (Some(path), None) => Source::File(path.clone()),
        (None, Some(spec)) => spec.parse()?,
        _ => return Err(HarnessError::Invalid("give exactly one of --input and --gen".into())),
    };
    let plan = TrialPlan {
        source,
        mode: args.mode,
        estimator: args.est,
        params: Params {
            eps: args.eps,
            phi: args.phi,
            gamma: args.gamma,
            d: args.d,
        },
        trials: args.trials,
        base_seed: args.seed,
        oracle: args.oracle,
    };
    plan.validate()?;
    let instance = load_instance(&plan)?;

    if let Some(path) = &args.emit_stream {
        let mut w = BufWriter::new(File::create(path)?);
        write_stream(&mut w, &instance.stream)?;
        w.flush()?;
        if let Some(meta) = &instance.gadget {
            let mut sidecar = path.clone().into_os_string();
            sidecar.push(".json");
            fs::write(sidecar, meta.to_json() + "\n")?;
        }
    }

    let output = run_plan_on(&plan, &instance)?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_csv(&mut w, &output, args.timing)?;
            w.flush()?;
        }
        None => write_csv(io::stdout().lock(), &output, args.timing)?,
    }
    if let Some(path) = &args.summary {
        let eps = Some(output.resolved.eps);
        let summary = summarize(&output.records, eps, output.resolved.phi)?;
        write_summary_csv(BufWriter::new(File::create(path)?), &summary)?;
    }
    Ok(())
}
