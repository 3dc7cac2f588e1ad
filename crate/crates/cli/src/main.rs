//! Command-line front end: load a transition matrix, run the selected
//! algorithms at the selected precisions, and emit the result matrices
//! together with the error-statistics tables.
//!
//! Exit codes: 0 success, 1 input validation failure, 2 numerical failure
//! during a sweep, 3 I/O failure.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use markov_perturb_core::algorithms::{gth_at_precision, run_algorithm, AlgorithmId};
use markov_perturb_core::{io, Error, PrecisionMode, StochasticMatrix};

use report::{build_report, render, Collected, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmChoice {
    Al1,
    Al2,
    Al3,
    Al4a,
    Al4b,
    Al4c,
    Gth,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecisionChoice {
    Single,
    Double,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatChoice {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReferenceChoice {
    /// Compute GTH in double precision as the pairwise benchmark.
    Gth,
    /// No benchmark; pairwise and decimal-place statistics are omitted.
    None,
}

/// Stationary distributions, group inverses and mean first passage times
/// of finite irreducible Markov chains, by rank-one perturbation sweeps.
#[derive(Debug, Parser)]
#[command(name = "markov-perturb", version)]
struct Args {
    /// Transition matrix file: CSV rows, or JSON {"m": .., "rows": [[..]]}.
    #[arg(long)]
    input: PathBuf,

    /// Which algorithm to run.
    #[arg(long, value_enum, default_value = "all")]
    algorithm: AlgorithmChoice,

    /// Arithmetic precision for the runs.
    #[arg(long, value_enum, default_value = "double")]
    precision: PrecisionChoice,

    /// Report format.
    #[arg(long, value_enum, default_value = "table")]
    output: FormatChoice,

    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Benchmark used for pairwise error statistics.
    #[arg(long, value_enum, default_value = "gth")]
    reference: ReferenceChoice,

    /// Verification tolerance override (defaults: 1e-10 double, 1e-4 single).
    #[arg(long)]
    tolerance: Option<f64>,

    /// Stamp the report with the invocation time (off keeps output
    /// byte-reproducible).
    #[arg(long, default_value_t = false)]
    timestamp: bool,
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::NearSingularUpdate { .. } | Error::SingularSystem { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err((message, code)) => {
            eprintln!("markov-perturb: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(args: &Args) -> Result<ExitCode, (String, u8)> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| (format!("{}: {e}", args.input.display()), 3))?;
    let raw = io::parse_matrix(&text).map_err(|e| (e.to_string(), 1))?;
    let p = StochasticMatrix::validate(raw).map_err(|e| (e.to_string(), exit_code_for(&e)))?;

    let precisions: Vec<PrecisionMode> = match args.precision {
        PrecisionChoice::Single => vec![PrecisionMode::Single],
        PrecisionChoice::Double => vec![PrecisionMode::Double],
        PrecisionChoice::Both => vec![PrecisionMode::Single, PrecisionMode::Double],
    };
    let algorithms: Vec<AlgorithmId> = match args.algorithm {
        AlgorithmChoice::Al1 => vec![AlgorithmId::Al1],
        AlgorithmChoice::Al2 => vec![AlgorithmId::Al2],
        AlgorithmChoice::Al3 => vec![AlgorithmId::Al3],
        AlgorithmChoice::Al4a => vec![AlgorithmId::Al4A],
        AlgorithmChoice::Al4b => vec![AlgorithmId::Al4B],
        AlgorithmChoice::Al4c => vec![AlgorithmId::Al4C],
        AlgorithmChoice::Gth => vec![],
        AlgorithmChoice::All => AlgorithmId::ALL.to_vec(),
    };

    let mut runs = Vec::new();
    let mut numerical_failures = Vec::new();
    for &id in &algorithms {
        for &precision in &precisions {
            match run_algorithm(&p, id, precision) {
                Ok(result) => runs.push(result),
                Err(e) => numerical_failures.push(format!("{id} ({precision}): {e}")),
            }
        }
    }
    // deterministic report order: algorithm id, then single before double
    runs.sort_by_key(|r| (r.algorithm, r.precision));

    let want_gth_runs =
        args.algorithm == AlgorithmChoice::Gth || args.algorithm == AlgorithmChoice::All;
    let use_reference = args.reference == ReferenceChoice::Gth;
    let single_requested = precisions.contains(&PrecisionMode::Single);
    let double_requested = precisions.contains(&PrecisionMode::Double);

    let gth_double = if (want_gth_runs && double_requested) || use_reference {
        Some(
            gth_at_precision(&p, PrecisionMode::Double)
                .map_err(|e| (e.to_string(), exit_code_for(&e)))?,
        )
    } else {
        None
    };
    let gth_single = if single_requested && (want_gth_runs || use_reference) {
        Some(
            gth_at_precision(&p, PrecisionMode::Single)
                .map_err(|e| (e.to_string(), exit_code_for(&e)))?,
        )
    } else {
        None
    };

    let p_single = if single_requested {
        let p32: StochasticMatrix<f32> = p
            .to_precision()
            .map_err(|e| (e.to_string(), exit_code_for(&e)))?;
        Some(p32.mat().to_f64())
    } else {
        None
    };

    let collected = Collected {
        input_label: args.input.display().to_string(),
        m: p.m(),
        p_double: p.mat().clone(),
        p_single,
        runs,
        gth_double,
        gth_single,
        use_reference,
        tolerance_override: args.tolerance,
        timestamp: args.timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
    };
    if collected.runs.is_empty() && collected.gth_double.is_none() && collected.gth_single.is_none()
    {
        if !numerical_failures.is_empty() {
            return Err((numerical_failures.join("; "), 2));
        }
        return Err(("nothing to run for the requested flags".to_string(), 1));
    }

    let format = match args.output {
        FormatChoice::Json => OutputFormat::Json,
        FormatChoice::Table => OutputFormat::Table,
        FormatChoice::Csv => OutputFormat::Csv,
    };
    let rendered = render(&build_report(&collected), format);
    match &args.report {
        Some(path) => {
            std::fs::write(path, rendered).map_err(|e| (format!("{}: {e}", path.display()), 3))?
        }
        None => print!("{rendered}"),
    }

    if !numerical_failures.is_empty() {
        for failure in &numerical_failures {
            eprintln!("markov-perturb: numerical failure: {failure}");
        }
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
