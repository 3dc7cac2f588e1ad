//! Report assembly and emission: one document per invocation, carrying the
//! computed matrices per algorithm and precision plus the error-statistics
//! tables, serialized as JSON, aligned text tables, or CSV rows.

use markov_perturb_core::algorithms::AlgorithmResult;
use markov_perturb_core::chain::{ProbabilityVector, StochasticMatrix};
use markov_perturb_core::ginverse::{verify_group_axioms, GroupInverseMatrix};
use markov_perturb_core::metrics;
use markov_perturb_core::{Mat, PrecisionMode, Scalar};
use serde::{Deserialize, Serialize};

/// Everything an invocation computed, before formatting.
pub struct Collected {
    pub input_label: String,
    pub m: usize,
    /// The validated double-precision input.
    pub p_double: Mat<f64>,
    /// The binary32-rounded input (widened), when single precision ran.
    pub p_single: Option<Mat<f64>>,
    pub runs: Vec<AlgorithmResult>,
    pub gth_double: Option<Vec<f64>>,
    pub gth_single: Option<Vec<f64>>,
    /// Whether the GTH vectors act as the pairwise benchmark.
    pub use_reference: bool,
    pub tolerance_override: Option<f64>,
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub m: usize,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub algorithms: Vec<AlgorithmReport>,
    pub statistics: Statistics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub double: f64,
    pub single: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub id: String,
    pub precision: String,
    pub pi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mfpt: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_inverse: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub denominator: f64,
    pub work_norm: f64,
    pub invariant_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verification {
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statistics {
    pub stationary: Vec<StatRow>,
    pub mfpt: Vec<StatRow>,
    pub group_inverse: Vec<StatRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatRow {
    pub statistic: String,
    pub algorithm: String,
    pub precision: String,
    pub value: f64,
}

/// Default verification tolerances per precision (relative to max-norm).
fn default_tolerance(precision: PrecisionMode) -> f64 {
    match precision {
        PrecisionMode::Double => <f64 as Scalar>::verification_tolerance(),
        PrecisionMode::Single => f64::from(<f32 as Scalar>::verification_tolerance()),
    }
}

fn precision_of(run: &AlgorithmResult) -> &'static str {
    run.precision.label()
}

/// Re-check the group-inverse axioms in the precision the run used.
fn verify(run: &AlgorithmResult, collected: &Collected) -> Option<Verification> {
    let tolerance = collected
        .tolerance_override
        .unwrap_or_else(|| default_tolerance(run.precision));
    match run.precision {
        PrecisionMode::Double => {
            let p = StochasticMatrix::validate(collected.p_double.clone()).ok()?;
            let pi = ProbabilityVector::new(run.pi.clone()).ok()?;
            let report = verify_group_axioms(
                &GroupInverseMatrix::new(run.a_sharp.clone()),
                &p,
                &pi,
                tolerance,
            );
            Some(Verification {
                max_residual: report.max_residual(),
                tolerance,
                pass: report.pass,
            })
        }
        PrecisionMode::Single => {
            let p32: StochasticMatrix<f32> =
                StochasticMatrix::validate(collected.p_double.convert()).ok()?;
            let pi32 =
                ProbabilityVector::<f32>::new(run.pi.iter().map(|&x| x as f32).collect()).ok()?;
            let a32: Mat<f32> = run.a_sharp.convert();
            let report =
                verify_group_axioms(&GroupInverseMatrix::new(a32), &p32, &pi32, tolerance as f32);
            Some(Verification {
                max_residual: f64::from(report.max_residual()),
                tolerance,
                pass: report.pass,
            })
        }
    }
}

pub fn build_report(collected: &Collected) -> Report {
    let mut algorithms = Vec::new();
    for run in &collected.runs {
        algorithms.push(AlgorithmReport {
            id: run.algorithm.label().to_string(),
            precision: precision_of(run).to_string(),
            pi: run.pi.clone(),
            mfpt: Some(run.mfpt.row_vecs()),
            group_inverse: Some(run.a_sharp.row_vecs()),
            trace: Some(
                run.trace
                    .iter()
                    .map(|t| TraceRow {
                        iteration: t.iteration,
                        denominator: t.denominator,
                        work_norm: t.work_norm,
                        invariant_deviation: t.invariant_deviation,
                    })
                    .collect(),
            ),
            verification: verify(run, collected),
        });
    }
    for (pi, precision) in [
        (&collected.gth_single, "single"),
        (&collected.gth_double, "double"),
    ] {
        if let Some(pi) = pi {
            algorithms.push(AlgorithmReport {
                id: "GTH".to_string(),
                precision: precision.to_string(),
                pi: pi.clone(),
                mfpt: None,
                group_inverse: None,
                trace: None,
                verification: None,
            });
        }
    }

    Report {
        input: collected.input_label.clone(),
        m: collected.m,
        tolerances: Tolerances {
            double: collected
                .tolerance_override
                .unwrap_or_else(|| default_tolerance(PrecisionMode::Double)),
            single: collected
                .tolerance_override
                .unwrap_or_else(|| default_tolerance(PrecisionMode::Single)),
        },
        timestamp: collected.timestamp,
        algorithms,
        statistics: build_statistics(collected),
    }
}

fn push(rows: &mut Vec<StatRow>, statistic: &str, algorithm: &str, precision: &str, value: f64) {
    rows.push(StatRow {
        statistic: statistic.to_string(),
        algorithm: algorithm.to_string(),
        precision: precision.to_string(),
        value,
    });
}

/// The Tables 1-3 style statistics, restricted to whatever combinations of
/// precision and benchmark are actually present.
fn build_statistics(c: &Collected) -> Statistics {
    let mut stationary = Vec::new();
    let mut mfpt = Vec::new();
    let mut group_inverse = Vec::new();

    let singles: Vec<&AlgorithmResult> = c
        .runs
        .iter()
        .filter(|r| r.precision == PrecisionMode::Single)
        .collect();
    let doubles: Vec<&AlgorithmResult> = c
        .runs
        .iter()
        .filter(|r| r.precision == PrecisionMode::Double)
        .collect();
    let reference = if c.use_reference {
        c.gth_double.as_deref()
    } else {
        None
    };

    // stationary rows, single precision
    if let Some(p32) = &c.p_single {
        if let Some(gth_s) = &c.gth_single {
            let (minre, maxre, rele) = metrics::stationary_residuals(gth_s, p32);
            push(&mut stationary, "MINRE(S)", "GTH", "single", minre);
            push(&mut stationary, "MAXRE(S)", "GTH", "single", maxre);
            push(&mut stationary, "RELE(S)", "GTH", "single", rele);
            if let Some(reference) = reference {
                let dp = metrics::avg_decimal_places_slice(reference, gth_s);
                push(
                    &mut stationary,
                    "Av # d.p.'s for pi(S)",
                    "GTH",
                    "single",
                    dp,
                );
            }
        }
        for run in &singles {
            let label = run.algorithm.label();
            let (minre, maxre, rele) = metrics::stationary_residuals(&run.pi, p32);
            push(&mut stationary, "MINRE(S)", label, "single", minre);
            push(&mut stationary, "MAXRE(S)", label, "single", maxre);
            push(&mut stationary, "RELE(S)", label, "single", rele);
            if let Some(reference) = reference {
                let dp = metrics::avg_decimal_places_slice(reference, &run.pi);
                push(
                    &mut stationary,
                    "Av # d.p.'s for pi(S)",
                    label,
                    "single",
                    dp,
                );
            }
            if c.use_reference {
                if let Some(gth_s) = &c.gth_single {
                    if let Ok((mine, maxe, rel)) = metrics::pairwise_vector_errors(gth_s, &run.pi) {
                        push(&mut stationary, "MINE(GTHS,S)", label, "single", mine);
                        push(&mut stationary, "MAXE(GTHS,S)", label, "single", maxe);
                        push(&mut stationary, "RELE(GTHS,S)", label, "single", rel);
                    }
                }
            }
        }
    }

    // single-vs-double pairwise rows
    if let (Some(gth_s), Some(gth_d)) = (&c.gth_single, &c.gth_double) {
        if let Ok((mine, maxe, rele)) = metrics::pairwise_vector_errors(gth_s, gth_d) {
            push(&mut stationary, "MINE(S,D)", "GTH", "both", mine);
            push(&mut stationary, "MAXE(S,D)", "GTH", "both", maxe);
            push(&mut stationary, "RELE(S,D)", "GTH", "both", rele);
        }
    }
    for single in &singles {
        if let Some(double) = doubles.iter().find(|d| d.algorithm == single.algorithm) {
            let label = single.algorithm.label();
            if let Ok((mine, maxe, rele)) = metrics::pairwise_vector_errors(&single.pi, &double.pi)
            {
                push(&mut stationary, "MINE(S,D)", label, "both", mine);
                push(&mut stationary, "MAXE(S,D)", label, "both", maxe);
                push(&mut stationary, "RELE(S,D)", label, "both", rele);
            }
            if let Ok((minem, maxem, rem)) = metrics::mfpt_pairwise(&single.mfpt, &double.mfpt) {
                push(&mut mfpt, "MINEM(S,D)", label, "both", minem);
                push(&mut mfpt, "MAXEM(S,D)", label, "both", maxem);
                push(&mut mfpt, "REM(S,D)", label, "both", rem);
            }
            push(
                &mut mfpt,
                "Accurate d.p.'s for M(S)",
                label,
                "single",
                metrics::avg_decimal_places(&double.mfpt, &single.mfpt),
            );
            push(
                &mut mfpt,
                "Accurate Digits",
                label,
                "both",
                metrics::accurate_digits(&double.mfpt, &single.mfpt),
            );
            push(
                &mut group_inverse,
                "Av # accurate d.p.'s A#(S)",
                label,
                "single",
                metrics::avg_decimal_places(&double.a_sharp, &single.a_sharp),
            );
            push(
                &mut group_inverse,
                "Accurate digits",
                label,
                "both",
                metrics::accurate_digits(&double.a_sharp, &single.a_sharp),
            );
        }
    }

    // stationary rows, double precision
    if let Some(gth_d) = &c.gth_double {
        let (minre, maxre, rele) = metrics::stationary_residuals(gth_d, &c.p_double);
        push(&mut stationary, "MINRE(D)", "GTH", "double", minre);
        push(&mut stationary, "MAXRE(D)", "GTH", "double", maxre);
        push(&mut stationary, "RELE(D)", "GTH", "double", rele);
        if let Some(reference) = reference {
            let dp = metrics::avg_decimal_places_slice(reference, gth_d);
            push(
                &mut stationary,
                "Av # d.p.'s for pi(D)",
                "GTH",
                "double",
                dp,
            );
        }
    }
    for run in &doubles {
        let label = run.algorithm.label();
        if let Some(reference) = reference {
            if let Ok((mine, maxe, rele)) = metrics::pairwise_vector_errors(reference, &run.pi) {
                push(&mut stationary, "MINE(GTHD,D)", label, "double", mine);
                push(&mut stationary, "MAXE(GTHD,D)", label, "double", maxe);
                push(&mut stationary, "RELE(GTHD,D)", label, "double", rele);
            }
        }
        let (minre, maxre, rele) = metrics::stationary_residuals(&run.pi, &c.p_double);
        push(&mut stationary, "MINRE(D)", label, "double", minre);
        push(&mut stationary, "MAXRE(D)", label, "double", maxre);
        push(&mut stationary, "RELE(D)", label, "double", rele);
        if let Some(reference) = reference {
            let dp = metrics::avg_decimal_places_slice(reference, &run.pi);
            push(
                &mut stationary,
                "Av # d.p.'s for pi(D)",
                label,
                "double",
                dp,
            );
        }
    }

    // residual and parameter rows per precision
    for (runs, p_mat, suffix, precision) in [
        (&singles, c.p_single.as_ref(), "(S)", "single"),
        (&doubles, Some(&c.p_double), "(D)", "double"),
    ] {
        let Some(p_mat) = p_mat else { continue };
        for run in runs {
            let label = run.algorithm.label();
            let (minresm, maxresm, resm) = metrics::mfpt_residuals(&run.mfpt, p_mat);
            push(
                &mut mfpt,
                &format!("MINRESM{suffix}"),
                label,
                precision,
                minresm,
            );
            push(
                &mut mfpt,
                &format!("MAXRESM{suffix}"),
                label,
                precision,
                maxresm,
            );
            push(&mut mfpt, &format!("RESM{suffix}"), label, precision, resm);

            if let Some(reference) = reference {
                let deltas = metrics::parameter_deltas(&run.a_sharp, p_mat, reference);
                for (name, value) in [
                    ("MINDELTA alpha", deltas.min_alpha),
                    ("MAXDELTA alpha", deltas.max_alpha),
                    ("RELDELTA alpha", deltas.sum_alpha),
                    ("MINDELTA beta", deltas.min_beta),
                    ("MAXDELTA beta", deltas.max_beta),
                    ("RELDELTA beta", deltas.sum_beta),
                    ("DELTA gamma", deltas.delta_gamma),
                ] {
                    push(
                        &mut group_inverse,
                        &format!("{name}{suffix}"),
                        label,
                        precision,
                        value,
                    );
                }
            }
        }
    }

    Statistics {
        stationary,
        mfpt,
        group_inverse,
    }
}

// ---------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
    Csv,
}

/// Significant-digit formatting: fixed-point when the exponent is tame,
/// scientific otherwise (the usual `%g` behavior).
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if exp >= -4 && (exp as i64) < sig as i64 {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = sig - 1)
    }
}

fn sig_for(precision: &str) -> usize {
    if precision == "single" {
        8
    } else {
        15
    }
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Table => render_table(report),
    }
}

/// Quote a CSV field when it holds a comma or quote (statistic labels like
/// `MINE(GTHD,D)` do).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(report: &Report) -> String {
    let mut out = String::from("statistic,algorithm,precision,value\n");
    for rows in [
        &report.statistics.stationary,
        &report.statistics.mfpt,
        &report.statistics.group_inverse,
    ] {
        for row in rows.iter() {
            out.push_str(&format!(
                "{},{},{},{:e}\n",
                csv_field(&row.statistic),
                row.algorithm,
                row.precision,
                row.value
            ));
        }
    }
    out
}

fn matrix_block(out: &mut String, title: &str, rows: &[Vec<f64>], sig: usize) {
    out.push_str(title);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_sig(x, sig)).collect();
        out.push_str("  ");
        out.push_str(&cells.join("  "));
        out.push('\n');
    }
}

fn stat_table(out: &mut String, title: &str, rows: &[StatRow]) {
    if rows.is_empty() {
        return;
    }
    out.push_str(&format!("== {title} ==\n"));
    // column per algorithm, row per statistic, in first-seen order
    let mut algorithms: Vec<&str> = Vec::new();
    let mut stats: Vec<&str> = Vec::new();
    for row in rows {
        if !algorithms.contains(&row.algorithm.as_str()) {
            algorithms.push(&row.algorithm);
        }
        if !stats.contains(&row.statistic.as_str()) {
            stats.push(&row.statistic);
        }
    }
    // GTH first when present, to match the published layout
    algorithms.sort_by_key(|a| if *a == "GTH" { 0 } else { 1 });
    let width = 13;
    let label_width = stats.iter().map(|s| s.len()).max().unwrap_or(0).max(9);
    out.push_str(&format!("{:label_width$}", "statistic"));
    for algorithm in &algorithms {
        out.push_str(&format!(" {algorithm:>width$}"));
    }
    out.push('\n');
    for stat in stats {
        out.push_str(&format!("{stat:label_width$}"));
        for algorithm in &algorithms {
            let cell = rows
                .iter()
                .find(|r| r.statistic == stat && r.algorithm == *algorithm)
                .map(|r| format!("{:.4e}", r.value))
                .unwrap_or_default();
            out.push_str(&format!(" {cell:>width$}"));
        }
        out.push('\n');
    }
    out.push('\n');
}

fn render_table(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {} (m = {})\n\n", report.input, report.m));
    for algorithm in &report.algorithms {
        let sig = sig_for(&algorithm.precision);
        out.push_str(&format!(
            "-- {} ({}) --\n",
            algorithm.id, algorithm.precision
        ));
        let pi_cells: Vec<String> = algorithm.pi.iter().map(|&x| fmt_sig(x, sig)).collect();
        out.push_str(&format!("pi:\n  {}\n", pi_cells.join("  ")));
        if let Some(mfpt) = &algorithm.mfpt {
            matrix_block(&mut out, "M (mean first passage times):", mfpt, sig);
        }
        if let Some(a_sharp) = &algorithm.group_inverse {
            matrix_block(&mut out, "A# (group inverse):", a_sharp, sig);
        }
        if let Some(v) = &algorithm.verification {
            out.push_str(&format!(
                "group-inverse axioms: max residual {:.4e} (tolerance {:.1e}) -> {}\n",
                v.max_residual,
                v.tolerance,
                if v.pass { "pass" } else { "FAIL" }
            ));
        }
        out.push('\n');
    }
    stat_table(
        &mut out,
        "Stationary distribution error statistics",
        &report.statistics.stationary,
    );
    stat_table(
        &mut out,
        "Mean first passage time error statistics",
        &report.statistics.mfpt,
    );
    stat_table(
        &mut out,
        "Group inverse error statistics",
        &report.statistics.group_inverse,
    );
    out
}
