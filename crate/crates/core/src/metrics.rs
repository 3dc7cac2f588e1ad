//! Error statistics for comparing algorithm outputs: residuals against the
//! defining equations, entrywise differences against a benchmark, parameter
//! deltas of a computed group inverse, and the accurate-digit /
//! accurate-decimal-places averages used to grade single-precision runs.
//!
//! Everything here compares stored (widened) `f64` values; the statistics
//! themselves are always evaluated in double precision.

use crate::error::{Error, Result};
use crate::matrix::{dot, Mat};

/// `(min, max, sum)` of a set of absolute errors.
fn spread(values: impl Iterator<Item = f64>) -> (f64, f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    let mut any = false;
    for v in values {
        any = true;
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    if !any {
        return (0.0, 0.0, 0.0);
    }
    (min, max, sum)
}

/// Residuals of the stationary equations: `r_j = |pi_j - sum_i pi_i p_ij|`,
/// reported as `(min, max, sum)`.
pub fn stationary_residuals(pi: &[f64], p: &Mat<f64>) -> (f64, f64, f64) {
    let pi_p = p.premul_vec(pi);
    spread(pi.iter().zip(&pi_p).map(|(&a, &b)| (a - b).abs()))
}

/// Entrywise `(min, max, sum)` of `|a_i - b_i|` between two vectors.
pub fn pairwise_vector_errors(a: &[f64], b: &[f64]) -> Result<(f64, f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(spread(a.iter().zip(b).map(|(&x, &y)| (x - y).abs())))
}

/// Residuals of the first-step equations over the whole grid:
/// `rho_ij = |m_ij - sum_{k != j} p_ik m_kj - 1|`, as `(min, max, sum)`.
pub fn mfpt_residuals(mfpt: &Mat<f64>, p: &Mat<f64>) -> (f64, f64, f64) {
    let m = p.n_rows();
    spread((0..m).flat_map(|i| {
        (0..m).map(move |j| {
            let mut acc = 0.0;
            for k in 0..m {
                if k != j {
                    acc += p[(i, k)] * mfpt[(k, j)];
                }
            }
            (mfpt[(i, j)] - acc - 1.0).abs()
        })
    }))
}

/// Entrywise `(min, max, sum)` of `|a_ij - b_ij|` between two matrices.
pub fn mfpt_pairwise(a: &Mat<f64>, b: &Mat<f64>) -> Result<(f64, f64, f64)> {
    if a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols() {
        return Err(Error::DimensionMismatch {
            left_rows: a.n_rows(),
            left_cols: a.n_cols(),
            right_rows: b.n_rows(),
            right_cols: b.n_cols(),
        });
    }
    Ok(spread(
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(&x, &y)| (x - y).abs()),
    ))
}

/// Deviations of a computed group inverse's parameters from their exact
/// values `alpha = e`, `beta = pi`, `gamma = -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterDeltas {
    pub min_alpha: f64,
    pub max_alpha: f64,
    pub sum_alpha: f64,
    pub min_beta: f64,
    pub max_beta: f64,
    pub sum_beta: f64,
    /// `|beta^T A# alpha|`, i.e. `|gamma + 1|`.
    pub delta_gamma: f64,
}

/// Parameter deltas of a candidate group inverse against the benchmark
/// stationary vector: `alpha = (I - (I-P) A#) e`,
/// `beta^T = pi^T (I - A# (I-P))`.
pub fn parameter_deltas(a_sharp: &Mat<f64>, p: &Mat<f64>, pi_ref: &[f64]) -> ParameterDeltas {
    let m = p.n_rows();
    let a = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        d - p[(i, j)]
    });
    let a_g = Mat::identity(m).sub(&a.mul(a_sharp));
    let b_g = Mat::identity(m).sub(&a_sharp.mul(&a));
    let alpha = a_g.row_sums();
    let beta = b_g.premul_vec(pi_ref);

    let (min_alpha, max_alpha, sum_alpha) = spread(alpha.iter().map(|&x| (x - 1.0).abs()));
    let (min_beta, max_beta, sum_beta) =
        spread(beta.iter().zip(pi_ref).map(|(&b, &r)| (b - r).abs()));
    let delta_gamma = dot(&beta, &a_sharp.mul_vec(&alpha)).abs();
    ParameterDeltas {
        min_alpha,
        max_alpha,
        sum_alpha,
        min_beta,
        max_beta,
        sum_beta,
        delta_gamma,
    }
}

/// Cap used when a computed entry matches the truth exactly: about the
/// digit budget of an f64.
pub const ACCURATE_DIGITS_CAP: f64 = 16.0;

/// Average over entries of `-log10(|truth - computed| / |truth|)`, with
/// exact matches counted at [`ACCURATE_DIGITS_CAP`] and zero-truth entries
/// skipped. Returns the average and the skip count.
pub fn accurate_digits_detailed(truth: &[f64], computed: &[f64]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut counted = 0usize;
    let mut skipped = 0usize;
    for (&t, &c) in truth.iter().zip(computed) {
        if t == 0.0 {
            skipped += 1;
            continue;
        }
        let digits = if t == c {
            ACCURATE_DIGITS_CAP
        } else {
            -((t - c).abs() / t.abs()).log10()
        };
        sum += digits;
        counted += 1;
    }
    if counted == 0 {
        return (ACCURATE_DIGITS_CAP, skipped);
    }
    (sum / counted as f64, skipped)
}

/// Average number of extra accurate digits of `computed` against `truth`.
pub fn accurate_digits(truth: &Mat<f64>, computed: &Mat<f64>) -> f64 {
    accurate_digits_detailed(truth.as_slice(), computed.as_slice()).0
}

/// Largest number of decimal places (0..=15) to which `computed` agrees
/// with an appropriately rounded `reference`, per entry; rounding is
/// half-away-from-zero and agreement means within half a unit in the last
/// rounded place.
fn decimal_places_entry(reference: f64, computed: f64) -> u32 {
    if computed == reference {
        return 15;
    }
    for d in (0..=15u32).rev() {
        let scale = 10f64.powi(d as i32);
        let rounded = (reference.abs() * scale + 0.5).floor() / scale * reference.signum();
        if (computed - rounded).abs() < 0.5 / scale {
            return d;
        }
    }
    0
}

/// Average agreed decimal places over two equally shaped value sets.
pub fn avg_decimal_places_slice(reference: &[f64], computed: &[f64]) -> f64 {
    if reference.is_empty() {
        return 0.0;
    }
    let total: u32 = reference
        .iter()
        .zip(computed)
        .map(|(&r, &c)| decimal_places_entry(r, c))
        .sum();
    f64::from(total) / reference.len() as f64
}

pub fn avg_decimal_places(reference: &Mat<f64>, computed: &Mat<f64>) -> f64 {
    avg_decimal_places_slice(reference.as_slice(), computed.as_slice())
}

/// Stationary-distribution error statistics for one run, optionally
/// compared against a benchmark vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryErrorReport {
    pub minre: f64,
    pub maxre: f64,
    pub rele: f64,
    pub mine: Option<f64>,
    pub maxe: Option<f64>,
    pub rele_pair: Option<f64>,
    pub avg_decimal_places: Option<f64>,
}

/// Mean-first-passage-time error statistics for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfptErrorReport {
    pub minresm: f64,
    pub maxresm: f64,
    pub resm: f64,
    pub minem: Option<f64>,
    pub maxem: Option<f64>,
    pub rem: Option<f64>,
    pub accurate_digits: Option<f64>,
    pub avg_decimal_places: Option<f64>,
}

/// Group-inverse parameter statistics for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupInverseErrorReport {
    pub deltas: ParameterDeltas,
    pub accurate_digits: Option<f64>,
    pub avg_decimal_places: Option<f64>,
}
