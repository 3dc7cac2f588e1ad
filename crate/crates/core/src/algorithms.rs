//! The four row-by-row perturbation sweeps. Each starts from the uniform
//! chain, replaces one row per step with the corresponding row of the
//! target matrix, carries a working matrix through the sweep by rank-one
//! updates, and finishes with the stationary vector, group inverse and
//! mean first passage time matrix of the target chain.
//!
//! Per-step traces record the update denominator (the only failure mode),
//! the max-norm of the working matrix, and the deviation of the invariant
//! the sweep is supposed to preserve.

use crate::chain::{build_perturbation_row, ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::ginverse::{complement_projector, GroupInverseMatrix, MfptMatrix};
use crate::gth::gth_stationary;
use crate::matrix::{max_abs_vec, ones_vec, vec_sum, Mat};
use crate::precision::{near_singular_threshold, PrecisionMode, Scalar};

/// The perturbation algorithms, plus the three starting conditions of the
/// simple-g-inverse family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    /// Updates a `t,u`-inverse alongside the vector `u`.
    Al1,
    /// Updates the zero-row-sum working matrix `R` of the group inverse.
    Al2,
    /// Updates the stationary projector and group inverse in tandem.
    Al3,
    /// Updates `[I - P_i + e e^T/m]^{-1}`, starting from the identity.
    Al4A,
    /// Updates `[I - P_i + e e_1^T]^{-1}`.
    Al4B,
    /// Updates `[I - P_i + e e^T]^{-1}`.
    Al4C,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::Al1,
        AlgorithmId::Al2,
        AlgorithmId::Al3,
        AlgorithmId::Al4A,
        AlgorithmId::Al4B,
        AlgorithmId::Al4C,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmId::Al1 => "AL1",
            AlgorithmId::Al2 => "AL2",
            AlgorithmId::Al3 => "AL3",
            AlgorithmId::Al4A => "AL4A",
            AlgorithmId::Al4B => "AL4B",
            AlgorithmId::Al4C => "AL4C",
        }
    }

    pub fn parse(s: &str) -> Option<AlgorithmId> {
        match s.to_ascii_lowercase().as_str() {
            "al1" => Some(AlgorithmId::Al1),
            "al2" => Some(AlgorithmId::Al2),
            "al3" => Some(AlgorithmId::Al3),
            "al4a" => Some(AlgorithmId::Al4A),
            "al4b" => Some(AlgorithmId::Al4B),
            "al4c" => Some(AlgorithmId::Al4C),
            _ => None,
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Starting condition of the simple-g-inverse sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Al4Variant {
    A,
    B,
    C,
}

/// One step of a sweep: the update denominator, the max-norm of the
/// working matrix after the step, and the deviation of the sweep's
/// preserved invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    /// One-based row-replacement step.
    pub iteration: usize,
    pub denominator: f64,
    pub work_norm: f64,
    pub invariant_deviation: f64,
}

/// Output of one sweep in the arithmetic type it ran in.
#[derive(Debug, Clone)]
pub struct SweepOutput<T> {
    pub pi: ProbabilityVector<T>,
    pub a_sharp: GroupInverseMatrix<T>,
    pub mfpt: MfptMatrix<T>,
    pub trace: Vec<TraceEntry>,
}

/// A finished run, widened to `f64` for reporting, tagged with the
/// precision all of its arithmetic was carried out in.
#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub algorithm: AlgorithmId,
    pub precision: PrecisionMode,
    pub pi: Vec<f64>,
    pub a_sharp: Mat<f64>,
    pub mfpt: Mat<f64>,
    pub trace: Vec<TraceEntry>,
}

fn guard_denominator<T: Scalar>(denom: T, scale: T, step: usize) -> Result<()> {
    let threshold = near_singular_threshold(scale);
    if denom.abs() <= threshold {
        return Err(Error::NearSingularUpdate {
            denominator: denom.to_f64(),
            threshold: threshold.to_f64(),
            step,
        });
    }
    Ok(())
}

/// `M = [I - W + E W_d] D` from an algorithm's own working matrix, with
/// `D = diag(1/pi_j)`.
fn mfpt_from_working<T: Scalar>(w: &Mat<T>, pi: &ProbabilityVector<T>) -> Result<MfptMatrix<T>> {
    let m = pi.len();
    let recip: Vec<T> = pi.entries().iter().map(|&x| T::one() / x).collect();
    let entries = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        (d - w[(i, j)] + w[(j, j)]) * recip[j]
    });
    MfptMatrix::new(entries, pi)
}

fn normalize<T: Scalar>(w: &[T], step_label: usize) -> Result<ProbabilityVector<T>> {
    let denom = vec_sum(w);
    guard_denominator(denom, max_abs_vec(w), step_label)?;
    ProbabilityVector::new(w.iter().map(|&x| x / denom).collect())
}

/// Sweep over a `t,u`-inverse: carries `G_i = [I - P_i + t_i u_i^T]^{-1}`
/// with `t_0 = e`, `t_i = e_i`, and `u_i` accumulating the replaced rows.
pub fn run_al1<T: Scalar>(p: &StochasticMatrix<T>) -> Result<SweepOutput<T>> {
    let m = p.m();
    let uniform = T::one() / T::from_usize(m);
    let mut g = Mat::<T>::identity(m);
    let mut u = vec![uniform; m];
    let mut trace = Vec::with_capacity(m);

    for k in 0..m {
        let r = g.premul_vec(&u);
        let denom = r[k];
        guard_denominator(denom, g.max_abs(), k + 1)?;
        // column factor G (e_{k-1} - e_k); the first step uses t_0 = e
        let c: Vec<T> = if k == 0 {
            let ge = g.row_sums();
            let gk = g.col(0);
            ge.iter().zip(&gk).map(|(&a, &b)| a - b).collect()
        } else {
            let prev = g.col(k - 1);
            let cur = g.col(k);
            prev.iter().zip(&cur).map(|(&a, &b)| a - b).collect()
        };
        g.add_rank_one(&c, &r, T::one() / denom);
        for (uj, &pj) in u.iter_mut().zip(p.row(k)) {
            *uj = *uj + (pj - uniform);
        }
        trace.push(TraceEntry {
            iteration: k + 1,
            denominator: denom.to_f64(),
            work_norm: g.max_abs().to_f64(),
            invariant_deviation: (vec_sum(&u) - T::one()).abs().to_f64(),
        });
    }

    let w = g.premul_vec(&u);
    let pi = normalize(&w, m)?;
    let h = g.mul(&complement_projector(pi.entries()));
    let a_sharp = GroupInverseMatrix::new(complement_projector(pi.entries()).mul(&h));
    let mfpt = mfpt_from_working(&h, &pi)?;
    Ok(SweepOutput {
        pi,
        a_sharp,
        mfpt,
        trace,
    })
}

/// Sweep over the zero-row-sum part `R` of the group inverse.
pub fn run_al2<T: Scalar>(p: &StochasticMatrix<T>) -> Result<SweepOutput<T>> {
    let m = p.m();
    let uniform = T::one() / T::from_usize(m);
    let mut r = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - uniform
    });
    let mut trace = Vec::with_capacity(m);

    for k in 0..m {
        let b = build_perturbation_row(p, k)?;
        let w = r.premul_vec(b.b());
        let denom = T::one() - w[k];
        guard_denominator(denom, r.max_abs(), k + 1)?;
        let c = r.col(k);
        r.add_rank_one(&c, &w, T::one() / denom);
        trace.push(TraceEntry {
            iteration: k + 1,
            denominator: denom.to_f64(),
            work_norm: r.max_abs().to_f64(),
            invariant_deviation: max_abs_vec(&r.row_sums()).to_f64(),
        });
    }

    // pi^T = e_1^T - e_1^T (I - P) R
    let first_row_of_a: Vec<T> = (0..m)
        .map(|j| {
            let d = if j == 0 { T::one() } else { T::zero() };
            d - p.mat()[(0, j)]
        })
        .collect();
    let w = r.premul_vec(&first_row_of_a);
    let pi_vec: Vec<T> = (0..m)
        .map(|j| {
            let d = if j == 0 { T::one() } else { T::zero() };
            d - w[j]
        })
        .collect();
    let pi = ProbabilityVector::new(pi_vec)?;

    let a_sharp = GroupInverseMatrix::new(complement_projector(pi.entries()).mul(&r));
    let mfpt = mfpt_from_working(&r, &pi)?;
    Ok(SweepOutput {
        pi,
        a_sharp,
        mfpt,
        trace,
    })
}

/// Sweep updating the stationary projector and the group inverse together.
pub fn run_al3<T: Scalar>(p: &StochasticMatrix<T>) -> Result<SweepOutput<T>> {
    let m = p.m();
    let uniform = T::one() / T::from_usize(m);
    let mut projector = Mat::from_fn(m, m, |_, _| uniform); // e pi_i^T as a full matrix
    let mut a_sharp = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - uniform
    });
    let ones = ones_vec::<T>(m);
    let mut trace = Vec::with_capacity(m);

    for k in 0..m {
        let b = build_perturbation_row(p, k)?;
        let w = a_sharp.premul_vec(b.b());
        let denom = T::one() - w[k];
        guard_denominator(denom, a_sharp.max_abs(), k + 1)?;
        let s: Vec<T> = w.iter().map(|&x| x / denom).collect();

        // Pi_i = Pi_{i-1} S_i with S_i = I + e_k s^T
        let pcol = projector.col(k);
        projector.add_rank_one(&pcol, &s, T::one());
        // A_i = (I - Pi_i) A_{i-1} S_i; rows of Pi_i are identical, so the
        // left factor subtracts e (pi_i^T X) from X
        let acol = a_sharp.col(k);
        a_sharp.add_rank_one(&acol, &s, T::one());
        let correction = a_sharp.premul_vec(projector.row(0));
        a_sharp.add_rank_one(&ones, &correction, -T::one());

        let row_consistency = (1..m).fold(T::zero(), |acc, rr| {
            let dev = projector
                .row(rr)
                .iter()
                .zip(projector.row(0))
                .fold(T::zero(), |a, (&x, &y)| a.max((x - y).abs()));
            acc.max(dev)
        });
        let invariant = row_consistency.max(max_abs_vec(&a_sharp.row_sums()));
        trace.push(TraceEntry {
            iteration: k + 1,
            denominator: denom.to_f64(),
            work_norm: a_sharp.max_abs().to_f64(),
            invariant_deviation: invariant.to_f64(),
        });
    }

    let pi = ProbabilityVector::new(projector.row(0).to_vec())?;
    let mfpt = mfpt_from_working(&a_sharp, &pi)?;
    Ok(SweepOutput {
        pi,
        a_sharp: GroupInverseMatrix::new(a_sharp),
        mfpt,
        trace,
    })
}

/// Sweep over `K_i = [I - P_i + e beta^T]^{-1}` for the variant's `beta`.
pub fn run_al4<T: Scalar>(p: &StochasticMatrix<T>, variant: Al4Variant) -> Result<SweepOutput<T>> {
    let m = p.m();
    let mf = T::from_usize(m);
    let uniform = T::one() / mf;
    let mut k_mat = match variant {
        Al4Variant::A => Mat::<T>::identity(m),
        Al4Variant::B => Mat::from_fn(m, m, |i, j| {
            let d = if i == j { T::one() } else { T::zero() };
            let shift = if j == 0 { uniform - T::one() } else { uniform };
            d + shift
        }),
        Al4Variant::C => {
            let c = (mf - T::one()) / (mf * mf);
            Mat::from_fn(m, m, |i, j| {
                let d = if i == j { T::one() } else { T::zero() };
                d - c
            })
        }
    };
    let mut trace = Vec::with_capacity(m);
    let ones_target = match variant {
        Al4Variant::A | Al4Variant::B => T::one(),
        Al4Variant::C => uniform,
    };

    for k in 0..m {
        let b = build_perturbation_row(p, k)?;
        let w = k_mat.premul_vec(b.b());
        let denom = T::one() - w[k];
        guard_denominator(denom, k_mat.max_abs(), k + 1)?;
        let c = k_mat.col(k);
        k_mat.add_rank_one(&c, &w, T::one() / denom);

        let invariant = k_mat
            .row_sums()
            .into_iter()
            .fold(T::zero(), |acc, s| acc.max((s - ones_target).abs()));
        trace.push(TraceEntry {
            iteration: k + 1,
            denominator: denom.to_f64(),
            work_norm: k_mat.max_abs().to_f64(),
            invariant_deviation: invariant.to_f64(),
        });
    }

    let pi_vec: Vec<T> = match variant {
        Al4Variant::A => {
            let col_sums = k_mat.premul_vec(&ones_vec(m));
            col_sums.into_iter().map(|x| x * uniform).collect()
        }
        Al4Variant::B => k_mat.row(0).to_vec(),
        Al4Variant::C => k_mat.premul_vec(&ones_vec(m)),
    };
    let pi = ProbabilityVector::new(pi_vec)?;
    let a_sharp = GroupInverseMatrix::new(complement_projector(pi.entries()).mul(&k_mat));
    let mfpt = mfpt_from_working(&k_mat, &pi)?;
    Ok(SweepOutput {
        pi,
        a_sharp,
        mfpt,
        trace,
    })
}

/// Dispatch one sweep by id, in the arithmetic type of `p`.
pub fn run_sweep<T: Scalar>(p: &StochasticMatrix<T>, id: AlgorithmId) -> Result<SweepOutput<T>> {
    match id {
        AlgorithmId::Al1 => run_al1(p),
        AlgorithmId::Al2 => run_al2(p),
        AlgorithmId::Al3 => run_al3(p),
        AlgorithmId::Al4A => run_al4(p, Al4Variant::A),
        AlgorithmId::Al4B => run_al4(p, Al4Variant::B),
        AlgorithmId::Al4C => run_al4(p, Al4Variant::C),
    }
}

fn widen<T: Scalar>(
    id: AlgorithmId,
    precision: PrecisionMode,
    out: SweepOutput<T>,
) -> AlgorithmResult {
    AlgorithmResult {
        algorithm: id,
        precision,
        pi: out.pi.to_f64(),
        a_sharp: out.a_sharp.to_f64(),
        mfpt: out.mfpt.to_f64(),
        trace: out.trace,
    }
}

/// Run one algorithm at the requested precision. `Single` rounds the input
/// matrix to binary32 and keeps every intermediate there; results are
/// widened (exactly) to `f64` for reporting.
pub fn run_algorithm(
    p: &StochasticMatrix<f64>,
    id: AlgorithmId,
    precision: PrecisionMode,
) -> Result<AlgorithmResult> {
    match precision {
        PrecisionMode::Double => Ok(widen(id, precision, run_sweep(p, id)?)),
        PrecisionMode::Single => {
            let p32: StochasticMatrix<f32> = p.to_precision()?;
            Ok(widen(id, precision, run_sweep(&p32, id)?))
        }
    }
}

/// Stationary vector by GTH at the requested precision, widened to `f64`.
pub fn gth_at_precision(p: &StochasticMatrix<f64>, precision: PrecisionMode) -> Result<Vec<f64>> {
    match precision {
        PrecisionMode::Double => Ok(gth_stationary(p)?.to_f64()),
        PrecisionMode::Single => {
            let p32: StochasticMatrix<f32> = p.to_precision()?;
            Ok(gth_stationary(&p32)?.to_f64())
        }
    }
}

/// All algorithms plus the GTH benchmark at one precision. Per-algorithm
/// failures are collected, not propagated, so one bad sweep does not take
/// the rest of the comparison down.
#[derive(Debug)]
pub struct RunSummary {
    pub precision: PrecisionMode,
    pub gth_pi: Result<Vec<f64>>,
    pub runs: Vec<(AlgorithmId, Result<AlgorithmResult>)>,
}

pub fn run_all(p: &StochasticMatrix<f64>, precision: PrecisionMode) -> RunSummary {
    let runs = AlgorithmId::ALL
        .into_iter()
        .map(|id| (id, run_algorithm(p, id, precision)))
        .collect();
    RunSummary {
        precision,
        gth_pi: gth_at_precision(p, precision),
        runs,
    }
}
