//! GTH / state-reduction benchmark solver for the stationary distribution.
//!
//! The reduction folds states `m-1, ..., 1` (zero-based) into the remaining
//! ones and back-substitutes unnormalized weights. Every intermediate
//! quantity is a sum, product or quotient of nonnegative values: no
//! subtraction occurs anywhere after validation, which is what gives the
//! method its numerical stability and makes it the benchmark here.

use crate::chain::{ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::precision::Scalar;

/// Folding phase: eliminate states from the last to the second, in place.
/// Returns the departure weights `s_n` recorded as each state was folded.
pub(crate) fn fold_states<T: Scalar>(q: &mut Mat<T>) -> Result<Vec<T>> {
    let m = q.n_rows();
    let mut s = vec![T::zero(); m];
    for n in (1..m).rev() {
        let mut sn = T::zero();
        for j in 0..n {
            sn = sn + q[(n, j)];
        }
        if !sn.is_finite() || sn <= T::zero() {
            // contradicts validated irreducibility; signals corrupt data
            return Err(Error::Reducible {
                unreachable: (n..m).collect(),
                witness: n,
            });
        }
        s[n] = sn;
        for i in 0..n {
            let scale = q[(i, n)] / sn;
            for j in 0..n {
                let add = scale * q[(n, j)];
                q[(i, j)] = q[(i, j)] + add;
            }
        }
    }
    Ok(s)
}

/// Stationary distribution by GTH state reduction.
///
/// Runs entirely in the element type of `p`; round the matrix to `f32`
/// first (see [`StochasticMatrix::to_precision`]) for the single-precision
/// benchmark.
pub fn gth_stationary<T: Scalar>(p: &StochasticMatrix<T>) -> Result<ProbabilityVector<T>> {
    let m = p.m();
    let mut q = p.mat().clone();
    let s = fold_states(&mut q)?;

    let mut w = vec![T::zero(); m];
    w[0] = T::one();
    for n in 1..m {
        let mut acc = T::zero();
        for i in 0..n {
            acc = acc + w[i] * q[(i, n)];
        }
        w[n] = acc / s[n];
    }
    let total = w.iter().fold(T::zero(), |a, &x| a + x);
    let pi: Vec<T> = w.into_iter().map(|x| x / total).collect();
    ProbabilityVector::new(pi)
}
