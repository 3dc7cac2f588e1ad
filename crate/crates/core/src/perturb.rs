//! Rank-one perturbation kernels: the Sherman-Morrison inverse update and
//! the single-row update formulas for the stationary vector and the group
//! inverse of a perturbed chain.

use crate::chain::{PerturbationRow, ProbabilityVector};
use crate::error::{Error, Result};
use crate::ginverse::GroupInverseMatrix;
use crate::matrix::LuDecomposition;
use crate::matrix::{dot, max_abs_vec, ones_vec, vec_sum, Mat};
use crate::precision::{near_singular_threshold, Scalar};

/// A rank-one modification `I - a h^T` together with the denominator
/// `1 - h^T a` of its closed-form inverse `I + a h^T / (1 - h^T a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneUpdate<T> {
    a: Vec<T>,
    h: Vec<T>,
    denom: T,
}

impl<T: Scalar> RankOneUpdate<T> {
    /// Fails with [`Error::NearSingularUpdate`] when `1 - h^T a` falls
    /// below the singularity threshold for the given magnitude scale.
    pub fn new(a: Vec<T>, h: Vec<T>, scale: T, step: usize) -> Result<Self> {
        if a.len() != h.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: h.len(),
            });
        }
        let denom = T::one() - dot(&h, &a);
        let threshold = near_singular_threshold(scale);
        if denom.abs() <= threshold {
            return Err(Error::NearSingularUpdate {
                denominator: denom.to_f64(),
                threshold: threshold.to_f64(),
                step,
            });
        }
        Ok(RankOneUpdate { a, h, denom })
    }

    pub fn denominator(&self) -> T {
        self.denom
    }

    /// `x^T (I - a h^T)^{-1} = x^T + (x^T a / denom) h^T`.
    pub fn apply_row(&self, x: &[T]) -> Vec<T> {
        let factor = dot(x, &self.a) / self.denom;
        x.iter()
            .zip(&self.h)
            .map(|(&xi, &hi)| xi + factor * hi)
            .collect()
    }
}

/// Sherman-Morrison: `(A + u v^T)^{-1}` from `A^{-1}`.
pub fn sherman_morrison_apply<T: Scalar>(a_inv: &Mat<T>, u: &[T], v: &[T]) -> Result<Mat<T>> {
    let m = a_inv.n_rows();
    if u.len() != m || v.len() != m {
        return Err(Error::LengthMismatch {
            left: u.len().min(v.len()),
            right: m,
        });
    }
    let au = a_inv.mul_vec(u);
    let denom = T::one() + dot(v, &au);
    let threshold = near_singular_threshold(a_inv.max_abs());
    if denom.abs() <= threshold {
        return Err(Error::NearSingularUpdate {
            denominator: denom.to_f64(),
            threshold: threshold.to_f64(),
            step: 0,
        });
    }
    let va = a_inv.premul_vec(v);
    let mut out = a_inv.clone();
    out.add_rank_one(&au, &va, -(T::one() / denom));
    Ok(out)
}

/// Which kind of g-inverse a stationary update is driven by. All three
/// admit the same `pi^T [I + (1/d) e_i b^T G]` formula with
/// `d = 1 - b^T G e_i`; they differ in the property of `G` that makes the
/// formula exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateForm {
    /// `G e = 0` (an H transform, or anything in its class).
    ZeroRowSums,
    /// `G e = g e` for some scalar.
    RowConstant,
    /// `G` is the group inverse of the unperturbed chain (`G e = 0` too).
    GroupInverse,
}

/// Stationary vector of a chain with one replaced row, from the stationary
/// vector and a suitable g-inverse of the unperturbed chain. The result is
/// renormalized to sum exactly 1 to keep drift across chained updates down.
pub fn stationary_update_row<T: Scalar>(
    pi_prev: &ProbabilityVector<T>,
    g: &Mat<T>,
    b: &PerturbationRow<T>,
    form: UpdateForm,
) -> Result<ProbabilityVector<T>> {
    let m = pi_prev.len();
    if g.n_rows() != m || !g.is_square() || b.b().len() != m {
        return Err(Error::DimensionMismatch {
            left_rows: g.n_rows(),
            left_cols: g.n_cols(),
            right_rows: m,
            right_cols: m,
        });
    }
    check_row_sums(g, form)?;

    let i = b.index();
    let w = g.premul_vec(b.b()); // b^T G
    let denom = T::one() - w[i];
    let threshold = near_singular_threshold(g.max_abs());
    if denom.abs() <= threshold {
        return Err(Error::NearSingularUpdate {
            denominator: denom.to_f64(),
            threshold: threshold.to_f64(),
            step: i + 1,
        });
    }
    let factor = pi_prev.entries()[i] / denom;
    let mut bar: Vec<T> = pi_prev
        .entries()
        .iter()
        .zip(&w)
        .map(|(&p, &wj)| p + factor * wj)
        .collect();
    let total = vec_sum(&bar);
    for x in &mut bar {
        *x = *x / total;
    }
    ProbabilityVector::new(bar)
}

fn check_row_sums<T: Scalar>(g: &Mat<T>, form: UpdateForm) -> Result<()> {
    let m = g.n_rows();
    let sums = g.row_sums();
    let tolerance = T::from_f64(1e3) * T::epsilon() * T::from_usize(m) * g.max_abs().max(T::one());
    let deviation = match form {
        UpdateForm::ZeroRowSums | UpdateForm::GroupInverse => max_abs_vec(&sums),
        UpdateForm::RowConstant => {
            let mean = vec_sum(&sums) / T::from_usize(m);
            sums.iter()
                .fold(T::zero(), |acc, &s| acc.max((s - mean).abs()))
        }
    };
    if deviation > tolerance {
        return Err(Error::NotRowConstant {
            deviation: deviation.to_f64(),
            tolerance: tolerance.to_f64(),
        });
    }
    Ok(())
}

/// Group inverse of a chain with one replaced row, updated in `O(m^2)`.
///
/// `pi_prev_i` is the `i`-th stationary probability of the unperturbed
/// chain. The two scalar contractions `b^T A# e_i` and `b^T (A#)^2 e_i`
/// are formed once from `b^T A#` and `A# e_i`.
pub fn group_inverse_update_row<T: Scalar>(
    a_prev: &GroupInverseMatrix<T>,
    pi_prev_i: T,
    b: &PerturbationRow<T>,
) -> Result<GroupInverseMatrix<T>> {
    let a = a_prev.matrix();
    let m = a.n_rows();
    if b.b().len() != m {
        return Err(Error::LengthMismatch {
            left: b.b().len(),
            right: m,
        });
    }
    let i = b.index();
    let w = a.premul_vec(b.b()); // b^T A#
    let v = a.col(i); // A# e_i
    let contraction = w[i]; // b^T A# e_i
    let denom = T::one() - contraction;
    let threshold = near_singular_threshold(a.max_abs());
    if denom.abs() <= threshold {
        return Err(Error::NearSingularUpdate {
            denominator: denom.to_f64(),
            threshold: threshold.to_f64(),
            step: i + 1,
        });
    }
    let second = dot(&w, &v); // b^T (A#)^2 e_i
    let wa = a.premul_vec(&w); // b^T A# A#
    let lead = -(pi_prev_i / denom);
    let inner = second / denom;
    let y: Vec<T> = wa
        .iter()
        .zip(&w)
        .map(|(&row, &wj)| lead * (row + inner * wj))
        .collect();

    let mut out = a.clone();
    out.add_rank_one(&v, &w, T::one() / denom);
    out.add_rank_one(&ones_vec(m), &y, T::one());
    Ok(GroupInverseMatrix::new(out))
}

/// Result of re-deriving a perturbed chain's invariants from a full
/// (possibly multi-row) perturbation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FullPerturbation<T> {
    pub a_sharp: GroupInverseMatrix<T>,
    pub pi: ProbabilityVector<T>,
}

/// Group inverse and stationary vector of `P + E` for a perturbation with
/// zero row sums, via a dense solve of `I - E A#`. Serves as the
/// cross-check oracle for the row-update path.
pub fn group_inverse_full_perturb<T: Scalar>(
    a_sharp: &GroupInverseMatrix<T>,
    pi: &ProbabilityVector<T>,
    perturbation: &Mat<T>,
) -> Result<FullPerturbation<T>> {
    let m = pi.len();
    if perturbation.n_rows() != m || perturbation.n_cols() != m {
        return Err(Error::DimensionMismatch {
            left_rows: perturbation.n_rows(),
            left_cols: perturbation.n_cols(),
            right_rows: m,
            right_cols: m,
        });
    }
    let scale = perturbation.max_abs().max(T::one());
    let row_tol = T::from_f64(8.0) * T::from_usize(m) * T::epsilon() * scale;
    for (i, sum) in perturbation.row_sums().into_iter().enumerate() {
        if sum.abs() > row_tol {
            return Err(Error::NonZeroRowSum {
                row: i,
                sum: sum.to_f64(),
            });
        }
    }

    let ea = perturbation.mul(a_sharp.matrix());
    let system = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - ea[(i, j)]
    });
    let resolvent = match LuDecomposition::factor(&system) {
        Ok(lu) => lu.inverse(),
        Err(Error::SingularSystem { pivot, threshold }) => {
            // nonsingularity is guaranteed in exact arithmetic; reaching
            // this means the inputs are not what they claim to be
            return Err(Error::NearSingularUpdate {
                denominator: pivot,
                threshold,
                step: 0,
            });
        }
        Err(e) => return Err(e),
    };

    let an = a_sharp.matrix().mul(&resolvent);
    let nan = resolvent.mul(&an);
    let pi_mat = Mat::outer(&ones_vec::<T>(m), pi.entries());
    let a_bar = an.sub(&pi_mat.mul(&nan));
    let pi_bar = resolvent.premul_vec(pi.entries());
    Ok(FullPerturbation {
        a_sharp: GroupInverseMatrix::new(a_bar),
        pi: ProbabilityVector::new(pi_bar)?,
    })
}
