//! Generalized-inverse algebra for `I - P`: construction of `t,u`-inverses,
//! the (alpha, beta, gamma) parametric classification, the H and K
//! transforms, and the extraction of the stationary vector, mean first
//! passage times, fundamental matrix and group inverse from any
//! one-condition g-inverse.

use crate::chain::{ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::matrix::LuDecomposition;
use crate::matrix::{basis_vec, dot, max_abs_vec, ones_vec, vec_sum, Mat};
use crate::precision::{near_singular_threshold, Scalar};

/// How a [`GeneralizedInverse`] came to be.
#[derive(Debug, Clone, PartialEq)]
pub enum GinverseSource<T> {
    /// `[I - P + t u^T]^{-1}` for the stored vectors.
    TuInverse { t: Vec<T>, u: Vec<T> },
    /// Derived from another g-inverse (H or K transform).
    Transform,
    /// Working matrix of a perturbation algorithm.
    AlgorithmOutput,
}

/// An `m x m` matrix asserted to be a one-condition g-inverse of `I - P`.
///
/// The one-condition property `(I-P) G (I-P) = I-P` is checked by the
/// verification operations, not at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedInverse<T> {
    matrix: Mat<T>,
    source: GinverseSource<T>,
    params: Option<ParameterTriple<T>>,
}

impl<T: Scalar> GeneralizedInverse<T> {
    pub fn from_matrix(matrix: Mat<T>, source: GinverseSource<T>) -> Self {
        GeneralizedInverse {
            matrix,
            source,
            params: None,
        }
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn source(&self) -> &GinverseSource<T> {
        &self.source
    }

    pub fn params(&self) -> Option<&ParameterTriple<T>> {
        self.params.as_ref()
    }

    pub fn with_params(mut self, params: ParameterTriple<T>) -> Self {
        self.params = Some(params);
        self
    }

    /// Max-norm residual of the defining condition `(I-P) G (I-P) = I-P`.
    pub fn one_condition_residual(&self, p: &StochasticMatrix<T>) -> T {
        let a = i_minus_p(p);
        a.mul(&self.matrix).mul(&a).sub(&a).max_abs()
    }
}

/// The `(alpha, beta, gamma)` parameters of the unique parametric form
/// `G = [I - P + alpha beta^T]^{-1} + gamma e pi^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTriple<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub gamma: T,
}

/// Mean first passage time matrix; `entries[(i, j)]` is the expected number
/// of steps to first reach `j` from `i`, with `m_jj = 1/pi_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MfptMatrix<T> {
    entries: Mat<T>,
}

impl<T: Scalar> MfptMatrix<T> {
    /// Checks the structural invariants: every entry at least one step, and
    /// the diagonal consistent with the recurrence times `1/pi_j`.
    pub fn new(entries: Mat<T>, pi: &ProbabilityVector<T>) -> Result<Self> {
        let m = entries.n_rows();
        if !entries.is_square() || m != pi.len() {
            return Err(Error::DimensionMismatch {
                left_rows: entries.n_rows(),
                left_cols: entries.n_cols(),
                right_rows: pi.len(),
                right_cols: pi.len(),
            });
        }
        let tol = T::verification_tolerance();
        let slack = tol * entries.max_abs().max(T::one());
        for i in 0..m {
            for j in 0..m {
                if entries[(i, j)] < T::one() - slack {
                    return Err(Error::InconsistentInput {
                        reason: format!(
                            "first passage time ({i}, {j}) = {} is below 1",
                            entries[(i, j)]
                        ),
                    });
                }
            }
        }
        for (j, &pj) in pi.entries().iter().enumerate() {
            let dev = (entries[(j, j)] * pj - T::one()).abs();
            if dev > tol * T::from_f64(10.0) {
                return Err(Error::InconsistentInput {
                    reason: format!("m_jj * pi_j deviates from 1 by {dev} at j = {j}"),
                });
            }
        }
        Ok(MfptMatrix { entries })
    }

    pub fn entries(&self) -> &Mat<T> {
        &self.entries
    }

    pub fn into_mat(self) -> Mat<T> {
        self.entries
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.entries.to_f64()
    }
}

/// The group inverse of `I - P` (or a candidate for it; see
/// [`verify_group_axioms`]).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupInverseMatrix<T> {
    matrix: Mat<T>,
}

impl<T: Scalar> GroupInverseMatrix<T> {
    pub fn new(matrix: Mat<T>) -> Self {
        GroupInverseMatrix { matrix }
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn into_mat(self) -> Mat<T> {
        self.matrix
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.matrix.to_f64()
    }
}

pub(crate) fn i_minus_p<T: Scalar>(p: &StochasticMatrix<T>) -> Mat<T> {
    let m = p.m();
    Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - p.mat()[(i, j)]
    })
}

/// The projector `I - e pi^T` used by the H and K transforms.
pub fn complement_projector<T: Scalar>(pi: &[T]) -> Mat<T> {
    let m = pi.len();
    Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - pi[j]
    })
}

/// `[I - P + t u^T]^{-1}`, a one-condition g-inverse of `I - P` whenever
/// `pi^T t != 0` and `u^T e != 0`; rank deficiency of the dense solve
/// signals that one of those conditions failed.
pub fn make_tu_inverse<T: Scalar>(
    p: &StochasticMatrix<T>,
    t: &[T],
    u: &[T],
) -> Result<GeneralizedInverse<T>> {
    let m = p.m();
    if t.len() != m || u.len() != m {
        return Err(Error::LengthMismatch {
            left: t.len().min(u.len()),
            right: m,
        });
    }
    let system = Mat::from_fn(m, m, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - p.mat()[(i, j)] + t[i] * u[j]
    });
    let g = LuDecomposition::factor(&system)?.inverse();
    Ok(GeneralizedInverse::from_matrix(
        g,
        GinverseSource::TuInverse {
            t: t.to_vec(),
            u: u.to_vec(),
        },
    ))
}

/// Read off the `(alpha, beta, gamma)` parameters of a g-inverse:
/// `alpha = (I - (I-P)G) e`, `beta^T = pi^T (I - G(I-P))`,
/// `gamma = beta^T G alpha - 1`.
pub fn extract_parameters<T: Scalar>(
    g: &GeneralizedInverse<T>,
    p: &StochasticMatrix<T>,
    pi: &ProbabilityVector<T>,
) -> ParameterTriple<T> {
    let m = p.m();
    let a = i_minus_p(p);
    let a_g = Mat::identity(m).sub(&a.mul(g.matrix()));
    let b_g = Mat::identity(m).sub(&g.matrix().mul(&a));
    let alpha = a_g.row_sums();
    let beta = b_g.premul_vec(pi.entries());
    let g_alpha = g.matrix().mul_vec(&alpha);
    let gamma = dot(&beta, &g_alpha) - T::one();
    ParameterTriple { alpha, beta, gamma }
}

/// The H transform `H = G (I - e pi^T)`: a (1,2,5a) g-inverse with `He = 0`.
pub fn to_h<T: Scalar>(
    g: &GeneralizedInverse<T>,
    pi: &ProbabilityVector<T>,
) -> GeneralizedInverse<T> {
    let h = g.matrix().mul(&complement_projector(pi.entries()));
    GeneralizedInverse::from_matrix(h, GinverseSource::Transform)
}

/// The K transform `K = (I - e pi^T) G (I - e pi^T)`, which is invariant
/// over the choice of G and equals the group inverse.
pub fn to_group_inverse<T: Scalar>(
    g: &GeneralizedInverse<T>,
    pi: &ProbabilityVector<T>,
) -> GroupInverseMatrix<T> {
    let j = complement_projector(pi.entries());
    GroupInverseMatrix::new(j.mul(&g.matrix().mul(&j)))
}

/// Stationary vector from a g-inverse via `pi^T = v^T A_G / v^T A_G e`.
///
/// With no `v` supplied, a g-inverse built as `[I - P + e u^T]^{-1}` uses
/// the direct specialization `pi^T = u^T G`; otherwise `e, e_0, e_1, ...`
/// are tried until the projection is non-degenerate (one always exists).
pub fn stationary_from_ginverse<T: Scalar>(
    g: &GeneralizedInverse<T>,
    p: &StochasticMatrix<T>,
    v: Option<&[T]>,
) -> Result<ProbabilityVector<T>> {
    let m = p.m();

    if v.is_none() {
        if let GinverseSource::TuInverse { t, u } = g.source() {
            if t.iter().all(|&x| x == T::one()) {
                let w = g.matrix().premul_vec(u);
                return normalize_projection(&w, m);
            }
        }
    }

    let a_g = Mat::identity(m).sub(&i_minus_p(p).mul(g.matrix()));
    match v {
        Some(v) => {
            if v.len() != m {
                return Err(Error::LengthMismatch {
                    left: v.len(),
                    right: m,
                });
            }
            let w = a_g.premul_vec(v);
            normalize_projection(&w, m)
        }
        None => {
            let ones = ones_vec::<T>(m);
            let mut candidates: Vec<Vec<T>> = vec![ones];
            candidates.extend((0..m).map(|i| basis_vec(i, m)));
            for v in &candidates {
                let w = a_g.premul_vec(v);
                if let Ok(pi) = normalize_projection(&w, m) {
                    return Ok(pi);
                }
            }
            Err(Error::DegenerateProjection { value: 0.0 })
        }
    }
}

fn normalize_projection<T: Scalar>(w: &[T], m: usize) -> Result<ProbabilityVector<T>> {
    let denom = vec_sum(w);
    let threshold = near_singular_threshold(T::from_usize(m) * max_abs_vec(w));
    if denom.abs() <= threshold {
        return Err(Error::DegenerateProjection {
            value: denom.to_f64(),
        });
    }
    ProbabilityVector::new(w.iter().map(|&x| x / denom).collect())
}

/// Which identity to use when assembling M from a g-inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfptForm {
    /// `M = [G Pi - E (G Pi)_d + I - G + E G_d] D`, valid for any g-inverse.
    General,
    /// `M = [I - H + E H_d] D` with `H = G (I - Pi)` formed internally.
    HTransform,
    /// `M = [I - G + E G_d] D`, valid only when `Ge = ge` for a scalar `g`.
    RowConstant,
}

/// Mean first passage times from a g-inverse, by the requested identity.
pub fn mfpt_from_ginverse<T: Scalar>(
    g: &GeneralizedInverse<T>,
    pi: &ProbabilityVector<T>,
    form: MfptForm,
) -> Result<MfptMatrix<T>> {
    let m = pi.len();
    let recip: Vec<T> = pi.entries().iter().map(|&x| T::one() / x).collect();
    let gm = g.matrix();

    let entries = match form {
        MfptForm::General => {
            let pi_mat = Mat::outer(&ones_vec::<T>(m), pi.entries());
            let gp = gm.mul(&pi_mat);
            Mat::from_fn(m, m, |i, j| {
                let d = if i == j { T::one() } else { T::zero() };
                (gp[(i, j)] - gp[(j, j)] + d - gm[(i, j)] + gm[(j, j)]) * recip[j]
            })
        }
        MfptForm::HTransform => {
            let h = gm.mul(&complement_projector(pi.entries()));
            Mat::from_fn(m, m, |i, j| {
                let d = if i == j { T::one() } else { T::zero() };
                (d - h[(i, j)] + h[(j, j)]) * recip[j]
            })
        }
        MfptForm::RowConstant => {
            let sums = gm.row_sums();
            let mean = vec_sum(&sums) / T::from_usize(m);
            let deviation = sums
                .iter()
                .fold(T::zero(), |acc, &s| acc.max((s - mean).abs()));
            let tolerance =
                T::from_f64(1e3) * T::epsilon() * T::from_usize(m) * gm.max_abs().max(T::one());
            if deviation > tolerance {
                return Err(Error::NotRowConstant {
                    deviation: deviation.to_f64(),
                    tolerance: tolerance.to_f64(),
                });
            }
            Mat::from_fn(m, m, |i, j| {
                let d = if i == j { T::one() } else { T::zero() };
                (d - gm[(i, j)] + gm[(j, j)]) * recip[j]
            })
        }
    };
    MfptMatrix::new(entries, pi)
}

/// Recover the group inverse from mean first passage times:
/// with `tau_j = sum_k pi_k m_kj`, the diagonal is `pi_j (tau_j - 1)` and
/// the off-diagonal entries follow as `a_jj - pi_j m_ij`.
pub fn group_inverse_from_mfpt<T: Scalar>(
    mfpt: &MfptMatrix<T>,
    pi: &ProbabilityVector<T>,
) -> Result<GroupInverseMatrix<T>> {
    let m = pi.len();
    let entries = mfpt.entries();
    let tol = T::verification_tolerance() * T::from_f64(10.0);
    for (j, &pj) in pi.entries().iter().enumerate() {
        let dev = (entries[(j, j)] * pj - T::one()).abs();
        if dev > tol {
            return Err(Error::InconsistentInput {
                reason: format!("m_jj * pi_j deviates from 1 by {dev} at j = {j}"),
            });
        }
    }
    let tau: Vec<T> = (0..m).map(|j| dot(pi.entries(), &entries.col(j))).collect();
    let a_sharp = Mat::from_fn(m, m, |i, j| {
        let diag = pi.entries()[j] * (tau[j] - T::one());
        if i == j {
            diag
        } else {
            diag - pi.entries()[j] * entries[(i, j)]
        }
    });
    Ok(GroupInverseMatrix::new(a_sharp))
}

/// Kemeny and Snell's fundamental matrix `Z = A# + e pi^T`.
pub fn fundamental_matrix<T: Scalar>(
    a_sharp: &GroupInverseMatrix<T>,
    pi: &ProbabilityVector<T>,
) -> Mat<T> {
    let m = pi.len();
    Mat::from_fn(m, m, |i, j| a_sharp.matrix()[(i, j)] + pi.entries()[j])
}

/// Max-norm residuals of the identities that uniquely determine the group
/// inverse, plus the defining g-inverse conditions 1, 2 and 5.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAxiomReport<T> {
    /// `(I-P) A# - (I - e pi^T)`
    pub forward_identity: T,
    /// `A# (I-P) - (I - e pi^T)`
    pub backward_identity: T,
    /// `A# e`
    pub annihilates_ones: T,
    /// `pi^T A#`
    pub annihilated_by_pi: T,
    /// `A X A - A` with `A = I-P`, `X = A#`
    pub condition1: T,
    /// `X A X - X`
    pub condition2: T,
    /// `A X - X A`
    pub condition5: T,
    /// `max(1, ||A#||_max)`, the scale the tolerance is relative to
    pub scale: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Scalar> GroupAxiomReport<T> {
    pub fn max_residual(&self) -> T {
        [
            self.forward_identity,
            self.backward_identity,
            self.annihilates_ones,
            self.annihilated_by_pi,
            self.condition1,
            self.condition2,
            self.condition5,
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

/// Check a candidate group inverse against every axiom at the given
/// tolerance (relative to the candidate's magnitude).
pub fn verify_group_axioms<T: Scalar>(
    a_sharp: &GroupInverseMatrix<T>,
    p: &StochasticMatrix<T>,
    pi: &ProbabilityVector<T>,
    tolerance: T,
) -> GroupAxiomReport<T> {
    let a = i_minus_p(p);
    let x = a_sharp.matrix();
    let projector = complement_projector(pi.entries());
    let ax = a.mul(x);
    let xa = x.mul(&a);

    let forward_identity = ax.sub(&projector).max_abs();
    let backward_identity = xa.sub(&projector).max_abs();
    let annihilates_ones = max_abs_vec(&x.row_sums());
    let annihilated_by_pi = max_abs_vec(&x.premul_vec(pi.entries()));
    let condition1 = ax.mul(&a).sub(&a).max_abs();
    let condition2 = x.mul(&ax).sub(x).max_abs();
    let condition5 = ax.sub(&xa).max_abs();

    let scale = x.max_abs().max(T::one());
    let mut report = GroupAxiomReport {
        forward_identity,
        backward_identity,
        annihilates_ones,
        annihilated_by_pi,
        condition1,
        condition2,
        condition5,
        scale,
        tolerance,
        pass: false,
    };
    report.pass = report.max_residual() <= tolerance * scale;
    report
}
