//! Validated transition matrices and the row-replacement construction
//! `P_i = P_{i-1} + e_i b_i^T` that every perturbation algorithm builds on.

use crate::error::{Error, Result};
use crate::matrix::{vec_sum, Mat};
use crate::precision::Scalar;

/// Tolerance for a probability row: `4 m ulp(1)`, loose enough for decimal
/// inputs that are not exactly representable in binary.
pub fn row_sum_tolerance<T: Scalar>(m: usize) -> T {
    T::from_f64(4.0) * T::from_usize(m) * T::epsilon()
}

/// A validated row-stochastic, irreducible transition matrix.
///
/// Invariants held by every value of this type: entries are nonnegative,
/// each row sums to 1 within [`row_sum_tolerance`], and the directed graph
/// of positive entries is strongly connected.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<T> {
    mat: Mat<T>,
}

impl<T: Scalar> StochasticMatrix<T> {
    /// Validate a raw dense matrix as a transition matrix.
    pub fn validate(mat: Mat<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.n_rows(),
                cols: mat.n_cols(),
            });
        }
        let m = mat.n_rows();
        if m < 2 {
            return Err(Error::TooSmall { m });
        }
        for i in 0..m {
            for j in 0..m {
                if mat[(i, j)] < T::zero() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: mat[(i, j)].to_f64(),
                    });
                }
            }
        }
        let tol = row_sum_tolerance::<T>(m);
        for (i, sum) in mat.row_sums().into_iter().enumerate() {
            if (sum - T::one()).abs() > tol {
                return Err(Error::RowSumOff {
                    row: i,
                    sum: sum.to_f64(),
                    tolerance: tol.to_f64(),
                });
            }
        }
        check_irreducible(&mat)?;
        Ok(StochasticMatrix { mat })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::validate(Mat::from_rows(rows)?)
    }

    /// The uniform chain `P_0 = e e^T / m`, the starting point of every
    /// perturbation sweep.
    pub fn uniform(m: usize) -> Self {
        let u = T::one() / T::from_usize(m);
        StochasticMatrix {
            mat: Mat::from_fn(m, m, |_, _| u),
        }
    }

    /// Construct without re-validating. Used where stochasticity is
    /// guaranteed by construction (row replacement along a uniform-start
    /// sweep keeps rows `i+1..m` strictly positive).
    pub(crate) fn new_unchecked(mat: Mat<T>) -> Self {
        StochasticMatrix { mat }
    }

    pub fn m(&self) -> usize {
        self.mat.n_rows()
    }

    pub fn mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.mat.row(i)
    }

    pub fn into_mat(self) -> Mat<T> {
        self.mat
    }

    /// Re-round the matrix into another precision and re-validate there.
    /// Rounding the input to binary32 first is what running the whole
    /// pipeline "in single precision" means.
    pub fn to_precision<U: Scalar>(&self) -> Result<StochasticMatrix<U>> {
        StochasticMatrix::validate(self.mat.convert())
    }
}

/// Strong connectivity of the positive-entry graph, via forward and
/// reverse reachability from state 0. Exact: no numerics involved.
fn check_irreducible<T: Scalar>(mat: &Mat<T>) -> Result<()> {
    let m = mat.n_rows();
    let reach = |reverse: bool| -> Vec<bool> {
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                let edge = if reverse { mat[(j, i)] } else { mat[(i, j)] };
                if edge > T::zero() && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    for reverse in [false, true] {
        let seen = reach(reverse);
        if seen.iter().any(|&s| !s) {
            let unreachable = (0..m).filter(|&i| !seen[i]).collect();
            return Err(Error::Reducible {
                unreachable,
                witness: 0,
            });
        }
    }
    Ok(())
}

/// A probability vector: nonnegative entries summing to 1 within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> ProbabilityVector<T> {
    /// The construction tolerance is wider than a single row's
    /// ([`row_sum_tolerance`] x4) to absorb drift across a full sweep of
    /// rank-one updates.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        let m = entries.len();
        let tol = T::from_f64(16.0) * T::from_usize(m) * T::epsilon();
        if let Some((i, &v)) = entries
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -tol || !v.is_finite())
        {
            return Err(Error::InconsistentInput {
                reason: format!("probability vector entry {i} is {v}"),
            });
        }
        let sum = vec_sum(&entries);
        if (sum - T::one()).abs() > tol {
            return Err(Error::InconsistentInput {
                reason: format!("probability vector sums to {sum}, not 1"),
            });
        }
        Ok(ProbabilityVector { entries })
    }

    pub fn uniform(m: usize) -> Self {
        ProbabilityVector {
            entries: vec![T::one() / T::from_usize(m); m],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&x| x.to_f64()).collect()
    }
}

/// A single-row perturbation `b_i^T` with `b_i^T e = 0`: the difference
/// between a prescribed row and the row it replaces.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRow<T> {
    index: usize,
    b: Vec<T>,
}

impl<T: Scalar> PerturbationRow<T> {
    pub fn new(index: usize, b: Vec<T>) -> Result<Self> {
        let m = b.len();
        if index >= m {
            return Err(Error::InconsistentInput {
                reason: format!("row index {index} out of range for m = {m}"),
            });
        }
        let sum = vec_sum(&b);
        let scale = crate::matrix::max_abs_vec(&b).max(T::one());
        let tol = T::from_f64(8.0) * T::from_usize(m) * T::epsilon() * scale;
        if sum.abs() > tol {
            return Err(Error::NonZeroRowSum {
                row: index,
                sum: sum.to_f64(),
            });
        }
        Ok(PerturbationRow { index, b })
    }

    /// Zero-based index of the row being replaced.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }
}

/// `b_i^T = p_i^T - e^T/m`: the perturbation that swaps row `i` of the
/// uniform chain for row `i` of `p`.
pub fn build_perturbation_row<T: Scalar>(
    p: &StochasticMatrix<T>,
    index: usize,
) -> Result<PerturbationRow<T>> {
    let m = p.m();
    if index >= m {
        return Err(Error::InconsistentInput {
            reason: format!("row index {index} out of range for m = {m}"),
        });
    }
    let u = T::one() / T::from_usize(m);
    let b = p.row(index).iter().map(|&x| x - u).collect();
    PerturbationRow::new(index, b)
}

/// `P_i = P_{i-1} + e_i b_i^T`: replace one row, keeping everything else.
///
/// The result's replaced row is checked for nonnegativity and unit sum;
/// irreducibility is not re-verified (along a uniform-start sweep the
/// trailing uniform rows keep the chain irreducible).
pub fn replace_row<T: Scalar>(
    p_prev: &StochasticMatrix<T>,
    r: &PerturbationRow<T>,
) -> Result<StochasticMatrix<T>> {
    let m = p_prev.m();
    if r.b().len() != m {
        return Err(Error::LengthMismatch {
            left: r.b().len(),
            right: m,
        });
    }
    let i = r.index();
    let new_row: Vec<T> = p_prev
        .row(i)
        .iter()
        .zip(r.b())
        .map(|(&p, &b)| p + b)
        .collect();
    for (j, &v) in new_row.iter().enumerate() {
        if v < T::zero() {
            return Err(Error::ResultNotStochastic {
                reason: format!("entry ({i}, {j}) becomes {v}"),
            });
        }
    }
    let sum = vec_sum(&new_row);
    let tol = row_sum_tolerance::<T>(m);
    if (sum - T::one()).abs() > tol {
        return Err(Error::ResultNotStochastic {
            reason: format!("row {i} sums to {sum}"),
        });
    }
    let mut mat = p_prev.mat().clone();
    mat.row_mut(i).copy_from_slice(&new_row);
    Ok(StochasticMatrix::new_unchecked(mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_abs_vec;

    pub(crate) fn kemeny_rows() -> Vec<Vec<f64>> {
        vec![
            vec![0.831, 0.033, 0.013, 0.028, 0.095],
            vec![0.046, 0.788, 0.016, 0.038, 0.112],
            vec![0.038, 0.034, 0.785, 0.036, 0.107],
            vec![0.054, 0.045, 0.017, 0.728, 0.156],
            vec![0.082, 0.065, 0.023, 0.071, 0.759],
        ]
    }

    #[test]
    fn accepts_test_matrix() {
        let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        assert_eq!(p.m(), 5);
    }

    #[test]
    fn accepts_uniform_chain() {
        let third = 1.0 / 3.0;
        let p = StochasticMatrix::from_rows(&vec![vec![third; 3]; 3]).unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.mat(), StochasticMatrix::<f64>::uniform(3).mat());
    }

    #[test]
    fn rejects_identity_as_reducible() {
        let r = StochasticMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        match r {
            Err(Error::Reducible { unreachable, .. }) => assert_eq!(unreachable, vec![1]),
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn rejects_one_way_chain() {
        // state 1 reaches state 0 but not vice versa
        let r = StochasticMatrix::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.5]]);
        assert!(matches!(r, Err(Error::Reducible { .. })));
    }

    #[test]
    fn rejects_negative_entry() {
        let r = StochasticMatrix::from_rows(&[vec![1.1, -0.1], vec![0.5, 0.5]]);
        assert!(matches!(
            r,
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_row_sum() {
        let r = StochasticMatrix::from_rows(&[vec![0.5, 0.4], vec![0.5, 0.5]]);
        assert!(matches!(r, Err(Error::RowSumOff { row: 0, .. })));
    }

    #[test]
    fn rejects_non_square_and_tiny() {
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![0.5, 0.5]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![1.0]]),
            Err(Error::TooSmall { m: 1 })
        ));
    }

    #[test]
    fn row_sum_tolerance_accepts_decimal_rounding() {
        // rows of inexactly representable decimals still verify
        let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        for sum in p.mat().row_sums() {
            assert!((sum - 1.0).abs() <= row_sum_tolerance::<f64>(5));
        }
    }

    #[test]
    fn perturbation_of_uniform_row_is_zero() {
        let p = StochasticMatrix::<f64>::uniform(5);
        let r = build_perturbation_row(&p, 2).unwrap();
        assert!(max_abs_vec(r.b()) <= 8.0 * 5.0 * f64::EPSILON);
    }

    #[test]
    fn perturbation_row_matches_direct_subtraction() {
        let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        let r = build_perturbation_row(&p, 0).unwrap();
        let expect = [0.631, -0.167, -0.187, -0.172, -0.105];
        for (got, want) in r.b().iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }

        let two = StochasticMatrix::<f64>::from_rows(&[vec![0.7, 0.3], vec![0.6, 0.4]]).unwrap();
        let r = build_perturbation_row(&two, 1).unwrap();
        assert!((r.b()[0] - 0.1).abs() < 1e-15);
        assert!((r.b()[1] + 0.1).abs() < 1e-15);
    }

    #[test]
    fn perturbation_row_rejects_nonzero_sum() {
        assert!(matches!(
            PerturbationRow::new(0, vec![0.2, 0.1]),
            Err(Error::NonZeroRowSum { .. })
        ));
        assert!(PerturbationRow::new(1, vec![0.2, -0.2]).is_ok());
    }

    #[test]
    fn replace_row_swaps_exactly_one_row() {
        let p0 = StochasticMatrix::<f64>::uniform(5);
        let target = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        let r = build_perturbation_row(&target, 0).unwrap();
        let p1 = replace_row(&p0, &r).unwrap();
        // replaced row reproduces the target row up to one rounding of the
        // b = p - e/m subtraction
        for (got, want) in p1.row(0).iter().zip(target.row(0)) {
            assert!((got - want).abs() <= 2.0 * f64::EPSILON);
        }
        for i in 1..5 {
            assert_eq!(p1.row(i), p0.row(i));
        }
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        let r = PerturbationRow::new(3, vec![0.0; 5]).unwrap();
        let q = replace_row(&p, &r).unwrap();
        assert_eq!(q.mat(), p.mat());
    }

    #[test]
    fn replace_row_rejects_negative_result() {
        let p = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = PerturbationRow::new(0, vec![-0.6, 0.6]).unwrap();
        assert!(matches!(
            replace_row(&p, &r),
            Err(Error::ResultNotStochastic { .. })
        ));
    }

    #[test]
    fn sweep_telescopes_to_target_within_rounding() {
        // P_0 -> P_m by replacing one row at a time; each intermediate stays
        // irreducible and the end state matches the target to ~1 ulp per
        // entry (the b = p - e/m subtraction rounds once, so bit-exact
        // reproduction is not attainable in same-precision arithmetic).
        let target = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        let mut p = StochasticMatrix::<f64>::uniform(5);
        for i in 0..5 {
            let r = build_perturbation_row(&target, i).unwrap();
            p = replace_row(&p, &r).unwrap();
            assert!(StochasticMatrix::validate(p.mat().clone()).is_ok());
        }
        let dev = p.mat().sub(target.mat()).max_abs();
        assert!(dev <= 2.0 * f64::EPSILON, "dev = {dev:e}");
    }

    #[test]
    fn single_precision_rounds_then_validates() {
        let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
        let p32: StochasticMatrix<f32> = p.to_precision().unwrap();
        assert_eq!(p32.mat()[(0, 0)], 0.831f64 as f32);
    }
}
