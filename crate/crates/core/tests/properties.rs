//! Property tests for the module-level invariants: construction identities
//! of t,u-inverses, agreement of the three mean-first-passage-time forms,
//! equivalence of the two full-perturbation expressions, update-versus-
//! recompute agreement, and the ordering/symmetry laws of the error
//! statistics.

mod common;

use common::*;
use markov_perturb_core::algorithms::{run_sweep, AlgorithmId};
use markov_perturb_core::chain::{
    build_perturbation_row, replace_row, PerturbationRow, ProbabilityVector, StochasticMatrix,
};
use markov_perturb_core::ginverse::{
    extract_parameters, make_tu_inverse, mfpt_from_ginverse, to_group_inverse, GeneralizedInverse,
    GinverseSource, MfptForm,
};
use markov_perturb_core::gth::gth_stationary;
use markov_perturb_core::matrix::max_abs_vec;
use markov_perturb_core::metrics::{
    mfpt_pairwise, mfpt_residuals, pairwise_vector_errors, stationary_residuals,
};
use markov_perturb_core::perturb::{group_inverse_full_perturb, stationary_update_row, UpdateForm};
use markov_perturb_core::Mat;
use proptest::prelude::*;

fn ones(m: usize) -> Vec<f64> {
    vec![1.0; m]
}

fn small_chain_strategy() -> impl Strategy<Value = StochasticMatrix<f64>> {
    (2usize..=7)
        .prop_flat_map(|m| proptest::collection::vec(proptest::collection::vec(0.05f64..1.0, m), m))
        .prop_map(|raw| {
            let rows: Vec<Vec<f64>> = raw
                .into_iter()
                .map(|row| {
                    let total: f64 = row.iter().sum();
                    row.into_iter().map(|x| x / total).collect()
                })
                .collect();
            StochasticMatrix::from_rows(&rows).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validated_chains_have_unit_row_sums(p in small_chain_strategy()) {
        let tol = 4.0 * p.m() as f64 * f64::EPSILON;
        for sum in p.mat().row_sums() {
            prop_assert!((sum - 1.0).abs() <= tol);
        }
    }

    #[test]
    fn uniform_start_sweep_stays_irreducible(p in small_chain_strategy()) {
        let mut current = StochasticMatrix::<f64>::uniform(p.m());
        for i in 0..p.m() {
            let b = build_perturbation_row(&p, i).unwrap();
            current = replace_row(&current, &b).unwrap();
            prop_assert!(StochasticMatrix::validate(current.mat().clone()).is_ok());
        }
        prop_assert!(current.mat().sub(p.mat()).max_abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn tu_inverse_identities_hold(p in small_chain_strategy(), seed in 0u64..1000) {
        let m = p.m();
        let mut rng = seeded_rng(seed);
        let t: Vec<f64> = (0..m).map(|_| 0.2 + rng.random::<f64>()).collect();
        let u: Vec<f64> = (0..m).map(|_| 0.2 + rng.random::<f64>()).collect();
        let g = make_tu_inverse(&p, &t, &u).unwrap();
        let pi = gth_stationary(&p).unwrap();

        // G t = e / u^T e
        let gt = g.matrix().mul_vec(&t);
        let ue: f64 = u.iter().sum();
        for &x in &gt {
            prop_assert!((x - 1.0 / ue).abs() < 1e-10);
        }
        // u^T G = pi^T / pi^T t
        let ug = g.matrix().premul_vec(&u);
        let pit: f64 = pi.entries().iter().zip(&t).map(|(&a, &b)| a * b).sum();
        for (got, &want) in ug.iter().zip(pi.entries()) {
            prop_assert!((got - want / pit).abs() < 1e-10);
        }
        // one-condition residual
        prop_assert!(g.one_condition_residual(&p) < 1e-10);
    }

    #[test]
    fn row_constant_ginverses_have_unit_alpha(p in small_chain_strategy()) {
        // members of the Ge = ge class extract alpha = e
        let m = p.m();
        let pi = gth_stationary(&p).unwrap();
        let z = make_tu_inverse(&p, &ones(m), pi.entries()).unwrap();
        let g_first = make_tu_inverse(&p, &ones(m), &{
            let mut e0 = vec![0.0; m];
            e0[0] = 1.0;
            e0
        })
        .unwrap();
        for g in [&z, &g_first] {
            let params = extract_parameters(g, &p, &pi);
            for &a in &params.alpha {
                prop_assert!((a - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sherman_morrison_inverse_check(seed in 0u64..2000) {
        let mut rng = seeded_rng(seed);
        let m = 2 + (seed as usize % 5);
        // diagonally dominant base keeps the inverse tame
        let a = Mat::from_fn(m, m, |i, j| {
            if i == j { 3.0 + rng.random::<f64>() } else { rng.random::<f64>() - 0.5 }
        });
        let a_inv = markov_perturb_core::matrix::invert(&a).unwrap();
        let u: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
        if let Ok(updated_inv) = markov_perturb_core::perturb::sherman_morrison_apply(&a_inv, &u, &v) {
            let mut updated = a.clone();
            updated.add_rank_one(&u, &v, 1.0);
            let residual = updated.mul(&updated_inv).sub(&Mat::identity(m)).max_abs();
            prop_assert!(residual < 1e-10, "residual {residual:e}");
        }
    }

    #[test]
    fn error_statistics_are_ordered_and_symmetric(
        a in proptest::collection::vec(0.0f64..10.0, 2..20),
        b in proptest::collection::vec(0.0f64..10.0, 2..20),
    ) {
        let n = a.len().min(b.len());
        let (a, b) = (&a[..n], &b[..n]);
        let (min, max, sum) = pairwise_vector_errors(a, b).unwrap();
        prop_assert!(min <= max && max <= sum + 1e-15);
        prop_assert_eq!(pairwise_vector_errors(a, b).unwrap(), pairwise_vector_errors(b, a).unwrap());
    }

    #[test]
    fn residual_statistics_are_ordered(p in small_chain_strategy()) {
        let pi = gth_stationary(&p).unwrap();
        let (minre, maxre, rele) = stationary_residuals(pi.entries(), p.mat());
        prop_assert!(minre <= maxre && maxre <= rele + 1e-18);

        let out = run_sweep::<f64>(&p, AlgorithmId::Al4A).unwrap();
        let (minresm, maxresm, resm) = mfpt_residuals(out.mfpt.entries(), p.mat());
        prop_assert!(minresm <= maxresm && maxresm <= resm + 1e-18);
    }

    #[test]
    fn exact_uniform_ground_truth_gives_tiny_residuals(m in 2usize..10) {
        // uniform chain evaluated exactly: pi = e/m, M = m E
        let p = StochasticMatrix::<f64>::uniform(m);
        let pi: Vec<f64> = vec![1.0 / m as f64; m];
        let (_, maxre, _) = stationary_residuals(&pi, p.mat());
        prop_assert!(maxre <= 4.0 * f64::EPSILON);
        let mfpt = Mat::ones(m, m).scale(m as f64);
        let (_, maxresm, _) = mfpt_residuals(&mfpt, p.mat());
        prop_assert!(maxresm <= 4.0 * f64::EPSILON * m as f64);
    }
}

#[test]
fn mfpt_forms_agree_across_random_chains() {
    // the three identities agree entrywise for G drawn from
    // {Z, A#, [I - P + e e_1^T]^{-1}} on 100 random chains
    let bound = 10.0 * 1e-10;
    for trial in 0..100u64 {
        let m = 3 + (trial as usize % 6);
        let p = random_chain(trial.wrapping_add(40_000), m);
        let pi = gth_stationary(&p).unwrap();
        let mut e0 = vec![0.0; m];
        e0[0] = 1.0;

        let z = make_tu_inverse(&p, &ones(m), pi.entries()).unwrap();
        let a_sharp = to_group_inverse(&z, &pi);
        let g_a =
            GeneralizedInverse::from_matrix(a_sharp.matrix().clone(), GinverseSource::Transform);
        let g_e1 = make_tu_inverse(&p, &ones(m), &e0).unwrap();

        for g in [&z, &g_a, &g_e1] {
            let general = mfpt_from_ginverse(g, &pi, MfptForm::General).unwrap();
            let via_h = mfpt_from_ginverse(g, &pi, MfptForm::HTransform).unwrap();
            let simple = mfpt_from_ginverse(g, &pi, MfptForm::RowConstant).unwrap();
            let scale = general.entries().max_abs();
            assert!(mfpt_pairwise(general.entries(), via_h.entries()).unwrap().1 <= bound * scale);
            assert!(
                mfpt_pairwise(general.entries(), simple.entries())
                    .unwrap()
                    .1
                    <= bound * scale
            );
            // every produced M satisfies the first-step equations
            let (_, maxresm, _) = mfpt_residuals(general.entries(), p.mat());
            assert!(maxresm <= 1e-10 * scale);
        }
    }
}

#[test]
fn full_perturbation_expressions_are_equivalent() {
    // the resolvent form equals the expanded form with the extra
    // A# E A# (I - E A#)^{-1} term, for random rank-one perturbations
    for trial in 0..60u64 {
        let m = 3 + (trial as usize % 4);
        let p = random_chain(trial.wrapping_add(70_000), m);
        let pi = ProbabilityVector::new(pi_oracle(&p)).unwrap();
        let a_sharp = Mat::from_rows(&a_sharp_oracle(&p)).unwrap();

        let mut rng = seeded_rng(trial.wrapping_add(90_000));
        let row: usize = rng.random_range(0..m);
        let new_row = random_probability_row(&mut rng, m);
        let mut pert = Mat::zeros(m, m);
        for j in 0..m {
            pert[(row, j)] = new_row[j] - p.mat()[(row, j)];
        }

        let ea = pert.mul(&a_sharp);
        let system = Mat::from_fn(m, m, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            d - ea[(i, j)]
        });
        let resolvent = markov_perturb_core::matrix::invert(&system).unwrap();
        // A# (I - E A#)^{-1}  vs  A# + A# E A# (I - E A#)^{-1}
        let lhs = a_sharp.mul(&resolvent);
        let rhs = a_sharp.add(&a_sharp.mul(&ea).mul(&resolvent));
        assert!(lhs.sub(&rhs).max_abs() <= 1e-11 * lhs.max_abs().max(1.0));

        // and the library's full-perturbation output keeps zero row sums
        let full = group_inverse_full_perturb(
            &markov_perturb_core::ginverse::GroupInverseMatrix::new(a_sharp.clone()),
            &pi,
            &pert,
        )
        .unwrap();
        assert!(max_abs_vec(&full.a_sharp.matrix().row_sums()) <= 1e-11);
    }
}

#[test]
fn stationary_update_matches_recompute_on_hundred_pairs() {
    for trial in 0..100u64 {
        let m = 3 + (trial as usize % 6);
        let p = random_chain(trial.wrapping_add(20_000), m);
        let mut rng = seeded_rng(trial.wrapping_add(30_000));
        let row: usize = rng.random_range(0..m);
        let new_row = random_probability_row(&mut rng, m);
        let b_vec: Vec<f64> = new_row
            .iter()
            .zip(p.row(row))
            .map(|(&n, &o)| n - o)
            .collect();
        let b = PerturbationRow::new(row, b_vec).unwrap();

        let pi = ProbabilityVector::new(pi_oracle(&p)).unwrap();
        let a_sharp = Mat::from_rows(&a_sharp_oracle(&p)).unwrap();
        let updated = stationary_update_row(&pi, &a_sharp, &b, UpdateForm::GroupInverse).unwrap();

        let perturbed = replace_row(&p, &b).unwrap();
        let perturbed = StochasticMatrix::validate(perturbed.mat().clone()).unwrap();
        let direct = pi_oracle(&perturbed);
        for (got, want) in updated.entries().iter().zip(&direct) {
            let rel = (got - want).abs() / want.abs();
            assert!(rel <= 1e-10, "trial {trial}: rel {rel:e}");
        }
    }
}

#[test]
fn algorithms_agree_pairwise_across_random_chains() {
    for trial in 0..100u64 {
        let m = 3 + (trial as usize % 6);
        let p = random_chain(trial.wrapping_add(60_000), m);
        let outs: Vec<_> = AlgorithmId::ALL
            .iter()
            .map(|&id| run_sweep::<f64>(&p, id).unwrap())
            .collect();
        for a in &outs {
            for b in &outs {
                let pi_dev =
                    a.pi.entries()
                        .iter()
                        .zip(b.pi.entries())
                        .fold(0.0f64, |acc, (&x, &y)| acc.max((x - y).abs()));
                assert!(pi_dev <= 1e-12, "trial {trial}: pi dev {pi_dev:e}");
                let a_dev = a.a_sharp.matrix().sub(b.a_sharp.matrix()).max_abs();
                let m_dev = a.mfpt.entries().sub(b.mfpt.entries()).max_abs();
                assert!(a_dev <= 1e-10, "trial {trial}: a# dev {a_dev:e}");
                assert!(m_dev <= 1e-10, "trial {trial}: m dev {m_dev:e}");
            }
        }
    }
}

#[test]
fn cross_precision_statistics_have_reference_magnitudes() {
    // single-vs-benchmark and single-vs-double error statistics land in
    // the expected ranges on the 5-state test chain (exact values vary
    // with operation ordering; the magnitudes do not)
    let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
    let gth_d = gth_stationary(&p).unwrap();
    for id in AlgorithmId::ALL {
        let double =
            markov_perturb_core::run_algorithm(&p, id, markov_perturb_core::PrecisionMode::Double)
                .unwrap();
        let single =
            markov_perturb_core::run_algorithm(&p, id, markov_perturb_core::PrecisionMode::Single)
                .unwrap();

        let (_, maxe, _) = pairwise_vector_errors(gth_d.entries(), &single.pi).unwrap();
        assert!(maxe > 0.0 && maxe <= 1e-6, "{id}: MAXE(GTHD,S) {maxe:e}");

        let (_, maxem, rem) = mfpt_pairwise(&single.mfpt, &double.mfpt).unwrap();
        assert!(maxem <= 1e-3, "{id}: MAXEM(S,D) {maxem:e}");
        assert!(rem <= 1e-2, "{id}: REM(S,D) {rem:e}");

        let deltas = markov_perturb_core::metrics::parameter_deltas(
            &single.a_sharp,
            &p.to_precision::<f32>().unwrap().mat().to_f64(),
            gth_d.entries(),
        );
        assert!(deltas.max_alpha <= 1e-5, "{id}: MAXDELTA alpha(S) {:e}", deltas.max_alpha);
        assert!(deltas.delta_gamma <= 1e-5, "{id}: DELTA gamma(S) {:e}", deltas.delta_gamma);
    }
}

#[test]
fn gth_residuals_stay_at_machine_level() {
    for trial in 0..60u64 {
        let m = 2 + (trial as usize % 9); // up to 10 states
        let p = random_chain(trial.wrapping_add(10_000), m);
        let pi = gth_stationary(&p).unwrap();
        let (_, maxre, _) = stationary_residuals(pi.entries(), p.mat());
        assert!(maxre <= 1e-15 * m as f64, "m={m}: {maxre:e}");
    }
}

#[test]
fn single_precision_results_stay_consistent() {
    // max first-step residual within the single-precision budget, and the
    // diagonal consistent with the recurrence times
    let p = StochasticMatrix::from_rows(&kemeny_rows()).unwrap();
    for id in AlgorithmId::ALL {
        let result =
            markov_perturb_core::run_algorithm(&p, id, markov_perturb_core::PrecisionMode::Single)
                .unwrap();
        let p32: StochasticMatrix<f32> = p.to_precision().unwrap();
        let (_, maxresm, _) = mfpt_residuals(&result.mfpt, &p32.mat().to_f64());
        assert!(maxresm <= 1e-5, "{id}: {maxresm:e}");
        for (j, &pj) in result.pi.iter().enumerate() {
            assert!((result.mfpt[(j, j)] * pj - 1.0).abs() < 1e-5, "{id} at {j}");
        }
    }
}

#[test]
fn al3_projector_rows_stay_identical() {
    for trial in 0..20u64 {
        let m = 3 + (trial as usize % 6);
        let p = random_chain(trial.wrapping_add(80_000), m);
        let out = run_sweep::<f64>(&p, AlgorithmId::Al3).unwrap();
        for entry in &out.trace {
            assert!(entry.invariant_deviation <= 1e-12);
        }
    }
}
