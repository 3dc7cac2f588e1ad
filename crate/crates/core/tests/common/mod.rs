//! Shared test support: the five-state reference chain with its published
//! results, seeded random chain generation, and direct-solve oracles that
//! are deliberately independent of the library's own linear algebra (they
//! use a local Gauss-Jordan elimination over `Vec<Vec<f64>>`).

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use markov_perturb_core::{Mat, StochasticMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn kemeny_rows() -> Vec<Vec<f64>> {
    vec![
        vec![0.831, 0.033, 0.013, 0.028, 0.095],
        vec![0.046, 0.788, 0.016, 0.038, 0.112],
        vec![0.038, 0.034, 0.785, 0.036, 0.107],
        vec![0.054, 0.045, 0.017, 0.728, 0.156],
        vec![0.082, 0.065, 0.023, 0.071, 0.759],
    ]
}

pub fn kemeny() -> StochasticMatrix<f64> {
    StochasticMatrix::from_rows(&kemeny_rows()).unwrap()
}

pub fn published_pi() -> [f64; 5] {
    [
        0.270457577293538,
        0.184235456501417,
        0.076135265451860,
        0.147597142335324,
        0.321574558417861,
    ]
}

pub fn published_mfpt() -> Mat<f64> {
    Mat::from_rows(&[
        vec![
            3.697437542727,
            22.374164571709,
            57.756742192108,
            23.278850538432,
            9.598732858601,
        ],
        vec![
            17.032615490720,
            5.427836850679,
            56.864516889123,
            22.100075015307,
            8.844407674651,
        ],
        vec![
            17.667201055109,
            22.106202543394,
            13.134517809389,
            22.292628444747,
            9.020416501550,
        ],
        vec![
            16.341175493452,
            21.005100548563,
            56.552837505099,
            6.775198924435,
            7.609106618566,
        ],
        vec![
            15.243523199997,
            20.060109096789,
            55.798746557709,
            20.158095744297,
            3.109698742711,
        ],
    ])
    .unwrap()
}

pub fn published_a_sharp() -> Mat<f64> {
    Mat::from_rows(&[
        vec![
            3.1905741863522,
            -0.9375239582265,
            -0.4087732024356,
            -0.6983862380226,
            -1.1458907876676,
        ],
        vec![
            -1.4160257342402,
            3.1845904654802,
            -0.3408433921500,
            -0.5244023393545,
            -0.9033189997355,
        ],
        vec![
            -1.5876542085704,
            -0.8881558516147,
            3.9885516959952,
            -0.5528226752867,
            -0.9599189605234,
        ],
        vec![
            -1.2290205477352,
            -0.6852938229425,
            -0.3171135995114,
            2.7375055783011,
            -0.5060776081121,
        ],
        vec![
            -0.9321521677369,
            -0.5111928914350,
            -0.2597006850570,
            -0.2377717484790,
            1.9408174927079,
        ],
    ])
    .unwrap()
}

/// Random strictly positive row-stochastic matrix; strict positivity makes
/// irreducibility automatic and keeps the chains well conditioned.
pub fn random_chain(seed: u64, m: usize) -> StochasticMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        })
        .collect();
    StochasticMatrix::from_rows(&rows).unwrap()
}

/// Random strictly positive probability row of length `m`.
pub fn random_probability_row(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The acceptance ensemble: 100 chains with sizes cycling through 3..=8.
pub fn ensemble() -> Vec<StochasticMatrix<f64>> {
    (0..100u64)
        .map(|s| random_chain(s, 3 + (s as usize % 6)))
        .collect()
}

// ---------------------------------------------------------------------
// Independent dense linear algebra (oracle side)
// ---------------------------------------------------------------------

/// Gauss-Jordan solve with partial pivoting over plain nested vectors.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| aug[i][k].abs().partial_cmp(&aug[j][k].abs()).unwrap())
            .unwrap();
        aug.swap(k, pivot_row);
        let pivot = aug[k][k];
        assert!(pivot.abs() > 1e-13, "oracle system is singular");
        for j in k..=n {
            aug[k][j] /= pivot;
        }
        for i in 0..n {
            if i != k && aug[i][k] != 0.0 {
                let factor = aug[i][k];
                for j in k..=n {
                    aug[i][j] -= factor * aug[k][j];
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n]).collect()
}

pub fn gauss_invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(gauss_solve(a, &e));
    }
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Stationary vector by solving the stationary equations directly:
/// columns of `I - P` transposed, with the last equation replaced by the
/// normalization `sum pi_i = 1`.
pub fn pi_oracle(p: &StochasticMatrix<f64>) -> Vec<f64> {
    let m = p.m();
    let mut sys: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    d - p.mat()[(i, j)]
                })
                .collect()
        })
        .collect();
    sys[m - 1] = vec![1.0; m];
    let mut rhs = vec![0.0; m];
    rhs[m - 1] = 1.0;
    gauss_solve(&sys, &rhs)
}

/// Group inverse by the projected-resolvent construction
/// `(I - Pi) [I - P + Pi]^{-1} (I - Pi)` with `pi` solved directly.
pub fn a_sharp_oracle(p: &StochasticMatrix<f64>) -> Vec<Vec<f64>> {
    let m = p.m();
    let pi = pi_oracle(p);
    let sys: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    d - p.mat()[(i, j)] + pi[j]
                })
                .collect()
        })
        .collect();
    let z = gauss_invert(&sys);
    let proj: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    d - pi[j]
                })
                .collect()
        })
        .collect();
    matmul(&proj, &matmul(&z, &proj))
}

/// Mean first passage times by solving the first-step equations per
/// destination column: `(I - P with column j zeroed) m_col = e`.
pub fn mfpt_oracle(p: &StochasticMatrix<f64>) -> Vec<Vec<f64>> {
    let m = p.m();
    let mut out = vec![vec![0.0; m]; m];
    for j in 0..m {
        let sys: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        let d = if i == k { 1.0 } else { 0.0 };
                        let pk = if k == j { 0.0 } else { p.mat()[(i, k)] };
                        d - pk
                    })
                    .collect()
            })
            .collect();
        let col = gauss_solve(&sys, &vec![1.0; m]);
        for i in 0..m {
            out[i][j] = col[i];
        }
    }
    out
}

/// Entrywise error relative to the reference entry, floored at unit scale
/// so near-zero reference entries are compared absolutely.
pub fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

pub fn max_relative_error_mat(got: &Mat<f64>, want: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..got.n_rows() {
        for j in 0..got.n_cols() {
            worst = worst.max(relative_error(got[(i, j)], want[i][j]));
        }
    }
    worst
}

pub fn max_relative_error_vec(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .fold(0.0f64, |acc, (&g, &w)| acc.max(relative_error(g, w)))
}
