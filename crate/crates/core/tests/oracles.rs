//! Implementation-independent reference computations checked against the
//! library routines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sharesignal_core::dataset::{describe_values, Column, RegressionSample};
use sharesignal_core::econometrics::{acf, fit_arx, pacf, ModelSpec};
use sharesignal_core::special::{student_t_cdf, two_sided_p_value};
use sharesignal_core::synth::roots_stable;
use sharesignal_core::NaiveDate;

fn dated(y: Vec<f64>, cols: Vec<Column>) -> RegressionSample {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let dates = (0..y.len())
        .map(|i| start + chrono::Duration::days(i as i64))
        .collect();
    let observed = vec![false; y.len()];
    RegressionSample::new("y", dates, y, cols, observed).unwrap()
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

const HAND_Y: [f64; 12] = [
    0.012, -0.004, 0.007, -0.011, 0.003, 0.009, -0.006, 0.001, 0.014, -0.008, 0.002, -0.005,
];
const HAND_X: [f64; 12] = [
    0.0, 0.0, 0.001, 0.0, 0.003, 0.0, 0.002, 0.004, 0.0, 0.001, 0.006, 0.002,
];

#[test]
fn hand_dataset_matches_cramer_normal_equations() {
    // Normal equations X'X b = X'y for [1, y_{t-1}, x_t] solved by Cramer's rule.
    let rows: Vec<[f64; 3]> = (1..12).map(|t| [1.0, HAND_Y[t - 1], HAND_X[t]]).collect();
    let resp: Vec<f64> = HAND_Y[1..].to_vec();
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for (r, yv) in rows.iter().zip(&resp) {
        for i in 0..3 {
            xty[i] += r[i] * yv;
            for j in 0..3 {
                xtx[i][j] += r[i] * r[j];
            }
        }
    }
    let d = det3(xtx);
    let oracle: Vec<f64> = (0..3)
        .map(|c| {
            let mut m = xtx;
            for r in 0..3 {
                m[r][c] = xty[r];
            }
            det3(m) / d
        })
        .collect();

    let sample = dated(HAND_Y.to_vec(), vec![Column::new("share", HAND_X.to_vec())]);
    let fit = fit_arx(&sample, &ModelSpec::arx(&[1], &["share"]).unwrap()).unwrap();
    assert_eq!(fit.nobs, 11);
    for (got, want) in fit.coefficients.iter().zip(&oracle) {
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    // Frozen from an independent numerical-library solve of the same system.
    let frozen_b = [0.006029035836589, -0.8874981912892493, -2.497733082525444];
    let frozen_se = [0.00316882002533722, 0.3032464490876682, 1.287416345182417];
    let frozen_p = [0.0935905463542804, 0.01909563703341707, 0.08833089645698096];
    for i in 0..3 {
        assert!(((fit.coefficients[i] - frozen_b[i]) / frozen_b[i]).abs() < 1e-10);
        assert!(((fit.std_errors[i] - frozen_se[i]) / frozen_se[i]).abs() < 1e-10);
        assert!((fit.p_values[i] - frozen_p[i]).abs() < 1e-9);
    }
    assert!(((fit.rss - 0.0002905255148796604) / 0.0002905255148796604).abs() < 1e-10);
}

/// Sample autocovariances computed directly from the definition.
fn oracle_autocov(x: &[f64], maxlag: usize) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (0..=maxlag)
        .map(|k| {
            let mut s = 0.0;
            for t in k..x.len() {
                s += (x[t] - mean) * (x[t - k] - mean);
            }
            s / n
        })
        .collect()
}

/// Last coefficient of the order-k lag regression, solved from its normal
/// equations with the sample autocovariance (Toeplitz) moment matrix.
fn oracle_pacf(x: &[f64], maxlag: usize) -> Vec<f64> {
    let g = oracle_autocov(x, maxlag);
    (1..=maxlag)
        .map(|k| {
            let a: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| g[i.abs_diff(j)]).collect())
                .collect();
            let b: Vec<f64> = (1..=k).map(|j| g[j]).collect();
            *solve_dense(a, b).last().unwrap()
        })
        .collect()
}

#[test]
fn pacf_matches_sequential_regression_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..5 {
        let phi: f64 = rng.random_range(-0.6..0.6);
        let mut x = vec![0.0f64; 300];
        for t in 1..x.len() {
            let z: f64 = rng.sample(StandardNormal);
            x[t] = phi * x[t - 1] + z;
        }
        let got = pacf(&x, 12).unwrap();
        let want = oracle_pacf(&x, 12);
        for (g, w) in got.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-8);
            assert!(g.abs() <= 1.0 + 1e-10);
        }
        let r = acf(&x, 12).unwrap();
        assert_eq!(got.values[0], r[0]);
        let g = oracle_autocov(&x, 12);
        for k in 0..12 {
            assert!((r[k] - g[k + 1] / g[0]).abs() < 1e-12);
        }
    }
}

fn t_pdf(x: f64, df: f64) -> f64 {
    let ln_c = libm::lgamma((df + 1.0) / 2.0)
        - libm::lgamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp()
}

/// 0.5 + integral of the density from 0 to t, by composite Simpson.
fn oracle_t_cdf(t: f64, df: f64) -> f64 {
    let steps = 20_000;
    let h = t / steps as f64;
    let mut s = t_pdf(0.0, df) + t_pdf(t, df);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * t_pdf(i as f64 * h, df);
    }
    0.5 + s * h / 3.0
}

#[test]
fn student_t_cdf_matches_quadrature() {
    for df in [5.0, 30.0, 2500.0] {
        for i in -16..=16 {
            let t = i as f64 * 0.25;
            let got = student_t_cdf(t, df);
            let want = oracle_t_cdf(t, df);
            assert!((got - want).abs() < 1e-6, "df={df} t={t}: {got} vs {want}");
            let p = two_sided_p_value(t, df);
            assert!((p - 2.0 * (1.0 - oracle_t_cdf(t.abs(), df))).abs() < 1e-6);
        }
    }
}

#[test]
fn describe_matches_two_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let v: Vec<f64> = (0..100)
        .map(|_| 3.0 + 0.01 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mean = v.iter().sum::<f64>() / 100.0;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 99.0;
    let s = describe_values("v", &v).unwrap();
    assert!(((s.mean - mean) / mean).abs() < 1e-12);
    assert!(((s.std_dev - var.sqrt()) / var.sqrt()).abs() < 1e-12);
    assert!(s.min <= s.mean && s.mean <= s.max);
}

/// Schur-Cohn step-down: stable iff every reflection coefficient is inside
/// the unit interval.
fn oracle_stable(lags: &[(usize, f64)]) -> bool {
    let p = lags.iter().map(|l| l.0).max().unwrap_or(0);
    let mut a = vec![0.0; p + 1];
    for &(l, c) in lags {
        a[l] = c;
    }
    for m in (1..=p).rev() {
        let k = a[m];
        if k.abs() >= 1.0 {
            return false;
        }
        let prev = a.clone();
        for j in 1..m {
            a[j] = (prev[j] + k * prev[m - j]) / (1.0 - k * k);
        }
        a[m] = 0.0;
    }
    true
}

#[test]
fn stability_matches_step_down_oracle() {
    assert!(oracle_stable(&[(1, -0.148), (7, 0.121)]));
    assert!(!oracle_stable(&[(1, 1.0)]));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut disagreements = 0;
    let mut stable_count = 0;
    for _ in 0..500 {
        let p = rng.random_range(1..=8usize);
        let mut lags = Vec::new();
        for l in 1..=p {
            if rng.random_bool(0.6) {
                lags.push((l, rng.random_range(-0.9..0.9)));
            }
        }
        let want = oracle_stable(&lags);
        stable_count += want as usize;
        if roots_stable(&lags) != want {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
    assert!(stable_count > 50 && stable_count < 450);
}
