//! Seeded AR-X simulation with sparse spike regressors.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so a given
//! seed reproduces the same sample on every platform. The share signal is
//! drawn first, then one standard normal per simulated step (burn-in
//! included).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, Weekday};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::calendar::us_trading_days_ending;
use crate::dataset::{default_regime_date, Column, RegressionSample, REGIME, SHARE, WEEKDAY_COLUMNS};
use crate::{Error, Result};

pub const DEFAULT_BURN_IN: usize = 500;

/// Sparse non-negative spikes inside a window of rows, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalShape {
    pub window_start: usize,
    pub window_length: usize,
    /// Probability that a window row carries a spike.
    pub spike_rate: f64,
    /// Spikes are `|N(0, 1)| * spike_scale`.
    pub spike_scale: f64,
}

impl SignalShape {
    /// Spikes over the last 62 rows, tuned so a 2516-row sample has a mean
    /// near 7e-5 and a standard deviation near 7.8e-4.
    pub fn sparse_tail(n: usize) -> Self {
        let window_length = n.min(62);
        SignalShape {
            window_start: n - window_length,
            window_length,
            spike_rate: 0.52,
            spike_scale: 0.0069,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.window_start + self.window_length > n {
            return Err(Error::Argument(format!(
                "spike window {}..{} exceeds {} rows",
                self.window_start,
                self.window_start + self.window_length,
                n
            )));
        }
        if !(0.0..=1.0).contains(&self.spike_rate) || !(self.spike_scale >= 0.0) {
            return Err(Error::Argument(
                "spike rate must lie in [0, 1] and scale must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub intercept: f64,
    /// `(lag, coefficient)` pairs.
    pub lag_coeffs: Vec<(usize, f64)>,
    /// Coefficients on the generated columns (`share`, `regime`, `mon`..`thu`).
    pub exog_betas: Vec<(String, f64)>,
    pub noise_sd: f64,
    pub seed: u64,
    pub signal: SignalShape,
    /// Last date of the generated trading calendar.
    pub end_date: NaiveDate,
    pub regime_date: NaiveDate,
    pub burn_in: usize,
}

impl GeneratorSpec {
    /// White noise with unit variance on `n` trading days ending 2020-05-01.
    pub fn new(n: usize, seed: u64) -> Self {
        GeneratorSpec {
            n,
            intercept: 0.0,
            lag_coeffs: Vec::new(),
            exog_betas: Vec::new(),
            noise_sd: 1.0,
            seed,
            signal: SignalShape::sparse_tail(n),
            end_date: NaiveDate::from_ymd_opt(2020, 5, 1).expect("valid date"),
            regime_date: default_regime_date(),
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// DJIA-style truth: AR lags 1 and 7, share effect -1.268, daily
    /// volatility 1.08%.
    pub fn djia_like(n: usize, seed: u64) -> Self {
        GeneratorSpec {
            lag_coeffs: vec![(1, -0.148), (7, 0.121)],
            exog_betas: vec![(SHARE.to_string(), -1.268)],
            noise_sd: 0.0108,
            ..GeneratorSpec::new(n, seed)
        }
    }

    pub fn with_lags(mut self, lags: &[(usize, f64)]) -> Self {
        self.lag_coeffs = lags.to_vec();
        self
    }

    pub fn with_beta(mut self, name: &str, beta: f64) -> Self {
        self.exog_betas.retain(|(n, _)| n != name);
        self.exog_betas.push((name.to_string(), beta));
        self
    }

    pub fn beta(&self, name: &str) -> Option<f64> {
        self.exog_betas.iter().find(|(n, _)| n == name).map(|(_, b)| *b)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::Argument("noise_sd must be finite and non-negative".into()));
        }
        if self.lag_coeffs.iter().any(|(l, _)| *l == 0) {
            return Err(Error::Argument("lags must be at least 1".into()));
        }
        for (i, (l, _)) in self.lag_coeffs.iter().enumerate() {
            if self.lag_coeffs[..i].iter().any(|(o, _)| o == l) {
                return Err(Error::Argument(format!("lag {l} repeated")));
            }
        }
        for (name, _) in &self.exog_betas {
            if !generated_columns().contains(&name.as_str()) {
                return Err(Error::UnknownColumn(name.clone()));
            }
        }
        if !roots_stable(&self.lag_coeffs) {
            return Err(Error::Unstable);
        }
        self.signal.validate(self.n)
    }
}

fn generated_columns() -> [&'static str; 6] {
    [
        SHARE,
        REGIME,
        WEEKDAY_COLUMNS[0],
        WEEKDAY_COLUMNS[1],
        WEEKDAY_COLUMNS[2],
        WEEKDAY_COLUMNS[3],
    ]
}

/// A generated sample and the specification that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub sample: RegressionSample,
    pub spec: GeneratorSpec,
}

/// Draws the spike signal for `n` rows.
pub fn spike_signal<R: Rng + ?Sized>(n: usize, shape: &SignalShape, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let end = (shape.window_start + shape.window_length).min(n);
    for v in &mut out[shape.window_start.min(n)..end] {
        let gate: f64 = rng.random();
        let z: f64 = rng.sample(StandardNormal);
        if gate < shape.spike_rate {
            *v = z.abs() * shape.spike_scale;
        }
    }
    out
}

/// Simulates a sample from `spec`: trading dates, spike share, regime and
/// weekday columns, and the AR-X response.
pub fn generate(spec: &GeneratorSpec) -> Result<SyntheticSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let share = spike_signal(spec.n, &spec.signal, &mut rng);
    let dates = us_trading_days_ending(spec.end_date, spec.n);
    build(spec, dates, share, &mut rng)
}

/// Like [`generate`] but with caller-supplied dates and share column, so
/// several responses can share one signal. `spec.n` is ignored; the rows of
/// `spec.signal`'s window are marked observed.
pub fn generate_with_signal(
    spec: &GeneratorSpec,
    dates: Vec<NaiveDate>,
    share: Vec<f64>,
) -> Result<SyntheticSample> {
    if dates.len() != share.len() {
        return Err(Error::Argument(format!(
            "{} dates for {} share values",
            dates.len(),
            share.len()
        )));
    }
    let spec = GeneratorSpec {
        n: dates.len(),
        ..spec.clone()
    };
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    build(&spec, dates, share, &mut rng)
}

fn build(
    spec: &GeneratorSpec,
    dates: Vec<NaiveDate>,
    share: Vec<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticSample> {
    let n = dates.len();
    let regime: Vec<f64> = dates
        .iter()
        .map(|d| if *d >= spec.regime_date { 1.0 } else { 0.0 })
        .collect();
    let window = spec.signal.window_start..spec.signal.window_start + spec.signal.window_length;
    let observed = (0..n).map(|i| window.contains(&i)).collect();
    let mut columns = vec![Column::new(SHARE, share), Column::new(REGIME, regime)];
    let days = [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu];
    for (name, wd) in WEEKDAY_COLUMNS.iter().zip(days) {
        let values = dates
            .iter()
            .map(|d| if d.weekday() == wd { 1.0 } else { 0.0 })
            .collect();
        columns.push(Column::new(*name, values));
    }

    let exog: Vec<(f64, &[f64])> = spec
        .exog_betas
        .iter()
        .map(|(name, beta)| {
            let col = columns
                .iter()
                .find(|c| &c.name == name)
                .expect("validated column name");
            (*beta, col.values.as_slice())
        })
        .collect();
    let y = simulate_arx(
        spec.intercept,
        &spec.lag_coeffs,
        &exog,
        spec.noise_sd,
        spec.burn_in,
        n,
        rng,
    );
    let sample = RegressionSample::new("synthetic", dates, y, columns, observed)?;
    Ok(SyntheticSample {
        sample,
        spec: spec.clone(),
    })
}

/// Runs the recursion forward from zero initial conditions and returns the
/// `n` values after the burn-in. Exogenous terms are zero during burn-in.
pub fn simulate_arx<R: Rng + ?Sized>(
    intercept: f64,
    lag_coeffs: &[(usize, f64)],
    exog: &[(f64, &[f64])],
    noise_sd: f64,
    burn_in: usize,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let total = burn_in + n;
    let mut y = Vec::with_capacity(total);
    for t in 0..total {
        let mut mean = intercept;
        for &(lag, phi) in lag_coeffs {
            if t >= lag {
                mean += phi * y[t - lag];
            }
        }
        if t >= burn_in {
            for (beta, col) in exog {
                mean += beta * col[t - burn_in];
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        y.push(mean + noise_sd * z);
    }
    y.split_off(burn_in)
}

/// True when `1 - sum phi_k z^k` has every root strictly outside the unit
/// circle (to 1e-8), found as the inverse roots of the companion polynomial.
pub fn roots_stable(lag_coeffs: &[(usize, f64)]) -> bool {
    let p = lag_coeffs.iter().map(|(l, _)| *l).max().unwrap_or(0);
    if p == 0 {
        return true;
    }
    let mut phi = vec![0.0; p];
    for &(lag, c) in lag_coeffs {
        if lag == 0 || !c.is_finite() {
            return false;
        }
        phi[lag - 1] += c;
    }
    // lambda^p - phi_1 lambda^(p-1) - ... - phi_p, highest degree first.
    let mut poly = Vec::with_capacity(p + 1);
    poly.push(1.0);
    poly.extend(phi.iter().map(|c| -c));
    polynomial_roots(&poly)
        .iter()
        .all(|r| r.norm() < 1.0 - 1e-8)
}

/// Roots of a monic real polynomial (coefficients highest degree first) by
/// Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    // Start on a circle with an angular offset that breaks conjugate symmetry.
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|i| {
            let angle = 2.0 * core::f64::consts::PI * i as f64 / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, angle)
        })
        .collect();
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    for _ in 0..5000 {
        let mut delta: f64 = 0.0;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 1e-12);
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}
