//! Student-t distribution via the regularized incomplete beta function.

/// Continued-fraction termination tolerance.
const CF_EPS: f64 = 1e-10;
const CF_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
///
/// Returns NaN outside that domain.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta_split(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 - x` supplied separately so that callers can keep
/// full precision when `x` is close to one.
fn inc_beta_split(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if y == 0.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log(y) - ln_beta(a, b);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    }
}

/// `I_x(df/2, 1/2)` at `x = df / (df + t^2)`.
fn t_tail_mass(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    let denom = df + t2;
    inc_beta_split(0.5 * df, 0.5, df / denom, t2 / denom)
}

/// CDF of Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * t_tail_mass(t, df);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `P(|T| >= |t|)`, computed without cancellation.
pub fn two_sided_p_value(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    t_tail_mass(t, df).clamp(0.0, 1.0)
}

/// Inverse CDF by bisection on [`student_t_cdf`].
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || !(df > 0.0) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    while student_t_cdf(lo, df) > p {
        lo *= 2.0;
    }
    while student_t_cdf(hi, df) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_at_zero() {
        for df in [1.0, 5.0, 30.0, 2500.0] {
            assert!((student_t_cdf(0.0, df) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cauchy_closed_form() {
        // df = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi.
        for t in [-3.0, -1.0, 0.5, 2.0, 10.0] {
            let exact = 0.5 + libm::atan(t) / core::f64::consts::PI;
            assert!((student_t_cdf(t, 1.0) - exact).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn df_two_closed_form() {
        // F(t) = 1/2 + t / (2 sqrt(2 + t^2)).
        for t in [-4.0, -0.3, 1.7, 3.0] {
            let exact = 0.5 + t / (2.0 * libm::sqrt(2.0 + t * t));
            assert!((student_t_cdf(t, 2.0) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn inc_beta_uniform_case() {
        // I_x(1, 1) = x.
        for x in [0.1, 0.5, 0.9] {
            assert!((inc_beta(1.0, 1.0, x) - x).abs() < 1e-14);
        }
        assert!(inc_beta(-1.0, 1.0, 0.5).is_nan());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for df in [3.0, 30.0, 2500.0] {
            for p in [0.025, 0.5, 0.9, 0.975] {
                let q = student_t_quantile(p, df);
                let err = (student_t_cdf(q, df) - p).abs();
                assert!(err < 1e-10, "df={df} p={p} q={q} err={err}");
            }
        }
        // Large-df 97.5% point approaches the normal 1.959964.
        assert!((student_t_quantile(0.975, 1e6) - 1.959_964).abs() < 1e-4);
    }

    #[test]
    fn two_sided_matches_cdf() {
        let p = two_sided_p_value(-2.5, 40.0);
        assert!((p - 2.0 * student_t_cdf(-2.5, 40.0)).abs() < 1e-14);
    }
}
