//! Householder QR least squares with rank detection.

use alloc::vec;
use alloc::vec::Vec;

/// Columns whose scaled `|R_jj|` falls below this fraction of the largest
/// diagonal entry are treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Diagonal of `(X'X)^-1`.
    pub xtx_inv_diag: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

/// Indices of the columns found linearly dependent, together with the
/// earlier columns that span them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDeficiency {
    pub dependent: Vec<usize>,
    pub involved: Vec<usize>,
}

struct Factorization {
    n: usize,
    k: usize,
    /// Column-major `n x k`: R above the diagonal, reflectors below.
    a: Vec<f64>,
    rdiag: Vec<f64>,
    scale: Vec<f64>,
}

impl Factorization {
    fn new(columns: &[&[f64]], n: usize) -> Self {
        let k = columns.len();
        let mut a = vec![0.0; n * k];
        let mut scale = vec![0.0; k];
        for (j, col) in columns.iter().enumerate() {
            let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
            scale[j] = norm;
            let s = if norm > 0.0 { 1.0 / norm } else { 0.0 };
            for (i, v) in col.iter().enumerate() {
                a[j * n + i] = v * s;
            }
        }
        let mut rdiag = vec![0.0; k];
        for j in 0..k {
            let col = j * n;
            let norm = libm::sqrt(a[col + j..col + n].iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                rdiag[j] = 0.0;
                continue;
            }
            let alpha = if a[col + j] > 0.0 { -norm } else { norm };
            // v = x - alpha e1, stored in place.
            a[col + j] -= alpha;
            let vtv: f64 = a[col + j..col + n].iter().map(|v| v * v).sum();
            rdiag[j] = alpha;
            if vtv == 0.0 {
                continue;
            }
            for c in j + 1..k {
                let other = c * n;
                let dot: f64 = (j..n).map(|i| a[col + i] * a[other + i]).sum();
                let f = 2.0 * dot / vtv;
                for i in j..n {
                    a[other + i] -= f * a[col + i];
                }
            }
        }
        Factorization {
            n,
            k,
            a,
            rdiag,
            scale,
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.a[j * self.n + i]
        }
    }

    fn dependent_columns(&self) -> Vec<usize> {
        let largest = self.rdiag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (0..self.k)
            .filter(|&j| {
                self.scale[j] == 0.0 || self.rdiag[j].abs() <= RANK_TOLERANCE * largest
            })
            .collect()
    }

    /// Applies `Q'` to `y`.
    fn qt(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = y.to_vec();
        for j in 0..self.k {
            let col = j * n;
            let vtv: f64 = self.a[col + j..col + n].iter().map(|v| v * v).sum();
            if vtv == 0.0 {
                continue;
            }
            let dot: f64 = (j..n).map(|i| self.a[col + i] * out[i]).sum();
            let f = 2.0 * dot / vtv;
            for (o, v) in out[j..].iter_mut().zip(&self.a[col + j..col + n]) {
                *o -= f * v;
            }
        }
        out
    }

    /// Inverse of the scaled upper-triangular factor, column-major `k x k`.
    fn r_inverse(&self) -> Vec<f64> {
        let k = self.k;
        let mut inv = vec![0.0; k * k];
        for c in 0..k {
            inv[c * k + c] = 1.0 / self.rdiag[c];
            for i in (0..c).rev() {
                let s: f64 = (i + 1..=c).map(|m| self.r(i, m) * inv[c * k + m]).sum();
                inv[c * k + i] = -s / self.rdiag[i];
            }
        }
        inv
    }
}

/// Ordinary least squares of `y` on the given columns.
///
/// Columns are normalized to unit length before factorization so that the
/// rank test is insensitive to regressor units.
pub fn least_squares(columns: &[&[f64]], y: &[f64]) -> Result<LeastSquares, RankDeficiency> {
    let n = y.len();
    let k = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));
    if k > n {
        return Err(RankDeficiency {
            dependent: (n..k).collect(),
            involved: (0..n).collect(),
        });
    }
    let f = Factorization::new(columns, n);
    let dependent = f.dependent_columns();
    if !dependent.is_empty() {
        return Err(explain(columns, &dependent));
    }

    let qty = f.qt(y);
    let mut beta_s = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|m| f.r(i, m) * beta_s[m]).sum();
        beta_s[i] = (qty[i] - s) / f.rdiag[i];
    }
    let coefficients: Vec<f64> = beta_s
        .iter()
        .zip(&f.scale)
        .map(|(b, s)| b / s)
        .collect();

    let inv = f.r_inverse();
    let xtx_inv_diag = (0..k)
        .map(|j| {
            let row: f64 = (j..k).map(|c| inv[c * k + j] * inv[c * k + j]).sum();
            row / (f.scale[j] * f.scale[j])
        })
        .collect();

    let mut residuals = y.to_vec();
    for (col, b) in columns.iter().zip(&coefficients) {
        for (e, x) in residuals.iter_mut().zip(col.iter()) {
            *e -= b * x;
        }
    }
    let rss = residuals.iter().map(|e| e * e).sum();
    Ok(LeastSquares {
        coefficients,
        xtx_inv_diag,
        residuals,
        rss,
    })
}

/// Finds, for each dependent column, the earlier independent columns that
/// carry weight in its projection.
fn explain(columns: &[&[f64]], dependent: &[usize]) -> RankDeficiency {
    let mut involved = Vec::new();
    for &d in dependent {
        let basis: Vec<usize> = (0..d).filter(|i| !dependent.contains(i)).collect();
        if basis.is_empty() || columns[d].iter().all(|v| *v == 0.0) {
            continue;
        }
        let cols: Vec<&[f64]> = basis.iter().map(|&i| columns[i]).collect();
        if let Ok(fit) = least_squares(&cols, columns[d]) {
            let target = libm::sqrt(columns[d].iter().map(|v| v * v).sum::<f64>());
            for (idx, b) in basis.iter().zip(&fit.coefficients) {
                let norm = libm::sqrt(columns[*idx].iter().map(|v| v * v).sum::<f64>());
                if (b * norm).abs() > 1e-6 * target && !involved.contains(idx) {
                    involved.push(*idx);
                }
            }
        }
    }
    involved.sort_unstable();
    RankDeficiency {
        dependent: dependent.to_vec(),
        involved,
    }
}
