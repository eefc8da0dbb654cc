//! Second-order CUSUM tests built from U-statistics of order 2.
//!
//! For `q = 1` the embedded values are `Z_i = X_i`; for `q >= 2` they are the
//! pairs `Z_i = (X_i, X_{i+q-1})`, `i = 1..n`. The segment U-statistic with
//! kernel `phi` is
//!
//! ```text
//! U_{k:l} = binom(l-k+1, 2)^{-1} sum_{k <= i < j <= l} phi(Z_i, Z_j)
//! ```
//!
//! and the CUSUM statistic takes `max_{2 <= k <= n-2}` of the weighted
//! segment difference. Three kernels are of interest: the (symmetrized) mean
//! kernel `(z + z')/2`, the variance kernel `(z - z')^2 / 2` and the
//! autocovariance kernel `(z_1 - z_1')(z_2 - z_2')/2`. All segment values
//! reduce to prefix sums, so the sweep over split points is linear.

use crate::error::{argument, Result};
use crate::multiplier::MultiplierSet;
use crate::series::Series;
use rayon::prelude::*;

/// Kernel of the order-2 U-statistic.
///
/// The mean kernel is the symmetrization `(z + z')/2` of the textbook
/// `phi(z, z') = z`, which makes the U-statistic the exact segment mean while
/// leaving the CUSUM statistic unchanged up to asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Mean,
    Variance,
    /// Autocovariance at this lag (`>= 1`), i.e. pairs `(X_i, X_{i+lag})`.
    Autocov { lag: usize },
}

impl Kernel {
    /// Pair index `q`: 1 for mean/variance, `lag + 1` for autocovariance.
    pub fn q(&self) -> usize {
        match self {
            Kernel::Mean | Kernel::Variance => 1,
            Kernel::Autocov { lag } => lag + 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Mean => "m".to_string(),
            Kernel::Variance => "v".to_string(),
            Kernel::Autocov { lag: 1 } => "a".to_string(),
            Kernel::Autocov { lag } => format!("a{lag}"),
        }
    }

    fn validate(&self, h: usize) -> Result<()> {
        let q = self.q();
        if q > h {
            return Err(argument(format!(
                "kernel {} needs q={q} <= h={h}",
                self.name()
            )));
        }
        if let Kernel::Autocov { lag } = self {
            if *lag < 1 {
                return Err(argument("autocovariance lag must be >= 1"));
            }
        }
        Ok(())
    }
}

/// Prefix sums of the embedded coordinates, enough to evaluate any segment
/// U-statistic in O(1).
struct Prefix {
    sx: Vec<f64>,
    sy: Vec<f64>,
    sxy: Vec<f64>,
}

impl Prefix {
    fn new(x: &[f64], n: usize, kernel: Kernel) -> Prefix {
        let q = kernel.q();
        let mut sx = Vec::with_capacity(n + 1);
        let mut sy = Vec::with_capacity(n + 1);
        let mut sxy = Vec::with_capacity(n + 1);
        sx.push(0.0);
        sy.push(0.0);
        sxy.push(0.0);
        for i in 0..n {
            let a = x[i];
            let b = match kernel {
                Kernel::Mean => a,
                Kernel::Variance => a,
                Kernel::Autocov { .. } => x[i + q - 1],
            };
            sx.push(sx[i] + a);
            sy.push(sy[i] + b);
            sxy.push(
                sxy[i]
                    + match kernel {
                        Kernel::Mean => 0.0,
                        Kernel::Variance => a * a,
                        Kernel::Autocov { .. } => a * b,
                    },
            );
        }
        Prefix { sx, sy, sxy }
    }

    /// Segment `[from, to)` of embedded points, `to - from >= 2`.
    fn ustat(&self, from: usize, to: usize, kernel: Kernel) -> f64 {
        let len = (to - from) as f64;
        let sx = self.sx[to] - self.sx[from];
        match kernel {
            Kernel::Mean => sx / len,
            Kernel::Variance => {
                let q = self.sxy[to] - self.sxy[from];
                (len * q - sx * sx) / (len * (len - 1.0))
            }
            Kernel::Autocov { .. } => {
                let sy = self.sy[to] - self.sy[from];
                let pxy = self.sxy[to] - self.sxy[from];
                (len * pxy - sx * sy) / (len * (len - 1.0))
            }
        }
    }
}

/// Segment U-statistic over the zero-based inclusive range `[k, l]` of
/// embedded points.
pub fn ustat(series: &Series, h: usize, k: usize, l: usize, kernel: Kernel) -> Result<f64> {
    kernel.validate(h)?;
    let n = embedded_len(series, h)?;
    if k > l || l >= n {
        return Err(argument(format!("segment [{k}, {l}] out of range for n={n}")));
    }
    if l - k < 1 {
        return Err(argument("U-statistic segments need at least two points"));
    }
    let prefix = Prefix::new(series.values(), n, kernel);
    Ok(prefix.ustat(k, l + 1, kernel))
}

/// CUSUM statistic `max_{2 <= k <= n-2} |sqrt(n) (k/n)((n-k)/n)
/// (U_{1:k} - U_{k+1:n})|`, zero outside that window.
pub fn stat_u(series: &Series, h: usize, kernel: Kernel) -> Result<f64> {
    kernel.validate(h)?;
    let n = embedded_len(series, h)?;
    if n < 5 {
        return Err(argument("second-order statistics need n >= 5"));
    }
    let prefix = Prefix::new(series.values(), n, kernel);
    let nf = n as f64;
    let mut best = 0.0f64;
    for k in 2..=n - 2 {
        let weight = nf.sqrt() * (k as f64 / nf) * ((n - k) as f64 / nf);
        let value = (weight * (prefix.ustat(0, k, kernel) - prefix.ustat(k, n, kernel))).abs();
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Centered first projection `phi1(Z_i) = (n-1)^{-1} sum_{j != i}
/// phi(Z_i, Z_j) - U_{1:n}`; sums to zero by construction.
pub fn influence_series(series: &Series, h: usize, kernel: Kernel) -> Result<Vec<f64>> {
    phi_hat(series, h, kernel)
}

pub(crate) fn phi_hat(series: &Series, h: usize, kernel: Kernel) -> Result<Vec<f64>> {
    kernel.validate(h)?;
    let n = embedded_len(series, h)?;
    let x = series.values();
    let q = kernel.q();
    let nf = n as f64;
    let prefix = Prefix::new(x, n, kernel);
    let u_full = prefix.ustat(0, n, kernel);
    let sx = prefix.sx[n];
    let sy = prefix.sy[n];
    let sxy = prefix.sxy[n];
    let values = (0..n)
        .map(|i| {
            let zi = x[i];
            match kernel {
                Kernel::Mean => zi / 2.0 + (sx - zi) / (2.0 * (nf - 1.0)) - sx / nf,
                Kernel::Variance => {
                    (nf * zi * zi - 2.0 * zi * sx + sxy) / (2.0 * (nf - 1.0)) - u_full
                }
                Kernel::Autocov { .. } => {
                    let yi = x[i + q - 1];
                    (nf * zi * yi - zi * sy - yi * sx + sxy) / (2.0 * (nf - 1.0)) - u_full
                }
            }
        })
        .collect();
    Ok(values)
}

/// Multiplier bootstrap replicates of [`stat_u`].
pub fn replicate_u(
    series: &Series,
    h: usize,
    kernel: Kernel,
    mults: &MultiplierSet,
) -> Result<Vec<f64>> {
    let n = embedded_len(series, h)?;
    if n < 5 {
        return Err(argument("second-order statistics need n >= 5"));
    }
    if mults.len_n() != n {
        return Err(argument(format!(
            "multiplier sequences have {} columns but the test needs {n}",
            mults.len_n()
        )));
    }
    let phi = phi_hat(series, h, kernel)?;
    let rows: Vec<&[f64]> = mults.rows().collect();
    Ok(rows
        .into_par_iter()
        .map(|xi| replicate_one(&phi, xi))
        .collect())
}

fn replicate_one(phi: &[f64], xi: &[f64]) -> f64 {
    let n = phi.len();
    let nf = n as f64;
    let scale = 2.0 / nf.sqrt();
    let total: f64 = (0..n).map(|i| xi[i] * phi[i]).sum();
    let mut prefix = 0.0;
    let mut best = 0.0f64;
    for k in 1..=n - 2 {
        prefix += xi[k - 1] * phi[k - 1];
        if k < 2 {
            continue;
        }
        let lam = k as f64 / nf;
        let value = (scale * prefix - lam * scale * total).abs();
        if value > best {
            best = value;
        }
    }
    best
}

fn embedded_len(series: &Series, h: usize) -> Result<usize> {
    if h < 1 || h > series.len() - 1 {
        return Err(argument(format!(
            "h={h} out of range for a series of length {}",
            series.len()
        )));
    }
    Ok(series.len() - h + 1)
}
