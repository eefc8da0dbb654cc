//! Dependent multiplier sequences.
//!
//! A dependent multiplier sequence is a strictly stationary, mean-zero,
//! unit-variance sequence that is `l_n`-dependent with `l_n = 2 b_n - 1`; it
//! plays the role of the block length in a block bootstrap. We generate
//! independent copies with the moving average construction: i.i.d. standard
//! normals `Z_1, ..., Z_{n + 2 b_n - 2}` are convolved with Parzen-kernel
//! weights
//!
//! ```text
//! w_j = kappa((j - b_n) / b_n),  j = 1..l_n,    normalized to unit l2 norm,
//! xi_i = sum_j w~_j Z_{j+i-1},   i = 1..n.
//! ```
//!
//! Each `xi_i` then has exactly zero mean and unit variance, and
//! `Corr(xi_i, xi_{i+p}) = sum_j w~_j w~_{j+p}` vanishes for `p >= l_n`.

use crate::error::{argument, Result};
use crate::series::Series;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parzen's kernel.
pub fn parzen(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 {
        1.0 - 6.0 * x * x + 6.0 * a * a * a
    } else if a <= 1.0 {
        let t = 1.0 - a;
        2.0 * t * t * t
    } else {
        0.0
    }
}

/// Normalized moving-average weights `w~_1, ..., w~_{2b-1}`.
pub fn multiplier_weights(b_n: usize) -> Vec<f64> {
    assert!(b_n >= 1);
    let ell = 2 * b_n - 1;
    let mut w: Vec<f64> = (1..=ell)
        .map(|j| parzen((j as f64 - b_n as f64) / b_n as f64))
        .collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut w {
        *v /= norm;
    }
    w
}

/// Closed-form `Corr(xi_i, xi_{i+p}) = sum_j w~_j w~_{j+p}`; exactly zero for
/// `p >= 2 b_n - 1`.
pub fn weight_autocorrelation(weights: &[f64], p: usize) -> f64 {
    if p >= weights.len() {
        return 0.0;
    }
    (0..weights.len() - p).map(|j| weights[j] * weights[j + p]).sum()
}

/// How the block half-width `b_n` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthMode {
    Fixed,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthDiagnostics {
    /// Estimated lag-1 autocorrelation of the series.
    pub rho1: f64,
    /// Summed rank-autocorrelation magnitude above the noise floor.
    pub dependence_excess: f64,
    /// Whether the `b_n <= N/4` cap was binding.
    pub capped: bool,
    /// Set for degenerate (constant) input, where `b_n = 1` is used.
    pub fallback_constant: bool,
}

/// A block half-width `b_n >= 1`, giving bandwidth `l_n = 2 b_n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthChoice {
    pub mode: BandwidthMode,
    pub b_n: usize,
    pub diagnostics: Option<BandwidthDiagnostics>,
}

impl BandwidthChoice {
    pub fn fixed(b_n: usize) -> Result<Self> {
        if b_n < 1 {
            return Err(argument("bandwidth b_n must be >= 1"));
        }
        Ok(BandwidthChoice {
            mode: BandwidthMode::Fixed,
            b_n,
            diagnostics: None,
        })
    }

    pub fn ell_n(&self) -> usize {
        2 * self.b_n - 1
    }
}

/// `M` independent copies of one dependent multiplier sequence of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    data: Vec<f64>, // M x n, row-major
    n: usize,
    m: usize,
    b_n: usize,
    seed: u64,
}

impl MultiplierSet {
    pub fn len_n(&self) -> usize {
        self.n
    }

    /// Number of independent copies `M`.
    pub fn count(&self) -> usize {
        self.m
    }

    pub fn b_n(&self) -> usize {
        self.b_n
    }

    pub fn ell_n(&self) -> usize {
        2 * self.b_n - 1
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.n..(m + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Generates `m_count` independent multiplier sequences of length `n`.
///
/// Row `m` is derived from RNG stream `(seed, m)`, so the output is
/// bit-identical no matter how generation is scheduled across threads.
pub fn generate_multipliers(
    n: usize,
    m_count: usize,
    bw: &BandwidthChoice,
    seed: u64,
) -> Result<MultiplierSet> {
    generate_multipliers_substream(n, m_count, bw, seed, 0)
}

/// As [`generate_multipliers`], but drawing from the substream `substream`
/// of the seed's RNG space. Sets generated under the same seed and different
/// substreams are mutually independent.
pub fn generate_multipliers_substream(
    n: usize,
    m_count: usize,
    bw: &BandwidthChoice,
    seed: u64,
    substream: u32,
) -> Result<MultiplierSet> {
    if n < 2 {
        return Err(argument("multiplier sequences need n >= 2"));
    }
    if m_count < 1 {
        return Err(argument("need at least one multiplier sequence"));
    }
    if m_count >= u32::MAX as usize {
        return Err(argument("too many multiplier sequences"));
    }
    let b = bw.b_n;
    let ell = 2 * b - 1;
    if ell > n {
        return Err(argument(format!(
            "bandwidth l_n = {ell} exceeds the sequence length n = {n}"
        )));
    }
    let weights = multiplier_weights(b);
    let rows: Vec<Vec<f64>> = (0..m_count)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((substream as u64) << 32) | m as u64);
            let z: Vec<f64> = (0..n + 2 * b - 2)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            (0..n)
                .map(|i| weights.iter().zip(&z[i..i + ell]).map(|(w, zv)| w * zv).sum())
                .collect()
        })
        .collect();
    let mut data = Vec::with_capacity(m_count * n);
    for row in rows {
        data.extend_from_slice(&row);
    }
    Ok(MultiplierSet {
        data,
        n,
        m: m_count,
        b_n: b,
        seed,
    })
}

/// Data-driven choice of `b_n`, targeting the rate `l_n ~ K n^{1/5}` with a
/// constant that grows with the estimated serial dependence.
///
/// The dependence is summarized by the rank autocorrelations: the summed
/// magnitude above the `1/sqrt(N)` noise floor (see
/// [`crate::empirical::rank_acf_excess`]). The half-width is
///
/// ```text
/// b_n = round( (0.75 + 2.75 min(s, 2.85)) * N^{1/5} ),   s = rank-ACF excess,
/// ```
///
/// clamped to `[1, N/4]`. Ranks make the summary invariant under monotone
/// marginal changes, so variance shifts cannot mask serial dependence. The
/// summary saturates at 2.85: past that point the dependence range rivals the
/// sample itself (trends, near-unit roots) and a longer block only starves
/// the bootstrap of degrees of freedom.
pub fn select_bandwidth(series: &Series) -> Result<BandwidthChoice> {
    select_bandwidth_values(series.values())
}

/// Core of [`select_bandwidth`], applicable to any observed sequence (the
/// second-order tests apply it to the estimated influence series of their
/// kernel, whose serial dependence is the one their partial sums feel).
pub fn select_bandwidth_values(x: &[f64]) -> Result<BandwidthChoice> {
    bandwidth_rule(x, RANK_RULE)
}

/// Bandwidth for the influence series of a second-order statistic. Influence
/// series of the variance and autocovariance kernels are heavy-tailed, which
/// strongly attenuates their sample autocorrelations, so the dependence
/// response is steeper than in the rank rule; the raw (not rank)
/// autocorrelations are used because U-statistics are not rank-invariant.
pub fn select_bandwidth_influence(x: &[f64]) -> Result<BandwidthChoice> {
    bandwidth_rule(x, INFLUENCE_RULE)
}

struct RuleConstants {
    intercept: f64,
    slope: f64,
    saturation: f64,
    use_ranks: bool,
}

const RANK_RULE: RuleConstants = RuleConstants {
    intercept: 0.75,
    slope: 2.75,
    saturation: 2.85,
    use_ranks: true,
};

const INFLUENCE_RULE: RuleConstants = RuleConstants {
    intercept: 0.75,
    slope: 5.5,
    saturation: 2.85,
    use_ranks: false,
};

fn raw_acf_excess(x: &[f64]) -> f64 {
    let len = x.len();
    let nf = len as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var0 == 0.0 {
        return 0.0;
    }
    let kmax = ((10.0 * nf.log10()).ceil() as usize).clamp(2, len - 2);
    let noise = 1.0 / nf.sqrt();
    (1..=kmax)
        .map(|k| {
            let mut s = 0.0;
            for t in 0..len - k {
                s += (x[t] - mean) * (x[t + k] - mean);
            }
            ((s / var0).abs() - noise).max(0.0)
        })
        .sum()
}

fn bandwidth_rule(x: &[f64], rule: RuleConstants) -> Result<BandwidthChoice> {
    let len = x.len();
    if len < 8 {
        return Err(argument("bandwidth selection needs at least 8 observations"));
    }
    let nf = len as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var0 == 0.0 {
        return Ok(BandwidthChoice {
            mode: BandwidthMode::Auto,
            b_n: 1,
            diagnostics: Some(BandwidthDiagnostics {
                rho1: 0.0,
                dependence_excess: 0.0,
                capped: false,
                fallback_constant: true,
            }),
        });
    }
    let excess = if rule.use_ranks {
        crate::empirical::rank_acf_excess(x)
    } else {
        raw_acf_excess(x)
    };
    let uncapped = ((rule.intercept + rule.slope * excess.min(rule.saturation)) * nf.powf(0.2))
        .round()
        .max(1.0) as usize;
    let cap = (len / 4).max(1);
    let b_n = uncapped.min(cap);
    let rho1 = {
        let mut s = 0.0;
        for t in 0..len - 1 {
            s += (x[t] - mean) * (x[t + 1] - mean);
        }
        s / var0
    };
    Ok(BandwidthChoice {
        mode: BandwidthMode::Auto,
        b_n,
        diagnostics: Some(BandwidthDiagnostics {
            rho1,
            dependence_excess: excess,
            capped: uncapped > cap,
            fallback_constant: false,
        }),
    })
}

/// The half-width actually used by a run at embedding dimension `h` on `n`
/// embedded points.
///
/// Serial statistics aggregate overlapping windows, so their indicator
/// processes are `(h-1)`-dependent even when the observations themselves are
/// independent; an automatically selected bandwidth is therefore never taken
/// below `h`. Fixed bandwidths are used as given. Either way the result is
/// clamped so that `l_n = 2 b_n - 1 <= n` stays feasible.
pub fn bandwidth_for_run(choice: &BandwidthChoice, h: usize, n: usize) -> BandwidthChoice {
    let feasible = ((n + 1) / 2).max(1);
    let b_n = match choice.mode {
        BandwidthMode::Fixed => choice.b_n,
        BandwidthMode::Auto => choice.b_n.max(h),
    };
    BandwidthChoice {
        b_n: b_n.min(feasible),
        ..*choice
    }
}
