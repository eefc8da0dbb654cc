//! Ranks, marginal empirical d.f.s, serial embeddings and empirical
//! autocopulas.
//!
//! For a stretch `X_1, ..., X_N` and an embedding dimension `h`, the embedded
//! points are `Y_i = (X_i, ..., X_{i+h-1})`, `i = 1..n`, `n = N - h + 1`. The
//! segment marginal d.f. is
//!
//! ```text
//! G_{k:l}(x) = 1/(l+h-k) * #{ j in [k, l+h-1] : X_j <= x }
//! ```
//!
//! and the segment empirical autocopula is
//!
//! ```text
//! C_{k:l}(u) = 1/(l-k+1) * sum_{i=k..l} prod_j 1{ G_{k:l}(X_{i+j-1}) <= u_j }
//! ```
//!
//! with the convention `C_{k:l} = 0` when `k > l`. Everything in this module
//! is a pure function of its inputs; segment indices are zero-based and
//! inclusive throughout the crate.

use crate::error::{argument, Result};
use crate::series::Series;

/// Which coordinates of the length-`span` window each embedded point keeps.
///
/// The full embedding keeps all of them; the pairwise embedding used by the
/// lag-specific autocopula tests keeps `(X_i, X_{i+q-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    offsets: Vec<usize>,
}

impl Embedding {
    /// `(X_i, ..., X_{i+h-1})`.
    pub fn full(h: usize) -> Result<Self> {
        if h < 1 {
            return Err(argument("embedding dimension h must be >= 1"));
        }
        Ok(Embedding {
            offsets: (0..h).collect(),
        })
    }

    /// `(X_i, X_{i+q-1})` for a lag `q - 1 >= 1`.
    pub fn pair(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(argument("pairwise embedding requires q >= 2"));
        }
        Ok(Embedding {
            offsets: vec![0, q - 1],
        })
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Number of coordinates of each embedded point.
    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    /// Window length consumed by one embedded point.
    pub fn span(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0) + 1
    }
}

/// Embedding dimension plus an optional pairwise lag selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    /// Embedding dimension; `h - 1` is the maximum lag under investigation.
    pub h: usize,
    /// When `Some(q)` with `2 <= q <= h`, embedded points are the pairs
    /// `(X_i, X_{i+q-1})` while `n = N - h + 1` stays that of the full
    /// embedding.
    pub pair_lag: Option<usize>,
}

impl EmbeddingConfig {
    pub fn full(h: usize) -> Self {
        EmbeddingConfig { h, pair_lag: None }
    }

    pub fn pair(h: usize, q: usize) -> Self {
        EmbeddingConfig { h, pair_lag: Some(q) }
    }

    pub fn validate(&self, series_len: usize) -> Result<()> {
        if self.h < 1 || self.h > series_len {
            return Err(argument(format!(
                "embedding dimension h={} out of range for a series of length {}",
                self.h, series_len
            )));
        }
        if let Some(q) = self.pair_lag {
            if q < 2 || q > self.h {
                return Err(argument(format!(
                    "pair lag q={} must satisfy 2 <= q <= h={}",
                    q, self.h
                )));
            }
        }
        Ok(())
    }

    pub fn embedding(&self) -> Result<Embedding> {
        match self.pair_lag {
            None => Embedding::full(self.h),
            Some(q) => Embedding::pair(q),
        }
    }
}

/// Embeds the series into `n = N - h + 1` points.
pub fn embed(series: &Series, cfg: &EmbeddingConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate(series.len())?;
    let x = series.values();
    let n = x.len() - cfg.h + 1;
    let emb = cfg.embedding()?;
    Ok((0..n)
        .map(|i| emb.offsets().iter().map(|&o| x[i + o]).collect())
        .collect())
}

/// Segment marginal empirical d.f. `G_{k:l}(x)`, the literal count form.
///
/// `k` and `l` are zero-based inclusive indices of embedded points, so the
/// underlying observation window is `[k, l + h - 1]`.
pub fn marginal_edf(series: &Series, k: usize, l: usize, h: usize, x: f64) -> Result<f64> {
    let len = series.len();
    if h < 1 || h > len {
        return Err(argument(format!("h={h} out of range")));
    }
    let n = len - h + 1;
    if k > l || l >= n {
        return Err(argument(format!(
            "segment [{k}, {l}] out of range for n={n} embedded points"
        )));
    }
    let window = &series.values()[k..=l + h - 1];
    let count = window.iter().filter(|&&v| v <= x).count();
    Ok(count as f64 / window.len() as f64)
}

/// Segment empirical autocopula `C_{k:l}(u)` of the full `h`-dimensional
/// embedding, evaluated at `u` in `[0,1]^h`.
///
/// Returns 0 when `k > l` (the boundary convention used by the CUSUM
/// statistics). Ranks are tie-aware mid-ranks, which on tie-free data agree
/// exactly with the `<=` counts of [`marginal_edf`].
pub fn autocopula_eval(series: &Series, k: usize, l: usize, h: usize, u: &[f64]) -> Result<f64> {
    let len = series.len();
    if h < 1 || h > len {
        return Err(argument(format!("h={h} out of range")));
    }
    if u.len() != h {
        return Err(argument(format!(
            "evaluation point has {} coordinates, expected h={h}",
            u.len()
        )));
    }
    if u.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(argument("evaluation point must lie in [0,1]^h"));
    }
    if k > l {
        return Ok(0.0);
    }
    let n = len - h + 1;
    if l >= n {
        return Err(argument(format!(
            "segment [{k}, {l}] out of range for n={n} embedded points"
        )));
    }
    let window = &series.values()[k..=l + h - 1];
    let g = midrank_transform(window);
    let mut count = 0usize;
    for i in 0..=(l - k) {
        if (0..h).all(|j| g[i + j] <= u[j]) {
            count += 1;
        }
    }
    Ok(count as f64 / (l - k + 1) as f64)
}

/// Mid-rank numerator for a value with `less` strictly smaller and `eq` equal
/// elements in the window. Equals the `<=` count whenever `eq <= 1`.
#[inline]
pub(crate) fn midrank_num(less: u32, eq: u32) -> f64 {
    if eq > 0 {
        less as f64 + (eq as f64 + 1.0) * 0.5
    } else {
        less as f64
    }
}

/// Tie-aware rank transform of a window: `g[s] = midrank(X_s) / |window|`.
pub(crate) fn midrank_transform(window: &[f64]) -> Vec<f64> {
    let w = window.len();
    let mut idx: Vec<usize> = (0..w).collect();
    idx.sort_by(|&a, &b| window[a].partial_cmp(&window[b]).unwrap());
    let mut g = vec![0.0; w];
    let width = w as f64;
    let mut a = 0;
    while a < w {
        let mut b = a + 1;
        while b < w && window[idx[b]] == window[idx[a]] {
            b += 1;
        }
        // Divide rather than multiply by a reciprocal: rank values must
        // compare exactly against counts divided by other window widths.
        let value = midrank_num(a as u32, (b - a) as u32) / width;
        for &s in &idx[a..b] {
            g[s] = value;
        }
        a = b;
    }
    g
}

/// Rank-transformed embedded points on (0, 1]: the inputs of the copula
/// statistics. Row `i` holds the full-sample rank transform of the series
/// read at the embedding offsets `i + o_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    points: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PseudoSample {
    pub fn new(series: &Series, cfg: &EmbeddingConfig) -> Result<PseudoSample> {
        cfg.validate(series.len())?;
        let emb = cfg.embedding()?;
        let n = series.len() - cfg.h + 1;
        Ok(PseudoSample {
            points: pseudo_observations(series.values(), n, &emb),
            n,
            dim: emb.dim(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// Summed rank-autocorrelation magnitude above the sampling noise floor, a
/// scale-free measure of serial dependence used by the bandwidth selector.
pub fn rank_acf_excess(x: &[f64]) -> f64 {
    let len = x.len();
    if len < 8 {
        return 0.0;
    }
    let g = midrank_transform(x);
    let nf = len as f64;
    let mean = g.iter().sum::<f64>() / nf;
    let var0: f64 = g.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var0 == 0.0 {
        return 0.0;
    }
    let kmax = ((10.0 * nf.log10()).ceil() as usize).clamp(2, len - 2);
    let noise = 1.0 / nf.sqrt();
    let mut excess = 0.0;
    for k in 1..=kmax {
        let mut s = 0.0;
        for t in 0..len - k {
            s += (g[t] - mean) * (g[t + k] - mean);
        }
        let rho = s / var0;
        excess += (rho.abs() - noise).max(0.0);
    }
    excess
}

/// Pseudo-observations of the first `n` embedded points: the full-sample rank
/// transform of `x[0 .. n + span - 1]` read off at the embedding offsets.
/// Row-major `n x dim`.
pub(crate) fn pseudo_observations(x: &[f64], n: usize, emb: &Embedding) -> Vec<f64> {
    let span = emb.span();
    let d = emb.dim();
    let g = midrank_transform(&x[..n + span - 1]);
    let mut u = vec![0.0; n * d];
    for i in 0..n {
        for (j, &o) in emb.offsets().iter().enumerate() {
            u[i * d + j] = g[i + o];
        }
    }
    u
}
