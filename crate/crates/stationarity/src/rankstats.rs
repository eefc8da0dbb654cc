//! Rank-based CUSUM statistics and their dependent-multiplier bootstrap
//! replicates.
//!
//! Two families live here, both scanning every split point `k` of the sample:
//!
//! - the d.f. statistic (test `d`) and its multivariate analogue on embedded
//!   points (test `dh`), which compare empirical distribution functions of
//!   the two segments,
//! - the autocopula statistic (test `c`), which compares segment empirical
//!   autocopulas evaluated at the full-sample pseudo-observations.
//!
//! Replicates perturb centered indicator sums with multiplier sequences. For
//! the autocopula the perturbed process also carries the finite-difference
//! partial-derivative correction of the empirical copula; the correction
//! coefficients do not depend on the split point or the multiplier row, so
//! they are folded into one weight matrix and all replicates reduce to the
//! same prefix-sum sweep as the d.f. test.

use crate::empirical::{midrank_num, midrank_transform, pseudo_observations, Embedding};
use crate::error::{argument, Result};
use crate::multiplier::MultiplierSet;
use crate::series::Series;
use rayon::prelude::*;

/// max over k in {1..n-1} of (1/n) sum_i [ (A_k(i) - (k/n) A_n(i)) / sqrt(n) ]^2
/// where A_k(i) = sum_{t<=k} xi_t qc(t,i). Shared by every multiplier
/// replicate in this module.
pub(crate) fn multiplier_cusum_stat(qc: &[f64], n: usize, xi: &[f64]) -> f64 {
    debug_assert_eq!(qc.len(), n * n);
    debug_assert_eq!(xi.len(), n);
    let mut tot = vec![0.0; n];
    for (t, &w) in xi.iter().enumerate() {
        let row = &qc[t * n..(t + 1) * n];
        for (tv, rv) in tot.iter_mut().zip(row) {
            *tv += w * rv;
        }
    }
    let inv_n = 1.0 / n as f64;
    let mut acc = vec![0.0; n];
    let mut best = 0.0;
    for k in 1..n {
        let w = xi[k - 1];
        let row = &qc[(k - 1) * n..k * n];
        let lam = k as f64 * inv_n;
        let mut s = 0.0;
        for i in 0..n {
            acc[i] += w * row[i];
            let d = acc[i] - lam * tot[i];
            s += d * d;
        }
        if s > best {
            best = s;
        }
    }
    best * inv_n * inv_n
}

fn replicates_over(qc: &[f64], n: usize, mults: &MultiplierSet) -> Vec<f64> {
    mults
        .rows()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|xi| multiplier_cusum_stat(qc, n, xi))
        .collect()
}

// ---------------------------------------------------------------------------
// Empirical d.f. tests (d and dh)
// ---------------------------------------------------------------------------

/// Joint-indicator machinery for the d.f. CUSUM on embedded points.
/// With a single offset this is the plain test on `X_1..X_n`.
pub(crate) struct DfEngine {
    n: usize,
    /// `pd[t*n + i] = prod_j 1(x[t+o_j] <= x[i+o_j])`
    pd: Vec<f64>,
    /// centered weights for the multiplier sweep
    qc: Vec<f64>,
}

impl DfEngine {
    pub(crate) fn new(x: &[f64], n: usize, offsets: &[usize]) -> Self {
        let nn = n * n;
        let mut pd = vec![0.0; nn];
        for t in 0..n {
            let row = &mut pd[t * n..(t + 1) * n];
            for (i, rv) in row.iter_mut().enumerate() {
                let ok = offsets.iter().all(|&o| x[t + o] <= x[i + o]);
                *rv = if ok { 1.0 } else { 0.0 };
            }
        }
        let inv_n = 1.0 / n as f64;
        let mut fbar = vec![0.0; n];
        for t in 0..n {
            let row = &pd[t * n..(t + 1) * n];
            for (fv, rv) in fbar.iter_mut().zip(row) {
                *fv += rv;
            }
        }
        for fv in &mut fbar {
            *fv *= inv_n;
        }
        let mut qc = vec![0.0; nn];
        for t in 0..n {
            let src = &pd[t * n..(t + 1) * n];
            let dst = &mut qc[t * n..(t + 1) * n];
            for i in 0..n {
                dst[i] = src[i] - fbar[i];
            }
        }
        DfEngine { n, pd, qc }
    }

    /// max over k of (1/n) sum_i [ sqrt(n) (k/n)((n-k)/n)
    ///                             (F_{1:k}(Y_i) - F_{k+1:n}(Y_i)) ]^2
    pub(crate) fn statistic(&self) -> f64 {
        let n = self.n;
        let nf = n as f64;
        let sqrt_n = nf.sqrt();
        let mut left = vec![0.0f64; n];
        let mut total = vec![0.0f64; n];
        for t in 0..n {
            let row = &self.pd[t * n..(t + 1) * n];
            for (tv, rv) in total.iter_mut().zip(row) {
                *tv += rv;
            }
        }
        let mut best = 0.0;
        for k in 1..n {
            let row = &self.pd[(k - 1) * n..k * n];
            let lam = k as f64 / nf;
            let weight = sqrt_n * lam * ((n - k) as f64 / nf);
            let (wl, wr) = (k as f64, (n - k) as f64);
            let mut s = 0.0;
            for i in 0..n {
                left[i] += row[i];
                let d = weight * (left[i] / wl - (total[i] - left[i]) / wr);
                s += d * d;
            }
            let s = s / nf;
            if s > best {
                best = s;
            }
        }
        best
    }

    pub(crate) fn replicates(&self, mults: &MultiplierSet) -> Vec<f64> {
        replicates_over(&self.qc, self.n, mults)
    }
}

/// CUSUM statistic comparing the empirical d.f.s of `X_1..X_k` and
/// `X_{k+1}..X_n` over every split, integrated against the full-sample
/// empirical measure. Uses only the first `n` observations.
pub fn stat_df(series: &Series, n: usize) -> Result<f64> {
    check_df_args(series, n)?;
    Ok(DfEngine::new(&series.values()[..n], n, &[0]).statistic())
}

/// Multiplier bootstrap replicates of [`stat_df`].
pub fn replicate_df(series: &Series, n: usize, mults: &MultiplierSet) -> Result<Vec<f64>> {
    check_df_args(series, n)?;
    check_columns(n, mults)?;
    Ok(DfEngine::new(&series.values()[..n], n, &[0]).replicates(mults))
}

/// The `dh` comparison baseline: the same CUSUM recipe applied to the
/// `h`-dimensional empirical d.f.s of the embedded points.
pub fn stat_embedded_df(series: &Series, h: usize) -> Result<f64> {
    let n = check_serial_args(series, h)?;
    let offsets: Vec<usize> = (0..h).collect();
    Ok(DfEngine::new(series.values(), n, &offsets).statistic())
}

/// Multiplier replicates of [`stat_embedded_df`], replicating coordinatewise
/// on the joint indicator products.
pub fn replicate_embedded_df(
    series: &Series,
    h: usize,
    mults: &MultiplierSet,
) -> Result<Vec<f64>> {
    let n = check_serial_args(series, h)?;
    check_columns(n, mults)?;
    let offsets: Vec<usize> = (0..h).collect();
    Ok(DfEngine::new(series.values(), n, &offsets).replicates(mults))
}

// ---------------------------------------------------------------------------
// Autocopula test (c)
// ---------------------------------------------------------------------------

/// Full-sample quantities of the autocopula test for one embedding.
pub(crate) struct CopulaEngine {
    n: usize,
    d: usize,
    offsets: Vec<usize>,
    span: usize,
    /// the observation window backing the statistic, length n + span - 1
    window: Vec<f64>,
    /// pseudo-observations, n x d row-major
    u: Vec<f64>,
    /// folded centered multiplier weights, n x n row-major by t
    qc: Vec<f64>,
    /// finite-difference partial derivative estimates at the u_i, n x d
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) cdot: Vec<f64>,
}

impl CopulaEngine {
    /// `x` must hold at least `n + span - 1` values.
    pub(crate) fn new(x: &[f64], n: usize, emb: &Embedding) -> Self {
        let offsets = emb.offsets().to_vec();
        let span = emb.span();
        let d = offsets.len();
        let w = n + span - 1;
        let g = midrank_transform(&x[..w]);
        let u = pseudo_observations(x, n, emb);

        // C_{1:n} evaluated at an arbitrary point, using the full-sample
        // rank transform.
        let copula_at = |v: &[f64]| -> f64 {
            let mut count = 0usize;
            'points: for t in 0..n {
                for (j, &o) in offsets.iter().enumerate() {
                    if g[t + o] > v[j] {
                        continue 'points;
                    }
                }
                count += 1;
            }
            count as f64 / n as f64
        };

        // Finite-difference estimator of the partial derivatives, clamped to
        // [0, 1] (copula partial derivatives live there).
        let delta = (1.0 / (n as f64).sqrt()).min(0.5);
        let mut cdot = vec![0.0; n * d];
        let mut point = vec![0.0; d];
        for i in 0..n {
            for j in 0..d {
                point.copy_from_slice(&u[i * d..(i + 1) * d]);
                let uj = point[j];
                point[j] = uj + delta;
                let hi = copula_at(&point);
                point[j] = uj - delta;
                let lo = copula_at(&point);
                let denom = (uj + delta).min(1.0) - (uj - delta).max(0.0);
                cdot[i * d + j] = ((hi - lo) / denom).clamp(0.0, 1.0);
            }
        }

        // Fold the derivative correction into a single weight per (t, i):
        //   Q(t,i) = P(t,i) - sum_j cdot(i,j) P_j(t,i),
        // then center over t. P is the joint pseudo-observation indicator
        // and P_j the single-coordinate one.
        let mut qc = vec![0.0; n * n];
        let mut qbar = vec![0.0; n];
        for t in 0..n {
            let row = &mut qc[t * n..(t + 1) * n];
            for i in 0..n {
                let mut joint = 1.0;
                let mut corr = 0.0;
                for (j, &o) in offsets.iter().enumerate() {
                    let ind = if g[t + o] <= u[i * d + j] { 1.0 } else { 0.0 };
                    joint *= ind;
                    corr += cdot[i * d + j] * ind;
                }
                let q = joint - corr;
                row[i] = q;
                qbar[i] += q;
            }
        }
        let inv_n = 1.0 / n as f64;
        for qb in &mut qbar {
            *qb *= inv_n;
        }
        for t in 0..n {
            let row = &mut qc[t * n..(t + 1) * n];
            for i in 0..n {
                row[i] -= qbar[i];
            }
        }

        CopulaEngine {
            n,
            d,
            offsets,
            span,
            window: x[..w].to_vec(),
            u,
            qc,
            cdot,
        }
    }

    /// max over k of (1/n) sum_i [ sqrt(n) (k/n)((n-k)/n)
    ///                        (C_{1:k}(u_i) - C_{k+1:n}(u_i)) ]^2
    /// with segment ranks recomputed on each side of the split.
    pub(crate) fn statistic(&self) -> f64 {
        let (n, span) = (self.n, self.span);
        let w = n + span - 1;
        let nf = n as f64;
        let sqrt_n = nf.sqrt();
        let x = &self.window;

        // Rank counters for the two segment windows. The left window grows
        // one observation at a time, the right one shrinks; the right one
        // starts out holding everything.
        let mut less_l = vec![0u32; w];
        let mut eq_l = vec![0u32; w];
        let mut less_r = vec![0u32; w];
        let mut eq_r = vec![0u32; w];
        for s in 0..w {
            for t in 0..w {
                if x[t] < x[s] {
                    less_r[s] += 1;
                } else if x[t] == x[s] {
                    eq_r[s] += 1;
                }
            }
        }

        let mut gl = vec![0.0f64; w];
        let mut gr = vec![0.0f64; w];
        let mut cl = vec![0u32; n];
        let mut cr = vec![0u32; n];
        let mut best = 0.0;

        for k in 1..n {
            // Left window gains observations; at k = 1 it holds x[0..span].
            let (from, to) = if k == 1 { (0, span) } else { (k + span - 2, k + span - 1) };
            for new in from..to {
                let v = x[new];
                for s in 0..w {
                    if v < x[s] {
                        less_l[s] += 1;
                    } else if v == x[s] {
                        eq_l[s] += 1;
                    }
                }
            }
            // Right window loses x[k-1].
            {
                let v = x[k - 1];
                for s in 0..w {
                    if v < x[s] {
                        less_r[s] -= 1;
                    } else if v == x[s] {
                        eq_r[s] -= 1;
                    }
                }
            }

            let wl = (k + span - 1) as f64;
            let wr = (w - k) as f64;
            for s in 0..k + span - 1 {
                gl[s] = midrank_num(less_l[s], eq_l[s]) / wl;
            }
            for s in k..w {
                gr[s] = midrank_num(less_r[s], eq_r[s]) / wr;
            }

            cl.iter_mut().for_each(|c| *c = 0);
            cr.iter_mut().for_each(|c| *c = 0);
            self.accumulate_segment(&gl, 0, k, &mut cl);
            self.accumulate_segment(&gr, k, n, &mut cr);

            let lam = k as f64 / nf;
            let weight = sqrt_n * lam * ((n - k) as f64 / nf);
            let (kl, kr) = (k as f64, (n - k) as f64);
            let mut s = 0.0;
            for i in 0..n {
                let diff = weight * (cl[i] as f64 / kl - cr[i] as f64 / kr);
                s += diff * diff;
            }
            let s = s / nf;
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Adds, for every evaluation point i, the number of segment points t in
    /// [from, to) whose rank vector is coordinatewise below u_i.
    fn accumulate_segment(&self, gseg: &[f64], from: usize, to: usize, out: &mut [u32]) {
        let d = self.d;
        match self.offsets.as_slice() {
            &[o0, o1] => {
                for t in from..to {
                    let (g0, g1) = (gseg[t + o0], gseg[t + o1]);
                    for (i, o) in out.iter_mut().enumerate() {
                        let ok = (g0 <= self.u[i * 2]) & (g1 <= self.u[i * 2 + 1]);
                        *o += ok as u32;
                    }
                }
            }
            offsets => {
                let mut gvec = vec![0.0; d];
                for t in from..to {
                    for (j, &o) in offsets.iter().enumerate() {
                        gvec[j] = gseg[t + o];
                    }
                    for (i, o) in out.iter_mut().enumerate() {
                        let mut ok = true;
                        for j in 0..d {
                            ok &= gvec[j] <= self.u[i * d + j];
                        }
                        *o += ok as u32;
                    }
                }
            }
        }
    }

    pub(crate) fn replicates(&self, mults: &MultiplierSet) -> Vec<f64> {
        replicates_over(&self.qc, self.n, mults)
    }
}

/// Autocopula CUSUM statistic for the full `h`-dimensional embedding.
pub fn stat_autocopula(series: &Series, h: usize) -> Result<f64> {
    let n = check_serial_args(series, h)?;
    let emb = Embedding::full(h)?;
    Ok(CopulaEngine::new(series.values(), n, &emb).statistic())
}

/// Multiplier replicates of [`stat_autocopula`].
pub fn replicate_autocopula(series: &Series, h: usize, mults: &MultiplierSet) -> Result<Vec<f64>> {
    let n = check_serial_args(series, h)?;
    check_columns(n, mults)?;
    let emb = Embedding::full(h)?;
    Ok(CopulaEngine::new(series.values(), n, &emb).replicates(mults))
}

/// Autocopula statistic of the pairs `(X_i, X_{i+q-1})`, sharing the sample
/// size `n = N - h + 1` of the full embedding so that all components of a
/// combined test see the same multiplier sequences.
pub fn stat_autocopula_pair(series: &Series, h: usize, q: usize) -> Result<f64> {
    let n = check_serial_args(series, h)?;
    let emb = pair_embedding(h, q)?;
    Ok(CopulaEngine::new(series.values(), n, &emb).statistic())
}

/// Multiplier replicates of [`stat_autocopula_pair`].
pub fn replicate_autocopula_pair(
    series: &Series,
    h: usize,
    q: usize,
    mults: &MultiplierSet,
) -> Result<Vec<f64>> {
    let n = check_serial_args(series, h)?;
    check_columns(n, mults)?;
    let emb = pair_embedding(h, q)?;
    Ok(CopulaEngine::new(series.values(), n, &emb).replicates(mults))
}

fn pair_embedding(h: usize, q: usize) -> Result<Embedding> {
    if q < 2 || q > h {
        return Err(argument(format!("pair lag q={q} must satisfy 2 <= q <= h={h}")));
    }
    Embedding::pair(q)
}

fn check_df_args(series: &Series, n: usize) -> Result<()> {
    if n < 2 {
        return Err(argument("the d.f. statistic needs n >= 2"));
    }
    if n > series.len() {
        return Err(argument(format!(
            "n={n} exceeds the series length {}",
            series.len()
        )));
    }
    Ok(())
}

fn check_serial_args(series: &Series, h: usize) -> Result<usize> {
    if h < 2 {
        return Err(argument("serial statistics need h >= 2"));
    }
    if h > series.len() - 1 {
        return Err(argument(format!(
            "h={h} too large for a series of length {} (need n = N - h + 1 >= 2)",
            series.len()
        )));
    }
    Ok(series.len() - h + 1)
}

fn check_columns(n: usize, mults: &MultiplierSet) -> Result<()> {
    if mults.len_n() != n {
        return Err(argument(format!(
            "multiplier sequences have {} columns but the test needs {n}",
            mults.len_n()
        )));
    }
    Ok(())
}
