//! Independent brute-force reference implementations.
//!
//! Everything here is written straight from the defining formulas with plain
//! loops and no shared code with the library: segment ranks are recounted
//! from scratch, U-statistics are double sums, p-values are quadratic
//! counts. Deliberately slow.

/// `G_{k:l}` style count EDF over the window `[w0, w1]` (inclusive).
fn edf(x: &[f64], w0: usize, w1: usize, v: f64) -> f64 {
    let mut c = 0usize;
    for s in w0..=w1 {
        if x[s] <= v {
            c += 1;
        }
    }
    c as f64 / (w1 - w0 + 1) as f64
}

/// d.f. CUSUM statistic on `x[0..n]`.
pub fn stat_df(x: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let mut best = 0.0f64;
    for k in 1..n {
        let w = nf.sqrt() * (k as f64 / nf) * ((n - k) as f64 / nf);
        let mut s = 0.0;
        for i in 0..n {
            let d = w * (edf(x, 0, k - 1, x[i]) - edf(x, k, n - 1, x[i]));
            s += d * d;
        }
        if s / nf > best {
            best = s / nf;
        }
    }
    best
}

/// Multiplier replicate of the d.f. CUSUM for one row of multipliers.
pub fn replicate_df(x: &[f64], n: usize, xi: &[f64]) -> f64 {
    let nf = n as f64;
    let ghat = |k: usize, v: f64| -> f64 {
        let gf = edf(x, 0, n - 1, v);
        let mut s = 0.0;
        for t in 0..k {
            s += xi[t] * (if x[t] <= v { 1.0 } else { 0.0 } - gf);
        }
        s / nf.sqrt()
    };
    let mut best = 0.0f64;
    for k in 1..n {
        let lam = k as f64 / nf;
        let mut s = 0.0;
        for i in 0..n {
            let e = ghat(k, x[i]) - lam * ghat(n, x[i]);
            s += e * e;
        }
        if s / nf > best {
            best = s / nf;
        }
    }
    best
}

/// Autocopula CUSUM statistic on `x[0 .. n+h-1]` with segment ranks
/// recomputed from scratch on each side of each split.
pub fn stat_autocopula(x: &[f64], h: usize) -> f64 {
    let n = x.len() - h + 1;
    let nf = n as f64;
    let w = n + h - 1;
    let seg_cop = |from: usize, to: usize, ui: &[f64]| -> f64 {
        let (w0, w1) = (from, to - 1 + h - 1);
        let mut count = 0usize;
        for t in from..to {
            if (0..h).all(|j| edf(x, w0, w1, x[t + j]) <= ui[j]) {
                count += 1;
            }
        }
        count as f64 / (to - from) as f64
    };
    let mut best = 0.0f64;
    for k in 1..n {
        let weight = nf.sqrt() * (k as f64 / nf) * ((n - k) as f64 / nf);
        let mut s = 0.0;
        for i in 0..n {
            let ui: Vec<f64> = (0..h).map(|j| edf(x, 0, w - 1, x[i + j])).collect();
            let d = weight * (seg_cop(0, k, &ui) - seg_cop(k, n, &ui));
            s += d * d;
        }
        if s / nf > best {
            best = s / nf;
        }
    }
    best
}

/// Multiplier replicate of the autocopula CUSUM, evaluated pointwise with
/// the finite-difference partial derivative correction.
pub fn replicate_autocopula(x: &[f64], h: usize, xi: &[f64]) -> f64 {
    let n = x.len() - h + 1;
    let nf = n as f64;
    let w = n + h - 1;
    let gfull = |s: usize| edf(x, 0, w - 1, x[s]);
    let copula = |v: &[f64]| -> f64 {
        let mut c = 0usize;
        for t in 0..n {
            if (0..h).all(|j| gfull(t + j) <= v[j]) {
                c += 1;
            }
        }
        c as f64 / nf
    };
    let bhat = |k: usize, v: &[f64]| -> f64 {
        let cv = copula(v);
        let mut s = 0.0;
        for t in 0..k {
            let ind = if (0..h).all(|j| gfull(t + j) <= v[j]) { 1.0 } else { 0.0 };
            s += xi[t] * (ind - cv);
        }
        s / nf.sqrt()
    };
    let delta = (1.0 / nf.sqrt()).min(0.5);
    let chat = |k: usize, ui: &[f64]| -> f64 {
        let mut value = bhat(k, ui);
        for j in 0..h {
            let mut hi = ui.to_vec();
            let mut lo = ui.to_vec();
            hi[j] += delta;
            lo[j] -= delta;
            let denom = (ui[j] + delta).min(1.0) - (ui[j] - delta).max(0.0);
            let cdot = ((copula(&hi) - copula(&lo)) / denom).clamp(0.0, 1.0);
            let mut ej = vec![1.0; h];
            ej[j] = ui[j];
            value -= cdot * bhat(k, &ej);
        }
        value
    };
    let mut best = 0.0f64;
    for k in 1..n {
        let lam = k as f64 / nf;
        let mut s = 0.0;
        for i in 0..n {
            let ui: Vec<f64> = (0..h).map(|j| gfull(i + j)).collect();
            let d = chat(k, &ui) - lam * chat(n, &ui);
            s += d * d;
        }
        if s / nf > best {
            best = s / nf;
        }
    }
    best
}

#[derive(Clone, Copy)]
pub enum OracleKernel {
    Mean,
    Variance,
    Autocov { lag: usize },
}

impl OracleKernel {
    pub fn q(&self) -> usize {
        match self {
            OracleKernel::Mean | OracleKernel::Variance => 1,
            OracleKernel::Autocov { lag } => lag + 1,
        }
    }

    fn eval(&self, zi: (f64, f64), zj: (f64, f64)) -> f64 {
        match self {
            OracleKernel::Mean => (zi.0 + zj.0) / 2.0,
            OracleKernel::Variance => (zi.0 - zj.0) * (zi.0 - zj.0) / 2.0,
            OracleKernel::Autocov { .. } => (zi.0 - zj.0) * (zi.1 - zj.1) / 2.0,
        }
    }
}

fn embed(x: &[f64], n: usize, kernel: OracleKernel) -> Vec<(f64, f64)> {
    let q = kernel.q();
    (0..n).map(|i| (x[i], x[i + q - 1])).collect()
}

/// Direct double-sum segment U-statistic over embedded points `[k, l]`.
pub fn ustat(x: &[f64], n: usize, k: usize, l: usize, kernel: OracleKernel) -> f64 {
    let z = embed(x, n, kernel);
    let mut s = 0.0;
    let len = l - k + 1;
    for i in k..=l {
        for j in i + 1..=l {
            s += kernel.eval(z[i], z[j]);
        }
    }
    s / (len * (len - 1) / 2) as f64
}

/// Second-order CUSUM statistic built from the double-sum U-statistics.
pub fn stat_u(x: &[f64], n: usize, kernel: OracleKernel) -> f64 {
    let nf = n as f64;
    let mut best = 0.0f64;
    for k in 2..=n - 2 {
        let weight = nf.sqrt() * (k as f64 / nf) * ((n - k) as f64 / nf);
        let value =
            (weight * (ustat(x, n, 0, k - 1, kernel) - ustat(x, n, k, n - 1, kernel))).abs();
        if value > best {
            best = value;
        }
    }
    best
}

/// Multiplier replicate of the second-order CUSUM for one multiplier row.
pub fn replicate_u(x: &[f64], n: usize, kernel: OracleKernel, xi: &[f64]) -> f64 {
    let nf = n as f64;
    let z = embed(x, n, kernel);
    let u_full = ustat(x, n, 0, n - 1, kernel);
    let phi1: Vec<f64> = (0..n)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    s += kernel.eval(z[i], z[j]);
                }
            }
            s / (nf - 1.0) - u_full
        })
        .collect();
    let total: f64 = (0..n).map(|i| xi[i] * phi1[i]).sum();
    let mut best = 0.0f64;
    for k in 2..=n - 2 {
        let partial: f64 = (0..k).map(|i| xi[i] * phi1[i]).sum();
        let v = (2.0 / nf.sqrt()) * partial - (k as f64 / nf) * (2.0 / nf.sqrt()) * total;
        if v.abs() > best {
            best = v.abs();
        }
    }
    best
}

/// Quadratic-count p-value matrix: rows 0..=M, row 0 is the observed vector.
pub fn component_pvalues(stats: &[f64], replicates: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r = stats.len();
    let m = replicates[0].len();
    let denom = (m + 1) as f64;
    let mut rows = vec![vec![0.0; r]; m + 1];
    for j in 0..r {
        let count_ge = |x: f64| replicates[j].iter().filter(|&&v| v >= x).count();
        rows[0][j] = (0.5 + count_ge(stats[j]) as f64) / denom;
        for i in 0..m {
            rows[i + 1][j] = (0.5 + count_ge(replicates[j][i]) as f64) / denom;
        }
    }
    rows
}

/// The five combination steps with the weighted Fisher rule, written out.
pub fn combine_fisher(stats: &[f64], replicates: &[Vec<f64>], weights: &[f64]) -> (f64, f64) {
    let rows = component_pvalues(stats, replicates);
    let m = replicates[0].len();
    let psi = |p: &[f64]| -> f64 {
        let mut s = 0.0;
        for (j, &pj) in p.iter().enumerate() {
            s += weights[j] * pj.ln();
        }
        -2.0 * s
    };
    let w0 = psi(&rows[0]);
    let mut count = 0usize;
    for row in rows.iter().skip(1) {
        if psi(row) >= w0 {
            count += 1;
        }
    }
    (w0, count as f64 / m as f64)
}
