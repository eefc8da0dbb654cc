//! Seeded generators for the null and alternative models of the Monte Carlo
//! study.
//!
//! Null models `N1`-`N10` are strictly stationary (i.i.d., ARMA, GARCH and
//! nonlinear autoregressions) and are simulated with a burn-in of 100
//! observations. Alternative models `A1`-`A12` are locally stationary or
//! change-point style; `D`, `S` and `DS` are the simple one-break models (a
//! change in the contemporary distribution, in the serial dependence, or in
//! both, always after `n/2` observations).
//!
//! Everything is a pure function of `(spec, seed)`.

use crate::error::{argument, Result};
use crate::series::Series;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal, StudentT};

const BURN_IN: usize = 100;

/// Innovation distribution, always standardized to unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Innovation {
    #[default]
    Normal,
    /// Student t with 4 degrees of freedom, rescaled by sqrt(1/2).
    StandardizedT4,
}

impl Innovation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Innovation::Normal),
            "t4" => Ok(Innovation::StandardizedT4),
            other => Err(argument(format!(
                "unknown innovation '{other}' (expected 'normal' or 't4')"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Innovation::Normal => "normal",
            Innovation::StandardizedT4 => "t4",
        }
    }
}

struct InnovationSampler {
    t4: Option<StudentT<f64>>,
}

impl InnovationSampler {
    fn new(kind: Innovation) -> Self {
        InnovationSampler {
            t4: match kind {
                Innovation::Normal => None,
                Innovation::StandardizedT4 => Some(StudentT::new(4.0).unwrap()),
            },
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match &self.t4 {
            None => StandardNormal.sample(rng),
            Some(t) => t.sample(rng) * std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

/// Data generating model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// i.i.d. draws from the innovation distribution.
    N1,
    /// AR(1) with parameter 0.9.
    N2,
    /// AR(1) with parameter -0.9.
    N3,
    /// MA(1) with parameter 0.8.
    N4,
    /// MA(1) with parameter -0.8.
    N5,
    /// ARMA(1,2): AR -0.4, MA (-0.8, 0.4).
    N6,
    /// AR(2) with parameters (1.385929, -0.9604), near unit root.
    N7,
    /// GARCH(1,1) with (omega, beta, alpha) = (0.012, 0.919, 0.072).
    N8,
    /// Exponential autoregression.
    N9,
    /// Nonlinear autoregression X_t = 0.6 sin(X_{t-1}) + e_t.
    N10,
    /// Time-varying MA coefficient.
    A1,
    /// Time-varying AR coefficient 0.6 sin(4 pi t / n).
    A2,
    /// AR parameter +0.5 / -0.5 / +0.5 over quarters.
    A3,
    /// Short variance burst of length n/64 after n/2.
    A4,
    /// AR parameter evolving linearly from 0.9 to -0.9.
    A5,
    /// LSW Haar process, scale-1 quadratic spectrum.
    A6,
    /// LSW Haar process, scales 1 and 2.
    A7,
    /// LSW Haar process, scales 1, 3 and 4.
    A8,
    /// i.i.d. then AR(1) with the given parameter.
    A9 { beta: f64 },
    /// i.i.d. then AR(2) with parameters (0, beta).
    A10 { beta: f64 },
    /// i.i.d. N(0,1) then AR(1) with innovation variance 1 - beta^2.
    A11 { beta: f64 },
    /// i.i.d. standard Frechet then max-autoregression.
    A12 { beta: f64 },
    /// Change in the contemporary distribution only: N(0, sigma^2) then N(0,1).
    D { sigma: f64 },
    /// Change in the serial dependence only; the contemporary distribution
    /// stays standard normal.
    S { beta: f64 },
    /// Change in both.
    Ds { sigma: f64, beta: f64 },
}

impl Model {
    /// Parses identifiers like `N1`, `A9(0.8)`, `D(3)`, `S(0.9)`, `DS(4,0.7)`.
    pub fn parse(text: &str) -> Result<Model> {
        let text = text.trim();
        let (head, args) = match text.find('(') {
            None => (text, Vec::new()),
            Some(pos) => {
                let inner = text[pos + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| argument(format!("unbalanced parentheses in model '{text}'")))?;
                let vals = inner
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| argument(format!("bad model parameter '{p}' in '{text}'")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (&text[..pos], vals)
            }
        };
        Model::from_parts(head, &args)
    }

    /// Builds a model from a family name and a parameter list.
    pub fn from_parts(head: &str, args: &[f64]) -> Result<Model> {
        let fixed = |m: Model| {
            if args.is_empty() {
                Ok(m)
            } else {
                Err(argument(format!("model {head} takes no parameters")))
            }
        };
        let one = |f: &dyn Fn(f64) -> Model| match args {
            [a] => Ok(f(*a)),
            _ => Err(argument(format!("model {head} takes exactly one parameter"))),
        };
        let model = match head {
            "N1" => fixed(Model::N1)?,
            "N2" => fixed(Model::N2)?,
            "N3" => fixed(Model::N3)?,
            "N4" => fixed(Model::N4)?,
            "N5" => fixed(Model::N5)?,
            "N6" => fixed(Model::N6)?,
            "N7" => fixed(Model::N7)?,
            "N8" => fixed(Model::N8)?,
            "N9" => fixed(Model::N9)?,
            "N10" => fixed(Model::N10)?,
            "A1" => fixed(Model::A1)?,
            "A2" => fixed(Model::A2)?,
            "A3" => fixed(Model::A3)?,
            "A4" => fixed(Model::A4)?,
            "A5" => fixed(Model::A5)?,
            "A6" => fixed(Model::A6)?,
            "A7" => fixed(Model::A7)?,
            "A8" => fixed(Model::A8)?,
            "A9" => one(&|beta| Model::A9 { beta })?,
            "A10" => one(&|beta| Model::A10 { beta })?,
            "A11" => one(&|beta| Model::A11 { beta })?,
            "A12" => one(&|beta| Model::A12 { beta })?,
            "D" => one(&|sigma| Model::D { sigma })?,
            "S" => one(&|beta| Model::S { beta })?,
            "DS" => match args {
                [sigma, beta] => Model::Ds {
                    sigma: *sigma,
                    beta: *beta,
                },
                _ => return Err(argument("model DS takes two parameters: DS(sigma,beta)")),
            },
            other => return Err(argument(format!("unknown model '{other}'"))),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let ar_ok = |beta: f64| {
            if beta.abs() < 1.0 {
                Ok(())
            } else {
                Err(argument(format!("AR parameter {beta} must satisfy |beta| < 1")))
            }
        };
        match *self {
            Model::A9 { beta } | Model::A10 { beta } | Model::A11 { beta } | Model::S { beta } => {
                ar_ok(beta)
            }
            Model::A12 { beta } => {
                if (0.0..1.0).contains(&beta) {
                    Ok(())
                } else {
                    Err(argument("max-AR parameter must lie in [0, 1)"))
                }
            }
            Model::D { sigma } => {
                if sigma > 0.0 {
                    Ok(())
                } else {
                    Err(argument("sigma must be positive"))
                }
            }
            Model::Ds { sigma, beta } => {
                if sigma <= 0.0 {
                    return Err(argument("sigma must be positive"));
                }
                ar_ok(beta)
            }
            _ => Ok(()),
        }
    }

    /// Family name without parameters, e.g. `DS` for `DS(4,0.7)`.
    pub fn family(&self) -> &'static str {
        match self {
            Model::N1 => "N1",
            Model::N2 => "N2",
            Model::N3 => "N3",
            Model::N4 => "N4",
            Model::N5 => "N5",
            Model::N6 => "N6",
            Model::N7 => "N7",
            Model::N8 => "N8",
            Model::N9 => "N9",
            Model::N10 => "N10",
            Model::A1 => "A1",
            Model::A2 => "A2",
            Model::A3 => "A3",
            Model::A4 => "A4",
            Model::A5 => "A5",
            Model::A6 => "A6",
            Model::A7 => "A7",
            Model::A8 => "A8",
            Model::A9 { .. } => "A9",
            Model::A10 { .. } => "A10",
            Model::A11 { .. } => "A11",
            Model::A12 { .. } => "A12",
            Model::D { .. } => "D",
            Model::S { .. } => "S",
            Model::Ds { .. } => "DS",
        }
    }

    /// Comma-joined parameter list, empty for parameterless models.
    pub fn params_string(&self) -> String {
        match *self {
            Model::A9 { beta }
            | Model::A10 { beta }
            | Model::A11 { beta }
            | Model::A12 { beta }
            | Model::S { beta } => format!("{beta}"),
            Model::D { sigma } => format!("{sigma}"),
            Model::Ds { sigma, beta } => format!("{sigma},{beta}"),
            _ => String::new(),
        }
    }

    pub fn id_string(&self) -> String {
        let params = self.params_string();
        if params.is_empty() {
            self.family().to_string()
        } else {
            format!("{}({})", self.family(), params)
        }
    }

    /// Index after which the regime switches, for the one-break models.
    pub fn break_index(&self, n: usize) -> Option<usize> {
        match self {
            Model::A9 { .. }
            | Model::A10 { .. }
            | Model::A11 { .. }
            | Model::A12 { .. }
            | Model::D { .. }
            | Model::S { .. }
            | Model::Ds { .. } => Some(n / 2),
            _ => None,
        }
    }
}

/// A fully specified generation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub innovation: Innovation,
    pub n: usize,
    pub seed: u64,
}

/// Simulates one series. Deterministic given the spec.
pub fn generate(spec: &GeneratorSpec) -> Result<Series> {
    let n = spec.n;
    if n < 4 {
        return Err(argument("series length must be at least 4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let innov = InnovationSampler::new(spec.innovation);
    let split = n / 2;

    let values: Vec<f64> = match spec.model {
        Model::N1 => {
            let mut x: Vec<f64> = (0..n + BURN_IN).map(|_| innov.sample(&mut rng)).collect();
            x.split_off(BURN_IN)
        }
        Model::N2 => ar1(n, 0.9, &mut rng, &innov),
        Model::N3 => ar1(n, -0.9, &mut rng, &innov),
        Model::N4 => ma(n, &[0.8], &mut rng, &innov),
        Model::N5 => ma(n, &[-0.8], &mut rng, &innov),
        Model::N6 => {
            // X_t = -0.4 X_{t-1} + e_t - 0.8 e_{t-1} + 0.4 e_{t-2}
            let total = n + BURN_IN;
            let eps: Vec<f64> = (0..total + 2).map(|_| innov.sample(&mut rng)).collect();
            let mut x = vec![0.0; total];
            for t in 0..total {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                x[t] = -0.4 * prev + eps[t + 2] - 0.8 * eps[t + 1] + 0.4 * eps[t];
            }
            x.split_off(BURN_IN)
        }
        Model::N7 => {
            let total = n + BURN_IN;
            let mut x = vec![0.0; total];
            for t in 0..total {
                let x1 = if t >= 1 { x[t - 1] } else { 0.0 };
                let x2 = if t >= 2 { x[t - 2] } else { 0.0 };
                x[t] = 1.385929 * x1 - 0.9604 * x2 + innov.sample(&mut rng);
            }
            x.split_off(BURN_IN)
        }
        Model::N8 => {
            let (omega, beta, alpha) = (0.012f64, 0.919, 0.072);
            let total = n + BURN_IN;
            let mut sigma2 = omega / (1.0 - alpha - beta);
            let mut x = Vec::with_capacity(total);
            for _ in 0..total {
                let value = sigma2.sqrt() * innov.sample(&mut rng);
                x.push(value);
                sigma2 = omega + beta * sigma2 + alpha * value * value;
            }
            x.split_off(BURN_IN)
        }
        Model::N9 => {
            let total = n + BURN_IN;
            let mut x = vec![0.0f64; total];
            for t in 0..total {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                x[t] = (0.8 - 1.1 * (-50.0 * prev * prev).exp()) * prev
                    + 0.1 * innov.sample(&mut rng);
            }
            x.split_off(BURN_IN)
        }
        Model::N10 => {
            let total = n + BURN_IN;
            let mut x = vec![0.0f64; total];
            for t in 0..total {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                x[t] = 0.6 * prev.sin() + innov.sample(&mut rng);
            }
            x.split_off(BURN_IN)
        }
        Model::A1 => {
            // X_t = 1.1 cos(1.5 - cos(4 pi t / n)) e_{t-1} + e_t, X dependent on
            // e_0..e_n; the convention X_{0,n} = 0 is irrelevant here.
            let eps: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
            (1..=n)
                .map(|t| {
                    let z = 4.0 * std::f64::consts::PI * t as f64 / n as f64;
                    1.1 * (1.5 - z.cos()).cos() * eps[t - 1] + eps[t]
                })
                .collect()
        }
        Model::A2 => tv_ar(n, &mut rng, |t, nf| {
            0.6 * (4.0 * std::f64::consts::PI * t / nf).sin()
        }),
        Model::A3 => tv_ar(n, &mut rng, |t, nf| {
            let t = t as usize;
            let n = nf as usize;
            if t <= n / 4 || t > 3 * n / 4 {
                0.5
            } else {
                -0.5
            }
        }),
        Model::A4 => {
            let eps: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut x = vec![0.0; n + 1];
            for t in 1..=n {
                let burst = t > n / 2 && t <= n / 2 + n / 64;
                x[t] = if burst {
                    4.0 * eps[t]
                } else {
                    -0.5 * x[t - 1] + eps[t]
                };
            }
            x.split_off(1)
        }
        Model::A5 => tv_ar(n, &mut rng, |t, nf| 0.9 - 1.8 * (t - 1.0) / (nf - 1.0)),
        Model::A6 => lsw_haar(n, &[(1, LswSpectrum::QuadBump)], &mut rng)?,
        Model::A7 => lsw_haar(
            n,
            &[(1, LswSpectrum::QuadBump), (2, LswSpectrum::QuadBumpShifted)],
            &mut rng,
        )?,
        Model::A8 => lsw_haar(
            n,
            &[
                (1, LswSpectrum::GaussBump),
                (3, LswSpectrum::GaussBumpLeft),
                (4, LswSpectrum::GaussBumpRight),
            ],
            &mut rng,
        )?,
        Model::A9 { beta } => {
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                x.push(innov.sample(&mut rng));
            }
            for t in split..n {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                x.push(beta * prev + innov.sample(&mut rng));
            }
            x
        }
        Model::A10 { beta } => {
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                x.push(innov.sample(&mut rng));
            }
            for t in split..n {
                let prev2 = if t >= 2 { x[t - 2] } else { 0.0 };
                x.push(beta * prev2 + innov.sample(&mut rng));
            }
            x
        }
        Model::A11 { beta } | Model::S { beta } => {
            let scale = (1.0 - beta * beta).sqrt();
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                x.push(StandardNormal.sample(&mut rng));
            }
            for t in split..n {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                let e: f64 = StandardNormal.sample(&mut rng);
                x.push(beta * prev + scale * e);
            }
            x
        }
        Model::A12 { beta } => {
            let frechet = |rng: &mut ChaCha8Rng| -> f64 {
                let u: f64 = Open01.sample(rng);
                -1.0 / u.ln()
            };
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                x.push(frechet(&mut rng));
            }
            for t in split..n {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                x.push((beta * prev).max((1.0 - beta) * frechet(&mut rng)));
            }
            x
        }
        Model::D { sigma } => {
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                let e: f64 = StandardNormal.sample(&mut rng);
                x.push(sigma * e);
            }
            for _ in split..n {
                x.push(StandardNormal.sample(&mut rng));
            }
            x
        }
        Model::Ds { sigma, beta } => {
            let mut x = Vec::with_capacity(n);
            for _ in 0..split {
                let e: f64 = StandardNormal.sample(&mut rng);
                x.push(sigma * e);
            }
            for t in split..n {
                let prev = if t == 0 { 0.0 } else { x[t - 1] };
                let e: f64 = StandardNormal.sample(&mut rng);
                x.push(beta * prev + e);
            }
            x
        }
    };
    Series::with_name(values, spec.model.id_string())
}

fn ar1(n: usize, phi: f64, rng: &mut ChaCha8Rng, innov: &InnovationSampler) -> Vec<f64> {
    let total = n + BURN_IN;
    let mut x = Vec::with_capacity(total);
    let mut prev = 0.0;
    for _ in 0..total {
        prev = phi * prev + innov.sample(rng);
        x.push(prev);
    }
    x.split_off(BURN_IN)
}

fn ma(n: usize, theta: &[f64], rng: &mut ChaCha8Rng, innov: &InnovationSampler) -> Vec<f64> {
    let q = theta.len();
    let total = n + BURN_IN;
    let eps: Vec<f64> = (0..total + q).map(|_| innov.sample(rng)).collect();
    let mut x = Vec::with_capacity(total);
    for t in 0..total {
        let mut v = eps[t + q];
        for (lag, th) in theta.iter().enumerate() {
            v += th * eps[t + q - 1 - lag];
        }
        x.push(v);
    }
    x.split_off(BURN_IN)
}

/// Time-varying AR(1) with standard normal innovations and X_{0,n} = 0;
/// the coefficient is a function of (t, n) with t running from 1 to n.
fn tv_ar(n: usize, rng: &mut ChaCha8Rng, coeff: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut x = vec![0.0; n + 1];
    for t in 1..=n {
        let e: f64 = StandardNormal.sample(rng);
        x[t] = coeff(t as f64, n as f64) * x[t - 1] + e;
    }
    x.split_off(1)
}

/// Time-varying spectra of the locally stationary wavelet models.
#[derive(Debug, Clone, Copy)]
pub(crate) enum LswSpectrum {
    /// 1/4 - (z - 1/2)^2
    QuadBump,
    /// The same, shifted by 1/2 with periodic wrap.
    QuadBumpShifted,
    /// exp(-4 (z - 1/2)^2)
    GaussBump,
    /// Shifted by -1/4 (periodic).
    GaussBumpLeft,
    /// Shifted by +1/4 (periodic).
    GaussBumpRight,
    /// Constant level, used by tests.
    #[allow(dead_code)]
    Const(f64),
}

impl LswSpectrum {
    fn eval(&self, z: f64) -> f64 {
        let wrap = |v: f64| v - v.floor();
        match *self {
            LswSpectrum::QuadBump => 0.25 - (z - 0.5) * (z - 0.5),
            LswSpectrum::QuadBumpShifted => LswSpectrum::QuadBump.eval(wrap(z + 0.5)),
            LswSpectrum::GaussBump => (-4.0 * (z - 0.5) * (z - 0.5)).exp(),
            LswSpectrum::GaussBumpLeft => LswSpectrum::GaussBump.eval(wrap(z - 0.25)),
            LswSpectrum::GaussBumpRight => LswSpectrum::GaussBump.eval(wrap(z + 0.25)),
            LswSpectrum::Const(c) => c,
        }
    }
}

/// Locally stationary wavelet process built from non-decimated discrete Haar
/// wavelets with unit l2 norm per scale:
///
/// ```text
/// X_t = sum_j sum_k sqrt(S_j(k/n)) psi_{j, t-k} xi_{j,k}
/// ```
///
/// with i.i.d. standard normal `xi` and periodic boundaries. `n` must be a
/// power of two >= 64.
pub(crate) fn lsw_haar(
    n: usize,
    scales: &[(usize, LswSpectrum)],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    if !n.is_power_of_two() || n < 64 {
        return Err(argument(format!(
            "LSW models need n to be a power of two >= 64, got {n}"
        )));
    }
    let mut x = vec![0.0; n];
    for &(j, spec) in scales {
        let support = 1usize << j;
        let half = support / 2;
        let amp = 1.0 / (support as f64).sqrt();
        for k in 0..n {
            let s = spec.eval(k as f64 / n as f64).max(0.0);
            let xi: f64 = StandardNormal.sample(rng);
            if s == 0.0 {
                continue;
            }
            let a = s.sqrt() * xi;
            for tau in 0..support {
                let sign = if tau < half { amp } else { -amp };
                x[(k + tau) % n] += a * sign;
            }
        }
    }
    Ok(x)
}
