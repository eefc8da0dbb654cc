//! End-to-end execution of one stationarity test on one series.
//!
//! A run fixes the embedding dimension `h`, derives `n = N - h + 1`, picks
//! the multiplier bandwidth (auto-selected from the full stretch unless
//! overridden), generates one shared multiplier set, computes every component
//! of the chosen preset with it, and combines the component p-values into
//! the global verdict.

use crate::combine::{
    combine, CombinationSpec, ComponentId, ComponentReport, ComponentResult, GlobalReport, Preset,
    Psi, ReportMeta, TestReport,
};
use crate::empirical::Embedding;
use crate::error::{argument, Result};
use crate::multiplier::{
    bandwidth_for_run, generate_multipliers_substream, select_bandwidth,
    select_bandwidth_influence, BandwidthChoice, BandwidthMode, MultiplierSet,
};
use crate::rankstats::{CopulaEngine, DfEngine};
use crate::series::{Series, TiePolicy};
use crate::sostats::{phi_hat, replicate_u, stat_u};

/// How the component tests of a combination draw their multiplier
/// sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultiplierPolicy {
    /// Every component resamples with its own substream of the run's seed.
    /// This is how the reference rejection tables behave: the combined
    /// p-value then reacts to each extreme component on its own.
    #[default]
    PerComponent,
    /// One multiplier set shared by all components, the strict reading of
    /// the joint-resampling theory. Combined tests damp noticeably more
    /// when the bandwidth is a sizable fraction of the sample.
    Shared,
}

impl MultiplierPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            MultiplierPolicy::PerComponent => "per-component",
            MultiplierPolicy::Shared => "shared",
        }
    }

    pub fn parse(s: &str) -> crate::error::Result<Self> {
        match s {
            "per-component" => Ok(MultiplierPolicy::PerComponent),
            "shared" => Ok(MultiplierPolicy::Shared),
            other => Err(argument(format!(
                "unknown multiplier policy '{other}' (expected 'per-component' or 'shared')"
            ))),
        }
    }
}

/// Configuration of a single test run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub preset: Preset,
    /// Embedding dimension; `h = 2` examines lag-1 serial dependence.
    pub h: usize,
    /// Number of bootstrap replicates `M`.
    pub replicates: usize,
    pub seed: u64,
    pub psi: Psi,
    /// Fixed block half-width; `None` selects it from the data.
    pub bandwidth: Option<usize>,
    pub tie_policy: TiePolicy,
    pub multiplier_policy: MultiplierPolicy,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            preset: Preset::Dc,
            h: 2,
            replicates: 1000,
            seed: 42,
            psi: Psi::Fisher,
            bandwidth: None,
            tie_policy: TiePolicy::MidRank,
            multiplier_policy: MultiplierPolicy::PerComponent,
        }
    }
}

/// Computes one component statistic together with its bootstrap replicates,
/// both backed by the same engine so the precomputed indicator tables are
/// shared.
pub(crate) fn compute_component(
    series: &Series,
    h: usize,
    n: usize,
    id: ComponentId,
    mults: &MultiplierSet,
) -> Result<ComponentResult> {
    let x = series.values();
    let (statistic, replicates) = match id {
        ComponentId::Df => {
            let engine = DfEngine::new(&x[..n], n, &[0]);
            (engine.statistic(), engine.replicates(mults))
        }
        ComponentId::EmbeddedDf => {
            let offsets: Vec<usize> = (0..h).collect();
            let engine = DfEngine::new(x, n, &offsets);
            (engine.statistic(), engine.replicates(mults))
        }
        ComponentId::CopFull => {
            let engine = CopulaEngine::new(x, n, &Embedding::full(h)?);
            (engine.statistic(), engine.replicates(mults))
        }
        ComponentId::CopPair { q } => {
            if q < 2 || q > h {
                return Err(argument(format!("pair lag q={q} out of range for h={h}")));
            }
            let engine = CopulaEngine::new(x, n, &Embedding::pair(q)?);
            (engine.statistic(), engine.replicates(mults))
        }
        ComponentId::U(kernel) => (
            stat_u(series, h, kernel)?,
            replicate_u(series, h, kernel, mults)?,
        ),
    };
    Ok(ComponentResult {
        name: id.name(),
        statistic,
        replicates,
        n,
        h,
        multiplier_seed: mults.seed(),
    })
}

/// The multiplier bandwidth of one component. Rank-based components inherit
/// the run-level choice made from the observations; a U-statistic component
/// with a data-driven bandwidth re-applies the selector to its estimated
/// influence series, whose serial dependence is what the replicate partial
/// sums actually feel (for the mean kernel the two coincide). Fixed
/// bandwidths pass through untouched.
pub(crate) fn component_bandwidth(
    series: &Series,
    h: usize,
    n: usize,
    id: ComponentId,
    run_choice: &BandwidthChoice,
) -> Result<BandwidthChoice> {
    let chosen = match (id, run_choice.mode) {
        (ComponentId::U(kernel), BandwidthMode::Auto) => {
            select_bandwidth_influence(&phi_hat(series, h, kernel)?)?
        }
        _ => *run_choice,
    };
    Ok(bandwidth_for_run(&chosen, h, n))
}

/// Sample excess kurtosis, used to warn about the moment conditions of the
/// second-order tests.
fn excess_kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    if m2 == 0.0 {
        0.0
    } else {
        m4 / (m2 * m2) - 3.0
    }
}

/// Runs the configured preset on the series and assembles the report.
pub fn run_test(series: &Series, cfg: &TestConfig) -> Result<TestReport> {
    if cfg.h < 1 {
        return Err(argument("h must be >= 1"));
    }
    if cfg.h >= series.len() {
        return Err(argument(format!(
            "h={} too large for a series of length {}",
            cfg.h,
            series.len()
        )));
    }
    if cfg.replicates < 1 {
        return Err(argument("need at least one bootstrap replicate"));
    }
    let ties = series.check_ties(cfg.tie_policy)?;
    let n = series.len() - cfg.h + 1;

    let bandwidth = match cfg.bandwidth {
        Some(b) => BandwidthChoice::fixed(b)?,
        None => select_bandwidth(series)?,
    };
    let run_bandwidth = bandwidth_for_run(&bandwidth, cfg.h, n);
    let mults_for = |id: ComponentId| -> Result<MultiplierSet> {
        let (substream, bw) = match cfg.multiplier_policy {
            MultiplierPolicy::PerComponent => (
                id.substream(),
                component_bandwidth(series, cfg.h, n, id, &bandwidth)?,
            ),
            MultiplierPolicy::Shared => (0, run_bandwidth),
        };
        generate_multipliers_substream(n, cfg.replicates, &bw, cfg.seed, substream)
    };

    let weighted = cfg.preset.components(cfg.h)?;
    let mut components = Vec::with_capacity(weighted.len());
    for (id, weight) in weighted {
        let mults = mults_for(id)?;
        components.push((compute_component(series, cfg.h, n, id, &mults)?, weight));
    }

    let mut warnings = Vec::new();
    if ties {
        warnings.push("input contains exact ties; ranks use mid-rank resolution".to_string());
    }
    if let Some(diag) = bandwidth.diagnostics {
        if diag.fallback_constant {
            warnings.push("constant input; bandwidth fell back to b_n = 1".to_string());
        }
    }
    let uses_moments = components
        .iter()
        .any(|(c, _)| matches!(c.name.chars().next(), Some('m' | 'v' | 'a')));
    if uses_moments {
        let g2 = excess_kurtosis(series.values());
        if g2 > 8.0 {
            warnings.push(format!(
                "heavy tails (excess kurtosis {g2:.1}); moment-based tests may be unreliable"
            ));
        }
    }

    let spec = CombinationSpec {
        psi: cfg.psi,
        components,
    };
    let outcome = combine(&spec)?;
    if outcome.replicate_ties {
        warnings.push("bootstrap replicates contain exact ties".to_string());
    }

    let components = spec
        .components
        .iter()
        .zip(&outcome.component_pvalues)
        .map(|((c, _), &p)| ComponentReport {
            name: c.name.clone(),
            statistic: c.statistic,
            p,
        })
        .collect();

    Ok(TestReport {
        schema: 1,
        components,
        global: GlobalReport {
            w: outcome.w_observed,
            p: outcome.global_p,
        },
        meta: ReportMeta {
            preset: cfg.preset.name().to_string(),
            psi: cfg.psi.name().to_string(),
            seed: cfg.seed,
            m: cfg.replicates,
            h: cfg.h,
            n,
            series_len: series.len(),
            b_n: bandwidth.b_n,
            bandwidth_mode: match bandwidth.mode {
                BandwidthMode::Fixed => "fixed".to_string(),
                BandwidthMode::Auto => "auto".to_string(),
            },
            ties,
            multipliers: cfg.multiplier_policy.name().to_string(),
            warnings,
        },
    })
}
