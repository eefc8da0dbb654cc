//! Combination of dependent bootstrap-based tests.
//!
//! Given component statistics `T_1, ..., T_r` with `M` bootstrap replicates
//! each — all generated from the *same* multiplier sequences — the global
//! test proceeds in five steps: treat the observed vector as replicate 0,
//! turn every value into an approximate p-value by ranking it among the `M`
//! replicates,
//!
//! ```text
//! p(T_j^[i]) = ( 1/2 + #{ k : T_j^[k] >= T_j^[i] } ) / (M + 1),
//! ```
//!
//! map every row through a decreasing combining function (Fisher's
//! `-2 sum w_j log p_j` or Stouffer's `sum w_j qnorm(1 - p_j)`), and report
//! the fraction of combined replicates at or above the observed combined
//! value. The offset by 1/2 keeps every p-value inside (0, 1).

use crate::error::{argument, Error, Result};
use crate::normal::norm_quantile;
use crate::sostats::Kernel;
use serde::{Deserialize, Serialize};

/// Combining function applied to each row of component p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Psi {
    /// `-2 sum_j w_j ln p_j`. The default: decreasing, positive, and the
    /// choice with the cleaner consistency story under fixed alternatives.
    #[default]
    Fisher,
    /// `sum_j w_j qnorm(1 - p_j)`; can run slightly liberal in small samples.
    Stouffer,
}

impl Psi {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fisher" => Ok(Psi::Fisher),
            "stouffer" => Ok(Psi::Stouffer),
            other => Err(argument(format!(
                "unknown psi '{other}' (expected 'fisher' or 'stouffer')"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Psi::Fisher => "fisher",
            Psi::Stouffer => "stouffer",
        }
    }

    pub fn apply(&self, p: &[f64], w: &[f64]) -> Result<f64> {
        match self {
            Psi::Fisher => psi_fisher(p, w),
            Psi::Stouffer => psi_stouffer(p, w),
        }
    }
}

fn check_pw(p: &[f64], w: &[f64]) -> Result<()> {
    if p.is_empty() || p.len() != w.len() {
        return Err(argument("p-values and weights must be non-empty and equal-length"));
    }
    if p.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(argument("p-values must lie strictly inside (0, 1)"));
    }
    if w.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(argument("weights must be strictly positive"));
    }
    Ok(())
}

/// Weighted Fisher combination `-2 sum_j w_j ln(p_j)`.
pub fn psi_fisher(p: &[f64], w: &[f64]) -> Result<f64> {
    check_pw(p, w)?;
    Ok(-2.0 * p.iter().zip(w).map(|(&pj, &wj)| wj * pj.ln()).sum::<f64>())
}

/// Weighted Stouffer combination `sum_j w_j qnorm(1 - p_j)`, computed through
/// the antisymmetry of the normal quantile to avoid forming `1 - p`.
pub fn psi_stouffer(p: &[f64], w: &[f64]) -> Result<f64> {
    check_pw(p, w)?;
    Ok(p.iter().zip(w).map(|(&pj, &wj)| wj * -norm_quantile(pj)).sum())
}

/// One component test: its statistic, its bootstrap replicates, and enough
/// context to enforce the shared-randomness contract.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentResult {
    pub name: String,
    pub statistic: f64,
    pub replicates: Vec<f64>,
    /// Number of embedded points the test ran on.
    pub n: usize,
    /// Embedding dimension of the run the component belongs to.
    pub h: usize,
    /// Seed of the multiplier set the replicates were drawn with.
    pub multiplier_seed: u64,
}

/// The p-value matrix of the combination procedure: row `i` (0 = observed)
/// holds the approximate p-values of replicate `i` for every component.
pub fn component_pvalues(components: &[&ComponentResult]) -> Result<Vec<Vec<f64>>> {
    if components.is_empty() {
        return Err(argument("need at least one component"));
    }
    let m = components[0].replicates.len();
    if components.iter().any(|c| c.replicates.len() != m) {
        return Err(argument("all components must share the same replicate count M"));
    }
    if m == 0 {
        return Err(argument("need at least one bootstrap replicate"));
    }
    let denom = (m + 1) as f64;
    let mut rows = vec![vec![0.0; components.len()]; m + 1];
    for (j, comp) in components.iter().enumerate() {
        let mut sorted = comp.replicates.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let count_ge = |x: f64| -> usize { m - sorted.partition_point(|&v| v < x) };
        rows[0][j] = (0.5 + count_ge(comp.statistic) as f64) / denom;
        for (i, &rep) in comp.replicates.iter().enumerate() {
            rows[i + 1][j] = (0.5 + count_ge(rep) as f64) / denom;
        }
    }
    Ok(rows)
}

/// A weighted set of components plus the combining function.
#[derive(Debug, Clone)]
pub struct CombinationSpec {
    pub psi: Psi,
    pub components: Vec<(ComponentResult, f64)>,
}

/// Everything the combination yields before report assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedOutcome {
    /// Approximate p-value of each observed component statistic.
    pub component_pvalues: Vec<f64>,
    /// Observed combined statistic `W`.
    pub w_observed: f64,
    /// Global p-value `#{ W^[k] >= W^[0] } / M`; may be exactly zero.
    pub global_p: f64,
    /// True when some component's replicates contain exact ties, which the
    /// ranking formula tolerates but the theory excludes.
    pub replicate_ties: bool,
}

/// Runs the five-step combination. All components must have been resampled
/// with the same multiplier set; mismatched seeds are a contract violation.
pub fn combine(spec: &CombinationSpec) -> Result<CombinedOutcome> {
    let refs: Vec<&ComponentResult> = spec.components.iter().map(|(c, _)| c).collect();
    let weights: Vec<f64> = spec.components.iter().map(|(_, w)| *w).collect();
    if refs.is_empty() {
        return Err(argument("need at least one component"));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(argument("component weights must be strictly positive"));
    }
    let seed = refs[0].multiplier_seed;
    if refs.iter().any(|c| c.multiplier_seed != seed) {
        return Err(Error::Contract(
            "components were resampled with different multiplier seeds; the combination \
             requires shared multiplier sequences"
                .into(),
        ));
    }
    let ties = refs.iter().any(|c| {
        let mut sorted = c.replicates.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.windows(2).any(|w| w[0] == w[1])
    });
    let rows = component_pvalues(&refs)?;
    let m = refs[0].replicates.len();
    let mut w_values = Vec::with_capacity(m + 1);
    for row in &rows {
        w_values.push(spec.psi.apply(row, &weights)?);
    }
    let w0 = w_values[0];
    let exceed = w_values[1..].iter().filter(|&&w| w >= w0).count();
    Ok(CombinedOutcome {
        component_pvalues: rows[0].clone(),
        w_observed: w0,
        global_p: exceed as f64 / m as f64,
        replicate_ties: ties,
    })
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Identifier of one component statistic within a combined test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentId {
    /// d.f. test on `X_1..X_n`.
    Df,
    /// d.f. test on the h-dimensional embedded points (the `dh` baseline).
    EmbeddedDf,
    /// Autocopula test of the full h-dimensional embedding.
    CopFull,
    /// Bivariate autocopula test of the pairs `(X_i, X_{i+q-1})`.
    CopPair { q: usize },
    /// U-statistic test.
    U(Kernel),
}

impl ComponentId {
    /// Stable substream index used when components resample with their own
    /// multiplier sequences.
    pub(crate) fn substream(&self) -> u32 {
        match self {
            ComponentId::Df => 0,
            ComponentId::EmbeddedDf => 1,
            ComponentId::CopFull => 2,
            ComponentId::U(Kernel::Mean) => 3,
            ComponentId::U(Kernel::Variance) => 4,
            ComponentId::U(Kernel::Autocov { lag }) => 8 + *lag as u32,
            ComponentId::CopPair { q } => 40 + *q as u32,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ComponentId::Df => "d".to_string(),
            ComponentId::EmbeddedDf => "dh".to_string(),
            ComponentId::CopFull => "c".to_string(),
            ComponentId::CopPair { q: 2 } => "c".to_string(),
            ComponentId::CopPair { q } => format!("c{}", q - 1),
            ComponentId::U(kernel) => kernel.name(),
        }
    }
}

/// The named tests of the study: single components and their standard
/// weighted combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    D,
    C,
    Dh,
    Dc,
    Dcp,
    M,
    V,
    A,
    Va,
    Mva,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "d" => Preset::D,
            "c" => Preset::C,
            "dh" => Preset::Dh,
            "dc" => Preset::Dc,
            "dcp" => Preset::Dcp,
            "m" => Preset::M,
            "v" => Preset::V,
            "a" => Preset::A,
            "va" => Preset::Va,
            "mva" => Preset::Mva,
            other => {
                return Err(argument(format!(
                    "unknown preset '{other}' (expected one of d, c, dh, dc, dcp, m, v, a, va, mva)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::D => "d",
            Preset::C => "c",
            Preset::Dh => "dh",
            Preset::Dc => "dc",
            Preset::Dcp => "dcp",
            Preset::M => "m",
            Preset::V => "v",
            Preset::A => "a",
            Preset::Va => "va",
            Preset::Mva => "mva",
        }
    }

    /// Serial presets need an embedding dimension of at least 2.
    pub fn min_h(&self) -> usize {
        match self {
            Preset::D | Preset::M | Preset::V => 1,
            _ => 2,
        }
    }

    /// Weighted component set for embedding dimension `h`.
    pub fn components(&self, h: usize) -> Result<Vec<(ComponentId, f64)>> {
        if h < self.min_h() {
            return Err(argument(format!(
                "preset {} needs h >= {}",
                self.name(),
                self.min_h()
            )));
        }
        let lags = h - 1;
        Ok(match self {
            Preset::D => vec![(ComponentId::Df, 1.0)],
            Preset::C => vec![(ComponentId::CopFull, 1.0)],
            Preset::Dh => vec![(ComponentId::EmbeddedDf, 1.0)],
            Preset::Dc => vec![(ComponentId::Df, 0.5), (ComponentId::CopFull, 0.5)],
            Preset::Dcp => {
                let mut v = vec![(ComponentId::Df, 0.5)];
                let w = 0.5 / lags as f64;
                v.extend((2..=h).map(|q| (ComponentId::CopPair { q }, w)));
                v
            }
            Preset::M => vec![(ComponentId::U(Kernel::Mean), 1.0)],
            Preset::V => vec![(ComponentId::U(Kernel::Variance), 1.0)],
            Preset::A => vec![(ComponentId::U(Kernel::Autocov { lag: lags }), 1.0)],
            Preset::Va => {
                let mut v = vec![(ComponentId::U(Kernel::Variance), 0.5)];
                let w = 0.5 / lags as f64;
                v.extend((1..=lags).map(|lag| (ComponentId::U(Kernel::Autocov { lag }), w)));
                v
            }
            Preset::Mva => {
                let third = 1.0 / 3.0;
                let mut v = vec![
                    (ComponentId::U(Kernel::Mean), third),
                    (ComponentId::U(Kernel::Variance), third),
                ];
                let w = third / lags as f64;
                v.extend((1..=lags).map(|lag| (ComponentId::U(Kernel::Autocov { lag }), w)));
                v
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub name: String,
    pub statistic: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    #[serde(rename = "W")]
    pub w: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub preset: String,
    pub psi: String,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub h: usize,
    /// Number of embedded points the statistics ran on.
    pub n: usize,
    pub series_len: usize,
    pub b_n: usize,
    pub bandwidth_mode: String,
    pub ties: bool,
    /// Multiplier draw policy: "per-component" or "shared".
    pub multipliers: String,
    pub warnings: Vec<String>,
}

/// Machine-readable outcome of one test run; keys serialize in a stable
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema: u32,
    pub components: Vec<ComponentReport>,
    pub global: GlobalReport,
    pub meta: ReportMeta,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Global p-value for display: an exact zero can only be reported as
    /// being below the bootstrap resolution.
    pub fn global_p_display(&self) -> String {
        if self.global.p == 0.0 {
            format!("< {}", 1.0 / self.meta.m as f64)
        } else {
            format!("{}", self.global.p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(name: &str, statistic: f64, replicates: Vec<f64>) -> ComponentResult {
        ComponentResult {
            name: name.into(),
            statistic,
            replicates,
            n: 16,
            h: 2,
            multiplier_seed: 42,
        }
    }

    #[test]
    fn pvalue_extremes() {
        // observed larger than all M = 4 replicates -> (1/5)(1/2) = 0.1
        let c = comp("d", 10.0, vec![1.0, 2.0, 3.0, 4.0]);
        let rows = component_pvalues(&[&c]).unwrap();
        assert_eq!(rows[0][0], 0.1);
        // observed smaller than all -> (1/5)(1/2 + 4) = 0.9
        let c = comp("d", 0.5, vec![1.0, 2.0, 3.0, 4.0]);
        let rows = component_pvalues(&[&c]).unwrap();
        assert_eq!(rows[0][0], 0.9);
    }

    #[test]
    fn pvalues_match_quadratic_oracle() {
        // Each replicate counts itself; verify against the O(M^2) definition.
        let values = vec![0.3, 1.7, 0.3, 2.2, 0.9, 1.1, 0.05];
        let c = comp("c", 1.0, values.clone());
        let rows = component_pvalues(&[&c]).unwrap();
        let m = values.len();
        let naive = |x: f64| -> f64 {
            let count = values.iter().filter(|&&v| v >= x).count();
            (0.5 + count as f64) / (m + 1) as f64
        };
        assert_eq!(rows[0][0], naive(1.0));
        for i in 0..m {
            assert_eq!(rows[i + 1][0], naive(values[i]), "i={i}");
        }
    }

    #[test]
    fn pvalues_respect_exact_bounds() {
        // Every p-value lies in [1/(2(M+1)), 1 - 1/(2(M+1))] exactly; the
        // extremes are attained by statistics beyond all replicates.
        let m = 6;
        let lo = 1.0 / (2.0 * (m as f64 + 1.0));
        let hi = 1.0 - lo;
        let c = comp("d", 99.0, vec![1.0, 5.0, 3.0, 2.0, 4.0, 6.0]);
        let rows = component_pvalues(&[&c]).unwrap();
        assert_eq!(rows[0][0], lo);
        let c = comp("d", -1.0, vec![1.0, 5.0, 3.0, 2.0, 4.0, 6.0]);
        let rows = component_pvalues(&[&c]).unwrap();
        assert_eq!(rows[0][0], hi);
        for row in rows {
            for p in row {
                assert!((lo..=hi).contains(&p));
            }
        }
    }

    #[test]
    fn order_statistics_identity() {
        // For tie-free replicates the replicate p-values are exactly a
        // permutation of (j + 1/2)/(M + 1), j = 1..M.
        let reps = vec![0.9, 0.1, 0.5, 1.4, 0.3, 2.0, 1.1, 0.7];
        let m = reps.len();
        let c = comp("d", 0.6, reps);
        let rows = component_pvalues(&[&c]).unwrap();
        let mut got: Vec<f64> = (1..=m).map(|i| rows[i][0]).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want: Vec<f64> = (1..=m).map(|j| (j as f64 + 0.5) / (m + 1) as f64).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn fisher_values() {
        let v = psi_fisher(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!((v - 2.77258872223978124).abs() < 1e-12);
        let v = psi_fisher(&[0.1, 0.9], &[0.5, 0.5]).unwrap();
        assert!((v - 2.40794560865187199).abs() < 1e-12);
        // divergence as any coordinate heads to zero
        let v = psi_fisher(&[1e-12, 0.5], &[1.0, 1.0]).unwrap();
        assert!(v > 50.0);
        assert!(psi_fisher(&[0.0, 0.5], &[1.0, 1.0]).is_err());
        assert!(psi_fisher(&[1.0, 0.5], &[1.0, 1.0]).is_err());
        assert!(psi_fisher(&[0.5], &[0.0]).is_err());
    }

    #[test]
    fn stouffer_values() {
        let v = psi_stouffer(&[0.5, 0.5], &[2.0, 0.7]).unwrap();
        assert_eq!(v, 0.0);
        let v = psi_stouffer(&[0.975], &[1.0]).unwrap();
        assert!((v + 1.9599639845400542).abs() < 1e-9);
        // elementwise antisymmetry
        for p in [0.1, 0.25, 0.6, 0.93] {
            let a = psi_stouffer(&[p], &[1.0]).unwrap();
            let b = psi_stouffer(&[1.0 - p], &[1.0]).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_component_reduces_to_plain_bootstrap() {
        let reps = vec![0.9, 0.1, 0.5, 1.4, 0.3, 2.0, 1.1, 0.7];
        let stat = 0.95;
        let plain = reps.iter().filter(|&&v| v >= stat).count() as f64 / reps.len() as f64;
        let spec = CombinationSpec {
            psi: Psi::Fisher,
            components: vec![(comp("d", stat, reps), 1.0)],
        };
        let got = combine(&spec).unwrap();
        assert_eq!(got.global_p, plain);
    }

    #[test]
    fn toy_combination_enumerated_by_hand() {
        // r = 2, M = 3; worked through the five steps by hand.
        let c1 = comp("d", 5.0, vec![3.0, 6.0, 1.0]);
        let c2 = comp("c", 2.0, vec![2.5, 0.5, 4.0]);
        let spec = CombinationSpec {
            psi: Psi::Fisher,
            components: vec![(c1.clone(), 1.0), (c2.clone(), 1.0)],
        };
        let got = combine(&spec).unwrap();
        assert_eq!(got.component_pvalues, vec![0.375, 0.625]);
        let w0 = -2.0 * (0.375f64.ln() + 0.625f64.ln());
        assert!((got.w_observed - w0).abs() < 1e-12);
        // replicate rows: (0.625, 0.625), (0.375, 0.875), (0.875, 0.375);
        // all three W values sit below W0, so the global p-value is 0.
        assert_eq!(got.global_p, 0.0);

        // independent enumeration with the other combining function
        let spec = CombinationSpec {
            psi: Psi::Stouffer,
            components: vec![(c1, 1.0), (c2, 1.0)],
        };
        let got = combine(&spec).unwrap();
        let w = |p1: f64, p2: f64| -(norm_quantile(p1) + norm_quantile(p2));
        let w0 = w(0.375, 0.625);
        let exceed = [w(0.625, 0.625), w(0.375, 0.875), w(0.875, 0.375)]
            .iter()
            .filter(|&&v| v >= w0)
            .count();
        assert_eq!(got.global_p, exceed as f64 / 3.0);
    }

    #[test]
    fn monotone_rejection() {
        // Raising one observed component statistic never increases the
        // global p-value.
        let reps1 = vec![0.9, 0.1, 0.5, 1.4, 0.3, 2.0, 1.1, 0.7];
        let reps2 = vec![1.3, 0.2, 0.8, 0.4, 1.8, 0.6, 1.0, 0.05];
        let mut last = f64::INFINITY;
        for stat in [0.05, 0.4, 0.8, 1.2, 2.5] {
            let spec = CombinationSpec {
                psi: Psi::Fisher,
                components: vec![
                    (comp("d", stat, reps1.clone()), 0.5),
                    (comp("c", 0.9, reps2.clone()), 0.5),
                ],
            };
            let p = combine(&spec).unwrap().global_p;
            assert!(p <= last, "p went up: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn replicate_ties_are_flagged() {
        let spec = CombinationSpec {
            psi: Psi::Fisher,
            components: vec![(comp("d", 1.0, vec![0.5, 0.5, 0.9]), 1.0)],
        };
        assert!(combine(&spec).unwrap().replicate_ties);
    }

    #[test]
    fn mismatched_multiplier_seeds_violate_contract() {
        let a = comp("d", 1.0, vec![0.1, 0.2, 0.3]);
        let mut b = comp("c", 1.0, vec![0.3, 0.1, 0.2]);
        b.multiplier_seed = 43;
        let spec = CombinationSpec {
            psi: Psi::Fisher,
            components: vec![(a, 0.5), (b, 0.5)],
        };
        match combine(&spec) {
            Err(Error::Contract(_)) => {}
            other => panic!("expected contract violation, got {other:?}"),
        }
    }

    #[test]
    fn preset_weights() {
        let dcp = Preset::Dcp.components(3).unwrap();
        let w: Vec<f64> = dcp.iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![0.5, 0.25, 0.25]);
        assert_eq!(dcp[1].0.name(), "c");
        assert_eq!(dcp[2].0.name(), "c2");

        let dc = Preset::Dc.components(4).unwrap();
        let w: Vec<f64> = dc.iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![0.5, 0.5]);

        let mva = Preset::Mva.components(2).unwrap();
        let w: Vec<f64> = mva.iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(mva[2].0.name(), "a");

        assert!(Preset::C.components(1).is_err());
        assert!(Preset::D.components(1).is_ok());
        assert!(Preset::parse("zz").is_err());
    }
}
