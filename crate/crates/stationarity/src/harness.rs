//! Seeded, parallel Monte Carlo experiment runner.
//!
//! An experiment is a list of cells (model x sample size x test list). Every
//! repetition draws its data and its multiplier set from substreams keyed by
//! `(master seed, cell index, repetition, purpose)`, so tables are
//! reproducible byte for byte no matter how many worker threads execute them
//! and stay stable when new cells are appended to a config.
//!
//! Within one repetition all tests of a cell that share an embedding
//! dimension also share their multiplier set and component statistics, the
//! way the combined tests are defined.

use crate::combine::{combine, CombinationSpec, ComponentId, ComponentResult, Preset, Psi};
use crate::error::{argument, Error, Result};
use crate::multiplier::{
    bandwidth_for_run, generate_multipliers_substream, select_bandwidth, BandwidthChoice,
};
use crate::testrun::{component_bandwidth, MultiplierPolicy};
use crate::simgen::{generate, GeneratorSpec, Innovation, Model};
use crate::testrun::compute_component;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut x = z;
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable substream derivation for `(master, cell, rep, purpose)` keys.
pub(crate) fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C909u64;
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// One test to run in a cell: a preset at an embedding dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestId {
    pub preset: Preset,
    pub h: usize,
}

impl TestId {
    /// Parses `dc@2`, `dcp@3`, or a bare preset name (which takes `h = 2`
    /// for serial presets and `h = 1` otherwise).
    pub fn parse(text: &str) -> Result<TestId> {
        let text = text.trim();
        let (name, h) = match text.split_once('@') {
            Some((name, h)) => {
                let h: usize = h
                    .trim()
                    .parse()
                    .map_err(|_| argument(format!("bad embedding dimension in '{text}'")))?;
                (name.trim(), Some(h))
            }
            None => (text, None),
        };
        let preset = Preset::parse(name)?;
        let h = h.unwrap_or_else(|| preset.min_h().max(1));
        if h < preset.min_h() {
            return Err(argument(format!(
                "preset {} needs h >= {}",
                preset.name(),
                preset.min_h()
            )));
        }
        Ok(TestId { preset, h })
    }

    pub fn label(&self) -> String {
        format!("{}@{}", self.preset.name(), self.h)
    }
}

/// One grid cell: a model, a sample size and the tests to run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub model: Model,
    pub innovation: Innovation,
    pub n: usize,
    pub tests: Vec<TestId>,
    /// Fixed multiplier half-width; `None` = data-driven.
    pub bandwidth: Option<usize>,
}

/// A full experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
    pub reps: usize,
    /// Bootstrap replicates per test (the experiment default is 250).
    pub replicates: usize,
    pub level: f64,
    pub psi: Psi,
    pub multiplier_policy: MultiplierPolicy,
    pub cells: Vec<CellSpec>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "experiment".into(),
            seed: 0,
            reps: 1000,
            replicates: 250,
            level: 0.05,
            psi: Psi::Fisher,
            multiplier_policy: MultiplierPolicy::PerComponent,
            cells: Vec::new(),
        }
    }
}

impl ExperimentSpec {
    /// Parses the declarative `key = value` config format. Global keys come
    /// first; each `[cell]` section describes one grid cell:
    ///
    /// ```text
    /// name = demo
    /// seed = 42
    /// reps = 1000
    /// replicates = 250
    /// level = 0.05
    ///
    /// [cell]
    /// model = DS(4,0.7)
    /// n = 128
    /// tests = d@2, c@2, dc@2
    /// ```
    pub fn parse(text: &str) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        let mut current: Option<PartialCell> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            if line == "[cell]" {
                if let Some(cell) = current.take() {
                    spec.cells.push(cell.finish()?);
                }
                current = Some(PartialCell::default());
                continue;
            }
            if line.starts_with('[') {
                return Err(err(format!("unknown section '{line}'")));
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected 'key = value'".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match &mut current {
                None => match key {
                    "name" => spec.name = value.to_string(),
                    "seed" => spec.seed = value.parse().map_err(|_| err("bad seed".into()))?,
                    "reps" => spec.reps = value.parse().map_err(|_| err("bad reps".into()))?,
                    "replicates" => {
                        spec.replicates =
                            value.parse().map_err(|_| err("bad replicates".into()))?
                    }
                    "level" => spec.level = value.parse().map_err(|_| err("bad level".into()))?,
                    "psi" => spec.psi = Psi::parse(value)?,
                    "multipliers" => spec.multiplier_policy = MultiplierPolicy::parse(value)?,
                    other => return Err(err(format!("unknown global key '{other}'"))),
                },
                Some(cell) => match key {
                    "model" => cell.model = Some(Model::parse(value)?),
                    "n" => cell.n = Some(value.parse().map_err(|_| err("bad n".into()))?),
                    "tests" => {
                        cell.tests = value
                            .split(',')
                            .map(TestId::parse)
                            .collect::<Result<Vec<_>>>()?
                    }
                    "innovation" => cell.innovation = Innovation::parse(value)?,
                    "bandwidth" => {
                        cell.bandwidth =
                            Some(value.parse().map_err(|_| err("bad bandwidth".into()))?)
                    }
                    other => return Err(err(format!("unknown cell key '{other}'"))),
                },
            }
        }
        if let Some(cell) = current.take() {
            spec.cells.push(cell.finish()?);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(argument("reps must be >= 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(argument("level must lie in (0, 1)"));
        }
        if self.replicates < 1 {
            return Err(argument("replicates must be >= 1"));
        }
        if self.cells.is_empty() {
            return Err(argument("experiment has no cells"));
        }
        Ok(())
    }
}

#[derive(Default)]
struct PartialCell {
    model: Option<Model>,
    innovation: Innovation,
    n: Option<usize>,
    tests: Vec<TestId>,
    bandwidth: Option<usize>,
}

impl PartialCell {
    fn finish(self) -> Result<CellSpec> {
        let model = self.model.ok_or_else(|| Error::Config("cell missing 'model'".into()))?;
        let n = self.n.ok_or_else(|| Error::Config("cell missing 'n'".into()))?;
        if self.tests.is_empty() {
            return Err(Error::Config("cell missing 'tests'".into()));
        }
        Ok(CellSpec {
            model,
            innovation: self.innovation,
            n,
            tests: self.tests,
            bandwidth: self.bandwidth,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    pub params: String,
    pub n: usize,
    pub test: String,
    pub h: usize,
    pub rejection_pct: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub cell: usize,
    pub model: String,
    pub message: String,
}

/// The rejection table of one experiment, ready for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub schema: u32,
    pub name: String,
    pub seed: u64,
    pub reps: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub level: f64,
    pub psi: String,
    pub rows: Vec<TableRow>,
    pub errors: Vec<CellError>,
}

/// Rejection indicators of one repetition of one cell, aligned with the
/// cell's test list.
fn run_cell_rep(spec: &ExperimentSpec, cell: &CellSpec, cell_idx: usize, rep: usize) -> Result<Vec<bool>> {
    let data_seed = derive_seed(&[spec.seed, cell_idx as u64, rep as u64, 0]);
    let mult_seed = derive_seed(&[spec.seed, cell_idx as u64, rep as u64, 1]);
    let series = generate(&GeneratorSpec {
        model: cell.model,
        innovation: cell.innovation,
        n: cell.n,
        seed: data_seed,
    })?;
    let bandwidth = match cell.bandwidth {
        Some(b) => BandwidthChoice::fixed(b)?,
        None => select_bandwidth(&series)?,
    };

    let mut mult_cache: HashMap<(usize, u32), crate::multiplier::MultiplierSet> = HashMap::new();
    let mut component_cache: HashMap<(usize, ComponentId), ComponentResult> = HashMap::new();
    let mut rejected = Vec::with_capacity(cell.tests.len());
    for test in &cell.tests {
        let h = test.h;
        if h >= series.len() {
            return Err(argument(format!(
                "test {} needs h < n = {}",
                test.label(),
                series.len()
            )));
        }
        let n_eff = series.len() - h + 1;
        let mut weighted = Vec::new();
        for (id, weight) in test.preset.components(h)? {
            if !component_cache.contains_key(&(h, id)) {
                let substream = match spec.multiplier_policy {
                    MultiplierPolicy::PerComponent => id.substream(),
                    MultiplierPolicy::Shared => 0,
                };
                if !mult_cache.contains_key(&(h, substream)) {
                    let bw = match spec.multiplier_policy {
                        MultiplierPolicy::PerComponent => {
                            component_bandwidth(&series, h, n_eff, id, &bandwidth)?
                        }
                        MultiplierPolicy::Shared => bandwidth_for_run(&bandwidth, h, n_eff),
                    };
                    mult_cache.insert(
                        (h, substream),
                        generate_multipliers_substream(
                            n_eff,
                            spec.replicates,
                            &bw,
                            mult_seed,
                            substream,
                        )?,
                    );
                }
                let comp = compute_component(&series, h, n_eff, id, &mult_cache[&(h, substream)])?;
                component_cache.insert((h, id), comp);
            }
            weighted.push((component_cache[&(h, id)].clone(), weight));
        }
        let outcome = combine(&CombinationSpec {
            psi: spec.psi,
            components: weighted,
        })?;
        rejected.push(outcome.global_p < spec.level);
    }
    Ok(rejected)
}

/// Runs the whole experiment. A failure inside a cell aborts that cell and
/// is recorded; the remaining cells still run.
pub fn run_experiment(spec: &ExperimentSpec) -> ExperimentTable {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (cell_idx, cell) in spec.cells.iter().enumerate() {
        let outcomes: Vec<Result<Vec<bool>>> = (0..spec.reps)
            .into_par_iter()
            .map(|rep| run_cell_rep(spec, cell, cell_idx, rep))
            .collect();
        let mut counts = vec![0usize; cell.tests.len()];
        let mut failure: Option<String> = None;
        for outcome in outcomes {
            match outcome {
                Ok(flags) => {
                    for (c, f) in counts.iter_mut().zip(flags) {
                        if f {
                            *c += 1;
                        }
                    }
                }
                Err(e) => {
                    failure.get_or_insert(e.to_string());
                }
            }
        }
        if let Some(message) = failure {
            errors.push(CellError {
                cell: cell_idx,
                model: cell.model.id_string(),
                message,
            });
            continue;
        }
        for (test, &count) in cell.tests.iter().zip(&counts) {
            let phat = count as f64 / spec.reps as f64;
            rows.push(TableRow {
                model: cell.model.family().to_string(),
                params: cell.model.params_string(),
                n: cell.n,
                test: test.preset.name().to_string(),
                h: test.h,
                rejection_pct: 100.0 * phat,
                stderr: 100.0 * (phat * (1.0 - phat) / spec.reps as f64).sqrt(),
            });
        }
    }
    ExperimentTable {
        schema: 1,
        name: spec.name.clone(),
        seed: spec.seed,
        reps: spec.reps,
        m: spec.replicates,
        level: spec.level,
        psi: spec.psi.name().to_string(),
        rows,
        errors,
    }
}

fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// RFC-4180 style CSV with a fixed column order.
pub fn table_to_csv(table: &ExperimentTable) -> String {
    let mut out = String::from("model,params,n,test,h,rejection_pct,stderr\r\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}\r",
            csv_field(&row.model),
            csv_field(&row.params),
            row.n,
            csv_field(&row.test),
            row.h,
            row.rejection_pct,
            row.stderr
        );
    }
    out
}

pub fn table_to_json(table: &ExperimentTable) -> String {
    serde_json::to_string_pretty(table).expect("table serialization cannot fail")
}

/// Writes `<name>.csv` and `<name>.json` into `dir`.
pub fn write_outputs(table: &ExperimentTable, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", table.name));
    let json_path = dir.join(format!("{}.json", table.name));
    std::fs::write(&csv_path, table_to_csv(table))?;
    std::fs::write(&json_path, table_to_json(table))?;
    Ok((csv_path, json_path))
}
