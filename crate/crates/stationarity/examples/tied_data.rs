//! Rounded (tied) observations: the default mid-rank handling flags the
//! ties in the report, strict mode rejects them.

use stationarity::combine::Preset;
use stationarity::series::{Series, TiePolicy};
use stationarity::simgen::{generate, GeneratorSpec, Innovation, Model};
use stationarity::testrun::{run_test, TestConfig};

fn main() {
    let clean = generate(&GeneratorSpec {
        model: Model::N2,
        innovation: Innovation::Normal,
        n: 200,
        seed: 5,
    })
    .unwrap();
    // round to one decimal: plenty of exact ties
    let rounded: Vec<f64> = clean.values().iter().map(|v| (v * 10.0).round() / 10.0).collect();
    let series = Series::new(rounded).unwrap();

    let report = run_test(
        &series,
        &TestConfig {
            preset: Preset::Dc,
            replicates: 400,
            ..TestConfig::default()
        },
    )
    .unwrap();
    println!("ties present: {}", report.meta.ties);
    for w in &report.meta.warnings {
        println!("warning: {w}");
    }
    println!("global p = {}", report.global_p_display());

    let strict = run_test(
        &series,
        &TestConfig {
            preset: Preset::Dc,
            replicates: 400,
            tie_policy: TiePolicy::Reject,
            ..TestConfig::default()
        },
    );
    println!("strict mode: {:?}", strict.err().map(|e| e.to_string()));
}
