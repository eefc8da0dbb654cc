//! A small Monte Carlo rejection table, the programmatic version of the
//! `experiment` subcommand. Uses reduced repetitions to stay quick; the
//! reference study runs 1000.

use stationarity::harness::{run_experiment, table_to_csv, ExperimentSpec};

fn main() {
    let spec = ExperimentSpec::parse(
        "name = demo
seed = 42
reps = 100
replicates = 250
level = 0.05

[cell]
model = D(3)
n = 128
tests = d@2, c@2, dc@2

[cell]
model = S(0.9)
n = 128
tests = d@2, c@2, dc@2

[cell]
model = N1
n = 128
tests = dc@2
",
    )
    .unwrap();
    let table = run_experiment(&spec);
    print!("{}", table_to_csv(&table));
    eprintln!("({} rows, {} errors)", table.rows.len(), table.errors.len());
}
