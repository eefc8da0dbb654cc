//! Mechanics of the dependent p-value combination on a toy pair of
//! component tests: ranking against replicates, Fisher and Stouffer rules,
//! and the global bootstrap p-value.

use stationarity::combine::{
    combine, component_pvalues, psi_fisher, psi_stouffer, CombinationSpec, ComponentResult, Psi,
};

fn component(name: &str, statistic: f64, replicates: Vec<f64>) -> ComponentResult {
    ComponentResult {
        name: name.into(),
        statistic,
        replicates,
        n: 16,
        h: 2,
        multiplier_seed: 1,
    }
}

fn main() {
    let a = component("d", 5.0, vec![3.0, 6.0, 1.0, 2.5, 4.5]);
    let b = component("c", 2.0, vec![2.5, 0.5, 4.0, 1.0, 0.75]);

    let rows = component_pvalues(&[&a, &b]).unwrap();
    println!("p-value matrix (row 0 = observed):");
    for (i, row) in rows.iter().enumerate() {
        println!("  [{i}] {row:?}");
    }

    let p = &rows[0];
    let w = [0.5, 0.5];
    println!("psi_F(observed) = {:.4}", psi_fisher(p, &w).unwrap());
    println!("psi_S(observed) = {:.4}", psi_stouffer(p, &w).unwrap());

    for psi in [Psi::Fisher, Psi::Stouffer] {
        let outcome = combine(&CombinationSpec {
            psi,
            components: vec![(a.clone(), 0.5), (b.clone(), 0.5)],
        })
        .unwrap();
        println!(
            "{}: W = {:.4}, global p = {:.3}",
            psi.name(),
            outcome.w_observed,
            outcome.global_p
        );
    }
}
