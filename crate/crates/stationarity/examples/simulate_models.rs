//! Draw from the null and alternative data generating models and print
//! summary statistics of each sample.

use stationarity::simgen::{generate, GeneratorSpec, Innovation, Model};

fn main() {
    let models = [
        Model::N1,
        Model::N2,
        Model::N8,
        Model::A5,
        Model::A6,
        Model::A12 { beta: 0.6 },
        Model::D { sigma: 3.0 },
        Model::S { beta: 0.9 },
        Model::Ds { sigma: 4.0, beta: 0.7 },
    ];
    println!("{:<12} {:>10} {:>10} {:>10} {:>8}", "model", "mean", "sd", "rho(1)", "break");
    for model in models {
        let n = if matches!(model, Model::A6) { 256 } else { 250 };
        let series = generate(&GeneratorSpec {
            model,
            innovation: Innovation::Normal,
            n,
            seed: 123,
        })
        .unwrap();
        let x = series.values();
        let nf = x.len() as f64;
        let mean = x.iter().sum::<f64>() / nf;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
        let rho1 = x
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / var
            / nf;
        let brk = model
            .break_index(n)
            .map(|b| b.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<12} {:>10.3} {:>10.3} {:>10.3} {:>8}",
            model.id_string(),
            mean,
            var.sqrt(),
            rho1,
            brk
        );
    }
}
