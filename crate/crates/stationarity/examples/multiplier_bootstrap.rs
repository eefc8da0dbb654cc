//! Dependent multiplier sequences: Parzen weights, the closed-form
//! correlation structure, and its empirical counterpart.

use stationarity::multiplier::{
    generate_multipliers, multiplier_weights, weight_autocorrelation, BandwidthChoice,
};

fn main() {
    let b = 4;
    let weights = multiplier_weights(b);
    println!("normalized weights for b_n = {b} (l_n = {}):", 2 * b - 1);
    println!("  {:?}", weights.iter().map(|w| (w * 1e4).round() / 1e4).collect::<Vec<_>>());

    let n = 50_000;
    let set = generate_multipliers(n, 1, &BandwidthChoice::fixed(b).unwrap(), 7).unwrap();
    let xi = set.row(0);
    let mean = xi.iter().sum::<f64>() / n as f64;
    let var = xi.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    println!("sample mean = {mean:.4}, sample variance = {var:.4}");
    println!("{:>4} {:>12} {:>12}", "lag", "closed form", "empirical");
    for p in 0..=2 * b {
        let want = weight_autocorrelation(&weights, p);
        let mut s = 0.0;
        for i in 0..n - p {
            s += (xi[i] - mean) * (xi[i + p] - mean);
        }
        let emp = s / (n - p) as f64 / var;
        println!("{:>4} {:>12.4} {:>12.4}", p, want, emp);
    }
}
