//! The data-driven multiplier bandwidth grows with the serial dependence:
//! mean selected half-width over AR(1) samples for increasing parameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use stationarity::multiplier::select_bandwidth;
use stationarity::series::Series;

fn ar1(beta: f64, n: usize, seed: u64) -> Series {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n + 100);
    let mut prev = 0.0;
    for _ in 0..n + 100 {
        let e: f64 = StandardNormal.sample(&mut rng);
        prev = beta * prev + e;
        x.push(prev);
    }
    Series::new(x.split_off(100)).unwrap()
}

fn main() {
    let runs = 200;
    println!("{:>6} {:>10} {:>12}", "beta", "mean b_n", "mean rho(1)");
    for beta in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let mut total = 0usize;
        let mut rho = 0.0;
        for r in 0..runs {
            let series = ar1(beta, 128, 1000 + r);
            let choice = select_bandwidth(&series).unwrap();
            total += choice.b_n;
            rho += choice.diagnostics.unwrap().rho1;
        }
        println!(
            "{:>6.1} {:>10.2} {:>12.3}",
            beta,
            total as f64 / runs as f64,
            rho / runs as f64
        );
    }
}
