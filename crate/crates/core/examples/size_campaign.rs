//! Monte Carlo size and power of both tests across the four sparsity regimes.
//!
//! Usage: `cargo run --release --example size_campaign [reps] [p]`

use densetest::inference::Method;
use densetest::simulate::{Design, MethodChoice, Regime, SimConfig, run_campaign};

fn main() -> densetest::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let reps = args.next().unwrap_or(100);
    let p = args.next().unwrap_or(100);

    println!("{:<26} {:>8} {:>8} {:>8} {:>8}", "regime", "method", "h=-0.5", "h=0", "h=0.5");
    for regime in Regime::ALL {
        let config = SimConfig {
            design: Design::Toeplitz,
            regime,
            n: 100,
            p,
            reps,
            alpha: 0.05,
            h_grid: vec![-0.5, 0.0, 0.5],
            method: MethodChoice::Both,
            base_seed: 1,
            tuning: None,
        };
        let result = run_campaign(&config)?;
        for m in &result.results {
            let name = match m.method {
                Method::KnownSigma => "known",
                Method::UnknownSigma => "unknown",
            };
            let rate = |h| m.rate_at(h).unwrap_or(f64::NAN);
            println!(
                "{:<26} {name:>8} {:>8.3} {:>8.3} {:>8.3}",
                regime.to_string(),
                rate(-0.5),
                rate(0.0),
                rate(0.5)
            );
        }
    }
    Ok(())
}
