//! Null distribution check: KS of the h = 0 statistics against N(0, 1) on
//! the heavy-tailed mixed design.

use densetest::simulate::{Design, MethodChoice, Regime, SimConfig, run_campaign};

fn main() -> densetest::Result<()> {
    let config = SimConfig {
        design: Design::FanSongMixed,
        regime: Regime::ALL[3],
        n: 100,
        p: 90,
        reps: 200,
        alpha: 0.05,
        h_grid: vec![0.0],
        method: MethodChoice::Both,
        base_seed: 99,
        tuning: None,
    };
    let result = run_campaign(&config)?;
    for m in &result.results {
        let stats: Vec<f64> = m.null_statistics.iter().flatten().copied().collect();
        let mean = stats.iter().sum::<f64>() / stats.len() as f64;
        let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (stats.len() - 1) as f64;
        println!(
            "{:?}: size {:.3}, mean {mean:.3}, variance {var:.3}, KS p-value {:.3}",
            m.method,
            m.rate_at(0.0).unwrap_or(f64::NAN),
            m.ks_p_value.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
