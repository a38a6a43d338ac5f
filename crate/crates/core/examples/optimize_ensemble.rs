//! Numerical χ maximization over finite ensembles.

use std::f64::consts::LN_2;
use thermal_capacity::chi_opt::{optimize, OptimizerConfig};
use thermal_capacity::gfunc::g;
use thermal_capacity::{ChannelParams, Result};

fn main() -> Result<()> {
    let config = OptimizerConfig { members: 16, ..OptimizerConfig::default() };

    let pure = ChannelParams::pure_loss(0.6)?;
    let res = optimize(&pure, 1.0, &config)?;
    println!(
        "pure loss: χ = {:.8} bits, capacity {:.8}, {} iterations, converged {}",
        res.best_chi_bits,
        g(0.6)? / LN_2,
        res.iterations,
        res.converged
    );

    let thermal = ChannelParams::new(0.6, 0.5)?;
    let res = optimize(&thermal, 1.0, &OptimizerConfig { members: 8, ..config })?;
    println!(
        "thermal:   χ = {:.8} bits in [{:.8}, {:.8}]",
        res.best_chi_bits, res.lower_bits, res.upper_bits
    );
    println!("{}", serde_json::to_string_pretty(&res.summary()).expect("summary serializes"));
    Ok(())
}
