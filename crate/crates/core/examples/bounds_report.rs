//! Capacity bounds for a single thermal channel.
//!
//! cargo run --example bounds_report -- 0.5 1 10

use thermal_capacity::{report, ChannelParams, Result};

fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (lambda, n_env, n) = match args[..] {
        [l, e, n] => (l, e, n),
        _ => (0.5, 1.0, 10.0),
    };
    let ch = ChannelParams::new(lambda, n_env)?;
    let r = report(&ch, n)?;
    println!("λ = {lambda}, N_E = {n_env}, N = {n}");
    println!("  lower  {:.10} bits", r.lower_bits);
    println!("  upper  {:.10} bits", r.upper_bits);
    println!("  gap    {:.10} bits (refined bound {:.10}, universal {:.10})",
        r.gap_bits, r.refined_gap_bound_bits, r.universal_gap_bound_bits);
    println!("  certified: {}", r.certified);
    Ok(())
}
