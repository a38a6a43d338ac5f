//! Thermal channel = amplifier after pure loss, checked on covariance
//! matrices and on Fock-space moments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermal_capacity::fock::{coherent_state, thermal_state, verify_decomposition_fock};
use thermal_capacity::gaussian::{apply_thermal, decompose, random_channel, random_physical_covariance};
use thermal_capacity::{ChannelParams, Result};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let gamma = random_physical_covariance(&mut rng);
        let ch = random_channel(&mut rng, 50.0);
        let direct = apply_thermal(&ch, &gamma)?;
        worst = worst.max(direct.max_abs_diff(&decompose(&ch).apply(&gamma)?));
    }
    println!("covariance level: max discrepancy {worst:.2e} over 1000 draws");

    let ch = ChannelParams::new(0.7, 0.4)?;
    let states = [
        thermal_state(0.8, 30)?,
        coherent_state(num_complex::Complex64::new(1.0, -0.5), 30)?,
    ];
    let check = verify_decomposition_fock(&ch, &states)?;
    println!(
        "Fock level: moment discrepancy {:.2e} (tolerance {:.0e}) -> {}",
        check.max_discrepancy,
        check.tolerance,
        if check.passed { "ok" } else { "FAILED" }
    );
    Ok(())
}
