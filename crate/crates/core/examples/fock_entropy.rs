//! Entropy of truncated thermal states against g(N).

use thermal_capacity::fock::{thermal_state, von_neumann_entropy, TruncationBudget};
use thermal_capacity::gfunc::g;
use thermal_capacity::Result;

fn main() -> Result<()> {
    for n in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let budget = TruncationBudget::thermal(n, 1e-10)?;
        let s = von_neumann_entropy(&thermal_state(n, budget.dim)?)?;
        let exact = g(n)?;
        println!("N = {n:<4} D = {:<4} S = {s:.12}  g(N) = {exact:.12}  |Δ| = {:.1e}",
            budget.dim, (s - exact).abs());
    }
    Ok(())
}
