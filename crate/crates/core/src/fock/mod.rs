//! Truncated Fock-space oracle for the analytic bounds.
//!
//! States live on Fock levels `0..D`. The thermal channel is simulated as an
//! exact beamsplitter on the joint signal–environment space followed by a
//! partial trace, and every truncation carries an analytic tail bound.

pub mod channel;
pub mod entropy;
pub mod holevo;
pub mod moments;
pub mod quadrature;
pub mod state;

pub use channel::{apply_channel, BeamsplitterBlocks, ChannelConfig, ThermalChannelSim};
pub use entropy::{von_neumann_entropy, EntropyEstimate};
pub use holevo::{ensemble_chi, gaussian_chi_report, holevo_chi_gaussian_ensemble, GaussianChiReport};
pub use moments::{moments, verify_decomposition_fock, DecompositionCheck, Moments};
pub use quadrature::GaussianGrid;
pub use state::{coherent_state, thermal_state, FockDensityMatrix, TruncationBudget};
