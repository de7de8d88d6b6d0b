//! Johansen rank testing and rank-restricted vector error correction models
//! `ΔX_t = Σ Γ_i ΔX_{t−i} + α βᵀ X_{t−1} + μ + ε_t`.

mod critical;
mod johansen;
mod model;

pub use critical::TraceCriticalValues;
pub use johansen::{johansen_trace, select_rank, trace_from_eigenvalues, JohansenResult};
pub use model::{fit_vecm, forecast_vecm, vecm_to_levels_var, VecmFit};
