//! Numerics for the collective E⊗e Jahn-Teller-Dicke model in a trapped-ion
//! chain: radial modes, charge-blocked exact diagonalization, the
//! thermodynamic-limit mean field, and coupling ramps.

pub mod dynamics;
pub mod error;
pub mod exact_diag;
pub mod hilbert;
pub mod ion_chain;
pub mod lab_params;
pub mod lanczos;
pub mod linalg;
pub mod mean_field;
pub mod sparse;

pub use error::{JtdError, Result};
pub use hilbert::{Charge, ChargeSector, ModelParams};
