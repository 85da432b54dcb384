//! Affinity-based measurement-induced nonlocality for finite-dimensional
//! bipartite states, with the Hilbert-Schmidt variant, concurrence, and
//! generalized amplitude damping dynamics.
//!
//! ```
//! use affmin::prelude::*;
//!
//! let bell = bell_diagonal(CorrelationVector::new(1.0, 1.0, -1.0).unwrap()).unwrap();
//! let r = min_affinity(&bell, &MinConfig::default()).unwrap();
//! assert!((r.value - 0.5).abs() < 1e-12);
//! ```

pub mod channels;
pub mod cli;
pub mod error;
pub mod format;
pub mod linalg;
pub mod measures;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channels::{
        apply_product_channel, dynamics_sweep, evolve_bd, gad_kraus, DynamicsRecord, GadParams,
        KrausChannel,
    };
    pub use crate::linalg::{CMatrix, Subsystem};
    pub use crate::measures::{
        affinity, affinity_metric, closed_form_isotropic, closed_form_werner, concurrence, hs_min,
        luo_fu_min, min_affinity, min_affinity_bell_diagonal, min_affinity_upper_bound, Method,
        MinConfig, MinResult, ProjectiveMeasurement,
    };
    pub use crate::states::{
        add_ancilla, bell_diagonal, isotropic, pure_from_schmidt, random_state, werner,
        BipartiteState, CorrelationVector, SchmidtSpectrum,
    };
    pub use crate::{Error, Result};
}
