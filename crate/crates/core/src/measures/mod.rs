//! Correlation measures: affinity, affinity-based MIN (pure, qubit-qudit,
//! brute-force, bound and closed forms), Hilbert-Schmidt MIN and concurrence.

mod affinity;
mod closed_form;
mod concurrence;
mod measurement;
mod min;
pub mod optimize;

pub use affinity::{affinity, affinity_alpha, affinity_metric, affinity_metric_alpha};
pub use closed_form::{
    bell_diagonal_sqrt_coefficients, closed_form_bell_diagonal, closed_form_isotropic,
    closed_form_two_qubit_werner, closed_form_werner, concurrence_bell_diagonal,
    hs_min_bell_diagonal, min_affinity_bell_diagonal, ClosedForm,
};
pub use concurrence::concurrence;
pub use measurement::{
    apply_measurement, dephase, measurement_space, DegenerateBlock, MeasurementSpace,
    ProjectiveMeasurement, DEFAULT_DEG_TOL, PROJECTOR_TOL,
};
pub use min::{
    gamma_matrix, hs_min, luo_fu_min, min_affinity, min_affinity_2xn, min_affinity_brute_force,
    min_affinity_pure, min_affinity_upper_bound, t_matrix, GammaMatrix, Method, MinConfig,
    MinResult, TMatrix,
};
