//! Deterministic charged-particle scattering through a uniformly charged
//! screen with a single slit, under discrete-time Newton dynamics.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: closed-form force of the slitted plane, a quadrature oracle
//!   for it, and the electrostatic potential.
//! * [`dynamics`]: the discrete-time update and a fourth-order reference
//!   integrator for the continuous limit.
//! * [`scattering`]: single trajectories from emitter to termination.
//! * [`ensemble`]: reproducible parallel ensembles binned into histograms.
//! * [`analysis`]: fringe metrics on detector distributions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod field;
pub mod quadrature;
pub mod scattering;

pub use analysis::{find_extrema, oscillation_index, total_variation, ExtremaReport, Extremum};
pub use dynamics::{
    energy, integrate_reference, rk4_step, step_discrete, ParticleState, StepParams,
};
pub use ensemble::{
    merge, normalize, run_ensemble, EmissionMode, EmissionSpec, Histogram, HistogramSpec,
};
pub use error::{Error, Result};
pub use field::{
    force_closed_form, force_quadrature, potential, FieldParams, QuadratureSpec, Vec2,
};
pub use scattering::{
    run_continuous_trajectory, run_discrete_trajectory, DetectorRule, Geometry, Outcome,
    TrajectoryRecord,
};
