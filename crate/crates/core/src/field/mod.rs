//! Transverse modes and propagation fields of a quadratic graded-index medium.
//!
//! Lengths are expressed in a model length unit (`MediumParams::length_unit_m`
//! metres, one micrometre by default) so that the medium curvature
//! coefficients `kx`, `ky`, `g` and the wavenumber `k0` share a scale.

mod beam;
mod grid;
mod medium;
mod propagation;
mod residual;
mod rotation;

pub use beam::{beam_geometry, electric_field_paraxial, tem_mode, tem_mode_grid, BeamGeometry, ParaxialVectorField};
pub use grid::{FieldGrid, GridAxes, GridSidecar};
pub use medium::{normal_modes, rotation_angle, MediumParams, NormalModes};
pub use propagation::{
    cluster_hamiltonian_coeffs, propagate_cluster, propagate_cluster_with, propagate_single, propagate_single_with,
    ClusterConfig, HamiltonianCoeffs, IntraCoupling, OscillatorCoeffs, Photon, PropagationOptions, ZeroPointPhase,
};
pub use residual::{paraxial_residual, ParaxialEquation};
pub use rotation::{rotate_slice, rotate_transverse};
