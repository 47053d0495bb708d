//! Casimir interaction energy per unit length between two nested
//! perfect-conductor cylindrical shells of arbitrary star-shaped cross
//! section.
//!
//! Boundary conditions are imposed at a finite set of collocation points on
//! both curves; on the imaginary frequency axis the resulting linear system
//! is governed by modified Bessel functions, and the interaction energy is
//! the weighted integral of the log-determinant ratio
//!
//! ```text
//! E/L = (1/4π) ∫₀^∞ y ln Q(iy) dy,
//! Q(iy) = det[I − M̃₁ Ñ₁⁻¹ Ñ₂ M̃₂⁻¹]
//! ```
//!
//! with TM (Dirichlet) and TE (Neumann) polarizations handled through the
//! Bessel functions or their derivatives. Supported outer sections: circle,
//! eccentric circle, corrugated circle (with torque about the relative
//! corrugation rotation), ellipse and truncated parabola.
//!
//! Modules:
//! - [`specfun`]: exponentially scaled modified Bessel functions `I_m`, `K_m`
//! - [`geometry`]: boundary curves and collocation point grids
//! - [`kernel`]: collocation matrices and `ln Q(iy)`
//! - [`energy`]: quadrature over `y`, torque, parameter sweeps
//! - [`oracles`]: closed-form concentric mode sums and the perturbative
//!   corrugation amplitude used for validation

pub mod energy;
pub mod error;
pub mod geometry;
pub mod kernel;
mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod scaled;
pub mod specfun;

pub use energy::{casimir_energy, sweep, torque, EnergyConfig, EnergyResult, SweepAxis, SweepSpec};
pub use error::{Error, Result};
pub use geometry::{BoundaryCurve, PointGrid};
pub use kernel::{CollocationSetup, LogQ, Polarization, SpectralMatrixSet};
pub use quadrature::QuadratureControls;
pub use scaled::ScaledValue;
