//! 2D quasi-static brittle fracture toolkit.
//!
//! Two coupled models of crack propagation with velocity-dependent fracture
//! energy, plus the bookkeeping that ties them together:
//!
//! * [`griffith`] — a Griffith-type model where the fracture energy grows with
//!   the crack-tip speed, reduced to a scalar ODE `L'(t) = beta*(G(L,t) - G_c)`
//!   and integrated along a prescribed energy profile.
//! * [`phasefield`] + [`elasticity`] — an irreversible phase-field fracture
//!   model: damaged linear elasticity coupled to a unidirectional gradient
//!   flow of the Ambrosio–Tortorelli regularized total energy.
//! * [`energy`] — per-step energy ledgers, dissipation-identity residuals, and
//!   the strip diagnostics (crack length, tip velocity, effective fracture
//!   energy) used to characterize the time-relaxation parameter.
//! * [`scenario`] — JSON-configured runners for the canonical experiments and
//!   the CSV/VTK output surfaces.

pub mod elasticity;
pub mod energy;
pub mod error;
pub mod field;
pub mod griffith;
pub mod loads;
pub mod material;
pub mod mesh;
pub mod phasefield;
pub mod scenario;
pub mod sparse;
pub mod vtk;

pub use error::Error;
pub use field::NodalField;
pub use material::{MaterialParams, PlaneMode, RateLaw};
pub use mesh::{BoundaryTag, TriMesh};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
