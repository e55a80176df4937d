//! Quantitative toolkit for eigenvalue-multiplicity bounds on closed
//! hyperbolic surfaces.
//!
//! The crate covers combinatorial thick-thin decompositions of pants
//! graphs, closed-form collar geometry, certification of the collar
//! Fourier-mode mass ratios, heat-kernel majorants on the hyperbolic plane,
//! greedy separated nets, and the two multiplicity-bound evaluators.
//!
//! Every operation is a pure function of its inputs; randomness only enters
//! through explicitly seeded generators.

pub mod bounds;
pub mod collar;
mod error;
pub mod families;
pub mod heat;
pub mod modes;
pub mod nets;
pub mod ode;
pub mod quadrature;
pub mod surface;
pub mod verify;

pub use bounds::{
    BoundReport, ConstantsProfile, DyadicCase, DyadicMass, Param, Provenance, RadiiSchedule,
    Stronger, SweepRow,
};
pub use collar::CollarProfile;
pub use error::{DescriptorError, Error, Result};
pub use heat::{KernelQuery, MajorantReport, MajorantSum};
pub use modes::{Fundamental, ModeProblem, ModeSolution};
pub use nets::{NetResult, Point, PointCloud};
pub use surface::{Curve, DecompositionReport, SurfaceDescriptor};

/// 4/e², the mass-ratio ceiling shared by the collar-mode and cosh² estimates.
pub const MASS_RATIO_CEILING: f64 = 0.541_341_132_946_450_8;
