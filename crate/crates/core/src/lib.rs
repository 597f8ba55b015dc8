//! Dirichlet-box analysis of 1D shape resonances.
//!
//! The box method confines `-hbar^2 u'' + V u` to `(-ell, ell)` and reads
//! resonance data off the `ell`-dependence of the spectrum: flat branches
//! mark metastable levels, falling branches belong to the exterior, and
//! the avoided-crossing gaps between them encode the tunneling coupling.
//!
//! Modules follow the pipeline: [`potential`] (families, hypotheses),
//! [`agmon`] (tunneling distances), [`eigensolve`] (Sturm tridiagonal
//! solver), [`decoupled`] (interior/exterior split spectra),
//! [`sweep`] (branch tracking and gap refinement), [`wkb`] (quantization
//! cross-checks) and [`semiclassics`] (hbar-scaling studies).

pub mod agmon;
pub mod decoupled;
pub mod eigensolve;
pub mod error;
pub mod potential;
pub mod quad;
pub mod search;
pub mod semiclassics;
pub mod sweep;
pub mod wkb;

pub use agmon::AgmonMetrics;
pub use decoupled::DecoupledSpectra;
pub use eigensolve::{EigenPair, GridPolicy, TridiagonalOperator};
pub use error::{Error, Result};
pub use potential::{Geometry, PotentialFamily, PotentialModel, Side};
pub use semiclassics::{Observable, ScalingStudy, TunnelingEstimate};
pub use sweep::{BranchClass, BranchSet, CrossingReport, IsolationThreshold};
