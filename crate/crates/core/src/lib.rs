//! Conformal geometry numerics on four-manifolds: the σ₂ cone algebra, a
//! continuity-method solver for σ₂^{1/2}(Aᵗ) = f·e^{2u} on S¹×S³, Paneitz
//! operator spectra and the ledger of conformal invariants.

pub mod cone;
pub mod config;
pub mod endo;
pub mod error;
pub mod geometry;
pub mod ledger;
pub mod paneitz;
pub mod report;
pub mod sampling;
pub mod selftest;
pub mod solver;

pub use cone::ConeVerdict;
pub use endo::SymEndo4;
pub use error::{Error, Result};
pub use geometry::{Background, CurvaturePackage, DerivativeScheme, ReducedField, S1xS3};
pub use ledger::{SurgeryVerdict, TopologyRecord};
pub use solver::{DiagnosticsRecord, PathState, RicciVerdict, SolveConfig};
pub use config::RunConfig;
pub use paneitz::{ProductSpectrumInput, SpectrumSummary};
pub use report::{RunManifest, SolveReport};
