//! Integrable matrix lattice hierarchies of AKNS type.
//!
//! The crate builds, evolves and checks solutions of the matrix discrete
//! NLS hierarchy and the matrix Ablowitz–Ladik model: Lax operators and
//! zero-curvature residuals, Darboux-generated solitons, transfer-matrix
//! charges, the discrete GLM factorization and the discrete Cole–Hopf map.

pub mod al;
pub mod algebra;
pub mod colehopf;
pub mod conserved;
pub mod darboux;
pub mod dnls;
pub mod error;
pub mod glm;
pub mod integrate;
pub mod jet;

pub use al::{AlBoundary, AlState, AlVariant};
pub use colehopf::{ContinuumGrid, ScalarLattice};
pub use algebra::{dense_solve, CMatrix, ClosureKind, RankOnePair, SpectralMatrixPoly};
pub use conserved::{ChargeReport, ChargeRule, LaxChain};
pub use darboux::{LatticeSolution, OneSoliton, SolitonFamily, SolitonParams};
pub use dnls::{DnlsState, DressingData, Flow};
pub use error::{Error, Result};
pub use integrate::{FieldRates, Trajectory};
pub use jet::Jet;
pub use num_complex::Complex64;
