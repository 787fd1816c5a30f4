//! Generalized tiles unextendible product bases (UPBs) in `C^d ⊗ C^d` for odd
//! `d`, the bound entangled PPT states supported on their entangled
//! subspaces, and numerical certificates for their structural properties.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense complex linear algebra (Jacobi eigensolver, ranks,
//!   complements, partial transposition).
//! * [`tiles`]: tile geometry and the product-state sets built on it.
//! * [`states`]: density matrices assembled from those sets.
//! * [`verify`]: certificates for orthogonality, unextendibility, PPT,
//!   decomposition, extremality and the edge property.
//! * [`discrimination`]: orthogonality-preserving measurement analysis for
//!   subsets of the product basis.

pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod states;
pub mod tiles;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Ket, Subspace, C64};
pub use states::{DensityMatrix, SigmaFactor};
pub use tiles::{Party, ProductState, TileLayout, Upb, Variant};
pub use verify::{Certificate, Confidence, SeesawConfig, Status};
