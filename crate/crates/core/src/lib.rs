//! Real geometric invariant theory for pseudo-orthogonal groups acting on
//! curvature tensors.

pub mod error;
pub mod hol;
pub mod lie;
pub mod tensor;
pub mod kempf_ness;
pub mod curvature;
pub mod invariants;
pub mod classify;

pub use error::{Error, Result};
pub use classify::{classify_purity, wick_check, wick_split, PurityClass, PurityReport, Subject, WickRelation, WickVerdict};
pub use curvature::{catalog, catalog_metric, CatalogName, CurvatureBundle, RealTensor};
pub use hol::Signature;
pub use invariants::{evaluate_invariants, generate_contractions, is_vsi, ContractionWord, InvariantVector};
pub use kempf_ness::{norm_flow, orbit_closed, orbit_limit, orbits_intersect, FlowConfig, FlowResult, FlowVerdict};
pub use lie::{GroupElement, GroupKind};
pub use tensor::{Tensor, TensorShape, Valence};
