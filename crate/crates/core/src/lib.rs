//! Hilbert series, depth and Ratliff-Rush data of the associated graded
//! module `G(M)` of a maximal Cohen-Macaulay module `M = coker(phi)` over a
//! hypersurface ring, computed exactly over `F_p` in a truncated model of
//! `M / m^N M`.

pub mod corpus;
pub mod depth;
pub mod error;
pub mod family;
pub mod field;
pub mod instance;
pub mod invariants;
pub mod lab;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod presentation;
pub mod report;
pub mod superficial;

pub use corpus::{corpus, CorpusEntry};
pub use depth::{analyze, depth_g, Analysis, AnalysisOptions, DepthReport};
pub use error::{Error, Result};
pub use family::FamilySpec;
pub use field::FieldSpec;
pub use instance::InstanceFile;
pub use invariants::{HData, IntPoly};
pub use lab::{Status, Tally, TheoremId, TheoremVerdict};
pub use linalg::{Echelon, Mat, Subspace};
pub use model::TruncatedModule;
pub use poly::{parse, Monomial, Order, Poly};
pub use presentation::Presentation;
pub use report::InvariantReport;
pub use superficial::{Chain, Flavor, VerifiedForm};
