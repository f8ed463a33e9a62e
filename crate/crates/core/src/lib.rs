pub mod arith;
pub mod classify;
pub mod error;
pub mod field;
pub mod groups;
pub mod harness;
pub mod matrix;
pub mod poly;
pub mod proportions;

pub use error::{Error, Result};
pub use field::{make_field, Field, FieldElement};
pub use matrix::{Matrix, Subspace};
pub use poly::{FactoredPoly, Poly};
pub use groups::{Family, GroupSpec};
pub use classify::{Classification, Classifier, Tier};
pub use harness::{KChoice, ScanConfig, ScanMode, ScanReport, Verdict};
pub use proportions::{BoundInterval, SetKind};
