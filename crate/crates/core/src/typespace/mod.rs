//! Row-space geometry: approximation levels across a two-layer fixture,
//! extension and symmetry audits, small-diameter coverings, and
//! epsilon-Cantor-Bendixson analysis of finite topometric spaces.

mod cover;
mod fixture;
mod topometric;

pub use cover::{cover_rows, Cover, CoverMethod, EXACT_COVER_LIMIT};
pub use fixture::{define_over_m, extension_audit, fs_level, row_distance, symmetry_audit, ExtensionAudit, SymmetryAudit, TwoLayerFixture};
pub use topometric::{cb_analyze, cb_derivative, CBReport, PointSet, TopometricSpace, FAMILY_CAP};
