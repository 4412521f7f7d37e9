//! The generic-fiber construction: the section `s'`, its branch locus, the
//! elliptic curves `y^2 = x^3 - 16` and `y^2 = x^3 - 432`, the map `γ`, and
//! the end-to-end example check.

pub mod branch;
pub mod curve;
pub mod elliptic;
pub mod example;
pub mod forms;

pub use branch::{branch_disjointness, branch_locus, gamma_branch_poly, BranchLocus};
pub use curve::{build_candidate_curve, CandidateCurve};
pub use elliptic::{ec_point_check, ec_torsion, gamma_eval, rational_point_search, EllipticCurveQ, ExtPoint, P1Point};
pub use example::{verify_example, Tamper};
pub use forms::{build_section, smoothness_check, BiSection, BinaryForm};
