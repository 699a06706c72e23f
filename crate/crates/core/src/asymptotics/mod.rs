//! Coefficient extraction from sweeps in radius and volume, and comparison
//! with the closed-form constants.

pub mod expansion;
pub mod fit;
pub mod profile;
pub mod report;
pub mod richardson;

pub use expansion::{
    ball_constant, ellipsoid_constant, verify_ball_expansion, verify_ellipsoid_expansion,
    verify_ellipsoid_with_coefficients, ExpansionOptions,
};
pub use fit::{fit_constant_term, ExpansionFit};
pub use profile::{
    beta_coefficient, compare_profiles, spaceform_profile, sw_profile_spaceform, ProfileComparison, VolumeGrid,
};
pub use report::{ProfilePoint, Provenance, SampleRow, ToleranceKind, VerificationReport};
pub use richardson::{observed_order, richardson};
