//! Verification of the trace compatibility diagram.

pub mod calibrate;
pub mod faces;
pub mod membership;
pub mod report;

pub use calibrate::{calibrate, evaluate, Calibration, CalibrationOptions, ConventionOutcome};
pub use faces::{Face, FaceRecord, Verifier, VerifyConfig};
pub use membership::{solve_membership, IdealMembershipProblem, MembershipAnswer};
pub use report::{verify, VerificationReport, SCHEMA_VERSION};
