//! Learning algorithms over computable reals: least elements of finite
//! lists and convex angles of finite point sets, found by guessing order
//! relations and repairing the guesses when an instance falsifies them.

pub mod cli;
pub mod convex;
pub mod geometry;
pub mod input;
pub mod knowledge;
pub mod least;
pub mod oracle;
pub mod rational;
pub mod reals;
pub mod trace;

pub use convex::{convex_angle, verify_bounding, BoundingCertificate, ConvexAngleResult, ConvexConfig, ConvexError};
pub use geometry::{decide_side, three_points, GeometryError, Point, SideDecision};
pub use knowledge::{blame, check_leq, CheckOutcome, Decision, KnowledgeState, LeqEvidence, Pair};
pub use least::{learn_least, least_candidate, Auditor, Challenge, LeastCandidate, LearnError, LearnOutcome};
pub use rational::Rational;
pub use reals::{op_at, Interval, Precision, RealNum, RealRegistry};
pub use trace::{Event, Trace};
