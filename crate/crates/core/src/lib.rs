//! Target controllability analysis for leader-follower networks on directed
//! weighted graphs.
//!
//! A network system couples consensus agents over a directed weighted
//! graph; inputs enter at declared leader nodes and the outputs of
//! interest are the states of declared target nodes. This crate decides
//! whether those outputs can be steered anywhere (target controllability)
//! with exact rational rank certificates, and supports the decision with
//! reachability layering, equitable-partition criteria, an exact Kalman
//! decomposition with admissible-target enumeration, eigenvalue-based
//! necessary conditions, strongly-connected-component connectivity tests,
//! higher-order and Kronecker-structured liftings, and minimum-energy
//! output steering with trajectory export.
//!
//! Binding verdicts always come from exact arithmetic over
//! arbitrary-precision rationals; floating-point enters only where
//! eigenvalues and Gramians force it, and those results are advisory
//! evidence, never the deciding vote.

pub mod ctrb;
pub mod error;
pub mod exact;
pub mod extensions;
pub mod gen;
pub mod graph;
pub mod numeric;
pub mod partition;
pub mod reach;
pub mod report;
pub mod steering;

pub use error::Error;
pub use graph::{Graph, SystemTriple};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
