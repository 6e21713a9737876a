//! Planted sparse vertex cuts.
//!
//! The crate generates semi-random instances with a planted balanced vertex
//! cut, solves the balanced vertex-expansion SDP, builds and checks exact
//! dual certificates of integrality, and rounds fractional solutions back to
//! cuts.
//!
//! Module map:
//!
//! - [`graph`]: simple graphs, vertex boundaries, expansion metrics, JSON and edge-list I/O.
//! - [`spectral`]: normalized Laplacian gaps, Fiedler sweeps, weighted Laplacians.
//! - [`gen`]: instance generators (block model, expanders, bipartite pieces, adversaries).
//! - [`sdp`]: the primal SDP, an ADMM solver, triangle cutting planes, factorization.
//! - [`cert`]: dual certificate construction and verification.
//! - [`rounding`]: exact recovery, cluster rounding, line sweeps, ball rounding.

pub mod cert;
pub mod digraph;
pub mod error;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod rounding;
pub mod sdp;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{CutReport, EdgeTag, Graph};
