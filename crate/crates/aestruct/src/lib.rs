//! Numerical toolkit for manifolds carrying an (alpha, epsilon)-structure:
//! a field J of endomorphisms with J^2 = alpha*Id, trace J = 0, and a metric
//! g with g(JX, JY) = epsilon*g(X, Y), described chart-wise by component
//! expressions. The crate evaluates the associated tensors at sampled
//! points, builds the adapted connections (first canonical, Kobayashi-Nomizu,
//! Yano, Chern, well adapted, Bismut, skew, the one-parameter canonical
//! family, and the base-connection-generic laws), and verifies the identities
//! relating them.
//!
//! Index conventions, used everywhere and restated in module docs:
//! Gamma^k_ij means nabla_{d_i} d_j = Gamma^k_ij d_k; (nabla J)^k_ij means
//! ((nabla_{d_i} J) d_j)^k; torsion T^k_ij = Gamma^k_ij - Gamma^k_ji.

pub mod classify;
pub mod cli;
pub mod connections;
pub mod exprlang;
pub mod rng;
pub mod structure;
pub mod tensor;
pub mod verify;

/// Default absolute tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default number of sample points drawn from a spec's domain.
pub const DEFAULT_SAMPLES: usize = 64;

/// Metrics with |det g| at or below this are treated as degenerate.
pub const DET_G_FLOOR: f64 = 1e-10;
