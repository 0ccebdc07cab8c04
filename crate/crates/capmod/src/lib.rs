//! Capacity-theoretic calculus on finite weighted graphs.
//!
//! A finite weighted graph with vertex masses plays the role of a metric
//! measure space. On top of it this crate builds, exactly where exactness is
//! possible and with independent oracles where it is not:
//!
//! - integration against arbitrary outer measures via the Cavalieri formula,
//!   with submodularity checking and the constructive measure that proves
//!   integral subadditivity ([`outer`]);
//! - the discrete Sobolev structure: Dirichlet energy, pointwise gradient
//!   modulus, squared W^{1,2} norms, and m-classes with canonical
//!   harmonic-at-null representatives ([`sobolev`]);
//! - the variational 2-capacity with its equilibrium-potential solver, KKT
//!   verification, projected-gradient oracle, and outer-measure adapter
//!   ([`capacity`]);
//! - the metric space L0(Cap) with the exhaustion-weighted distance d_Cap,
//!   convergence characterizations, and simple-function density ([`l0cap`]);
//! - the quasi-uniform distance d_QU, the sandwich d_Cap <= d_QU <=
//!   2 sqrt(d_Cap), the Sobolev-norm bound, and the QCR selection ([`quasi`]);
//! - the tangent module of dart fields with gradient, pointwise inner
//!   product, the quotient to m-classes, universal-property factorization,
//!   and quasi-continuous vector fields ([`tangent`]);
//! - scenario studies and seeded verification suites with deterministic
//!   reports ([`study`], [`suite`], [`report`]).
//!
//! Each capability has a runnable example under `examples/`; the thin
//! `capmod` binary exposes the same operations as subcommands.

pub mod capacity;
pub mod error;
pub mod gen;
pub mod l0cap;
pub mod outer;
pub mod quasi;
pub mod report;
pub mod sobolev;
pub mod solver;
pub mod space;
pub mod study;
pub mod subset;
pub mod suite;
pub mod tangent;

pub use error::{Error, Result};
pub use l0cap::{CapClass, CapContext};
pub use sobolev::{MClass, VertexFunction};
pub use space::{build_space, grid_1d, grid_2d, shortest_path_metric, Space};
pub use subset::Subset;
pub use tangent::DartField;
