//! Random walks on the directed block model.
//!
//! A directed block model is built from `m` independent directed Erdős–Rényi
//! graphs on `n` vertices each, whose edges are independently rewired with
//! probability `alpha` to the same-label vertex of another community. This
//! crate generates such graphs and provides the numerical machinery used to
//! study the random walk on them:
//!
//! - [`graph`]: generation, degrees, gates, strong connectivity, file formats.
//! - [`walk`]: exact distribution evolution, stationary measures, total
//!   variation profiles, trajectory sampling and jump times.
//! - [`meanfield`]: the community-level kernel and the limiting profiles.
//! - [`qsd`]: gate analysis, quasi-stationary distributions and hitting times.
//! - [`annealed`]: the walk that reveals the graph as it goes.
//! - [`proxy`]: proxy equilibrium measures built from short evolutions.
//! - [`stats`]: goodness-of-fit helpers shared by tests and experiments.

pub mod annealed;
pub mod error;
pub mod graph;
pub mod meanfield;
pub mod proxy;
pub mod qsd;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{DbmParams, DegreeTable, Digraph};
pub use rng::SeedTree;
pub use walk::ProbVector;
