//! Discrete calculus on uniform time grids.
//!
//! Functions sampled on a grid are lifted to piecewise polynomials,
//! differentiated or integrated there, and projected back to the nodes. The
//! resulting discrete derivatives and antiderivatives turn an ODE into a
//! family of one-step and block schemes, and a Lagrangian into a discrete
//! action whose critical points are a variational integrator.

pub mod analysis;
pub mod embeddings;
pub mod error;
pub mod grid;
pub mod invariants;
pub mod lifts;
pub mod newton;
pub mod operators;
pub mod sum;
pub mod variational;

pub use embeddings::{coherence_check, integrate, CoherenceReport, Method, OdeField, SchemeKind, Trajectory};
pub use error::{Error, Result};
pub use grid::{discretise, DiscreteFunction, Support, TimeGrid};
pub use newton::SolverConfig;
pub use operators::OperatorKind;
pub use variational::Lagrangian;
