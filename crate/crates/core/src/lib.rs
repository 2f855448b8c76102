//! Characteristic maps of the probability-measure functor on finite
//! poset-indexed diagrams of finite sets.
//!
//! The crate computes limits of such diagrams, the marginalization map
//! `χ : P(lim D) → lim P(D)`, glues consistent marginal families into joint
//! measures, and certifies surjectivity and openness of `χ` with exact
//! rational polyhedral computations.

pub mod chi;
pub mod diagram;
pub mod generate;
pub mod glue;
pub mod instances;
pub mod measure;
pub mod polytope;
pub mod rational;
pub mod registry;

pub use rational::Q;
