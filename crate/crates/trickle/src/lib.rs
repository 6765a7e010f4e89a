//! Trickle-down Markov chains on directed acyclic graphs.
//!
//! A trickle-down process grows a connected subset of a DAG: particles are
//! fed one at a time at the root, each one descends through occupied
//! vertices (routed by an independent per-vertex "routing chain" on the
//! counts of onward routings) and comes to rest at the first vacant vertex.
//! Binary search trees, digital search trees, random recursive trees,
//! Chinese restaurant trees, Mallows trees, q-binomial trees, uniform
//! (Catalan) binary trees and a uniform composition chain all arise this
//! way.
//!
//! The crate provides, in exact rational arithmetic:
//!
//! * the substrate graphs and the trickle-down engine ([`substrate`],
//!   [`engine`]),
//! * per-family transition laws and closed-form hitting probabilities
//!   ([`routing`]),
//! * a brute-force oracle for distributions and hitting probabilities
//!   ([`oracle`]),
//! * interior and extended (boundary) Martin kernels ([`kernels`]),
//! * Doob h-transforms and trickle-up samplers ([`transforms`]),
//! * boundary measures on killed path space and limit-law samplers
//!   ([`boundary`]),
//! * permutation/tree/composition bijections ([`bijections`]).

pub mod bijections;
pub mod boundary;
pub mod checks;
pub mod engine;
pub mod kernels;
pub mod numeric;
pub mod oracle;
pub mod routing;
pub mod stats;
pub mod substrate;
pub mod transforms;

mod error;

pub use error::TrickleError;
pub use numeric::Rat;

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, TrickleError>;
