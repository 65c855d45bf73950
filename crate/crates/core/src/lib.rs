//! Finite-resolution laboratory for graphings of measured equivalence
//! relations.
//!
//! A [`Graphing`] over a [`FiniteMeasuredSpace`] carries the simplicial
//! metric, boundaries and generator words. On top of it the crate measures
//! concentration ([`concentration`]), invariance defects, spectral gaps and
//! small-boundary (Følner) sets ([`folner`]), and ships brute-force reference
//! implementations for small instances ([`oracle`]).

pub mod atoms;
pub mod concentration;
pub mod error;
pub mod folner;
pub mod generators;
pub mod graphing;
pub mod oracle;
pub mod space;

pub use atoms::{Atom, AtomSet};
pub use error::{Error, Result};
pub use graphing::{build_graphing, Distance, Graphing};
pub use space::{make_space, FiniteMeasuredSpace, PartialIsomorphism};
