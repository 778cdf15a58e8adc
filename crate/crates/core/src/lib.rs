//! Windowed arbitrarily varying channels.
//!
//! Finite-alphabet channels `W(y|x,s)` whose input and state sequences must
//! keep every sliding-window empirical type inside a polytope. The crate
//! provides the probability primitives, a dense simplex solver, window
//! verification, symmetrizability tests, capacity solvers, a three-phase
//! list-code/hash/key construction and oblivious jammers.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod capacity;
pub mod codec;
pub mod constraint;
pub mod error;
pub mod jammer;
pub mod lp;
pub(crate) mod math;
pub mod prob;
pub mod spec;
pub mod symmetrize;
pub mod window;

pub use constraint::{ConstraintSet, HalfSpace, Membership};
pub use error::{Error, Result};
pub use prob::{Alphabet, Channel, Distribution, EmpiricalType, Symbol};
pub use spec::WindowedAvcSpec;
