//! Contact Hamiltonians on `R^{2n+1}` whose Reeb flows carry a prescribed
//! invariant set of a torus flow, together with the numerical certificates
//! and orbit dynamics that check the construction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contact;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod ode;
pub mod phase;
pub mod quadratic;
pub mod rng;
pub mod scenario;
pub mod torus;
pub mod trig;
pub mod verify;

pub use error::{Error, Result};
