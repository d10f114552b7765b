//! Exact Fourier coefficients of vector-valued Eisenstein series for the Weil
//! representation of an even lattice, and the constructions built on them:
//! positive auxiliary forms, holomorphic quotient decompositions, obstruction
//! checks and prescribed principal parts for Borcherds products.

pub mod arith;
pub mod battery;
pub mod borcherds;
pub mod cyclotomic;
pub mod eisenstein;
pub mod enumerate;
pub mod error;
pub mod json;
pub mod lattice;
pub mod localdata;
pub mod matrix;
pub mod num;
pub mod qseries;
pub mod weilrep;

pub use error::{Error, ErrorKind, Result};
pub use lattice::{CosetSign, CosetValue, DiscriminantForm, EvenLattice, Representation};
pub use num::Rational;
