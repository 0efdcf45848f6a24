//! Polynomial identity testing for nonassociative arithmetic circuits.

pub mod algebra;
pub mod circuit;
pub mod corpus;
pub mod error;
pub mod ffield;
pub mod hitting;
pub mod monomial;
pub mod oracle;
pub mod randpit;
pub mod strategy;
pub mod verify;
pub mod whitebox;
pub mod zpoly;

pub use circuit::{Circuit, CircuitBuilder, GateKind, Mode};
pub use error::{Error, Result};
pub use ffield::{Field, FieldElem};
pub use monomial::Monomial;
