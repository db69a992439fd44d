//! Stretched coherent states and their operator algebra in a truncated
//! number basis.

pub mod block;
pub mod cli;
pub mod composite;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod report;
pub mod states;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{FockOperator, FockVector, StretchLabel, TruncationConfig};
pub use operators::SqueezeLabel;
