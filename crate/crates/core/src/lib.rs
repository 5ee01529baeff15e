//! Constructing explicit equivalences between rational quadratic forms in
//! the same genus, with denominators restricted to a prescribed prime set.

pub mod exact;
pub mod error;
pub mod padiclin;
pub mod quadform;

pub use error::{Error, Result};
pub mod cayley;
pub mod pipeline;
pub mod cli;
