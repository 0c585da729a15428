//! Necklaces of p-isogenies on elliptic curves over finite fields, and the
//! rational points of non-split Cartan modular curves they describe.

pub mod bridge;
pub mod cartan;
pub mod cmred;
pub mod ec;
pub mod error;
pub mod ff;
pub mod isog;
pub mod util;
pub mod xcount;

pub use error::{Error, Result};
