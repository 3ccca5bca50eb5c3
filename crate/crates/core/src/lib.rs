pub mod error;
pub mod ff;
pub mod laurent;
pub mod ore;
pub mod drinfeld;
pub mod filtration;
pub mod kummer;
mod linalg;
pub mod uniformizer;

pub use error::{Error, Result};
