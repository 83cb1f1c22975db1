pub mod biring;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod exactalg;
pub mod funceq;
pub mod geometry;
pub mod ideals;
pub mod series;

pub use error::{Error, Result};
