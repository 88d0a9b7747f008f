pub mod applications;
pub mod competitors;
pub mod driver;
pub mod error;
pub mod local;
pub mod mv;
pub mod numerics;
pub mod testbed;

pub use error::{Error, Result};
