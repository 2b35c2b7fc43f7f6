pub mod certify;
pub mod cli;
pub mod error;
pub mod families;
pub mod model;
pub mod npsolver;
pub mod oracle;
pub mod simplex;

pub use error::{Error, Result};
