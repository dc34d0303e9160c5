pub mod cli;
pub mod condense;
pub mod doubledimer;
pub mod dtvertex;
pub mod error;
pub mod glue;
pub mod partitions;
pub mod ptvertex;
pub mod regions;
pub mod series;
pub mod symfun;

pub use error::{Error, Result};
