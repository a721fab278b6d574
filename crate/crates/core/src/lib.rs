//! Exact computation for geometrically regular weighted shifts.

pub mod analysis;
pub mod berger;
pub mod completion;
pub mod error;
pub mod hankel;
pub mod interval;
pub mod model;
pub mod rational;
pub mod registry;
pub mod report;
pub mod sequence;
pub mod transforms;

pub use error::{GrwsError, Result};
pub use model::{Sector, SectorLabel, ShiftParams};
pub use rational::Rational;
