pub mod analysis;
mod arith;
pub mod characters;
pub mod constructions;
pub mod cyclo;
pub mod error;
pub mod field;
pub mod io;
pub mod report;
pub mod spectrum;
pub mod table;
pub mod tower;
pub mod verify;

pub use cyclo::CycloSum;
pub use error::{Error, Result};
pub use field::{build_field, FieldCtx, FieldElement, DEFAULT_BUDGET};
pub use report::CheckReport;
pub use tower::{Level, TowerCtx, TowerParams};
