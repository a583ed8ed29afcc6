//! Schofield pairs of exceptional modules over Euclidean quivers, computed
//! on the dimension-vector lattice.

pub mod appendix;
pub mod catalog;
pub mod error;
pub mod forms;
pub mod golden;
pub mod lattice;
pub mod oracle;
pub mod quiver;
pub mod reflection;
pub mod report;
pub mod schofield;
pub mod verify;

pub use catalog::{Family, ModuleId, TubeLabel, TubeLayout};
pub use error::{Error, Result};
pub use forms::EuclideanQuiver;
pub use lattice::{DimVector, IntMatrix};
pub use quiver::{parse_quiver, CanonicalPreset, EuclideanType, Quiver};
pub use schofield::{Characterization, Member, PairReport, SchofieldPair, Side};
