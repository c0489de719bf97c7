//! Uniform asymptotic approximation of the antiplane-shear transmission
//! Green's function for a disk containing small circular inclusions,
//! together with an independent collocation solver used to check it.

pub mod asymptotic;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod model_fields;
pub mod numerics;
pub mod oracle;
pub mod probes;
pub mod reproduce;

pub use asymptotic::{AsymptoticModel, GreenEvaluation, Term, TermKind};
pub use diagnostics::{ConvergenceReport, DecayReport};
pub use error::{Error, Result};
pub use geometry::{point, Inclusion, Material, Point, Region, Scenario, Violation};
pub use grid::{Axis, GridField, GridSpec, Quantity};
pub use model_fields::{CircularInclusionFields, DiskNeumann, Side};
pub use oracle::{BasisKind, DiscrepancyReport, OracleOptions, OracleSolution};
pub use probes::ProbeSet;
