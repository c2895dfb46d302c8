//! Simulation-aided learning of LEGO assembly plans from demonstration.
//!
//! A demonstration is a sequence of brick placements observed by a noisy
//! top-down color/depth sensor. The pipeline detects settled keyframes,
//! extracts a ranked list of candidate brick operations between consecutive
//! keyframes, and verifies candidates by replaying them in a clean shadow
//! simulator until one matches the real observation. The verified operations
//! form a construction plan, and its reversal a disassembly plan.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod error;
pub mod extraction;
pub mod fixtures;
pub mod keyframe;
pub mod model;
pub mod pipeline;
pub mod plan;
pub mod sensor;
pub mod verification;

pub use catalog::{BrickId, BrickType, Catalog, Color, Orientation};
pub use error::{Error, Infeasible};
pub use model::{footprint, Assembly, Bounds, BrickPlacement, Cell};
pub use pipeline::{learn, LearnReport, LiveSession, PipelineConfig, StepReport};
pub use plan::{reverse_plan, structure_cost, Action, ConstructionPlan, StructureCost, Task};
pub use sensor::{DemonstrationTrace, NoiseConfig, ObservationFrame};
pub use verification::{VerificationOutcome, Via};
