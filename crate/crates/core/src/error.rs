use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::catalog::BrickId;
use crate::model::{Bounds, Cell};

/// Why a placement cannot be added to an assembly. Each verdict carries the
/// offending cells.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "verdict", content = "cells"))]
pub enum Infeasible {
    #[error("out of bounds at {}", CellList(.0))]
    OutOfBounds(Vec<Cell>),
    #[error("collision at {}", CellList(.0))]
    Collision(Vec<Cell>),
    #[error("unsupported brick at {}", CellList(.0))]
    Unsupported(Vec<Cell>),
}

impl Infeasible {
    pub fn cells(&self) -> &[Cell] {
        match self {
            Infeasible::OutOfBounds(c) | Infeasible::Collision(c) | Infeasible::Unsupported(c) => c,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Infeasible::OutOfBounds(_) => "OutOfBounds",
            Infeasible::Collision(_) => "Collision",
            Infeasible::Unsupported(_) => "Unsupported",
        }
    }
}

struct CellList<'a>(&'a [Cell]);

impl fmt::Display for CellList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("unknown brick id {0}")]
    UnknownBrick(BrickId),
    #[error("invalid orientation {0}, expected 0 or 1")]
    InvalidOrientation(u8),
    #[error("invalid catalog: {0}")]
    InvalidCatalog(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("step {step}: {verdict}")]
    Infeasible { step: usize, verdict: Infeasible },
    #[error("workspace bounds differ: {0} vs {1}")]
    BoundsMismatch(Bounds, Bounds),
    #[error("plan step {expected} is missing (found step {found})")]
    StepGap { expected: usize, found: usize },
    #[error("step {step}: placement is not part of the assembly")]
    MissingPlacement { step: usize },
    #[error("plan already contains disassemble actions")]
    NotAnAssemblyPlan,
    #[error("frame dimensions do not match")]
    FrameMismatch,
    #[error("frame stream is empty")]
    EmptyStream,
    #[error("no frame in the stream is labeled as a keyframe")]
    NoKeyframes,
    #[error("no brick operation detected between keyframes")]
    NoChange,
    #[error("no geometrically valid candidate in the search window")]
    NoCandidates,
    #[error("region of interest is empty")]
    EmptyRoi,
    #[error("every candidate is infeasible in the current state")]
    AllCandidatesInfeasible,
    #[error("expected {expected} keyframes, detected {found}")]
    KeyframeCountMismatch { expected: usize, found: usize },
}
