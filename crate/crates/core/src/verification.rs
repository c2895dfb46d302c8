//! Simulation verification: replay each ranked candidate in a clean shadow
//! simulator and compare its rendering with the real keyframe.

use alloc::vec::Vec;

use crate::error::{Error, Infeasible};
use crate::extraction::CandidateTask;
use crate::model::{Assembly, BrickPlacement};
use crate::sensor::{dilate_columns, render_clean, ObservationFrame};

pub const DEFAULT_ACCEPT_THRESHOLD: f64 = 0.95;
pub const DEFAULT_DEPTH_TOLERANCE: f64 = 0.5;
pub const DEFAULT_ROI_MARGIN: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyParams {
    /// `δ_s`: accept the first candidate scoring strictly above this.
    pub threshold: f64,
    /// `τ_d`: depth agreement tolerance in brick heights.
    pub depth_tolerance: f64,
    /// Columns added around the candidate footprint to form the ROI.
    pub margin: i32,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            threshold: DEFAULT_ACCEPT_THRESHOLD,
            depth_tolerance: DEFAULT_DEPTH_TOLERANCE,
            margin: DEFAULT_ROI_MARGIN,
        }
    }
}

/// The verified-so-far structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowState {
    pub assembly: Assembly,
    /// Number of verified operations.
    pub step: usize,
}

impl ShadowState {
    pub fn new(assembly: Assembly) -> Self {
        ShadowState { assembly, step: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Via {
    Threshold,
    ArgmaxFallback,
    /// Rank-1 taken without verification (LfD ablation).
    Unverified,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trial {
    pub candidate: BrickPlacement,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Skipped {
    pub candidate: BrickPlacement,
    pub reason: Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationOutcome {
    pub accepted: BrickPlacement,
    pub score: f64,
    pub via: Via,
    /// Feasible candidates in the order they were tried.
    pub trials: Vec<Trial>,
    pub skipped: Vec<Skipped>,
}

/// Mean per-column agreement over `roi`: half for equal color readings, half
/// for depths within `depth_tolerance`.
pub fn similarity(
    real: &ObservationFrame,
    sim: &ObservationFrame,
    roi: &[usize],
    depth_tolerance: f64,
) -> Result<f64, Error> {
    if !real.same_dims(sim) {
        return Err(Error::FrameMismatch);
    }
    if roi.is_empty() {
        return Err(Error::EmptyRoi);
    }
    let mut agree = 0.0;
    for &i in roi {
        if real.color[i] == sim.color[i] {
            agree += 0.5;
        }
        if libm::fabs(real.depth[i] - sim.depth[i]) <= depth_tolerance {
            agree += 0.5;
        }
    }
    Ok(agree / roi.len() as f64)
}

/// Score of one candidate: the shadow state plus the candidate, rendered
/// clean, against the real keyframe over the candidate's dilated footprint.
pub fn score_candidate(
    assembly: &Assembly,
    candidate: &BrickPlacement,
    real: &ObservationFrame,
    params: &VerifyParams,
) -> Result<f64, Error> {
    let cells = assembly.footprint(candidate)?;
    let next = assembly.apply(*candidate)?;
    let roi = dilate_columns(assembly.bounds(), &cells, params.margin);
    similarity(real, &render_clean(&next, real.timestamp), &roi, params.depth_tolerance)
}

/// Tries candidates in rank order, accepting the first with `s > δ_s`, else
/// the best-scoring trial (earliest on ties). Infeasible candidates are
/// skipped. On success the shadow state advances by the accepted placement.
pub fn verify_candidates(
    state: &mut ShadowState,
    candidates: &[CandidateTask],
    real: &ObservationFrame,
    params: &VerifyParams,
) -> Result<VerificationOutcome, Error> {
    let mut trials: Vec<Trial> = Vec::new();
    let mut skipped = Vec::new();
    let mut accepted: Option<(Trial, Via)> = None;
    for c in candidates {
        match state.assembly.is_feasible(&c.placement) {
            Err(Error::Infeasible { verdict, .. }) => {
                skipped.push(Skipped { candidate: c.placement, reason: verdict });
                continue;
            }
            Err(e) => return Err(e),
            Ok(()) => {}
        }
        let score = score_candidate(&state.assembly, &c.placement, real, params)?;
        let trial = Trial { candidate: c.placement, score };
        trials.push(trial);
        if score > params.threshold {
            accepted = Some((trial, Via::Threshold));
            break;
        }
    }
    let (best, via) = match accepted {
        Some(a) => a,
        None => {
            let best = trials
                .iter()
                .copied()
                .reduce(|a, b| if b.score > a.score { b } else { a })
                .ok_or(Error::AllCandidatesInfeasible)?;
            (best, Via::ArgmaxFallback)
        }
    };
    state.assembly.push(best.candidate)?;
    state.step += 1;
    Ok(VerificationOutcome { accepted: best.candidate, score: best.score, via, trials, skipped })
}
