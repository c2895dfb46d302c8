//! End-to-end learning: frames → keyframes → per-operation extraction →
//! simulation verification → construction plan.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::time::Duration;

use crate::catalog::Catalog;
use crate::error::Error;
use crate::extraction::{rank_candidates, DifferencingEstimator, TaskEstimator, DEFAULT_CHANGE_THRESHOLD, SIGMA_FLOOR};
use crate::keyframe::{extract_keyframes, OcclusionClassifier, DEFAULT_OCCLUSION_THRESHOLD};
use crate::model::{Assembly, Bounds, BrickPlacement};
use crate::plan::{structure_cost, ConstructionPlan};
use crate::sensor::{expand_demo, DemonstrationTrace, FrameSource, NoiseConfig, ObservationFrame};
use crate::verification::{
    score_candidate, verify_candidates, ShadowState, Trial, VerificationOutcome, VerifyParams, Via,
};

pub const DEFAULT_MAX_CANDIDATES: usize = 50;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PipelineConfig {
    pub catalog: Catalog,
    pub bounds: Bounds,
    /// Sensor noise for live sessions and metrics sweeps; batch learning uses
    /// the trace's own sensor settings.
    pub noise: NoiseConfig,
    pub occlusion_threshold: f64,
    pub change_threshold: f64,
    pub max_candidates: usize,
    pub sigma_floor: f64,
    pub verify: VerifyParams,
    /// `false` takes the rank-1 candidate unverified.
    pub verification_enabled: bool,
    pub frames_per_state: usize,
    pub occlusion_frames_per_event: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            catalog: Catalog::default(),
            bounds: Bounds::default(),
            noise: NoiseConfig::ZERO,
            occlusion_threshold: DEFAULT_OCCLUSION_THRESHOLD,
            change_threshold: DEFAULT_CHANGE_THRESHOLD,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            sigma_floor: SIGMA_FLOOR,
            verify: VerifyParams::default(),
            verification_enabled: true,
            frames_per_state: 3,
            occlusion_frames_per_event: 2,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        self.noise.validate()?;
        if !open_unit(self.occlusion_threshold) {
            return Err(Error::InvalidConfig("occlusion_threshold must lie in (0, 1)"));
        }
        if !(self.change_threshold > 0.0 && self.change_threshold.is_finite()) {
            return Err(Error::InvalidConfig("change_threshold must be positive"));
        }
        if self.max_candidates == 0 {
            return Err(Error::InvalidConfig("max_candidates must be >= 1"));
        }
        if self.sigma_floor.is_nan() || self.sigma_floor <= 0.0 {
            return Err(Error::InvalidConfig("sigma_floor must be positive"));
        }
        if !(0.0..=1.0).contains(&self.verify.threshold) {
            return Err(Error::InvalidConfig("verification threshold must lie in [0, 1]"));
        }
        if self.verify.depth_tolerance.is_nan() || self.verify.depth_tolerance < 0.0 || self.verify.margin < 0 {
            return Err(Error::InvalidConfig("depth tolerance and ROI margin must be >= 0"));
        }
        if self.frames_per_state == 0 || self.occlusion_frames_per_event == 0 {
            return Err(Error::InvalidConfig("frame counts must be >= 1"));
        }
        Ok(())
    }

    pub fn without_verification(mut self) -> Self {
        self.verification_enabled = false;
        self
    }

    fn classifier(&self) -> OcclusionClassifier {
        OcclusionClassifier { threshold: self.occlusion_threshold }
    }

    /// A trace over `events` using this config's sensor settings.
    pub fn trace(&self, events: Vec<BrickPlacement>) -> DemonstrationTrace {
        DemonstrationTrace {
            events,
            sensor: self.noise,
            frames_per_state: self.frames_per_state,
            occlusion_frames_per_event: self.occlusion_frames_per_event,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepReport {
    /// 1-based operation index.
    pub step: usize,
    /// The operation actually demonstrated, when known.
    pub demonstrated: Option<BrickPlacement>,
    pub candidates: usize,
    pub outcome: Option<VerificationOutcome>,
    pub failure: Option<String>,
}

impl StepReport {
    pub fn accepted(&self) -> Option<BrickPlacement> {
        self.outcome.as_ref().map(|o| o.accepted)
    }

    pub fn is_ok(&self) -> bool {
        self.outcome.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LearnReport {
    pub plan: ConstructionPlan,
    pub steps: Vec<StepReport>,
    /// Every step produced a placement and the learned structure equals the
    /// demonstrated one.
    pub success: bool,
    pub cost: usize,
    pub elapsed: Option<Duration>,
}

impl LearnReport {
    pub fn failed_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_ok()).count()
    }

    /// Mean number of feasible candidates tried per completed step.
    pub fn mean_trials(&self) -> f64 {
        let done: Vec<_> = self.steps.iter().filter_map(|s| s.outcome.as_ref()).collect();
        if done.is_empty() {
            return 0.0;
        }
        done.iter().map(|o| o.trials.len() as f64).sum::<f64>() / done.len() as f64
    }
}

/// Per-operation learner shared by batch and live modes.
#[derive(Clone, Debug)]
pub struct Learner {
    cfg: PipelineConfig,
    estimator: DifferencingEstimator,
    state: ShadowState,
    steps: Vec<StepReport>,
}

impl Learner {
    pub fn new(cfg: PipelineConfig) -> Self {
        let estimator = DifferencingEstimator { catalog: cfg.catalog.clone(), change_threshold: cfg.change_threshold };
        let state = ShadowState::new(Assembly::new(cfg.catalog.clone(), cfg.bounds));
        Learner { cfg, estimator, state, steps: Vec::new() }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// The learned structure so far.
    pub fn assembly(&self) -> &Assembly {
        &self.state.assembly
    }

    pub fn steps(&self) -> &[StepReport] {
        &self.steps
    }

    pub fn plan(&self) -> ConstructionPlan {
        ConstructionPlan::assembly(self.state.assembly.placements())
    }

    /// Learns one operation from the keyframes before and after it.
    pub fn step(
        &mut self,
        before: &ObservationFrame,
        after: &ObservationFrame,
        demonstrated: Option<BrickPlacement>,
    ) -> &StepReport {
        let step = self.steps.len() + 1;
        let mut report = StepReport { step, demonstrated, candidates: 0, outcome: None, failure: None };
        match self.try_step(before, after, &mut report.candidates) {
            Ok(outcome) => report.outcome = Some(outcome),
            Err(e) => report.failure = Some(e.to_string()),
        }
        self.steps.push(report);
        self.steps.last().expect("just pushed")
    }

    fn try_step(
        &mut self,
        before: &ObservationFrame,
        after: &ObservationFrame,
        n_candidates: &mut usize,
    ) -> Result<VerificationOutcome, Error> {
        let delta = self.estimator.estimate(before, after)?;
        let candidates =
            rank_candidates(&delta, &self.cfg.catalog, self.cfg.bounds, self.cfg.max_candidates, self.cfg.sigma_floor)?;
        *n_candidates = candidates.len();
        if self.cfg.verification_enabled {
            return verify_candidates(&mut self.state, &candidates, after, &self.cfg.verify);
        }
        let first = candidates[0].placement;
        self.state.assembly.is_feasible(&first)?;
        let score = score_candidate(&self.state.assembly, &first, after, &self.cfg.verify)?;
        self.state.assembly.push(first)?;
        self.state.step += 1;
        Ok(VerificationOutcome {
            accepted: first,
            score,
            via: Via::Unverified,
            trials: alloc::vec![Trial { candidate: first, score }],
            skipped: Vec::new(),
        })
    }

    /// Final report against the demonstrated target.
    pub fn report(&self, target: &Assembly) -> Result<LearnReport, Error> {
        let cost = structure_cost(target, &self.state.assembly)?.total;
        let all_ok = self.steps.iter().all(StepReport::is_ok);
        Ok(LearnReport {
            plan: self.plan(),
            steps: self.steps.clone(),
            success: all_ok && cost == 0,
            cost,
            elapsed: None,
        })
    }
}

/// Learns a construction plan from a recorded demonstration.
pub fn learn(trace: &DemonstrationTrace, cfg: &PipelineConfig) -> Result<LearnReport, Error> {
    cfg.validate()?;
    let frames = expand_demo(trace, &cfg.catalog, cfg.bounds)?;
    learn_from_frames(trace, &frames, cfg)
}

/// Like [`learn`] over an already expanded frame stream, so paired runs can
/// share one noisy observation sequence.
pub fn learn_from_frames(
    trace: &DemonstrationTrace,
    frames: &[ObservationFrame],
    cfg: &PipelineConfig,
) -> Result<LearnReport, Error> {
    let target = trace.target(&cfg.catalog, cfg.bounds)?;
    let keyframes = extract_keyframes(&cfg.classifier(), frames)?;
    let expected = trace.events.len() + 1;
    if keyframes.len() != expected {
        return Err(Error::KeyframeCountMismatch { expected, found: keyframes.len() });
    }
    let mut learner = Learner::new(cfg.clone());
    for (pair, truth) in keyframes.windows(2).zip(&trace.events) {
        learner.step(pair[0], pair[1], Some(*truth));
    }
    learner.report(&target)
}

/// Incremental learning driven one placement at a time.
#[derive(Clone, Debug)]
pub struct LiveSession {
    source: FrameSource,
    learner: Learner,
    last_keyframe: ObservationFrame,
    frames: Vec<ObservationFrame>,
}

impl LiveSession {
    pub fn new(cfg: PipelineConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let mut source = FrameSource::new(
            cfg.catalog.clone(),
            cfg.bounds,
            cfg.noise,
            cfg.frames_per_state,
            cfg.occlusion_frames_per_event,
        );
        let frames = source.settled();
        let last_keyframe = single_keyframe(&cfg, &frames)?;
        Ok(LiveSession { source, learner: Learner::new(cfg), last_keyframe, frames })
    }

    /// Records a demonstrated placement and learns it. Infeasible placements
    /// are rejected without touching the session.
    pub fn place(&mut self, b: BrickPlacement) -> Result<&StepReport, Error> {
        self.source.assembly().is_feasible(&b)?;
        let frames = self.source.place(b)?;
        let kf = single_keyframe(self.learner.config(), &frames)?;
        let before = core::mem::replace(&mut self.last_keyframe, kf);
        self.frames.extend(frames);
        Ok(self.learner.step(&before, &self.last_keyframe, Some(b)))
    }

    pub fn demonstrated(&self) -> &Assembly {
        self.source.assembly()
    }

    pub fn learner(&self) -> &Learner {
        &self.learner
    }

    pub fn frames(&self) -> &[ObservationFrame] {
        &self.frames
    }

    pub fn report(&self) -> Result<LearnReport, Error> {
        self.learner.report(self.source.assembly())
    }
}

fn single_keyframe(cfg: &PipelineConfig, frames: &[ObservationFrame]) -> Result<ObservationFrame, Error> {
    let kfs = extract_keyframes(&cfg.classifier(), frames)?;
    match kfs.as_slice() {
        [kf] => Ok((*kf).clone()),
        _ => Err(Error::KeyframeCountMismatch { expected: 1, found: kfs.len() }),
    }
}
