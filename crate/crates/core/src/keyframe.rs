//! Keyframe detection: label frames where the demonstrator's hand is absent
//! and keep the most confident frame of each settled run.

use alloc::vec::Vec;

use crate::error::Error;
use crate::sensor::ObservationFrame;

/// Default occluded-fraction threshold. The smallest hand blob (a 1x2 in a
/// plate corner) covers 20 of 2304 columns, about 0.87%.
pub const DEFAULT_OCCLUSION_THRESHOLD: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameLabel {
    pub is_keyframe: bool,
    pub confidence: f64,
}

/// Anything that can decide whether a frame shows a settled state.
pub trait KeyframeClassifier {
    fn classify(&self, frame: &ObservationFrame) -> FrameLabel;
}

/// Labels a frame by the fraction of occluded columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcclusionClassifier {
    pub threshold: f64,
}

impl Default for OcclusionClassifier {
    fn default() -> Self {
        OcclusionClassifier { threshold: DEFAULT_OCCLUSION_THRESHOLD }
    }
}

impl KeyframeClassifier for OcclusionClassifier {
    fn classify(&self, frame: &ObservationFrame) -> FrameLabel {
        classify_frame(frame, self.threshold)
    }
}

pub fn classify_frame(frame: &ObservationFrame, threshold: f64) -> FrameLabel {
    let occ = frame.occluded_fraction();
    FrameLabel { is_keyframe: occ < threshold, confidence: 1.0 - occ }
}

/// Index of the most confident frame in every maximal run of keyframes,
/// earliest on ties, in stream order.
pub fn select_keyframes(labels: &[FrameLabel]) -> Result<Vec<usize>, Error> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let mut picked = Vec::new();
    let mut best: Option<usize> = None;
    for (i, l) in labels.iter().enumerate() {
        if l.is_keyframe {
            match best {
                Some(b) if labels[b].confidence >= l.confidence => {}
                _ => best = Some(i),
            }
        } else if let Some(b) = best.take() {
            picked.push(b);
        }
    }
    picked.extend(best);
    if picked.is_empty() {
        return Err(Error::NoKeyframes);
    }
    Ok(picked)
}

/// Keeps one keyframe per settled run of the labeled stream.
pub fn sliding_filter<'a>(
    frames: &'a [ObservationFrame],
    labels: &[FrameLabel],
) -> Result<Vec<&'a ObservationFrame>, Error> {
    if frames.len() != labels.len() {
        return Err(Error::FrameMismatch);
    }
    Ok(select_keyframes(labels)?.into_iter().map(|i| &frames[i]).collect())
}

/// Classifies every frame and filters in one pass.
pub fn extract_keyframes<'a, C: KeyframeClassifier + ?Sized>(
    classifier: &C,
    frames: &'a [ObservationFrame],
) -> Result<Vec<&'a ObservationFrame>, Error> {
    let labels: Vec<FrameLabel> = frames.iter().map(|f| classifier.classify(f)).collect();
    sliding_filter(frames, &labels)
}
