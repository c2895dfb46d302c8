//! Virtual top-down RGB-D sensor.
//!
//! A frame is a per-column grid of the topmost visible color and height (in
//! brick-height units, baseplate = 0), plus a mask of columns covered by the
//! demonstrator's hand. Noise reproduces the two observation ambiguities of
//! LEGO demonstrations: dark bricks blending into the background, and
//! identical bricks reading at different depths because of a per-brick bias.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog::{Catalog, Color};
use crate::error::Error;
use crate::model::{Assembly, Bounds, BrickPlacement, Cell};

/// Columns around an event footprint hidden by the hand while placing.
pub const OCCLUSION_MARGIN: i32 = 3;

const BIAS_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservationFrame {
    pub width: u16,
    pub height: u16,
    /// Row-major; `None` is background.
    pub color: Vec<Option<Color>>,
    pub depth: Vec<f64>,
    pub occlusion: Vec<bool>,
    pub timestamp: u64,
}

impl ObservationFrame {
    pub fn empty(bounds: Bounds, timestamp: u64) -> Self {
        let n = bounds.columns();
        ObservationFrame {
            width: bounds.x,
            height: bounds.y,
            color: vec![None; n],
            depth: vec![0.0; n],
            occlusion: vec![false; n],
            timestamp,
        }
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    pub fn same_dims(&self, other: &ObservationFrame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Row-major index of column `(x, y)` if it lies on the frame.
    pub fn index(&self, x: i32, y: i32) -> Option<usize> {
        ((1..=self.width as i32).contains(&x) && (1..=self.height as i32).contains(&y))
            .then(|| (y - 1) as usize * self.width as usize + (x - 1) as usize)
    }

    pub fn xy(&self, index: usize) -> (i32, i32) {
        let w = self.width as usize;
        ((index % w) as i32 + 1, (index / w) as i32 + 1)
    }

    pub fn occluded_fraction(&self) -> f64 {
        if self.occlusion.is_empty() {
            return 0.0;
        }
        self.occlusion.iter().filter(|&&o| o).count() as f64 / self.occlusion.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct NoiseConfig {
    /// Per-cell, per-frame depth noise std (brick heights).
    pub depth_sigma: f64,
    /// Per-brick depth bias std, drawn once per trace (brick heights).
    pub bias_sigma: f64,
    /// Probability that a dark cell reads as background.
    pub p_dark: f64,
    /// Probability that a brick cell reads as an adjacent palette color.
    pub p_flip: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub const ZERO: NoiseConfig = NoiseConfig { depth_sigma: 0.0, bias_sigma: 0.0, p_dark: 0.0, p_flip: 0.0, seed: 0 };

    pub fn with_seed(self, seed: u64) -> Self {
        NoiseConfig { seed, ..self }
    }

    pub fn is_zero(&self) -> bool {
        self.depth_sigma == 0.0 && self.bias_sigma == 0.0 && self.p_dark == 0.0 && self.p_flip == 0.0
    }

    pub fn validate(&self) -> Result<(), Error> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.p_dark) || !prob(self.p_flip) {
            return Err(Error::InvalidConfig("noise probabilities must lie in [0, 1]"));
        }
        if !(self.depth_sigma >= 0.0 && self.bias_sigma >= 0.0)
            || !self.depth_sigma.is_finite()
            || !self.bias_sigma.is_finite()
        {
            return Err(Error::InvalidConfig("noise standard deviations must be finite and >= 0"));
        }
        Ok(())
    }

    /// Depth bias of the brick placed at event `index`; constant for the trace.
    pub fn brick_bias(&self, index: usize) -> f64 {
        if self.bias_sigma == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ BIAS_STREAM_SALT);
        rng.set_stream(index as u64);
        let z: f64 = rng.sample(StandardNormal);
        z * self.bias_sigma
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::ZERO
    }
}

/// Per-brick depth bias, indexed like `Assembly::placements`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BrickBias(pub Vec<f64>);

impl BrickBias {
    pub fn draw(cfg: &NoiseConfig, n: usize) -> Self {
        BrickBias((0..n).map(|i| cfg.brick_bias(i)).collect())
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0.get(index).copied().unwrap_or(0.0)
    }
}

/// Noise-free observation of `assembly`.
pub fn render_clean(assembly: &Assembly, timestamp: u64) -> ObservationFrame {
    let bounds = assembly.bounds();
    let mut frame = ObservationFrame::empty(bounds, timestamp);
    for (i, top) in assembly.surface().into_iter().enumerate() {
        if let Some((z, brick)) = top {
            frame.depth[i] = z as f64;
            frame.color[i] = Some(assembly.placements()[brick].color);
        }
    }
    frame
}

/// Applies depth bias and noise, dark-color dropout and color flips.
///
/// `surface` is the assembly's [`Assembly::surface`] and tells which brick's
/// bias applies to each column. The random stream is keyed by
/// `(cfg.seed, frame.timestamp)`, so the result is reproducible frame by frame.
pub fn corrupt(
    frame: &ObservationFrame,
    surface: &[Option<(i32, usize)>],
    cfg: &NoiseConfig,
    bias: &BrickBias,
) -> ObservationFrame {
    let mut out = frame.clone();
    if cfg.is_zero() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(frame.timestamp);
    for i in 0..out.len() {
        let gauss: f64 = rng.sample(StandardNormal);
        let u_dark: f64 = rng.random();
        let u_flip: f64 = rng.random();
        let forward: bool = rng.random();

        let offset = surface.get(i).copied().flatten().map_or(0.0, |(_, b)| bias.get(b));
        out.depth[i] += offset + cfg.depth_sigma * gauss;

        if let Some(c) = out.color[i] {
            if c.is_dark() && u_dark < cfg.p_dark {
                out.color[i] = None;
            } else if u_flip < cfg.p_flip {
                out.color[i] = Some(c.adjacent(forward));
            }
        }
    }
    out
}

/// Recorded demonstration: the true brick operations plus sensor settings.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DemonstrationTrace {
    pub events: Vec<BrickPlacement>,
    pub sensor: NoiseConfig,
    pub frames_per_state: usize,
    pub occlusion_frames_per_event: usize,
}

impl DemonstrationTrace {
    pub fn new(events: Vec<BrickPlacement>, sensor: NoiseConfig) -> Self {
        DemonstrationTrace { events, sensor, frames_per_state: 3, occlusion_frames_per_event: 2 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sensor.seed = seed;
        self
    }

    /// Expected frame count of [`expand_demo`].
    pub fn frame_count(&self) -> usize {
        let n = self.events.len();
        self.frames_per_state * (n + 1) + self.occlusion_frames_per_event * n
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.sensor.validate()?;
        if self.frames_per_state == 0 {
            return Err(Error::InvalidConfig("frames_per_state must be >= 1"));
        }
        if self.occlusion_frames_per_event == 0 && !self.events.is_empty() {
            return Err(Error::InvalidConfig("occlusion_frames_per_event must be >= 1"));
        }
        Ok(())
    }

    /// Ground-truth assembly after all events.
    pub fn target(&self, catalog: &Catalog, bounds: Bounds) -> Result<Assembly, Error> {
        Assembly::from_placements(catalog.clone(), bounds, &self.events)
    }
}

/// Incremental frame generator over a growing demonstrated assembly.
#[derive(Clone, Debug)]
pub struct FrameSource {
    assembly: Assembly,
    noise: NoiseConfig,
    bias: BrickBias,
    next_timestamp: u64,
    frames_per_state: usize,
    occlusion_frames: usize,
}

impl FrameSource {
    pub fn new(
        catalog: Catalog,
        bounds: Bounds,
        noise: NoiseConfig,
        frames_per_state: usize,
        occlusion_frames: usize,
    ) -> Self {
        FrameSource {
            assembly: Assembly::new(catalog, bounds),
            noise,
            bias: BrickBias::default(),
            next_timestamp: 0,
            frames_per_state,
            occlusion_frames,
        }
    }

    pub fn assembly(&self) -> &Assembly {
        &self.assembly
    }

    pub fn bias(&self) -> &BrickBias {
        &self.bias
    }

    /// Settled frames of the current state.
    pub fn settled(&mut self) -> Vec<ObservationFrame> {
        let surface = self.assembly.surface();
        (0..self.frames_per_state).map(|_| self.observe(&surface, &[])).collect()
    }

    /// Hand-occluded frames while `b` is placed, then settled frames of the new
    /// state. The assembly is left unchanged when `b` is infeasible.
    pub fn place(&mut self, b: BrickPlacement) -> Result<Vec<ObservationFrame>, Error> {
        let cells = self.assembly.footprint(&b)?;
        self.assembly.push(b)?;
        self.bias.0.push(self.noise.brick_bias(self.assembly.len() - 1));
        let hand = occlusion_blob(self.assembly.bounds(), &cells);
        let surface = self.assembly.surface();
        let mut frames: Vec<_> = (0..self.occlusion_frames).map(|_| self.observe(&surface, &hand)).collect();
        frames.extend(self.settled());
        Ok(frames)
    }

    fn observe(&mut self, surface: &[Option<(i32, usize)>], hand: &[usize]) -> ObservationFrame {
        let mut clean = render_clean(&self.assembly, self.next_timestamp);
        self.next_timestamp += 1;
        for &i in hand {
            clean.occlusion[i] = true;
        }
        corrupt(&clean, surface, &self.noise, &self.bias)
    }
}

/// Column indices within `OCCLUSION_MARGIN` of `cells`, clipped to the plate.
pub fn occlusion_blob(bounds: Bounds, cells: &[Cell]) -> Vec<usize> {
    dilate_columns(bounds, cells, OCCLUSION_MARGIN)
}

/// Column indices within Chebyshev distance `margin` of any of `cells`.
pub fn dilate_columns(bounds: Bounds, cells: &[Cell], margin: i32) -> Vec<usize> {
    let mut mask = vec![false; bounds.columns()];
    for c in cells {
        for y in (c.y - margin).max(1)..=(c.y + margin).min(bounds.y as i32) {
            for x in (c.x - margin).max(1)..=(c.x + margin).min(bounds.x as i32) {
                mask[bounds.column(x, y)] = true;
            }
        }
    }
    mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
}

/// Frame stream of a whole demonstration: settled frames of the empty plate,
/// then for each event its occluded frames followed by settled frames.
pub fn expand_demo(
    trace: &DemonstrationTrace,
    catalog: &Catalog,
    bounds: Bounds,
) -> Result<Vec<ObservationFrame>, Error> {
    trace.validate()?;
    let mut src = FrameSource::new(
        catalog.clone(),
        bounds,
        trace.sensor,
        trace.frames_per_state,
        trace.occlusion_frames_per_event,
    );
    let mut frames = Vec::with_capacity(trace.frame_count());
    frames.extend(src.settled());
    for b in &trace.events {
        frames.extend(src.place(*b)?);
    }
    Ok(frames)
}
