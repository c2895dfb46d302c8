//! Task extraction from a pair of consecutive keyframes.
//!
//! The estimator differences the two depth maps, keeps the dominant changed
//! region and reports a real-valued anchor estimate `μ_p` together with soft
//! type and orientation scores. For candidate enumeration each (type,
//! orientation) pair gets its own anchor estimate, the region centroid minus
//! half that footprint, so a few stray changed cells widening the bounding box
//! do not push the true anchor out of the search window. Candidates around
//! each `r(μ_p)` are ranked by `f = f_p · f_id · f_ω`, where `f_p` is an
//! isotropic Gaussian density whose spread is the rounding residual
//! `‖μ_p − r(μ_p)‖` (floored at `ε`).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::catalog::{BrickId, Catalog, Color, Orientation};
use crate::error::Error;
use crate::model::{footprint_of, Bounds, BrickPlacement, Cell};
use crate::sensor::ObservationFrame;

/// Depth rise (brick heights) above which a column counts as changed.
pub const DEFAULT_CHANGE_THRESHOLD: f64 = 0.5;
/// Floor on the Gaussian spread, keeps Σ non-singular for integral `μ_p`.
pub const SIGMA_FLOOR: f64 = 0.1;
/// Brick types kept per estimate when enumerating candidates.
pub const TOP_TYPES: usize = 3;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaEstimate {
    /// Real-valued anchor estimate `(μ_x, μ_y, μ_z)`.
    pub mean: [f64; 3],
    /// Centroid `(x, y)` of the changed region.
    pub centroid: [f64; 2],
    /// Normalised `f_id` per catalog entry, in catalog order.
    pub id_scores: Vec<(BrickId, f64)>,
    /// Normalised `f_ω`, indexed by orientation.
    pub orientation_scores: [f64; 2],
    pub color: Color,
    pub color_confidence: f64,
    /// Changed columns `(x, y)` of the dominant region.
    pub changed: Vec<(i32, i32)>,
}

impl DeltaEstimate {
    pub fn id_score(&self, id: BrickId) -> f64 {
        self.id_scores.iter().find(|(i, _)| *i == id).map_or(0.0, |(_, s)| *s)
    }

    /// Ids by descending score, ties by id.
    pub fn ranked_ids(&self) -> Vec<BrickId> {
        let mut v = self.id_scores.clone();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(id, _)| id).collect()
    }

    /// Anchor estimate assuming the change is a brick with the given extent.
    pub fn anchor_for(&self, extent: (i32, i32)) -> [f64; 3] {
        [self.centroid[0] - (extent.0 - 1) as f64 / 2.0, self.centroid[1] - (extent.1 - 1) as f64 / 2.0, self.mean[2]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CandidateTask {
    pub placement: BrickPlacement,
    pub f_p: f64,
    pub f_id: f64,
    pub f_omega: f64,
    pub f: f64,
}

/// Pluggable front end turning two keyframes into a brick-operation estimate.
pub trait TaskEstimator {
    fn estimate(&self, prev: &ObservationFrame, next: &ObservationFrame) -> Result<DeltaEstimate, Error>;
}

/// Depth-differencing estimator.
#[derive(Clone, Debug)]
pub struct DifferencingEstimator {
    pub catalog: Catalog,
    pub change_threshold: f64,
}

impl TaskEstimator for DifferencingEstimator {
    fn estimate(&self, prev: &ObservationFrame, next: &ObservationFrame) -> Result<DeltaEstimate, Error> {
        estimate_delta(prev, next, &self.catalog, self.change_threshold)
    }
}

pub fn estimate_delta(
    prev: &ObservationFrame,
    next: &ObservationFrame,
    catalog: &Catalog,
    change_threshold: f64,
) -> Result<DeltaEstimate, Error> {
    if !prev.same_dims(next) {
        return Err(Error::FrameMismatch);
    }
    let mask: Vec<bool> = (0..next.len())
        .map(|i| !next.occlusion[i] && !prev.occlusion[i] && next.depth[i] - prev.depth[i] > change_threshold)
        .collect();
    let mask = fill_gaps(next, &mask);
    let region = largest_region(next, &mask);
    if region.is_empty() {
        return Err(Error::NoChange);
    }

    let xy: Vec<(i32, i32)> = region.iter().map(|&i| next.xy(i)).collect();
    let (min_x, max_x) = min_max(xy.iter().map(|p| p.0));
    let (min_y, max_y) = min_max(xy.iter().map(|p| p.1));
    let extent = (max_x - min_x + 1, max_y - min_y + 1);
    let n = xy.len() as f64;
    let cx = xy.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let cy = xy.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let mut heights: Vec<f64> = region.iter().map(|&i| next.depth[i]).collect();
    let mu_z = median(&mut heights);
    let mean = [cx - (extent.0 - 1) as f64 / 2.0, cy - (extent.1 - 1) as f64 / 2.0, mu_z];

    let mismatch = |w: i32, h: i32| ((w - extent.0).abs() + (h - extent.1).abs()) as f64;
    let id_raw: Vec<(BrickId, f64)> = catalog
        .entries()
        .iter()
        .map(|t| {
            let best = Orientation::BOTH
                .iter()
                .map(|&o| {
                    let (w, h) = t.extent(o);
                    mismatch(w, h)
                })
                .fold(f64::INFINITY, f64::min);
            (t.id, libm::exp(-best))
        })
        .collect();
    let id_total: f64 = id_raw.iter().map(|(_, s)| s).sum();
    let id_scores = id_raw.into_iter().map(|(id, s)| (id, s / id_total)).collect();

    let omega_raw = Orientation::BOTH.map(|o| {
        let best = catalog
            .entries()
            .iter()
            .map(|t| {
                let (w, h) = t.extent(o);
                mismatch(w, h)
            })
            .fold(f64::INFINITY, f64::min);
        libm::exp(-best)
    });
    let omega_total = omega_raw[0] + omega_raw[1];
    let orientation_scores = [omega_raw[0] / omega_total, omega_raw[1] / omega_total];

    let (color, color_confidence) = modal_color(region.iter().map(|&i| next.color[i]));

    Ok(DeltaEstimate { mean, centroid: [cx, cy], id_scores, orientation_scores, color, color_confidence, changed: xy })
}

/// Marks unchanged columns whose two row or two column neighbours both
/// changed. A single low reading inside a 1-wide brick would otherwise split
/// its region in two.
fn fill_gaps(frame: &ObservationFrame, mask: &[bool]) -> Vec<bool> {
    let on = |x: i32, y: i32| frame.index(x, y).is_some_and(|j| mask[j]);
    (0..mask.len())
        .map(|i| {
            let (x, y) = frame.xy(i);
            mask[i] || (on(x - 1, y) && on(x + 1, y)) || (on(x, y - 1) && on(x, y + 1))
        })
        .collect()
}

/// Largest 4-connected component of `mask`, earliest-found on ties.
fn largest_region(frame: &ObservationFrame, mask: &[bool]) -> Vec<usize> {
    let mut seen = vec![false; mask.len()];
    let mut best: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            let (x, y) = frame.xy(i);
            for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
                if let Some(j) = frame.index(nx, ny) {
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if comp.len() > best.len() {
            comp.sort_unstable();
            best = comp;
        }
    }
    best
}

fn min_max(it: impl Iterator<Item = i32>) -> (i32, i32) {
    it.fold((i32::MAX, i32::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Most frequent non-background color; palette order breaks ties. A region
/// that reads entirely as background is most likely a dark brick.
fn modal_color(readings: impl Iterator<Item = Option<Color>>) -> (Color, f64) {
    let mut counts = [0usize; Color::PALETTE.len()];
    let mut total = 0usize;
    for c in readings {
        total += 1;
        if let Some(c) = c {
            counts[c.index()] += 1;
        }
    }
    let (best, &n) =
        counts.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("palette is non-empty");
    if n == 0 {
        return (Color::Black, 0.0);
    }
    (Color::PALETTE[best], n as f64 / total.max(1) as f64)
}

/// `r(·)`: round each coordinate to the nearest integer.
pub fn round_position(mean: [f64; 3]) -> Cell {
    Cell::new(libm::round(mean[0]) as i32, libm::round(mean[1]) as i32, libm::round(mean[2]) as i32)
}

/// Isotropic Gaussian density of lattice cell `p` around `mean`, with
/// `Σ = max(ε, ‖μ − r(μ)‖)² · I`.
pub fn position_likelihood(p: Cell, mean: [f64; 3], sigma_floor: f64) -> f64 {
    position_density([p.x as f64, p.y as f64, p.z as f64], mean, sigma_floor)
}

/// [`position_likelihood`] at an arbitrary real point.
pub fn position_density(point: [f64; 3], mean: [f64; 3], sigma_floor: f64) -> f64 {
    let r = round_position(mean);
    let residual = [mean[0] - r.x as f64, mean[1] - r.y as f64, mean[2] - r.z as f64];
    let s = libm::sqrt(residual.iter().map(|d| d * d).sum::<f64>()).max(sigma_floor);
    let q = (0..3).map(|i| (point[i] - mean[i]) * (point[i] - mean[i])).sum::<f64>() / (s * s);
    libm::exp(-0.5 * q) / (libm::pow(2.0 * PI, 1.5) * s * s * s)
}

/// For each of the top-3 types and both orientations, enumerates `r(μ)` and
/// its 26-neighbourhood around that pair's anchor estimate, drops placements
/// that leave the workspace, and returns the `k_max` best by `f`, ties in
/// canonical placement order.
pub fn rank_candidates(
    delta: &DeltaEstimate,
    catalog: &Catalog,
    bounds: Bounds,
    k_max: usize,
    sigma_floor: f64,
) -> Result<Vec<CandidateTask>, Error> {
    let ids: Vec<BrickId> = delta.ranked_ids().into_iter().take(TOP_TYPES).collect();
    let mut out = Vec::new();
    for &id in &ids {
        let ty = catalog.get(id)?;
        let f_id = delta.id_score(id);
        for o in Orientation::BOTH {
            if ty.is_square() && o == Orientation::AlongY {
                continue;
            }
            let f_omega = delta.orientation_scores[o.index()];
            let mean = delta.anchor_for(ty.extent(o));
            let center = round_position(mean);
            for dz in -1..=1 {
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let p = Cell::new(center.x + dx, center.y + dy, center.z + dz);
                        if !footprint_of(ty, o, p).iter().all(|c| bounds.contains(*c)) {
                            continue;
                        }
                        let f_p = position_likelihood(p, mean, sigma_floor);
                        let f = f_p * f_id * f_omega;
                        if f > 0.0 {
                            let placement = BrickPlacement::new(p, id, o, delta.color);
                            out.push(CandidateTask { placement, f_p, f_id, f_omega, f });
                        }
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoCandidates);
    }
    out.sort_by(|a, b| match b.f.total_cmp(&a.f) {
        Ordering::Equal => a.placement.cmp(&b.placement),
        o => o,
    });
    out.truncate(k_max);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assembly;
    use crate::sensor::render_clean;

    fn cat() -> Catalog {
        Catalog::default()
    }

    fn brick(name: &str, omega: u8, p: [i32; 3], color: Color) -> BrickPlacement {
        let id = cat().by_name(name).unwrap().id;
        BrickPlacement::new(p.into(), id, Orientation::from_index(omega).unwrap(), color)
    }

    fn delta_for(base: &[BrickPlacement], b: BrickPlacement) -> DeltaEstimate {
        let before = Assembly::from_placements(cat(), Bounds::default(), base).unwrap();
        let after = before.apply(b).unwrap();
        estimate_delta(&render_clean(&before, 0), &render_clean(&after, 1), &cat(), DEFAULT_CHANGE_THRESHOLD).unwrap()
    }

    #[test]
    fn clean_delta_recovers_anchor_type_orientation() {
        let base = [brick("2x6", 0, [10, 10, 1], Color::Red)];
        for b in [
            brick("2x4", 1, [11, 10, 2], Color::Blue),
            brick("1x8", 0, [8, 11, 2], Color::Black),
            brick("1x2", 1, [30, 30, 1], Color::White),
        ] {
            let d = delta_for(&base, b);
            assert_eq!(d.mean, [b.position.x as f64, b.position.y as f64, b.position.z as f64]);
            assert_eq!(d.ranked_ids()[0], b.id);
            let best_o = if d.orientation_scores[0] >= d.orientation_scores[1] { 0 } else { 1 };
            assert_eq!(best_o, b.orientation.index());
            assert_eq!(d.color, b.color);
            let total: f64 = d.id_scores.iter().map(|s| s.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_change_is_an_error() {
        let a = Assembly::new(cat(), Bounds::default()).apply(brick("2x4", 0, [1, 1, 1], Color::Red)).unwrap();
        let f = render_clean(&a, 0);
        assert_eq!(estimate_delta(&f, &f, &cat(), 0.5), Err(Error::NoChange));
    }

    #[test]
    fn square_region_is_orientation_ambiguous() {
        let d = delta_for(&[], brick("2x2", 0, [5, 5, 1], Color::Green));
        assert_eq!(d.orientation_scores, [0.5, 0.5]);
    }

    #[test]
    fn likelihood_at_integral_mean() {
        let f = position_likelihood(Cell::new(3, 4, 5), [3.0, 4.0, 5.0], SIGMA_FLOOR);
        let expected = libm::pow(2.0 * PI, -1.5) * 1e3;
        assert!((f - expected).abs() / expected < 1e-12);
        assert!((f - 63.493_635_934_240_97).abs() < 1e-9);
    }

    #[test]
    fn likelihood_symmetry_and_decay() {
        let mu = [5.2, 5.0, 2.0];
        let a = position_likelihood(Cell::new(5, 5, 2), mu, SIGMA_FLOOR);
        let b = position_likelihood(Cell::new(6, 5, 2), mu, SIGMA_FLOOR);
        let c = position_likelihood(Cell::new(5, 6, 2), [5.0, 5.5, 2.0], SIGMA_FLOOR);
        let d = position_likelihood(Cell::new(5, 5, 2), [5.0, 5.5, 2.0], SIGMA_FLOOR);
        assert!(a > b);
        assert!((c - d).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_rank_one_is_truth() {
        let truth = brick("2x4", 1, [20, 20, 1], Color::Yellow);
        let d = delta_for(&[], truth);
        let c = rank_candidates(&d, &cat(), Bounds::default(), 10, SIGMA_FLOOR).unwrap();
        assert_eq!(c[0].placement, truth);
        assert!(c.windows(2).all(|w| w[0].f >= w[1].f));
        assert!(c.iter().all(|t| (t.f - t.f_p * t.f_id * t.f_omega).abs() <= 1e-12 * t.f.abs()));
        let five = rank_candidates(&d, &cat(), Bounds::default(), 5, SIGMA_FLOOR).unwrap();
        assert_eq!(five.len(), 5);
        assert_eq!(&c[..5], &five[..]);
    }

    #[test]
    fn candidates_stay_in_bounds() {
        let d = delta_for(&[], brick("1x2", 0, [1, 1, 1], Color::Red));
        let c = rank_candidates(&d, &cat(), Bounds::default(), 100, SIGMA_FLOOR).unwrap();
        assert!(c.iter().all(|t| t.placement.position.x >= 1 && t.placement.position.z >= 1));
    }
}
