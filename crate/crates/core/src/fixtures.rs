//! Built-in demonstration structures and a random feasible-trace generator.
//!
//! Every fixture places each brick above the current surface of its
//! footprint, so a top-down sensor can see every operation.

use alloc::vec::Vec;

use rand::Rng;

use crate::catalog::{Catalog, Color, Orientation};
use crate::model::{Assembly, Bounds, BrickPlacement, Cell};

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub events: Vec<BrickPlacement>,
}

type Row = (&'static str, u8, [i32; 3], Color);

use Color::*;

const AI: &[Row] = &[
    ("1x6", 1, [5, 5, 1], Red),
    ("1x6", 1, [9, 5, 1], Red),
    ("1x6", 0, [5, 7, 2], Blue),
    ("1x6", 0, [5, 10, 2], Red),
    ("2x2", 0, [6, 11, 1], Yellow),
    ("2x4", 1, [14, 5, 1], Black),
    ("2x4", 1, [14, 9, 1], Black),
    ("1x6", 0, [12, 5, 2], White),
    ("1x6", 0, [12, 12, 2], White),
    ("2x4", 1, [14, 7, 2], Black),
];

const RI: &[Row] = &[
    ("1x8", 1, [5, 5, 1], Blue),
    ("1x4", 0, [6, 12, 1], Blue),
    ("1x4", 1, [9, 8, 1], Green),
    ("1x2", 0, [7, 8, 1], Green),
    ("1x2", 1, [6, 6, 1], Orange),
    ("1x2", 1, [8, 5, 1], Orange),
    ("1x8", 1, [5, 5, 2], Blue),
    ("1x4", 0, [6, 12, 2], Blue),
    ("1x8", 1, [13, 5, 1], Pink),
    ("1x8", 1, [13, 5, 2], Pink),
    ("1x4", 0, [12, 5, 3], Red),
    ("1x4", 0, [12, 12, 3], Red),
];

const HUMAN: &[Row] = &[
    ("2x2", 0, [10, 10, 1], Blue),
    ("2x2", 0, [13, 10, 1], Blue),
    ("2x2", 0, [10, 10, 2], Blue),
    ("2x2", 0, [13, 10, 2], Blue),
    ("2x6", 0, [10, 10, 3], Black),
    ("2x6", 0, [10, 10, 4], Red),
    ("2x6", 0, [10, 10, 5], Red),
    ("1x8", 0, [9, 10, 6], Red),
    ("1x8", 0, [9, 11, 6], Red),
    ("2x2", 0, [12, 10, 7], Yellow),
    ("2x2", 0, [9, 10, 7], Yellow),
    ("2x2", 0, [15, 10, 7], Yellow),
    ("2x4", 0, [11, 10, 8], Yellow),
    ("2x4", 0, [11, 10, 9], Yellow),
    ("1x2", 0, [12, 10, 10], Black),
    ("1x2", 0, [12, 11, 10], Black),
    ("1x2", 0, [12, 10, 11], Orange),
];

const CHAIR: &[Row] = &[
    ("2x2", 0, [10, 10, 1], Orange),
    ("2x2", 0, [14, 10, 1], Orange),
    ("2x2", 0, [10, 14, 1], Orange),
    ("2x2", 0, [14, 14, 1], Orange),
    ("2x2", 0, [10, 10, 2], Orange),
    ("2x2", 0, [14, 10, 2], Orange),
    ("2x2", 0, [10, 14, 2], Orange),
    ("2x2", 0, [14, 14, 2], Orange),
    ("2x6", 1, [10, 10, 3], White),
    ("2x6", 1, [14, 10, 3], White),
    ("2x6", 0, [10, 10, 4], Green),
    ("2x6", 0, [10, 12, 4], Green),
    ("2x6", 0, [10, 14, 4], Green),
    ("2x6", 0, [10, 14, 5], Blue),
    ("2x6", 0, [10, 14, 6], Blue),
    ("2x6", 0, [10, 14, 7], Blue),
    ("1x6", 0, [10, 14, 8], Black),
    ("1x2", 1, [10, 12, 5], Red),
    ("1x2", 1, [15, 12, 5], Red),
    ("1x2", 1, [10, 12, 6], Red),
    ("1x2", 1, [15, 12, 6], Red),
];

const SPIRAL: &[Row] = &[
    ("2x4", 0, [10, 10, 1], Red),
    ("2x4", 1, [12, 10, 2], Yellow),
    ("2x4", 0, [10, 12, 3], Blue),
    ("2x4", 1, [10, 10, 4], Green),
    ("2x4", 0, [10, 10, 5], Black),
];

const BRIDGE: &[Row] = &[
    ("2x4", 1, [10, 10, 1], White),
    ("2x4", 1, [22, 10, 1], White),
    ("2x4", 1, [10, 10, 2], White),
    ("2x4", 1, [22, 10, 2], White),
    ("2x4", 1, [10, 10, 3], White),
    ("2x4", 1, [22, 10, 3], White),
    ("2x4", 1, [10, 10, 4], White),
    ("2x4", 1, [22, 10, 4], White),
    ("2x6", 0, [8, 10, 5], Blue),
    ("2x6", 0, [8, 12, 5], Blue),
    ("2x6", 0, [20, 10, 5], Blue),
    ("2x6", 0, [20, 12, 5], Blue),
    ("2x6", 0, [12, 10, 6], Green),
    ("2x6", 0, [18, 10, 6], Green),
    ("2x6", 0, [12, 12, 6], Green),
    ("2x6", 0, [18, 12, 6], Green),
    ("1x8", 0, [12, 10, 7], Black),
    ("1x8", 0, [12, 13, 7], Black),
    ("2x2", 0, [16, 11, 7], Red),
];

const PYRAMID: &[Row] = &[
    ("2x4", 0, [10, 10, 1], Yellow),
    ("2x4", 0, [14, 10, 1], Yellow),
    ("2x4", 0, [10, 12, 1], Yellow),
    ("2x4", 0, [14, 12, 1], Yellow),
    ("2x4", 0, [10, 14, 1], Yellow),
    ("2x4", 0, [14, 14, 1], Yellow),
    ("1x6", 0, [11, 11, 2], Orange),
    ("1x6", 0, [11, 12, 2], Orange),
    ("1x6", 0, [11, 13, 2], Orange),
    ("1x6", 0, [11, 14, 2], Orange),
    ("2x2", 0, [12, 12, 3], Red),
    ("2x2", 0, [14, 12, 3], Red),
    ("1x4", 0, [12, 14, 3], Red),
    ("1x2", 0, [13, 12, 4], Black),
    ("1x2", 0, [13, 13, 4], Blue),
];

const TEMPLE: &[Row] = &[
    ("2x6", 0, [10, 10, 1], White),
    ("2x6", 0, [16, 10, 1], White),
    ("2x6", 0, [10, 12, 1], White),
    ("2x6", 0, [16, 12, 1], White),
    ("2x6", 0, [10, 14, 1], White),
    ("2x6", 0, [16, 14, 1], White),
    ("2x2", 0, [10, 10, 2], Yellow),
    ("2x2", 0, [20, 10, 2], Yellow),
    ("2x2", 0, [10, 14, 2], Yellow),
    ("2x2", 0, [20, 14, 2], Yellow),
    ("2x2", 0, [10, 10, 3], Yellow),
    ("2x2", 0, [20, 10, 3], Yellow),
    ("2x2", 0, [10, 14, 3], Yellow),
    ("2x2", 0, [20, 14, 3], Yellow),
    ("2x2", 0, [10, 10, 4], Yellow),
    ("2x2", 0, [20, 10, 4], Yellow),
    ("2x2", 0, [10, 14, 4], Yellow),
    ("2x2", 0, [20, 14, 4], Yellow),
    ("2x6", 0, [10, 10, 5], Red),
    ("2x6", 0, [16, 10, 5], Red),
    ("2x6", 0, [10, 14, 5], Red),
    ("2x6", 0, [16, 14, 5], Red),
    ("2x6", 1, [14, 10, 6], Black),
];

const ALL: &[(&str, &[Row])] = &[
    ("ai", AI),
    ("ri", RI),
    ("human", HUMAN),
    ("chair", CHAIR),
    ("spiral", SPIRAL),
    ("bridge", BRIDGE),
    ("pyramid", PYRAMID),
    ("temple", TEMPLE),
];

pub const FIXTURE_NAMES: [&str; 8] = ["ai", "ri", "human", "chair", "spiral", "bridge", "pyramid", "temple"];

fn build(rows: &[Row], catalog: &Catalog) -> Vec<BrickPlacement> {
    rows.iter()
        .map(|&(name, omega, p, color)| {
            let id = catalog.by_name(name).expect("fixture brick in default catalog").id;
            let o = Orientation::from_index(omega).expect("fixture orientation");
            BrickPlacement::new(p.into(), id, o, color)
        })
        .collect()
}

/// All eight fixtures over the default catalog.
pub fn fixtures() -> Vec<Fixture> {
    let catalog = Catalog::default();
    ALL.iter().map(|&(name, rows)| Fixture { name, events: build(rows, &catalog) }).collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

/// `n` random placements, each resting on the surface it covers, so the
/// sequence is step-wise feasible and every brick is visible from above when
/// placed. Anchors are drawn from a small window to encourage stacking.
pub fn random_events<R: Rng + ?Sized>(rng: &mut R, n: usize, catalog: &Catalog, bounds: Bounds) -> Vec<BrickPlacement> {
    let mut a = Assembly::new(catalog.clone(), bounds);
    let lo = 2;
    let hi = (bounds.x.min(bounds.y) as i32 / 2).max(lo + 1);
    let mut attempts = 0;
    while a.len() < n && attempts < n * 100 {
        attempts += 1;
        let ty = catalog.entries()[rng.random_range(0..catalog.len())];
        let o = if ty.is_square() { Orientation::AlongX } else { Orientation::BOTH[rng.random_range(0..2)] };
        let x = rng.random_range(lo..=hi);
        let y = rng.random_range(lo..=hi);
        let probe = crate::model::footprint_of(&ty, o, Cell::new(x, y, 0));
        let z = a.max_height_under(&probe) + 1;
        let color = Color::PALETTE[rng.random_range(0..Color::PALETTE.len())];
        let b = BrickPlacement::new(Cell::new(x, y, z), ty.id, o, color);
        let _ = a.push(b);
    }
    a.placements().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::render_clean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn brick_counts() {
        let counts: Vec<usize> = fixtures().iter().map(|f| f.events.len()).collect();
        assert_eq!(counts, [10, 12, 17, 21, 5, 19, 15, 23]);
        let names: Vec<&str> = fixtures().iter().map(|f| f.name).collect();
        assert_eq!(names, FIXTURE_NAMES);
    }

    fn assert_visible_feasible(events: &[BrickPlacement]) {
        let mut a = Assembly::new(Catalog::default(), Bounds::default());
        for (i, b) in events.iter().enumerate() {
            a.push(*b).unwrap_or_else(|e| panic!("event {}: {e}", i + 1));
            let f = render_clean(&a, 0);
            for c in a.footprint(b).unwrap() {
                let k = f.index(c.x, c.y).unwrap();
                assert_eq!(f.depth[k], c.z as f64, "event {} hidden at {c}", i + 1);
            }
        }
    }

    #[test]
    fn fixtures_are_feasible_and_visible() {
        for f in fixtures() {
            assert_visible_feasible(&f.events);
        }
    }

    #[test]
    fn random_events_are_feasible_and_visible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [0, 1, 8, 30] {
            let ev = random_events(&mut rng, n, &Catalog::default(), Bounds::default());
            assert_eq!(ev.len(), n);
            assert_visible_feasible(&ev);
        }
    }
}
