//! Discrete LEGO workspace: placements, occupancy and feasibility.
//!
//! Positions are 1-based stud/brick-height lattice coordinates. A placement's
//! anchor is the minimum-coordinate stud of its footprint, and orientation
//! `AlongX` runs the brick's length along x.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::catalog::{BrickId, BrickType, Catalog, Color, Orientation};
use crate::error::{Error, Infeasible};

/// Lattice cell `(x, y, z)`; ordered by `(z, y, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[i32; 3]", into = "[i32; 3]"))]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Cell { x, y, z }
    }

    pub fn below(self) -> Cell {
        Cell::new(self.x, self.y, self.z - 1)
    }

    pub fn above(self) -> Cell {
        Cell::new(self.x, self.y, self.z + 1)
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.z, self.y, self.x).cmp(&(other.z, other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<[i32; 3]> for Cell {
    fn from([x, y, z]: [i32; 3]) -> Self {
        Cell::new(x, y, z)
    }
}

impl From<Cell> for [i32; 3] {
    fn from(c: Cell) -> Self {
        [c.x, c.y, c.z]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Workspace extent in studs (x, y) and brick heights (z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[u16; 3]", into = "[u16; 3]"))]
pub struct Bounds {
    pub x: u16,
    pub y: u16,
    pub z: u16,
}

impl Bounds {
    pub const fn new(x: u16, y: u16, z: u16) -> Self {
        Bounds { x, y, z }
    }

    pub fn contains(&self, c: Cell) -> bool {
        (1..=self.x as i32).contains(&c.x) && (1..=self.y as i32).contains(&c.y) && (1..=self.z as i32).contains(&c.z)
    }

    /// Number of (x, y) columns.
    pub fn columns(&self) -> usize {
        self.x as usize * self.y as usize
    }

    /// Row-major column index of `(x, y)`; caller guarantees it is in bounds.
    pub fn column(&self, x: i32, y: i32) -> usize {
        (y - 1) as usize * self.x as usize + (x - 1) as usize
    }

    pub fn column_xy(&self, index: usize) -> (i32, i32) {
        let w = self.x as usize;
        ((index % w) as i32 + 1, (index / w) as i32 + 1)
    }
}

impl Default for Bounds {
    /// Two 48x48 plates, 24 brick heights.
    fn default() -> Self {
        Bounds::new(48, 48, 24)
    }
}

impl From<[u16; 3]> for Bounds {
    fn from([x, y, z]: [u16; 3]) -> Self {
        Bounds::new(x, y, z)
    }
}

impl From<Bounds> for [u16; 3] {
    fn from(b: Bounds) -> Self {
        [b.x, b.y, b.z]
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.x, self.y, self.z)
    }
}

/// One brick operation: anchor position, type, orientation and color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickPlacement {
    pub position: Cell,
    pub id: BrickId,
    pub orientation: Orientation,
    pub color: Color,
}

impl BrickPlacement {
    pub fn new(position: Cell, id: BrickId, orientation: Orientation, color: Color) -> Self {
        BrickPlacement { position, id, orientation, color }
    }

    /// Sort key `(z, y, x, id, ω, color)`.
    pub fn canonical_key(&self) -> (Cell, BrickId, Orientation, Color) {
        (self.position, self.id, self.orientation, self.color)
    }

    /// Square bricks look identical in both orientations; normalise them to
    /// `AlongX` so equal footprints compare equal.
    pub fn normalized(mut self, catalog: &Catalog) -> Self {
        if catalog.get(self.id).is_ok_and(BrickType::is_square) {
            self.orientation = Orientation::AlongX;
        }
        self
    }
}

impl Ord for BrickPlacement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl PartialOrd for BrickPlacement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cells covered by a brick of type `id` at anchor `p`.
pub fn footprint(catalog: &Catalog, id: BrickId, orientation: Orientation, p: Cell) -> Result<Vec<Cell>, Error> {
    let ty = catalog.get(id)?;
    Ok(footprint_of(ty, orientation, p))
}

pub(crate) fn footprint_of(ty: &BrickType, orientation: Orientation, p: Cell) -> Vec<Cell> {
    let (ex, ey) = ty.extent(orientation);
    let mut cells = Vec::with_capacity(ty.studs());
    for dy in 0..ey {
        for dx in 0..ex {
            cells.push(Cell::new(p.x + dx, p.y + dy, p.z));
        }
    }
    cells
}

/// An append-only set of placements with a sparse occupancy map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    catalog: Catalog,
    bounds: Bounds,
    placements: Vec<BrickPlacement>,
    grid: BTreeMap<Cell, usize>,
}

impl Assembly {
    pub fn new(catalog: Catalog, bounds: Bounds) -> Self {
        Assembly { catalog, bounds, placements: Vec::new(), grid: BTreeMap::new() }
    }

    /// Replays `placements` in order, failing on the first infeasible step.
    pub fn from_placements<'a>(
        catalog: Catalog,
        bounds: Bounds,
        placements: impl IntoIterator<Item = &'a BrickPlacement>,
    ) -> Result<Self, Error> {
        let mut a = Assembly::new(catalog, bounds);
        for b in placements {
            a.push(*b)?;
        }
        Ok(a)
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn placements(&self) -> &[BrickPlacement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Occupied cell → index of the placement covering it.
    pub fn grid(&self) -> &BTreeMap<Cell, usize> {
        &self.grid
    }

    pub fn occupant(&self, c: Cell) -> Option<usize> {
        self.grid.get(&c).copied()
    }

    pub fn footprint(&self, b: &BrickPlacement) -> Result<Vec<Cell>, Error> {
        footprint(&self.catalog, b.id, b.orientation, b.position)
    }

    /// Checks bounds, collisions and stud support (from below, from above, or
    /// the baseplate at `z = 1`), in that order.
    pub fn is_feasible(&self, b: &BrickPlacement) -> Result<(), Error> {
        let cells = self.footprint(b)?;
        self.check_cells(&cells).map_err(|verdict| Error::Infeasible { step: self.placements.len() + 1, verdict })
    }

    pub(crate) fn check_cells(&self, cells: &[Cell]) -> Result<(), Infeasible> {
        let outside: Vec<Cell> = cells.iter().copied().filter(|c| !self.bounds.contains(*c)).collect();
        if !outside.is_empty() {
            return Err(Infeasible::OutOfBounds(outside));
        }
        let hit: Vec<Cell> = cells.iter().copied().filter(|c| self.grid.contains_key(c)).collect();
        if !hit.is_empty() {
            return Err(Infeasible::Collision(hit));
        }
        let supported =
            cells.iter().any(|c| c.z == 1 || self.grid.contains_key(&c.below()) || self.grid.contains_key(&c.above()));
        if !supported {
            return Err(Infeasible::Unsupported(cells.to_vec()));
        }
        Ok(())
    }

    /// Returns a new assembly with `b` appended; `self` is left untouched.
    pub fn apply(&self, b: BrickPlacement) -> Result<Assembly, Error> {
        let mut next = self.clone();
        next.push(b)?;
        Ok(next)
    }

    /// In-place variant of [`Assembly::apply`].
    pub fn push(&mut self, b: BrickPlacement) -> Result<(), Error> {
        let cells = self.footprint(&b)?;
        self.check_cells(&cells).map_err(|verdict| Error::Infeasible { step: self.placements.len() + 1, verdict })?;
        let index = self.placements.len();
        self.placements.push(b);
        for c in cells {
            self.grid.insert(c, index);
        }
        Ok(())
    }

    /// Removes the most recently applied placement.
    pub fn remove_last(&self) -> Option<(Assembly, BrickPlacement)> {
        let mut next = self.clone();
        let b = next.placements.pop()?;
        let index = next.placements.len();
        next.grid.retain(|_, &mut i| i != index);
        Some((next, b))
    }

    /// Removes the placement equal to `b`, renumbering the occupancy map.
    pub fn remove(&mut self, b: &BrickPlacement) -> Result<(), Error> {
        let step = self.placements.len();
        let index = self.placements.iter().rposition(|p| p == b).ok_or(Error::MissingPlacement { step })?;
        self.placements.remove(index);
        self.grid.retain(|_, i| *i != index);
        for i in self.grid.values_mut() {
            if *i > index {
                *i -= 1;
            }
        }
        Ok(())
    }

    /// Placements normalised and sorted into canonical order.
    pub fn canonical(&self) -> Vec<BrickPlacement> {
        let mut v: Vec<_> = self.placements.iter().map(|b| b.normalized(&self.catalog)).collect();
        v.sort();
        v
    }

    /// Topmost occupied `(height, placement index)` per column, row-major.
    pub fn surface(&self) -> Vec<Option<(i32, usize)>> {
        let mut top: Vec<Option<(i32, usize)>> = alloc::vec![None; self.bounds.columns()];
        for (c, &i) in &self.grid {
            let slot = &mut top[self.bounds.column(c.x, c.y)];
            if slot.is_none_or(|(z, _)| c.z > z) {
                *slot = Some((c.z, i));
            }
        }
        top
    }

    /// Highest occupied z inside the column rectangle covered by `cells`, 0 if none.
    pub fn max_height_under(&self, cells: &[Cell]) -> i32 {
        cells
            .iter()
            .filter_map(|c| {
                self.grid
                    .range(Cell::new(c.x, c.y, 1)..=Cell::new(c.x, c.y, self.bounds.z as i32))
                    .filter(|(k, _)| k.x == c.x && k.y == c.y)
                    .map(|(k, _)| k.z)
                    .max()
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cat() -> Catalog {
        Catalog::default()
    }

    fn brick(name: &str, omega: u8, p: [i32; 3]) -> BrickPlacement {
        let id = cat().by_name(name).unwrap().id;
        BrickPlacement::new(p.into(), id, Orientation::from_index(omega).unwrap(), Color::Red)
    }

    #[test]
    fn footprint_1x2_along_x() {
        let b = brick("1x2", 0, [5, 5, 1]);
        let f = footprint(&cat(), b.id, b.orientation, b.position).unwrap();
        assert_eq!(f, vec![Cell::new(5, 5, 1), Cell::new(6, 5, 1)]);
    }

    #[test]
    fn footprint_1x2_along_y() {
        let b = brick("1x2", 1, [5, 5, 1]);
        let f = footprint(&cat(), b.id, b.orientation, b.position).unwrap();
        assert_eq!(f, vec![Cell::new(5, 5, 1), Cell::new(5, 6, 1)]);
    }

    #[test]
    fn footprint_2x6_has_twelve_cells() {
        for omega in [0, 1] {
            let b = brick("2x6", omega, [7, 3, 4]);
            let f = footprint(&cat(), b.id, b.orientation, b.position).unwrap();
            assert_eq!(f.len(), 12);
            assert_eq!(f.iter().min().copied(), Some(b.position));
        }
    }

    #[test]
    fn footprint_unknown_id() {
        let r = footprint(&cat(), BrickId(42), Orientation::AlongX, Cell::new(1, 1, 1));
        assert_eq!(r, Err(Error::UnknownBrick(BrickId(42))));
    }

    #[test]
    fn baseplate_supports() {
        let a = Assembly::new(cat(), Bounds::default());
        assert_eq!(a.is_feasible(&brick("2x4", 0, [1, 1, 1])), Ok(()));
    }

    #[test]
    fn collision_names_overlap() {
        let a = Assembly::new(cat(), Bounds::default()).apply(brick("2x4", 0, [1, 1, 1])).unwrap();
        match a.is_feasible(&brick("1x2", 1, [4, 2, 1])) {
            Err(Error::Infeasible { step: 2, verdict: Infeasible::Collision(c) }) => {
                assert_eq!(c, vec![Cell::new(4, 2, 1)])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn floating_brick_is_unsupported() {
        let a = Assembly::new(cat(), Bounds::default())
            .apply(brick("2x4", 0, [1, 1, 1]))
            .unwrap()
            .apply(brick("2x4", 0, [1, 1, 2]))
            .unwrap();
        let floating = brick("1x2", 0, [10, 10, 3]);
        match a.is_feasible(&floating) {
            Err(Error::Infeasible { verdict: Infeasible::Unsupported(c), .. }) => {
                assert_eq!(c, vec![Cell::new(10, 10, 3), Cell::new(11, 10, 3)])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn support_from_above_counts() {
        let a = Assembly::new(cat(), Bounds::default())
            .apply(brick("1x4", 0, [1, 1, 1]))
            .unwrap()
            .apply(brick("1x4", 0, [3, 1, 2]))
            .unwrap();
        // Overhang at x=5..6 on z=2; a brick hung below it at z=1 is on the
        // baseplate anyway, so go one level up.
        let a = a.apply(brick("1x4", 0, [5, 1, 3])).unwrap();
        assert!(a.is_feasible(&brick("1x2", 0, [7, 1, 2])).is_ok());
    }

    #[test]
    fn out_of_bounds() {
        let a = Assembly::new(cat(), Bounds::default());
        let r = a.is_feasible(&brick("1x4", 0, [46, 1, 1]));
        assert!(matches!(r, Err(Error::Infeasible { verdict: Infeasible::OutOfBounds(c), .. }) if c.len() == 1));
    }

    #[test]
    fn apply_is_value_semantics() {
        let a = Assembly::new(cat(), Bounds::default());
        let b = a.apply(brick("2x2", 0, [3, 3, 1])).unwrap();
        assert!(a.is_empty());
        assert_eq!(b.len(), 1);
        assert_eq!(b.grid().len(), 4);
        let (c, last) = b.remove_last().unwrap();
        assert_eq!(c, a);
        assert_eq!(last, brick("2x2", 0, [3, 3, 1]));
    }

    #[test]
    fn remove_renumbers_grid() {
        let mut a = Assembly::new(cat(), Bounds::default());
        a.push(brick("1x2", 0, [1, 1, 1])).unwrap();
        a.push(brick("1x2", 0, [5, 5, 1])).unwrap();
        a.remove(&brick("1x2", 0, [1, 1, 1])).unwrap();
        assert_eq!(a.occupant(Cell::new(5, 5, 1)), Some(0));
        assert_eq!(a.grid().len(), 2);
        assert!(a.remove(&brick("1x2", 0, [1, 1, 1])).is_err());
    }

    #[test]
    fn surface_tracks_tallest() {
        let a = Assembly::new(cat(), Bounds::default())
            .apply(brick("1x2", 0, [1, 1, 1]))
            .unwrap()
            .apply(brick("1x2", 0, [1, 1, 2]))
            .unwrap();
        let s = a.surface();
        assert_eq!(s[a.bounds().column(1, 1)], Some((2, 1)));
        assert_eq!(s[a.bounds().column(3, 1)], None);
        assert_eq!(a.max_height_under(&[Cell::new(2, 1, 0)]), 2);
    }
}
