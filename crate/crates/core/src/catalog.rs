//! Brick catalog, orientation and color palette.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// Catalog identifier of a brick type, contiguous from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct BrickId(pub u8);

impl fmt::Display for BrickId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which horizontal axis the brick's long side runs along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "u8", try_from = "u8"))]
pub enum Orientation {
    /// `ω = 0`: length along x.
    AlongX,
    /// `ω = 1`: length along y.
    AlongY,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::AlongX, Orientation::AlongY];

    pub fn index(self) -> usize {
        match self {
            Orientation::AlongX => 0,
            Orientation::AlongY => 1,
        }
    }

    pub fn from_index(omega: u8) -> Option<Self> {
        match omega {
            0 => Some(Orientation::AlongX),
            1 => Some(Orientation::AlongY),
            _ => None,
        }
    }
}

impl From<Orientation> for u8 {
    fn from(o: Orientation) -> u8 {
        o.index() as u8
    }
}

impl TryFrom<u8> for Orientation {
    type Error = Error;

    fn try_from(omega: u8) -> Result<Self, Error> {
        Orientation::from_index(omega).ok_or(Error::InvalidOrientation(omega))
    }
}

/// Fixed brick color palette. Order matters: a color flip moves to an
/// adjacent entry (cyclically).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Color {
    Red,
    Yellow,
    Blue,
    Green,
    Black,
    White,
    Pink,
    Orange,
}

impl Color {
    pub const PALETTE: [Color; 8] =
        [Color::Red, Color::Yellow, Color::Blue, Color::Green, Color::Black, Color::White, Color::Pink, Color::Orange];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Colors that read as background under the dark-color ambiguity.
    pub fn is_dark(self) -> bool {
        matches!(self, Color::Black | Color::Blue)
    }

    /// Palette neighbour, `forward` picks the next entry, otherwise the previous.
    pub fn adjacent(self, forward: bool) -> Color {
        let n = Self::PALETTE.len();
        let i = self.index();
        let j = if forward { (i + 1) % n } else { (i + n - 1) % n };
        Self::PALETTE[j]
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Yellow => "yellow",
            Color::Blue => "blue",
            Color::Green => "green",
            Color::Black => "black",
            Color::White => "white",
            Color::Pink => "pink",
            Color::Orange => "orange",
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Self::PALETTE.iter().copied().find(|c| c.name() == name)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One brick type: `width x length` studs, e.g. a 2x4 has width 2, length 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickType {
    pub id: BrickId,
    pub length: u8,
    pub width: u8,
}

impl BrickType {
    pub fn studs(&self) -> usize {
        self.length as usize * self.width as usize
    }

    /// Rotating a square brick does not change its footprint.
    pub fn is_square(&self) -> bool {
        self.length == self.width
    }

    /// Extent along (x, y) for the given orientation.
    pub fn extent(&self, orientation: Orientation) -> (i32, i32) {
        match orientation {
            Orientation::AlongX => (self.length as i32, self.width as i32),
            Orientation::AlongY => (self.width as i32, self.length as i32),
        }
    }
}

impl fmt::Display for BrickType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.length)
    }
}

/// The set of brick types available to a demonstration.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<BrickType>", into = "Vec<BrickType>"))]
pub struct Catalog {
    entries: Vec<BrickType>,
}

/// Smallest catalog size accepted.
pub const MIN_CATALOG_SIZE: usize = 7;

impl Catalog {
    /// Validates ids (unique, contiguous from 1), dims (non-zero, width ≤ length)
    /// and size.
    pub fn new(mut entries: Vec<BrickType>) -> Result<Self, Error> {
        if entries.len() < MIN_CATALOG_SIZE {
            return Err(Error::InvalidCatalog("fewer than 7 brick types"));
        }
        entries.sort_by_key(|e| e.id);
        for (i, e) in entries.iter().enumerate() {
            if e.id.0 as usize != i + 1 {
                return Err(Error::InvalidCatalog("ids must be unique and contiguous from 1"));
            }
            if e.width == 0 || e.length == 0 || e.width > e.length {
                return Err(Error::InvalidCatalog("dims must satisfy 0 < width <= length"));
            }
        }
        Ok(Catalog { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BrickType] {
        &self.entries
    }

    pub fn get(&self, id: BrickId) -> Result<&BrickType, Error> {
        (id.0 as usize).checked_sub(1).and_then(|i| self.entries.get(i)).ok_or(Error::UnknownBrick(id))
    }

    /// Looks a type up by its `WxL` name, e.g. `"2x4"`.
    pub fn by_name(&self, name: &str) -> Option<&BrickType> {
        let (w, l) = name.split_once('x')?;
        let (w, l): (u8, u8) = (w.parse().ok()?, l.parse().ok()?);
        self.entries.iter().find(|e| e.width == w && e.length == l)
    }
}

impl Default for Catalog {
    /// 1x2, 1x4, 1x6, 1x8, 2x2, 2x4, 2x6 with ids 1..=7.
    fn default() -> Self {
        let dims = [(1, 2), (1, 4), (1, 6), (1, 8), (2, 2), (2, 4), (2, 6)];
        let entries = dims
            .iter()
            .enumerate()
            .map(|(i, &(width, length))| BrickType { id: BrickId(i as u8 + 1), length, width })
            .collect();
        Catalog { entries }
    }
}

impl TryFrom<Vec<BrickType>> for Catalog {
    type Error = Error;
    fn try_from(entries: Vec<BrickType>) -> Result<Self, Error> {
        Catalog::new(entries)
    }
}

impl From<Catalog> for Vec<BrickType> {
    fn from(c: Catalog) -> Self {
        c.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn default_catalog_has_the_seven_standard_types() {
        let c = Catalog::default();
        let names: Vec<_> = c.entries().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["1x2", "1x4", "1x6", "1x8", "2x2", "2x4", "2x6"]);
        assert!(Catalog::new(c.entries().to_vec()).is_ok());
    }

    #[test]
    fn rejects_gapped_ids() {
        let mut e = Catalog::default().entries().to_vec();
        e[3].id = BrickId(9);
        assert!(matches!(Catalog::new(e), Err(Error::InvalidCatalog(_))));
    }

    #[test]
    fn rejects_small_catalog() {
        let e = Catalog::default().entries()[..6].to_vec();
        assert!(Catalog::new(e).is_err());
    }

    #[test]
    fn lookup_by_name_and_id() {
        let c = Catalog::default();
        assert_eq!(c.by_name("2x4").unwrap().id, BrickId(6));
        assert!(c.by_name("3x3").is_none());
        assert!(matches!(c.get(BrickId(0)), Err(Error::UnknownBrick(_))));
        assert!(matches!(c.get(BrickId(8)), Err(Error::UnknownBrick(_))));
    }

    #[test]
    fn adjacent_colors_wrap() {
        assert_eq!(Color::Red.adjacent(false), Color::Orange);
        assert_eq!(Color::Orange.adjacent(true), Color::Red);
        assert_eq!(Color::Blue.adjacent(true), Color::Green);
    }
}
