//! Arena geometry: the rectangular monitoring area, its regular cell tiling
//! and the point-in-cell predicates shared by every other module.
//!
//! Cells are half-open on their lower/left edges (`[x0, x1) × [y0, y1)`),
//! except along the arena's top and right edges, which belong to the last
//! column/row. Under that rule every point of the closed arena rectangle
//! belongs to exactly one cell.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector with heading `phi` (radians, counter-clockwise from +x).
    pub fn from_heading(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { x: c, y: s }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Grid coordinates of one cell. Row 0 is the bottom row (smallest y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub row: usize,
    pub col: usize,
}

impl CellId {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellId({}, {})", self.row, self.col)
    }
}

/// Rectangular arena `[0, width] × [0, height]` split into `rows × cols`
/// equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arena {
    pub width: f64,
    pub height: f64,
    pub rows: usize,
    pub cols: usize,
}

impl Default for Arena {
    /// 60 m × 60 m, nine cells of 20 m × 20 m.
    fn default() -> Self {
        Self {
            width: 60.0,
            height: 60.0,
            rows: 3,
            cols: 3,
        }
    }
}

impl Arena {
    pub fn new(width: f64, height: f64, rows: usize, cols: usize) -> Result<Self, GeometryError> {
        let arena = Self {
            width,
            height,
            rows,
            cols,
        };
        arena.validate()?;
        Ok(arena)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(GeometryError::InvalidArena(format!(
                "width must be positive, got {}",
                self.width
            )));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(GeometryError::InvalidArena(format!(
                "height must be positive, got {}",
                self.height
            )));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(GeometryError::InvalidArena(format!(
                "grid must have at least one row and column, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn cell_width(&self) -> f64 {
        self.width / self.cols as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.height / self.rows as f64
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_valid_cell(&self, cell: CellId) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    /// Row-major linear index.
    pub fn linear_index(&self, cell: CellId) -> usize {
        cell.row * self.cols + cell.col
    }

    pub fn cell_from_index(&self, index: usize) -> Option<CellId> {
        (index < self.cell_count()).then(|| CellId::new(index / self.cols, index % self.cols))
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cell_count()).map(move |i| CellId::new(i / self.cols, i % self.cols))
    }

    /// Cell containing `pos`, or `None` outside the arena rectangle.
    pub fn cell_of(&self, pos: Vec2) -> Option<CellId> {
        if !(pos.x >= 0.0 && pos.x <= self.width && pos.y >= 0.0 && pos.y <= self.height) {
            return None;
        }
        let col = ((pos.x / self.cell_width()).floor() as usize).min(self.cols - 1);
        let row = ((pos.y / self.cell_height()).floor() as usize).min(self.rows - 1);
        Some(CellId::new(row, col))
    }

    pub fn cell_center(&self, cell: CellId) -> Vec2 {
        debug_assert!(
            self.is_valid_cell(cell),
            "{cell} outside {}x{} grid",
            self.rows,
            self.cols
        );
        Vec2::new(
            (cell.col as f64 + 0.5) * self.cell_width(),
            (cell.row as f64 + 0.5) * self.cell_height(),
        )
    }

    /// Lower-left corner of the cell rectangle.
    pub fn cell_origin(&self, cell: CellId) -> Vec2 {
        Vec2::new(
            cell.col as f64 * self.cell_width(),
            cell.row as f64 * self.cell_height(),
        )
    }

    pub fn contains(&self, cell: CellId, pos: Vec2) -> bool {
        self.cell_of(pos) == Some(cell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cell_of_interior_and_boundaries() {
        let a = Arena::default();
        assert_eq!(a.cell_of(Vec2::new(10.0, 10.0)), Some(CellId::new(0, 0)));
        assert_eq!(a.cell_of(Vec2::new(20.0, 10.0)), Some(CellId::new(0, 1)));
        assert_eq!(a.cell_of(Vec2::new(-0.1, 10.0)), None);
        // top/right edges are closed
        assert_eq!(a.cell_of(Vec2::new(60.0, 60.0)), Some(CellId::new(2, 2)));
        assert_eq!(a.cell_of(Vec2::new(60.0001, 30.0)), None);
        assert_eq!(a.cell_of(Vec2::new(f64::NAN, 30.0)), None);
    }

    #[test]
    fn centers() {
        let a = Arena::default();
        assert_eq!(a.cell_center(CellId::new(0, 0)), Vec2::new(10.0, 10.0));
        assert_eq!(a.cell_center(CellId::new(1, 1)), Vec2::new(30.0, 30.0));
        assert_eq!(a.cell_center(CellId::new(2, 2)), Vec2::new(50.0, 50.0));
    }

    #[test]
    fn contains_examples() {
        let a = Arena::default();
        let c = CellId::new(0, 0);
        assert!(a.contains(c, Vec2::new(19.99, 19.99)));
        assert!(!a.contains(c, Vec2::new(20.0, 10.0)));
        assert!(!a.contains(c, Vec2::new(10.0, 25.0)));
    }

    #[test]
    fn invalid_arenas_rejected() {
        assert!(Arena::new(0.0, 60.0, 3, 3).is_err());
        assert!(Arena::new(60.0, f64::INFINITY, 3, 3).is_err());
        assert!(Arena::new(60.0, 60.0, 0, 3).is_err());
        assert!(Arena::new(60.0, 60.0, 3, 3).is_ok());
    }

    #[test]
    fn linear_index_round_trip() {
        let a = Arena::default();
        for (i, c) in a.cells().enumerate() {
            assert_eq!(a.linear_index(c), i);
            assert_eq!(a.cell_from_index(i), Some(c));
        }
        assert_eq!(a.cell_from_index(9), None);
    }

    proptest! {
        #[test]
        fn partition_and_consistency(x in 0.0f64..=60.0, y in 0.0f64..=60.0) {
            let a = Arena::default();
            let p = Vec2::new(x, y);
            let owners: Vec<_> = a.cells().filter(|&c| a.contains(c, p)).collect();
            prop_assert_eq!(owners.len(), 1);
            prop_assert_eq!(a.cell_of(p), Some(owners[0]));
        }

        #[test]
        fn center_is_inside(rows in 1usize..7, cols in 1usize..7, w in 1.0f64..500.0, h in 1.0f64..500.0) {
            let a = Arena::new(w, h, rows, cols).unwrap();
            for c in a.cells() {
                prop_assert!(a.contains(c, a.cell_center(c)));
            }
        }
    }
}
