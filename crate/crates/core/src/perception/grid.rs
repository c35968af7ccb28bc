use serde::{Deserialize, Serialize};

use crate::geom::{Pose2, Vec2};

/// Segmentation labels.
pub mod label {
    pub const EMPTY: u8 = 0;
    pub const ROPE: u8 = 1;
    pub const OBJECT: u8 = 2;
    pub const INDICATOR: u8 = 3;
    pub const GRASP: u8 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationConfig {
    pub w: usize,
    pub resolution: f64,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            w: 128,
            resolution: 0.05,
        }
    }
}

/// Square row-major grid; `row` runs along the agent's +y axis, `col` along +x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub w: usize,
    pub cells: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(w: usize, value: T) -> Self {
        Self {
            w,
            cells: vec![value; w * w],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[row * self.w + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.cells[row * self.w + col] = value;
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        let w = self.w;
        self.cells.iter().enumerate().map(move |(i, &v)| ((i / w, i % w), v))
    }
}

/// Placement of a map in the world: the observing agent's pose plus cell size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFrame {
    pub agent: Pose2,
    pub resolution: f64,
    pub w: usize,
}

impl MapFrame {
    pub fn half_extent(&self) -> f64 {
        self.w as f64 * self.resolution / 2.0
    }

    /// Agent-frame offset of the lower corner of cell (0, 0).
    pub fn origin(&self) -> Vec2 {
        let h = self.half_extent();
        Vec2::new(-h, -h)
    }

    /// Continuous grid coordinates (col, row) of a world point.
    pub fn world_to_grid(&self, p: Vec2) -> Vec2 {
        let local = self.agent.to_local(p);
        let h = self.half_extent();
        Vec2::new((local.x + h) / self.resolution, (local.y + h) / self.resolution)
    }

    pub fn world_to_cell(&self, p: Vec2) -> Option<(usize, usize)> {
        let g = self.world_to_grid(p);
        let (c, r) = (g.x.floor(), g.y.floor());
        let w = self.w as f64;
        if c >= 0.0 && r >= 0.0 && c < w && r < w {
            Some((r as usize, c as usize))
        } else {
            None
        }
    }

    pub fn cell_center_local(&self, row: usize, col: usize) -> Vec2 {
        self.origin() + Vec2::new((col as f64 + 0.5) * self.resolution, (row as f64 + 0.5) * self.resolution)
    }

    pub fn cell_center_world(&self, row: usize, col: usize) -> Vec2 {
        self.agent.to_world(self.cell_center_local(row, col))
    }

    /// A cell is visible when its whole footprint lies within the field of view.
    pub fn visible(&self, row: usize, col: usize) -> bool {
        let half_diag = self.resolution * std::f64::consts::FRAC_1_SQRT_2;
        self.cell_center_local(row, col).norm() + half_diag <= self.half_extent()
    }
}
