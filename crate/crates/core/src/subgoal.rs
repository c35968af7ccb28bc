//! Subgoal planners turning a possibly distant target into a local goal.
//!
//! The linear greedy planner walks from the object toward the target and
//! stops at the planning window border. The geometric intersection planner
//! searches a region that is both easy to reach with one linear pull by the
//! agent and within a narrow cone around the object-to-target direction.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{cross2, Rect, Vec2};
use crate::perception::{write_pgm, ObservationConfig};

/// Half-angle of the target cone.
pub const SECTOR_HALF_ANGLE: f64 = PI / 12.0;
pub const DEFAULT_GRID_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SubgoalSource {
    Lgp,
    Gip,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subgoal {
    pub position: Vec2,
    pub source: SubgoalSource,
    pub clipped: bool,
}

impl Subgoal {
    pub fn raw(position: Vec2) -> Self {
        Self {
            position,
            source: SubgoalSource::Raw,
            clipped: false,
        }
    }
}

/// Planning window: a square the size of the observation maps centred on the object.
pub fn planning_window(object: Vec2, cfg: &ObservationConfig) -> Rect {
    Rect::centered(object, cfg.w as f64 * cfg.resolution / 2.0)
}

pub fn lgp_subgoal(object: Vec2, target: Vec2, window: &Rect) -> Subgoal {
    if window.contains(target) {
        return Subgoal {
            position: target,
            source: SubgoalSource::Lgp,
            clipped: false,
        };
    }
    let d = target - object;
    // largest t in [0, 1] keeping object + t d inside the window
    let mut t: f64 = 1.0;
    for axis in 0..2 {
        if d[axis] > 0.0 {
            t = t.min((window.max[axis] - object[axis]) / d[axis]);
        } else if d[axis] < 0.0 {
            t = t.min((window.min[axis] - object[axis]) / d[axis]);
        }
    }
    // rounding may leave the border point an ulp outside
    let position = (object + d * t.max(0.0)).sup(&window.min_corner()).inf(&window.max_corner());
    Subgoal {
        position,
        source: SubgoalSource::Lgp,
        clipped: true,
    }
}

/// Easy-reach triangle and target cone of the geometric intersection planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GipRegion {
    /// Apex at the object, base centred on the agent.
    pub triangle: [Vec2; 3],
    pub sector_apex: Vec2,
    pub sector_bisector: Vec2,
    pub sector_half_angle: f64,
}

impl GipRegion {
    pub fn new(agent: Vec2, object: Vec2, target: Vec2, max_reach: f64) -> Self {
        let axis = (object - agent).normalize();
        let normal = Vec2::new(-axis.y, axis.x);
        let bisector = target - object;
        Self {
            triangle: [object, agent + normal * max_reach, agent - normal * max_reach],
            sector_apex: object,
            sector_bisector: bisector / bisector.norm(),
            sector_half_angle: SECTOR_HALF_ANGLE,
        }
    }

    pub fn in_triangle(&self, p: Vec2) -> bool {
        let [a, b, c] = self.triangle;
        let eps = 1e-12;
        let s1 = cross2(b - a, p - a);
        let s2 = cross2(c - b, p - b);
        let s3 = cross2(a - c, p - c);
        (s1 >= -eps && s2 >= -eps && s3 >= -eps) || (s1 <= eps && s2 <= eps && s3 <= eps)
    }

    /// Inside the cone, apex excluded.
    pub fn in_sector(&self, p: Vec2) -> bool {
        let v = p - self.sector_apex;
        let n = v.norm();
        n > 1e-12 && v.dot(&self.sector_bisector) / n >= self.sector_half_angle.cos() - 1e-12
    }

    pub fn feasible(&self, p: Vec2, window: &Rect) -> bool {
        window.contains(p) && self.in_triangle(p) && self.in_sector(p)
    }

    fn bounds(&self) -> (Vec2, Vec2) {
        let lo = self.triangle.iter().fold(Vec2::repeat(f64::INFINITY), |m, v| m.inf(v));
        let hi = self.triangle.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |m, v| m.sup(v));
        (lo, hi)
    }
}

/// Lattice of candidate points anchored at `origin` with spacing `step`,
/// restricted to `[lo, hi]`, visited row by row.
fn lattice(origin: Vec2, step: f64, lo: Vec2, hi: Vec2) -> impl Iterator<Item = Vec2> {
    let i0 = ((lo.x - origin.x) / step).ceil() as i64;
    let i1 = ((hi.x - origin.x) / step).floor() as i64;
    let j0 = ((lo.y - origin.y) / step).ceil() as i64;
    let j1 = ((hi.y - origin.y) / step).floor() as i64;
    (j0..=j1).flat_map(move |j| (i0..=i1).map(move |i| origin + Vec2::new(i as f64 * step, j as f64 * step)))
}

pub fn gip_subgoal(
    agent: Vec2,
    object: Vec2,
    target: Vec2,
    max_reach: f64,
    window: &Rect,
    grid_step: f64,
) -> Subgoal {
    if (target - object).norm() < 1e-12 {
        return Subgoal::raw(target);
    }
    if (object - agent).norm() < 1e-12 {
        return lgp_subgoal(object, target, window);
    }
    let region = GipRegion::new(agent, object, target, max_reach);
    let (lo, hi) = region.bounds();
    let lo = lo.sup(&window.min_corner());
    let hi = hi.inf(&window.max_corner());
    let mut best: Option<(f64, Vec2)> = None;
    for p in lattice(object, grid_step, lo, hi) {
        if !region.feasible(p, window) {
            continue;
        }
        let d = (p - target).norm();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, p));
        }
    }
    match best {
        Some((d, p)) if d < (object - target).norm() => Subgoal {
            position: p,
            source: SubgoalSource::Gip,
            clipped: false,
        },
        _ => lgp_subgoal(object, target, window),
    }
}

/// Writes the feasible region over the planning window as a PGM (grey = feasible,
/// white = chosen subgoal). Row 0 is the window's lowest y.
pub fn dump_gip_region(
    path: &Path,
    agent: Vec2,
    object: Vec2,
    target: Vec2,
    max_reach: f64,
    window: &Rect,
    grid_step: f64,
) -> Result<Subgoal> {
    let sub = gip_subgoal(agent, object, target, max_reach, window, grid_step);
    let region = GipRegion::new(agent, object, target, max_reach);
    let cols = ((window.max[0] - window.min[0]) / grid_step).floor() as usize + 1;
    let rows = ((window.max[1] - window.min[1]) / grid_step).floor() as usize + 1;
    let mut px = vec![0u8; cols * rows];
    for r in 0..rows {
        for c in 0..cols {
            let p = window.min_corner() + Vec2::new(c as f64, r as f64) * grid_step;
            if region.feasible(p, window) {
                px[r * cols + c] = 128;
            }
        }
    }
    let cell = (sub.position - window.min_corner()) / grid_step;
    let (c, r) = (cell.x.round() as usize, cell.y.round() as usize);
    if c < cols && r < rows {
        px[r * cols + c] = 255;
    }
    write_pgm(path, cols, rows, &px)?;
    Ok(sub)
}
