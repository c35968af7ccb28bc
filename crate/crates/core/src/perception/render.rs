use serde::{Deserialize, Serialize};

use super::grid::{label, Grid, MapFrame, ObservationConfig};
use super::raster::supercover;
use crate::error::{Error, Result};
use crate::geom::{rotate, xy, Vec2, Vec3};
use crate::sim::WorldState;

/// Height of a rope lying on the ground.
pub const ROPE_THICKNESS: f64 = 0.01;

/// Height above ground of the tallest element per cell (m).
pub type DepthMap = Grid<f64>;
/// Labels from [`label`].
pub type SegMap = Grid<u8>;
/// 1 where rope is graspable (rope cell within reach), else 0.
pub type ReachMap = Grid<u8>;
/// Four horizontal bands holding object x/y and target x/y in the agent frame.
pub type RelPosMap = Grid<f64>;

/// Spatial relative-position map: the object sits at the anchor cell
/// `(w/2, w-1)` and the goal cell is marked with 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialRelPosMap {
    pub grid: Grid<f64>,
    pub anchor: (usize, usize),
    pub goal_cell: (usize, usize),
    /// The goal fell outside the grid and was clamped to its border.
    pub clipped: bool,
    pub resolution: f64,
    /// Heading of the agent frame the map is aligned with.
    pub heading: f64,
}

impl SpatialRelPosMap {
    pub fn anchor_for(w: usize) -> (usize, usize) {
        (w / 2, w - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub frame: MapFrame,
    pub d: DepthMap,
    pub s: SegMap,
    pub r: ReachMap,
    pub v: RelPosMap,
    pub p: SpatialRelPosMap,
    pub agent_id: usize,
    pub time_step: u64,
}

impl ObservationSet {
    pub fn reach_cells(&self) -> Vec<(usize, usize)> {
        self.r.iter_cells().filter(|&(_, v)| v == 1).map(|(c, _)| c).collect()
    }
}

/// Renders the five maps of `agent_id` for the given (sub)goal `target`.
pub fn render_observation(
    world: &WorldState,
    agent_id: usize,
    target: Vec2,
    cfg: &ObservationConfig,
) -> ObservationSet {
    let frame = MapFrame {
        agent: world.agents[agent_id],
        resolution: cfg.resolution,
        w: cfg.w,
    };
    let w = cfg.w;
    let mut d = Grid::filled(w, 0.0);
    let mut s = Grid::filled(w, label::EMPTY);

    let stamp = |row: usize, col: usize, lbl: u8, height: f64, d: &mut DepthMap, s: &mut SegMap| {
        if !frame.visible(row, col) {
            return;
        }
        if lbl > s.get(row, col) {
            s.set(row, col, lbl);
        }
        if height > d.get(row, col) {
            d.set(row, col, height);
        }
    };

    for rope in &world.ropes {
        for seg in rope.particles.windows(2) {
            let a = frame.world_to_grid(xy(&seg[0]));
            let b = frame.world_to_grid(xy(&seg[1]));
            let height = seg[0].z.max(seg[1].z) + ROPE_THICKNESS;
            supercover(a, b, |c, r| {
                if c >= 0 && r >= 0 && (c as usize) < w && (r as usize) < w {
                    stamp(r as usize, c as usize, label::ROPE, height, &mut d, &mut s);
                }
            });
        }
    }

    let body = &world.body;
    let (hw, hd) = (body.dims.width / 2.0, body.dims.depth / 2.0);
    let corners = [(-hw, -hd), (hw, -hd), (hw, hd), (-hw, hd)]
        .map(|(x, y)| frame.world_to_grid(body.pose.to_world(Vec2::new(x, y))));
    let lo = corners.iter().fold(Vec2::repeat(f64::INFINITY), |m, c| m.inf(c));
    let hi = corners.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |m, c| m.sup(c));
    let clamp = |v: f64| v.floor().clamp(0.0, (w - 1) as f64) as usize;
    if hi.x >= 0.0 && hi.y >= 0.0 && lo.x < w as f64 && lo.y < w as f64 {
        for row in clamp(lo.y)..=clamp(hi.y) {
            for col in clamp(lo.x)..=clamp(hi.x) {
                if body.contains(frame.cell_center_world(row, col)) {
                    stamp(row, col, label::OBJECT, body.dims.height, &mut d, &mut s);
                }
            }
        }
    }
    if let Some((row, col)) = frame.world_to_cell(body.indicator_world()) {
        stamp(row, col, label::INDICATOR, body.dims.height, &mut d, &mut s);
    }

    let reach = world.config.max_reach;
    let mut r = Grid::filled(w, 0u8);
    for ((row, col), lbl) in s.iter_cells() {
        if lbl == label::ROPE && frame.cell_center_local(row, col).norm() <= reach {
            r.set(row, col, 1);
        }
    }

    let object_local = frame.agent.to_local(world.object_position());
    let target_local = frame.agent.to_local(target);
    let v = encode_rpm(w, [object_local.x, object_local.y, target_local.x, target_local.y]);
    let p = encode_srpm(w, cfg.resolution, frame.agent.theta, target_local - object_local);

    ObservationSet {
        frame,
        d,
        s,
        r,
        v,
        p,
        agent_id,
        time_step: world.time_step,
    }
}

fn encode_rpm(w: usize, values: [f64; 4]) -> RelPosMap {
    let band = w / 4;
    let mut grid = Grid::filled(w, 0.0);
    for (k, value) in values.into_iter().enumerate() {
        for row in k * band..(k + 1) * band {
            for col in 0..w {
                grid.set(row, col, value);
            }
        }
    }
    grid
}

/// Reads back the four RPM components.
pub fn decode_rpm(v: &RelPosMap) -> [f64; 4] {
    let band = v.w / 4;
    [0, 1, 2, 3].map(|k| v.get(k * band, 0))
}

fn encode_srpm(w: usize, resolution: f64, heading: f64, offset_local: Vec2) -> SpatialRelPosMap {
    let anchor = SpatialRelPosMap::anchor_for(w);
    let row = anchor.0 as f64 + (offset_local.y / resolution).round();
    let col = anchor.1 as f64 + (offset_local.x / resolution).round();
    let max = (w - 1) as f64;
    let clipped = !(0.0..=max).contains(&row) || !(0.0..=max).contains(&col);
    let goal_cell = (row.clamp(0.0, max) as usize, col.clamp(0.0, max) as usize);
    let mut grid = Grid::filled(w, 0.0);
    grid.set(goal_cell.0, goal_cell.1, 1.0);
    SpatialRelPosMap {
        grid,
        anchor,
        goal_cell,
        clipped,
        resolution,
        heading,
    }
}

/// World-frame offset from the object represented by `cell` of an S-RPM.
pub fn srpm_to_offset(p: &SpatialRelPosMap, cell: (usize, usize)) -> Vec2 {
    let local = Vec2::new(
        (cell.1 as f64 - p.anchor.1 as f64) * p.resolution,
        (cell.0 as f64 - p.anchor.0 as f64) * p.resolution,
    );
    rotate(local, p.heading)
}

/// Cell of an S-RPM representing a world-frame offset from the object, if inside the grid.
pub fn offset_to_cell(p: &SpatialRelPosMap, offset: Vec2) -> Option<(usize, usize)> {
    let local = rotate(offset, -p.heading);
    let row = p.anchor.0 as f64 + (local.y / p.resolution).round();
    let col = p.anchor.1 as f64 + (local.x / p.resolution).round();
    let w = p.grid.w as f64;
    (row >= 0.0 && col >= 0.0 && row < w && col < w).then_some((row as usize, col as usize))
}

/// Stamps the grasp point (and its 3x3 neighbourhood) with label 4.
pub fn encode_grasp(s: &SegMap, frame: &MapFrame, grasp: Vec3) -> Result<SegMap> {
    let (row, col) = frame
        .world_to_cell(xy(&grasp))
        .ok_or(Error::OutOfWindow { x: grasp.x, y: grasp.y })?;
    let mut out = s.clone();
    let w = s.w as i64;
    for dr in -1..=1i64 {
        for dc in -1..=1i64 {
            let (r, c) = (row as i64 + dr, col as i64 + dc);
            if r >= 0 && c >= 0 && r < w && c < w {
                out.set(r as usize, c as usize, label::GRASP);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::sim::{create_world, BoxDims, WorldConfig};

    fn world() -> WorldState {
        create_world(WorldConfig {
            agent_poses: vec![Pose2::new(0.0, 0.0, 0.0)],
            rope_lengths: vec![3.0],
            box_init_pose: Pose2::new(2.0, 0.0, 0.0),
            box_dims: BoxDims::new(0.2, 0.15, 0.05),
            initial_wiggle: 0.0,
            ..WorldConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn empty_cells_are_zero() {
        let w = world();
        let obs = render_observation(&w, 0, Vec2::new(1.0, 0.0), &ObservationConfig::default());
        let (row, col) = obs.frame.world_to_cell(Vec2::new(0.0, 2.0)).unwrap();
        assert_eq!(obs.d.get(row, col), 0.0);
        assert_eq!(obs.s.get(row, col), label::EMPTY);
    }

    #[test]
    fn rope_within_reach_is_graspable() {
        let w = world();
        let obs = render_observation(&w, 0, Vec2::new(1.0, 0.0), &ObservationConfig::default());
        let (row, col) = obs.frame.world_to_cell(Vec2::new(0.5, 0.0)).unwrap();
        assert_eq!(obs.s.get(row, col), label::ROPE);
        assert_eq!(obs.r.get(row, col), 1);
    }

    #[test]
    fn box_cell_carries_box_height() {
        let w = world();
        let obs = render_observation(&w, 0, Vec2::new(1.0, 0.0), &ObservationConfig::default());
        let (row, col) = obs.frame.world_to_cell(Vec2::new(2.06, 0.04)).unwrap();
        assert_eq!(obs.s.get(row, col), label::OBJECT);
        assert_eq!(obs.d.get(row, col), 0.05);
        let (row, col) = obs.frame.world_to_cell(Vec2::new(2.0, 0.0)).unwrap();
        assert_eq!(obs.s.get(row, col), label::INDICATOR);
    }

    #[test]
    fn grasp_stamp_and_window_errors() {
        let w = world();
        let obs = render_observation(&w, 0, Vec2::new(1.0, 0.0), &ObservationConfig::default());
        let g = Vec3::new(0.5, 0.0, 0.0);
        let s = encode_grasp(&obs.s, &obs.frame, g).unwrap();
        let (row, col) = obs.frame.world_to_cell(xy(&g)).unwrap();
        assert_eq!(s.get(row, col), label::GRASP);
        let n = s.cells.iter().filter(|&&l| l == label::GRASP).count();
        assert!((1..=9).contains(&n));
        assert!(matches!(
            encode_grasp(&obs.s, &obs.frame, Vec3::new(10.0, 0.0, 0.0)),
            Err(Error::OutOfWindow { .. })
        ));
    }

    #[test]
    fn srpm_anchor_and_neighbour_offsets() {
        let w = world();
        let obs = render_observation(&w, 0, Vec2::new(1.0, 0.0), &ObservationConfig::default());
        assert_eq!(obs.p.anchor, (64, 127));
        assert_eq!(srpm_to_offset(&obs.p, obs.p.anchor), Vec2::zeros());
        let left = srpm_to_offset(&obs.p, (64, 126));
        assert!((left.norm() - 0.05).abs() < 1e-12);
        // one column left points from the object toward the agent
        assert!(left.x < 0.0);
        let back = decode_rpm(&obs.v);
        assert_eq!(back, [2.0, 0.0, 1.0, 0.0]);
    }
}
