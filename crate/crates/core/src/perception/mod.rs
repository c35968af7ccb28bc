//! Agent-centric observation maps rendered as orthographic top-down grids.
//!
//! Every agent sees a `w x w` window centred on itself and aligned with its
//! heading; cells whose footprint leaves the circular field of view of radius
//! `w * resolution / 2` stay empty.

mod dump;
mod grid;
mod raster;
mod render;

pub use dump::{dump_observation, write_pgm, MapSidecar};
pub use grid::{label, Grid, MapFrame, ObservationConfig};
pub use raster::supercover;
pub use render::{
    decode_rpm, encode_grasp, offset_to_cell, render_observation, srpm_to_offset, DepthMap, ObservationSet,
    ReachMap, RelPosMap, SegMap, SpatialRelPosMap,
};
