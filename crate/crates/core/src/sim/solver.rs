//! Quasi-static relaxation.
//!
//! Each sweep enforces, rope by rope: the grasp pin, the box drag rule, the
//! inextensible section between the attachment and the grasp (two-ended
//! forward/backward chain relaxation), and the trailing section (follow the
//! leader). Sweeps repeat until no particle or box point moves by more than
//! `settle_tolerance`.

use super::world::WorldState;
use crate::error::{Error, Result};
use crate::geom::{unit_or, Vec2, Vec3};

/// Inner iterations of the two-pin chain relaxation per sweep.
const CHAIN_ITERATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleReport {
    pub iterations: usize,
    pub residual: f64,
}

pub fn settle(world: &mut WorldState) -> Result<SettleReport> {
    let tol = world.config.settle_tolerance;
    let max_iter = world.config.max_settle_iterations;
    let mut residual = f64::INFINITY;
    for iter in 0..max_iter {
        residual = sweep(world);
        if residual < tol {
            return Ok(SettleReport {
                iterations: iter + 1,
                residual,
            });
        }
    }
    Err(Error::Divergence {
        iterations: max_iter,
        residual,
    })
}

fn sweep(world: &mut WorldState) -> f64 {
    let stretch = world.config.friction_stretch();
    let rotation_rate = world.config.rotation_rate;
    let chain_tol = world.config.settle_tolerance * 1e-2;
    let mut residual: f64 = 0.0;

    for r in 0..world.ropes.len() {
        let attach = world.attachment(r);
        match (world.ropes[r].grasped_index, world.grippers[r]) {
            (Some(g), Some(grip)) => {
                let rest = world.ropes[r].segment_rest_length;
                let held = rest * g as f64;
                let gap = (grip - attach).norm();
                let attach = if gap > held + stretch {
                    let delta = drag_distance(attach, grip, held + stretch);
                    residual = residual.max(world.body.drag(r, delta, rotation_rate));
                    world.attachment(r)
                } else {
                    attach
                };
                let rope = &mut world.ropes[r];
                residual = residual.max(relax_between(
                    &mut rope.particles[..=g],
                    attach,
                    grip,
                    rest,
                    chain_tol,
                ));
                residual = residual.max(follow(&mut rope.particles[g..], rest));
            }
            _ => {
                let rope = &mut world.ropes[r];
                let rest = rope.segment_rest_length;
                residual = residual.max((rope.particles[0] - attach).norm());
                rope.particles[0] = attach;
                residual = residual.max(follow(&mut rope.particles[..], rest));
            }
        }
    }
    residual
}

/// Planar box translation that brings the attachment back to `length` from the gripper.
fn drag_distance(attach: Vec3, grip: Vec3, length: f64) -> Vec2 {
    let d = grip - attach;
    let planar = Vec2::new(d.x, d.y);
    let n = planar.norm();
    if n < 1e-12 {
        return Vec2::zeros();
    }
    let u = planar / n;
    // |d - t u|^2 = length^2, smaller root.
    let along = n;
    let disc = along * along - (d.norm_squared() - length * length);
    let t = if disc > 0.0 { along - disc.sqrt() } else { along };
    u * t.max(0.0)
}

/// Relaxes a chain pinned at both ends with fixed segment length `rest`.
/// A chain pulled straight is laid on the line between its pins.
fn relax_between(chain: &mut [Vec3], start: Vec3, end: Vec3, rest: f64, tol: f64) -> f64 {
    let n = chain.len() - 1;
    let before: Vec<Vec3> = chain.to_vec();
    if n == 0 {
        chain[0] = end;
    } else {
        let span = end - start;
        let gap = span.norm();
        if gap >= rest * n as f64 - 1e-12 {
            for (i, p) in chain.iter_mut().enumerate() {
                *p = start + span * (i as f64 / n as f64);
            }
        } else {
            let axis = unit_or(span, Vec3::x());
            for _ in 0..CHAIN_ITERATIONS {
                chain[n] = end;
                for i in (0..n).rev() {
                    let dir = unit_or(chain[i] - chain[i + 1], -axis);
                    chain[i] = chain[i + 1] + dir * rest;
                }
                chain[0] = start;
                for i in 1..=n {
                    let dir = unit_or(chain[i] - chain[i - 1], axis);
                    chain[i] = chain[i - 1] + dir * rest;
                }
                if (chain[n] - end).norm() < tol {
                    break;
                }
            }
            chain[n] = end;
        }
    }
    max_shift(&before, chain)
}

/// Follow-the-leader pass: each particle is moved the least amount that
/// restores its distance to the previous one.
fn follow(chain: &mut [Vec3], rest: f64) -> f64 {
    let mut moved: f64 = 0.0;
    let mut last_dir = Vec3::x();
    for i in 1..chain.len() {
        let dir = unit_or(chain[i] - chain[i - 1], last_dir);
        let mut next = chain[i - 1] + dir * rest;
        next.z = next.z.max(0.0);
        moved = moved.max((next - chain[i]).norm());
        chain[i] = next;
        last_dir = dir;
    }
    moved
}

fn max_shift(before: &[Vec3], after: &[Vec3]) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
