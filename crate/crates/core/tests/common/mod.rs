//! Oracles and scene generators shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use igp_core::geom::{lift, xy, Pose2, Rect, Vec2, Vec3};
use igp_core::policy::Candidate;
use igp_core::sim::{create_world, execute_command_observed, rope_arclength, BoxDims, ExecOptions, IgpAction, PullCommand, WorldConfig, WorldState};
use igp_core::Result;
use rand::Rng;

/// Single- or two-agent scene with random placement, rope lengths and box.
pub fn random_world<R: Rng>(rng: &mut R) -> WorldState {
    loop {
        let object = Vec2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let n = rng.random_range(1..=2usize);
        let first = rng.random_range(-PI..PI);
        let mut poses = Vec::new();
        let mut ropes = Vec::new();
        for a in 0..n {
            let bearing = first + a as f64 * PI + rng.random_range(-0.3..0.3);
            let gap = rng.random_range(1.0..2.2);
            let p = object + Vec2::new(bearing.cos(), bearing.sin()) * gap;
            poses.push(Pose2::new(p.x, p.y, bearing + PI));
            ropes.push(rng.random_range((gap + 0.2).max(2.5)..4.0));
        }
        let cfg = WorldConfig {
            agent_poses: poses,
            rope_lengths: ropes,
            box_dims: BoxDims::new(rng.random_range(0.1..0.2), rng.random_range(0.1..0.15), rng.random_range(0.05..0.1)),
            box_init_pose: Pose2::new(object.x, object.y, rng.random_range(-PI..PI)),
            rng_seed: rng.random(),
            ..WorldConfig::default()
        };
        if let Ok(w) = create_world(cfg) {
            return w;
        }
    }
}

/// A valid action: grasp on a particle of the agent's rope within reach, pull
/// point uniform in the reach disc. `None` when no particle is reachable.
pub fn random_action<R: Rng>(world: &WorldState, rng: &mut R) -> Option<IgpAction> {
    let agent = rng.random_range(0..world.n_agents());
    let base = world.agent_position(agent);
    let reach = world.config.max_reach;
    let reachable: Vec<Vec3> = world.ropes[agent].particles.iter().filter(|p| (xy(p) - base).norm() <= reach).cloned().collect();
    if reachable.is_empty() {
        return None;
    }
    let g = reachable[rng.random_range(0..reachable.len())];
    let pull = loop {
        let p = Vec2::new(rng.random_range(-reach..reach), rng.random_range(-reach..reach));
        if p.norm() <= reach {
            break base + p;
        }
    };
    Some(IgpAction::new(agent, lift(xy(&g), world.config.grasp_height), lift(pull, world.config.grasp_height)))
}

/// Worst observations over every settle of one executed command.
#[derive(Debug, Clone, Copy, Default)]
pub struct SettleAudit {
    pub settles: usize,
    /// max |arclength - rest length| / rest length over all ropes and settles
    pub worst_stretch: f64,
    /// min over held settles of (object step) . unit(attachment -> gripper)
    pub worst_pull_alignment: f64,
}

pub fn audit_command(world: &WorldState, command: &PullCommand) -> Result<(WorldState, SettleAudit)> {
    let agent = command.agent_id;
    let mut audit = SettleAudit::default();
    let mut prev = world.object_position();
    let mut observer = |w: &WorldState| {
        audit.settles += 1;
        for rope in &w.ropes {
            let rest = rope.rest_length();
            audit.worst_stretch = audit.worst_stretch.max((rope_arclength(rope) - rest).abs() / rest);
        }
        let now = w.object_position();
        let step = now - prev;
        let along = match w.grippers[agent] {
            Some(g) => {
                let d = xy(&g) - xy(&w.attachment(agent));
                if d.norm() > 1e-12 {
                    step.dot(&(d / d.norm()))
                } else {
                    0.0
                }
            }
            // released: nothing may move the object
            None => -step.norm(),
        };
        audit.worst_pull_alignment = audit.worst_pull_alignment.min(along);
        prev = now;
    };
    let (next, _) = execute_command_observed(world, command, ExecOptions::default(), &mut observer)?;
    Ok((next, audit))
}

/// Agent at the origin, box 2 m along +x, straight rope of `length`.
pub fn straight_world(length: f64) -> WorldState {
    create_world(WorldConfig {
        agent_poses: vec![Pose2::new(0.0, 0.0, 0.0)],
        rope_lengths: vec![length],
        box_init_pose: Pose2::new(2.0, 0.0, 0.0),
        initial_wiggle: 0.0,
        ..WorldConfig::default()
    })
    .unwrap()
}

/// Object displacement of a radial pull by `delta` on a taut straight rope.
pub fn radial_pull_displacement(delta: f64) -> Result<(f64, f64)> {
    // rope shorter than the agent-box gap would be rejected; 2.0 m leaves the
    // end 0.07 m past the agent so the rope is taut and the end reachable
    let w = straight_world(2.0);
    let rope = &w.ropes[0];
    let end = rope.particles[rope.free_end_index()];
    let attach = w.attachment(0);
    let away = (xy(&end) - xy(&attach)).normalize();
    let pull = lift(xy(&end) + away * delta, end.z);
    let (next, _) = igp_core::sim::execute_igp(&w, &IgpAction::new(0, end, pull))?;
    Ok(((next.object_position() - w.object_position()).norm(), w.config.settle_tolerance))
}

/// Exhaustive scan of the whole planning window on the lattice anchored at the
/// object: nearest point to the target that lies in the easy-reach triangle
/// (apex at the object, base of half-width `reach` centred on the agent,
/// perpendicular to agent -> object) and in the +-15 degree cone around
/// object -> target, apex excluded.
pub fn gip_scan(agent: Vec2, object: Vec2, target: Vec2, reach: f64, window: &Rect, step: f64) -> Option<(f64, Vec2)> {
    let axis = (object - agent) / (object - agent).norm();
    let normal = Vec2::new(-axis.y, axis.x);
    let (a, b, c) = (object, agent + normal * reach, agent - normal * reach);
    // barycentric coordinates
    let det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    let in_triangle = |p: Vec2| {
        let l1 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / det;
        let l2 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / det;
        let l3 = 1.0 - l1 - l2;
        l1 >= -1e-9 && l2 >= -1e-9 && l3 >= -1e-9
    };
    let heading = (target - object).y.atan2((target - object).x);
    let in_cone = |p: Vec2| {
        let v = p - object;
        if v.norm() < 1e-12 {
            return false;
        }
        let mut d = v.y.atan2(v.x) - heading;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        d.abs() <= PI / 12.0 + 1e-9
    };
    let mut best: Option<(f64, Vec2)> = None;
    let n = ((window.max[0] - window.min[0]) / step).ceil() as i64 + 1;
    for j in -n..=n {
        for i in -n..=n {
            let p = object + Vec2::new(i as f64 * step, j as f64 * step);
            let inside = p.x >= window.min[0] && p.x <= window.max[0] && p.y >= window.min[1] && p.y <= window.max[1];
            if !inside || !in_triangle(p) || !in_cone(p) {
                continue;
            }
            let d = (p - target).norm();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
    }
    best
}

/// Distance of `p` from the line through `a` and `b`.
pub fn line_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    ((p - a).x * d.y - (p - a).y * d.x).abs() / d.norm()
}

/// Index of the smallest l, computed by full sort over (l, agent, index).
pub fn brute_force_argmin(ls: &[f64], candidates: &[Candidate]) -> usize {
    let mut order: Vec<usize> = (0..ls.len()).collect();
    order.sort_by(|&i, &j| {
        ls[i].total_cmp(&ls[j])
            .then(candidates[i].agent_id.cmp(&candidates[j].agent_id))
            .then(candidates[i].index.cmp(&candidates[j].index))
    });
    order[0]
}

/// Random candidate set of `n` candidates across two agents.
pub fn random_candidates<R: Rng>(n: usize, rng: &mut R) -> Vec<Candidate> {
    (0..n)
        .map(|k| {
            let agent = k % 2;
            let a = IgpAction::new(agent, Vec3::zeros(), Vec3::zeros());
            let offset = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            Candidate::new(a, k / 2, offset)
        })
        .collect()
}

/// Central finite-difference check of the analytic gradient; returns the
/// worst relative error over all parameters.
pub fn gradient_check(params: &igp_core::learned::MlpParams, x: &[f64], t: &[f64], loss: igp_core::learned::Loss) -> f64 {
    let (_, grad) = params.gradient(x, t, loss).unwrap();
    let analytic = grad.flat();
    let theta = params.flat();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        let mut p = params.clone();
        let mut th = theta.clone();
        th[k] += h;
        p.set_flat(&th);
        let up = loss.value(&p.forward(x).unwrap(), t);
        th[k] -= 2.0 * h;
        p.set_flat(&th);
        let down = loss.value(&p.forward(x).unwrap(), t);
        let numeric = (up - down) / (2.0 * h);
        let err = (numeric - analytic[k]).abs() / numeric.abs().max(analytic[k].abs()).max(1e-5);
        worst = worst.max(err);
    }
    worst
}
