mod common;

use common::random_world;
use igp_core::geom::{lift, Vec2};
use igp_core::perception::{decode_rpm, dump_observation, encode_grasp, label, offset_to_cell, render_observation, srpm_to_offset, ObservationConfig};
use igp_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maps_satisfy_their_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng);
        let agent = rng.random_range(0..world.n_agents());
        let target = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let cfg = ObservationConfig::default();
        let obs = render_observation(&world, agent, target, &cfg);
        let half = cfg.w as f64 * cfg.resolution / 2.0;
        let reach = world.config.max_reach;

        for ((row, col), s) in obs.s.iter_cells() {
            let centre = obs.frame.cell_center_local(row, col);
            // reach map equals the direct per-cell predicate
            let graspable = s == label::ROPE && centre.norm() <= reach;
            prop_assert_eq!(obs.r.get(row, col) == 1, graspable);
            // nothing beyond the field of view
            if s != label::EMPTY || obs.d.get(row, col) > 0.0 {
                prop_assert!(centre.norm() <= half);
            }
            prop_assert!(obs.d.get(row, col) >= 0.0);
            prop_assert!(s != label::GRASP);
        }

        let pose = world.agents[agent];
        let o = pose.to_local(world.object_position());
        let t = pose.to_local(target);
        prop_assert_eq!(decode_rpm(&obs.v), [o.x, o.y, t.x, t.y]);
        prop_assert_eq!(obs.p.anchor, (cfg.w / 2, cfg.w - 1));
        prop_assert!(obs.p.clipped || offset_to_cell(&obs.p, target - world.object_position()) == Some(obs.p.goal_cell));
    }

    #[test]
    fn srpm_offsets_round_trip(dx in -3.0..3.0f64, dy in -3.0..3.0f64, heading in -3.1..3.1f64) {
        let world = igp_core::sim::create_world(igp_core::sim::WorldConfig {
            agent_poses: vec![igp_core::Pose2::new(-1.5, 0.0, heading)],
            rope_lengths: vec![2.5],
            ..Default::default()
        }).unwrap();
        let obs = render_observation(&world, 0, Vec2::new(0.5, 0.5), &ObservationConfig::default());
        let offset = Vec2::new(dx, dy);
        if let Some(cell) = offset_to_cell(&obs.p, offset) {
            let back = srpm_to_offset(&obs.p, cell);
            let local = igp_core::geom::rotate(back - offset, -heading);
            prop_assert!(local.x.abs() <= 0.025 + 1e-12 && local.y.abs() <= 0.025 + 1e-12);
        }
    }
}

#[test]
fn every_srpm_cell_maps_back_to_itself() {
    let world = igp_core::sim::create_world(Default::default()).unwrap();
    let obs = render_observation(&world, 1, Vec2::new(0.5, 0.5), &ObservationConfig::default());
    assert_eq!(srpm_to_offset(&obs.p, obs.p.anchor), Vec2::zeros());
    for row in 0..obs.p.grid.w {
        for col in 0..obs.p.grid.w {
            let off = srpm_to_offset(&obs.p, (row, col));
            assert_eq!(offset_to_cell(&obs.p, off), Some((row, col)));
        }
    }
}

#[test]
fn grasp_stamp_covers_at_most_nine_cells() {
    let world = igp_core::sim::create_world(Default::default()).unwrap();
    let obs = render_observation(&world, 0, Vec2::new(0.5, 0.0), &ObservationConfig::default());
    let g = lift(world.agent_position(0) + Vec2::new(0.3, 0.0), 0.0);
    let s = encode_grasp(&obs.s, &obs.frame, g).unwrap();
    let n = s.cells.iter().filter(|&&c| c == label::GRASP).count();
    assert!((1..=9).contains(&n));
    let far = lift(world.agent_position(0) + Vec2::new(9.0, 0.0), 0.0);
    assert!(matches!(encode_grasp(&obs.s, &obs.frame, far), Err(Error::OutOfWindow { .. })));
}

#[test]
fn dump_writes_five_maps_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let world = igp_core::sim::create_world(Default::default()).unwrap();
    let obs = render_observation(&world, 0, Vec2::new(0.5, 0.0), &ObservationConfig::default());
    let side = dump_observation(&obs, dir.path(), "a0").unwrap();
    assert_eq!(side.w, 128);
    for ch in ["d", "s", "r", "v", "p"] {
        let bytes = std::fs::read(dir.path().join(format!("a0_{ch}.pgm"))).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert!(bytes.len() > 128 * 128);
    }
    assert!(dir.path().join("a0.json").exists());
}
