use igp_collab::{Phase, Session, SessionConfig, SessionError, WireMessage};
use igp_core::geom::{xy, Vec2};
use igp_core::harness::{StepOutcome, TerminalStatus};

fn config(seed: u64) -> SessionConfig {
    SessionConfig {
        seed,
        timeout_ms: 1000,
        ..SessionConfig::default()
    }
}

fn session(seed: u64) -> Session {
    Session::new(config(seed), None).unwrap()
}

fn free_end(s: &Session, agent: usize) -> Vec2 {
    let rope = &s.world().ropes[agent];
    xy(&rope.particles[rope.free_end_index()])
}

fn types(msgs: &[WireMessage]) -> Vec<&'static str> {
    msgs.iter()
        .map(|m| match m {
            WireMessage::StateUpdate { .. } => "state_update",
            WireMessage::HumanAction { .. } => "human_action",
            WireMessage::RobotActionNotice { .. } => "robot_action_notice",
            WireMessage::Terminal { .. } => "terminal",
            WireMessage::Error { .. } => "error",
        })
        .collect()
}

#[test]
fn new_session_waits_for_the_human() {
    let s = session(1);
    assert_eq!(s.phase(), Phase::WaitHuman);
    assert_eq!(s.l_history().len(), 1);
    match s.state_update(250) {
        WireMessage::StateUpdate { phase, steps, robot_in_ms, l, target, .. } => {
            assert_eq!(phase, Phase::WaitHuman);
            assert_eq!(steps, 0);
            assert_eq!(robot_in_ms, 750);
            let d = (s.world().object_position() - Vec2::new(target[0], target[1])).norm();
            assert_eq!(l, d);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let err = Session::new(SessionConfig { timeout_ms: 0, ..config(1) }, None).err().unwrap();
    assert_eq!(err.code(), "config");
    let err = Session::new(SessionConfig { human_agent: 5, ..config(1) }, None).err().unwrap();
    assert_eq!(err.code(), "config");
}

#[test]
fn robot_waits_for_the_timeout() {
    let mut s = session(2);
    assert!(s.tick(999).is_empty());
    assert_eq!(s.steps().len(), 0);
    let msgs = s.tick(1000);
    assert_eq!(types(&msgs)[..2], ["robot_action_notice", "state_update"]);
    match &msgs[0] {
        WireMessage::RobotActionNotice { agent_id, candidates, predicted_l, .. } => {
            assert_ne!(*agent_id, s.config().human_agent);
            assert!(*candidates > 0);
            assert!(predicted_l.is_some());
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(s.steps().len(), 1);
    assert_ne!(s.steps()[0].agent_id, 0);
    // the clock restarts after every action
    assert!(s.tick(1500).is_empty());
}

#[test]
fn human_action_resets_the_clock() {
    let mut s = session(3);
    let end = free_end(&s, 0);
    s.submit_human_action(end, end, 900).unwrap();
    assert!(s.tick(1800).is_empty());
    assert!(!s.tick(1900).is_empty());
}

#[test]
fn robot_turns_replay_identically() {
    let run = |seed| {
        let mut s = session(seed);
        for k in 1..=2 {
            s.tick(k * 1000);
        }
        (s.world().to_snapshot(), s.steps().to_vec())
    };
    assert_eq!(run(4), run(4));
}

#[test]
fn slackening_the_rope_does_not_move_the_object() {
    let mut s = session(5);
    let before = s.world().object_position();
    let end = free_end(&s, 0);
    let toward = xy(&s.world().attachment(0)) - end;
    let pull = end + toward / toward.norm() * 0.3;
    let msgs = s.submit_human_action(end, pull, 10).unwrap();
    assert_eq!(types(&msgs)[0], "state_update");
    assert_eq!(s.steps()[0].outcome, StepOutcome::Executed);
    let moved = (s.world().object_position() - before).norm();
    assert!(moved <= 2.0 * s.world().config.settle_tolerance, "object moved {moved}");
}

#[test]
fn human_reach_is_not_limited() {
    let mut s = session(6);
    let end = free_end(&s, 0);
    let base = s.world().agent_position(0);
    let away = (end - base) / (end - base).norm();
    let far = end + away * (s.world().config.max_reach + 0.5);
    s.submit_human_action(end, far, 10).unwrap();
    assert_eq!(s.steps()[0].outcome, StepOutcome::Executed);
}

#[test]
fn grasp_miss_consumes_the_turn() {
    let mut s = session(7);
    let before = s.world().to_snapshot();
    // farthest arena corner from every particle of the human's rope
    let half = s.world().config.arena_half_extent;
    let corners = [Vec2::new(half, half), Vec2::new(-half, half), Vec2::new(half, -half), Vec2::new(-half, -half)];
    let rope = &s.world().ropes[0];
    let gap = |c: &Vec2| rope.particles.iter().map(|p| (xy(p) - c).norm()).fold(f64::INFINITY, f64::min);
    let corner = corners.iter().cloned().max_by(|a, b| gap(a).total_cmp(&gap(b))).unwrap();
    assert!(gap(&corner) > s.world().config.grasp_radius);
    let msgs = s.submit_human_action(corner, corner, 10).unwrap();
    assert_eq!(types(&msgs)[..2], ["error", "state_update"]);
    match &msgs[0] {
        WireMessage::Error { code, .. } => assert_eq!(code, "grasp_miss"),
        other => panic!("{other:?}"),
    }
    assert_eq!(s.steps().len(), 1);
    assert_eq!(s.steps()[0].outcome, StepOutcome::GraspMiss);
    assert_eq!(s.world().to_snapshot().particles, before.particles);
    assert_eq!(s.world().to_snapshot().body_pose, before.body_pose);
}

#[test]
fn out_of_arena_points_are_rejected() {
    let mut s = session(8);
    let half = s.world().config.arena_half_extent;
    let end = free_end(&s, 0);
    let err = s.submit_human_action(end, Vec2::new(half + 0.1, 0.0), 10).unwrap_err();
    assert!(matches!(err, SessionError::OutOfArena { .. }));
    assert_eq!(s.steps().len(), 0);
}

#[test]
fn human_is_busy_while_the_robot_acts() {
    let mut s = session(9);
    let job = s.begin_robot_turn(1000).unwrap();
    assert_eq!(s.phase(), Phase::RobotActing);
    assert!(s.begin_robot_turn(5000).is_none());
    let end = free_end(&s, 0);
    let err = s.submit_human_action(end, end, 1001).unwrap_err();
    assert_eq!(err.code(), "busy");
    s.finish_robot_turn(job.run(), 1200);
    assert_ne!(s.phase(), Phase::RobotActing);
}

#[test]
fn robot_alone_ends_the_session_with_consistent_summary() {
    let mut s = session(10);
    let max_steps = igp_core::harness::TaskSpec::new(s.config().task).max_steps;
    let mut last = Vec::new();
    let mut t = 0;
    while s.phase() != Phase::Terminal {
        assert!(s.steps().len() <= max_steps, "session never ended");
        t += 1000;
        last = s.tick(t);
    }
    let status = s.status().unwrap();
    match last.last().unwrap() {
        WireMessage::Terminal { status: st, success, fo, so, sc } => {
            assert_eq!(*st, status);
            let h = s.l_history();
            assert_eq!(*fo, *h.last().unwrap());
            assert_eq!(*so, h.iter().cloned().fold(f64::INFINITY, f64::min));
            assert_eq!(*sc, s.steps().len());
            assert!(so <= fo);
            assert_eq!(*success, *fo < 0.2);
            if status == TerminalStatus::Reached {
                assert!(*fo < 0.1);
            }
        }
        other => panic!("{other:?}"),
    }
    let end = free_end(&s, 0);
    assert_eq!(s.submit_human_action(end, end, t + 1).unwrap_err().code(), "finished");
    assert!(s.tick(t + 10_000).is_empty());
}

#[test]
fn wire_messages_use_snake_case_tags() {
    let s = session(11);
    let json: serde_json::Value = serde_json::from_str(&s.state_update(0).to_json()).unwrap();
    assert_eq!(json["type"], "state_update");
    assert_eq!(json["phase"], "WAIT_HUMAN");
    let action: WireMessage = serde_json::from_str(r#"{"type":"human_action","grasp":[0.5,0.25],"pull":[1,2]}"#).unwrap();
    assert_eq!(action, WireMessage::HumanAction { grasp: [0.5, 0.25], pull: [1.0, 2.0] });
    let err = WireMessage::error("busy", "later");
    assert_eq!(serde_json::from_str::<WireMessage>(&err.to_json()).unwrap(), err);
}

#[test]
fn whole_initial_scene_lies_inside_the_arena() {
    for seed in 0..50 {
        let s = session(seed);
        let w = s.world();
        let half = w.config.arena_half_extent;
        assert!(half >= igp_core::sim::WorldConfig::default().arena_half_extent);
        let inside = |p: Vec2| p.x.abs() <= half && p.y.abs() <= half;
        for rope in &w.ropes {
            assert!(rope.particles.iter().all(|p| inside(xy(p))), "seed {seed}");
        }
        assert!(inside(s.target()));
    }
}
