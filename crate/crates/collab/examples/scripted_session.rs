//! Drives a collaboration session without a network: the "human" takes up
//! the slack on its rope once, then stays idle and the robot takes over.
//!
//! `cargo run --release -p igp-collab --example scripted_session -- 1`

use igp_collab::{Session, SessionConfig, WireMessage};
use igp_core::geom::xy;

fn main() -> Result<(), igp_collab::SessionError> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut s = Session::new(SessionConfig { seed, timeout_ms: 1000, ..SessionConfig::default() }, None)?;
    let rope = &s.world().ropes[0];
    let end = xy(&rope.particles[rope.free_end_index()]);
    let away = (end - s.world().object_position()).normalize();
    let mut t = 400;
    print(&s.submit_human_action(end, end + away * 0.3, t)?);
    while s.status().is_none() {
        t += 1000;
        print(&s.tick(t));
    }
    Ok(())
}

fn print(msgs: &[WireMessage]) {
    for m in msgs {
        match m {
            WireMessage::StateUpdate { steps, l, phase, .. } => println!("state   step {steps:2}  l {l:.3}  {phase:?}"),
            WireMessage::RobotActionNotice { agent_id, predicted_l, candidates, .. } => {
                println!("robot   agent {agent_id} picked 1 of {candidates}, predicted l {:.3}", predicted_l.unwrap_or(f64::NAN))
            }
            WireMessage::Terminal { status, success, fo, sc, .. } => println!("end     {status:?} success={success} fo {fo:.3} after {sc} steps"),
            WireMessage::Error { code, message } => println!("error   {code}: {message}"),
            WireMessage::HumanAction { .. } => {}
        }
    }
}
