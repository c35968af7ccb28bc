use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::sim::IgpAction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub agent_id: usize,
    /// Position within the agent's proposal list (0 = unperturbed proposal).
    pub index: usize,
    pub action: IgpAction,
    pub predicted_offset: Vec2,
    pub predicted_l: f64,
}

impl Candidate {
    pub fn new(action: IgpAction, index: usize, predicted_offset: Vec2) -> Self {
        Self {
            agent_id: action.agent_id,
            index,
            action,
            predicted_offset,
            predicted_l: f64::NAN,
        }
    }
}

fn key(c: &Candidate) -> (f64, usize, usize) {
    let l = if c.predicted_l.is_nan() { f64::INFINITY } else { c.predicted_l };
    (l, c.agent_id, c.index)
}

/// Position of the candidate with the smallest `predicted_l`; ties go to the
/// lower agent id, then the lower candidate index.
pub fn argmin_by_l(candidates: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let (l, a, k) = key(c);
                let (bl, ba, bk) = key(&candidates[b]);
                l < bl || (l == bl && (a, k) < (ba, bk))
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Scores every candidate by the predicted distance to `reference` and returns
/// the position of the best one.
pub fn select_best(candidates: &mut [Candidate], object: Vec2, reference: Vec2) -> Result<usize> {
    for c in candidates.iter_mut() {
        c.predicted_l = (object + c.predicted_offset - reference).norm();
    }
    argmin_by_l(candidates).ok_or(Error::EmptyCandidates)
}

#[derive(Serialize)]
struct LogLine<'a> {
    agent_id: usize,
    lambda: [f64; 3],
    eta: [f64; 3],
    predicted_offset: [f64; 2],
    predicted_l: f64,
    chosen: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<&'a usize>,
}

/// Writes one JSON line per candidate.
pub fn write_candidate_log<W: Write + ?Sized>(out: &mut W, candidates: &[Candidate], chosen: usize, step: Option<usize>) -> Result<()> {
    for (i, c) in candidates.iter().enumerate() {
        let line = LogLine {
            agent_id: c.agent_id,
            lambda: c.action.grasp.into(),
            eta: c.action.pull.into(),
            predicted_offset: c.predicted_offset.into(),
            predicted_l: c.predicted_l,
            chosen: i == chosen,
            step: step.as_ref(),
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
