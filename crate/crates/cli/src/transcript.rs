//! The transcript file: one record per turn, plus header and footer.
//!
//! ```text
//! ovsg-transcript v1
//! problem vc
//! budget 52
//! turn 1 v4 s0 8 in
//! ...
//! outcome algorithm
//! solution-size 52
//! ```
//!
//! A turn records the step number, the revealed vertex, its session id, the
//! size of the disclosed closed neighborhood, and the decision. The vertex
//! column makes a stored transcript replayable against its instance.

use crate::FormatError;
use ovsg_core::game::{Decision, Outcome, SessionVertex, Transcript, TranscriptTurn};
use ovsg_core::graph::VertexId;
use ovsg_core::offline::Problem;
use std::fmt::Write as _;

pub const TRANSCRIPT_HEADER: &str = "ovsg-transcript v1";

pub fn write_transcript(t: &Transcript) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{TRANSCRIPT_HEADER}");
    let _ = writeln!(out, "problem {}", t.problem.short_name());
    let _ = writeln!(out, "budget {}", t.budget);
    for turn in &t.turns {
        let _ = writeln!(
            out,
            "turn {} v{} s{} {} {}",
            turn.step,
            turn.vertex.0,
            turn.session.0,
            turn.neighborhood_size,
            if turn.decision.accepted() { "in" } else { "out" }
        );
    }
    let _ = writeln!(
        out,
        "outcome {}",
        match t.outcome {
            Outcome::AlgorithmWins => "algorithm",
            Outcome::AdversaryWins => "adversary",
        }
    );
    let _ = writeln!(out, "solution-size {}", t.solution_size);
    out
}

pub fn parse_transcript(text: &str) -> Result<Transcript, FormatError> {
    let mut lines = text.lines().enumerate().map(|(idx, line)| (idx + 1, line.trim()));
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::new("empty file"));
    };
    if header != TRANSCRIPT_HEADER {
        return Err(FormatError::at(1, format!("expected header `{TRANSCRIPT_HEADER}`")));
    }
    let mut problem = None;
    let mut budget = None;
    let mut turns = Vec::new();
    let mut outcome = None;
    let mut solution_size = None;

    let parse_tagged = |lineno: usize, token: &str, tag: char| -> Result<u32, FormatError> {
        token
            .strip_prefix(tag)
            .and_then(|rest| rest.parse().ok())
            .ok_or_else(|| FormatError::at(lineno, format!("bad token {token}")))
    };

    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("problem") => {
                let name = parts.next().unwrap_or_default();
                problem = Some(Problem::from_short_name(name).ok_or_else(|| {
                    FormatError::at(lineno, format!("unknown problem {name}"))
                })?);
            }
            Some("budget") => {
                budget = Some(
                    parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| FormatError::at(lineno, "bad budget"))?,
                );
            }
            Some("turn") => {
                let step: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| FormatError::at(lineno, "bad step"))?;
                let vertex = parse_tagged(lineno, parts.next().unwrap_or_default(), 'v')?;
                let session = parse_tagged(lineno, parts.next().unwrap_or_default(), 's')?;
                let neighborhood_size: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| FormatError::at(lineno, "bad neighborhood size"))?;
                let decision = match parts.next() {
                    Some("in") => Decision::In,
                    Some("out") => Decision::Out,
                    other => {
                        return Err(FormatError::at(
                            lineno,
                            format!("bad decision {other:?}"),
                        ));
                    }
                };
                turns.push(TranscriptTurn {
                    step,
                    vertex: VertexId(vertex),
                    session: SessionVertex(session),
                    neighborhood_size,
                    decision,
                });
            }
            Some("outcome") => {
                outcome = Some(match parts.next() {
                    Some("algorithm") => Outcome::AlgorithmWins,
                    Some("adversary") => Outcome::AdversaryWins,
                    other => {
                        return Err(FormatError::at(lineno, format!("bad outcome {other:?}")));
                    }
                });
            }
            Some("solution-size") => {
                solution_size = Some(
                    parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| FormatError::at(lineno, "bad solution size"))?,
                );
            }
            other => {
                return Err(FormatError::at(lineno, format!("unknown directive {other:?}")));
            }
        }
    }
    Ok(Transcript {
        problem: problem.ok_or_else(|| FormatError::new("missing problem"))?,
        budget: budget.ok_or_else(|| FormatError::new("missing budget"))?,
        turns,
        outcome: outcome.ok_or_else(|| FormatError::new("missing outcome"))?,
        solution_size: solution_size.ok_or_else(|| FormatError::new("missing solution size"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ovsg_core::formula::parse_qbf;
    use ovsg_core::gadgets::build_online_instance;
    use ovsg_core::strategies::head_to_head;

    #[test]
    fn transcript_round_trips() {
        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        let inst = build_online_instance(&q, Problem::VertexCover).unwrap();
        let (_, transcript) = head_to_head(&inst).unwrap();
        let text = write_transcript(&transcript);
        let back = parse_transcript(&text).unwrap();
        assert_eq!(back, transcript);
    }
}
