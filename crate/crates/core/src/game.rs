//! The neighborhood-reveal game session.
//!
//! Each adversary turn reveals one vertex: the algorithm then sees the
//! vertex's closed neighborhood and all of its incident edges, and must
//! irrevocably accept or reject the revealed vertex before the next turn.
//! Exposed but unrevealed neighbors keep persistent opaque identities across
//! turns — this is the information boundary the whole construction rests on,
//! so everything the algorithm may look at goes through [`SessionView`],
//! which never names concrete vertices or roles.
//!
//! The game runs for all `|V|` turns; the algorithm wins when the final
//! decision set is feasible and meets the budget (at most `k` for the
//! minimization problems, at least `k` for independent set).

use crate::graph::{LabeledGraph, VertexId};
use crate::offline::Problem;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

/// Opaque per-session vertex identity, assigned in order of first exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionVertex(pub u32);

impl fmt::Display for SessionVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    In,
    Out,
}

impl Decision {
    pub fn accepted(self) -> bool {
        self == Decision::In
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AlgorithmWins,
    AdversaryWins,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameError {
    UnknownVertex(VertexId),
    AlreadyRevealed(VertexId),
    /// A reveal is waiting for a decision.
    DecisionPending,
    /// `decide` called with no reveal pending.
    NoPendingReveal,
    GameOver,
    GameNotFinished,
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            GameError::AlreadyRevealed(v) => write!(f, "{v} was already revealed"),
            GameError::DecisionPending => write!(f, "previous reveal still awaits a decision"),
            GameError::NoPendingReveal => write!(f, "no reveal awaiting a decision"),
            GameError::GameOver => write!(f, "all vertices have been revealed"),
            GameError::GameNotFinished => write!(f, "the game is not finished"),
        }
    }
}

impl core::error::Error for GameError {}

/// Feasibility of a vertex set: every edge covered (vertex cover), no edge
/// inside the set (independent set), every vertex in some closed neighborhood
/// of the set (dominating set).
pub fn feasible(problem: Problem, g: &LabeledGraph, sol: &BTreeSet<VertexId>) -> bool {
    match problem {
        Problem::VertexCover => {
            g.edges().all(|(u, v)| sol.contains(&u) || sol.contains(&v))
        }
        Problem::IndependentSet => {
            g.edges().all(|(u, v)| !(sol.contains(&u) && sol.contains(&v)))
        }
        Problem::DominatingSet => g.vertices().all(|v| {
            sol.contains(&v) || g.neighbors(v).any(|u| sol.contains(&u))
        }),
    }
}

/// The per-turn disclosure: the revealed vertex, its closed neighborhood
/// (persistent session identities), and its incident edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevelationSubgraph {
    pub revealed: SessionVertex,
    pub neighborhood: Vec<SessionVertex>,
    pub edges: Vec<(SessionVertex, SessionVertex)>,
}

impl RevelationSubgraph {
    /// Degree of the revealed vertex.
    pub fn degree(&self) -> usize {
        self.edges.len()
    }
}

/// One recorded turn of a finished or running session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptTurn {
    pub step: usize,
    pub vertex: VertexId,
    pub session: SessionVertex,
    pub neighborhood_size: usize,
    pub decision: Decision,
}

/// A replayable record of a full match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub problem: Problem,
    pub budget: usize,
    pub turns: Vec<TranscriptTurn>,
    pub outcome: Outcome,
    pub solution_size: usize,
}

/// A single reveal-model session over a fixed instance graph.
#[derive(Debug, Clone)]
pub struct GameState<'g> {
    graph: &'g LabeledGraph,
    problem: Problem,
    budget: usize,
    session_of: BTreeMap<VertexId, SessionVertex>,
    concrete_of: Vec<VertexId>,
    revealed: Vec<SessionVertex>,
    revealed_set: BTreeSet<SessionVertex>,
    revealed_edges: BTreeSet<(SessionVertex, SessionVertex)>,
    decisions: BTreeMap<SessionVertex, Decision>,
    pending: Option<SessionVertex>,
    turns: Vec<TranscriptTurn>,
}

impl<'g> GameState<'g> {
    pub fn new(problem: Problem, graph: &'g LabeledGraph, budget: usize) -> Self {
        GameState {
            graph,
            problem,
            budget,
            session_of: BTreeMap::new(),
            concrete_of: Vec::new(),
            revealed: Vec::new(),
            revealed_set: BTreeSet::new(),
            revealed_edges: BTreeSet::new(),
            decisions: BTreeMap::new(),
            pending: None,
            turns: Vec::new(),
        }
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn graph(&self) -> &'g LabeledGraph {
        self.graph
    }

    pub fn steps_taken(&self) -> usize {
        self.revealed.len()
    }

    pub fn finished(&self) -> bool {
        self.revealed.len() == self.graph.len() && self.pending.is_none()
    }

    fn session_id(&mut self, v: VertexId) -> SessionVertex {
        if let Some(&sv) = self.session_of.get(&v) {
            return sv;
        }
        let sv = SessionVertex(self.concrete_of.len() as u32);
        self.session_of.insert(v, sv);
        self.concrete_of.push(v);
        sv
    }

    /// Concrete vertex behind a session id. Adversary-side only; policies
    /// work through [`SessionView`].
    pub fn concrete_vertex(&self, sv: SessionVertex) -> VertexId {
        self.concrete_of[sv.0 as usize]
    }

    /// Session id of a concrete vertex, if it has been seen.
    pub fn session_of(&self, v: VertexId) -> Option<SessionVertex> {
        self.session_of.get(&v).copied()
    }

    pub fn is_revealed(&self, v: VertexId) -> bool {
        self.session_of(v).is_some_and(|sv| self.revealed_set.contains(&sv))
    }

    /// Adversary move: reveal `v`, disclosing its closed neighborhood.
    pub fn reveal(&mut self, v: VertexId) -> Result<RevelationSubgraph, GameError> {
        if !self.graph.contains(v) {
            return Err(GameError::UnknownVertex(v));
        }
        if self.pending.is_some() {
            return Err(GameError::DecisionPending);
        }
        if self.is_revealed(v) {
            return Err(GameError::AlreadyRevealed(v));
        }
        if self.revealed.len() == self.graph.len() {
            return Err(GameError::GameOver);
        }
        let sv = self.session_id(v);
        self.revealed.push(sv);
        self.revealed_set.insert(sv);
        self.pending = Some(sv);

        let mut neighborhood = alloc::vec![sv];
        let mut edges = Vec::new();
        let neighbors: Vec<VertexId> = self.graph.neighbors(v).collect();
        for u in neighbors {
            let su = self.session_id(u);
            neighborhood.push(su);
            let key = if sv < su { (sv, su) } else { (su, sv) };
            self.revealed_edges.insert(key);
            edges.push((sv, su));
        }
        Ok(RevelationSubgraph { revealed: sv, neighborhood, edges })
    }

    /// Algorithm move: decide the pending revealed vertex, irrevocably.
    pub fn decide(&mut self, choice: Decision) -> Result<(), GameError> {
        let Some(sv) = self.pending.take() else {
            return Err(GameError::NoPendingReveal);
        };
        self.decisions.insert(sv, choice);
        let vertex = self.concrete_vertex(sv);
        self.turns.push(TranscriptTurn {
            step: self.turns.len() + 1,
            vertex,
            session: sv,
            neighborhood_size: self.graph.degree(vertex).expect("revealed vertex") + 1,
            decision: choice,
        });
        Ok(())
    }

    /// The accepted vertices, as concrete ids.
    pub fn solution(&self) -> BTreeSet<VertexId> {
        self.decisions
            .iter()
            .filter(|(_, d)| d.accepted())
            .map(|(sv, _)| self.concrete_vertex(*sv))
            .collect()
    }

    /// Final outcome; the game must have run all `|V|` turns.
    pub fn outcome(&self) -> Result<Outcome, GameError> {
        if !self.finished() {
            return Err(GameError::GameNotFinished);
        }
        let sol = self.solution();
        let size_ok = if self.problem.is_minimization() {
            sol.len() <= self.budget
        } else {
            sol.len() >= self.budget
        };
        if size_ok && feasible(self.problem, self.graph, &sol) {
            Ok(Outcome::AlgorithmWins)
        } else {
            Ok(Outcome::AdversaryWins)
        }
    }

    /// Early-loss check: true when no continuation can save the algorithm.
    /// Optional short-circuit; must agree with the full-play outcome.
    pub fn algorithm_has_lost(&self) -> bool {
        let accepted =
            self.decisions.values().filter(|d| d.accepted()).count();
        let decided_out = |v: VertexId| -> bool {
            self.session_of(v).and_then(|sv| self.decisions.get(&sv).copied())
                == Some(Decision::Out)
        };
        match self.problem {
            Problem::VertexCover => {
                accepted > self.budget
                    || self.graph.edges().any(|(u, v)| decided_out(u) && decided_out(v))
            }
            Problem::DominatingSet => {
                accepted > self.budget
                    || self.graph.vertices().any(|v| {
                        decided_out(v) && self.graph.neighbors(v).all(decided_out)
                    })
            }
            Problem::IndependentSet => {
                let undecided = self.graph.len() - self.decisions.len();
                let conflict = self.graph.edges().any(|(u, v)| {
                    !decided_out(u) && !decided_out(v) && {
                        let win = |w: VertexId| {
                            self.session_of(w)
                                .and_then(|sw| self.decisions.get(&sw).copied())
                                == Some(Decision::In)
                        };
                        win(u) && win(v)
                    }
                });
                conflict || accepted + undecided < self.budget
            }
        }
    }

    /// Full transcript; the game must be finished.
    pub fn transcript(&self) -> Result<Transcript, GameError> {
        Ok(Transcript {
            problem: self.problem,
            budget: self.budget,
            turns: self.turns.clone(),
            outcome: self.outcome()?,
            solution_size: self.solution().len(),
        })
    }

    /// The algorithm-facing projection of this session.
    pub fn view(&self) -> SessionView<'_, 'g> {
        SessionView { state: self }
    }
}

/// What the online algorithm is allowed to observe: session identities,
/// reveal order, revealed edges, neighborhood sizes, and its own decisions.
#[derive(Debug, Clone, Copy)]
pub struct SessionView<'s, 'g> {
    state: &'s GameState<'g>,
}

impl<'s, 'g> SessionView<'s, 'g> {
    /// Revealed vertices in reveal order.
    pub fn revealed(&self) -> &[SessionVertex] {
        &self.state.revealed
    }

    pub fn is_revealed(&self, sv: SessionVertex) -> bool {
        self.state.revealed_set.contains(&sv)
    }

    /// Number of session identities seen so far (revealed or exposed).
    pub fn seen_count(&self) -> usize {
        self.state.concrete_of.len()
    }

    /// Degree of a revealed vertex (its full star is known).
    pub fn degree_of_revealed(&self, sv: SessionVertex) -> Option<usize> {
        if !self.is_revealed(sv) {
            return None;
        }
        let v = self.state.concrete_vertex(sv);
        self.state.graph.degree(v).ok()
    }

    /// Whether the edge `{a, b}` has been disclosed.
    pub fn adjacent(&self, a: SessionVertex, b: SessionVertex) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.state.revealed_edges.contains(&key)
    }

    /// Disclosed neighbors of `sv` (complete exactly when `sv` is revealed).
    pub fn known_neighbors(&self, sv: SessionVertex) -> Vec<SessionVertex> {
        let mut result = Vec::new();
        for &(a, b) in &self.state.revealed_edges {
            if a == sv {
                result.push(b);
            } else if b == sv {
                result.push(a);
            }
        }
        result
    }

    /// Count of common disclosed neighbors of two vertices. Exact when both
    /// are revealed.
    pub fn common_neighbor_count(&self, a: SessionVertex, b: SessionVertex) -> usize {
        let na: BTreeSet<SessionVertex> = self.known_neighbors(a).into_iter().collect();
        self.known_neighbors(b).into_iter().filter(|sv| na.contains(sv)).count()
    }

    pub fn decision_of(&self, sv: SessionVertex) -> Option<Decision> {
        self.state.decisions.get(&sv).copied()
    }

    pub fn accepted_count(&self) -> usize {
        self.state.decisions.values().filter(|d| d.accepted()).count()
    }
}

/// Replays a transcript against a fresh session on the same graph and
/// returns the final state; the caller compares outcome and solution.
pub fn replay_transcript<'g>(
    graph: &'g LabeledGraph,
    t: &Transcript,
) -> Result<GameState<'g>, GameError> {
    let mut state = GameState::new(t.problem, graph, t.budget);
    for turn in &t.turns {
        state.reveal(turn.vertex)?;
        state.decide(turn.decision)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExpectedChoice, VertexRole};

    fn plain(n: usize, edges: &[(u32, u32)]) -> LabeledGraph {
        let mut g = LabeledGraph::new();
        for i in 0..n {
            g.add_vertex(VertexRole::DrLeaf { var: i as u32 }, ExpectedChoice::Reject);
        }
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v)).unwrap();
        }
        g
    }

    #[test]
    fn k2_reveal_shows_both_vertices() {
        let g = plain(2, &[(0, 1)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        let rev = s.reveal(VertexId(0)).unwrap();
        assert_eq!(rev.neighborhood.len(), 2);
        assert_eq!(rev.edges.len(), 1);
        assert_eq!(rev.degree(), 1);
    }

    #[test]
    fn p3_center_reveal_shows_all() {
        let g = plain(3, &[(0, 1), (1, 2)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        let rev = s.reveal(VertexId(1)).unwrap();
        assert_eq!(rev.neighborhood.len(), 3);
        assert_eq!(rev.edges.len(), 2);
    }

    #[test]
    fn exposed_identities_persist_across_reveals() {
        // Reveal endpoint a of the path a-b-c, then the center b: the second
        // revelation names b (as previously exposed), fresh c, and both
        // incident edges of b.
        let g = plain(3, &[(0, 1), (1, 2)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        let first = s.reveal(VertexId(0)).unwrap();
        s.decide(Decision::Out).unwrap();
        let b_session = first.neighborhood[1];
        let second = s.reveal(VertexId(1)).unwrap();
        assert_eq!(second.revealed, b_session);
        assert_eq!(second.neighborhood.len(), 3);
        assert!(second.neighborhood.contains(&first.revealed));
        assert_eq!(second.edges.len(), 2);
        assert_eq!(s.view().seen_count(), 3);
    }

    #[test]
    fn reveal_and_decide_errors() {
        let g = plain(2, &[(0, 1)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        assert_eq!(s.decide(Decision::In), Err(GameError::NoPendingReveal));
        s.reveal(VertexId(0)).unwrap();
        assert_eq!(s.reveal(VertexId(1)), Err(GameError::DecisionPending));
        s.decide(Decision::In).unwrap();
        assert_eq!(s.decide(Decision::In), Err(GameError::NoPendingReveal));
        assert_eq!(s.reveal(VertexId(0)), Err(GameError::AlreadyRevealed(VertexId(0))));
        assert_eq!(s.outcome(), Err(GameError::GameNotFinished));
    }

    #[test]
    fn full_k2_play_and_outcome() {
        let g = plain(2, &[(0, 1)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        s.reveal(VertexId(0)).unwrap();
        s.decide(Decision::In).unwrap();
        s.reveal(VertexId(1)).unwrap();
        s.decide(Decision::Out).unwrap();
        assert_eq!(s.solution(), [VertexId(0)].into_iter().collect());
        assert_eq!(s.outcome(), Ok(Outcome::AlgorithmWins));

        // With budget 0 every play loses.
        let mut s = GameState::new(Problem::VertexCover, &g, 0);
        s.reveal(VertexId(0)).unwrap();
        s.decide(Decision::Out).unwrap();
        s.reveal(VertexId(1)).unwrap();
        s.decide(Decision::Out).unwrap();
        assert_eq!(s.outcome(), Ok(Outcome::AdversaryWins));
    }

    #[test]
    fn is_outcome_counts_upward() {
        let g = plain(2, &[(0, 1)]);
        let mut s = GameState::new(Problem::IndependentSet, &g, 1);
        s.reveal(VertexId(0)).unwrap();
        s.decide(Decision::In).unwrap();
        s.reveal(VertexId(1)).unwrap();
        s.decide(Decision::Out).unwrap();
        assert_eq!(s.outcome(), Ok(Outcome::AlgorithmWins));
    }

    #[test]
    fn feasibility_predicates() {
        let k2 = plain(2, &[(0, 1)]);
        let u: BTreeSet<VertexId> = [VertexId(0)].into_iter().collect();
        let both: BTreeSet<VertexId> = [VertexId(0), VertexId(1)].into_iter().collect();
        assert!(feasible(Problem::VertexCover, &k2, &u));
        assert!(!feasible(Problem::IndependentSet, &k2, &both));
        let star = plain(4, &[(0, 1), (0, 2), (0, 3)]);
        let center: BTreeSet<VertexId> = [VertexId(0)].into_iter().collect();
        assert!(feasible(Problem::DominatingSet, &star, &center));
        assert!(!feasible(Problem::DominatingSet, &star, &BTreeSet::new()));
    }

    #[test]
    fn transcript_replay_reproduces_outcome() {
        let g = plain(3, &[(0, 1), (1, 2)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        for (v, d) in [(1, Decision::In), (0, Decision::Out), (2, Decision::Out)] {
            s.reveal(VertexId(v)).unwrap();
            s.decide(d).unwrap();
        }
        let t = s.transcript().unwrap();
        assert_eq!(t.outcome, Outcome::AlgorithmWins);
        let replayed = replay_transcript(&g, &t).unwrap();
        assert_eq!(replayed.outcome(), Ok(t.outcome));
        assert_eq!(replayed.solution(), s.solution());
        assert_eq!(replayed.transcript().unwrap(), t);
    }

    #[test]
    fn early_loss_detection_is_conservative() {
        let g = plain(2, &[(0, 1)]);
        let mut s = GameState::new(Problem::VertexCover, &g, 1);
        s.reveal(VertexId(0)).unwrap();
        s.decide(Decision::Out).unwrap();
        assert!(!s.algorithm_has_lost());
        s.reveal(VertexId(1)).unwrap();
        s.decide(Decision::Out).unwrap();
        assert!(s.algorithm_has_lost());
        assert_eq!(s.outcome(), Ok(Outcome::AdversaryWins));
    }
}
