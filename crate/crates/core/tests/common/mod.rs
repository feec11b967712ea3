//! Shared oracles for the integration tests. Everything here recomputes
//! results through an independent route: plain recursion instead of the
//! memoized evaluator, exhaustive subset scans instead of branch and bound,
//! and embedding search instead of the degree rules.

use ovsg_core::formula::{Literal, QbfInstance, Quantifier};
use ovsg_core::gadgets::OnlineInstance;
use ovsg_core::game::{GameState, SessionVertex};
use ovsg_core::graph::{ExpectedChoice, LabeledGraph, VertexId, VertexRole};
use ovsg_core::offline::Problem;
use ovsg_core::rng::SplitMix64;
use std::collections::{BTreeMap, BTreeSet};

/// Formula game value by direct recursion over full assignments.
pub fn naive_tqbf(q: &QbfInstance) -> bool {
    fn recurse(q: &QbfInstance, values: &mut Vec<bool>) -> bool {
        if values.len() == q.n() {
            return q.clauses().iter().all(|clause| {
                clause.literals().iter().any(|lit| lit.satisfied_by(values[lit.var as usize - 1]))
            });
        }
        let quantifier = q.quantifiers()[values.len()];
        let mut result = quantifier == Quantifier::Forall;
        for value in [true, false] {
            values.push(value);
            let branch = recurse(q, values);
            values.pop();
            result = match quantifier {
                Quantifier::Exists => result || branch,
                Quantifier::Forall => result && branch,
            };
        }
        result
    }
    recurse(q, &mut Vec::new())
}

/// Plain satisfiability by scanning all assignments.
pub fn naive_sat(q: &QbfInstance) -> bool {
    let n = q.n();
    (0..1u32 << n).any(|mask| {
        q.clauses().iter().all(|clause| {
            clause.literals().iter().any(|lit| lit.satisfied_by(mask & (1 << (lit.var - 1)) != 0))
        })
    })
}

/// Exact optimum by scanning all vertex subsets (graphs up to ~20 vertices).
pub fn brute_force_optimum(problem: Problem, g: &LabeledGraph) -> Option<usize> {
    let n = g.len();
    assert!(n <= 20, "brute force oracle is for small graphs");
    let mut best: Option<usize> = None;
    for mask in 0..1u64 << n {
        let solution: BTreeSet<VertexId> =
            (0..n as u32).filter(|v| mask & (1 << v) != 0).map(VertexId).collect();
        if !ovsg_core::game::feasible(problem, g, &solution) {
            continue;
        }
        best = Some(match (best, problem.is_minimization()) {
            (None, _) => solution.len(),
            (Some(b), true) => b.min(solution.len()),
            (Some(b), false) => b.max(solution.len()),
        });
    }
    best
}

/// Plain graph with throwaway roles.
pub fn plain_graph(n: usize, edges: &[(u32, u32)]) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    for _ in 0..n {
        g.add_vertex(VertexRole::VariableAux { var: 0 }, ExpectedChoice::Reject);
    }
    for &(u, v) in edges {
        g.add_edge(VertexId(u), VertexId(v)).unwrap();
    }
    g
}

/// Seeded random graph with edge probability one half.
pub fn random_graph(n: usize, rng: &mut SplitMix64) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    for _ in 0..n {
        g.add_vertex(VertexRole::VariableAux { var: 0 }, ExpectedChoice::Reject);
    }
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.chance(1, 2) {
                g.add_edge(VertexId(u), VertexId(v)).unwrap();
            }
        }
    }
    g
}

/// Relabels a graph by a permutation (`perm[old] = new`).
pub fn relabel(g: &LabeledGraph, perm: &[u32]) -> LabeledGraph {
    let mut out = LabeledGraph::new();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&old| perm[old]);
    for &old in &order {
        out.add_vertex(*g.role(VertexId(old as u32)), g.choice(VertexId(old as u32)));
    }
    for (u, v) in g.edges() {
        out.add_edge(VertexId(perm[u.index()]), VertexId(perm[v.index()])).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Consistent-embedding oracle for ∀-literal identification
// ---------------------------------------------------------------------------

struct Observation {
    /// Seen session vertices: revealed first (in reveal order), then exposed.
    seen: Vec<SessionVertex>,
    revealed_count: usize,
    /// Degrees of the revealed vertices.
    degrees: Vec<usize>,
    /// Disclosed adjacency among seen vertices.
    adjacent: BTreeSet<(SessionVertex, SessionVertex)>,
}

fn observe(state: &GameState) -> Observation {
    let view = state.view();
    let revealed: Vec<SessionVertex> = view.revealed().to_vec();
    let mut seen = revealed.clone();
    for id in 0..view.seen_count() as u32 {
        let sv = SessionVertex(id);
        if !revealed.contains(&sv) {
            seen.push(sv);
        }
    }
    let degrees = revealed
        .iter()
        .map(|&sv| view.degree_of_revealed(sv).expect("revealed"))
        .collect();
    let mut adjacent = BTreeSet::new();
    for (idx, &a) in seen.iter().enumerate() {
        for &b in &seen[idx + 1..] {
            if view.adjacent(a, b) {
                adjacent.insert((a.min(b), a.max(b)));
            }
        }
    }
    Observation { revealed_count: revealed.len(), seen, degrees, adjacent }
}

/// Is there an injection of the seen session vertices into the map that is
/// consistent with everything observed and maps each forced session vertex
/// to its required image? Backtracking with fail-first ordering: always
/// place the session vertex with the fewest viable images next.
fn embedding_exists(
    map: &LabeledGraph,
    obs: &Observation,
    forced: &BTreeMap<SessionVertex, VertexId>,
) -> bool {
    struct Search<'a> {
        map: &'a LabeledGraph,
        obs: &'a Observation,
        forced: &'a BTreeMap<SessionVertex, VertexId>,
        revealed: BTreeSet<SessionVertex>,
    }

    impl Search<'_> {
        fn consistent(
            &self,
            session: SessionVertex,
            candidate: VertexId,
            image: &BTreeMap<SessionVertex, VertexId>,
            used: &[bool],
        ) -> bool {
            if used[candidate.index()] {
                return false;
            }
            if let Some(&required) = self.forced.get(&session) {
                if candidate != required {
                    return false;
                }
            }
            let revealed = self.revealed.contains(&session);
            if revealed {
                let idx = self.obs.seen.iter().position(|&s| s == session).unwrap();
                if self.map.degree(candidate).unwrap() != self.obs.degrees[idx] {
                    return false;
                }
            }
            for (&placed_session, &placed_image) in image {
                // Between two seen vertices the adjacency is fully known
                // once either endpoint is revealed.
                if revealed || self.revealed.contains(&placed_session) {
                    let key = (session.min(placed_session), session.max(placed_session));
                    let observed = self.obs.adjacent.contains(&key);
                    if self.map.has_edge(candidate, placed_image) != observed {
                        return false;
                    }
                }
            }
            true
        }

        fn place(
            &self,
            image: &mut BTreeMap<SessionVertex, VertexId>,
            used: &mut Vec<bool>,
        ) -> bool {
            // Most-constrained next: fewest viable images.
            let mut best: Option<(usize, SessionVertex, Vec<VertexId>)> = None;
            for &session in &self.obs.seen {
                if image.contains_key(&session) {
                    continue;
                }
                let mut candidates = Vec::new();
                for candidate in self.map.vertices() {
                    if self.consistent(session, candidate, image, used) {
                        candidates.push(candidate);
                        if best.as_ref().is_some_and(|(count, _, _)| candidates.len() >= *count) {
                            break;
                        }
                    }
                }
                if candidates.is_empty() {
                    return false;
                }
                let count = candidates.len();
                if best.as_ref().is_none_or(|(c, _, _)| count < *c) {
                    let done = count == 1;
                    best = Some((count, session, candidates));
                    if done {
                        break;
                    }
                }
            }
            let Some((_, session, candidates)) = best else {
                return true; // everything placed
            };
            for candidate in candidates {
                image.insert(session, candidate);
                used[candidate.index()] = true;
                if self.place(image, used) {
                    return true;
                }
                image.remove(&session);
                used[candidate.index()] = false;
            }
            false
        }
    }

    let search = Search {
        map,
        obs,
        forced,
        revealed: obs.seen[..obs.revealed_count].iter().copied().collect(),
    };
    let mut image = BTreeMap::new();
    let mut used = vec![false; map.len()];
    search.place(&mut image, &mut used)
}

/// Identification by exhaustive embedding search: the pair of `var` resolves
/// to the session vertex that every consistent embedding maps to the
/// negative literal vertex. Requires both pair literals revealed.
pub fn oracle_identify_forall(
    inst: &OnlineInstance,
    state: &GameState,
    var: u32,
) -> Option<SessionVertex> {
    let pos = inst.literal_vertex(Literal::positive(var));
    let neg = inst.literal_vertex(Literal::negative(var));
    let a = state.session_of(pos)?;
    let b = state.session_of(neg)?;
    if !state.is_revealed(pos) || !state.is_revealed(neg) {
        return None;
    }
    let obs = observe(state);
    // The true embedding (a -> pos) always exists; the pair is resolved
    // exactly when the swapped embedding is impossible.
    let swapped: BTreeMap<SessionVertex, VertexId> = [(a, neg), (b, pos)].into_iter().collect();
    if embedding_exists(&inst.graph, &obs, &swapped) {
        None
    } else {
        Some(b)
    }
}
