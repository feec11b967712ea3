//! Base 3-SAT gadget reductions and exact offline solvers.
//!
//! The three base reductions build the classic graphs:
//!
//! * vertex cover — an edge per variable between its two literal vertices,
//!   a triangle per clause, each triangle vertex joined to the literal it
//!   represents; budget `n + 2m`;
//! * independent set — the same shape, but each clause vertex joined to the
//!   negation of the literal it represents; budget `n + m`;
//! * dominating set — a triangle per variable (two literal vertices and an
//!   auxiliary third), a single vertex per clause joined to the literal
//!   vertices of its literals; budget `n`.
//!
//! The exact solvers are branch and bound with unit reductions and a node
//! cap, and they accept forced-in / forced-out constraints so that the gadget
//! layer can probe self-containment under every boundary forcing.

use crate::formula::{Assignment, Literal, QbfInstance};
use crate::game;
use crate::graph::{ExpectedChoice, GraphError, LabeledGraph, VertexId, VertexRole};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

/// The vertex subset problem a graph instance is played on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Problem {
    VertexCover,
    IndependentSet,
    DominatingSet,
}

impl Problem {
    pub const ALL: [Problem; 3] =
        [Problem::VertexCover, Problem::IndependentSet, Problem::DominatingSet];

    /// Vertex cover and dominating set ask for a set of size at most `k`;
    /// independent set for one of size at least `k`.
    pub fn is_minimization(self) -> bool {
        !matches!(self, Problem::IndependentSet)
    }

    /// Budget of the base reduction for a normalized formula.
    pub fn base_budget(self, n: usize, m: usize) -> usize {
        match self {
            Problem::VertexCover => n + 2 * m,
            Problem::IndependentSet => n + m,
            Problem::DominatingSet => n,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Problem::VertexCover => "vc",
            Problem::IndependentSet => "is",
            Problem::DominatingSet => "ds",
        }
    }

    pub fn from_short_name(name: &str) -> Option<Problem> {
        match name {
            "vc" => Some(Problem::VertexCover),
            "is" => Some(Problem::IndependentSet),
            "ds" => Some(Problem::DominatingSet),
            _ => None,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Problem::VertexCover => "vertex cover",
            Problem::IndependentSet => "independent set",
            Problem::DominatingSet => "dominating set",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OfflineError {
    NotNormalized,
    Graph(GraphError),
    /// The branch and bound solver exceeded its node cap.
    NodeCapExceeded { cap: u64 },
    /// The constraints admit no feasible solution.
    Infeasible,
    WitnessInfeasible,
    /// A feasible witness that does not encode a consistent assignment.
    NoConsistentAssignment,
}

impl fmt::Display for OfflineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OfflineError::NotNormalized => write!(f, "instance is not normalized"),
            OfflineError::Graph(e) => write!(f, "{e}"),
            OfflineError::NodeCapExceeded { cap } => {
                write!(f, "solver exceeded its node cap of {cap}")
            }
            OfflineError::Infeasible => write!(f, "no feasible solution under the constraints"),
            OfflineError::WitnessInfeasible => write!(f, "witness violates the constraints"),
            OfflineError::NoConsistentAssignment => {
                write!(f, "witness does not encode a satisfying assignment")
            }
        }
    }
}

impl core::error::Error for OfflineError {}

impl From<GraphError> for OfflineError {
    fn from(e: GraphError) -> Self {
        OfflineError::Graph(e)
    }
}

/// A base reduction graph with its budget and vertex indexes.
#[derive(Debug, Clone)]
pub struct OfflineReduction {
    pub problem: Problem,
    pub graph: LabeledGraph,
    pub k: usize,
    pub source: QbfInstance,
    literal_vertices: BTreeMap<Literal, VertexId>,
    clause_vertices: Vec<Vec<VertexId>>,
    aux_vertices: Vec<VertexId>,
}

impl OfflineReduction {
    pub fn literal_vertex(&self, lit: Literal) -> VertexId {
        self.literal_vertices[&lit]
    }

    /// Vertices of the clause gadget `j`: three members in literal order for
    /// vertex cover / independent set, one vertex for dominating set.
    pub fn clause_vertices(&self, clause: usize) -> &[VertexId] {
        &self.clause_vertices[clause]
    }

    /// Auxiliary triangle vertex per variable (dominating set only).
    pub fn aux_vertex(&self, var: u32) -> Option<VertexId> {
        self.aux_vertices.get(var as usize - 1).copied()
    }
}

/// Builds the base reduction graph for a normalized instance.
pub fn reduce_3sat(problem: Problem, q: &QbfInstance) -> Result<OfflineReduction, OfflineError> {
    if !q.is_normalized() {
        return Err(OfflineError::NotNormalized);
    }
    let mut graph = LabeledGraph::new();
    let mut literal_vertices = BTreeMap::new();
    let mut aux_vertices = Vec::new();

    for var in q.variables() {
        let pos = graph.add_vertex(
            VertexRole::Literal { lit: Literal::positive(var) },
            ExpectedChoice::FormulaDependent,
        );
        let neg = graph.add_vertex(
            VertexRole::Literal { lit: Literal::negative(var) },
            ExpectedChoice::FormulaDependent,
        );
        literal_vertices.insert(Literal::positive(var), pos);
        literal_vertices.insert(Literal::negative(var), neg);
        graph.add_edge(pos, neg)?;
        if problem == Problem::DominatingSet {
            let aux = graph.add_vertex(VertexRole::VariableAux { var }, ExpectedChoice::Reject);
            graph.add_edge(pos, aux)?;
            graph.add_edge(neg, aux)?;
            aux_vertices.push(aux);
        }
    }

    let mut clause_vertices = Vec::new();
    for (j, clause) in q.clauses().iter().enumerate() {
        match problem {
            Problem::VertexCover | Problem::IndependentSet => {
                let members: Vec<VertexId> = clause
                    .literals()
                    .iter()
                    .map(|&lit| {
                        graph.add_vertex(
                            VertexRole::ClauseMember { clause: j, lit: Some(lit) },
                            ExpectedChoice::FormulaDependent,
                        )
                    })
                    .collect();
                for a in 0..3 {
                    for b in a + 1..3 {
                        graph.add_edge(members[a], members[b])?;
                    }
                }
                for (member, &lit) in members.iter().zip(clause.literals()) {
                    let anchor = if problem == Problem::VertexCover { lit } else { lit.negated() };
                    graph.add_edge(*member, literal_vertices[&anchor])?;
                }
                clause_vertices.push(members);
            }
            Problem::DominatingSet => {
                let vertex = graph.add_vertex(
                    VertexRole::ClauseMember { clause: j, lit: None },
                    ExpectedChoice::Reject,
                );
                for &lit in clause.literals() {
                    graph.add_edge(vertex, literal_vertices[&lit])?;
                }
                clause_vertices.push(alloc::vec![vertex]);
            }
        }
    }

    Ok(OfflineReduction {
        problem,
        k: problem.base_budget(q.n(), q.m()),
        graph,
        source: q.clone(),
        literal_vertices,
        clause_vertices,
        aux_vertices,
    })
}

/// Options for the exact solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Hard cap on explored branch nodes.
    pub node_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_cap: 10_000_000 }
    }
}

/// Side constraints for the solvers.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub forced_in: BTreeSet<VertexId>,
    pub forced_out: BTreeSet<VertexId>,
    /// Dominating set only: restrict the domination obligation to these
    /// vertices. `None` means every vertex must be dominated.
    pub dominate_only: Option<BTreeSet<VertexId>>,
}

/// An exact optimum with one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub size: usize,
    pub witness: BTreeSet<VertexId>,
}

/// Exact optimum with the lexicographically smallest witness (by vertex id).
pub fn solve_offline_exact(
    problem: Problem,
    g: &LabeledGraph,
    opts: SolveOptions,
) -> Result<Optimum, OfflineError> {
    let base = solve_constrained(problem, g, &Constraints::default(), opts)?;
    // Greedy lexicographic refinement: force each vertex in ascending order
    // into the witness if the optimum value survives.
    let mut constraints = Constraints::default();
    let mut chosen = 0usize;
    for v in g.vertices() {
        if chosen == base.size {
            break;
        }
        constraints.forced_in.insert(v);
        match solve_constrained(problem, g, &constraints, opts) {
            Ok(opt) if opt.size == base.size => {
                chosen += 1;
            }
            Err(OfflineError::NodeCapExceeded { cap }) => {
                return Err(OfflineError::NodeCapExceeded { cap })
            }
            _ => {
                constraints.forced_in.remove(&v);
                constraints.forced_out.insert(v);
            }
        }
    }
    debug_assert_eq!(chosen, base.size);
    Ok(Optimum { size: base.size, witness: constraints.forced_in })
}

/// Exact optimum under constraints; the witness is deterministic but not
/// necessarily lexicographically minimal.
pub fn solve_constrained(
    problem: Problem,
    g: &LabeledGraph,
    constraints: &Constraints,
    opts: SolveOptions,
) -> Result<Optimum, OfflineError> {
    let mut solver = Solver::new(g, constraints, opts)?;
    let best = match problem {
        Problem::VertexCover => solver.solve_vc()?,
        Problem::IndependentSet => solver.solve_is()?,
        Problem::DominatingSet => solver.solve_ds()?,
    };
    best.ok_or(OfflineError::Infeasible)
}

/// All optimal witnesses (no kernel shortcuts, so the enumeration is
/// complete). Intended for small graphs; `max_count` guards the output size.
pub fn enumerate_optima(
    problem: Problem,
    g: &LabeledGraph,
    opts: SolveOptions,
    max_count: usize,
) -> Result<Vec<BTreeSet<VertexId>>, OfflineError> {
    let optimum = solve_constrained(problem, g, &Constraints::default(), opts)?;
    let mut solver = Solver::new(g, &Constraints::default(), opts)?;
    let mut result = Vec::new();
    solver.enumerate(problem, optimum.size, &mut result, max_count)?;
    Ok(result)
}

/// Per-vertex dependence report: the set of variables whose truth value the
/// vertex's membership in optimal solutions tracks.
#[derive(Debug, Clone)]
pub struct DependenceReport {
    pub dependent_on: Vec<BTreeSet<u32>>,
}

impl DependenceReport {
    pub fn is_dependent(&self, v: VertexId) -> bool {
        !self.dependent_on[v.index()].is_empty()
    }

    pub fn dependent_count(&self) -> usize {
        self.dependent_on.iter().filter(|s| !s.is_empty()).count()
    }
}

/// Classifies solution-dependent vertices by the symmetric-difference rule:
/// literal vertices depend on their own variable, and so does every vertex
/// forced by one polarity of a variable but not the other (computed over the
/// family of optimal solutions).
pub fn classify_dependence(r: &OfflineReduction) -> Result<DependenceReport, OfflineError> {
    let optima = enumerate_optima(r.problem, &r.graph, SolveOptions::default(), 1_000_000)?;
    let mut dependent_on: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); r.graph.len()];

    // Vertices needed whenever the given literal vertex is in the solution.
    let forced_with = |lit: Literal| -> BTreeSet<VertexId> {
        let anchor = r.literal_vertex(lit);
        let mut containing = optima.iter().filter(|w| w.contains(&anchor));
        let Some(first) = containing.next() else {
            return BTreeSet::new();
        };
        let mut intersection = first.clone();
        for witness in containing {
            intersection.retain(|v| witness.contains(v));
        }
        intersection
    };

    for var in r.source.variables() {
        let pos = Literal::positive(var);
        let neg = Literal::negative(var);
        dependent_on[r.literal_vertex(pos).index()].insert(var);
        dependent_on[r.literal_vertex(neg).index()].insert(var);
        let with_pos = forced_with(pos);
        let with_neg = forced_with(neg);
        for v in with_pos.symmetric_difference(&with_neg) {
            dependent_on[v.index()].insert(var);
        }
    }
    Ok(DependenceReport { dependent_on })
}

/// Reads the encoded assignment off a feasible witness and checks that it
/// satisfies the source formula: a variable is true exactly when its positive
/// literal vertex is selected.
pub fn decode_assignment(
    r: &OfflineReduction,
    witness: &BTreeSet<VertexId>,
) -> Result<Assignment, OfflineError> {
    if !game::feasible(r.problem, &r.graph, witness) {
        return Err(OfflineError::WitnessInfeasible);
    }
    let meets_budget =
        if r.problem.is_minimization() { witness.len() <= r.k } else { witness.len() >= r.k };
    if !meets_budget {
        return Err(OfflineError::WitnessInfeasible);
    }
    let mut assignment = Assignment::new();
    for var in r.source.variables() {
        let pos = witness.contains(&r.literal_vertex(Literal::positive(var)));
        let neg = witness.contains(&r.literal_vertex(Literal::negative(var)));
        if pos && neg {
            return Err(OfflineError::NoConsistentAssignment);
        }
        assignment.set(var, pos);
    }
    if !assignment.satisfies_all(&r.source) {
        return Err(OfflineError::NoConsistentAssignment);
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------------
// Branch and bound internals
// ---------------------------------------------------------------------------

/// Fixed-width bitset over vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn new(len: usize) -> Self {
        Bits { words: alloc::vec![0; len.div_ceil(64).max(1)] }
    }

    pub(crate) fn set(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub(crate) fn get(&self, idx: usize) -> bool {
        self.words[idx / 64] & (1 << (idx % 64)) != 0
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn intersection_count(&self, other: &Bits) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub(crate) fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub(crate) fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(word_idx, &word)| {
            let mut bits = word;
            core::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let bit = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(word_idx * 64 + bit)
                }
            })
        })
    }
}

struct Solver {
    n: usize,
    adj: Vec<Bits>,
    closed: Vec<Bits>,
    targets: Bits,
    init_in: Bits,
    init_out: Bits,
    node_cap: u64,
    nodes: u64,
}

#[derive(Clone)]
struct State {
    in_set: Bits,
    out_set: Bits,
}

impl State {
    fn free(&self, v: usize) -> bool {
        !self.in_set.get(v) && !self.out_set.get(v)
    }
}

impl Solver {
    fn new(
        g: &LabeledGraph,
        constraints: &Constraints,
        opts: SolveOptions,
    ) -> Result<Self, OfflineError> {
        let n = g.len();
        let mut adj = Vec::with_capacity(n);
        let mut closed = Vec::with_capacity(n);
        for v in g.vertices() {
            let mut row = Bits::new(n);
            for u in g.neighbors(v) {
                row.set(u.index());
            }
            let mut c = row.clone();
            c.set(v.index());
            adj.push(row);
            closed.push(c);
        }
        let mut targets = Bits::new(n);
        match &constraints.dominate_only {
            Some(set) => {
                for v in set {
                    if !g.contains(*v) {
                        return Err(GraphError::UnknownVertex(*v).into());
                    }
                    targets.set(v.index());
                }
            }
            None => {
                for v in 0..n {
                    targets.set(v);
                }
            }
        }
        let mut init_in = Bits::new(n);
        let mut init_out = Bits::new(n);
        for v in &constraints.forced_in {
            if !g.contains(*v) {
                return Err(GraphError::UnknownVertex(*v).into());
            }
            init_in.set(v.index());
        }
        for v in &constraints.forced_out {
            if !g.contains(*v) {
                return Err(GraphError::UnknownVertex(*v).into());
            }
            if init_in.get(v.index()) {
                return Err(OfflineError::Infeasible);
            }
            init_out.set(v.index());
        }
        Ok(Solver { n, adj, closed, targets, init_in, init_out, node_cap: opts.node_cap, nodes: 0 })
    }

    fn tick(&mut self) -> Result<(), OfflineError> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(OfflineError::NodeCapExceeded { cap: self.node_cap });
        }
        Ok(())
    }

    fn initial_state(&self) -> State {
        State { in_set: self.init_in.clone(), out_set: self.init_out.clone() }
    }

    fn witness(&self, state: &State) -> Optimum {
        let witness: BTreeSet<VertexId> =
            state.in_set.iter_ones().map(|v| VertexId(v as u32)).collect();
        Optimum { size: witness.len(), witness }
    }

    // --- vertex cover ---

    fn solve_vc(&mut self) -> Result<Option<Optimum>, OfflineError> {
        let mut best: Option<Optimum> = None;
        let state = self.initial_state();
        self.vc_rec(state, &mut best)?;
        Ok(best)
    }

    /// Neighbors of `v` along still-uncovered edges (an edge is uncovered
    /// while neither endpoint is in).
    fn vc_uncovered_neighbors(&self, state: &State, v: usize) -> Vec<usize> {
        if state.in_set.get(v) {
            return Vec::new();
        }
        self.adj[v].iter_ones().filter(|&u| !state.in_set.get(u)).collect()
    }

    fn vc_rec(&mut self, mut state: State, best: &mut Option<Optimum>) -> Result<(), OfflineError> {
        self.tick()?;

        // Propagation: an uncovered edge at an out-vertex forces the other
        // endpoint in; a degree-one vertex lets us take its neighbor; a
        // vertex with no uncovered edges can be discarded.
        loop {
            let mut changed = false;
            for v in 0..self.n {
                if state.out_set.get(v) {
                    for u in self.vc_uncovered_neighbors(&state, v) {
                        if state.out_set.get(u) {
                            return Ok(()); // both endpoints excluded: dead branch
                        }
                        if state.free(u) {
                            state.in_set.set(u);
                            changed = true;
                        }
                    }
                } else if state.free(v) {
                    let uncovered = self.vc_uncovered_neighbors(&state, v);
                    if uncovered.iter().any(|&u| state.out_set.get(u)) {
                        // An incident edge already lost its other endpoint.
                        state.in_set.set(v);
                        changed = true;
                    } else {
                        match uncovered.len() {
                            0 => {
                                state.out_set.set(v);
                                changed = true;
                            }
                            1 => {
                                state.in_set.set(uncovered[0]);
                                state.out_set.set(v);
                                changed = true;
                            }
                            _ => {}
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let size = state.in_set.count();
        if let Some(b) = best.as_ref() {
            // A greedy matching on uncovered edges lower-bounds the rest.
            if size + self.vc_matching_bound(&state) >= b.size {
                return Ok(());
            }
        }

        // Branch on the free vertex with the most uncovered edges.
        let branch_vertex = (0..self.n)
            .filter(|&v| state.free(v))
            .map(|v| (self.vc_uncovered_neighbors(&state, v).len(), v))
            .filter(|&(d, _)| d > 0)
            .max_by_key(|&(d, v)| (d, core::cmp::Reverse(v)));

        let Some((_, v)) = branch_vertex else {
            // All edges covered.
            let candidate = self.witness(&state);
            if best.as_ref().is_none_or(|b| candidate.size < b.size) {
                *best = Some(candidate);
            }
            return Ok(());
        };

        let mut take = state.clone();
        take.in_set.set(v);
        self.vc_rec(take, best)?;
        let mut skip = state;
        skip.out_set.set(v);
        self.vc_rec(skip, best)
    }

    fn vc_matching_bound(&self, state: &State) -> usize {
        let mut used = Bits::new(self.n);
        let mut bound = 0;
        for v in 0..self.n {
            if state.in_set.get(v) || used.get(v) {
                continue;
            }
            for u in self.adj[v].iter_ones() {
                if u > v && !state.in_set.get(u) && !used.get(u) {
                    used.set(v);
                    used.set(u);
                    bound += 1;
                    break;
                }
            }
        }
        bound
    }

    // --- independent set ---

    fn solve_is(&mut self) -> Result<Option<Optimum>, OfflineError> {
        let mut best: Option<Optimum> = None;
        let state = self.initial_state();
        self.is_rec(state, &mut best)?;
        Ok(best)
    }

    fn is_rec(&mut self, mut state: State, best: &mut Option<Optimum>) -> Result<(), OfflineError> {
        self.tick()?;

        loop {
            let mut changed = false;
            for v in 0..self.n {
                if state.in_set.get(v) {
                    for u in self.adj[v].iter_ones() {
                        if state.in_set.get(u) {
                            return Ok(()); // adjacent pair forced in: dead branch
                        }
                        if state.free(u) {
                            state.out_set.set(u);
                            changed = true;
                        }
                    }
                } else if state.free(v) {
                    if self.adj[v].intersects(&state.in_set) {
                        state.out_set.set(v);
                        changed = true;
                        continue;
                    }
                    let free_neighbors: Vec<usize> =
                        self.adj[v].iter_ones().filter(|&u| state.free(u)).collect();
                    if free_neighbors.is_empty() {
                        state.in_set.set(v);
                        changed = true;
                    } else if free_neighbors.len() == 1 {
                        // A pendant can always be chosen over its neighbor
                        // without losing optimality.
                        state.in_set.set(v);
                        state.out_set.set(free_neighbors[0]);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let size = state.in_set.count();
        let free_count = (0..self.n).filter(|&v| state.free(v)).count();
        if let Some(b) = best.as_ref() {
            if size + free_count <= b.size {
                return Ok(());
            }
        }
        if free_count == 0 {
            let candidate = self.witness(&state);
            if best.as_ref().is_none_or(|b| candidate.size > b.size) {
                *best = Some(candidate);
            }
            return Ok(());
        }

        let v = (0..self.n)
            .filter(|&v| state.free(v))
            .max_by_key(|&v| {
                let free_deg = self.adj[v].iter_ones().filter(|&u| state.free(u)).count();
                (free_deg, core::cmp::Reverse(v))
            })
            .expect("free vertex exists");
        let mut take = state.clone();
        take.in_set.set(v);
        self.is_rec(take, best)?;
        let mut skip = state;
        skip.out_set.set(v);
        self.is_rec(skip, best)
    }

    // --- dominating set ---

    fn solve_ds(&mut self) -> Result<Option<Optimum>, OfflineError> {
        let mut best: Option<Optimum> = None;
        let state = self.initial_state();
        self.ds_rec(state, &mut best)?;
        Ok(best)
    }

    fn ds_undominated(&self, state: &State) -> Vec<usize> {
        let mut dominated = Bits::new(self.n);
        for v in state.in_set.iter_ones() {
            dominated.or_assign(&self.closed[v]);
        }
        self.targets.iter_ones().filter(|&v| !dominated.get(v)).collect()
    }

    fn ds_rec(&mut self, mut state: State, best: &mut Option<Optimum>) -> Result<(), OfflineError> {
        self.tick()?;

        // Unit propagation: a target with a single remaining candidate
        // dominator forces that candidate.
        let mut undominated;
        loop {
            undominated = self.ds_undominated(&state);
            let mut changed = false;
            for &u in &undominated {
                let mut candidates =
                    self.closed[u].iter_ones().filter(|&w| state.free(w));
                match (candidates.next(), candidates.next()) {
                    (None, _) => return Ok(()), // cannot dominate u anymore
                    (Some(only), None) => {
                        state.in_set.set(only);
                        changed = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }

        if undominated.is_empty() {
            let candidate = self.witness(&state);
            if best.as_ref().is_none_or(|b| candidate.size < b.size) {
                *best = Some(candidate);
            }
            return Ok(());
        }

        let size = state.in_set.count();
        if let Some(b) = best.as_ref() {
            let mut undominated_bits = Bits::new(self.n);
            for &u in &undominated {
                undominated_bits.set(u);
            }
            let max_cover = (0..self.n)
                .filter(|&w| state.free(w))
                .map(|w| self.closed[w].intersection_count(&undominated_bits))
                .max()
                .unwrap_or(0);
            if max_cover == 0 || size + undominated.len().div_ceil(max_cover) >= b.size {
                return Ok(());
            }
        }

        // Branch on the undominated target with the fewest candidates; the
        // i-th branch takes candidate i and discards all earlier ones.
        let (_, u) = undominated
            .iter()
            .map(|&u| (self.closed[u].iter_ones().filter(|&w| state.free(w)).count(), u))
            .min()
            .expect("undominated nonempty");
        let candidates: Vec<usize> =
            self.closed[u].iter_ones().filter(|&w| state.free(w)).collect();
        for (idx, &w) in candidates.iter().enumerate() {
            let mut next = state.clone();
            next.in_set.set(w);
            for &earlier in &candidates[..idx] {
                next.out_set.set(earlier);
            }
            self.ds_rec(next, best)?;
        }
        Ok(())
    }

    // --- exhaustive enumeration of optima ---

    fn enumerate(
        &mut self,
        problem: Problem,
        target: usize,
        result: &mut Vec<BTreeSet<VertexId>>,
        max_count: usize,
    ) -> Result<(), OfflineError> {
        let state = self.initial_state();
        self.enum_rec(problem, target, state, 0, result, max_count)
    }

    fn enum_rec(
        &mut self,
        problem: Problem,
        target: usize,
        mut state: State,
        next: usize,
        result: &mut Vec<BTreeSet<VertexId>>,
        max_count: usize,
    ) -> Result<(), OfflineError> {
        self.tick()?;
        if result.len() >= max_count {
            return Ok(());
        }
        let size = state.in_set.count();
        if problem.is_minimization() {
            if size > target {
                return Ok(());
            }
        } else {
            let free_remaining = (next..self.n).filter(|&v| state.free(v)).count();
            if size + free_remaining < target {
                return Ok(());
            }
        }
        if next == self.n {
            if size == target && self.enum_feasible(problem, &state) {
                result.push(self.witness(&state).witness);
            }
            return Ok(());
        }
        if !state.free(next) {
            return self.enum_rec(problem, target, state, next + 1, result, max_count);
        }
        let mut take = state.clone();
        take.in_set.set(next);
        self.enum_rec(problem, target, take, next + 1, result, max_count)?;
        state.out_set.set(next);
        self.enum_rec(problem, target, state, next + 1, result, max_count)
    }

    fn enum_feasible(&self, problem: Problem, state: &State) -> bool {
        match problem {
            Problem::VertexCover => {
                (0..self.n).all(|v| self.vc_uncovered_neighbors(state, v).is_empty())
            }
            Problem::IndependentSet => {
                state.in_set.iter_ones().all(|v| !self.adj[v].intersects(&state.in_set))
            }
            Problem::DominatingSet => self.ds_undominated(state).is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize, parse_qbf};

    fn running_vc() -> OfflineReduction {
        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        reduce_3sat(Problem::VertexCover, &q).unwrap()
    }

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
    fn vc_of_k3_is_two() {
        let k3 = plain(3, &[(0, 1), (1, 2), (2, 0)]);
        let opt = solve_offline_exact(Problem::VertexCover, &k3, SolveOptions::default()).unwrap();
        assert_eq!(opt.size, 2);
        // Lexicographically smallest cover of the triangle.
        assert_eq!(opt.witness, [VertexId(0), VertexId(1)].into_iter().collect());
    }

    #[test]
    fn ds_of_small_star_is_center() {
        // Star with center 0 and two leaves: the dominating set fake clause
        // shape at n = 2.
        let star = plain(3, &[(0, 1), (0, 2)]);
        let opt =
            solve_offline_exact(Problem::DominatingSet, &star, SolveOptions::default()).unwrap();
        assert_eq!(opt.size, 1);
        assert_eq!(opt.witness, [VertexId(0)].into_iter().collect());
    }

    #[test]
    fn vc_of_isolated_fake_clause_gadget_is_the_triangle() {
        // Triangle 0-1-2, two pendants on each triangle vertex.
        let g = plain(
            9,
            &[(0, 1), (1, 2), (2, 0), (0, 3), (0, 4), (1, 5), (1, 6), (2, 7), (2, 8)],
        );
        let opt = solve_offline_exact(Problem::VertexCover, &g, SolveOptions::default()).unwrap();
        assert_eq!(opt.size, 3);
        assert_eq!(opt.witness, [VertexId(0), VertexId(1), VertexId(2)].into_iter().collect());
        // The independent set optimum on the same gadget is the six pendants.
        let is_opt =
            solve_offline_exact(Problem::IndependentSet, &g, SolveOptions::default()).unwrap();
        assert_eq!(is_opt.size, 6);
        assert_eq!(is_opt.witness, (3..9).map(VertexId).collect());
    }

    #[test]
    fn base_reduction_shapes() {
        let r = running_vc();
        assert_eq!(r.graph.len(), 7);
        assert_eq!(r.graph.edge_count(), 8);
        assert_eq!(r.k, 4);

        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        let is = reduce_3sat(Problem::IndependentSet, &q).unwrap();
        assert_eq!(is.graph.len(), 7);
        assert_eq!(is.k, 3);

        // The two-clause walkthrough formula for dominating set.
        let q = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap();
        let ds = reduce_3sat(Problem::DominatingSet, &q).unwrap();
        assert_eq!(ds.graph.len(), 8);
        assert_eq!(ds.k, 2);
    }

    #[test]
    fn reduce_rejects_non_normalized() {
        let q = parse_qbf("p cnf 1 1\ne 1 0\n1 1 1 0\n").unwrap();
        assert!(matches!(reduce_3sat(Problem::VertexCover, &q), Err(OfflineError::NotNormalized)));
    }

    #[test]
    fn optimum_matches_budget_exactly_on_satisfiable_instances() {
        let r = running_vc();
        let opt =
            solve_offline_exact(Problem::VertexCover, &r.graph, SolveOptions::default()).unwrap();
        assert_eq!(opt.size, r.k);

        let q = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap();
        for problem in Problem::ALL {
            let r = reduce_3sat(problem, &q).unwrap();
            let opt = solve_offline_exact(problem, &r.graph, SolveOptions::default()).unwrap();
            assert_eq!(opt.size, r.k, "{problem}");
        }
    }

    #[test]
    fn all_vc_vertices_are_dependent() {
        let r = running_vc();
        let report = classify_dependence(&r).unwrap();
        assert_eq!(report.dependent_count(), 7);
    }

    #[test]
    fn ds_dependence_is_exactly_the_literal_vertices() {
        let q = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap();
        let r = reduce_3sat(Problem::DominatingSet, &q).unwrap();
        let report = classify_dependence(&r).unwrap();
        assert_eq!(report.dependent_count(), 4);
        for var in 1..=2 {
            for lit in [Literal::positive(var), Literal::negative(var)] {
                assert!(report.is_dependent(r.literal_vertex(lit)));
            }
        }
    }

    #[test]
    fn optimal_witnesses_decode_to_satisfying_assignments() {
        let r = running_vc();
        let optima =
            enumerate_optima(Problem::VertexCover, &r.graph, SolveOptions::default(), 1000)
                .unwrap();
        // One cover per (assignment, uncovered true member) combination.
        assert_eq!(optima.len(), 6);
        for witness in &optima {
            let assignment = decode_assignment(&r, witness).unwrap();
            assert!(assignment.satisfies_all(&r.source));
        }
    }

    #[test]
    fn infeasible_witness_is_rejected() {
        let r = running_vc();
        let empty = BTreeSet::new();
        assert!(matches!(decode_assignment(&r, &empty), Err(OfflineError::WitnessInfeasible)));
    }

    #[test]
    fn forced_constraints_are_respected() {
        let k3 = plain(3, &[(0, 1), (1, 2), (2, 0)]);
        let constraints = Constraints {
            forced_out: [VertexId(0)].into_iter().collect(),
            ..Constraints::default()
        };
        let opt =
            solve_constrained(Problem::VertexCover, &k3, &constraints, SolveOptions::default())
                .unwrap();
        assert_eq!(opt.size, 2);
        assert_eq!(opt.witness, [VertexId(1), VertexId(2)].into_iter().collect());
    }

    #[test]
    fn node_cap_is_reported() {
        let q =
            normalize(&parse_qbf("p cnf 3 2\na 1 0\ne 2 0\na 3 0\n1 2 3 0\n-1 -2 -3 0\n").unwrap());
        let r = reduce_3sat(Problem::VertexCover, &q).unwrap();
        let opts = SolveOptions { node_cap: 2 };
        assert!(matches!(
            solve_constrained(Problem::VertexCover, &r.graph, &Constraints::default(), opts),
            Err(OfflineError::NodeCapExceeded { cap: 2 })
        ));
    }
}
