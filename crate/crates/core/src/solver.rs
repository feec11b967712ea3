//! Exact value of the online vertex subset game on small graphs.
//!
//! The algorithm only sees the observation class of the history: the revealed
//! vertices in order with their decisions and mutual adjacencies, plus the
//! anonymous exposed neighbors (each characterized by its adjacency pattern
//! into the revealed sequence). The game value is computed by AND-OR
//! recursion over these classes: the algorithm picks a decision per class,
//! the adversary picks among all successor classes reachable from *any*
//! concrete history in the class — the fully informed adversary can steer
//! into every consistent concretization, so this quotient game has the same
//! value as the concrete game quantified over reveal orders.
//!
//! [`enumerate_policies_bruteforce`] is the independent oracle: it searches
//! the space of deterministic decision functions directly, checking each
//! candidate against every reveal order, with no memoization and no
//! embedding machinery.

use crate::formula::{evaluate_tqbf, QbfInstance};
use crate::gadgets::{build_online_instance, GadgetError};
use crate::game::{feasible, Decision, Outcome};
use crate::graph::{LabeledGraph, VertexId};
use crate::offline::Problem;
use crate::strategies::{
    adversary_paper_policy, algorithm_paper_policy, play_match, StrategyError,
};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

/// Canonical code of an observation class. Revealed vertices are ordered by
/// reveal time; exposed vertices are anonymous and enter as the sorted
/// multiset of their adjacency patterns into the revealed sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservationClass {
    /// Row `i` holds the adjacency bits of the `i`-th revealed vertex
    /// against the vertices revealed before it.
    rows: Vec<u16>,
    /// Decisions taken so far; one shorter than `rows` while a decision is
    /// pending.
    decisions: Vec<bool>,
    /// Sorted adjacency patterns (over the revealed sequence) of the exposed
    /// but unrevealed vertices.
    exposed: Vec<u16>,
}

impl ObservationClass {
    pub fn revealed_count(&self) -> usize {
        self.rows.len()
    }

    pub fn decision_pending(&self) -> bool {
        self.decisions.len() + 1 == self.rows.len()
    }
}

/// A concrete history: the reveal order so far plus the decisions.
#[derive(Debug, Clone)]
struct History {
    order: Vec<VertexId>,
    decisions: Vec<bool>,
}

impl History {
    fn observe(&self, g: &LabeledGraph) -> ObservationClass {
        let mut rows = Vec::with_capacity(self.order.len());
        for (idx, &v) in self.order.iter().enumerate() {
            let mut row = 0u16;
            for (j, &w) in self.order[..idx].iter().enumerate() {
                if g.has_edge(v, w) {
                    row |= 1 << j;
                }
            }
            rows.push(row);
        }
        let revealed: BTreeSet<VertexId> = self.order.iter().copied().collect();
        let mut exposed = Vec::new();
        for u in g.vertices() {
            if revealed.contains(&u) {
                continue;
            }
            let mut pattern = 0u16;
            for (j, &w) in self.order.iter().enumerate() {
                if g.has_edge(u, w) {
                    pattern |= 1 << j;
                }
            }
            if pattern != 0 {
                exposed.push(pattern);
            }
        }
        exposed.sort_unstable();
        ObservationClass { rows, decisions: self.decisions.clone(), exposed }
    }

    fn solution(&self) -> BTreeSet<VertexId> {
        self.order
            .iter()
            .zip(&self.decisions)
            .filter(|(_, &d)| d)
            .map(|(&v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    VertexCapExceeded { vertices: usize, cap: usize },
    /// The work budget (embedding extensions) ran out.
    BudgetExceeded,
    Gadget(GadgetError),
    Strategy(StrategyError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::VertexCapExceeded { vertices, cap } => {
                write!(f, "graph has {vertices} vertices, solver cap is {cap}")
            }
            SolverError::BudgetExceeded => write!(f, "solver work budget exceeded"),
            SolverError::Gadget(e) => write!(f, "{e}"),
            SolverError::Strategy(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<GadgetError> for SolverError {
    fn from(e: GadgetError) -> Self {
        SolverError::Gadget(e)
    }
}

impl From<StrategyError> for SolverError {
    fn from(e: StrategyError) -> Self {
        SolverError::Strategy(e)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Refuse graphs above this size.
    pub vertex_cap: usize,
    /// Work budget, counted in embedding extension steps.
    pub work_budget: u64,
    /// Memo entries kept before the oldest are dropped.
    pub memo_cap: usize,
    /// Cut branches that are already lost. Outcome-equivalent; switchable
    /// for the equivalence tests.
    pub early_loss_pruning: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            vertex_cap: 12,
            work_budget: 200_000_000,
            memo_cap: 1_000_000,
            early_loss_pruning: true,
        }
    }
}

/// A winning certificate: a decision per reachable pending class for the
/// algorithm, or a losing successor class per adversary-to-move class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Policy(BTreeMap<ObservationClass, Decision>),
    RevealPlan(BTreeMap<ObservationClass, ObservationClass>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameValue {
    pub winner: Outcome,
    pub certificate: Certificate,
}

/// Exact value of the online vertex subset game on `g` with budget `k`.
pub fn solve_game_exact(
    g: &LabeledGraph,
    problem: Problem,
    k: usize,
    opts: SolverOptions,
) -> Result<GameValue, SolverError> {
    if g.len() > opts.vertex_cap {
        return Err(SolverError::VertexCapExceeded { vertices: g.len(), cap: opts.vertex_cap });
    }
    let mut solver = ExactSolver {
        g,
        problem,
        k,
        opts,
        memo: BTreeMap::new(),
        stamp: 0,
        work: 0,
        policy: BTreeMap::new(),
        plan: BTreeMap::new(),
    };
    let root = History { order: Vec::new(), decisions: Vec::new() };
    let winner = solver.adversary_to_move(&root)?;
    let certificate = match winner {
        Outcome::AlgorithmWins => Certificate::Policy(solver.policy),
        Outcome::AdversaryWins => Certificate::RevealPlan(solver.plan),
    };
    Ok(GameValue { winner, certificate })
}

struct ExactSolver<'g> {
    g: &'g LabeledGraph,
    problem: Problem,
    k: usize,
    opts: SolverOptions,
    memo: BTreeMap<ObservationClass, (Outcome, u64)>,
    stamp: u64,
    work: u64,
    policy: BTreeMap<ObservationClass, Decision>,
    plan: BTreeMap<ObservationClass, ObservationClass>,
}

impl<'g> ExactSolver<'g> {
    fn spend(&mut self, units: u64) -> Result<(), SolverError> {
        self.work += units;
        if self.work > self.opts.work_budget {
            return Err(SolverError::BudgetExceeded);
        }
        Ok(())
    }

    fn memo_insert(&mut self, key: ObservationClass, value: Outcome) {
        if self.memo.len() >= self.opts.memo_cap {
            // Drop the least recently used tenth and fall back to
            // recomputation for them.
            let mut stamps: Vec<u64> = self.memo.values().map(|&(_, s)| s).collect();
            stamps.sort_unstable();
            let cutoff = stamps[stamps.len() / 10];
            self.memo.retain(|_, &mut (_, s)| s > cutoff);
        }
        self.stamp += 1;
        let stamp = self.stamp;
        self.memo.insert(key, (value, stamp));
    }

    fn memo_get(&mut self, key: &ObservationClass) -> Option<Outcome> {
        self.stamp += 1;
        let stamp = self.stamp;
        self.memo.get_mut(key).map(|entry| {
            entry.1 = stamp;
            entry.0
        })
    }

    /// True when no continuation can rescue the algorithm.
    fn lost_already(&self, h: &History) -> bool {
        let decided: BTreeMap<VertexId, bool> =
            h.order.iter().copied().zip(h.decisions.iter().copied()).collect();
        let accepted = h.decisions.iter().filter(|&&d| d).count();
        match self.problem {
            Problem::VertexCover | Problem::DominatingSet => {
                if accepted > self.k {
                    return true;
                }
                match self.problem {
                    Problem::VertexCover => self.g.edges().any(|(u, v)| {
                        decided.get(&u) == Some(&false) && decided.get(&v) == Some(&false)
                    }),
                    _ => self.g.vertices().any(|v| {
                        decided.get(&v) == Some(&false)
                            && self.g.neighbors(v).all(|u| decided.get(&u) == Some(&false))
                    }),
                }
            }
            Problem::IndependentSet => {
                let undecided = self.g.len() - h.decisions.len();
                accepted + undecided < self.k
                    || self.g.edges().any(|(u, v)| {
                        decided.get(&u) == Some(&true) && decided.get(&v) == Some(&true)
                    })
            }
        }
    }

    fn terminal_outcome(&self, h: &History) -> Outcome {
        let solution = h.solution();
        let size_ok = if self.problem.is_minimization() {
            solution.len() <= self.k
        } else {
            solution.len() >= self.k
        };
        if size_ok && feasible(self.problem, self.g, &solution) {
            Outcome::AlgorithmWins
        } else {
            Outcome::AdversaryWins
        }
    }

    fn adversary_to_move(&mut self, h: &History) -> Result<Outcome, SolverError> {
        let key = h.observe(self.g);
        if let Some(value) = self.memo_get(&key) {
            return Ok(value);
        }
        let value = if h.order.len() == self.g.len() {
            self.terminal_outcome(h)
        } else if self.opts.early_loss_pruning && self.lost_already(h) {
            Outcome::AdversaryWins
        } else {
            // The adversary branches over every successor class reachable
            // from any concretization of the current class.
            let successors = self.successor_classes(&key, h)?;
            let mut value = Outcome::AlgorithmWins;
            for (succ_key, representative) in successors {
                let child = self.algorithm_to_move(&representative)?;
                if child == Outcome::AdversaryWins {
                    self.plan.insert(key.clone(), succ_key);
                    value = Outcome::AdversaryWins;
                    break;
                }
            }
            value
        };
        self.memo_insert(key, value);
        Ok(value)
    }

    fn algorithm_to_move(&mut self, h: &History) -> Result<Outcome, SolverError> {
        let key = h.observe(self.g);
        if let Some(value) = self.memo_get(&key) {
            return Ok(value);
        }
        let mut value = Outcome::AdversaryWins;
        for decision in [Decision::In, Decision::Out] {
            let mut next = h.clone();
            next.decisions.push(decision.accepted());
            if self.adversary_to_move(&next)? == Outcome::AlgorithmWins {
                self.policy.insert(key.clone(), decision);
                value = Outcome::AlgorithmWins;
                break;
            }
        }
        self.memo_insert(key, value);
        Ok(value)
    }

    /// All distinct successor classes with one concrete representative each:
    /// extend every embedding of the current class by every unrevealed
    /// vertex.
    fn successor_classes(
        &mut self,
        key: &ObservationClass,
        h: &History,
    ) -> Result<Vec<(ObservationClass, History)>, SolverError> {
        let mut result: BTreeMap<ObservationClass, History> = BTreeMap::new();
        let mut embedding: Vec<VertexId> = Vec::with_capacity(key.rows.len());
        let mut used = alloc::vec![false; self.g.len()];
        self.extend_embeddings(key, h, &mut embedding, &mut used, &mut result)?;
        Ok(result.into_iter().collect())
    }

    fn extend_embeddings(
        &mut self,
        key: &ObservationClass,
        h: &History,
        embedding: &mut Vec<VertexId>,
        used: &mut [bool],
        result: &mut BTreeMap<ObservationClass, History>,
    ) -> Result<(), SolverError> {
        self.spend(1)?;
        let depth = embedding.len();
        if depth == key.rows.len() {
            // Full embedding: verify the exposed pattern multiset matches.
            let candidate = History { order: embedding.clone(), decisions: h.decisions.clone() };
            if candidate.observe(self.g) != *key {
                return Ok(());
            }
            for v in self.g.vertices() {
                if used[v.index()] {
                    continue;
                }
                let mut next = candidate.clone();
                next.order.push(v);
                let succ_key = next.observe(self.g);
                result.entry(succ_key).or_insert(next);
            }
            return Ok(());
        }
        for v in self.g.vertices() {
            if used[v.index()] {
                continue;
            }
            let mut row = 0u16;
            for (j, &w) in embedding.iter().enumerate() {
                if self.g.has_edge(v, w) {
                    row |= 1 << j;
                }
            }
            if row != key.rows[depth] {
                continue;
            }
            if self.g.degree(v).expect("in range") != degree_in_key(key, depth) {
                continue;
            }
            used[v.index()] = true;
            embedding.push(v);
            self.extend_embeddings(key, h, embedding, used, result)?;
            embedding.pop();
            used[v.index()] = false;
        }
        Ok(())
    }
}

/// Degree of the `i`-th revealed vertex as recorded by the observation: its
/// row bits, the later rows that point back at it, and its exposed edges.
fn degree_in_key(key: &ObservationClass, idx: usize) -> usize {
    let mut degree = key.rows[idx].count_ones() as usize;
    for later in idx + 1..key.rows.len() {
        if key.rows[later] & (1 << idx) != 0 {
            degree += 1;
        }
    }
    for &pattern in &key.exposed {
        if pattern & (1 << idx) != 0 {
            degree += 1;
        }
    }
    degree
}

/// Brute-force oracle: enumerates deterministic decision functions on
/// reachable observation classes, lazily, and checks each candidate against
/// every reveal order. Only for graphs with at most [`BRUTEFORCE_CAP`]
/// vertices.
pub const BRUTEFORCE_CAP: usize = 7;

pub fn enumerate_policies_bruteforce(
    g: &LabeledGraph,
    problem: Problem,
    k: usize,
) -> Result<GameValue, SolverError> {
    if g.len() > BRUTEFORCE_CAP {
        return Err(SolverError::VertexCapExceeded { vertices: g.len(), cap: BRUTEFORCE_CAP });
    }
    let vertices: Vec<VertexId> = g.vertices().collect();
    let mut orders = Vec::new();
    permutations(&vertices, &mut Vec::new(), &mut orders);
    let mut policy: BTreeMap<ObservationClass, bool> = BTreeMap::new();
    let winner = if try_policy(g, problem, k, &orders, 0, &mut policy) {
        Outcome::AlgorithmWins
    } else {
        Outcome::AdversaryWins
    };
    let certificate = match winner {
        Outcome::AlgorithmWins => Certificate::Policy(
            policy
                .into_iter()
                .map(|(key, d)| (key, if d { Decision::In } else { Decision::Out }))
                .collect(),
        ),
        // The refutation of the last candidate policy is not a compact
        // adversary strategy; the bruteforce reports the value only.
        Outcome::AdversaryWins => Certificate::RevealPlan(BTreeMap::new()),
    };
    Ok(GameValue { winner, certificate })
}

fn permutations(
    vertices: &[VertexId],
    current: &mut Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    if current.len() == vertices.len() {
        out.push(current.clone());
        return;
    }
    for &v in vertices {
        if !current.contains(&v) {
            current.push(v);
            permutations(vertices, current, out);
            current.pop();
        }
    }
}

/// Tries to complete `policy` so that every order from index `start` on is
/// won. Orders before `start` already pass and never consult bindings added
/// later (they completed without hitting them).
fn try_policy(
    g: &LabeledGraph,
    problem: Problem,
    k: usize,
    orders: &[Vec<VertexId>],
    start: usize,
    policy: &mut BTreeMap<ObservationClass, bool>,
) -> bool {
    for (idx, order) in orders.iter().enumerate().skip(start) {
        let mut h = History { order: Vec::new(), decisions: Vec::new() };
        loop {
            if h.order.len() == order.len() {
                break;
            }
            h.order.push(order[h.order.len()]);
            let key = h.observe(g);
            match policy.get(&key) {
                Some(&d) => h.decisions.push(d),
                None => {
                    for d in [true, false] {
                        policy.insert(key.clone(), d);
                        if try_policy(g, problem, k, orders, idx, policy) {
                            return true;
                        }
                        policy.remove(&key);
                    }
                    return false;
                }
            }
        }
        let solution = h.solution();
        let size_ok =
            if problem.is_minimization() { solution.len() <= k } else { solution.len() >= k };
        if !(size_ok && feasible(problem, g, &solution)) {
            return false;
        }
    }
    true
}

/// Verifies that a certificate actually wins for its claimed side, by
/// walking the class graph: a policy must win every adversary branch, a
/// reveal plan must beat both decisions at every pending class.
pub fn verify_certificate(
    g: &LabeledGraph,
    problem: Problem,
    k: usize,
    value: &GameValue,
    opts: SolverOptions,
) -> Result<bool, SolverError> {
    let mut solver = ExactSolver {
        g,
        problem,
        k,
        opts,
        memo: BTreeMap::new(),
        stamp: 0,
        work: 0,
        policy: BTreeMap::new(),
        plan: BTreeMap::new(),
    };
    let root = History { order: Vec::new(), decisions: Vec::new() };
    match &value.certificate {
        Certificate::Policy(policy) => walk_policy(&mut solver, policy, &root),
        Certificate::RevealPlan(plan) => walk_plan(&mut solver, plan, &root),
    }
}

fn walk_policy(
    solver: &mut ExactSolver,
    policy: &BTreeMap<ObservationClass, Decision>,
    h: &History,
) -> Result<bool, SolverError> {
    if h.order.len() == solver.g.len() {
        return Ok(solver.terminal_outcome(h) == Outcome::AlgorithmWins);
    }
    let key = h.observe(solver.g);
    for (_, representative) in solver.successor_classes(&key, h)? {
        let pending_key = representative.observe(solver.g);
        let Some(&decision) = policy.get(&pending_key) else {
            return Ok(false);
        };
        let mut next = representative.clone();
        next.decisions.push(decision.accepted());
        if !walk_policy(solver, policy, &next)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn walk_plan(
    solver: &mut ExactSolver,
    plan: &BTreeMap<ObservationClass, ObservationClass>,
    h: &History,
) -> Result<bool, SolverError> {
    if h.order.len() == solver.g.len() {
        return Ok(solver.terminal_outcome(h) == Outcome::AdversaryWins);
    }
    if solver.lost_already(h) {
        // Any continuation wins for the adversary; the plan ends here.
        return Ok(true);
    }
    let key = h.observe(solver.g);
    let Some(target) = plan.get(&key) else {
        return Ok(false);
    };
    let successors = solver.successor_classes(&key, h)?;
    let Some((_, representative)) = successors.into_iter().find(|(succ, _)| succ == target) else {
        return Ok(false);
    };
    for decision in [true, false] {
        let mut next = representative.clone();
        next.decisions.push(decision);
        if !walk_plan(solver, plan, &next)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest winning budget for the minimization games (largest for
/// independent set), by bisection over the monotone winning region.
pub fn minimal_winning_budget(
    g: &LabeledGraph,
    problem: Problem,
    opts: SolverOptions,
) -> Result<Option<usize>, SolverError> {
    let wins = |k: usize| -> Result<bool, SolverError> {
        Ok(solve_game_exact(g, problem, k, opts)?.winner == Outcome::AlgorithmWins)
    };
    let n = g.len();
    if problem.is_minimization() {
        if !wins(n)? {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if wins(mid)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(Some(lo))
    } else {
        if !wins(0)? {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if wins(mid)? {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(Some(lo))
    }
}

/// Evidence tier of a consistency verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceTier {
    /// The built graph was small enough for the exact game solver.
    Exact,
    /// Strategy play: table algorithm versus the simulating adversary.
    StrategyPlay,
}

#[derive(Debug, Clone)]
pub struct ReductionVerdict {
    pub tier: EvidenceTier,
    pub formula_value: bool,
    pub game_winner: Outcome,
    pub consistent: bool,
}

/// Checks that the game value of the built reduction matches the formula
/// game value: exactly (for tiny instances) or by strategy play.
pub fn value_of_reduction(
    q: &QbfInstance,
    problem: Problem,
    opts: SolverOptions,
) -> Result<ReductionVerdict, SolverError> {
    let inst = build_online_instance(q, problem)?;
    let formula_value = evaluate_tqbf(q).map_err(StrategyError::Formula)?;
    let (tier, game_winner) = if inst.graph.len() <= opts.vertex_cap {
        let value = solve_game_exact(&inst.graph, problem, inst.budget, opts)?;
        (EvidenceTier::Exact, value.winner)
    } else {
        let mut adversary = adversary_paper_policy(&inst);
        let transcript = play_match(&inst, algorithm_paper_policy(&inst), &mut adversary)?;
        (EvidenceTier::StrategyPlay, transcript.outcome)
    };
    let consistent = formula_value == (game_winner == Outcome::AlgorithmWins);
    Ok(ReductionVerdict { tier, formula_value, game_winner, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_qbf;
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

    fn solve(g: &LabeledGraph, p: Problem, k: usize) -> Outcome {
        solve_game_exact(g, p, k, SolverOptions::default()).unwrap().winner
    }

    #[test]
    fn k2_vertex_cover_values() {
        let k2 = plain(2, &[(0, 1)]);
        assert_eq!(solve(&k2, Problem::VertexCover, 1), Outcome::AlgorithmWins);
        assert_eq!(solve(&k2, Problem::VertexCover, 0), Outcome::AdversaryWins);
    }

    #[test]
    fn p3_vertex_cover_with_budget_one() {
        // Degrees distinguish the center: reject degree 1, accept degree 2.
        let p3 = plain(3, &[(0, 1), (1, 2)]);
        assert_eq!(solve(&p3, Problem::VertexCover, 1), Outcome::AlgorithmWins);
        let oracle = enumerate_policies_bruteforce(&p3, Problem::VertexCover, 1).unwrap();
        assert_eq!(oracle.winner, Outcome::AlgorithmWins);
    }

    #[test]
    fn small_star_dominating_set() {
        let star = plain(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(solve(&star, Problem::DominatingSet, 1), Outcome::AlgorithmWins);
        let oracle = enumerate_policies_bruteforce(&star, Problem::DominatingSet, 1).unwrap();
        assert_eq!(oracle.winner, Outcome::AlgorithmWins);
    }

    #[test]
    fn c4_matches_the_bruteforce_oracle() {
        let c4 = plain(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        for k in 0..=4 {
            for problem in Problem::ALL {
                let exact = solve(&c4, problem, k);
                let oracle = enumerate_policies_bruteforce(&c4, problem, k).unwrap().winner;
                assert_eq!(exact, oracle, "{problem} k={k}");
            }
        }
    }

    #[test]
    fn accept_everything_wins_at_full_budget() {
        let g = plain(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]);
        assert_eq!(solve(&g, Problem::VertexCover, 5), Outcome::AlgorithmWins);
    }

    #[test]
    fn pruning_does_not_change_values() {
        let g = plain(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]);
        for problem in Problem::ALL {
            for k in 0..=5 {
                let with = SolverOptions { early_loss_pruning: true, ..Default::default() };
                let without = SolverOptions { early_loss_pruning: false, ..Default::default() };
                assert_eq!(
                    solve_game_exact(&g, problem, k, with).unwrap().winner,
                    solve_game_exact(&g, problem, k, without).unwrap().winner,
                    "{problem} k={k}"
                );
            }
        }
    }

    #[test]
    fn certificates_verify() {
        let p4 = plain(4, &[(0, 1), (1, 2), (2, 3)]);
        for k in 0..=3 {
            let value = solve_game_exact(&p4, Problem::VertexCover, k, SolverOptions::default())
                .unwrap();
            assert!(
                verify_certificate(&p4, Problem::VertexCover, k, &value, SolverOptions::default())
                    .unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let g = plain(13, &[]);
        assert!(matches!(
            solve_game_exact(&g, Problem::VertexCover, 1, SolverOptions::default()),
            Err(SolverError::VertexCapExceeded { vertices: 13, cap: 12 })
        ));
        let g8 = plain(8, &[]);
        assert!(matches!(
            enumerate_policies_bruteforce(&g8, Problem::VertexCover, 1),
            Err(SolverError::VertexCapExceeded { vertices: 8, cap: 7 })
        ));
    }

    #[test]
    fn minimal_budget_matches_known_values() {
        let p3 = plain(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            minimal_winning_budget(&p3, Problem::VertexCover, SolverOptions::default()).unwrap(),
            Some(1)
        );
        // Two disjoint edges: the online game needs 2 (the offline optimum),
        // every reveal shows a fresh or matched endpoint.
        let m2 = plain(4, &[(0, 1), (2, 3)]);
        assert_eq!(
            minimal_winning_budget(&m2, Problem::VertexCover, SolverOptions::default()).unwrap(),
            Some(2)
        );
    }

    #[test]
    fn reduction_verdict_on_strategy_tier() {
        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        let verdict =
            value_of_reduction(&q, Problem::VertexCover, SolverOptions::default()).unwrap();
        assert_eq!(verdict.tier, EvidenceTier::StrategyPlay);
        assert!(verdict.formula_value);
        assert!(verdict.consistent);
    }
}
