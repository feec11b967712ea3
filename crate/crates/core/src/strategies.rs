//! Algorithm and adversary policies for the reduction instances.
//!
//! The algorithm plays from the degree table alone: fixed rows get their
//! fixed answer, formula-dependent rows encode a truth assignment into the
//! solution. Existential values come from the exact formula game; universal
//! values are whatever the adversary forces through its reveal order and are
//! recovered through the dependency reveal adjacencies once later dependent
//! vertices show up.
//!
//! The adversary reveals literal pairs in quantification order, choosing the
//! pair order of each ∀-variable by simulating the algorithm on a cloned
//! session, then discloses clause gadgets, fake clause gadgets, dependency
//! reveal gadgets, and ID gadgets.

use crate::formula::{
    evaluate_from, exists_move, Assignment, FormulaError, Literal, Polarity, QbfInstance,
    Quantifier, DEFAULT_VAR_CAP,
};
use crate::gadgets::{binom, GadgetKind, OnlineInstance, RowAction};
use crate::game::{
    Decision, GameError, GameState, Outcome, RevelationSubgraph, SessionVertex, SessionView,
    Transcript,
};
use crate::graph::{FakeClause, VertexId, VertexRole};
use crate::offline::Problem;
use crate::rng::SplitMix64;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyError {
    /// The revealed degree matches no table row: the instance is corrupt.
    UnknownDegree { degree: usize },
    /// `identify_forall` was asked about an existential variable.
    NotForall { var: u32 },
    Game(GameError),
    Formula(FormulaError),
}

impl fmt::Display for StrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyError::UnknownDegree { degree } => {
                write!(f, "degree {degree} matches no table row")
            }
            StrategyError::NotForall { var } => write!(f, "x{var} is not universally quantified"),
            StrategyError::Game(e) => write!(f, "{e}"),
            StrategyError::Formula(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StrategyError {}

impl From<GameError> for StrategyError {
    fn from(e: GameError) -> Self {
        StrategyError::Game(e)
    }
}

impl From<FormulaError> for StrategyError {
    fn from(e: FormulaError) -> Self {
        StrategyError::Formula(e)
    }
}

/// Maps the degree of a revealed vertex to its table row.
pub fn classify_by_degree(
    inst: &OnlineInstance,
    revelation: &RevelationSubgraph,
) -> Result<RowAction, StrategyError> {
    let degree = revelation.degree();
    inst.degree_table().lookup(degree).ok_or(StrategyError::UnknownDegree { degree })
}

/// A deterministic online algorithm: identical observation histories yield
/// identical decisions, which is exactly what the simulating adversary
/// relies on.
pub trait AlgorithmPolicy {
    fn decide(
        &mut self,
        view: &SessionView,
        revelation: &RevelationSubgraph,
    ) -> Result<Decision, StrategyError>;

    fn clone_box(&self) -> Box<dyn AlgorithmPolicy>;

    fn name(&self) -> &'static str;
}

/// An adversary: picks the next unrevealed vertex, with full knowledge of
/// the instance and the right to simulate the algorithm on session clones.
pub trait AdversaryPolicy {
    fn next_reveal(&mut self, runner: &MatchRunner) -> Result<VertexId, StrategyError>;

    fn name(&self) -> &'static str;
}

/// Drives one match and hands the adversary its simulation handle.
pub struct MatchRunner<'g> {
    state: GameState<'g>,
    algorithm: Box<dyn AlgorithmPolicy>,
}

impl<'g> MatchRunner<'g> {
    pub fn new(inst: &'g OnlineInstance, algorithm: Box<dyn AlgorithmPolicy>) -> Self {
        MatchRunner {
            state: GameState::new(inst.problem, &inst.graph, inst.budget),
            algorithm,
        }
    }

    pub fn state(&self) -> &GameState<'g> {
        &self.state
    }

    /// Plays the given reveals on clones of the session and the algorithm,
    /// returning the simulated decisions.
    pub fn simulate(&self, reveals: &[VertexId]) -> Result<Vec<Decision>, StrategyError> {
        let mut state = self.state.clone();
        let mut algorithm = self.algorithm.clone_box();
        let mut decisions = Vec::with_capacity(reveals.len());
        for &v in reveals {
            let revelation = state.reveal(v)?;
            let choice = algorithm.decide(&state.view(), &revelation)?;
            state.decide(choice)?;
            decisions.push(choice);
        }
        Ok(decisions)
    }

    /// One full turn: reveal `v`, let the algorithm decide.
    pub fn step(&mut self, v: VertexId) -> Result<Decision, StrategyError> {
        let revelation = self.state.reveal(v)?;
        let choice = self.algorithm.decide(&self.state.view(), &revelation)?;
        self.state.decide(choice)?;
        Ok(choice)
    }

    pub fn play(&mut self, adversary: &mut dyn AdversaryPolicy) -> Result<Transcript, StrategyError> {
        while !self.state.finished() {
            let v = adversary.next_reveal(self)?;
            self.step(v)?;
        }
        Ok(self.state.transcript()?)
    }
}

/// Plays a full match and returns the transcript.
pub fn play_match(
    inst: &OnlineInstance,
    algorithm: Box<dyn AlgorithmPolicy>,
    adversary: &mut dyn AdversaryPolicy,
) -> Result<Transcript, StrategyError> {
    MatchRunner::new(inst, algorithm).play(adversary)
}

// ---------------------------------------------------------------------------
// The degree-table algorithm
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
struct PairBook {
    first: Option<(SessionVertex, Decision)>,
    second: Option<SessionVertex>,
}

/// The online algorithm for built instances. `leak_aware` additionally reads
/// early dependency-reveal disclosures, turning a ∀-variable the adversary
/// leaked into a free existential choice; the plain policy ignores leaks.
#[derive(Clone)]
pub struct TablePolicy {
    problem: Problem,
    formula: QbfInstance,
    table: crate::gadgets::DegreeTable,
    leak_aware: bool,
    /// Resolved variable values.
    assignment: BTreeMap<u32, bool>,
    /// Reveal bookkeeping for each ∀-variable's literal pair.
    pairs: BTreeMap<u32, PairBook>,
    /// Known polarity of revealed ∀-pair vertices (filled by identification).
    polarity_of: BTreeMap<SessionVertex, Polarity>,
    /// Revealed literal vertices: session, variable, polarity if known.
    literals_seen: Vec<(SessionVertex, u32, Option<Polarity>)>,
    /// Revealed clause member vertices with their represented literal.
    members_seen: Vec<(SessionVertex, Literal)>,
    /// Revealed dependency reveal centers.
    dr_seen: Vec<SessionVertex>,
}

/// The degree-table algorithm with formula-guided existential moves.
pub fn algorithm_paper_policy(inst: &OnlineInstance) -> Box<dyn AlgorithmPolicy> {
    Box::new(TablePolicy::new(inst, false))
}

/// The same policy, plus the leak detector that exploits a dependency reveal
/// gadget disclosed before its variable's literals.
pub fn algorithm_leak_aware(inst: &OnlineInstance) -> Box<dyn AlgorithmPolicy> {
    Box::new(TablePolicy::new(inst, true))
}

impl TablePolicy {
    fn new(inst: &OnlineInstance, leak_aware: bool) -> Self {
        TablePolicy {
            problem: inst.problem,
            formula: inst.formula.clone(),
            table: inst.degree_table().clone(),
            leak_aware,
            assignment: BTreeMap::new(),
            pairs: BTreeMap::new(),
            polarity_of: BTreeMap::new(),
            literals_seen: Vec::new(),
            members_seen: Vec::new(),
            dr_seen: Vec::new(),
        }
    }

    fn n(&self) -> usize {
        self.formula.n()
    }

    /// Truth value of `lit` under a resolved variable value.
    fn literal_truth(&self, lit: Literal, value: bool) -> bool {
        lit.satisfied_by(value)
    }

    /// Existential choice for `var`, memoized in the tracked assignment.
    /// Unresolved earlier ∀-variables (possible only against orders that
    /// break the reveal lemma) default to true.
    fn existential_value(&mut self, var: u32) -> Result<bool, StrategyError> {
        if let Some(&v) = self.assignment.get(&var) {
            return Ok(v);
        }
        let mut partial = Assignment::new();
        for earlier in 1..var {
            partial.set(earlier, self.assignment.get(&earlier).copied().unwrap_or(true));
        }
        let value = exists_move(&self.formula, &partial, var)?;
        self.assignment.insert(var, value);
        Ok(value)
    }

    /// Best value for a ∀-variable the adversary degenerated into an
    /// existential choice (leak-aware play only).
    fn degenerate_value(&mut self, var: u32) -> Result<bool, StrategyError> {
        if let Some(&v) = self.assignment.get(&var) {
            return Ok(v);
        }
        let mut partial = Assignment::new();
        for earlier in 1..var {
            partial.set(earlier, self.assignment.get(&earlier).copied().unwrap_or(true));
        }
        let mut with_true = partial.clone();
        with_true.set(var, true);
        let value = if evaluate_from(&self.formula, &with_true, var + 1, DEFAULT_VAR_CAP)? {
            true
        } else {
            let mut with_false = partial;
            with_false.set(var, false);
            evaluate_from(&self.formula, &with_false, var + 1, DEFAULT_VAR_CAP)? && false
        };
        self.assignment.insert(var, value);
        Ok(value)
    }

    /// Records the resolved polarity of a revealed ∀-pair vertex and derives
    /// the variable's value from the decision taken on the first reveal.
    fn resolve_pair(&mut self, var: u32, session: SessionVertex, polarity: Polarity) {
        self.polarity_of.insert(session, polarity);
        let book = self.pairs.entry(var).or_default();
        if let Some((first, decision)) = book.first {
            let first_polarity = if first == session {
                polarity
            } else {
                polarity.flip()
            };
            self.polarity_of.insert(first, first_polarity);
            if let Some(second) = book.second {
                self.polarity_of.insert(second, first_polarity.flip());
            }
            // Selected literal vertices encode true literals.
            let first_lit_true = decision == Decision::In;
            let value = if first_polarity == Polarity::Positive {
                first_lit_true
            } else {
                !first_lit_true
            };
            self.assignment.insert(var, value);
        }
    }

    /// Identification sweep: tries to resolve every pending ∀-pair from the
    /// dependency reveal adjacencies visible so far.
    fn resolution_sweep(&mut self, view: &SessionView) {
        let foralls: Vec<u32> = self
            .formula
            .variables()
            .filter(|&v| self.formula.quantifier_of(v) == Quantifier::Forall)
            .collect();
        loop {
            let mut progress = false;
            for &var in &foralls {
                if self.assignment.contains_key(&var) {
                    continue;
                }
                let Some((first, _)) = self.pairs.get(&var).and_then(|b| b.first) else {
                    continue;
                };
                // Common-neighbor thresholds against a revealed literal of a
                // later variable: the dependency reveal center for `var`
                // neighbors exactly the false (negative) literal.
                let clause_base = if self.problem == Problem::DominatingSet {
                    2 * self.n() - 2
                } else {
                    0
                };
                let below = self.formula.foralls_below(var);
                let candidates: Vec<SessionVertex> = self
                    .literals_seen
                    .iter()
                    .filter(|&&(_, j, _)| j > var)
                    .map(|&(sv, _, _)| sv)
                    .collect();
                for witness in candidates {
                    let count = view.common_neighbor_count(first, witness);
                    let polarity = if count == clause_base + below + 1 {
                        Polarity::Negative
                    } else if count == clause_base + below {
                        Polarity::Positive
                    } else {
                        continue;
                    };
                    self.resolve_pair(var, first, polarity);
                    progress = true;
                    break;
                }
                if self.assignment.contains_key(&var) {
                    continue;
                }
                // A revealed clause member of this variable names its own
                // literal vertex directly.
                let members: Vec<(SessionVertex, Literal)> = self
                    .members_seen
                    .iter()
                    .copied()
                    .filter(|&(_, lit)| lit.var == var)
                    .collect();
                for (member, lit) in members {
                    let anchor_polarity = if self.problem == Problem::IndependentSet {
                        lit.polarity.flip()
                    } else {
                        lit.polarity
                    };
                    let polarity = if view.adjacent(member, first) {
                        anchor_polarity
                    } else {
                        anchor_polarity.flip()
                    };
                    self.resolve_pair(var, first, polarity);
                    progress = true;
                    break;
                }
            }
            if !progress {
                return;
            }
        }
    }

    /// Leak detector: with the dependency reveal center already revealed,
    /// adjacency to it gives away the polarity of a just-revealed ∀-pair
    /// vertex. Decisive only when the formula has a single ∀-variable (the
    /// revealed center is then unambiguous).
    fn leaked_polarity(&self, view: &SessionView, revealed: SessionVertex) -> Option<Polarity> {
        let forall_count = self
            .formula
            .quantifiers()
            .iter()
            .filter(|&&q| q == Quantifier::Forall)
            .count();
        if forall_count != 1 || self.dr_seen.is_empty() {
            return None;
        }
        let adjacent = self.dr_seen.iter().any(|&center| view.adjacent(center, revealed));
        Some(if adjacent { Polarity::Negative } else { Polarity::Positive })
    }

    /// Triangle mates of a revealed member: revealed neighbors that also
    /// classify as clause members.
    fn revealed_mates(&self, view: &SessionView, member: SessionVertex) -> Vec<SessionVertex> {
        self.members_seen
            .iter()
            .map(|&(sv, _)| sv)
            .filter(|&sv| sv != member && view.adjacent(sv, member))
            .collect()
    }
}

impl AlgorithmPolicy for TablePolicy {
    fn decide(
        &mut self,
        view: &SessionView,
        revelation: &RevelationSubgraph,
    ) -> Result<Decision, StrategyError> {
        let degree = revelation.degree();
        let row = self
            .table
            .lookup(degree)
            .ok_or(StrategyError::UnknownDegree { degree })?;
        let revealed = revelation.revealed;

        // Record the observation, then resolve what has become resolvable.
        match row {
            RowAction::ForallLiteralPair { var } => {
                self.literals_seen.push((revealed, var, None));
            }
            RowAction::ExactLiteral { lit } => {
                self.literals_seen.push((revealed, lit.var, Some(lit.polarity)));
            }
            RowAction::ClauseMemberOf { lit } => {
                self.members_seen.push((revealed, lit));
            }
            RowAction::Accept | RowAction::Reject => {
                if degree >= 6 && self.problem != Problem::DominatingSet {
                    // The only accept row that large is the dependency
                    // reveal center.
                    self.dr_seen.push(revealed);
                } else if self.problem == Problem::DominatingSet && degree == 2 * self.n() + 1 {
                    self.dr_seen.push(revealed);
                }
            }
        }
        self.resolution_sweep(view);

        let decision = match row {
            RowAction::Accept => Decision::In,
            RowAction::Reject => Decision::Out,
            RowAction::ExactLiteral { lit } => {
                let value = self.existential_value(lit.var)?;
                if self.literal_truth(lit, value) {
                    Decision::In
                } else {
                    Decision::Out
                }
            }
            RowAction::ForallLiteralPair { var } => {
                let book = self.pairs.entry(var).or_default();
                match book.first {
                    None => {
                        if self.leak_aware {
                            if let Some(polarity) = self.leaked_polarity(view, revealed) {
                                let value = self.degenerate_value(var)?;
                                let lit = Literal { var, polarity };
                                let choice = if self.literal_truth(lit, value) {
                                    Decision::In
                                } else {
                                    Decision::Out
                                };
                                let book = self.pairs.entry(var).or_default();
                                book.first = Some((revealed, choice));
                                self.polarity_of.insert(revealed, polarity);
                                return Ok(choice);
                            }
                        }
                        // Fixed convention: the first-revealed ∀-literal is
                        // selected, encoding it as the true literal.
                        self.pairs.entry(var).or_default().first = Some((revealed, Decision::In));
                        Decision::In
                    }
                    Some((_, first_choice)) => {
                        self.pairs.entry(var).or_default().second = Some(revealed);
                        if let Some(&polarity) = self.polarity_of.get(&revealed) {
                            // Identified already: keep the encoding exact.
                            let value =
                                self.assignment.get(&var).copied().unwrap_or(first_choice.accepted());
                            let lit = Literal { var, polarity };
                            if self.literal_truth(lit, value) {
                                Decision::In
                            } else {
                                Decision::Out
                            }
                        } else if first_choice == Decision::In {
                            Decision::Out
                        } else {
                            Decision::In
                        }
                    }
                }
            }
            RowAction::ClauseMemberOf { lit } => {
                let value = match self.assignment.get(&lit.var) {
                    Some(&v) => v,
                    None => match self.formula.quantifier_of(lit.var) {
                        Quantifier::Exists => self.existential_value(lit.var)?,
                        // Unresolvable ∀ (only against orders breaking the
                        // reveal lemma): deterministic fallback.
                        Quantifier::Forall => true,
                    },
                };
                let represented_true = self.literal_truth(lit, value);
                match self.problem {
                    Problem::VertexCover => {
                        // Two triangle members per clause go into the cover;
                        // the first-revealed member of a true literal is the
                        // one left out.
                        if !represented_true {
                            Decision::In
                        } else {
                            let witness_taken = self
                                .revealed_mates(view, revealed)
                                .iter()
                                .any(|&mate| view.decision_of(mate) == Some(Decision::Out));
                            if witness_taken {
                                Decision::In
                            } else {
                                Decision::Out
                            }
                        }
                    }
                    Problem::IndependentSet => {
                        // One member per satisfied clause: the first-revealed
                        // member of a true literal.
                        if !represented_true {
                            Decision::Out
                        } else {
                            let taken = self
                                .revealed_mates(view, revealed)
                                .iter()
                                .any(|&mate| view.decision_of(mate) == Some(Decision::In));
                            if taken {
                                Decision::Out
                            } else {
                                Decision::In
                            }
                        }
                    }
                    Problem::DominatingSet => Decision::Out,
                }
            }
        };
        Ok(decision)
    }

    fn clone_box(&self) -> Box<dyn AlgorithmPolicy> {
        Box::new(self.clone())
    }

    fn name(&self) -> &'static str {
        if self.leak_aware {
            "leak-aware"
        } else {
            "paper"
        }
    }
}

/// Identification of a ∀-variable's literal pair from the observations made
/// so far: returns the session vertex of the false (negative) literal once
/// the disclosed adjacencies pin it down, `None` while the pair is still
/// symmetric. Requires both pair vertices revealed.
pub fn identify_forall(
    inst: &OnlineInstance,
    view: &SessionView,
    var: u32,
) -> Result<Option<SessionVertex>, StrategyError> {
    if inst.formula.quantifier_of(var) != Quantifier::Forall {
        return Err(StrategyError::NotForall { var });
    }
    let n = inst.formula.n();
    let pair_degree = binom(2 * n - 1, 2) + 4 * var as usize;
    let pair: Vec<SessionVertex> = view
        .revealed()
        .iter()
        .copied()
        .filter(|&sv| view.degree_of_revealed(sv) == Some(pair_degree))
        .collect();
    let [a, b] = pair.as_slice() else {
        return Ok(None);
    };
    let (a, b) = (*a, *b);

    let clause_base = if inst.problem == Problem::DominatingSet { 2 * n - 2 } else { 0 };
    let below = inst.formula.foralls_below(var);

    // Later literal vertices: table rows identify them by degree.
    for &witness in view.revealed() {
        let Some(degree) = view.degree_of_revealed(witness) else { continue };
        let Some(row) = inst.degree_table().lookup(degree) else { continue };
        let later_var = match row {
            RowAction::ForallLiteralPair { var: j } => j,
            RowAction::ExactLiteral { lit } => lit.var,
            _ => continue,
        };
        if later_var <= var {
            continue;
        }
        let count = view.common_neighbor_count(a, witness);
        if count == clause_base + below + 1 {
            return Ok(Some(a));
        }
        if count == clause_base + below {
            return Ok(Some(b));
        }
    }

    // Clause members of this variable name their literal vertex directly.
    if inst.problem != Problem::DominatingSet {
        for &witness in view.revealed() {
            let Some(degree) = view.degree_of_revealed(witness) else { continue };
            let Some(RowAction::ClauseMemberOf { lit }) = inst.degree_table().lookup(degree)
            else {
                continue;
            };
            if lit.var != var {
                continue;
            }
            let anchor_is_negative = match inst.problem {
                Problem::VertexCover => lit.polarity == Polarity::Negative,
                Problem::IndependentSet => lit.polarity == Polarity::Positive,
                Problem::DominatingSet => unreachable!(),
            };
            let adjacent_to_a = view.adjacent(witness, a);
            let false_session = if adjacent_to_a == anchor_is_negative { a } else { b };
            return Ok(Some(false_session));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Adversaries
// ---------------------------------------------------------------------------

/// The quantification-order adversary. For each ∀-variable it simulates the
/// algorithm on both pair orders and commits to the one whose induced value
/// makes the rest of the formula game losing (when possible).
pub struct PaperAdversary {
    formula: QbfInstance,
    problem: Problem,
    /// (positive literal, negative literal, aux) per variable.
    pairs: Vec<(VertexId, VertexId, Option<VertexId>)>,
    /// Everything after the variable phase, in fixed order.
    tail: Vec<VertexId>,
    queue: VecDeque<VertexId>,
    next_var: u32,
}

pub fn adversary_paper_policy(inst: &OnlineInstance) -> PaperAdversary {
    let mut pairs = Vec::new();
    for var in inst.formula.variables() {
        let pos = inst.literal_vertex(Literal::positive(var));
        let neg = inst.literal_vertex(Literal::negative(var));
        let aux = inst
            .graph
            .find_role(&VertexRole::VariableAux { var })
            .first()
            .copied();
        pairs.push((pos, neg, aux));
    }
    let mut tail = Vec::new();
    for j in 0..inst.formula.m() {
        tail.extend_from_slice(inst.clause_vertices(j));
    }
    for record in inst.gadgets() {
        tail.extend_from_slice(&record.vertices);
    }
    PaperAdversary {
        formula: inst.formula.clone(),
        problem: inst.problem,
        pairs,
        tail,
        queue: VecDeque::new(),
        next_var: 1,
    }
}

impl PaperAdversary {
    /// Assignment encoded by the play so far: a variable is true when its
    /// positive literal vertex was accepted.
    fn played_assignment(&self, state: &GameState, upto: u32) -> Assignment {
        let mut assignment = Assignment::new();
        for var in 1..upto {
            let (pos, _, _) = self.pairs[(var - 1) as usize];
            let accepted = state
                .session_of(pos)
                .and_then(|sv| state.view().decision_of(sv))
                .map(|d| d.accepted())
                .unwrap_or(false);
            assignment.set(var, accepted);
        }
        assignment
    }

    fn plan_variable(&mut self, runner: &MatchRunner) -> Result<(), StrategyError> {
        let var = self.next_var;
        self.next_var += 1;
        let (pos, neg, aux) = self.pairs[(var - 1) as usize];
        let order = match self.formula.quantifier_of(var) {
            Quantifier::Exists => [pos, neg],
            Quantifier::Forall => {
                // Simulate both reveal orders and read off the value each
                // one forces.
                let induced = |decisions: &[Decision], pos_slot: usize| -> bool {
                    decisions[pos_slot] == Decision::In
                };
                let with_pos_first = runner.simulate(&[pos, neg])?;
                let with_neg_first = runner.simulate(&[neg, pos])?;
                let value_a = induced(&with_pos_first, 0);
                let value_b = induced(&with_neg_first, 1);
                let base = self.played_assignment(runner.state(), var);
                let residual = |value: bool| -> Result<bool, StrategyError> {
                    let mut assignment = base.clone();
                    assignment.set(var, value);
                    Ok(evaluate_from(&self.formula, &assignment, var + 1, DEFAULT_VAR_CAP)?)
                };
                if !residual(value_a)? {
                    [pos, neg]
                } else if !residual(value_b)? {
                    [neg, pos]
                } else {
                    [pos, neg]
                }
            }
        };
        self.queue.extend(order);
        if let Some(aux) = aux {
            self.queue.push_back(aux);
        }
        let _ = self.problem;
        Ok(())
    }
}

impl AdversaryPolicy for PaperAdversary {
    fn next_reveal(&mut self, runner: &MatchRunner) -> Result<VertexId, StrategyError> {
        loop {
            if let Some(v) = self.queue.pop_front() {
                if runner.state().is_revealed(v) {
                    continue; // a deviation wrapper got there first
                }
                return Ok(v);
            }
            if self.next_var as usize <= self.formula.n() {
                self.plan_variable(runner)?;
                continue;
            }
            if self.tail.is_empty() {
                // Everything planned was revealed; nothing should remain.
                return Err(StrategyError::Game(GameError::GameOver));
            }
            self.queue.extend(self.tail.drain(..));
        }
    }

    fn name(&self) -> &'static str {
        "paper"
    }
}

/// A named deviation from the reveal ordering lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deviation {
    /// Reveal the dependency reveal center of this variable first.
    DrCenterFirst { var: u32 },
    /// Reveal one fake clause vertex first.
    FakeClauseFirst { fake: FakeClause },
    /// No deviation: identical to the paper adversary.
    None,
}

/// The paper adversary with one precedence constraint deliberately violated.
pub struct DeviantAdversary {
    inner: PaperAdversary,
    opening: Option<VertexId>,
}

pub fn adversary_deviant(inst: &OnlineInstance, deviation: Deviation) -> DeviantAdversary {
    let opening = match deviation {
        Deviation::DrCenterFirst { var } => inst.dr_center(var),
        Deviation::FakeClauseFirst { fake } => inst
            .gadgets()
            .iter()
            .find(|g| g.kind == GadgetKind::FakeClause(fake))
            .map(|g| g.vertices[0]),
        Deviation::None => None,
    };
    DeviantAdversary { inner: adversary_paper_policy(inst), opening }
}

impl AdversaryPolicy for DeviantAdversary {
    fn next_reveal(&mut self, runner: &MatchRunner) -> Result<VertexId, StrategyError> {
        if let Some(v) = self.opening.take() {
            return Ok(v);
        }
        self.inner.next_reveal(runner)
    }

    fn name(&self) -> &'static str {
        "deviant"
    }
}

/// A seeded adversary revealing uniformly among the vertices that keep the
/// reveal-order constraints satisfied.
pub struct RandomCompliantAdversary {
    rng: SplitMix64,
    /// Per vertex: the gate controlling when it may be revealed.
    gates: Vec<Gate>,
    literal_var: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Gate {
    /// Literal vertex of this variable: all earlier variables must have a
    /// revealed literal.
    Literal(u32),
    /// Clause or fake clause gadget over these variables: each needs a
    /// revealed literal.
    Clause(Vec<u32>),
    /// Dependency reveal gadget: every variable needs a revealed literal.
    DependencyReveal,
    /// ID gadgets and aux vertices are unconstrained.
    Free,
}

pub fn adversary_random_compliant(inst: &OnlineInstance, seed: u64) -> RandomCompliantAdversary {
    let vars_of = |fake: &FakeClause| -> Vec<u32> {
        let mut vars: Vec<u32> = fake.iter().map(|lit| lit.var).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    };
    let mut gates = Vec::with_capacity(inst.graph.len());
    let mut literal_var = Vec::with_capacity(inst.graph.len());
    for v in inst.graph.vertices() {
        let (gate, lit_var) = match *inst.graph.role(v) {
            VertexRole::Literal { lit } => (Gate::Literal(lit.var), Some(lit.var)),
            VertexRole::VariableAux { .. } => (Gate::Free, None),
            VertexRole::ClauseMember { clause, .. } => {
                let mut vars: Vec<u32> = inst.formula.clauses()[clause]
                    .literals()
                    .iter()
                    .map(|lit| lit.var)
                    .collect();
                vars.sort_unstable();
                vars.dedup();
                (Gate::Clause(vars), None)
            }
            VertexRole::FakeMember { fake, .. } | VertexRole::FakeLeaf { fake } => {
                (Gate::Clause(vars_of(&fake)), None)
            }
            VertexRole::DrCenter { .. } | VertexRole::DrLeaf { .. } => {
                (Gate::DependencyReveal, None)
            }
            VertexRole::IdMiddle { .. } | VertexRole::IdLeaf { .. } | VertexRole::IdCenter { .. } => {
                (Gate::Free, None)
            }
        };
        gates.push(gate);
        literal_var.push(lit_var);
    }
    RandomCompliantAdversary { rng: SplitMix64::new(seed), gates, literal_var }
}

impl AdversaryPolicy for RandomCompliantAdversary {
    fn next_reveal(&mut self, runner: &MatchRunner) -> Result<VertexId, StrategyError> {
        let state = runner.state();
        let graph = state.graph();
        let mut literal_revealed: BTreeSet<u32> = BTreeSet::new();
        for v in graph.vertices() {
            if state.is_revealed(v) {
                if let Some(var) = self.literal_var[v.index()] {
                    literal_revealed.insert(var);
                }
            }
        }
        let n = self.gates.iter().filter(|g| matches!(g, Gate::Literal(_))).count() / 2;
        let candidates: Vec<VertexId> = graph
            .vertices()
            .filter(|&v| !state.is_revealed(v))
            .filter(|&v| match &self.gates[v.index()] {
                Gate::Free => true,
                Gate::Literal(var) => (1..*var).all(|t| literal_revealed.contains(&t)),
                Gate::Clause(vars) => vars.iter().all(|t| literal_revealed.contains(t)),
                Gate::DependencyReveal => {
                    (1..=n as u32).all(|t| literal_revealed.contains(&t))
                }
            })
            .collect();
        debug_assert!(!candidates.is_empty());
        Ok(candidates[self.rng.below(candidates.len())])
    }

    fn name(&self) -> &'static str {
        "random"
    }
}

// ---------------------------------------------------------------------------
// Reveal-order checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecedenceViolation {
    /// Variable `later` had a literal revealed before variable `earlier`.
    VariableOrder { earlier: u32, later: u32 },
    /// A clause gadget was revealed before a literal of one of its variables.
    ClauseBeforeLiteral { variable: u32 },
    /// A fake clause gadget was revealed before a literal of its variables.
    FakeBeforeLiteral { variable: u32 },
    /// A dependency reveal gadget was revealed before some variable's
    /// literal.
    DrBeforeLiteral { variable: u32 },
}

/// Checks a transcript against the four reveal-ordering constraints: literal
/// pairs in quantification order; each clause, fake clause, and dependency
/// reveal gadget only after the literals it depends on (ID gadgets are
/// unconstrained).
pub fn check_reveal_precedence(
    inst: &OnlineInstance,
    transcript: &Transcript,
) -> Vec<PrecedenceViolation> {
    let mut first_literal: BTreeMap<u32, usize> = BTreeMap::new();
    let mut first_clause: BTreeMap<usize, usize> = BTreeMap::new();
    let mut first_fake: BTreeMap<FakeClause, usize> = BTreeMap::new();
    let mut first_dr: BTreeMap<u32, usize> = BTreeMap::new();
    for turn in &transcript.turns {
        let step = turn.step;
        match *inst.graph.role(turn.vertex) {
            VertexRole::Literal { lit } => {
                first_literal.entry(lit.var).or_insert(step);
            }
            VertexRole::ClauseMember { clause, .. } => {
                first_clause.entry(clause).or_insert(step);
            }
            VertexRole::FakeMember { fake, .. } | VertexRole::FakeLeaf { fake } => {
                first_fake.entry(fake).or_insert(step);
            }
            VertexRole::DrCenter { var } | VertexRole::DrLeaf { var } => {
                first_dr.entry(var).or_insert(step);
            }
            _ => {}
        }
    }
    let mut violations = Vec::new();
    let n = inst.formula.n() as u32;
    let lit_step = |var: u32| first_literal.get(&var).copied().unwrap_or(usize::MAX);
    for earlier in 1..=n {
        for later in earlier + 1..=n {
            if lit_step(later) < lit_step(earlier) {
                violations.push(PrecedenceViolation::VariableOrder { earlier, later });
            }
        }
    }
    for (clause, &step) in &first_clause {
        for lit in inst.formula.clauses()[*clause].literals() {
            if step < lit_step(lit.var) {
                violations.push(PrecedenceViolation::ClauseBeforeLiteral { variable: lit.var });
            }
        }
    }
    for (fake, &step) in &first_fake {
        for lit in fake {
            if step < lit_step(lit.var) {
                violations.push(PrecedenceViolation::FakeBeforeLiteral { variable: lit.var });
            }
        }
    }
    for (&_dr_var, &step) in &first_dr {
        for var in 1..=n {
            if step < lit_step(var) {
                violations.push(PrecedenceViolation::DrBeforeLiteral { variable: var });
            }
        }
    }
    violations.sort_by_key(|v| alloc::format!("{v:?}"));
    violations.dedup();
    violations
}

/// Convenience: play the table algorithm against the simulating adversary
/// and report whether the winner matches the formula game value.
pub fn head_to_head(inst: &OnlineInstance) -> Result<(Outcome, Transcript), StrategyError> {
    let mut adversary = adversary_paper_policy(inst);
    let transcript = play_match(inst, algorithm_paper_policy(inst), &mut adversary)?;
    Ok((transcript.outcome, transcript))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate_tqbf, parse_qbf};
    use crate::gadgets::build_online_instance;

    fn running() -> QbfInstance {
        parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap()
    }

    fn ds_formula() -> QbfInstance {
        parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap()
    }

    #[test]
    fn classification_of_fixed_rows() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        assert_eq!(inst.degree_table().lookup(1), Some(RowAction::Reject));
        assert_eq!(inst.degree_table().lookup(3), Some(RowAction::Accept));
        assert_eq!(inst.degree_table().lookup(5), Some(RowAction::Accept));
        assert_eq!(inst.degree_table().lookup(17), Some(RowAction::Accept)); // 3*C(4,3)+5
        assert_eq!(
            inst.degree_table().lookup(7),
            Some(RowAction::ForallLiteralPair { var: 1 })
        );
        assert_eq!(inst.degree_table().lookup(4), None);

        let ds = build_online_instance(&ds_formula(), Problem::DominatingSet).unwrap();
        assert_eq!(ds.degree_table().lookup(3), Some(RowAction::Reject));
        assert_eq!(ds.degree_table().lookup(5), Some(RowAction::Accept)); // 2n+1
    }

    #[test]
    fn paper_match_on_running_instance_wins_at_budget() {
        for problem in Problem::ALL {
            let inst = build_online_instance(&running(), problem).unwrap();
            let (outcome, transcript) = head_to_head(&inst).unwrap();
            assert_eq!(outcome, Outcome::AlgorithmWins, "{problem}");
            assert_eq!(transcript.solution_size, inst.budget, "{problem}");
            assert!(check_reveal_precedence(&inst, &transcript).is_empty());
        }
    }

    #[test]
    fn ds_walkthrough_instance_wins_at_budget() {
        let inst = build_online_instance(&ds_formula(), Problem::DominatingSet).unwrap();
        let (outcome, transcript) = head_to_head(&inst).unwrap();
        assert_eq!(outcome, Outcome::AlgorithmWins);
        assert_eq!(transcript.solution_size, 9);
    }

    #[test]
    fn identify_forall_requires_a_later_reveal() {
        let q = running();
        let inst = build_online_instance(&q, Problem::VertexCover).unwrap();
        let mut runner = MatchRunner::new(&inst, algorithm_paper_policy(&inst));
        let pos = inst.literal_vertex(Literal::positive(1));
        let neg = inst.literal_vertex(Literal::negative(1));
        runner.step(pos).unwrap();
        runner.step(neg).unwrap();
        // Both pair vertices revealed, still symmetric.
        assert_eq!(identify_forall(&inst, &runner.state().view(), 1), Ok(None));
        // Revealing x2's first literal resolves the pair: the false literal
        // is the one the dependency reveal center neighbors.
        runner.step(inst.literal_vertex(Literal::positive(2))).unwrap();
        let resolved = identify_forall(&inst, &runner.state().view(), 1).unwrap();
        let neg_session = runner.state().session_of(neg).unwrap();
        assert_eq!(resolved, Some(neg_session));
        assert_eq!(
            identify_forall(&inst, &runner.state().view(), 2),
            Err(StrategyError::NotForall { var: 2 })
        );
    }

    #[test]
    fn transcript_decisions_replay_deterministically() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        let (_, transcript) = head_to_head(&inst).unwrap();
        // Feed the same reveal order to a fresh policy: identical decisions.
        let mut replay = MatchRunner::new(&inst, algorithm_paper_policy(&inst));
        for turn in &transcript.turns {
            let choice = replay.step(turn.vertex).unwrap();
            assert_eq!(choice, turn.decision, "step {}", turn.step);
        }
    }

    #[test]
    fn no_deviation_matches_the_paper_adversary() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        let mut deviant = adversary_deviant(&inst, Deviation::None);
        let with_deviant =
            play_match(&inst, algorithm_paper_policy(&inst), &mut deviant).unwrap();
        let (_, with_paper) = head_to_head(&inst).unwrap();
        assert_eq!(with_deviant, with_paper);
    }

    #[test]
    fn random_compliant_orders_respect_the_lemma() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        for seed in 0..5 {
            let mut adversary = adversary_random_compliant(&inst, seed);
            let transcript =
                play_match(&inst, algorithm_paper_policy(&inst), &mut adversary).unwrap();
            assert!(check_reveal_precedence(&inst, &transcript).is_empty(), "seed {seed}");
            // The running instance is a true formula: the algorithm wins.
            assert_eq!(evaluate_tqbf(&inst.formula), Ok(true));
            assert_eq!(transcript.outcome, Outcome::AlgorithmWins, "seed {seed}");
        }
    }

    #[test]
    fn dr_first_deviation_is_flagged() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        let mut deviant = adversary_deviant(&inst, Deviation::DrCenterFirst { var: 1 });
        let transcript = play_match(&inst, algorithm_paper_policy(&inst), &mut deviant).unwrap();
        let violations = check_reveal_precedence(&inst, &transcript);
        assert!(violations
            .iter()
            .all(|v| matches!(v, PrecedenceViolation::DrBeforeLiteral { .. })));
        assert!(!violations.is_empty());
    }
}
