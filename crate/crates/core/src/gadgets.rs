//! Extension gadgets and the three-step online reduction pipeline.
//!
//! Starting from a base reduction graph, the pipeline
//!
//! 1. adds a fake clause gadget for every 3-distinct-literal clause missing
//!    from the formula, so all literal vertices look alike,
//! 2. adds a dependency reveal star per ∀-variable, whose adjacencies let the
//!    algorithm identify the false literal once later dependent vertices are
//!    revealed,
//! 3. pads every solution-dependent vertex with an ID gadget so its degree
//!    pins down its role (exactly, or up to the ∀-literal pair).
//!
//! Every gadget is self-contained: its optimal partial solution merges
//! disjointly with any host optimum, which is why the final budget is the
//! base budget plus the sum of the gadgets' standalone optima.
//!
//! Degrees in the finished graph (with `B = C(2n-1, 2)`):
//!
//! | problem | role                         | degree              |
//! |---------|------------------------------|---------------------|
//! | vc/is   | extension gadget leaves      | 1                   |
//! | vc/is   | ID path middles              | 3                   |
//! | vc/is   | fake clause triangle         | 5                   |
//! | vc/is   | dependency reveal center     | 3*C(2n,3) + 2n + 1  |
//! | vc/is   | literal of `x_i`             | B + 4i (+1 if ∃-negative) |
//! | vc/is   | clause member of `x_i`       | B + 4i + 2 (+1 if negative) |
//! | ds      | star leaves, path ends       | 1                   |
//! | ds      | aux vertex, linked ID leaves | 2                   |
//! | ds      | clause vertices              | 3                   |
//! | ds      | fake / dep. reveal centers   | 2n + 1              |
//! | ds      | literal ID star centers      | B + 4(n+1)          |
//! | ds      | literal of `x_i`             | B + 4i (+1 if ∃-negative) |

use crate::formula::{all_possible_clauses, Literal, Polarity, QbfInstance, Quantifier};
use crate::graph::{
    ExpectedChoice, FakeClause, GraphError, IdTarget, LabeledGraph, VertexId, VertexRole,
};
use crate::offline::{
    reduce_3sat, solve_constrained, Constraints, OfflineError, OfflineReduction, Problem,
    SolveOptions,
};
use crate::rng::SplitMix64;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut result = 1usize;
    for idx in 0..k {
        result = result * (n - idx) / (idx + 1);
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetError {
    NotNormalized,
    /// Dependency reveal gadgets exist only for ∀-variables.
    NotForall { var: u32 },
    /// The clause handed to the fake clause builder is a real clause.
    FakeClauseIsReal,
    /// The role gets the empty ID gadget in this profile.
    EmptyIdRole,
    /// Build-time verification found a standalone optimum off its value.
    StandaloneMismatch { expected: usize, actual: usize },
    Offline(OfflineError),
    Graph(GraphError),
}

impl fmt::Display for GadgetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetError::NotNormalized => write!(f, "instance is not normalized"),
            GadgetError::NotForall { var } => {
                write!(f, "x{var} is not universally quantified")
            }
            GadgetError::FakeClauseIsReal => write!(f, "clause exists in the formula"),
            GadgetError::EmptyIdRole => write!(f, "role gets the empty ID gadget"),
            GadgetError::StandaloneMismatch { expected, actual } => {
                write!(f, "standalone optimum {actual}, expected {expected}")
            }
            GadgetError::Offline(e) => write!(f, "{e}"),
            GadgetError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GadgetError {}

impl From<OfflineError> for GadgetError {
    fn from(e: OfflineError) -> Self {
        GadgetError::Offline(e)
    }
}

impl From<GraphError> for GadgetError {
    fn from(e: GraphError) -> Self {
        GadgetError::Graph(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GadgetKind {
    FakeClause(FakeClause),
    DependencyReveal { var: u32 },
    Id(IdTarget),
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetKind::FakeClause([a, b, c]) => write!(f, "fake clause ({a} | {b} | {c})"),
            GadgetKind::DependencyReveal { var } => write!(f, "dependency reveal for x{var}"),
            GadgetKind::Id(IdTarget::Literal(lit)) => write!(f, "ID gadget for {lit}"),
            GadgetKind::Id(IdTarget::ClauseMember { clause, lit }) => {
                write!(f, "ID gadget for {lit} in clause {clause}")
            }
        }
    }
}

/// An extension gadget, kept in local coordinates until [`extend`] grafts it
/// onto a host graph.
#[derive(Debug, Clone)]
pub struct ExtensionGadget {
    pub kind: GadgetKind,
    /// Internal vertices: role and expected optimal choice.
    pub internal: Vec<(VertexRole, ExpectedChoice)>,
    /// Edges between internal vertices, by local index.
    pub internal_edges: Vec<(usize, usize)>,
    /// Connecting edges: (host vertex, local internal index).
    pub connecting: Vec<(VertexId, usize)>,
    /// Size of the gadget's own optimal solution.
    pub standalone_optimum: usize,
    /// Local indices of one standalone optimal solution.
    pub standalone_witness: Vec<usize>,
}

impl ExtensionGadget {
    pub fn vertex_count(&self) -> usize {
        self.internal.len()
    }

    /// Distinct host endpoints of the connecting edges.
    pub fn boundary(&self) -> BTreeSet<VertexId> {
        self.connecting.iter().map(|&(host, _)| host).collect()
    }

    /// The gadget alone, without host or connecting edges.
    pub fn standalone_graph(&self) -> LabeledGraph {
        let mut g = LabeledGraph::new();
        for (role, choice) in &self.internal {
            g.add_vertex(*role, *choice);
        }
        for &(a, b) in &self.internal_edges {
            g.add_edge(VertexId(a as u32), VertexId(b as u32)).expect("local edges are valid");
        }
        g
    }

    /// Checks the declared standalone optimum against the exact solver.
    fn verify_standalone(&self, problem: Problem) -> Result<(), GadgetError> {
        let g = self.standalone_graph();
        let opt = solve_constrained(problem, &g, &Constraints::default(), SolveOptions::default())?;
        if opt.size != self.standalone_optimum {
            return Err(GadgetError::StandaloneMismatch {
                expected: self.standalone_optimum,
                actual: opt.size,
            });
        }
        let witness: BTreeSet<VertexId> =
            self.standalone_witness.iter().map(|&idx| VertexId(idx as u32)).collect();
        if !crate::game::feasible(problem, &g, &witness) || witness.len() != self.standalone_optimum
        {
            return Err(GadgetError::StandaloneMismatch {
                expected: self.standalone_optimum,
                actual: witness.len(),
            });
        }
        Ok(())
    }
}

/// Grafts a gadget onto a host graph: vertex and edge unions, host
/// annotations untouched. Returns the extended graph and the global ids of
/// the gadget's internal vertices.
pub fn extend(
    host: &LabeledGraph,
    gadget: &ExtensionGadget,
) -> Result<(LabeledGraph, Vec<VertexId>), GadgetError> {
    let mut g = host.clone();
    let mut ids = Vec::with_capacity(gadget.internal.len());
    for (role, choice) in &gadget.internal {
        ids.push(g.add_vertex(*role, *choice));
    }
    for &(a, b) in &gadget.internal_edges {
        g.add_edge(ids[a], ids[b])?;
    }
    for &(host_vertex, local) in &gadget.connecting {
        if !host.contains(host_vertex) {
            return Err(GraphError::UnknownVertex(host_vertex).into());
        }
        g.add_edge(host_vertex, ids[local])?;
    }
    Ok((g, ids))
}

/// Fake clause gadget for a non-existing clause.
///
/// Vertex cover / independent set: a triangle with two pendants per triangle
/// vertex; each triangle vertex connects to the literal it represents (vertex
/// cover) or to its negation (independent set). Dominating set: a star with
/// `2n - 2` leaves whose center connects to the three literal vertices.
pub fn build_fake_clause(
    base: &OfflineReduction,
    fake: FakeClause,
) -> Result<ExtensionGadget, GadgetError> {
    let real_sets: BTreeSet<BTreeSet<Literal>> =
        base.source.clauses().iter().map(|c| c.literal_set()).collect();
    if real_sets.contains(&fake.iter().copied().collect()) {
        return Err(GadgetError::FakeClauseIsReal);
    }
    let n = base.source.n();
    let mut internal = Vec::new();
    let mut internal_edges = Vec::new();
    let mut connecting = Vec::new();
    let (standalone_optimum, standalone_witness);

    match base.problem {
        Problem::VertexCover | Problem::IndependentSet => {
            let vc = base.problem == Problem::VertexCover;
            let member_choice = if vc { ExpectedChoice::Accept } else { ExpectedChoice::Reject };
            let leaf_choice = if vc { ExpectedChoice::Reject } else { ExpectedChoice::Accept };
            for (slot, &lit) in fake.iter().enumerate() {
                internal.push((VertexRole::FakeMember { fake, lit: Some(lit) }, member_choice));
                let anchor = if vc { lit } else { lit.negated() };
                connecting.push((base.literal_vertex(anchor), slot));
            }
            for a in 0..3 {
                for b in a + 1..3 {
                    internal_edges.push((a, b));
                }
            }
            for member in 0..3 {
                for _ in 0..2 {
                    let leaf = internal.len();
                    internal.push((VertexRole::FakeLeaf { fake }, leaf_choice));
                    internal_edges.push((member, leaf));
                }
            }
            if vc {
                standalone_optimum = 3;
                standalone_witness = alloc::vec![0, 1, 2];
            } else {
                standalone_optimum = 6;
                standalone_witness = (3..9).collect();
            }
        }
        Problem::DominatingSet => {
            internal.push((VertexRole::FakeMember { fake, lit: None }, ExpectedChoice::Accept));
            for &lit in &fake {
                connecting.push((base.literal_vertex(lit), 0));
            }
            for _ in 0..2 * n - 2 {
                let leaf = internal.len();
                internal.push((VertexRole::FakeLeaf { fake }, ExpectedChoice::Reject));
                internal_edges.push((0, leaf));
            }
            standalone_optimum = 1;
            standalone_witness = alloc::vec![0];
        }
    }

    let gadget = ExtensionGadget {
        kind: GadgetKind::FakeClause(fake),
        internal,
        internal_edges,
        connecting,
        standalone_optimum,
        standalone_witness,
    };
    gadget.verify_standalone(base.problem)?;
    Ok(gadget)
}

/// Dependency reveal star for a ∀-variable.
///
/// The center connects to the literal vertices of all variables with index
/// at least `var` except the true literal of `var` itself; for vertex cover
/// and independent set it additionally connects to the real-clause member
/// vertices representing those variables' literals (including the members of
/// `var`'s true literal). Leaves pad the center's degree up to
/// `3*C(2n,3) + 2n + 1` (vertex cover / independent set) or `2n + 1`
/// (dominating set).
pub fn build_dependency_reveal(
    base: &OfflineReduction,
    var: u32,
) -> Result<ExtensionGadget, GadgetError> {
    if base.source.quantifier_of(var) != Quantifier::Forall {
        return Err(GadgetError::NotForall { var });
    }
    let n = base.source.n();
    let mut connecting_hosts: Vec<VertexId> = Vec::new();
    for target in base.source.variables().filter(|&v| v >= var) {
        for lit in [Literal::positive(target), Literal::negative(target)] {
            if lit == Literal::positive(var) {
                continue;
            }
            connecting_hosts.push(base.literal_vertex(lit));
        }
    }
    if base.problem != Problem::DominatingSet {
        for (j, clause) in base.source.clauses().iter().enumerate() {
            for (slot, &lit) in clause.literals().iter().enumerate() {
                if lit.var >= var {
                    connecting_hosts.push(base.clause_vertices(j)[slot]);
                }
            }
        }
    }

    let center_degree = match base.problem {
        Problem::VertexCover | Problem::IndependentSet => 3 * binom(2 * n, 3) + 2 * n + 1,
        Problem::DominatingSet => 2 * n + 1,
    };
    debug_assert!(connecting_hosts.len() + 2 <= center_degree);
    let leaves = center_degree - connecting_hosts.len();

    let is = base.problem == Problem::IndependentSet;
    let mut internal = alloc::vec![(
        VertexRole::DrCenter { var },
        if is { ExpectedChoice::Reject } else { ExpectedChoice::Accept },
    )];
    let mut internal_edges = Vec::new();
    for _ in 0..leaves {
        let leaf = internal.len();
        internal.push((
            VertexRole::DrLeaf { var },
            if is { ExpectedChoice::Accept } else { ExpectedChoice::Reject },
        ));
        internal_edges.push((0, leaf));
    }
    let connecting = connecting_hosts.into_iter().map(|host| (host, 0)).collect();
    let (standalone_optimum, standalone_witness) = if is {
        (leaves, (1..=leaves).collect())
    } else {
        (1, alloc::vec![0])
    };

    let gadget = ExtensionGadget {
        kind: GadgetKind::DependencyReveal { var },
        internal,
        internal_edges,
        connecting,
        standalone_optimum,
        standalone_witness,
    };
    if gadget.vertex_count() <= 40 {
        gadget.verify_standalone(base.problem)?;
    }
    Ok(gadget)
}

/// Number of ID paths (vertex cover / independent set) for a target.
fn id_path_count(q: &QbfInstance, target: IdTarget) -> usize {
    let b = binom(2 * q.n() - 1, 2);
    match target {
        IdTarget::Literal(lit) => {
            let i = lit.var as usize;
            let d_below = q.foralls_below(lit.var);
            match (lit.polarity, q.quantifier_of(lit.var)) {
                (Polarity::Positive, _) => 4 * i - d_below - 1,
                (Polarity::Negative, Quantifier::Forall) => 4 * i - d_below - 2,
                (Polarity::Negative, Quantifier::Exists) => 4 * i - d_below,
            }
        }
        IdTarget::ClauseMember { lit, .. } => {
            let i = lit.var as usize;
            let d_upto = q.foralls_upto(lit.var);
            match lit.polarity {
                Polarity::Positive => b + 4 * i - d_upto - 1,
                Polarity::Negative => b + 4 * i - d_upto,
            }
        }
    }
}

/// Number of star leaves linked to the literal vertex (dominating set).
fn id_linked_count(q: &QbfInstance, lit: Literal) -> usize {
    let i = lit.var as usize;
    let d_below = q.foralls_below(lit.var);
    match (lit.polarity, q.quantifier_of(lit.var)) {
        (Polarity::Positive, _) => 4 * i - d_below - 2,
        (Polarity::Negative, Quantifier::Forall) => 4 * i - d_below - 3,
        (Polarity::Negative, Quantifier::Exists) => 4 * i - d_below - 1,
    }
}

/// ID gadget for a literal vertex or clause member vertex.
///
/// Vertex cover / independent set: `d` paths with three vertices, middles
/// attached to the identified vertex. Dominating set (literal vertices only):
/// a star with `C(2n-1,2) + 4(n+1)` leaves, `d` of which also attach to the
/// literal vertex. Every other role is recognizable by degree already and
/// gets the empty gadget.
pub fn build_id_gadget(
    base: &OfflineReduction,
    target: IdTarget,
) -> Result<ExtensionGadget, GadgetError> {
    let q = &base.source;
    let mut internal = Vec::new();
    let mut internal_edges = Vec::new();
    let mut connecting = Vec::new();
    let (standalone_optimum, standalone_witness);

    match base.problem {
        Problem::VertexCover | Problem::IndependentSet => {
            let host = match target {
                IdTarget::Literal(lit) => base.literal_vertex(lit),
                IdTarget::ClauseMember { clause, lit } => {
                    let slot = base.source.clauses()[clause]
                        .literals()
                        .iter()
                        .position(|&l| l == lit)
                        .ok_or(GadgetError::EmptyIdRole)?;
                    base.clause_vertices(clause)[slot]
                }
            };
            let paths = id_path_count(q, target);
            let vc = base.problem == Problem::VertexCover;
            let middle_choice = if vc { ExpectedChoice::Accept } else { ExpectedChoice::Reject };
            let end_choice = if vc { ExpectedChoice::Reject } else { ExpectedChoice::Accept };
            let mut middles = Vec::new();
            for _ in 0..paths {
                let middle = internal.len();
                internal.push((VertexRole::IdMiddle { of: target }, middle_choice));
                middles.push(middle);
                for _ in 0..2 {
                    let end = internal.len();
                    internal.push((VertexRole::IdLeaf { of: target, linked: false }, end_choice));
                    internal_edges.push((middle, end));
                }
                connecting.push((host, middle));
            }
            if vc {
                standalone_optimum = paths;
                standalone_witness = middles;
            } else {
                standalone_optimum = 2 * paths;
                standalone_witness = (0..internal.len()).filter(|idx| (idx % 3) != 0).collect();
            }
        }
        Problem::DominatingSet => {
            let IdTarget::Literal(lit) = target else {
                return Err(GadgetError::EmptyIdRole);
            };
            let host = base.literal_vertex(lit);
            let star_size = binom(2 * q.n() - 1, 2) + 4 * (q.n() + 1);
            let linked = id_linked_count(q, lit);
            internal.push((VertexRole::IdCenter { lit }, ExpectedChoice::Accept));
            for idx in 0..star_size {
                let leaf = internal.len();
                internal.push((
                    VertexRole::IdLeaf { of: target, linked: idx < linked },
                    ExpectedChoice::Reject,
                ));
                internal_edges.push((0, leaf));
                if idx < linked {
                    connecting.push((host, leaf));
                }
            }
            standalone_optimum = 1;
            standalone_witness = alloc::vec![0];
        }
    }

    let gadget = ExtensionGadget {
        kind: GadgetKind::Id(target),
        internal,
        internal_edges,
        connecting,
        standalone_optimum,
        standalone_witness,
    };
    if gadget.vertex_count() <= 40 {
        gadget.verify_standalone(base.problem)?;
    }
    Ok(gadget)
}

/// One grafted gadget inside an [`OnlineInstance`].
#[derive(Debug, Clone)]
pub struct GadgetRecord {
    pub kind: GadgetKind,
    pub standalone_optimum: usize,
    /// Global ids of the gadget's internal vertices.
    pub vertices: Vec<VertexId>,
    /// Connecting edges as (host vertex, gadget vertex), global ids.
    pub connecting: Vec<(VertexId, VertexId)>,
    /// One standalone optimal solution, global ids.
    pub standalone_witness: BTreeSet<VertexId>,
}

/// What a degree means to the online algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowAction {
    Accept,
    Reject,
    /// A literal vertex of a ∀-variable; the pair shares the degree.
    ForallLiteralPair { var: u32 },
    /// A uniquely identified literal vertex of an ∃-variable.
    ExactLiteral { lit: Literal },
    /// A clause member vertex representing the given literal.
    ClauseMemberOf { lit: Literal },
}

/// The degree-to-action table of one built instance.
#[derive(Debug, Clone, Default)]
pub struct DegreeTable {
    rows: BTreeMap<usize, RowAction>,
}

impl DegreeTable {
    pub fn lookup(&self, degree: usize) -> Option<RowAction> {
        self.rows.get(&degree).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, RowAction)> + '_ {
        self.rows.iter().map(|(&d, &a)| (d, a))
    }

    fn insert(&mut self, degree: usize, action: RowAction) {
        let previous = self.rows.insert(degree, action);
        debug_assert!(
            previous.is_none() || previous == Some(action),
            "degree {degree} maps to two different actions"
        );
    }
}

/// A fully extended online game instance.
#[derive(Debug, Clone)]
pub struct OnlineInstance {
    pub problem: Problem,
    pub graph: LabeledGraph,
    pub budget: usize,
    pub formula: QbfInstance,
    pub base_budget: usize,
    gadgets: Vec<GadgetRecord>,
    degree_table: DegreeTable,
    literal_vertices: BTreeMap<Literal, VertexId>,
    clause_vertices: Vec<Vec<VertexId>>,
    dr_centers: BTreeMap<u32, VertexId>,
}

impl OnlineInstance {
    pub fn gadgets(&self) -> &[GadgetRecord] {
        &self.gadgets
    }

    pub fn degree_table(&self) -> &DegreeTable {
        &self.degree_table
    }

    pub fn literal_vertex(&self, lit: Literal) -> VertexId {
        self.literal_vertices[&lit]
    }

    pub fn clause_vertices(&self, clause: usize) -> &[VertexId] {
        &self.clause_vertices[clause]
    }

    pub fn dr_center(&self, var: u32) -> Option<VertexId> {
        self.dr_centers.get(&var).copied()
    }

    /// All connecting edges of all gadgets (for rendering and audits).
    pub fn connecting_edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.gadgets
            .iter()
            .flat_map(|g| g.connecting.iter())
            .map(|&(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect()
    }

    pub fn fake_clause_count(&self) -> usize {
        self.gadgets.iter().filter(|g| matches!(g.kind, GadgetKind::FakeClause(_))).count()
    }
}

/// Assembles the full online instance: base reduction, then fake clauses,
/// then dependency reveal gadgets, then ID gadgets, with the budget computed
/// compositionally.
pub fn build_online_instance(
    q: &QbfInstance,
    problem: Problem,
) -> Result<OnlineInstance, GadgetError> {
    build_online_instance_inner(q, problem, None, None)
}

/// As [`build_online_instance`], but skips the one gadget named by `skip`.
/// Used to check that removing a gadget lowers the budget by exactly its
/// standalone optimum.
pub fn build_online_instance_without(
    q: &QbfInstance,
    problem: Problem,
    skip: &GadgetKind,
) -> Result<OnlineInstance, GadgetError> {
    build_online_instance_inner(q, problem, Some(skip), None)
}

/// As [`build_online_instance`] with an explicit fake clause insertion
/// order; the result must not depend on it (up to vertex naming).
pub fn build_online_instance_with_fake_order(
    q: &QbfInstance,
    problem: Problem,
    fake_order: &[FakeClause],
) -> Result<OnlineInstance, GadgetError> {
    build_online_instance_inner(q, problem, None, Some(fake_order))
}

fn build_online_instance_inner(
    q: &QbfInstance,
    problem: Problem,
    skip: Option<&GadgetKind>,
    fake_order: Option<&[FakeClause]>,
) -> Result<OnlineInstance, GadgetError> {
    if !q.is_normalized() {
        return Err(GadgetError::NotNormalized);
    }
    let base = reduce_3sat(problem, q)?;
    let mut graph = base.graph.clone();
    let mut gadgets: Vec<GadgetRecord> = Vec::new();

    let mut graft =
        |graph: &mut LabeledGraph, gadget: ExtensionGadget| -> Result<(), GadgetError> {
            if skip == Some(&gadget.kind) {
                return Ok(());
            }
            let (extended, ids) = extend(graph, &gadget)?;
            *graph = extended;
            gadgets.push(GadgetRecord {
                standalone_witness: gadget.standalone_witness.iter().map(|&l| ids[l]).collect(),
                connecting: gadget.connecting.iter().map(|&(host, l)| (host, ids[l])).collect(),
                vertices: ids,
                standalone_optimum: gadget.standalone_optimum,
                kind: gadget.kind,
            });
            Ok(())
        };

    // Step 1: fake clause gadgets for every missing clause.
    let real_sets: BTreeSet<BTreeSet<Literal>> =
        q.clauses().iter().map(|c| c.literal_set()).collect();
    let default_order: Vec<FakeClause>;
    let order: &[FakeClause] = match fake_order {
        Some(order) => order,
        None => {
            default_order = all_possible_clauses(q.n());
            &default_order
        }
    };
    for &candidate in order {
        if real_sets.contains(&candidate.iter().copied().collect()) {
            continue;
        }
        graft(&mut graph, build_fake_clause(&base, candidate)?)?;
    }

    // Step 2: dependency reveal gadgets for the ∀-variables.
    for var in q.variables() {
        if q.quantifier_of(var) == Quantifier::Forall {
            graft(&mut graph, build_dependency_reveal(&base, var)?)?;
        }
    }

    // Step 3: ID gadgets for all solution-dependent vertices. Everything
    // else is recognizable by degree and gets the empty gadget.
    for var in q.variables() {
        for lit in [Literal::positive(var), Literal::negative(var)] {
            graft(&mut graph, build_id_gadget(&base, IdTarget::Literal(lit))?)?;
        }
    }
    if problem != Problem::DominatingSet {
        for (j, clause) in q.clauses().iter().enumerate() {
            for &lit in clause.literals() {
                graft(
                    &mut graph,
                    build_id_gadget(&base, IdTarget::ClauseMember { clause: j, lit })?,
                )?;
            }
        }
    }

    let budget = base.k + gadgets.iter().map(|g| g.standalone_optimum).sum::<usize>();
    let literal_vertices: BTreeMap<Literal, VertexId> = q
        .variables()
        .flat_map(|v| [Literal::positive(v), Literal::negative(v)])
        .map(|lit| (lit, base.literal_vertex(lit)))
        .collect();
    let clause_vertices: Vec<Vec<VertexId>> =
        (0..q.m()).map(|j| base.clause_vertices(j).to_vec()).collect();
    let dr_centers: BTreeMap<u32, VertexId> = gadgets
        .iter()
        .filter_map(|g| match g.kind {
            GadgetKind::DependencyReveal { var } => Some((var, g.vertices[0])),
            _ => None,
        })
        .collect();

    let instance = OnlineInstance {
        degree_table: degree_table(q, problem),
        problem,
        graph,
        budget,
        formula: q.clone(),
        base_budget: base.k,
        gadgets,
        literal_vertices,
        clause_vertices,
        dr_centers,
    };
    debug_assert!(skip.is_some() || audit_degrees(&instance).mismatches.is_empty());
    Ok(instance)
}

/// Recomputes the budget from the base budget and the gadget records.
pub fn compute_budget(inst: &OnlineInstance) -> usize {
    inst.base_budget + inst.gadgets.iter().map(|g| g.standalone_optimum).sum::<usize>()
}

fn degree_table(q: &QbfInstance, problem: Problem) -> DegreeTable {
    let n = q.n();
    let b = binom(2 * n - 1, 2);
    let mut table = DegreeTable::default();
    match problem {
        Problem::VertexCover | Problem::IndependentSet => {
            let vc = problem == Problem::VertexCover;
            let accept = if vc { RowAction::Accept } else { RowAction::Reject };
            let reject = if vc { RowAction::Reject } else { RowAction::Accept };
            table.insert(1, reject);
            table.insert(3, accept);
            table.insert(5, accept);
            table.insert(3 * binom(2 * n, 3) + 2 * n + 1, accept);
        }
        Problem::DominatingSet => {
            table.insert(1, RowAction::Reject);
            table.insert(2, RowAction::Reject);
            table.insert(3, RowAction::Reject);
            table.insert(2 * n + 1, RowAction::Accept);
            table.insert(b + 4 * (n + 1), RowAction::Accept);
        }
    }
    for var in q.variables() {
        let i = var as usize;
        match q.quantifier_of(var) {
            Quantifier::Forall => {
                table.insert(b + 4 * i, RowAction::ForallLiteralPair { var });
            }
            Quantifier::Exists => {
                table.insert(b + 4 * i, RowAction::ExactLiteral { lit: Literal::positive(var) });
                table
                    .insert(b + 4 * i + 1, RowAction::ExactLiteral { lit: Literal::negative(var) });
            }
        }
        if problem != Problem::DominatingSet {
            let occurs = |lit: Literal| q.clauses().iter().any(|c| c.contains(lit));
            if occurs(Literal::positive(var)) {
                table.insert(
                    b + 4 * i + 2,
                    RowAction::ClauseMemberOf { lit: Literal::positive(var) },
                );
            }
            if occurs(Literal::negative(var)) {
                table.insert(
                    b + 4 * i + 3,
                    RowAction::ClauseMemberOf { lit: Literal::negative(var) },
                );
            }
        }
    }
    table
}

/// Closed-form expected degree of a vertex in the finished instance, from
/// its role alone.
pub fn expected_degree(q: &QbfInstance, problem: Problem, role: &VertexRole) -> usize {
    let n = q.n();
    let b = binom(2 * n - 1, 2);
    let ds = problem == Problem::DominatingSet;
    match *role {
        VertexRole::Literal { lit } => {
            let exists_negative = lit.polarity == Polarity::Negative
                && q.quantifier_of(lit.var) == Quantifier::Exists;
            b + 4 * lit.var as usize + usize::from(exists_negative)
        }
        VertexRole::VariableAux { .. } => 2,
        VertexRole::ClauseMember { lit: Some(lit), .. } => {
            b + 4 * lit.var as usize + 2 + usize::from(lit.polarity == Polarity::Negative)
        }
        VertexRole::ClauseMember { lit: None, .. } => 3,
        VertexRole::FakeMember { .. } => {
            if ds {
                2 * n + 1
            } else {
                5
            }
        }
        VertexRole::FakeLeaf { .. } | VertexRole::DrLeaf { .. } => 1,
        VertexRole::DrCenter { .. } => {
            if ds {
                2 * n + 1
            } else {
                3 * binom(2 * n, 3) + 2 * n + 1
            }
        }
        VertexRole::IdMiddle { .. } => 3,
        VertexRole::IdLeaf { linked, .. } => {
            if ds && linked {
                2
            } else {
                1
            }
        }
        VertexRole::IdCenter { .. } => b + 4 * (n + 1),
    }
}

#[derive(Debug, Clone)]
pub struct DegreeMismatch {
    pub vertex: VertexId,
    pub role: VertexRole,
    pub expected: usize,
    pub actual: usize,
}

/// Result of checking every vertex degree against the closed forms.
#[derive(Debug, Clone)]
pub struct DegreeAudit {
    pub mismatches: Vec<DegreeMismatch>,
    /// Degree -> vertices carrying it; exposes which roles share degrees.
    pub by_degree: BTreeMap<usize, Vec<VertexId>>,
}

/// Compares every vertex's actual degree against the closed-form expected
/// degree for its role.
pub fn audit_degrees(inst: &OnlineInstance) -> DegreeAudit {
    let mut mismatches = Vec::new();
    let mut by_degree: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for v in inst.graph.vertices() {
        let actual = inst.graph.degree(v).expect("vertex in range");
        let expected = expected_degree(&inst.formula, inst.problem, inst.graph.role(v));
        if expected != actual {
            mismatches.push(DegreeMismatch {
                vertex: v,
                role: *inst.graph.role(v),
                expected,
                actual,
            });
        }
        by_degree.entry(actual).or_default().push(v);
    }
    DegreeAudit { mismatches, by_degree }
}

/// Options for the self-containment check.
#[derive(Debug, Clone, Copy)]
pub struct SelfContainmentOptions {
    /// Enumerate all `2^b` boundary forcings up to this boundary size.
    pub max_exhaustive_boundary: usize,
    /// Number of seeded random forcings beyond that.
    pub samples: usize,
    pub seed: u64,
    pub solve: SolveOptions,
}

impl Default for SelfContainmentOptions {
    fn default() -> Self {
        SelfContainmentOptions {
            max_exhaustive_boundary: 12,
            samples: 128,
            seed: 0x5e1f,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContainmentViolation {
    /// The boundary vertices forced in (the rest of the boundary was out),
    /// or `None` for the all-free probe.
    pub forced_in: Option<BTreeSet<VertexId>>,
    pub expected: usize,
    pub actual: Option<usize>,
}

/// Report of [`check_self_contained`].
#[derive(Debug, Clone)]
pub struct ContainmentReport {
    pub gadget: GadgetKind,
    pub forcings_checked: usize,
    pub violations: Vec<ContainmentViolation>,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks self-containment: under every forcing of the boundary vertices
/// (each forced in or out, plus the unconstrained probe), the optimum on
/// gadget plus boundary, restricted to gadget vertices, must equal the
/// standalone optimum. Boundaries larger than the exhaustive cap are sampled.
pub fn check_self_contained(
    problem: Problem,
    gadget: &ExtensionGadget,
    opts: SelfContainmentOptions,
) -> Result<ContainmentReport, GadgetError> {
    // Combined graph: gadget internals first, then one stub per boundary
    // vertex, then the connecting edges.
    let mut combined = gadget.standalone_graph();
    let boundary: Vec<VertexId> = gadget.boundary().into_iter().collect();
    let mut stub_of: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for &host in &boundary {
        let stub = combined.add_vertex(VertexRole::DrLeaf { var: 0 }, ExpectedChoice::Reject);
        stub_of.insert(host, stub);
    }
    for &(host, local) in &gadget.connecting {
        combined.add_edge(stub_of[&host], VertexId(local as u32))?;
    }
    let gadget_vertices: BTreeSet<VertexId> =
        (0..gadget.vertex_count() as u32).map(VertexId).collect();
    let internal_targets: Option<BTreeSet<VertexId>> =
        if problem == Problem::DominatingSet { Some(gadget_vertices.clone()) } else { None };

    let mut report = ContainmentReport {
        gadget: gadget.kind.clone(),
        forcings_checked: 0,
        violations: Vec::new(),
    };

    let mut probe = |forced_in_mask: Option<u64>| -> Result<(), GadgetError> {
        let mut constraints = Constraints { dominate_only: internal_targets.clone(), ..Default::default() };
        if let Some(mask) = forced_in_mask {
            for (idx, &host) in boundary.iter().enumerate() {
                let stub = stub_of[&host];
                if mask & (1 << idx) != 0 {
                    constraints.forced_in.insert(stub);
                } else {
                    constraints.forced_out.insert(stub);
                }
            }
        }
        report.forcings_checked += 1;
        let outcome = solve_constrained(problem, &combined, &constraints, opts.solve);
        let restricted = match outcome {
            Ok(opt) => Some(opt.witness.intersection(&gadget_vertices).count()),
            Err(OfflineError::Infeasible) => None,
            Err(e) => return Err(e.into()),
        };
        if restricted != Some(gadget.standalone_optimum) {
            report.violations.push(ContainmentViolation {
                forced_in: forced_in_mask.map(|mask| {
                    boundary
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| mask & (1 << idx) != 0)
                        .map(|(_, &host)| host)
                        .collect()
                }),
                expected: gadget.standalone_optimum,
                actual: restricted,
            });
        }
        Ok(())
    };

    probe(None)?; // boundary unconstrained
    if boundary.len() <= opts.max_exhaustive_boundary {
        for mask in 0..(1u64 << boundary.len()) {
            probe(Some(mask))?;
        }
    } else {
        let full = (1u64 << boundary.len().min(63)) - 1;
        probe(Some(0))?;
        probe(Some(full))?;
        let mut rng = SplitMix64::new(opts.seed);
        for _ in 0..opts.samples {
            probe(Some(rng.next_u64() & full))?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_qbf;

    fn running() -> QbfInstance {
        parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap()
    }

    /// The two-clause formula from the dominating set walkthrough.
    fn ds_formula() -> QbfInstance {
        parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap()
    }

    /// (x1 | ~x1 | ~x2), which is missing from the running instance.
    fn missing_clause() -> FakeClause {
        [Literal::positive(1), Literal::negative(1), Literal::negative(2)]
    }

    #[test]
    fn extend_k2_with_pendant_gives_p3() {
        let mut host = LabeledGraph::new();
        let a = host.add_vertex(VertexRole::VariableAux { var: 1 }, ExpectedChoice::Reject);
        let b = host.add_vertex(VertexRole::VariableAux { var: 2 }, ExpectedChoice::Reject);
        host.add_edge(a, b).unwrap();
        let pendant = ExtensionGadget {
            kind: GadgetKind::DependencyReveal { var: 9 },
            internal: alloc::vec![(VertexRole::DrLeaf { var: 9 }, ExpectedChoice::Reject)],
            internal_edges: alloc::vec![],
            connecting: alloc::vec![(a, 0)],
            standalone_optimum: 0,
            standalone_witness: alloc::vec![],
        };
        let (extended, ids) = extend(&host, &pendant).unwrap();
        assert_eq!(extended.len(), 3);
        assert_eq!(extended.edge_count(), 2);
        assert_eq!(extended.degree(a), Ok(2));
        assert_eq!(extended.degree(ids[0]), Ok(1));
    }

    #[test]
    fn vc_fake_clause_shape_and_optimum() {
        let base = reduce_3sat(Problem::VertexCover, &running()).unwrap();
        let gadget = build_fake_clause(&base, missing_clause()).unwrap();
        assert_eq!(gadget.vertex_count(), 9);
        assert_eq!(gadget.internal_edges.len(), 9);
        assert_eq!(gadget.connecting.len(), 3);
        assert_eq!(gadget.standalone_optimum, 3);
    }

    #[test]
    fn is_fake_clause_optimum_is_the_pendants() {
        let base = reduce_3sat(Problem::IndependentSet, &running()).unwrap();
        let gadget = build_fake_clause(&base, missing_clause()).unwrap();
        assert_eq!(gadget.standalone_optimum, 6);
    }

    #[test]
    fn ds_fake_clause_is_a_small_star() {
        let base = reduce_3sat(Problem::DominatingSet, &ds_formula()).unwrap();
        let fake = [Literal::negative(1), Literal::positive(2), Literal::negative(2)];
        let gadget = build_fake_clause(&base, fake).unwrap();
        // Center plus 2n - 2 = 2 leaves; after attachment the center reaches
        // degree 2 + 3 = 2n + 1 = 5.
        assert_eq!(gadget.vertex_count(), 3);
        assert_eq!(gadget.connecting.len(), 3);
        assert_eq!(gadget.standalone_optimum, 1);
    }

    #[test]
    fn fake_clause_must_not_be_real() {
        let base = reduce_3sat(Problem::VertexCover, &running()).unwrap();
        let real = [Literal::positive(1), Literal::negative(1), Literal::positive(2)];
        assert!(matches!(build_fake_clause(&base, real), Err(GadgetError::FakeClauseIsReal)));
    }

    #[test]
    fn vc_dependency_reveal_center_degree() {
        let base = reduce_3sat(Problem::VertexCover, &running()).unwrap();
        let gadget = build_dependency_reveal(&base, 1).unwrap();
        // Targets: ~x1, x2, ~x2 plus the three real clause members; leaves
        // pad the center to 3*C(4,3) + 5 = 17.
        assert_eq!(gadget.connecting.len(), 6);
        assert_eq!(gadget.vertex_count(), 1 + (17 - 6));
        assert_eq!(gadget.standalone_optimum, 1);
        assert!(matches!(
            build_dependency_reveal(&base, 2),
            Err(GadgetError::NotForall { var: 2 })
        ));
    }

    #[test]
    fn ds_dependency_reveal_center_degree() {
        let base = reduce_3sat(Problem::DominatingSet, &ds_formula()).unwrap();
        let gadget = build_dependency_reveal(&base, 1).unwrap();
        // Three literal targets, 2n + 1 = 5 total degree, so two leaves.
        assert_eq!(gadget.connecting.len(), 3);
        assert_eq!(gadget.vertex_count(), 3);
        assert_eq!(gadget.standalone_optimum, 1);
    }

    #[test]
    fn vc_literal_id_path_counts() {
        let q = running();
        let counts: Vec<usize> = [
            Literal::positive(1),
            Literal::negative(1),
            Literal::positive(2),
            Literal::negative(2),
        ]
        .into_iter()
        .map(|lit| id_path_count(&q, IdTarget::Literal(lit)))
        .collect();
        assert_eq!(counts, alloc::vec![3, 2, 6, 7]);
    }

    #[test]
    fn vc_clause_id_path_counts() {
        let q = running();
        let counts: Vec<usize> = q.clauses()[0]
            .literals()
            .iter()
            .map(|&lit| id_path_count(&q, IdTarget::ClauseMember { clause: 0, lit }))
            .collect();
        assert_eq!(counts, alloc::vec![5, 6, 9]);
    }

    #[test]
    fn ds_literal_id_star_size() {
        let q = ds_formula();
        let base = reduce_3sat(Problem::DominatingSet, &q).unwrap();
        let gadget = build_id_gadget(&base, IdTarget::Literal(Literal::positive(1))).unwrap();
        // C(3,2) + 4*3 = 15 leaves plus the center.
        assert_eq!(gadget.vertex_count(), 16);
        assert_eq!(gadget.connecting.len(), 2);
        assert_eq!(gadget.standalone_optimum, 1);
        // Clause vertices are recognizable by degree: empty ID gadget.
        assert!(matches!(
            build_id_gadget(
                &base,
                IdTarget::ClauseMember { clause: 0, lit: Literal::positive(1) }
            ),
            Err(GadgetError::EmptyIdRole)
        ));
    }

    #[test]
    fn running_vc_instance_assembles() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        assert_eq!(inst.fake_clause_count(), 3); // C(4,3) - 1
        // Both literals of the ∀-variable x1 end at degree C(3,2) + 4 = 7.
        assert_eq!(inst.graph.degree(inst.literal_vertex(Literal::positive(1))), Ok(7));
        assert_eq!(inst.graph.degree(inst.literal_vertex(Literal::negative(1))), Ok(7));
        // Budget: 4 + 3*3 + 1 + (3+2+6+7) + (5+6+9) = 52.
        assert_eq!(inst.budget, 52);
        assert_eq!(compute_budget(&inst), 52);
        assert!(audit_degrees(&inst).mismatches.is_empty());
    }

    #[test]
    fn ds_paper_instance_assembles() {
        let inst = build_online_instance(&ds_formula(), Problem::DominatingSet).unwrap();
        assert_eq!(inst.fake_clause_count(), 2);
        for j in 0..2 {
            assert_eq!(inst.graph.degree(inst.clause_vertices(j)[0]), Ok(3));
        }
        // Budget: 2 (base) + 2 (fakes) + 1 (dr) + 4 (literal ID centers) = 9.
        assert_eq!(inst.budget, 9);
        assert!(audit_degrees(&inst).mismatches.is_empty());
    }

    #[test]
    fn removing_a_gadget_drops_budget_by_its_optimum() {
        let q = running();
        let inst = build_online_instance(&q, Problem::VertexCover).unwrap();
        for record in inst.gadgets() {
            let without =
                build_online_instance_without(&q, Problem::VertexCover, &record.kind).unwrap();
            assert_eq!(inst.budget - without.budget, record.standalone_optimum, "{}", record.kind);
            assert_eq!(inst.graph.len() - without.graph.len(), record.vertices.len());
        }
    }

    #[test]
    fn corrupting_an_edge_flags_exactly_its_endpoints() {
        let inst = build_online_instance(&running(), Problem::VertexCover).unwrap();
        // Rebuild the graph with one edge dropped.
        let (u, v) = inst.graph.edges().next().unwrap();
        let mut corrupted = LabeledGraph::new();
        for w in inst.graph.vertices() {
            corrupted.add_vertex(*inst.graph.role(w), inst.graph.choice(w));
        }
        for (a, b) in inst.graph.edges() {
            if (a, b) != (u, v) {
                corrupted.add_edge(a, b).unwrap();
            }
        }
        let mut broken = inst.clone();
        broken.graph = corrupted;
        let audit = audit_degrees(&broken);
        let flagged: BTreeSet<VertexId> = audit.mismatches.iter().map(|m| m.vertex).collect();
        assert_eq!(flagged, [u, v].into_iter().collect());
    }

    #[test]
    fn vc_fake_clause_is_self_contained_under_all_forcings() {
        let base = reduce_3sat(Problem::VertexCover, &running()).unwrap();
        let gadget = build_fake_clause(&base, missing_clause()).unwrap();
        let report =
            check_self_contained(Problem::VertexCover, &gadget, SelfContainmentOptions::default())
                .unwrap();
        assert!(report.passed());
        assert_eq!(report.forcings_checked, 1 + 8); // free probe + 2^3 forcings
    }

    #[test]
    fn ds_dependency_reveal_is_self_contained() {
        let base = reduce_3sat(Problem::DominatingSet, &ds_formula()).unwrap();
        let gadget = build_dependency_reveal(&base, 1).unwrap();
        let report = check_self_contained(
            Problem::DominatingSet,
            &gadget,
            SelfContainmentOptions::default(),
        )
        .unwrap();
        assert!(report.passed());
    }

    #[test]
    fn broken_gadget_fails_the_containment_check() {
        // A dominating set "extension" that the host can fully dominate: a
        // path of three vertices all attached to the boundary, the shape of
        // the non-self-contained example.
        let mut host = LabeledGraph::new();
        let b1 = host.add_vertex(VertexRole::VariableAux { var: 1 }, ExpectedChoice::Reject);
        let b2 = host.add_vertex(VertexRole::VariableAux { var: 2 }, ExpectedChoice::Reject);
        let gadget = ExtensionGadget {
            kind: GadgetKind::DependencyReveal { var: 1 },
            internal: alloc::vec![
                (VertexRole::DrLeaf { var: 1 }, ExpectedChoice::Reject),
                (VertexRole::DrCenter { var: 1 }, ExpectedChoice::Accept),
                (VertexRole::DrLeaf { var: 1 }, ExpectedChoice::Reject),
            ],
            internal_edges: alloc::vec![(0, 1), (1, 2)],
            connecting: alloc::vec![(b1, 0), (b1, 1), (b2, 1), (b2, 2)],
            standalone_optimum: 1,
            standalone_witness: alloc::vec![1],
        };
        let report = check_self_contained(
            Problem::DominatingSet,
            &gadget,
            SelfContainmentOptions::default(),
        )
        .unwrap();
        assert!(!report.passed());
        // The all-in forcing dominates the whole path from outside.
        assert!(report.violations.iter().any(|v| v.actual == Some(0)));
    }
}
