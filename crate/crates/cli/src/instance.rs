//! The structured-text instance format.
//!
//! ```text
//! ovsg-instance v1
//! kind online
//! problem vc
//! budget 52
//! quantifiers a e
//! clause 1 -1 2
//! vertex 0 formula literal 1
//! vertex 7 accept fake-member 1 -1 -2 1
//! edge 0 1
//! conn 4 0
//! ```
//!
//! Literals use the signed DIMACS encoding. `edge` lines are gadget-internal
//! or base edges, `conn` lines are gadget connecting edges. A loaded file is
//! validated by rebuilding the instance from its embedded formula: the
//! builder is deterministic, so every role, edge, and the budget must come
//! back identical.
//!
//! A second, minimal format carries bare graphs for the exact game solver:
//!
//! ```text
//! ovsg-graph v1
//! vertices 4
//! edge 0 1
//! ```

use crate::FormatError;
use ovsg_core::formula::{Clause, Literal, QbfInstance, Quantifier};
use ovsg_core::gadgets::{build_online_instance, OnlineInstance};
use ovsg_core::graph::{ExpectedChoice, IdTarget, LabeledGraph, VertexId, VertexRole};
use ovsg_core::offline::{reduce_3sat, OfflineReduction, Problem};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub const INSTANCE_HEADER: &str = "ovsg-instance v1";
pub const GRAPH_HEADER: &str = "ovsg-graph v1";

#[derive(Debug)]
pub enum LoadedInstance {
    Online(OnlineInstance),
    Offline(OfflineReduction),
}

impl LoadedInstance {
    pub fn problem(&self) -> Problem {
        match self {
            LoadedInstance::Online(inst) => inst.problem,
            LoadedInstance::Offline(red) => red.problem,
        }
    }

    pub fn budget(&self) -> usize {
        match self {
            LoadedInstance::Online(inst) => inst.budget,
            LoadedInstance::Offline(red) => red.k,
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        match self {
            LoadedInstance::Online(inst) => &inst.graph,
            LoadedInstance::Offline(red) => &red.graph,
        }
    }

    pub fn formula(&self) -> &QbfInstance {
        match self {
            LoadedInstance::Online(inst) => &inst.formula,
            LoadedInstance::Offline(red) => &red.source,
        }
    }
}

fn choice_text(choice: ExpectedChoice) -> &'static str {
    match choice {
        ExpectedChoice::Accept => "accept",
        ExpectedChoice::Reject => "reject",
        ExpectedChoice::FormulaDependent => "formula",
    }
}

fn lit_text(lit: Literal) -> String {
    lit.to_dimacs().to_string()
}

fn target_text(target: IdTarget) -> String {
    match target {
        IdTarget::Literal(lit) => format!("lit {}", lit_text(lit)),
        IdTarget::ClauseMember { clause, lit } => format!("member {clause} {}", lit_text(lit)),
    }
}

fn role_text(role: &VertexRole) -> String {
    match *role {
        VertexRole::Literal { lit } => format!("literal {}", lit_text(lit)),
        VertexRole::VariableAux { var } => format!("aux {var}"),
        VertexRole::ClauseMember { clause, lit } => match lit {
            Some(lit) => format!("member {clause} {}", lit_text(lit)),
            None => format!("member {clause} none"),
        },
        VertexRole::FakeMember { fake, lit } => {
            let lits: Vec<String> = fake.iter().map(|&l| lit_text(l)).collect();
            match lit {
                Some(lit) => format!("fake-member {} {}", lits.join(" "), lit_text(lit)),
                None => format!("fake-member {} none", lits.join(" ")),
            }
        }
        VertexRole::FakeLeaf { fake } => {
            let lits: Vec<String> = fake.iter().map(|&l| lit_text(l)).collect();
            format!("fake-leaf {}", lits.join(" "))
        }
        VertexRole::DrCenter { var } => format!("dr-center {var}"),
        VertexRole::DrLeaf { var } => format!("dr-leaf {var}"),
        VertexRole::IdMiddle { of } => format!("id-middle {}", target_text(of)),
        VertexRole::IdLeaf { of, linked } => {
            format!("id-leaf {} {}", target_text(of), u8::from(linked))
        }
        VertexRole::IdCenter { lit } => format!("id-center {}", lit_text(lit)),
    }
}

fn write_common(out: &mut String, problem: Problem, budget: usize, q: &QbfInstance) {
    let _ = writeln!(out, "problem {}", problem.short_name());
    let _ = writeln!(out, "budget {budget}");
    let quantifiers: Vec<&str> = q
        .quantifiers()
        .iter()
        .map(|quant| if *quant == Quantifier::Forall { "a" } else { "e" })
        .collect();
    let _ = writeln!(out, "quantifiers {}", quantifiers.join(" "));
    for clause in q.clauses() {
        let lits: Vec<String> = clause.literals().iter().map(|&l| lit_text(l)).collect();
        let _ = writeln!(out, "clause {}", lits.join(" "));
    }
}

fn write_graph_body(out: &mut String, graph: &LabeledGraph, connecting: &BTreeSet<(VertexId, VertexId)>) {
    for v in graph.vertices() {
        let _ = writeln!(
            out,
            "vertex {} {} {}",
            v.0,
            choice_text(graph.choice(v)),
            role_text(graph.role(v))
        );
    }
    for (u, v) in graph.edges() {
        let tag = if connecting.contains(&(u, v)) { "conn" } else { "edge" };
        let _ = writeln!(out, "{tag} {} {}", u.0, v.0);
    }
}

/// Serializes a fully extended online instance.
pub fn write_online(inst: &OnlineInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{INSTANCE_HEADER}");
    let _ = writeln!(out, "kind online");
    write_common(&mut out, inst.problem, inst.budget, &inst.formula);
    write_graph_body(&mut out, &inst.graph, &inst.connecting_edges());
    out
}

/// Serializes a base (offline) reduction.
pub fn write_offline(red: &OfflineReduction) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{INSTANCE_HEADER}");
    let _ = writeln!(out, "kind offline");
    write_common(&mut out, red.problem, red.k, &red.source);
    write_graph_body(&mut out, &red.graph, &BTreeSet::new());
    out
}

struct Tokens<'a> {
    line: usize,
    parts: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str, FormatError> {
        self.parts.next().ok_or_else(|| FormatError::at(self.line, "missing token"))
    }

    fn next_usize(&mut self) -> Result<usize, FormatError> {
        let token = self.next()?;
        token.parse().map_err(|_| FormatError::at(self.line, format!("bad number {token}")))
    }

    fn next_u32(&mut self) -> Result<u32, FormatError> {
        Ok(self.next_usize()? as u32)
    }

    fn next_literal(&mut self) -> Result<Literal, FormatError> {
        let token = self.next()?;
        let code: i64 =
            token.parse().map_err(|_| FormatError::at(self.line, format!("bad literal {token}")))?;
        Literal::from_dimacs(code)
            .ok_or_else(|| FormatError::at(self.line, format!("bad literal {token}")))
    }

    fn next_optional_literal(&mut self) -> Result<Option<Literal>, FormatError> {
        let token = self.next()?;
        if token == "none" {
            return Ok(None);
        }
        let code: i64 =
            token.parse().map_err(|_| FormatError::at(self.line, format!("bad literal {token}")))?;
        Literal::from_dimacs(code)
            .map(Some)
            .ok_or_else(|| FormatError::at(self.line, format!("bad literal {token}")))
    }

    fn finish(mut self) -> Result<(), FormatError> {
        match self.parts.next() {
            Some(extra) => Err(FormatError::at(self.line, format!("unexpected token {extra}"))),
            None => Ok(()),
        }
    }
}

fn parse_target(tokens: &mut Tokens) -> Result<IdTarget, FormatError> {
    match tokens.next()? {
        "lit" => Ok(IdTarget::Literal(tokens.next_literal()?)),
        "member" => {
            let clause = tokens.next_usize()?;
            let lit = tokens.next_literal()?;
            Ok(IdTarget::ClauseMember { clause, lit })
        }
        other => Err(FormatError::at(tokens.line, format!("bad ID target {other}"))),
    }
}

fn parse_role(tokens: &mut Tokens) -> Result<VertexRole, FormatError> {
    let fake = |tokens: &mut Tokens| -> Result<[Literal; 3], FormatError> {
        Ok([tokens.next_literal()?, tokens.next_literal()?, tokens.next_literal()?])
    };
    match tokens.next()? {
        "literal" => Ok(VertexRole::Literal { lit: tokens.next_literal()? }),
        "aux" => Ok(VertexRole::VariableAux { var: tokens.next_u32()? }),
        "member" => {
            let clause = tokens.next_usize()?;
            let lit = tokens.next_optional_literal()?;
            Ok(VertexRole::ClauseMember { clause, lit })
        }
        "fake-member" => {
            let fake = fake(tokens)?;
            let lit = tokens.next_optional_literal()?;
            Ok(VertexRole::FakeMember { fake, lit })
        }
        "fake-leaf" => Ok(VertexRole::FakeLeaf { fake: fake(tokens)? }),
        "dr-center" => Ok(VertexRole::DrCenter { var: tokens.next_u32()? }),
        "dr-leaf" => Ok(VertexRole::DrLeaf { var: tokens.next_u32()? }),
        "id-middle" => Ok(VertexRole::IdMiddle { of: parse_target(tokens)? }),
        "id-leaf" => {
            let of = parse_target(tokens)?;
            let linked = tokens.next_usize()? != 0;
            Ok(VertexRole::IdLeaf { of, linked })
        }
        "id-center" => Ok(VertexRole::IdCenter { lit: tokens.next_literal()? }),
        other => Err(FormatError::at(tokens.line, format!("unknown role {other}"))),
    }
}

/// Parses an instance file and validates it by rebuilding from the embedded
/// formula: the construction is deterministic, so the stored graph must come
/// back bit for bit.
pub fn parse_instance(text: &str) -> Result<LoadedInstance, FormatError> {
    let mut lines = text.lines().enumerate().map(|(idx, line)| (idx + 1, line.trim()));
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::new("empty file"));
    };
    if header != INSTANCE_HEADER {
        return Err(FormatError::at(1, format!("expected header `{INSTANCE_HEADER}`")));
    }

    let mut kind: Option<bool> = None; // true = online
    let mut problem: Option<Problem> = None;
    let mut budget: Option<usize> = None;
    let mut quantifiers: Vec<Quantifier> = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut roles: Vec<(usize, ExpectedChoice, VertexRole)> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();

    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Tokens { line: lineno, parts: line.split_whitespace() };
        match tokens.next()? {
            "kind" => {
                kind = Some(match tokens.next()? {
                    "online" => true,
                    "offline" => false,
                    other => {
                        return Err(FormatError::at(lineno, format!("unknown kind {other}")));
                    }
                });
            }
            "problem" => {
                let name = tokens.next()?;
                problem = Some(Problem::from_short_name(name).ok_or_else(|| {
                    FormatError::at(lineno, format!("unknown problem {name}"))
                })?);
            }
            "budget" => budget = Some(tokens.next_usize()?),
            "quantifiers" => {
                for token in tokens.parts.by_ref() {
                    quantifiers.push(match token {
                        "a" => Quantifier::Forall,
                        "e" => Quantifier::Exists,
                        other => {
                            return Err(FormatError::at(
                                lineno,
                                format!("bad quantifier {other}"),
                            ));
                        }
                    });
                }
                continue;
            }
            "clause" => {
                let mut lits = Vec::new();
                while let Some(token) = tokens.parts.next() {
                    let code: i64 = token.parse().map_err(|_| {
                        FormatError::at(lineno, format!("bad literal {token}"))
                    })?;
                    lits.push(Literal::from_dimacs(code).ok_or_else(|| {
                        FormatError::at(lineno, format!("bad literal {token}"))
                    })?);
                }
                clauses.push(
                    Clause::new(lits)
                        .ok_or_else(|| FormatError::at(lineno, "empty clause"))?,
                );
                continue;
            }
            "vertex" => {
                let id = tokens.next_usize()?;
                let choice = match tokens.next()? {
                    "accept" => ExpectedChoice::Accept,
                    "reject" => ExpectedChoice::Reject,
                    "formula" => ExpectedChoice::FormulaDependent,
                    other => {
                        return Err(FormatError::at(lineno, format!("bad strategy {other}")));
                    }
                };
                let role = parse_role(&mut tokens)?;
                tokens.finish()?;
                roles.push((id, choice, role));
                continue;
            }
            "edge" | "conn" => {
                let u = tokens.next_u32()?;
                let v = tokens.next_u32()?;
                tokens.finish()?;
                edges.push((u, v));
                continue;
            }
            other => return Err(FormatError::at(lineno, format!("unknown directive {other}"))),
        }
        tokens.finish()?;
    }

    let online = kind.ok_or_else(|| FormatError::new("missing kind"))?;
    let problem = problem.ok_or_else(|| FormatError::new("missing problem"))?;
    let budget = budget.ok_or_else(|| FormatError::new("missing budget"))?;
    let formula = QbfInstance::new(quantifiers, clauses)
        .map_err(|e| FormatError::new(format!("bad formula: {e}")))?;

    // Rebuild and compare.
    let loaded = if online {
        LoadedInstance::Online(
            build_online_instance(&formula, problem)
                .map_err(|e| FormatError::new(format!("cannot rebuild instance: {e}")))?,
        )
    } else {
        LoadedInstance::Offline(
            reduce_3sat(problem, &formula)
                .map_err(|e| FormatError::new(format!("cannot rebuild instance: {e}")))?,
        )
    };
    let rebuilt_graph = loaded.graph();
    let rebuilt_budget = loaded.budget();

    if budget != rebuilt_budget {
        return Err(FormatError::new(format!(
            "budget {budget} does not match the formula's instance ({rebuilt_budget})"
        )));
    }
    if roles.len() != rebuilt_graph.len() {
        return Err(FormatError::new(format!(
            "vertex count {} does not match the formula's instance ({})",
            roles.len(),
            rebuilt_graph.len()
        )));
    }
    for (id, choice, role) in &roles {
        let v = VertexId(*id as u32);
        if !rebuilt_graph.contains(v)
            || rebuilt_graph.role(v) != role
            || rebuilt_graph.choice(v) != *choice
        {
            return Err(FormatError::new(format!("vertex {id} does not match its rebuilt role")));
        }
    }
    let mut stored_edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for (u, v) in edges {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        stored_edges.insert((VertexId(u), VertexId(v)));
    }
    let rebuilt_edges: BTreeSet<(VertexId, VertexId)> = rebuilt_graph.edges().collect();
    if stored_edges != rebuilt_edges {
        return Err(FormatError::new("edge set does not match the rebuilt instance"));
    }
    Ok(loaded)
}

/// Serializes a bare graph for the game solver.
pub fn write_graph(graph: &LabeledGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{GRAPH_HEADER}");
    let _ = writeln!(out, "vertices {}", graph.len());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "edge {} {}", u.0, v.0);
    }
    out
}

/// Parses a bare graph file; vertices get a neutral role.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, FormatError> {
    let mut lines = text.lines().enumerate().map(|(idx, line)| (idx + 1, line.trim()));
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::new("empty file"));
    };
    if header != GRAPH_HEADER {
        return Err(FormatError::at(1, format!("expected header `{GRAPH_HEADER}`")));
    }
    let mut graph = LabeledGraph::new();
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Tokens { line: lineno, parts: line.split_whitespace() };
        match tokens.next()? {
            "vertices" => {
                let count = tokens.next_usize()?;
                for _ in 0..count {
                    graph.add_vertex(VertexRole::VariableAux { var: 0 }, ExpectedChoice::Reject);
                }
            }
            "edge" => {
                let u = VertexId(tokens.next_u32()?);
                let v = VertexId(tokens.next_u32()?);
                graph
                    .add_edge(u, v)
                    .map_err(|e| FormatError::at(lineno, format!("{e}")))?;
            }
            other => return Err(FormatError::at(lineno, format!("unknown directive {other}"))),
        }
        tokens.finish()?;
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ovsg_core::formula::parse_qbf;

    fn running_online() -> OnlineInstance {
        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        build_online_instance(&q, Problem::VertexCover).unwrap()
    }

    #[test]
    fn online_instance_round_trips() {
        let inst = running_online();
        let text = write_online(&inst);
        let loaded = parse_instance(&text).unwrap();
        let LoadedInstance::Online(back) = loaded else { panic!("expected online") };
        assert_eq!(back.budget, inst.budget);
        assert_eq!(back.graph, inst.graph);
        assert_eq!(back.formula, inst.formula);
    }

    #[test]
    fn offline_instance_round_trips() {
        let q = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").unwrap();
        let red = reduce_3sat(Problem::DominatingSet, &q).unwrap();
        let text = write_offline(&red);
        let loaded = parse_instance(&text).unwrap();
        assert_eq!(loaded.budget(), 2);
        assert!(matches!(loaded, LoadedInstance::Offline(_)));
    }

    #[test]
    fn tampered_instance_is_rejected() {
        let inst = running_online();
        let text = write_online(&inst);
        // Drop one edge line.
        let tampered: Vec<&str> = text.lines().filter(|l| *l != "edge 0 1").collect();
        let err = parse_instance(&tampered.join("\n")).unwrap_err();
        assert!(err.message.contains("edge set"));
        // Lie about the budget.
        let lied = text.replace("budget 52", "budget 51");
        assert!(parse_instance(&lied).is_err());
    }

    #[test]
    fn graph_file_round_trips() {
        let mut g = LabeledGraph::new();
        for _ in 0..3 {
            g.add_vertex(VertexRole::VariableAux { var: 0 }, ExpectedChoice::Reject);
        }
        g.add_edge(VertexId(0), VertexId(1)).unwrap();
        g.add_edge(VertexId(1), VertexId(2)).unwrap();
        let text = write_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.edge_count(), 2);
        assert!(back.has_edge(VertexId(0), VertexId(1)));
    }
}
