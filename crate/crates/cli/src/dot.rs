//! DOT export. Gadget connecting edges are drawn dashed; base vertices keep
//! their literal or clause labels, extension gadget vertices are dimmed.

use ovsg_core::gadgets::OnlineInstance;
use ovsg_core::graph::{LabeledGraph, VertexId, VertexRole};
use ovsg_core::offline::OfflineReduction;
use std::collections::BTreeSet;
use std::fmt::Write as _;

fn label(role: &VertexRole) -> String {
    match *role {
        VertexRole::Literal { lit } => format!("{lit}"),
        VertexRole::VariableAux { var } => format!("aux x{var}"),
        VertexRole::ClauseMember { clause, lit } => match lit {
            Some(lit) => format!("C{clause}:{lit}"),
            None => format!("C{clause}"),
        },
        VertexRole::FakeMember { lit: Some(lit), .. } => format!("fc:{lit}"),
        VertexRole::FakeMember { lit: None, .. } => "fc".into(),
        VertexRole::FakeLeaf { .. } => String::new(),
        VertexRole::DrCenter { var } => format!("dr x{var}"),
        VertexRole::DrLeaf { .. } => String::new(),
        VertexRole::IdMiddle { .. } | VertexRole::IdLeaf { .. } => String::new(),
        VertexRole::IdCenter { lit } => format!("id {lit}"),
    }
}

fn is_extension(role: &VertexRole) -> bool {
    !matches!(
        role,
        VertexRole::Literal { .. } | VertexRole::VariableAux { .. } | VertexRole::ClauseMember { .. }
    )
}

fn render(g: &LabeledGraph, connecting: &BTreeSet<(VertexId, VertexId)>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph instance {{");
    let _ = writeln!(out, "  node [shape=circle fontsize=9 width=0.25 fixedsize=false];");
    for v in g.vertices() {
        let role = g.role(v);
        let text = label(role);
        let extras = if is_extension(role) { " color=gray50 fontcolor=gray30" } else { "" };
        let _ = writeln!(out, "  v{} [label=\"{}\"{}];", v.0, text, extras);
    }
    for (u, v) in g.edges() {
        let style = if connecting.contains(&(u, v)) { " [style=dashed]" } else { "" };
        let _ = writeln!(out, "  v{} -- v{}{};", u.0, v.0, style);
    }
    let _ = writeln!(out, "}}");
    out
}

pub fn online_to_dot(inst: &OnlineInstance) -> String {
    render(&inst.graph, &inst.connecting_edges())
}

pub fn offline_to_dot(red: &OfflineReduction) -> String {
    render(&red.graph, &BTreeSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ovsg_core::formula::parse_qbf;
    use ovsg_core::gadgets::build_online_instance;
    use ovsg_core::offline::Problem;

    #[test]
    fn dashed_edges_mark_the_connections() {
        let q = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").unwrap();
        let inst = build_online_instance(&q, Problem::VertexCover).unwrap();
        let dot = online_to_dot(&inst);
        assert!(dot.starts_with("graph instance {"));
        let dashed = dot.lines().filter(|l| l.contains("style=dashed")).count();
        assert_eq!(dashed, inst.connecting_edges().len());
    }
}
