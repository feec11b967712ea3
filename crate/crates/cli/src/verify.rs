//! Verification suites behind `ovsg verify`: machine-checkable consequences
//! of the construction, grouped into degree audits, gadget self-containment,
//! the formula-game correspondence, and the solver-versus-oracle comparison.

use ovsg_core::formula::{
    all_normalized_instances, evaluate_tqbf, find_false_witness, parse_qbf, QbfInstance,
};
use ovsg_core::gadgets::{
    audit_degrees, build_dependency_reveal, build_fake_clause, build_id_gadget,
    build_online_instance, check_self_contained, SelfContainmentOptions,
};
use ovsg_core::game::Outcome;
use ovsg_core::graph::{ExpectedChoice, IdTarget, LabeledGraph, VertexId, VertexRole};
use ovsg_core::graph::{canonical_code, RoleVisibility};
use ovsg_core::offline::{reduce_3sat, Problem};
use ovsg_core::rng::SplitMix64;
use ovsg_core::solver::{enumerate_policies_bruteforce, solve_game_exact, SolverOptions};
use ovsg_core::strategies::{
    adversary_deviant, adversary_paper_policy, algorithm_leak_aware, algorithm_paper_policy,
    check_reveal_precedence, head_to_head, play_match, Deviation,
};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SUITES: [&str; 5] =
    ["degrees", "self-contained", "correspondence", "solver-oracle", "all"];

/// Runs one named suite; `None` for an unknown suite name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    let mut report = SuiteReport::default();
    match name {
        "degrees" => degrees_suite(&mut report, seed),
        "self-contained" => self_contained_suite(&mut report),
        "correspondence" => correspondence_suite(&mut report),
        "solver-oracle" => solver_oracle_suite(&mut report, seed),
        "all" => {
            degrees_suite(&mut report, seed);
            self_contained_suite(&mut report);
            correspondence_suite(&mut report);
            solver_oracle_suite(&mut report, seed);
        }
        _ => return None,
    }
    Some(report)
}

/// The running vertex cover walkthrough instance.
pub fn running_formula() -> QbfInstance {
    parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n").expect("valid")
}

/// The two-clause dominating set walkthrough instance.
pub fn ds_walkthrough_formula() -> QbfInstance {
    parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n").expect("valid")
}

/// The pinned unwinnable instance with a single ∀-variable, used for the
/// degeneration experiment: under the compliant reveal order the adversary's
/// x2 reply kills every x3 choice, but with x2 degenerated to a free choice
/// the formula is satisfiable.
pub fn leak_witness_formula() -> QbfInstance {
    parse_qbf("p cnf 3 4\ne 1 0\na 2 0\ne 3 0\n-1 2 -3 0\n-1 2 3 0\n1 -2 -3 0\n1 -2 3 0\n")
        .expect("valid")
}

fn degrees_suite(report: &mut SuiteReport, seed: u64) {
    for problem in Problem::ALL {
        let mut failures = 0usize;
        let mut instances = 0usize;
        for q in all_normalized_instances(2, 2) {
            instances += 1;
            let inst = build_online_instance(&q, problem).expect("builds");
            failures += audit_degrees(&inst).mismatches.len();
        }
        report.checks.push(Check::new(
            &format!("degrees.{}-n2", problem.short_name()),
            failures == 0,
            format!("{instances} instances, {failures} degree mismatches"),
        ));
    }
    // Sampled n = 3 instances.
    let corpus = all_normalized_instances(3, 2);
    let mut rng = SplitMix64::new(seed);
    let mut failures = 0usize;
    let mut sampled = 0usize;
    for _ in 0..4 {
        let q = &corpus[rng.below(corpus.len())];
        for problem in Problem::ALL {
            sampled += 1;
            let inst = build_online_instance(q, problem).expect("builds");
            failures += audit_degrees(&inst).mismatches.len();
        }
    }
    report.checks.push(Check::new(
        "degrees.n3-sampled",
        failures == 0,
        format!("{sampled} sampled builds, {failures} degree mismatches"),
    ));

    // The audit must flag corruption: drop one edge and expect exactly the
    // two touched vertices.
    let inst = build_online_instance(&running_formula(), Problem::VertexCover).expect("builds");
    let (u, v) = inst.graph.edges().next().expect("has edges");
    let mut corrupted_graph = LabeledGraph::new();
    for w in inst.graph.vertices() {
        corrupted_graph.add_vertex(*inst.graph.role(w), inst.graph.choice(w));
    }
    for (a, b) in inst.graph.edges() {
        if (a, b) != (u, v) {
            corrupted_graph.add_edge(a, b).expect("copy");
        }
    }
    let mut corrupted = inst.clone();
    corrupted.graph = corrupted_graph;
    let audit = audit_degrees(&corrupted);
    let flagged: BTreeSet<VertexId> = audit.mismatches.iter().map(|m| m.vertex).collect();
    report.checks.push(Check::new(
        "degrees.corruption-detected",
        flagged == [u, v].into_iter().collect(),
        format!("removed edge {u}-{v}, flagged {flagged:?}"),
    ));
}

fn self_contained_suite(report: &mut SuiteReport) {
    let vc_base = reduce_3sat(Problem::VertexCover, &running_formula()).expect("builds");
    let is_base = reduce_3sat(Problem::IndependentSet, &running_formula()).expect("builds");
    let ds_base = reduce_3sat(Problem::DominatingSet, &ds_walkthrough_formula()).expect("builds");
    let missing = [
        ovsg_core::formula::Literal::positive(1),
        ovsg_core::formula::Literal::negative(1),
        ovsg_core::formula::Literal::negative(2),
    ];
    let opts = SelfContainmentOptions::default();

    let mut check = |name: &str, gadget: ovsg_core::gadgets::ExtensionGadget, problem: Problem, expect_opt: usize| {
        let ok_opt = gadget.standalone_optimum == expect_opt;
        match check_self_contained(problem, &gadget, opts) {
            Ok(result) => {
                report.checks.push(Check::new(
                    &format!("self-contained.{name}"),
                    result.passed() && ok_opt,
                    format!(
                        "standalone optimum {} (expected {expect_opt}), {} forcings, {} violations",
                        gadget.standalone_optimum,
                        result.forcings_checked,
                        result.violations.len()
                    ),
                ));
            }
            Err(e) => {
                report.checks.push(Check::new(
                    &format!("self-contained.{name}"),
                    false,
                    format!("{e}"),
                ));
            }
        }
    };

    check(
        "vc-fake-clause",
        build_fake_clause(&vc_base, missing).expect("builds"),
        Problem::VertexCover,
        3,
    );
    check(
        "vc-dependency-reveal",
        build_dependency_reveal(&vc_base, 1).expect("builds"),
        Problem::VertexCover,
        1,
    );
    check(
        "vc-literal-id",
        build_id_gadget(&vc_base, IdTarget::Literal(ovsg_core::formula::Literal::positive(1)))
            .expect("builds"),
        Problem::VertexCover,
        3,
    );
    check(
        "vc-clause-id",
        build_id_gadget(
            &vc_base,
            IdTarget::ClauseMember { clause: 0, lit: ovsg_core::formula::Literal::positive(1) },
        )
        .expect("builds"),
        Problem::VertexCover,
        5,
    );
    check(
        "is-fake-clause",
        build_fake_clause(&is_base, missing).expect("builds"),
        Problem::IndependentSet,
        6,
    );
    check(
        "is-dependency-reveal",
        build_dependency_reveal(&is_base, 1).expect("builds"),
        Problem::IndependentSet,
        11,
    );
    let ds_missing = [
        ovsg_core::formula::Literal::negative(1),
        ovsg_core::formula::Literal::positive(2),
        ovsg_core::formula::Literal::negative(2),
    ];
    check(
        "ds-fake-clause",
        build_fake_clause(&ds_base, ds_missing).expect("builds"),
        Problem::DominatingSet,
        1,
    );
    check(
        "ds-dependency-reveal",
        build_dependency_reveal(&ds_base, 1).expect("builds"),
        Problem::DominatingSet,
        1,
    );
    check(
        "ds-literal-id",
        build_id_gadget(&ds_base, IdTarget::Literal(ovsg_core::formula::Literal::positive(1)))
            .expect("builds"),
        Problem::DominatingSet,
        1,
    );
}

fn correspondence_suite(report: &mut SuiteReport) {
    let cases = [
        ("running", running_formula()),
        ("ds-walkthrough", ds_walkthrough_formula()),
        ("false-witness", find_false_witness(3, 3).expect("exists")),
    ];
    for (label, q) in &cases {
        let formula_value = evaluate_tqbf(q).expect("small");
        for problem in Problem::ALL {
            let inst = build_online_instance(q, problem).expect("builds");
            match head_to_head(&inst) {
                Ok((outcome, transcript)) => {
                    let game_win = outcome == Outcome::AlgorithmWins;
                    let size_ok = !game_win
                        || if problem.is_minimization() {
                            transcript.solution_size == inst.budget
                        } else {
                            transcript.solution_size >= inst.budget
                        };
                    let precedence = check_reveal_precedence(&inst, &transcript);
                    report.checks.push(Check::new(
                        &format!("correspondence.{label}-{}", problem.short_name()),
                        game_win == formula_value && size_ok && precedence.is_empty(),
                        format!(
                            "formula {formula_value}, game win {game_win}, |sol| {} of k {}, {} order violations",
                            transcript.solution_size,
                            inst.budget,
                            precedence.len()
                        ),
                    ));
                }
                Err(e) => {
                    report.checks.push(Check::new(
                        &format!("correspondence.{label}-{}", problem.short_name()),
                        false,
                        format!("{e}"),
                    ));
                }
            }
        }
    }

    // Degeneration experiment on the pinned single-∀ unwinnable instance:
    // the compliant adversary beats even the leak-aware algorithm, but
    // leaking the dependency reveal center first hands it the game.
    let witness = leak_witness_formula();
    let inst = build_online_instance(&witness, Problem::VertexCover).expect("builds");
    let compliant = play_match(
        &inst,
        algorithm_leak_aware(&inst),
        &mut adversary_paper_policy(&inst),
    );
    let deviant_vs_aware = play_match(
        &inst,
        algorithm_leak_aware(&inst),
        &mut adversary_deviant(&inst, Deviation::DrCenterFirst { var: 2 }),
    );
    let deviant_vs_plain = play_match(
        &inst,
        algorithm_paper_policy(&inst),
        &mut adversary_deviant(&inst, Deviation::DrCenterFirst { var: 2 }),
    );
    let passed = matches!(&compliant, Ok(t) if t.outcome == Outcome::AdversaryWins)
        && matches!(&deviant_vs_aware, Ok(t) if t.outcome == Outcome::AlgorithmWins)
        && matches!(&deviant_vs_plain, Ok(t) if t.outcome == Outcome::AdversaryWins);
    report.checks.push(Check::new(
        "correspondence.dr-leak-degeneration",
        passed,
        format!(
            "compliant {:?}, deviant-vs-aware {:?}, deviant-vs-plain {:?}",
            compliant.map(|t| t.outcome),
            deviant_vs_aware.map(|t| t.outcome),
            deviant_vs_plain.map(|t| t.outcome)
        ),
    ));
}

fn solver_oracle_suite(report: &mut SuiteReport, seed: u64) {
    let opts = SolverOptions::default();
    let mut disagreements = 0usize;
    let mut cases = 0usize;
    for g in non_isomorphic_graphs(4) {
        for problem in Problem::ALL {
            for k in 0..=g.len() {
                cases += 1;
                let exact = solve_game_exact(&g, problem, k, opts).expect("small").winner;
                let oracle = enumerate_policies_bruteforce(&g, problem, k).expect("small").winner;
                if exact != oracle {
                    disagreements += 1;
                }
            }
        }
    }
    report.checks.push(Check::new(
        "solver-oracle.exhaustive-le4",
        disagreements == 0,
        format!("{cases} cases, {disagreements} disagreements"),
    ));

    let mut rng = SplitMix64::new(seed ^ 0x9e37);
    let mut disagreements = 0usize;
    let mut cases = 0usize;
    for _ in 0..10 {
        let n = 5 + rng.below(2);
        let g = random_graph(n, &mut rng);
        for problem in Problem::ALL {
            for k in 0..=n {
                cases += 1;
                let exact = solve_game_exact(&g, problem, k, opts).expect("small").winner;
                let oracle = enumerate_policies_bruteforce(&g, problem, k).expect("small").winner;
                if exact != oracle {
                    disagreements += 1;
                }
            }
        }
    }
    report.checks.push(Check::new(
        "solver-oracle.random-5-6",
        disagreements == 0,
        format!("{cases} cases, {disagreements} disagreements"),
    ));
}

/// All non-isomorphic graphs with 1..=`max_n` vertices (desk scale: 52
/// graphs for `max_n = 5`).
pub fn non_isomorphic_graphs(max_n: usize) -> Vec<LabeledGraph> {
    let mut result = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        let mut seen = BTreeSet::new();
        for mask in 0u64..(1 << pairs.len()) {
            let mut g = LabeledGraph::new();
            for _ in 0..n {
                g.add_vertex(VertexRole::VariableAux { var: 0 }, ExpectedChoice::Reject);
            }
            for (idx, &(u, v)) in pairs.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    g.add_edge(VertexId(u), VertexId(v)).expect("distinct");
                }
            }
            let code = canonical_code(&g, RoleVisibility::Hidden).expect("small");
            if seen.insert(code) {
                result.push(g);
            }
        }
    }
    result
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
                g.add_edge(VertexId(u), VertexId(v)).expect("distinct");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_family_counts_match_the_catalog() {
        // 1, 2, 4, 11, 34 graphs on 1..=5 vertices.
        assert_eq!(non_isomorphic_graphs(4).len(), 1 + 2 + 4 + 11);
        assert_eq!(non_isomorphic_graphs(5).len(), 1 + 2 + 4 + 11 + 34);
    }

    #[test]
    fn leak_witness_has_the_pinned_shape() {
        use ovsg_core::formula::Quantifier::*;
        let q = leak_witness_formula();
        assert_eq!(q.quantifiers(), &[Exists, Forall, Exists]);
        assert_eq!(evaluate_tqbf(&q), Ok(false));
        // Degenerating the ∀-variable flips the game.
        let flipped = QbfInstance::new(vec![Exists; 3], q.clauses().to_vec()).unwrap();
        assert_eq!(evaluate_tqbf(&flipped), Ok(true));
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 0).is_none());
    }
}
