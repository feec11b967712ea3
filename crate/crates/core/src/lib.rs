//! Online vertex subset games on graphs built from quantified 3-CNF formulas.
//!
//! A vertex subset problem (vertex cover, independent set, dominating set)
//! becomes an online game when an adversary reveals the graph one closed
//! neighborhood at a time and the algorithm must irrevocably accept or reject
//! each revealed vertex, knowing only an unlabeled copy of the graph. This
//! crate contains the whole toolchain for studying these games at desk scale:
//!
//! * [`formula`] — quantified 3-CNF instances, normalization, and exact
//!   evaluation of the two-player formula game.
//! * [`graph`] — role-labeled undirected graphs, canonical codes, and
//!   isomorphism checks.
//! * [`offline`] — the classic 3-SAT gadget reductions and exact offline
//!   solvers used as oracles.
//! * [`gadgets`] — fake clause, dependency reveal, and ID gadgets; the
//!   three-step extension pipeline producing online instances; budget
//!   computation and degree audits.
//! * [`game`] — the neighborhood-reveal session: reveals, decisions,
//!   feasibility, outcome, transcripts.
//! * [`strategies`] — the degree-table algorithm with formula-guided
//!   existential moves, and adversaries that reveal in quantification order.
//! * [`solver`] — exact value of the imperfect-information game on small
//!   graphs, with a policy-enumeration oracle.
//!
//! Everything is deterministic and integer-exact; no floating point, no
//! global state. The crate is `no_std` (with `alloc`).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod formula;
pub mod gadgets;
pub mod game;
pub mod graph;
pub mod offline;
pub mod rng;
pub mod solver;
pub mod strategies;
