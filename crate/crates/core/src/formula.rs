//! Quantified 3-CNF formulas and the two-player formula game.
//!
//! An instance is a prefix of quantifiers, one per variable `x1..xn`, over a
//! list of clauses. The existential player picks values for the ∃-variables,
//! the universal player for the ∀-variables, in prefix order; the existential
//! player wins when the final assignment satisfies every clause.
//!
//! Instances arrive in a QDIMACS subset and are brought into the normal form
//! the reduction layer expects (strictly alternating prefix, `n >= 2`, every
//! clause three distinct literals, no duplicate clauses) by [`normalize`],
//! which preserves the game value.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Default cap on the variable count accepted by the exact evaluator.
pub const DEFAULT_VAR_CAP: usize = 24;

/// Maximum clause count the evaluator's memo key can hold.
const MAX_CLAUSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn truth(self) -> bool {
        self == Polarity::Positive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// A literal: a 1-based variable index with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub polarity: Polarity,
}

impl Literal {
    pub fn positive(var: u32) -> Self {
        Literal { var, polarity: Polarity::Positive }
    }

    pub fn negative(var: u32) -> Self {
        Literal { var, polarity: Polarity::Negative }
    }

    /// Parses the DIMACS signed-integer encoding: `3` is x3, `-3` is ¬x3.
    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 || code.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal {
            var: code.unsigned_abs() as u32,
            polarity: if code > 0 { Polarity::Positive } else { Polarity::Negative },
        })
    }

    pub fn to_dimacs(self) -> i64 {
        match self.polarity {
            Polarity::Positive => self.var as i64,
            Polarity::Negative => -(self.var as i64),
        }
    }

    pub fn negated(self) -> Self {
        Literal { var: self.var, polarity: self.polarity.flip() }
    }

    /// Truth value under `value` assigned to the literal's variable.
    pub fn satisfied_by(self, value: bool) -> bool {
        value == self.polarity.truth()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "x{}", self.var),
            Polarity::Negative => write!(f, "~x{}", self.var),
        }
    }
}

/// An ordered disjunction of literals. Normalized clauses have exactly three
/// pairwise distinct literals; a complementary pair such as `x1, ~x1` counts
/// as distinct and is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// A clause must contain at least one literal.
    pub fn new(literals: Vec<Literal>) -> Option<Self> {
        if literals.is_empty() {
            None
        } else {
            Some(Clause { literals })
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals.contains(&lit)
    }

    /// The literal set, for order-insensitive comparisons.
    pub fn literal_set(&self) -> BTreeSet<Literal> {
        self.literals.iter().copied().collect()
    }

    fn has_distinct_literals(&self) -> bool {
        self.literal_set().len() == self.literals.len()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, lit) in self.literals.iter().enumerate() {
            if idx > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{lit}")?;
        }
        write!(f, ")")
    }
}

/// A partial assignment of truth values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<u32, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.values.iter().map(|(&v, &b)| (v, b))
    }

    /// True when exactly the variables `1..=upto` are assigned.
    pub fn assigns_prefix(&self, upto: u32) -> bool {
        self.values.len() == upto as usize && (1..=upto).all(|v| self.values.contains_key(&v))
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause
            .literals()
            .iter()
            .any(|lit| self.get(lit.var).is_some_and(|v| lit.satisfied_by(v)))
    }

    pub fn satisfies_all(&self, q: &QbfInstance) -> bool {
        q.clauses().iter().all(|c| self.satisfies(c))
    }
}

impl FromIterator<(u32, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (u32, bool)>>(iter: T) -> Self {
        Assignment { values: iter.into_iter().collect() }
    }
}

/// A fully quantified CNF formula: one quantifier per variable `x1..xn`, in
/// prefix order, plus the clause list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfInstance {
    quantifiers: Vec<Quantifier>,
    clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaError {
    /// A clause references a variable outside `1..=n`.
    VariableOutOfRange { var: u32, n: usize },
    /// The evaluator refuses instances above its variable cap.
    VariableLimitExceeded { n: usize, cap: usize },
    /// The evaluator's clause mask holds at most [`MAX_CLAUSES`] clauses.
    ClauseLimitExceeded { m: usize },
    /// `exists_move` was asked to move on a universally quantified variable.
    MoveOnForallVariable { var: u32 },
    /// `exists_move` needs exactly the variables before `var` assigned.
    IncompletePrefix { var: u32 },
}

impl fmt::Display for FormulaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaError::VariableOutOfRange { var, n } => {
                write!(f, "variable x{var} out of range (n = {n})")
            }
            FormulaError::VariableLimitExceeded { n, cap } => {
                write!(f, "instance has {n} variables, evaluator cap is {cap}")
            }
            FormulaError::ClauseLimitExceeded { m } => {
                write!(f, "instance has {m} clauses, evaluator cap is {MAX_CLAUSES}")
            }
            FormulaError::MoveOnForallVariable { var } => {
                write!(f, "x{var} is universally quantified")
            }
            FormulaError::IncompletePrefix { var } => {
                write!(f, "moving on x{var} requires exactly x1..x{} assigned", var - 1)
            }
        }
    }
}

impl core::error::Error for FormulaError {}

impl QbfInstance {
    /// Builds an instance, checking that clauses stay within `1..=n`.
    pub fn new(quantifiers: Vec<Quantifier>, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        let n = quantifiers.len();
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var == 0 || lit.var as usize > n {
                    return Err(FormulaError::VariableOutOfRange { var: lit.var, n });
                }
            }
        }
        Ok(QbfInstance { quantifiers, clauses })
    }

    pub fn n(&self) -> usize {
        self.quantifiers.len()
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn quantifiers(&self) -> &[Quantifier] {
        &self.quantifiers
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn quantifier_of(&self, var: u32) -> Quantifier {
        self.quantifiers[(var - 1) as usize]
    }

    pub fn variables(&self) -> impl Iterator<Item = u32> {
        1..=self.n() as u32
    }

    /// Number of ∀-variables with index strictly below `var`.
    pub fn foralls_below(&self, var: u32) -> usize {
        self.quantifiers[..(var - 1) as usize]
            .iter()
            .filter(|&&q| q == Quantifier::Forall)
            .count()
    }

    /// Number of ∀-variables with index at most `var`.
    pub fn foralls_upto(&self, var: u32) -> usize {
        self.quantifiers[..var as usize]
            .iter()
            .filter(|&&q| q == Quantifier::Forall)
            .count()
    }

    /// Normal form: strictly alternating prefix, at least two variables,
    /// every clause three distinct literals, no two clauses with the same
    /// literal set.
    pub fn is_normalized(&self) -> bool {
        if self.n() < 2 {
            return false;
        }
        if self.quantifiers.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        let mut seen = BTreeSet::new();
        for clause in &self.clauses {
            if clause.len() != 3 || !clause.has_distinct_literals() {
                return false;
            }
            if !seen.insert(clause.literal_set()) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for QbfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, q) in self.quantifiers.iter().enumerate() {
            let symbol = match q {
                Quantifier::Exists => "E",
                Quantifier::Forall => "A",
            };
            write!(f, "{symbol}x{} ", idx + 1)?;
        }
        for (idx, clause) in self.clauses.iter().enumerate() {
            if idx > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// Parse errors carry the 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ParseError {}

/// Parses the QDIMACS subset used by this crate.
///
/// Grammar: optional `c` comment lines; a `p cnf <n> <m>` header; quantifier
/// lines `a <vars> 0` / `e <vars> 0` that together list the variables
/// `1..n` in increasing order; then clause lines of signed integers each
/// terminated by `0`. Variables left unquantified default to existential.
/// Clauses with other than three literals are accepted here (the normalizer
/// repairs them), but an empty clause is rejected.
pub fn parse_qbf(text: &str) -> Result<QbfInstance, ParseError> {
    let err = |line: usize, message: &str| ParseError { line, message: String::from(message) };

    let mut header: Option<(usize, usize)> = None;
    let mut quantifiers: Vec<Quantifier> = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut in_prefix = true;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lineno, "duplicate header"));
            }
            let mut parts = line.split_whitespace();
            let (Some("p"), Some("cnf"), Some(n), Some(m), None) =
                (parts.next(), parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(err(lineno, "malformed header, expected `p cnf <n> <m>`"));
            };
            let n: usize = n.parse().map_err(|_| err(lineno, "bad variable count"))?;
            let m: usize = m.parse().map_err(|_| err(lineno, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(err(lineno, "expected `p cnf` header before this line"));
        };
        if line.starts_with('a') || line.starts_with('e') {
            if !in_prefix {
                return Err(err(lineno, "quantifier line after the first clause"));
            }
            let quant = if line.starts_with('a') { Quantifier::Forall } else { Quantifier::Exists };
            let mut saw_terminator = false;
            for token in line[1..].split_whitespace() {
                if saw_terminator {
                    return Err(err(lineno, "tokens after terminating 0"));
                }
                let value: i64 = token.parse().map_err(|_| err(lineno, "bad variable token"))?;
                if value == 0 {
                    saw_terminator = true;
                    continue;
                }
                if value < 0 {
                    return Err(err(lineno, "negative variable in quantifier line"));
                }
                if value as usize > n {
                    return Err(err(lineno, "variable out of range"));
                }
                if value as usize != quantifiers.len() + 1 {
                    return Err(err(lineno, "quantifier lines must list variables 1..n in order"));
                }
                quantifiers.push(quant);
            }
            if !saw_terminator {
                return Err(err(lineno, "quantifier line not terminated by 0"));
            }
            continue;
        }
        // Clause line.
        in_prefix = false;
        let mut literals = Vec::new();
        let mut saw_terminator = false;
        for token in line.split_whitespace() {
            if saw_terminator {
                return Err(err(lineno, "tokens after terminating 0"));
            }
            let value: i64 = token.parse().map_err(|_| err(lineno, "bad literal token"))?;
            if value == 0 {
                saw_terminator = true;
                continue;
            }
            if value.unsigned_abs() as usize > n {
                return Err(err(lineno, "variable out of range"));
            }
            literals.push(Literal::from_dimacs(value).expect("nonzero in-range literal"));
        }
        if !saw_terminator {
            return Err(err(lineno, "clause line not terminated by 0"));
        }
        let Some(clause) = Clause::new(literals) else {
            return Err(err(lineno, "empty clause"));
        };
        clauses.push(clause);
    }

    let Some((n, _)) = header else {
        return Err(err(text.lines().count().max(1), "missing `p cnf` header"));
    };
    if quantifiers.len() > n {
        return Err(err(1, "more quantified variables than declared"));
    }
    // Unquantified trailing variables default to existential.
    quantifiers.resize(n, Quantifier::Exists);
    QbfInstance::new(quantifiers, clauses)
        .map_err(|e| ParseError { line: 1, message: alloc::format!("{e}") })
}

/// Normalizes an instance while preserving the game value.
///
/// Transformations, in order: duplicate literals inside a clause are removed;
/// clauses with the same literal set are collapsed; a short clause `(a | b)`
/// becomes `(a | b | y) & (a | b | ~y)` with a fresh innermost existential
/// `y` (unit clauses go through this twice); the prefix is made strictly
/// alternating, and padded to at least two variables, by inserting fresh
/// variables that occur in no clause.
pub fn normalize(q: &QbfInstance) -> QbfInstance {
    // Phase 1: clause cleanup on the original variables.
    let mut seen_sets: BTreeSet<BTreeSet<Literal>> = BTreeSet::new();
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    for clause in q.clauses() {
        let mut deduped: Vec<Literal> = Vec::new();
        for &lit in clause.literals() {
            if !deduped.contains(&lit) {
                deduped.push(lit);
            }
        }
        if seen_sets.insert(deduped.iter().copied().collect()) {
            clauses.push(deduped);
        }
    }

    // Phase 2: pad short clauses with fresh innermost existentials.
    let mut quantifiers = q.quantifiers().to_vec();
    let mut work: Vec<Vec<Literal>> = clauses;
    let mut padded: Vec<Vec<Literal>> = Vec::new();
    while let Some(clause) = work.pop() {
        if clause.len() >= 3 {
            padded.push(clause);
            continue;
        }
        quantifiers.push(Quantifier::Exists);
        let fresh = Literal::positive(quantifiers.len() as u32);
        let mut with_pos = clause.clone();
        with_pos.push(fresh);
        let mut with_neg = clause;
        with_neg.push(fresh.negated());
        work.push(with_pos);
        work.push(with_neg);
    }
    padded.reverse();

    // Phase 3: rebuild the prefix alternating, with clause-free dummies.
    let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
    let mut final_prefix: Vec<Quantifier> = Vec::new();
    for (idx, &quant) in quantifiers.iter().enumerate() {
        if final_prefix.last() == Some(&quant) {
            final_prefix.push(quant.dual());
        }
        final_prefix.push(quant);
        remap.insert(idx as u32 + 1, final_prefix.len() as u32);
    }
    while final_prefix.len() < 2 {
        let next = final_prefix.last().map_or(Quantifier::Exists, |q| q.dual());
        final_prefix.push(next);
    }

    let final_clauses: Vec<Clause> = padded
        .into_iter()
        .map(|lits| {
            Clause::new(
                lits.into_iter()
                    .map(|lit| Literal { var: remap[&lit.var], polarity: lit.polarity })
                    .collect(),
            )
            .expect("padded clause is nonempty")
        })
        .collect();

    let result = QbfInstance::new(final_prefix, final_clauses).expect("remap keeps vars in range");
    debug_assert!(result.is_normalized());
    result
}

/// Exact game value of the instance: `true` iff the existential player has a
/// winning strategy. Uses the default variable cap of [`DEFAULT_VAR_CAP`].
pub fn evaluate_tqbf(q: &QbfInstance) -> Result<bool, FormulaError> {
    evaluate_tqbf_capped(q, DEFAULT_VAR_CAP)
}

/// As [`evaluate_tqbf`] with an explicit variable cap.
pub fn evaluate_tqbf_capped(q: &QbfInstance, cap: usize) -> Result<bool, FormulaError> {
    evaluate_from(q, &Assignment::new(), 1, cap)
}

/// Game value of the residual instance after `partial` has been played, with
/// `start` the next variable to be decided. Variables below `start` must all
/// be assigned by `partial`.
pub fn evaluate_from(
    q: &QbfInstance,
    partial: &Assignment,
    start: u32,
    cap: usize,
) -> Result<bool, FormulaError> {
    if q.n() > cap {
        return Err(FormulaError::VariableLimitExceeded { n: q.n(), cap });
    }
    if q.m() > MAX_CLAUSES {
        return Err(FormulaError::ClauseLimitExceeded { m: q.m() });
    }

    // A clause is dropped from the mask once satisfied; a clause whose
    // variables are exhausted while unsatisfied refutes the branch. The
    // residual value depends only on (next variable, mask), which is what
    // makes the memo effective.
    let mut initial_mask: u64 = 0;
    for (idx, clause) in q.clauses().iter().enumerate() {
        if partial.satisfies(clause) {
            continue;
        }
        let alive = clause.literals().iter().any(|lit| lit.var >= start);
        if !alive {
            return Ok(false);
        }
        initial_mask |= 1 << idx;
    }

    let mut memo: BTreeMap<(u32, u64), bool> = BTreeMap::new();
    Ok(eval_rec(q, start, initial_mask, &mut memo))
}

fn eval_rec(q: &QbfInstance, var: u32, mask: u64, memo: &mut BTreeMap<(u32, u64), bool>) -> bool {
    if mask == 0 {
        return true;
    }
    if var as usize > q.n() {
        return false;
    }
    if let Some(&value) = memo.get(&(var, mask)) {
        return value;
    }

    let branch = |value: bool, memo: &mut BTreeMap<(u32, u64), bool>| -> bool {
        let mut next_mask = mask;
        let mut dead = false;
        for (idx, clause) in q.clauses().iter().enumerate() {
            if next_mask & (1 << idx) == 0 {
                continue;
            }
            let satisfied = clause
                .literals()
                .iter()
                .any(|lit| lit.var == var && lit.satisfied_by(value));
            if satisfied {
                next_mask &= !(1 << idx);
            } else if !clause.literals().iter().any(|lit| lit.var > var) {
                dead = true;
            }
        }
        if dead {
            false
        } else {
            eval_rec(q, var + 1, next_mask, memo)
        }
    };

    let value = match q.quantifier_of(var) {
        Quantifier::Exists => branch(true, memo) || branch(false, memo),
        Quantifier::Forall => branch(true, memo) && branch(false, memo),
    };
    memo.insert((var, mask), value);
    value
}

/// Optimal existential move on `x_var`, given that exactly `x1..x_{var-1}`
/// have been assigned. Returns a value that keeps a winning continuation if
/// one exists; ties (and lost positions) resolve to `true`.
pub fn exists_move(q: &QbfInstance, partial: &Assignment, var: u32) -> Result<bool, FormulaError> {
    if q.quantifier_of(var) != Quantifier::Exists {
        return Err(FormulaError::MoveOnForallVariable { var });
    }
    if !partial.assigns_prefix(var - 1) {
        return Err(FormulaError::IncompletePrefix { var });
    }
    let mut with_true = partial.clone();
    with_true.set(var, true);
    if evaluate_from(q, &with_true, var + 1, DEFAULT_VAR_CAP)? {
        return Ok(true);
    }
    let mut with_false = partial.clone();
    with_false.set(var, false);
    if evaluate_from(q, &with_false, var + 1, DEFAULT_VAR_CAP)? {
        return Ok(false);
    }
    Ok(true)
}

/// Every normalized instance with `n` variables and at most `max_m` clauses:
/// both alternating prefixes crossed with every clause subset, in a fixed
/// enumeration order. Desk-scale only (`n <= 3` keeps this in the thousands).
pub fn all_normalized_instances(n: usize, max_m: usize) -> Vec<QbfInstance> {
    let candidates = all_possible_clauses(n);
    let mut prefixes = Vec::new();
    for first in [Quantifier::Forall, Quantifier::Exists] {
        let mut prefix = Vec::with_capacity(n);
        let mut q = first;
        for _ in 0..n {
            prefix.push(q);
            q = q.dual();
        }
        prefixes.push(prefix);
    }
    let mut subsets: Vec<Vec<usize>> = alloc::vec![Vec::new()];
    for size in 1..=max_m.min(candidates.len()) {
        let mut current = Vec::with_capacity(size);
        subsets_of_size(candidates.len(), size, 0, &mut current, &mut subsets);
    }
    let mut result = Vec::new();
    for prefix in &prefixes {
        for subset in &subsets {
            let clauses: Vec<Clause> = subset
                .iter()
                .map(|&idx| Clause::new(candidates[idx].to_vec()).expect("three literals"))
                .collect();
            result.push(
                QbfInstance::new(prefix.clone(), clauses).expect("candidates are in range"),
            );
        }
    }
    result
}

fn subsets_of_size(
    n: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for idx in start..n {
        current.push(idx);
        subsets_of_size(n, size, idx + 1, current, out);
        current.pop();
    }
}

/// First instance, in the order of [`all_normalized_instances`], on which the
/// existential player loses. The verification suites pin this witness; with
/// two variables every clause is tautological, so `n >= 3` is required.
pub fn find_false_witness(n: usize, max_m: usize) -> Option<QbfInstance> {
    all_normalized_instances(n, max_m)
        .into_iter()
        .find(|q| evaluate_tqbf(q) == Ok(false))
}

/// All 3-element subsets of the `2n` literals, in lexicographic order. These
/// are exactly the candidate clauses of a normalized instance; the ones not
/// present in the formula get fake clause gadgets.
pub fn all_possible_clauses(n: usize) -> Vec<[Literal; 3]> {
    let mut literals = Vec::with_capacity(2 * n);
    for var in 1..=n as u32 {
        literals.push(Literal::positive(var));
        literals.push(Literal::negative(var));
    }
    let mut result = Vec::new();
    for a in 0..literals.len() {
        for b in a + 1..literals.len() {
            for c in b + 1..literals.len() {
                result.push([literals[a], literals[b], literals[c]]);
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> QbfInstance {
        parse_qbf(text).expect("valid input")
    }

    /// The running instance: Ax1 Ex2 (x1 | ~x1 | x2).
    fn running() -> QbfInstance {
        parse("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n")
    }

    #[test]
    fn parse_running_instance() {
        let q = running();
        assert_eq!(q.quantifiers(), &[Quantifier::Forall, Quantifier::Exists]);
        assert_eq!(q.m(), 1);
        assert_eq!(
            q.clauses()[0].literals(),
            &[Literal::positive(1), Literal::negative(1), Literal::positive(2)]
        );
        assert!(q.is_normalized());
    }

    #[test]
    fn parse_rejects_empty_clause() {
        let result = parse_qbf("p cnf 1 1\ne 1 0\n0\n");
        let err = result.unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn parse_rejects_out_of_range_variable() {
        assert!(parse_qbf("p cnf 1 1\ne 1 0\n2 0\n").is_err());
        assert!(parse_qbf("p cnf 2 0\ne 1 3 0\n").is_err());
    }

    #[test]
    fn parse_accepts_duplicate_literals_as_non_normalized() {
        let q = parse("p cnf 1 1\ne 1 0\n1 1 1 0\n");
        assert_eq!(q.clauses()[0].len(), 3);
        assert!(!q.is_normalized());
    }

    #[test]
    fn parse_defaults_unquantified_to_exists() {
        let q = parse("p cnf 2 1\n1 2 0\n");
        assert_eq!(q.quantifiers(), &[Quantifier::Exists, Quantifier::Exists]);
    }

    #[test]
    fn normalize_is_identity_on_normalized_input() {
        let q = running();
        assert_eq!(normalize(&q), q);
    }

    #[test]
    fn normalize_inserts_dummy_between_equal_quantifiers() {
        let q = parse("p cnf 2 1\na 1 2 0\n1 2 -1 0\n");
        let norm = normalize(&q);
        assert!(norm.is_normalized());
        assert_eq!(
            norm.quantifiers(),
            &[Quantifier::Forall, Quantifier::Exists, Quantifier::Forall]
        );
        // The clause set is unchanged up to renumbering x2 -> x3.
        assert_eq!(norm.m(), 1);
        assert_eq!(
            norm.clauses()[0].literals(),
            &[Literal::positive(1), Literal::positive(3), Literal::negative(1)]
        );
    }

    #[test]
    fn normalize_pads_duplicate_literal_clause() {
        // Ex1 (x1 | x1 | x1) collapses to a unit clause and is padded back
        // out to four 3-literal clauses over fresh variables.
        let q = parse("p cnf 1 1\ne 1 0\n1 1 1 0\n");
        let norm = normalize(&q);
        assert!(norm.is_normalized());
        for clause in norm.clauses() {
            assert!(clause.contains(Literal::positive(1)));
        }
        assert_eq!(evaluate_tqbf(&norm), Ok(true));
    }

    #[test]
    fn normalize_is_idempotent() {
        for text in [
            "p cnf 1 1\ne 1 0\n1 1 1 0\n",
            "p cnf 2 1\na 1 2 0\n1 2 -1 0\n",
            "p cnf 3 2\na 1 0\na 2 0\ne 3 0\n1 2 3 0\n1 2 3 0\n",
            "p cnf 0 0\n",
        ] {
            let once = normalize(&parse(text));
            assert_eq!(normalize(&once), once, "input {text:?}");
        }
    }

    #[test]
    fn evaluate_tautological_instances() {
        assert_eq!(evaluate_tqbf(&running()), Ok(true));
        // The two-clause instance from the dominating set walkthrough:
        // Ax1 Ex2 (x1 | ~x1 | ~x2) & (x1 | x2 | ~x2).
        let q = parse("p cnf 2 2\na 1 0\ne 2 0\n1 -1 -2 0\n1 2 -2 0\n");
        assert_eq!(evaluate_tqbf(&q), Ok(true));
    }

    #[test]
    fn evaluate_respects_quantifier_order() {
        // Ex2 must copy x1: Ax1 Ex2 (~x1 | x2 ..)(x1 | ~x2 ..) is winnable,
        // while the flipped prefix Ex1 Ax2 on the same matrix is not.
        let winnable = parse("p cnf 2 2\na 1 0\ne 2 0\n-1 2 2 0\n1 -2 -2 0\n");
        assert_eq!(evaluate_tqbf(&winnable), Ok(true));
        let lost = parse("p cnf 2 2\ne 1 0\na 2 0\n-1 2 2 0\n1 -2 -2 0\n");
        assert_eq!(evaluate_tqbf(&lost), Ok(false));
    }

    #[test]
    fn evaluate_rejects_oversized_instance() {
        let quantifiers = alloc::vec![Quantifier::Exists; 25];
        let q = QbfInstance::new(quantifiers, Vec::new()).unwrap();
        assert!(matches!(
            evaluate_tqbf(&q),
            Err(FormulaError::VariableLimitExceeded { n: 25, cap: 24 })
        ));
    }

    #[test]
    fn exists_move_prefers_true_on_ties() {
        let q = running();
        let partial: Assignment = [(1, false)].into_iter().collect();
        assert_eq!(exists_move(&q, &partial, 2), Ok(true));
        let partial: Assignment = [(1, true)].into_iter().collect();
        assert_eq!(exists_move(&q, &partial, 2), Ok(true));
    }

    #[test]
    fn exists_move_returns_true_when_lost() {
        // (x1 | x1 inadmissible) use: Ex1 with both polarities forced dead:
        // (x1 | x1 | x1) & (~x1 | ~x1 | ~x1) is unsatisfiable.
        let q = parse("p cnf 1 2\ne 1 0\n1 1 1 0\n-1 -1 -1 0\n");
        assert_eq!(evaluate_tqbf(&q), Ok(false));
        assert_eq!(exists_move(&q, &Assignment::new(), 1), Ok(true));
    }

    #[test]
    fn exists_move_rejects_forall_and_bad_prefix() {
        let q = running();
        assert!(matches!(
            exists_move(&q, &Assignment::new(), 1),
            Err(FormulaError::MoveOnForallVariable { var: 1 })
        ));
        assert!(matches!(
            exists_move(&q, &Assignment::new(), 2),
            Err(FormulaError::IncompletePrefix { var: 2 })
        ));
    }

    #[test]
    fn possible_clause_count_matches_binomial() {
        // C(4,3) = 4 for n = 2, C(6,3) = 20 for n = 3.
        assert_eq!(all_possible_clauses(2).len(), 4);
        assert_eq!(all_possible_clauses(3).len(), 20);
    }
}
