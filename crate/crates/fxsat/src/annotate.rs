//! Satisfiability decision and solution-pattern generation.
//!
//! Two interchangeable algorithms annotate a BGP with ground roles: a
//! top-down search that starts from position roles and specialises one node
//! at a time, and a bottom-up enumeration that builds per-node candidate
//! sets and filters the Cartesian product through `check`. A consistent
//! ground annotation is accepted as a solution only when its co-binding
//! closure is realizable as a graph (see the realizability screen), which
//! keeps every reported solution constructible by the witness builder. The
//! orchestrator [`is_satisfiable`] runs the structural gates first, then the
//! chosen algorithm, under a cooperative timeout.

use crate::annotation::Annotation;
use crate::predicate::{FxPredicate, GROUND_PREDICATES};
use crate::realize::solution_realizable;
use crate::rules::RuleContext;
use crate::structure::{has_cycle, has_unsupported_join};
use crate::term::{classify_iri, Bgp, NodeKind, WellKnown};
use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
    Timeout,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Satisfiable => f.write_str("satisfiable"),
            Verdict::Unsatisfiable => f.write_str("unsatisfiable"),
            Verdict::Timeout => f.write_str("timeout"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    TopDown,
    BottomUp,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::TopDown => f.write_str("topdown"),
            Algorithm::BottomUp => f.write_str("bottomup"),
        }
    }
}

/// Whether to stop at the first solution pattern or generate all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
}

impl Mode {
    fn complete(self) -> bool {
        self == Mode::All
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::First => f.write_str("first"),
            Mode::All => f.write_str("all"),
        }
    }
}

/// Outcome of a satisfiability run.
#[derive(Debug, Clone)]
pub struct SatReport {
    pub verdict: Verdict,
    /// Ground solution patterns; empty unless satisfiable, at most one in
    /// first-solution mode.
    pub solutions: Vec<Annotation>,
    /// Number of candidate annotations evaluated through `check`.
    pub tested: u64,
    pub elapsed: Duration,
    pub algorithm: Algorithm,
    pub mode: Mode,
}

impl SatReport {
    fn new(algorithm: Algorithm, mode: Mode) -> Self {
        SatReport {
            verdict: Verdict::Unsatisfiable,
            solutions: Vec::new(),
            tested: 0,
            elapsed: Duration::ZERO,
            algorithm,
            mode,
        }
    }
}

/// Decides satisfiability of a parsed, configuration-stripped BGP.
///
/// The empty BGP is satisfiable with the empty solution. Unsupported joins
/// and cycles are decided without generating any annotation. Timeouts
/// surface as [`Verdict::Timeout`], never as an error.
pub fn is_satisfiable(bgp: &Bgp, algorithm: Algorithm, mode: Mode, timeout: Duration) -> SatReport {
    let start = Instant::now();
    let mut report = SatReport::new(algorithm, mode);

    if bgp.is_empty() {
        report.verdict = Verdict::Satisfiable;
        report.solutions.push(Annotation::new());
        report.elapsed = start.elapsed();
        return report;
    }
    if has_unsupported_join(bgp) || has_cycle(bgp) {
        report.verdict = Verdict::Unsatisfiable;
        report.elapsed = start.elapsed();
        return report;
    }

    let deadline = start + timeout;
    let mut report = match algorithm {
        Algorithm::TopDown => run_topdown(bgp, mode.complete(), deadline),
        Algorithm::BottomUp => run_bottomup(bgp, mode.complete(), deadline),
    };
    report.mode = mode;
    report.elapsed = start.elapsed();
    report
}

/// Top-down annotation as search, starting every node at its position role.
pub fn annotate_topdown(bgp: &Bgp, complete: bool, timeout: Duration) -> SatReport {
    let start = Instant::now();
    let mut report = run_topdown(bgp, complete, start + timeout);
    report.mode = if complete { Mode::All } else { Mode::First };
    report.elapsed = start.elapsed();
    report
}

/// Bottom-up annotation as candidate enumeration.
pub fn generate_bottomup(bgp: &Bgp, complete: bool, timeout: Duration) -> SatReport {
    let start = Instant::now();
    let mut report = run_bottomup(bgp, complete, start + timeout);
    report.mode = if complete { Mode::All } else { Mode::First };
    report.elapsed = start.elapsed();
    report
}

// ---------------------------------------------------------------------------
// Top-down search
// ---------------------------------------------------------------------------

struct TopDownState<'c> {
    ctx: &'c RuleContext,
    complete: bool,
    deadline: Instant,
    tested: u64,
    seen: HashSet<Vec<FxPredicate>>,
    solutions: Vec<Vec<FxPredicate>>,
    timed_out: bool,
}

fn run_topdown(bgp: &Bgp, complete: bool, deadline: Instant) -> SatReport {
    let ctx = RuleContext::new(bgp);
    let mut map = vec![FxPredicate::Subject; ctx.node_count()];
    // Position roles are assigned subjects first, then predicates, then
    // objects, so a node in several positions starts from the last
    // assignment (an object role for subject/object joins).
    for &[s, _, _] in &ctx.triples {
        map[s] = FxPredicate::Subject;
    }
    for &[_, p, _] in &ctx.triples {
        map[p] = FxPredicate::Property;
    }
    for &[_, _, o] in &ctx.triples {
        map[o] = FxPredicate::Object;
    }

    let mut state = TopDownState {
        ctx: &ctx,
        complete,
        deadline,
        tested: 0,
        seen: HashSet::new(),
        solutions: Vec::new(),
        timed_out: false,
    };
    search(&mut state, &map);

    let mut report = SatReport::new(Algorithm::TopDown, if complete { Mode::All } else { Mode::First });
    report.tested = state.tested;
    if state.timed_out {
        report.verdict = Verdict::Timeout;
    } else if state.solutions.is_empty() {
        report.verdict = Verdict::Unsatisfiable;
    } else {
        report.verdict = Verdict::Satisfiable;
        report.solutions = state.solutions.iter().map(|m| ctx.map_to_annotation(m)).collect();
    }
    report
}

/// Returns true when the search should unwind (first solution found or
/// deadline passed).
fn search(state: &mut TopDownState, map: &[FxPredicate]) -> bool {
    for node in 0..map.len() {
        for child in map[node].children() {
            if state.tested.is_multiple_of(64) && Instant::now() >= state.deadline {
                state.timed_out = true;
                return true;
            }
            let mut new_map = map.to_vec();
            new_map[node] = child;
            state.tested += 1;
            if !state.ctx.is_consistent(&new_map) {
                continue;
            }
            if new_map.iter().all(|p| p.is_ground()) {
                if solution_realizable(state.ctx, &new_map) && state.seen.insert(new_map.clone()) {
                    state.solutions.push(new_map);
                    if !state.complete {
                        return true;
                    }
                }
            } else if search(state, &new_map) {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Bottom-up enumeration
// ---------------------------------------------------------------------------

/// Ground candidates for every node, in canonical predicate order: the union
/// over the node's positions, with subjects collapsed to Container and
/// constant-property refinements applied per triple.
pub(crate) fn candidate_sets(ctx: &RuleContext) -> Vec<Vec<FxPredicate>> {
    let n = ctx.node_count();
    let mut sets: Vec<Vec<FxPredicate>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut wanted_tops = Vec::new();
        if ctx.in_subject[i] {
            wanted_tops.push(FxPredicate::Subject);
        }
        if ctx.in_predicate[i] {
            wanted_tops.push(FxPredicate::Property);
        }
        if ctx.in_object[i] {
            wanted_tops.push(FxPredicate::Object);
        }
        let set = GROUND_PREDICATES
            .iter()
            .copied()
            .filter(|p| p.tops().iter().any(|t| wanted_tops.contains(t)))
            .collect();
        sets.push(set);
    }

    // A node that is ever a subject can only be a container; this collapses
    // subject/object join candidates without changing the solution set.
    for i in 0..n {
        if ctx.in_subject[i] {
            sets[i].retain(|&p| p == FxPredicate::Container);
        }
    }

    // Constant-property refinements per triple.
    for (t, &[_, p, o]) in ctx.triples.iter().enumerate() {
        let _ = t;
        let pred_node = &ctx.nodes[p];
        if pred_node.kind != NodeKind::Iri {
            continue;
        }
        if classify_iri(&pred_node.label) == WellKnown::RdfType {
            sets[p].retain(|&c| c == FxPredicate::TypeProperty);
            sets[o].retain(|&c| c != FxPredicate::Container && c != FxPredicate::Value);
        } else {
            sets[o].retain(|&c| c != FxPredicate::Type && c != FxPredicate::FxRoot);
        }
    }
    sets
}

fn run_bottomup(bgp: &Bgp, complete: bool, deadline: Instant) -> SatReport {
    let ctx = RuleContext::new(bgp);
    let sets = candidate_sets(&ctx);
    let n = ctx.node_count();

    let mut report = SatReport::new(Algorithm::BottomUp, if complete { Mode::All } else { Mode::First });

    if sets.iter().any(|s| s.is_empty()) {
        report.verdict = Verdict::Unsatisfiable;
        return report;
    }

    let mut indices = vec![0usize; n];
    let mut map: Vec<FxPredicate> = indices.iter().enumerate().map(|(i, &k)| sets[i][k]).collect();
    let mut solutions: Vec<Vec<FxPredicate>> = Vec::new();
    let mut exhausted = false;

    while !exhausted {
        if report.tested.is_multiple_of(256) && Instant::now() >= deadline {
            report.verdict = Verdict::Timeout;
            report.solutions.clear();
            return report;
        }
        report.tested += 1;
        if ctx.is_consistent(&map) && solution_realizable(&ctx, &map) {
            solutions.push(map.clone());
            if !complete {
                break;
            }
        }
        // Advance the odometer; the last node varies fastest.
        exhausted = true;
        for i in (0..n).rev() {
            indices[i] += 1;
            if indices[i] < sets[i].len() {
                map[i] = sets[i][indices[i]];
                exhausted = false;
                break;
            }
            indices[i] = 0;
            map[i] = sets[i][0];
        }
        if n == 0 {
            break;
        }
    }

    if solutions.is_empty() {
        report.verdict = Verdict::Unsatisfiable;
    } else {
        report.verdict = Verdict::Satisfiable;
        report.solutions = solutions.iter().map(|m| ctx.map_to_annotation(m)).collect();
    }
    report
}
