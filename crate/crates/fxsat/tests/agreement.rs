//! Cross-validation properties: the two annotation algorithms agree, the
//! cycle gate agrees with an independent graph library, and structural
//! rejections imply empty oracle results.

use fxsat::oracle::{bgp_match_exists, facadify_bytes, materialize, EntityMode, FxQuad};
use fxsat::structure::{has_cycle, has_unsupported_join};
use fxsat::{is_satisfiable, sample, Algorithm, Annotation, Bgp, Mode, Verdict};
use std::collections::BTreeSet;
use std::time::Duration;

const TIMEOUT: Duration = Duration::from_secs(5);

#[test]
fn cycle_gate_agrees_with_petgraph_on_1000_random_bgps() {
    use petgraph::algo::is_cyclic_directed;
    use petgraph::graph::DiGraph;

    let mut rng = sample::rng(5);
    for _ in 0..1000 {
        let pattern = sample::random_bgp(&mut rng, 8);
        let mut graph = DiGraph::<(), ()>::new();
        let mut index = std::collections::HashMap::new();
        for t in &pattern.triples {
            for node in [&t.subject, &t.object] {
                index.entry(node.clone()).or_insert_with(|| graph.add_node(()));
            }
            graph.add_edge(index[&t.subject], index[&t.object], ());
        }
        assert_eq!(
            has_cycle(&pattern),
            is_cyclic_directed(&graph),
            "disagreement on:\n{pattern}"
        );
    }
}

#[test]
fn algorithms_agree_on_verdicts_and_complete_solution_sets() {
    let budget = Duration::from_millis(800);
    let mut rng = sample::rng(17);
    let mut compared = 0;
    for _ in 0..40 {
        let pattern = sample::random_bgp(&mut rng, 2);
        let top = is_satisfiable(&pattern, Algorithm::TopDown, Mode::All, budget);
        let bottom = is_satisfiable(&pattern, Algorithm::BottomUp, Mode::All, budget);
        if top.verdict == Verdict::Timeout || bottom.verdict == Verdict::Timeout {
            continue;
        }
        compared += 1;
        assert_eq!(top.verdict, bottom.verdict, "verdicts differ on:\n{pattern}");
        let top_set: BTreeSet<Annotation> = top.solutions.into_iter().collect();
        let bottom_set: BTreeSet<Annotation> = bottom.solutions.into_iter().collect();
        assert_eq!(top_set, bottom_set, "solution sets differ on:\n{pattern}");
    }
    assert!(compared > 20, "only {compared} cases finished inside the budget");

    // First-solution verdicts agree on larger patterns too.
    for _ in 0..100 {
        let pattern = sample::random_bgp(&mut rng, 3);
        let top = is_satisfiable(&pattern, Algorithm::TopDown, Mode::First, budget);
        let bottom = is_satisfiable(&pattern, Algorithm::BottomUp, Mode::First, budget);
        if top.verdict == Verdict::Timeout || bottom.verdict == Verdict::Timeout {
            continue;
        }
        assert_eq!(top.verdict, bottom.verdict, "verdicts differ on:\n{pattern}");
    }
}

#[test]
fn unsupported_joins_never_match_any_corpus_graph() {
    let graphs: Vec<Vec<FxQuad>> = sample::corpus(7, 12)
        .iter()
        .map(|f| {
            let instance = facadify_bytes(&f.bytes, f.format, "urn:c").unwrap();
            materialize(&instance, EntityMode::BlankNodes)
        })
        .collect();

    // Force property collisions: reuse a subject or object node as the
    // predicate of one triple.
    let mut rng = sample::rng(23);
    let mut hits = 0;
    for _ in 0..100 {
        let mut pattern = sample::random_bgp(&mut rng, 5);
        let donor = pattern
            .triples
            .iter()
            .flat_map(|t| [t.subject.clone(), t.object.clone()])
            .find(|n| n.kind == fxsat::NodeKind::Variable);
        let (Some(node), Some(first)) = (donor, pattern.triples.first_mut()) else {
            continue;
        };
        first.predicate = node;
        assert!(has_unsupported_join(&pattern), "no collision in:\n{pattern}");
        hits += 1;
        for quads in &graphs {
            assert!(!bgp_match_exists(&pattern, quads), "matched:\n{pattern}");
        }
    }
    assert!(hits > 50, "too few collision patterns built: {hits}");
}

#[test]
fn satisfiable_verdicts_are_monotone_under_constant_relaxation() {
    // Replacing every constant by a fresh variable never turns a
    // satisfiable pattern unsatisfiable.
    let mut rng = sample::rng(31);
    for _ in 0..200 {
        let pattern = sample::random_bgp(&mut rng, 4);
        let report = is_satisfiable(&pattern, Algorithm::BottomUp, Mode::First, TIMEOUT);
        if report.verdict != Verdict::Satisfiable {
            continue;
        }
        let mut fresh = 0;
        let relaxed = Bgp::new(
            pattern
                .triples
                .iter()
                .map(|t| {
                    let mut relax = |n: &fxsat::PatternNode| {
                        if n.is_constant() {
                            fresh += 1;
                            fxsat::PatternNode::variable(format!("fresh{fresh}"))
                        } else {
                            n.clone()
                        }
                    };
                    fxsat::TriplePattern::new(
                        relax(&t.subject),
                        relax(&t.predicate),
                        relax(&t.object),
                    )
                })
                .collect(),
        );
        let relaxed_report = is_satisfiable(&relaxed, Algorithm::BottomUp, Mode::First, TIMEOUT);
        assert_eq!(
            relaxed_report.verdict,
            Verdict::Satisfiable,
            "relaxation flipped:\n{pattern}\ninto\n{relaxed}"
        );
    }
}
