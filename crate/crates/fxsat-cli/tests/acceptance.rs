//! Acceptance suite: one test per release criterion, each printing a
//! PASS line on success (run with `--nocapture` to see them).

use fxsat::annotate::{annotate_topdown, generate_bottomup};
use fxsat::oracle::{
    bgp_match, bgp_match_exists, build_witness, facadify_bytes, facadify_csv, find_witness,
    instances_isomorphic, materialize, mgraph, parse_nquads, validate_model,
    EntityMode, Term,
};
use fxsat::predicate::GROUND_PREDICATES;
use fxsat::rules::check;
use fxsat::structure::{has_cycle, has_unsupported_join};
use fxsat::term::{Bgp, PatternNode, TriplePattern};
use fxsat::{
    is_satisfiable, parse_bgp_text, sample, Algorithm, Annotation, FxPredicate, Mode, Verdict,
};
use fxsat_cli::curated_suite;
use std::time::{Duration, Instant};

const TIMEOUT: Duration = Duration::from_secs(5);
const FIGURE_CSV: &[u8] = include_bytes!("../fixtures/example1.csv");

/// Wall-clock assertions need the machine to themselves; acceptance tests
/// run one at a time.
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn bgp(text: &str) -> Bgp {
    parse_bgp_text(text).unwrap()
}

fn case(label: &str) -> fxsat_cli::CuratedCase {
    curated_suite().into_iter().find(|c| c.label == label).unwrap()
}

/// Full verdict gate on a fixed annotation: structural checks plus rules.
fn gate_passes(pattern: &Bgp, annotation: &Annotation) -> bool {
    !has_unsupported_join(pattern)
        && !has_cycle(pattern)
        && check(annotation, pattern).unwrap().consistent
}

#[test]
fn a01_triple_pattern_table() {
    let _serial = serial();
    let start = Instant::now();
    let pattern = bgp("?s ?p ?o .");
    let nodes: Vec<PatternNode> =
        ["s", "p", "o"].iter().map(|v| PatternNode::variable(*v)).collect();

    let mut passing = Vec::new();
    let mut total = 0;
    for &p in GROUND_PREDICATES.iter().filter(|p| p.tops().contains(&FxPredicate::Property)) {
        for &o in GROUND_PREDICATES.iter().filter(|p| p.tops().contains(&FxPredicate::Object)) {
            total += 1;
            let annotation: Annotation = nodes
                .iter()
                .cloned()
                .zip([FxPredicate::Container, p, o])
                .collect();
            if gate_passes(&pattern, &annotation) {
                passing.push((p, o));
            }
        }
    }
    assert_eq!(total, 12);
    let expected = [
        (FxPredicate::SlotNumber, FxPredicate::Value),
        (FxPredicate::SlotNumber, FxPredicate::Container),
        (FxPredicate::SlotString, FxPredicate::Value),
        (FxPredicate::SlotString, FxPredicate::Container),
        (FxPredicate::TypeProperty, FxPredicate::Type),
        (FxPredicate::TypeProperty, FxPredicate::FxRoot),
    ];
    assert_eq!(passing.len(), 6, "satisfiable rows: {passing:?}");
    for row in expected {
        assert!(passing.contains(&row), "missing row {row:?}");
    }
    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
    println!("[acceptance] A1 triple-pattern table (6 of 12 rows satisfiable): PASS");
}

/// The six satisfiable triple-pattern shapes as (property, object) roles.
#[derive(Clone, Copy, PartialEq, Debug)]
struct FxTp(FxPredicate, FxPredicate);

const SNV: FxTp = FxTp(FxPredicate::SlotNumber, FxPredicate::Value);
const SNC: FxTp = FxTp(FxPredicate::SlotNumber, FxPredicate::Container);
const SSV: FxTp = FxTp(FxPredicate::SlotString, FxPredicate::Value);
const SSC: FxTp = FxTp(FxPredicate::SlotString, FxPredicate::Container);
const TPT: FxTp = FxTp(FxPredicate::TypeProperty, FxPredicate::Type);
const TPR: FxTp = FxTp(FxPredicate::TypeProperty, FxPredicate::FxRoot);

#[derive(Clone, Copy, PartialEq, Debug)]
enum Join {
    SS,
    PP,
    SO,
    OO,
}

/// Builds the two-triple all-variable BGP for a join shape and the
/// annotation induced by assigning pattern `a` to the first triple and `b`
/// to the second. Returns None when the shared node would need two
/// different roles, which already decides unsatisfiability.
fn join_case(a: FxTp, b: FxTp, join: Join) -> Option<(Bgp, Annotation)> {
    let v = PatternNode::variable;
    let (t1, t2): ([PatternNode; 3], [PatternNode; 3]) = match join {
        Join::SS => ([v("j"), v("p1"), v("o1")], [v("j"), v("p2"), v("o2")]),
        Join::PP => ([v("s1"), v("j"), v("o1")], [v("s2"), v("j"), v("o2")]),
        // Subject of the first pattern joined with the object of the second.
        Join::SO => ([v("j"), v("p1"), v("o1")], [v("s2"), v("p2"), v("j")]),
        Join::OO => ([v("s1"), v("p1"), v("j")], [v("s2"), v("p2"), v("j")]),
    };
    let pattern = Bgp::new(vec![
        TriplePattern::new(t1[0].clone(), t1[1].clone(), t1[2].clone()),
        TriplePattern::new(t2[0].clone(), t2[1].clone(), t2[2].clone()),
    ]);
    let roles1 = [FxPredicate::Container, a.0, a.1];
    let roles2 = [FxPredicate::Container, b.0, b.1];
    let mut annotation = Annotation::new();
    for (nodes, roles) in [(&t1, roles1), (&t2, roles2)] {
        for (node, role) in nodes.iter().zip(roles) {
            if let Some(existing) = annotation.get(node) {
                if existing != role {
                    return None;
                }
            }
            annotation.insert(node.clone(), role);
        }
    }
    Some((pattern, annotation))
}

#[test]
fn a02_join_table() {
    let _serial = serial();
    use Join::*;
    let start = Instant::now();
    // The 21 pattern pairs with their admissible joins.
    let table: [(FxTp, FxTp, &[Join]); 21] = [
        (SNV, SNV, &[SS, PP, OO]),
        (SNV, SSV, &[SS, OO]),
        (SNV, SSC, &[SS, SO]),
        (SNV, TPT, &[SS]),
        (SNV, TPR, &[SS]),
        (SNC, SNV, &[SS, PP]),
        (SNC, SNC, &[SS, PP, SO, OO]),
        (SNC, SSV, &[SS]),
        (SNC, SSC, &[SS, SO, OO]),
        (SNC, TPT, &[SS]),
        (SNC, TPR, &[SS]),
        (SSV, SSV, &[SS, PP, OO]),
        (SSV, TPT, &[SS]),
        (SSV, TPR, &[SS]),
        (SSC, SSV, &[SS, PP]),
        (SSC, SSC, &[SS, PP, SO, OO]),
        (SSC, TPT, &[SS]),
        (SSC, TPR, &[SS]),
        (TPT, TPT, &[SS, PP, OO]),
        (TPR, TPT, &[SS, PP]),
        (TPR, TPR, &[SS, PP, OO]),
    ];

    for (a, b, listed) in table {
        for join in [SS, PP, SO, OO] {
            let satisfiable = match join_case(a, b, join) {
                None => false,
                Some((pattern, annotation)) => gate_passes(&pattern, &annotation),
            };
            assert_eq!(
                satisfiable,
                listed.contains(&join),
                "{a:?} vs {b:?} under {join:?}"
            );
        }
    }

    // Property joins against subjects or objects never have a solution,
    // whatever the patterns.
    assert!(has_unsupported_join(&bgp("?j ?p1 ?o1 . ?s2 ?j ?o2 .")));
    assert!(has_unsupported_join(&bgp("?s1 ?j ?o1 . ?s2 ?p2 ?j .")));

    assert!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
    println!("[acceptance] A2 join table (21 rows x 4 joins, S-P and P-O always empty): PASS");
}

#[test]
fn a03_proxy_graphs() {
    let _serial = serial();
    let proxies = [
        "<http://ex/i1> xyz:s <http://ex/i2> . <http://ex/i3> a <http://ex/i1> .",
        "<http://ex/i1> rdf:_1 \"a\" . <http://ex/i1> rdf:_1 <http://ex/i2> .",
        "<http://ex/i1> rdf:_1 <http://ex/i2> . <http://ex/i1> rdf:_1 <http://ex/i3> .",
        "<http://ex/i1> rdf:_1 \"1\" . <http://ex/i1> rdf:_1 \"2\" .",
        "<http://ex/i1> rdf:_1 <http://ex/i1> .",
        "<http://ex/i1> rdf:_1 <http://ex/i2> . <http://ex/i2> rdf:_1 <http://ex/i3> . <http://ex/i3> rdf:_1 <http://ex/i1> .",
        "<http://ex/i1> rdf:_1 <http://ex/i2> . <http://ex/i1> rdf:_2 <http://ex/i2> .",
        "<http://ex/i1> a fx:root . <http://ex/i2> rdf:_1 <http://ex/i1> .",
        "<http://ex/i1> a fx:root . <http://ex/i2> a fx:root .",
    ];
    assert_eq!(proxies.len(), 9);
    for text in proxies {
        let pattern = bgp(text);
        for algorithm in [Algorithm::TopDown, Algorithm::BottomUp] {
            let report = is_satisfiable(&pattern, algorithm, Mode::First, TIMEOUT);
            assert_eq!(report.verdict, Verdict::Unsatisfiable, "{text} via {algorithm}");
        }
    }
    println!("[acceptance] A3 proxy graphs (9 patterns unsatisfiable under both algorithms): PASS");
}

#[test]
fn a04_running_example() {
    let _serial = serial();
    let listing1 = bgp(include_str!("../fixtures/listing1.bgp"));
    let listing2 = bgp(include_str!("../fixtures/listing2.bgp"));
    let report1 = is_satisfiable(&listing1, Algorithm::BottomUp, Mode::First, TIMEOUT);
    assert_eq!(report1.verdict, Verdict::Satisfiable);
    let report2 = is_satisfiable(&listing2, Algorithm::BottomUp, Mode::First, TIMEOUT);
    assert_eq!(report2.verdict, Verdict::Unsatisfiable);

    let instance = facadify_csv(FIGURE_CSV, "urn:example1").unwrap();
    let quads = materialize(&instance, EntityMode::BlankNodes);

    let solutions = bgp_match(&listing1, &quads);
    assert_eq!(solutions.len(), 1, "expected exactly one binding");
    assert_eq!(
        solutions[0].get(&PatternNode::variable("surname")),
        Some(&Term::Literal { lexical: "Grey".into(), datatype: None })
    );
    assert!(bgp_match(&listing2, &quads).is_empty());
    println!("[acceptance] A4 running example (satisfiable lookup binds \"Grey\" once, type join empty): PASS");
}

#[test]
fn a05_solution_counts() {
    let _serial = serial();
    for case in curated_suite() {
        let (Some(found), Some(hypotheses)) =
            (case.expected_solution_count, case.expected_hypothesis_count)
        else {
            continue;
        };
        let report = generate_bottomup(&case.bgp, true, TIMEOUT);
        assert_eq!(report.verdict, Verdict::Satisfiable, "{}", case.label);
        assert_eq!(report.solutions.len() as u64, found, "{} solutions", case.label);
        assert_eq!(report.tested, hypotheses, "{} hypotheses", case.label);
    }
    println!("[acceptance] A5 bottom-up complete counts match on all twelve pinned cases: PASS");
}

#[test]
fn a06_curated_verdicts() {
    let _serial = serial();
    for case in curated_suite() {
        let report = is_satisfiable(&case.bgp, Algorithm::BottomUp, Mode::First, TIMEOUT);
        let expected =
            if case.expected_satisfiable { Verdict::Satisfiable } else { Verdict::Unsatisfiable };
        assert_eq!(report.verdict, expected, "{}", case.label);
        assert!(report.elapsed < TIMEOUT, "{} exceeded the budget", case.label);
    }
    println!("[acceptance] A6 all 27 curated verdicts correct under bottom-up, no timeouts: PASS");
}

#[test]
fn a07_timing_envelope() {
    let _serial = serial();
    let case = case("S_5T");
    let report = generate_bottomup(&case.bgp, true, TIMEOUT);
    assert_eq!(report.verdict, Verdict::Satisfiable);
    assert_eq!(report.solutions.len(), 7776);
    assert!(report.elapsed < TIMEOUT, "S_5T complete took {:?}", report.elapsed);
    println!(
        "[acceptance] A7 bottom-up all-solutions on S_5T in {:?} (< 5 s): PASS",
        report.elapsed
    );
}

#[test]
fn a08_topdown_behavior() {
    let _serial = serial();
    // First-solution mode succeeds quickly on the small satisfiable cases,
    // and all-solutions mode completes them with the full counts.
    for (label, count) in [("S_1T", 6), ("S_2J", 36), ("S_2P_R", 1), ("S_2T", 36)] {
        let report = annotate_topdown(&case(label).bgp, false, TIMEOUT);
        assert_eq!(report.verdict, Verdict::Satisfiable, "{label} first-solution");
        let all = annotate_topdown(&case(label).bgp, true, TIMEOUT);
        assert_eq!(all.verdict, Verdict::Satisfiable, "{label} all-solutions");
        assert_eq!(all.solutions.len(), count, "{label} all-solutions count");
    }

    // All-solutions mode must hit the 5 s wall on every hard case.
    let gray = ["S_3J", "S_3P_C", "S_3T", "S_4J", "S_4P_C", "S_4T", "S_5P_C", "S_5T"];
    let mut completed = Vec::new();
    for label in gray {
        let report = annotate_topdown(&case(label).bgp, true, TIMEOUT);
        println!(
            "  top-down all on {label}: {} after {} checks in {:?}",
            report.verdict, report.tested, report.elapsed
        );
        if report.verdict != Verdict::Timeout {
            completed.push((label, report.elapsed));
        }
    }
    assert!(
        completed.is_empty(),
        "top-down all-solutions finished {completed:?} within the 5 s budget; \
         this runtime evaluates candidate annotations several times faster than \
         the reference measurements, so the borderline case(s) above fit inside \
         the wall instead of timing out"
    );
    println!("[acceptance] A8 top-down first-solution succeeds on small cases, all-solutions times out on hard cases: PASS");
}

#[test]
fn a09_mapping_fidelity() {
    let _serial = serial();
    let instance = facadify_csv(FIGURE_CSV, "urn:example1").unwrap();
    let quads = materialize(&instance, EntityMode::BlankNodes);
    let golden = parse_nquads(include_str!("../fixtures/listing_example1.nt")).unwrap();
    assert!(mgraph::isomorphic(&quads, &golden), "materialized CSV differs from the reference graph");
    let root_typings = quads
        .iter()
        .filter(|q| {
            q.predicate == fxsat::term::RDF_TYPE
                && q.object == Term::Iri(fxsat::term::FX_ROOT.to_string())
        })
        .count();
    assert_eq!(root_typings, 1);
    assert_eq!(quads.len(), golden.len());
    println!("[acceptance] A9 figure-1 CSV materializes isomorphic to the reference graph: PASS");
}

#[test]
fn a10_model_axioms_and_mgraph_theorems() {
    let _serial = serial();
    let start = Instant::now();
    let corpus = sample::corpus(20250809, 50);
    assert_eq!(corpus.len(), 50);
    for file in &corpus {
        let instance = facadify_bytes(&file.bytes, file.format, &format!("urn:{}", file.name))
            .unwrap_or_else(|e| panic!("{}: {e}", file.name));
        let violations = validate_model(&instance);
        assert!(violations.is_empty(), "{}: {violations:?}", file.name);

        let quads = materialize(&instance, EntityMode::BlankNodes);
        assert!(mgraph::is_connected(&quads), "{} not connected", file.name);
        assert!(mgraph::is_acyclic(&quads), "{} cyclic", file.name);
        assert!(mgraph::has_single_root(&quads), "{} root count", file.name);
        assert!(mgraph::has_unique_root_paths(&quads), "{} path uniqueness", file.name);
        let shapes = mgraph::quad_shape_violations(&quads);
        assert!(shapes.is_empty(), "{}: {shapes:?}", file.name);

        // Round trip through the mapping rules.
        let rebuilt = fxsat::oracle::from_quads(&quads).unwrap();
        assert!(instances_isomorphic(&instance, &rebuilt), "{} round trip", file.name);
    }
    assert!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
    println!("[acceptance] A10 model axioms and m-graph theorems hold on all 50 corpus files: PASS");
}

#[test]
fn a11_oracle_soundness_completeness() {
    let _serial = serial();
    let corpus_graphs: Vec<Vec<fxsat::oracle::FxQuad>> = sample::corpus(424242, 50)
        .iter()
        .map(|file| {
            let instance =
                facadify_bytes(&file.bytes, file.format, &format!("urn:{}", file.name)).unwrap();
            materialize(&instance, EntityMode::BlankNodes)
        })
        .collect();

    let mut rng = sample::rng(99);
    let mut satisfiable = 0;
    let mut unsatisfiable = 0;
    for index in 0..500 {
        let pattern = sample::random_bgp(&mut rng, 6);
        let report = is_satisfiable(&pattern, Algorithm::BottomUp, Mode::First, TIMEOUT);
        match report.verdict {
            Verdict::Timeout => panic!("case {index} timed out: {pattern}"),
            Verdict::Unsatisfiable => {
                unsatisfiable += 1;
                for (g, quads) in corpus_graphs.iter().enumerate() {
                    assert!(
                        !bgp_match_exists(&pattern, quads),
                        "case {index} judged unsatisfiable but matches corpus graph {g}:\n{pattern}"
                    );
                }
            }
            Verdict::Satisfiable => {
                satisfiable += 1;
                let witness = report
                    .solutions
                    .first()
                    .and_then(|s| build_witness(&pattern, s).ok())
                    .or_else(|| find_witness(&pattern, TIMEOUT).map(|(_, i)| i));
                let instance = witness
                    .unwrap_or_else(|| panic!("case {index}: no witness instance:\n{pattern}"));
                assert!(validate_model(&instance).is_empty(), "case {index} witness invalid");
                let quads = materialize(&instance, EntityMode::BlankNodes);
                assert!(
                    bgp_match_exists(&pattern, &quads),
                    "case {index} witness graph has no match:\n{pattern}"
                );
            }
        }
    }
    assert!(satisfiable > 50 && unsatisfiable > 50, "generator skew: {satisfiable}/{unsatisfiable}");
    println!(
        "[acceptance] A11 oracle agreement on 500 random patterns ({satisfiable} satisfiable, {unsatisfiable} unsatisfiable): PASS"
    );
}

#[test]
fn a12_check_is_faster_than_materialize_and_match() {
    let _serial = serial();
    // A 10k-row CSV, materialized and queried by brute force.
    let mut csv = String::from("id,name,score\n");
    for i in 0..10_000 {
        csv.push_str(&format!("{i},row{i},{}\n", i % 97));
    }
    let lookup = bgp("_:row rdf:_2 \"row77\" . _:row rdf:_3 ?score .");

    let oracle_start = Instant::now();
    let instance = facadify_csv(csv.as_bytes(), "urn:large").unwrap();
    let quads = materialize(&instance, EntityMode::BlankNodes);
    let matches = bgp_match(&lookup, &quads);
    let oracle_elapsed = oracle_start.elapsed();
    assert_eq!(matches.len(), 1);

    let mut slowest_check = Duration::ZERO;
    for case in curated_suite() {
        let report = is_satisfiable(&case.bgp, Algorithm::BottomUp, Mode::First, TIMEOUT);
        slowest_check = slowest_check.max(report.elapsed);
    }
    assert!(
        slowest_check * 10 <= oracle_elapsed,
        "slowest check {slowest_check:?} not 10x faster than materialize+match {oracle_elapsed:?}"
    );
    println!(
        "[acceptance] A12 slowest curated check ({slowest_check:?}) is >=10x faster than materialize+match ({oracle_elapsed:?}): PASS"
    );
}
