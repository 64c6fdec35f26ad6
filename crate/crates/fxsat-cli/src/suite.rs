//! The curated benchmark suite: 27 BGPs of increasing size covering
//! satisfiable and unsatisfiable variants of each join family.
//!
//! The patterns are pinned as `.bgp` fixtures in the repository so the
//! expectations stay reviewable; labels encode the expected verdict (S/N),
//! the triple count, and the family (T plain triples, J joins, P paths to a
//! shared object, with R/C marking root or container targets). The
//! unsatisfiable patterns are reconstructions: each embeds the violation its
//! family name calls for.

use fxsat::{parse_bgp_text, Bgp};

/// One curated case with its pinned expectations.
#[derive(Debug, Clone)]
pub struct CuratedCase {
    pub label: String,
    pub bgp: Bgp,
    pub expected_satisfiable: bool,
    /// Complete-mode solution count, where analytically forced.
    pub expected_solution_count: Option<u64>,
    /// Complete-mode hypothesis count of the bottom-up algorithm, where
    /// analytically forced.
    pub expected_hypothesis_count: Option<u64>,
}

impl CuratedCase {
    /// Family letter for reports: T, J, or P; '-' for labels outside the
    /// curated naming scheme.
    pub fn family(&self) -> char {
        let scheme = self.label.starts_with("S_") || self.label.starts_with("N_");
        if !scheme {
            '-'
        } else if self.label.contains("P_") {
            'P'
        } else if self.label.ends_with('J') {
            'J'
        } else {
            'T'
        }
    }

    pub fn size(&self) -> usize {
        self.bgp.len()
    }
}

macro_rules! curated {
    ($label:literal, $sat:expr, $count:expr, $hyp:expr) => {
        CuratedCase {
            label: $label.to_string(),
            bgp: parse_bgp_text(include_str!(concat!(
                "../fixtures/curated/",
                $label,
                ".bgp"
            )))
            .expect("curated fixture parses")
            .with_label($label),
            expected_satisfiable: $sat,
            expected_solution_count: $count,
            expected_hypothesis_count: $hyp,
        }
    };
}

/// All 27 cases in label order.
pub fn curated_suite() -> Vec<CuratedCase> {
    vec![
        curated!("N_1T", false, None, None),
        curated!("N_2J", false, None, None),
        curated!("N_2P_R", false, None, None),
        curated!("N_2T", false, None, None),
        curated!("N_3J", false, None, None),
        curated!("N_3P_C", false, None, None),
        curated!("N_3P_R", false, None, None),
        curated!("N_3T", false, None, None),
        curated!("N_4J", false, None, None),
        curated!("N_4P_C", false, None, None),
        curated!("N_4T", false, None, None),
        curated!("N_5J", false, None, None),
        curated!("N_5P_C", false, None, None),
        curated!("N_5T", false, None, None),
        curated!("S_1T", true, Some(6), Some(12)),
        curated!("S_2J", true, Some(36), Some(144)),
        curated!("S_2P_R", true, Some(1), Some(36)),
        curated!("S_2T", true, Some(36), Some(144)),
        curated!("S_3J", true, Some(60), Some(432)),
        curated!("S_3P_C", true, Some(4), Some(18)),
        curated!("S_3T", true, Some(216), Some(1728)),
        curated!("S_4J", true, Some(300), Some(5184)),
        curated!("S_4P_C", true, Some(8), Some(54)),
        curated!("S_4T", true, Some(1296), Some(20736)),
        curated!("S_5J", true, None, None),
        curated!("S_5P_C", true, Some(16), Some(162)),
        curated!("S_5T", true, Some(7776), Some(248832)),
    ]
}
