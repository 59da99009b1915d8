//! Bundled puzzle programs with their expected preferred models.
//!
//! Each entry is a base program plus variation fragments. Expected models
//! are stored projected: the `t`/`top` atoms of a few predicates and every
//! `top` atom.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::semantics::{Interpretation, Projection};

const JOBS_BASE: &str = include_str!("../data/corpus/jobs/base.apc");
const JOBS_V1: &str = include_str!("../data/corpus/jobs/v1.apc");
const JOBS_V2: &str = include_str!("../data/corpus/jobs/v2.apc");
const JOBS_V3: &str = include_str!("../data/corpus/jobs/v3.apc");
const JOBS_HUSBAND: &str = include_str!("../data/corpus/jobs/husband.apc");
const ZEBRA_BASE: &str = include_str!("../data/corpus/zebra/base.apc");
const ZEBRA_V1: &str = include_str!("../data/corpus/zebra/v1.apc");
const ZEBRA_V2: &str = include_str!("../data/corpus/zebra/v2.apc");
const ZEBRA_V3: &str = include_str!("../data/corpus/zebra/v3.apc");
const MARATHON_BASE: &str = include_str!("../data/corpus/marathon/base.apc");
const MARATHON_V1: &str = include_str!("../data/corpus/marathon/v1.apc");
const MARATHON_V2: &str = include_str!("../data/corpus/marathon/v2.apc");
const MARATHON_V3: &str = include_str!("../data/corpus/marathon/v3.apc");

macro_rules! expected {
    ($p:literal, $v:literal) => {
        include_str!(concat!("../data/corpus/", $p, "/", $v, ".expected.json"))
    };
}

/// One puzzle variation.
#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub puzzle: &'static str,
    pub variation: &'static str,
    parts: &'static [&'static str],
    projection: &'static str,
    expected: &'static str,
}

/// Expected preferred models, projected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub projection: Vec<String>,
    pub count: usize,
    pub models: Vec<ExpectedModel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedModel {
    pub atoms: BTreeMap<String, String>,
}

static ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        puzzle: "jobs",
        variation: "base",
        parts: &[JOBS_BASE],
        projection: "hold/2",
        expected: expected!("jobs", "base"),
    },
    CorpusEntry {
        puzzle: "jobs",
        variation: "v1",
        parts: &[JOBS_BASE, JOBS_V1],
        projection: "hold/2",
        expected: expected!("jobs", "v1"),
    },
    CorpusEntry {
        puzzle: "jobs",
        variation: "v2",
        parts: &[JOBS_BASE, JOBS_V2],
        projection: "hold/2,husband/2",
        expected: expected!("jobs", "v2"),
    },
    CorpusEntry {
        puzzle: "jobs",
        variation: "v3",
        parts: &[JOBS_BASE, JOBS_HUSBAND, JOBS_V3],
        projection: "hold/2",
        expected: expected!("jobs", "v3"),
    },
    CorpusEntry {
        puzzle: "jobs",
        variation: "v4_1",
        parts: &[JOBS_BASE, JOBS_V1, JOBS_HUSBAND],
        projection: "hold/2,husband/2",
        expected: expected!("jobs", "v4_1"),
    },
    CorpusEntry {
        puzzle: "jobs",
        variation: "v4_2",
        parts: &[JOBS_BASE, JOBS_V2, JOBS_HUSBAND],
        projection: "hold/2,husband/2",
        expected: expected!("jobs", "v4_2"),
    },
    CorpusEntry {
        puzzle: "zebra",
        variation: "base",
        parts: &[ZEBRA_BASE],
        projection: "tuple/6",
        expected: expected!("zebra", "base"),
    },
    CorpusEntry {
        puzzle: "zebra",
        variation: "v1",
        parts: &[ZEBRA_BASE, ZEBRA_V1],
        projection: "tuple/6",
        expected: expected!("zebra", "v1"),
    },
    CorpusEntry {
        puzzle: "zebra",
        variation: "v2",
        parts: &[ZEBRA_BASE, ZEBRA_V2],
        projection: "tuple/6",
        expected: expected!("zebra", "v2"),
    },
    CorpusEntry {
        puzzle: "zebra",
        variation: "v3",
        parts: &[ZEBRA_BASE, ZEBRA_V3],
        projection: "tuple/6",
        expected: expected!("zebra", "v3"),
    },
    CorpusEntry {
        puzzle: "marathon",
        variation: "base",
        parts: &[MARATHON_BASE],
        projection: "has_position/2",
        expected: expected!("marathon", "base"),
    },
    CorpusEntry {
        puzzle: "marathon",
        variation: "v1",
        parts: &[MARATHON_BASE, MARATHON_V1],
        projection: "has_position/2",
        expected: expected!("marathon", "v1"),
    },
    CorpusEntry {
        puzzle: "marathon",
        variation: "v2",
        parts: &[MARATHON_BASE, MARATHON_V2],
        projection: "has_position/2",
        expected: expected!("marathon", "v2"),
    },
    CorpusEntry {
        puzzle: "marathon",
        variation: "v3",
        parts: &[MARATHON_BASE, MARATHON_V3],
        projection: "has_position/2",
        expected: expected!("marathon", "v3"),
    },
];

/// Every bundled entry.
pub fn entries() -> &'static [CorpusEntry] {
    ENTRIES
}

/// Looks up `puzzle` or `puzzle:variation`; the variation defaults to `base`.
pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    let (puzzle, variation) = name.split_once(':').unwrap_or((name, "base"));
    ENTRIES
        .iter()
        .find(|e| e.puzzle == puzzle && e.variation == variation)
}

impl CorpusEntry {
    /// `puzzle:variation`.
    pub fn name(&self) -> String {
        format!("{}:{}", self.puzzle, self.variation)
    }

    /// Program text with the variation fragments appended.
    pub fn source(&self) -> String {
        self.parts.join("\n")
    }

    pub fn projection(&self) -> Projection {
        Projection::parse(self.projection).expect("corpus projection")
    }

    pub fn expected(&self) -> Expected {
        serde_json::from_str(self.expected).expect("corpus golden file")
    }

    /// Projects `models` and compares them to the expected ones as a
    /// multiset. Returns a description of the first mismatch.
    pub fn check(&self, models: &[Interpretation]) -> Result<(), String> {
        let proj = self.projection();
        let mut got: Vec<BTreeMap<String, String>> =
            models.iter().map(|m| m.project(&proj).to_json_map()).collect();
        let mut want: Vec<BTreeMap<String, String>> =
            self.expected().models.into_iter().map(|m| m.atoms).collect();
        got.sort();
        want.sort();
        if got.len() != want.len() {
            return Err(format!(
                "{}: expected {} models, got {}",
                self.name(),
                want.len(),
                got.len()
            ));
        }
        for (g, w) in got.iter().zip(&want) {
            if g != w {
                let missing: Vec<String> = w
                    .iter()
                    .filter(|(k, v)| g.get(*k) != Some(*v))
                    .map(|(k, v)| format!("{k} : {v}"))
                    .collect();
                let extra: Vec<String> = g
                    .iter()
                    .filter(|(k, v)| w.get(*k) != Some(*v))
                    .map(|(k, v)| format!("{k} : {v}"))
                    .collect();
                return Err(format!(
                    "{}: model mismatch, missing [{}], unexpected [{}]",
                    self.name(),
                    missing.join(", "),
                    extra.join(", ")
                ));
            }
        }
        Ok(())
    }

    /// Builds the golden record for `models`.
    pub fn describe(&self, models: &[Interpretation]) -> Expected {
        let proj = self.projection();
        let mut ms: Vec<BTreeMap<String, String>> =
            models.iter().map(|m| m.project(&proj).to_json_map()).collect();
        ms.sort();
        Expected {
            projection: proj
                .predicates
                .iter()
                .map(|(n, a)| a.map_or(n.clone(), |a| format!("{n}/{a}")))
                .collect(),
            count: ms.len(),
            models: ms.into_iter().map(|atoms| ExpectedModel { atoms }).collect(),
        }
    }
}
