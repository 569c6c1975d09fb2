//! Brute-force verifiers for the theorems the library relies on, and the
//! census driver.
//!
//! Each verifier sweeps a finite universe, enforces the exact hypotheses of
//! the statement it checks and records every counterexample. The helpers
//! here deliberately avoid the library's search shortcuts (translation
//! normalisation, subgroup scans) so they can serve as references.

mod additive;
mod census;
mod isoperimetric;

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::group::Group;

pub use additive::{verify_dichotomy, verify_kemperman, verify_kneser, verify_scherk, verify_vosper_prime};
pub use census::{
    run_census, CensusMode, CensusOptions, CensusRecord, CensusSummary, GroupTally, HyperAtomKey, CENSUS_SCHEMA,
    DEFAULT_SAMPLES, EXHAUSTIVE_LIMIT, EXHAUSTIVE_ORDER,
};
pub use isoperimetric::verify_isoperimetry;

/// Violations kept verbatim in a report; the count stays exact.
pub const MAX_RECORDED_VIOLATIONS: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub universe: String,
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Value>,
    pub elapsed: f64,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Accumulates one report.
pub(crate) struct Tally {
    theorem_id: String,
    universe: String,
    checked: u64,
    violation_count: u64,
    violations: Vec<Value>,
    started: Instant,
}

impl Tally {
    pub(crate) fn new(theorem_id: impl Into<String>, universe: impl Into<String>) -> Tally {
        Tally {
            theorem_id: theorem_id.into(),
            universe: universe.into(),
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            started: Instant::now(),
        }
    }

    pub(crate) fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.fail(detail());
        }
    }

    pub(crate) fn fail(&mut self, detail: Value) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(detail);
        }
    }

    pub(crate) fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_RECORDED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }

    pub(crate) fn finish(self) -> TheoremReport {
        TheoremReport {
            theorem_id: self.theorem_id,
            universe: self.universe,
            checked: self.checked,
            violation_count: self.violation_count,
            violations: self.violations,
            elapsed: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Sorted element indices of a mask, for counterexample records.
pub(crate) fn mask_json(g: &Group, bits: u64) -> Value {
    Value::Array(
        (0..g.order())
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| Value::String(g.render_element(g.element(i).expect("in range"))))
            .collect(),
    )
}

/// Smallest-cardinality naive helpers shared by the verifiers.
pub(crate) mod naive {
    use crate::group::Group;

    pub fn sumset(g: &Group, a: u64, b: u64) -> u64 {
        let mut out = 0;
        for i in 0..g.order() {
            if a >> i & 1 == 0 {
                continue;
            }
            for j in 0..g.order() {
                if b >> j & 1 == 1 {
                    let x = g.element(i).unwrap();
                    let y = g.element(j).unwrap();
                    out |= 1u64 << g.add(x, y).index();
                }
            }
        }
        out
    }

    pub fn translate(g: &Group, a: u64, t: usize) -> u64 {
        sumset(g, a, 1u64 << t)
    }

    /// Stabiliser `{h : A + h = A}` as a mask.
    pub fn period(g: &Group, a: u64) -> u64 {
        (0..g.order()).filter(|&h| translate(g, a, h) == a).fold(0, |m, h| m | 1u64 << h)
    }

    pub fn rep_count(g: &Group, a: u64, b: u64, c: usize) -> usize {
        let cx = g.element(c).unwrap();
        (0..g.order())
            .filter(|&i| a >> i & 1 == 1)
            .filter(|&i| b >> g.sub(cx, g.element(i).unwrap()).index() & 1 == 1)
            .count()
    }

    /// Differences `d` such that `A` is `{a, a+d, ..., a+(m-1)d}` with the
    /// terms distinct; singletons are progressions of every difference.
    pub fn ap_differences(g: &Group, a: u64) -> u64 {
        let m = a.count_ones() as usize;
        let mut out = 0;
        for d in 0..g.order() {
            let dx = g.element(d).unwrap();
            let ok = (0..g.order()).filter(|&s| a >> s & 1 == 1).any(|s| {
                let mut x = g.element(s).unwrap();
                let mut seen = 0u64;
                for _ in 0..m {
                    seen |= 1u64 << x.index();
                    x = g.add(x, dx);
                }
                seen == a
            });
            if ok {
                out |= 1u64 << d;
            }
        }
        out
    }

    pub fn is_subgroup(g: &Group, h: u64) -> bool {
        h & 1 == 1 && sumset(g, h, h) == h
    }
}
