//! Census of critical pairs over all groups up to a given order.
//!
//! Groups of order at most [`EXHAUSTIVE_ORDER`] are swept pair by pair in
//! exhaustive mode; larger ones (and every group in sample mode) get a
//! fixed number of pairs drawn from a seeded ChaCha stream. Records come
//! out in a fixed order whatever the worker count.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{all_groups_up_to, Group};
use crate::isoperimetry::hyper_atom;
use crate::kemperman::{
    build_certificate_with, check_condition_i, is_prime, verify_certificate_with, ElementaryPair, KempermanCertificate,
    PairTag, Sp4Rule,
};
use crate::set::GroupSubset;
use crate::wire::{certificate_json, set_json};

pub const CENSUS_SCHEMA: &str = "census/1";
/// Largest order swept exhaustively.
pub const EXHAUSTIVE_ORDER: usize = 10;
/// Largest `max_order` accepted in exhaustive mode.
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Largest order for which hyper-atom sizes are tallied.
pub const HYPER_ATOM_ORDER: usize = 16;
pub const DEFAULT_SAMPLES: usize = 2000;

const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    /// Every pair for `|G| <= 10`, `samples` seeded pairs above that.
    Exhaustive {
        samples: usize,
        seed: u64,
    },
    Sample {
        samples: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub max_order: usize,
    pub mode: CensusMode,
    /// Emit records for pairs failing condition (I) as well.
    pub all_pairs: bool,
    pub sp4: Sp4Rule,
    pub cap: usize,
}

impl CensusOptions {
    pub fn new(max_order: usize) -> CensusOptions {
        CensusOptions {
            max_order,
            mode: CensusMode::Exhaustive { samples: DEFAULT_SAMPLES, seed: 0 },
            all_pairs: false,
            sp4: Sp4Rule::PrimeOrder,
            cap: crate::group::DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusRecord {
    pub group: Group,
    pub a: GroupSubset,
    pub b: GroupSubset,
    pub condition_i: bool,
    pub certificate: Option<KempermanCertificate>,
    /// Why no verified certificate exists for a pair with condition (I).
    pub alarm: Option<String>,
    /// Order of the hyper-atom of `A - min(A)`, or why it is undefined.
    pub hyper_atom: Option<HyperAtomKey>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum HyperAtomKey {
    Order(usize),
    NotGenerating,
    NotSeparable,
}

impl HyperAtomKey {
    fn label(self) -> String {
        match self {
            HyperAtomKey::Order(n) => n.to_string(),
            HyperAtomKey::NotGenerating => "not-generating".into(),
            HyperAtomKey::NotSeparable => "not-separable".into(),
        }
    }
}

impl CensusRecord {
    pub fn pair_kind(&self) -> Option<PairTag> {
        self.certificate.as_ref().map(|c| c.pair.tag())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.name(),
            "key": self.group.invariant_factors(),
            "a": set_json(&self.a),
            "b": set_json(&self.b),
            "condition_i": self.condition_i,
            "pair_kind": self.pair_kind().map(PairTag::as_str),
            "hyper_atom": self.hyper_atom.map(HyperAtomKey::label),
            "certificate": self.certificate.as_ref().map(certificate_json),
            "alarm": self.alarm,
        })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CensusSummary {
    pub schema: &'static str,
    pub max_order: usize,
    pub mode: String,
    pub seed: u64,
    pub sp4: String,
    pub groups: usize,
    pub pairs_checked: u64,
    pub condition_i: u64,
    pub certified: u64,
    pub alarms: u64,
    /// SP4 classifications whose subgroup order is not prime.
    pub sp4_nonprime: u64,
    pub by_pair_kind: BTreeMap<String, u64>,
    pub by_hyper_atom: BTreeMap<String, u64>,
    pub by_group: BTreeMap<String, GroupTally>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GroupTally {
    pub key: Vec<usize>,
    pub pairs: u64,
    pub condition_i: u64,
    pub alarms: u64,
}

impl CensusSummary {
    /// No alarms, and no non-prime SP4 witness unless the run allowed them.
    pub fn is_clean(&self) -> bool {
        self.alarms == 0 && (self.sp4 == "any-order" || self.sp4_nonprime == 0)
    }
}

fn hyper_atom_key(set: &GroupSubset) -> HyperAtomKey {
    let g = set.group();
    let shifted = set.translate(g.neg(set.min_element().expect("nonempty")));
    if !g.subgroup_generated(&shifted).is_whole() {
        return HyperAtomKey::NotGenerating;
    }
    match hyper_atom(&shifted) {
        Ok(r) => HyperAtomKey::Order(r.hyper_atom.order()),
        Err(_) => HyperAtomKey::NotSeparable,
    }
}

/// Hyper-atom keys of every `S ∋ 0`, indexed by mask. Larger groups
/// compute keys on demand.
fn hyper_atom_table(g: &Group) -> Option<HashMap<u64, HyperAtomKey>> {
    if g.order() > 12 {
        return None;
    }
    Some(
        (0..1u64 << (g.order() - 1))
            .into_par_iter()
            .map(|m| {
                let bits = m << 1 | 1;
                (bits, hyper_atom_key(&GroupSubset::from_bits(g, bits)))
            })
            .collect(),
    )
}

fn examine(
    g: &Group,
    a: u64,
    b: u64,
    opts: &CensusOptions,
    table: Option<&HashMap<u64, HyperAtomKey>>,
) -> CensusRecord {
    let sa = GroupSubset::from_bits(g, a);
    let sb = GroupSubset::from_bits(g, b);
    let condition_i = check_condition_i(&sa, &sb).map(|c| c.holds).unwrap_or(false);
    let mut record = CensusRecord {
        group: g.clone(),
        a: sa.clone(),
        b: sb.clone(),
        condition_i,
        certificate: None,
        alarm: None,
        hyper_atom: None,
    };
    if !condition_i {
        return record;
    }
    match build_certificate_with(&sa, &sb, opts.sp4) {
        Ok(cert) => match verify_certificate_with(&cert, opts.sp4) {
            Ok(()) => record.certificate = Some(cert),
            Err(r) => record.alarm = Some(format!("certificate rejected: {r}")),
        },
        Err(e) => record.alarm = Some(e.to_string()),
    }
    let shifted = sa.translate(g.neg(sa.min_element().expect("nonempty")));
    record.hyper_atom = match table {
        Some(t) => t.get(&shifted.bits()).copied(),
        None if g.order() <= HYPER_ATOM_ORDER => Some(hyper_atom_key(&sa)),
        None => None,
    };
    record
}

/// Pair masks for one group: every pair, or `samples` seeded draws.
fn pair_source(g: &Group, index: usize, opts: &CensusOptions) -> PairSource {
    let (sampled, samples, seed) = match opts.mode {
        CensusMode::Exhaustive { samples, seed } => (g.order() > EXHAUSTIVE_ORDER, samples, seed),
        CensusMode::Sample { samples, seed } => (true, samples, seed),
    };
    if !sampled {
        return PairSource::All(g.full_mask());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    let full = g.full_mask();
    PairSource::Drawn((0..samples).map(|_| (rng.gen_range(1..=full), rng.gen_range(1..=full))).collect())
}

enum PairSource {
    All(u64),
    Drawn(Vec<(u64, u64)>),
}

impl PairSource {
    fn len(&self) -> u64 {
        match self {
            PairSource::All(full) => full * full,
            PairSource::Drawn(v) => v.len() as u64,
        }
    }

    fn get(&self, i: u64) -> (u64, u64) {
        match self {
            PairSource::All(full) => (i / full + 1, i % full + 1),
            PairSource::Drawn(v) => v[i as usize],
        }
    }
}

/// Runs the census, handing each emitted record to `sink` in a
/// deterministic order. Uses the ambient rayon pool.
pub fn run_census<F>(opts: &CensusOptions, mut sink: F) -> Result<CensusSummary>
where
    F: FnMut(&CensusRecord) -> std::io::Result<()>,
{
    if opts.max_order > opts.cap {
        return Err(Error::CapExceeded { order: opts.max_order, cap: opts.cap });
    }
    let (mode, seed) = match opts.mode {
        CensusMode::Exhaustive { seed, .. } => {
            if opts.max_order > EXHAUSTIVE_LIMIT {
                return Err(Error::Precondition(format!(
                    "exhaustive census supports max order <= {EXHAUSTIVE_LIMIT}; use sample mode above that"
                )));
            }
            ("exhaustive", seed)
        }
        CensusMode::Sample { seed, .. } => ("sample", seed),
    };
    let mut summary = CensusSummary {
        schema: CENSUS_SCHEMA,
        max_order: opts.max_order,
        mode: mode.into(),
        seed,
        sp4: match opts.sp4 {
            Sp4Rule::PrimeOrder => "prime-order".into(),
            Sp4Rule::AnyOrder => "any-order".into(),
        },
        ..CensusSummary::default()
    };
    // The order-1 group is excluded: the structure theorem needs |G| >= 2.
    let groups: Vec<Group> = all_groups_up_to(opts.max_order)?.into_iter().filter(|g| g.order() >= 2).collect();
    for (index, g) in groups.iter().enumerate() {
        let table = hyper_atom_table(g);
        let source = pair_source(g, index, opts);
        let mut tally = GroupTally { key: g.invariant_factors(), ..GroupTally::default() };
        let total = source.len();
        let mut start = 0;
        while start < total {
            let end = (start + CHUNK * 16).min(total);
            let chunks: Vec<(u64, u64)> =
                (start..end).step_by(CHUNK as usize).map(|c| (c, (c + CHUNK).min(end))).collect();
            let batch: Vec<Vec<CensusRecord>> = chunks
                .into_par_iter()
                .map(|(lo, hi)| {
                    (lo..hi)
                        .map(|i| {
                            let (a, b) = source.get(i);
                            examine(g, a, b, opts, table.as_ref())
                        })
                        .collect()
                })
                .collect();
            for record in batch.iter().flatten() {
                tally.pairs += 1;
                if record.condition_i {
                    tally.condition_i += 1;
                    summary.condition_i += 1;
                    if let Some(cert) = &record.certificate {
                        summary.certified += 1;
                        *summary.by_pair_kind.entry(cert.pair.tag().to_string()).or_default() += 1;
                        if let ElementaryPair::PrimeCoset { subgroup, .. } = &cert.pair {
                            if !is_prime(subgroup.order()) {
                                summary.sp4_nonprime += 1;
                            }
                        }
                    } else {
                        tally.alarms += 1;
                        summary.alarms += 1;
                        *summary.by_pair_kind.entry("alarm".into()).or_default() += 1;
                    }
                    if let Some(key) = record.hyper_atom {
                        *summary.by_hyper_atom.entry(key.label()).or_default() += 1;
                    }
                }
                if record.condition_i || opts.all_pairs {
                    sink(record).map_err(|e| Error::Precondition(format!("writing census record: {e}")))?;
                }
            }
            start = end;
        }
        summary.pairs_checked += tally.pairs;
        summary.by_group.insert(g.name().to_string(), tally);
    }
    summary.groups = groups.len();
    Ok(summary)
}
