//! Isoperimetric quantities of Cayley graphs `Cay(G, S)` with `0 ∈ S`.
//!
//! For a set `X` the boundary is `(X + S) \ X` and the dual complement is
//! `G \ (X + S)`. `X` is `k`-separating when `|X| >= k` and its dual
//! complement has at least `k` elements. The `k`-th connectivity
//! `kappa_k(S)` is the least boundary size over `k`-separating sets, or
//! `|G| - 2k + 1` when no such set exists. Sets attaining it are
//! `k`-fragments; the smallest fragments are `k`-atoms.
//!
//! Every value here comes from a full scan of the subset lattice. Because
//! `|X + S| - |X|` is translation invariant the scan only visits sets
//! containing 0 and recovers the rest by translation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::matching::maximum_matching;
use crate::set::GroupSubset;
use crate::subgroup::{Morphism, Subgroup};

/// Scans with more than `2^PARALLEL_BITS` candidates are split across
/// the rayon pool.
const PARALLEL_BITS: usize = 16;

fn require_zero(s: &GroupSubset) -> Result<()> {
    if s.contains(Element::ZERO) {
        Ok(())
    } else {
        Err(Error::Precondition("0 must belong to S (the Cayley graph must be reflexive)".into()))
    }
}

fn require_connection_set(s: &GroupSubset) -> Result<()> {
    require_zero(s)?;
    if !s.group().subgroup_generated(s).is_whole() {
        return Err(Error::NotGenerating);
    }
    Ok(())
}

fn require_defined(g: &Group, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    if g.order() + 1 < 2 * k {
        return Err(Error::UndefinedConnectivity { order: g.order(), k });
    }
    Ok(())
}

/// `(X + S) \ X`.
pub fn boundary(s: &GroupSubset, x: &GroupSubset) -> Result<GroupSubset> {
    require_zero(s)?;
    x.sumset(s)?.difference(x)
}

/// `X^S = G \ (X + S)`.
pub fn dual_complement(s: &GroupSubset, x: &GroupSubset) -> Result<GroupSubset> {
    require_zero(s)?;
    Ok(x.sumset(s)?.complement())
}

/// Evaluates both sides of `(X^S)^{-S} + S = X + S`.
pub fn check_duality(s: &GroupSubset, x: &GroupSubset) -> Result<bool> {
    require_zero(s)?;
    let dual = dual_complement(s, x)?;
    let back = dual.sumset(&s.negate())?.complement();
    Ok(back.sumset(s)? == x.sumset(s)?)
}

/// Outcome of a connectivity computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaReport {
    pub set: GroupSubset,
    pub k: usize,
    pub separable: bool,
    pub kappa: usize,
    /// All `k`-fragments sorted by bitmask (unless truncated). For a
    /// non-separable set these are the `k`-element sets.
    pub fragments: Vec<GroupSubset>,
    /// All `k`-atoms sorted by bitmask (unless truncated).
    pub atoms: Vec<GroupSubset>,
    pub truncated: bool,
}

impl KappaReport {
    /// Atoms that contain the identity.
    pub fn atoms_at_zero(&self) -> impl Iterator<Item = &GroupSubset> {
        self.atoms.iter().filter(|a| a.contains(Element::ZERO))
    }

    pub fn is_fragment(&self, x: &GroupSubset) -> bool {
        is_fragment_with(&self.set, self.k, self.kappa, self.separable, x)
    }
}

/// Whether `x` is a `k`-fragment given the connectivity value.
pub fn is_fragment_with(s: &GroupSubset, k: usize, kappa: usize, separable: bool, x: &GroupSubset) -> bool {
    if !separable {
        return x.len() == k;
    }
    let g = s.group();
    let xs = g.sumset_bits(x.bits(), s.bits()).count_ones() as usize;
    x.len() >= k && g.order() - xs >= k && xs - x.len() == kappa
}

#[derive(Clone, Debug, Default)]
pub struct KappaOptions {
    /// Stop collecting fragments and atoms past this many.
    pub fragment_limit: Option<usize>,
}

#[derive(Default)]
struct Scan {
    best: Option<usize>,
    /// Minimisers containing 0, in scan order.
    at_zero: Vec<u64>,
    /// Smallest cardinality among minimisers and those of that cardinality.
    atom_size: usize,
    atoms_at_zero: Vec<u64>,
    truncated: bool,
}

impl Scan {
    fn offer(&mut self, bits: u64, boundary: usize, collect: bool, limit: usize) {
        let size = bits.count_ones() as usize;
        match self.best {
            Some(b) if boundary > b => return,
            Some(b) if boundary == b => {}
            _ => {
                self.best = Some(boundary);
                self.at_zero.clear();
                self.atoms_at_zero.clear();
                self.atom_size = usize::MAX;
                self.truncated = false;
            }
        }
        if !collect {
            return;
        }
        if self.at_zero.len() < limit {
            self.at_zero.push(bits);
        } else {
            self.truncated = true;
        }
        if size < self.atom_size {
            self.atom_size = size;
            self.atoms_at_zero.clear();
        }
        if size == self.atom_size {
            self.atoms_at_zero.push(bits);
        }
    }

    fn merge(mut self, other: Scan, collect: bool, limit: usize) -> Scan {
        match (self.best, other.best) {
            (_, None) => self,
            (None, _) => other,
            (Some(a), Some(b)) if b < a => other,
            (Some(a), Some(b)) if b > a => self,
            _ => {
                if collect {
                    let room = limit.saturating_sub(self.at_zero.len());
                    self.truncated |= other.truncated || other.at_zero.len() > room;
                    self.at_zero.extend(other.at_zero.into_iter().take(room));
                    if other.atom_size < self.atom_size {
                        self.atom_size = other.atom_size;
                        self.atoms_at_zero = other.atoms_at_zero;
                    } else if other.atom_size == self.atom_size {
                        self.atoms_at_zero.extend(other.atoms_at_zero);
                    }
                }
                self
            }
        }
    }
}

fn scan_range(g: &Group, s: u64, k: usize, lo: u64, hi: u64, collect: bool, limit: usize) -> Scan {
    let n = g.order();
    let mut scan = Scan { atom_size: usize::MAX, ..Scan::default() };
    for m in lo..hi {
        let x = (m << 1) | 1;
        let size = x.count_ones() as usize;
        if size < k {
            continue;
        }
        let xs = g.sumset_bits(x, s).count_ones() as usize;
        if n - xs < k {
            continue;
        }
        scan.offer(x, xs - size, collect, limit);
    }
    scan
}

fn scan(g: &Group, s: u64, k: usize, collect: bool, limit: usize) -> Scan {
    let n = g.order();
    let total = 1u64 << (n - 1);
    if n - 1 <= PARALLEL_BITS {
        return scan_range(g, s, k, 0, total, collect, limit);
    }
    let chunk = 1u64 << PARALLEL_BITS;
    (0..total / chunk)
        .into_par_iter()
        .map(|c| scan_range(g, s, k, c * chunk, (c + 1) * chunk, collect, limit))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Scan { atom_size: usize::MAX, ..Scan::default() }, |acc, part| acc.merge(part, collect, limit))
}

/// Every translate of every set in `at_zero`, deduplicated and sorted.
fn translates(g: &Group, at_zero: &[u64], limit: usize) -> (Vec<u64>, bool) {
    let mut all: Vec<u64> = at_zero.iter().flat_map(|&x| g.elements().map(move |t| g.translate_bits(x, t))).collect();
    all.sort_unstable();
    all.dedup();
    let truncated = all.len() > limit;
    all.truncate(limit);
    (all, truncated)
}

fn k_subsets(g: &Group, k: usize, limit: usize) -> (Vec<u64>, bool) {
    let n = g.order();
    let mut out = Vec::new();
    if k > n {
        return (out, false);
    }
    // Gosper's hack over k-element masks in increasing order.
    let mut m: u64 = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
    loop {
        if out.len() == limit {
            return (out, true);
        }
        out.push(m);
        if k == 0 {
            break;
        }
        let c = m & m.wrapping_neg();
        let r = m.wrapping_add(c);
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
        if m & !g.full_mask() != 0 {
            break;
        }
    }
    (out, false)
}

/// `(separable, kappa_k)` without collecting witnesses.
pub fn kappa_value(s: &GroupSubset, k: usize) -> Result<(bool, usize)> {
    require_connection_set(s)?;
    let g = s.group();
    require_defined(g, k)?;
    let found = scan(g, s.bits(), k, false, 0);
    Ok(match found.best {
        Some(v) => (true, v),
        None => (false, g.order() + 1 - 2 * k),
    })
}

/// Exact `kappa_k(S)` with all fragments and atoms.
pub fn kappa(s: &GroupSubset, k: usize) -> Result<KappaReport> {
    kappa_with(s, k, &KappaOptions::default())
}

pub fn kappa_with(s: &GroupSubset, k: usize, options: &KappaOptions) -> Result<KappaReport> {
    require_connection_set(s)?;
    let g = s.group();
    require_defined(g, k)?;
    let limit = options.fragment_limit.unwrap_or(usize::MAX);
    let found = scan(g, s.bits(), k, true, limit);
    let to_sets = |v: Vec<u64>| v.into_iter().map(|b| GroupSubset::from_bits(g, b)).collect::<Vec<_>>();
    match found.best {
        Some(kappa) => {
            let (fragments, t1) = translates(g, &found.at_zero, limit);
            let (atoms, t2) = translates(g, &found.atoms_at_zero, limit);
            Ok(KappaReport {
                set: s.clone(),
                k,
                separable: true,
                kappa,
                fragments: to_sets(fragments),
                atoms: to_sets(atoms),
                truncated: found.truncated || t1 || t2,
            })
        }
        None => {
            let (sets, truncated) = k_subsets(g, k, limit);
            let sets = to_sets(sets);
            Ok(KappaReport {
                set: s.clone(),
                k,
                separable: false,
                kappa: g.order() + 1 - 2 * k,
                fragments: sets.clone(),
                atoms: sets,
                truncated,
            })
        }
    }
}

/// How the image of `S` in `G/H` looks for a hyper-atom `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuotientShape {
    ArithmeticProgression,
    VosperSubset,
    Both,
    /// Only possible outside the hypotheses of the hyper-atom structure theorem.
    Neither,
}

#[derive(Clone, Debug)]
pub struct HyperAtomReport {
    pub set: GroupSubset,
    pub kappa1: usize,
    /// The maximal subgroup 1-fragment with the smallest bitmask.
    pub hyper_atom: Subgroup,
    /// Every subgroup 1-fragment of maximal order.
    pub all_maximal: Vec<Subgroup>,
    pub projection: Morphism,
    /// `phi(S)` inside `G/H`.
    pub image: GroupSubset,
    pub quotient_shape: QuotientShape,
}

/// Subgroups of `G` that are 1-fragments of `S`, in (order, bitmask) order.
pub fn subgroup_fragments(s: &GroupSubset, k: usize, kappa: usize) -> Vec<Subgroup> {
    let g = s.group();
    g.subgroups().into_iter().filter(|h| is_fragment_with(s, k, kappa, true, h.carrier())).collect()
}

/// Largest subgroups that are 1-fragments, and the shape of `S` modulo one.
pub fn hyper_atom(s: &GroupSubset) -> Result<HyperAtomReport> {
    let (separable, kappa1) = kappa_value(s, 1)?;
    if !separable {
        return Err(Error::Precondition("S is not 1-separable (S + X = G for every nonempty X)".into()));
    }
    let candidates = subgroup_fragments(s, 1, kappa1);
    let top = candidates
        .iter()
        .map(Subgroup::order)
        .max()
        .ok_or_else(|| Error::InternalInvariant(format!("no subgroup of {} is a 1-fragment of {s}", s.group())))?;
    let all_maximal: Vec<Subgroup> = candidates.into_iter().filter(|h| h.order() == top).collect();
    let hyper = all_maximal[0].clone();
    let projection = s.group().quotient(&hyper)?;
    let image = projection.image(s);
    let ap = image.is_progression();
    let vosper = is_vosper_subset(&image)?.is_vosper;
    let quotient_shape = match (ap, vosper) {
        (true, true) => QuotientShape::Both,
        (true, false) => QuotientShape::ArithmeticProgression,
        (false, true) => QuotientShape::VosperSubset,
        (false, false) => QuotientShape::Neither,
    };
    Ok(HyperAtomReport { set: s.clone(), kappa1, hyper_atom: hyper, all_maximal, projection, image, quotient_shape })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VosperCheck {
    pub is_vosper: bool,
    /// A set `X` with `|X| >= 2` and `|X + S| < min(|G| - 1, |X| + |S|)`.
    pub witness: Option<GroupSubset>,
}

/// Decides `|X + S| >= min(|G| - 1, |X| + |S|)` for every `|X| >= 2`, once by
/// scanning all `X` and once through `kappa_2`; the two must agree.
pub fn is_vosper_subset(s: &GroupSubset) -> Result<VosperCheck> {
    require_connection_set(s)?;
    let g = s.group();
    let n = g.order();
    let sl = s.len();
    let mut witness = None;
    if n >= 2 {
        for m in 0..(1u64 << (n - 1)) {
            let x = (m << 1) | 1;
            let xl = x.count_ones() as usize;
            if xl < 2 {
                continue;
            }
            let xs = g.sumset_bits(x, s.bits()).count_ones() as usize;
            if xs < (n - 1).min(xl + sl) {
                witness = Some(GroupSubset::from_bits(g, x));
                break;
            }
        }
    }
    let by_scan = witness.is_none();
    if n >= 3 {
        let (separable, kappa2) = kappa_value(s, 2)?;
        let by_kappa = !separable || kappa2 >= sl;
        if by_kappa != by_scan {
            return Err(Error::InternalInvariant(format!(
                "Vosper test disagrees for {s}: scan says {by_scan}, kappa_2 route says {by_kappa}"
            )));
        }
    }
    Ok(VosperCheck { is_vosper: by_scan, witness })
}

/// Distinct `x_i ∈ X` and distinct `y_i ∉ X` with `y_i ∈ x_i + S`, found as
/// a maximum matching between `X` and its boundary.
pub fn strong_iso_selection(s: &GroupSubset, x: &GroupSubset, k: usize) -> Result<Vec<(Element, Element)>> {
    require_zero(s)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let g = s.group();
    if x.len().min(g.order() - x.len()) < k {
        return Err(Error::Precondition(format!(
            "need min(|G|-|X|, |X|) >= k = {k}, got |X| = {} in a group of order {}",
            x.len(),
            g.order()
        )));
    }
    let (_, kappa1) = kappa_value(s, 1)?;
    if k > kappa1 {
        return Err(Error::Precondition(format!("k = {k} exceeds kappa_1(S) = {kappa1}")));
    }
    let left: Vec<Element> = x.iter().collect();
    let right: Vec<Element> = boundary(s, x)?.iter().collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&xi| right.iter().enumerate().filter(|(_, &y)| s.contains(g.sub(y, xi))).map(|(j, _)| j).collect())
        .collect();
    let matching = maximum_matching(&adj, right.len());
    if matching.len() < k {
        return Err(Error::InternalInvariant(format!(
            "maximum matching between X and its boundary has size {} < k = {k}",
            matching.len()
        )));
    }
    Ok(matching.into_iter().take(k).map(|(l, r)| (left[l], right[r])).collect())
}
