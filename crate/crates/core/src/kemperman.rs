//! Critical pairs: elementary-pair classification, the quasi-period
//! dichotomy, and explicit witnesses for the structure theorem.
//!
//! A pair `(A, B)` satisfies *condition (I)* when `|A + B| = |A| + |B| - 1`
//! and, if `A + B` is periodic, some `c` has exactly one representation
//! `c = a + b`. A [`KempermanCertificate`] is a witness for the equivalent
//! *condition (II)*: a nonzero subgroup `H`, `H`-quasi-periodic
//! decompositions `A = A_0 ∪ A_1`, `B = B_0 ∪ B_1` with `(A_1, B_1)`
//! elementary, and a unique expression of `phi(a_1) + phi(b_1)` in
//! `phi(A) + phi(B)` where `phi: G -> G/H`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::set::GroupSubset;
use crate::setops::QuasiPeriodicDecomposition;
use crate::subgroup::Subgroup;

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PairTag {
    SP1,
    SP2,
    SP3,
    SP4,
}

impl PairTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PairTag::SP1 => "SP1",
            PairTag::SP2 => "SP2",
            PairTag::SP3 => "SP3",
            PairTag::SP4 => "SP4",
        }
    }
}

impl fmt::Display for PairTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
    Both,
}

/// Which subgroups qualify in SP4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sp4Rule {
    /// `|H|` must be prime.
    #[default]
    PrimeOrder,
    /// Any finite `H`; the larger class of the original formulation, kept
    /// for comparison runs only.
    AnyOrder,
}

/// One of the four elementary configurations, with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryPair {
    /// SP1: both sets are progressions of difference `difference`, whose
    /// order is at least `|A| + |B| - 1`.
    Progressions { difference: Element },
    /// SP2: `min(|A|, |B|) = 1`.
    Singleton { side: Side },
    /// SP3: `A` aperiodic, `A` and `B` each inside one `H`-coset,
    /// `shift - B = (A + H) \ A`, and no element has exactly one
    /// representation in `A + B`.
    CosetComplement { subgroup: Subgroup, shift: Element },
    /// SP4: `A` and `B` each inside one `H`-coset, `|A| + |B| = |H| + 1`,
    /// and `unique_sum` is the only element with exactly one representation.
    PrimeCoset { subgroup: Subgroup, unique_sum: Element },
}

/// Why a witness or certificate was rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct Rejection(pub String);

fn reject<T>(msg: impl Into<String>) -> std::result::Result<T, Rejection> {
    Err(Rejection(msg.into()))
}

/// `|A + H| == |H|`, i.e. the set lies in one coset. Empty sets do not.
fn in_one_coset(set: &GroupSubset, h: &Subgroup) -> bool {
    !set.is_empty() && h.saturate(set).len() == h.order()
}

fn unique_sums(counts: &[usize]) -> Vec<Element> {
    counts.iter().enumerate().filter(|(_, &c)| c == 1).map(|(i, _)| Element::from_index(i)).collect()
}

impl ElementaryPair {
    pub fn tag(&self) -> PairTag {
        match self {
            ElementaryPair::Progressions { .. } => PairTag::SP1,
            ElementaryPair::Singleton { .. } => PairTag::SP2,
            ElementaryPair::CosetComplement { .. } => PairTag::SP3,
            ElementaryPair::PrimeCoset { .. } => PairTag::SP4,
        }
    }

    /// SP1, SP2 and SP3 are strict.
    pub fn is_strict(&self) -> bool {
        self.tag() != PairTag::SP4
    }

    /// Re-checks the defining clause of the recorded class with prime SP4.
    pub fn verify(&self, a: &GroupSubset, b: &GroupSubset) -> std::result::Result<(), Rejection> {
        self.verify_with(a, b, Sp4Rule::PrimeOrder)
    }

    pub fn verify_with(&self, a: &GroupSubset, b: &GroupSubset, rule: Sp4Rule) -> std::result::Result<(), Rejection> {
        if a.is_empty() || b.is_empty() {
            return reject("elementary pairs consist of nonempty sets");
        }
        if a.group() != b.group() {
            return reject("sets live in different groups");
        }
        let g = a.group();
        match self {
            ElementaryPair::Progressions { difference } => {
                let d = *difference;
                let bound = a.len() + b.len() - 1;
                let is_ap = |s: &GroupSubset| s.len() == 1 || s.is_progression_with(d);
                if g.element_order(d) < bound {
                    return reject(format!(
                        "SP1 witness fails: order of d = {} is {} < |A|+|B|-1 = {bound}",
                        g.render_element(d),
                        g.element_order(d)
                    ));
                }
                if !is_ap(a) || !is_ap(b) {
                    return reject(format!(
                        "SP1 witness fails: A and B are not both progressions of difference {}",
                        g.render_element(d)
                    ));
                }
                Ok(())
            }
            ElementaryPair::Singleton { side } => {
                let ok = match side {
                    Side::A => a.len() == 1,
                    Side::B => b.len() == 1,
                    Side::Both => a.len() == 1 && b.len() == 1,
                };
                if ok {
                    Ok(())
                } else {
                    reject(format!("SP2 witness fails: |A| = {}, |B| = {}", a.len(), b.len()))
                }
            }
            ElementaryPair::CosetComplement { subgroup, shift } => {
                if subgroup.group() != g {
                    return reject("SP3 witness fails: subgroup of another group");
                }
                if !a.period().map_err(|e| Rejection(e.to_string()))?.is_trivial() {
                    return reject("SP3 witness fails: A is periodic");
                }
                if !in_one_coset(a, subgroup) || !in_one_coset(b, subgroup) {
                    return reject("SP3 witness fails: A and B are not each inside one H-coset");
                }
                let complement = subgroup.saturate(a).difference(a).expect("same group");
                if b.negate().translate(*shift) != complement {
                    return reject(format!(
                        "SP3 witness fails: {} - B is not the complement of A in its H-coset",
                        g.render_element(*shift)
                    ));
                }
                let counts = a.rep_counts(b).expect("same group");
                if counts.contains(&1) {
                    return reject("SP3 witness fails: some element has a unique representation");
                }
                Ok(())
            }
            ElementaryPair::PrimeCoset { subgroup, unique_sum } => {
                if subgroup.group() != g {
                    return reject("SP4 witness fails: subgroup of another group");
                }
                if rule == Sp4Rule::PrimeOrder && !is_prime(subgroup.order()) {
                    return reject(format!("SP4 witness fails: |H| = {} is not prime", subgroup.order()));
                }
                if !in_one_coset(a, subgroup) || !in_one_coset(b, subgroup) {
                    return reject("SP4 witness fails: A and B are not each inside one H-coset");
                }
                if a.len() + b.len() != subgroup.order() + 1 {
                    return reject(format!(
                        "SP4 witness fails: |A|+|B| = {} but |H|+1 = {}",
                        a.len() + b.len(),
                        subgroup.order() + 1
                    ));
                }
                let counts = a.rep_counts(b).expect("same group");
                if unique_sums(&counts) != vec![*unique_sum] {
                    return reject(format!(
                        "SP4 witness fails: {} is not the only element with a unique representation",
                        g.render_element(*unique_sum)
                    ));
                }
                Ok(())
            }
        }
    }
}

fn require_pair(a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch { left: a.group().name().to_string(), right: b.group().name().to_string() });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

fn find_sp1(a: &GroupSubset, b: &GroupSubset) -> Option<ElementaryPair> {
    let g = a.group();
    let bound = a.len() + b.len() - 1;
    let is_ap = |s: &GroupSubset, d: Element| s.len() == 1 || s.is_progression_with(d);
    g.elements()
        .find(|&d| g.element_order(d) >= bound && is_ap(a, d) && is_ap(b, d))
        .map(|difference| ElementaryPair::Progressions { difference })
}

fn find_sp3(a: &GroupSubset, b: &GroupSubset, counts: &[usize]) -> Option<ElementaryPair> {
    if counts.contains(&1) || !a.period().ok()?.is_trivial() {
        return None;
    }
    let g = a.group();
    let neg_b = b.negate();
    g.subgroups().into_iter().filter(|h| h.order() == a.len() + b.len()).find_map(|h| {
        if !in_one_coset(a, &h) || !in_one_coset(b, &h) {
            return None;
        }
        let complement = h.saturate(a).difference(a).ok()?;
        let c0 = complement.min_element()?;
        // shift - B = complement forces shift = c0 + b for some b in B.
        let mut shifts: Vec<Element> = b.iter().map(|x| g.add(c0, x)).collect();
        shifts.sort_unstable();
        shifts
            .into_iter()
            .find(|&t| neg_b.translate(t) == complement)
            .map(|shift| ElementaryPair::CosetComplement { subgroup: h.clone(), shift })
    })
}

fn find_sp4(a: &GroupSubset, b: &GroupSubset, counts: &[usize], rule: Sp4Rule) -> Option<ElementaryPair> {
    let unique = unique_sums(counts);
    if unique.len() != 1 {
        return None;
    }
    let g = a.group();
    let order = a.len() + b.len() - 1;
    if rule == Sp4Rule::PrimeOrder && !is_prime(order) {
        return None;
    }
    g.subgroups()
        .into_iter()
        .filter(|h| h.order() == order)
        .find(|h| in_one_coset(a, h) && in_one_coset(b, h))
        .map(|subgroup| ElementaryPair::PrimeCoset { subgroup, unique_sum: unique[0] })
}

/// First matching class in the order SP2, SP1, SP3, SP4 (prime SP4).
pub fn classify_elementary(a: &GroupSubset, b: &GroupSubset) -> Result<Option<ElementaryPair>> {
    Ok(classify_all(a, b, Sp4Rule::PrimeOrder)?.into_iter().next())
}

/// Every class the pair belongs to, one witness each, in the order SP2,
/// SP1, SP3, SP4.
pub fn classify_all(a: &GroupSubset, b: &GroupSubset, rule: Sp4Rule) -> Result<Vec<ElementaryPair>> {
    require_pair(a, b)?;
    let mut out = Vec::new();
    match (a.len() == 1, b.len() == 1) {
        (true, true) => out.push(ElementaryPair::Singleton { side: Side::Both }),
        (true, false) => out.push(ElementaryPair::Singleton { side: Side::A }),
        (false, true) => out.push(ElementaryPair::Singleton { side: Side::B }),
        _ => {}
    }
    out.extend(find_sp1(a, b));
    let counts = a.rep_counts(b)?;
    out.extend(find_sp3(a, b, &counts));
    out.extend(find_sp4(a, b, &counts, rule));
    Ok(out)
}

/// Outcome of the condition-(I) test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionI {
    pub holds: bool,
    pub sum_size_critical: bool,
    pub sum_periodic: bool,
    pub unique_expression_exists: bool,
    pub sumset_len: usize,
}

pub fn check_condition_i(a: &GroupSubset, b: &GroupSubset) -> Result<ConditionI> {
    require_pair(a, b)?;
    if a.group().order() < 2 {
        return Err(Error::Precondition("the group must have order at least 2".into()));
    }
    let sum = a.sumset(b)?;
    let sum_size_critical = sum.len() + 1 == a.len() + b.len();
    let sum_periodic = !sum.period()?.is_trivial();
    let unique_expression_exists = a.rep_counts(b)?.contains(&1);
    Ok(ConditionI {
        holds: sum_size_critical && (!sum_periodic || unique_expression_exists),
        sum_size_critical,
        sum_periodic,
        unique_expression_exists,
        sumset_len: sum.len(),
    })
}

/// The two outcomes of the quasi-period dichotomy for aperiodic critical pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    /// Both sets are `K`-quasi-periodic for a proper nonzero subgroup `K`.
    QuasiPeriodic {
        subgroup: Subgroup,
        s: QuasiPeriodicDecomposition,
        t: QuasiPeriodicDecomposition,
    },
    StrictElementary(ElementaryPair),
}

/// For `|S + T| = |S| + |T| - 1` with `S + T` aperiodic: the smallest proper
/// nonzero `K` making both sets `K`-quasi-periodic, else a strict
/// elementary classification of `{S, T}`.
pub fn quasiperiod_or_elementary(s: &GroupSubset, t: &GroupSubset) -> Result<Dichotomy> {
    require_pair(s, t)?;
    let sum = s.sumset(t)?;
    if sum.len() + 1 != s.len() + t.len() {
        return Err(Error::Precondition(format!(
            "|S+T| = {} differs from |S|+|T|-1 = {}",
            sum.len(),
            s.len() + t.len() - 1
        )));
    }
    if !sum.period()?.is_trivial() {
        return Err(Error::Precondition("S + T is periodic".into()));
    }
    let g = s.group();
    for k in g.subgroups() {
        if k.is_trivial() || k.is_whole() {
            continue;
        }
        let ds = s.quasi_periodic_decompositions(&k)?;
        let dt = t.quasi_periodic_decompositions(&k)?;
        if let (Some(ds), Some(dt)) = (ds.into_iter().next(), dt.into_iter().next()) {
            return Ok(Dichotomy::QuasiPeriodic { subgroup: k, s: ds, t: dt });
        }
    }
    match classify_elementary(s, t)? {
        Some(pair) if pair.is_strict() => Ok(Dichotomy::StrictElementary(pair)),
        other => Err(Error::TheoremFalsified(format!(
            "{s:?}, {t:?}: no proper quasi-period and not a strict elementary pair (classified as {})",
            other.map_or("none".to_string(), |p| p.tag().to_string())
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateRoute {
    /// Smallest-subgroup scan over decompositions. Used for aperiodic
    /// `A + B`, and for periodic `A + B` when no prime-order period works.
    SubgroupScan,
    /// Prime-order period of `A + B` with the coset of a uniquely
    /// expressed sum.
    PrimePeriod,
}

/// A witness for condition (II).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KempermanCertificate {
    pub subgroup: Subgroup,
    pub a: QuasiPeriodicDecomposition,
    pub b: QuasiPeriodicDecomposition,
    /// Classification of `(A_1, B_1)`.
    pub pair: ElementaryPair,
    /// Canonical label of the coset `a_1 + b_1 + H`.
    pub quotient_unique_at: Element,
    pub route: CertificateRoute,
}

/// `|(phi(u) - phi(A)) ∩ phi(B)|` computed inside `G` on `H`-saturations.
fn quotient_rep_count(g: &Group, h: &Subgroup, a: &GroupSubset, b: &GroupSubset, u: Element) -> usize {
    let ah = g.sumset_bits(a.bits(), h.bits());
    let bh = g.sumset_bits(b.bits(), h.bits());
    let u_minus_ah = g.translate_bits(g.negate_bits(ah), u);
    (u_minus_ah & bh).count_ones() as usize / h.order()
}

fn coset_label(g: &Group, h: &Subgroup, x: Element) -> Element {
    Element::from_index(g.translate_bits(h.bits(), x).trailing_zeros() as usize)
}

/// `|phi(A) + phi(B)| = |phi(A)| + |phi(B)| - 1`, computed on saturations.
pub(crate) fn quotient_is_critical(g: &Group, h: &Subgroup, a: &GroupSubset, b: &GroupSubset) -> bool {
    let ah = g.sumset_bits(a.bits(), h.bits());
    let bh = g.sumset_bits(b.bits(), h.bits());
    let n = h.order() as u32;
    g.sumset_bits(ah, bh).count_ones() / n + 1 == ah.count_ones() / n + bh.count_ones() / n
}

#[allow(clippy::too_many_arguments)]
fn try_certificate_where(
    g: &Group,
    h: &Subgroup,
    da: &QuasiPeriodicDecomposition,
    db: &QuasiPeriodicDecomposition,
    a: &GroupSubset,
    b: &GroupSubset,
    route: CertificateRoute,
    rule: Sp4Rule,
    critical_quotient: bool,
) -> Result<Option<KempermanCertificate>> {
    if critical_quotient && !quotient_is_critical(g, h, a, b) {
        return Ok(None);
    }
    let (Some(a1), Some(b1)) = (da.residual.min_element(), db.residual.min_element()) else {
        return Ok(None);
    };
    let Some(pair) = classify_all(&da.residual, &db.residual, rule)?.into_iter().next() else {
        return Ok(None);
    };
    let u = g.add(a1, b1);
    if quotient_rep_count(g, h, a, b, u) != 1 {
        return Ok(None);
    }
    Ok(Some(KempermanCertificate {
        subgroup: h.clone(),
        a: da.clone(),
        b: db.clone(),
        pair,
        quotient_unique_at: coset_label(g, h, u),
        route,
    }))
}

/// First condition-(II) witness over nonzero subgroups in (order, bitmask)
/// order and decompositions in coset order, regardless of condition (I).
pub fn search_condition_ii(a: &GroupSubset, b: &GroupSubset) -> Result<Option<KempermanCertificate>> {
    search_condition_ii_with(a, b, Sp4Rule::PrimeOrder)
}

pub fn search_condition_ii_with(
    a: &GroupSubset,
    b: &GroupSubset,
    rule: Sp4Rule,
) -> Result<Option<KempermanCertificate>> {
    search(a, b, rule, false)
}

/// Like [`search_condition_ii_with`], additionally requiring
/// `|phi(A) + phi(B)| = |phi(A)| + |phi(B)| - 1`. Without that clause a
/// witness does not force condition (I): in `Z8`, `A = {0,1,4}`,
/// `B = {0,2,4}` and `H = {0,4}` satisfy every other clause while
/// `|A + B| = 7`.
pub fn search_condition_ii_critical(
    a: &GroupSubset,
    b: &GroupSubset,
    rule: Sp4Rule,
) -> Result<Option<KempermanCertificate>> {
    search(a, b, rule, true)
}

fn search(a: &GroupSubset, b: &GroupSubset, rule: Sp4Rule, critical: bool) -> Result<Option<KempermanCertificate>> {
    require_pair(a, b)?;
    let g = a.group();
    for h in g.subgroups().into_iter().filter(|h| !h.is_trivial()) {
        let das = a.quasi_periodic_decompositions(&h)?;
        if das.iter().all(|d| d.residual.is_empty()) {
            continue;
        }
        let dbs = b.quasi_periodic_decompositions(&h)?;
        for da in das.iter().filter(|d| !d.residual.is_empty()) {
            for db in dbs.iter().filter(|d| !d.residual.is_empty()) {
                if let Some(cert) =
                    try_certificate_where(g, &h, da, db, a, b, CertificateRoute::SubgroupScan, rule, critical)?
                {
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

fn periodic_construction(
    a: &GroupSubset,
    b: &GroupSubset,
    period: &Subgroup,
    rule: Sp4Rule,
) -> Result<Option<KempermanCertificate>> {
    let g = a.group();
    let counts = a.rep_counts(b)?;
    let primes = g.subgroups().into_iter().filter(|h| is_prime(h.order()) && h.is_subgroup_of(period));
    // Not every prime-order period works: in Z2xZ2 with A = {0,(1,0)},
    // B = {0,(0,1),(1,0)} the period {0,(0,1)} loses the unique expression
    // in the quotient. So each candidate is tried in turn.
    for h in primes {
        if let Some(cert) = periodic_construction_at(a, b, &h, &counts, rule)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

fn periodic_construction_at(
    a: &GroupSubset,
    b: &GroupSubset,
    h: &Subgroup,
    counts: &[usize],
    rule: Sp4Rule,
) -> Result<Option<KempermanCertificate>> {
    let g = a.group();
    for c in unique_sums(counts) {
        let Some(ac) = a.iter().find(|&x| b.contains(g.sub(c, x))) else {
            continue;
        };
        let bc = g.sub(c, ac);
        let split = |set: &GroupSubset, x: Element| -> Option<QuasiPeriodicDecomposition> {
            let coset = h.coset(x);
            let residual = set.intersection(&coset).ok()?;
            let periodic = set.difference(&coset).ok()?;
            h.stabilizes(&periodic).then(|| QuasiPeriodicDecomposition {
                subgroup: h.clone(),
                periodic,
                residual,
                coset_rep: coset.min_element(),
            })
        };
        let (Some(da), Some(db)) = (split(a, ac), split(b, bc)) else {
            continue;
        };
        if let Some(cert) = try_certificate_where(g, h, &da, &db, a, b, CertificateRoute::PrimePeriod, rule, false)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Builds a condition-(II) witness for a pair satisfying condition (I).
///
/// With prime-order SP4 some pairs have no witness at all, the smallest
/// being `A = {0,3,4}`, `B = {0,2,3,4}` in `Z6`; those report
/// [`Error::TheoremFalsified`]. With [`Sp4Rule::AnyOrder`] every pair
/// satisfying (I) has one.
pub fn build_certificate(a: &GroupSubset, b: &GroupSubset) -> Result<KempermanCertificate> {
    build_certificate_with(a, b, Sp4Rule::PrimeOrder)
}

pub fn build_certificate_with(a: &GroupSubset, b: &GroupSubset, rule: Sp4Rule) -> Result<KempermanCertificate> {
    let cond = check_condition_i(a, b)?;
    if !cond.holds {
        let why = if !cond.sum_size_critical {
            format!("|A+B| = {} but |A|+|B|-1 = {}", cond.sumset_len, a.len() + b.len() - 1)
        } else {
            "A+B is periodic and no element has a unique representation".to_string()
        };
        return Err(Error::Precondition(format!("condition (I) fails: {why}")));
    }
    let found = if cond.sum_periodic {
        let period = a.sumset(b)?.period()?;
        // In Z4, A = {0,1}, B = {0,1,2} no prime-order period keeps a
        // unique expression in the quotient; the witness there uses H = G.
        match periodic_construction(a, b, &period, rule)? {
            Some(cert) => Some(cert),
            None => search_condition_ii_with(a, b, rule)?,
        }
    } else {
        search_condition_ii_with(a, b, rule)?
    };
    found.ok_or_else(|| {
        Error::TheoremFalsified(format!("{a:?}, {b:?} satisfy condition (I) but no certificate was found"))
    })
}

/// Re-derives `A` and `B` from the certificate, checks every clause, then
/// confirms condition (I) on the reconstructed pair.
pub fn verify_certificate(cert: &KempermanCertificate) -> std::result::Result<(), Rejection> {
    verify_certificate_with(cert, Sp4Rule::PrimeOrder)
}

pub fn verify_certificate_with(cert: &KempermanCertificate, rule: Sp4Rule) -> std::result::Result<(), Rejection> {
    let h = &cert.subgroup;
    let g = h.group();
    if h.is_trivial() {
        return reject("H must be nonzero");
    }
    for (name, d) in [("A", &cert.a), ("B", &cert.b)] {
        if &d.subgroup != h {
            return reject(format!("decomposition of {name} uses a different subgroup"));
        }
        if d.periodic.group() != g || d.residual.group() != g {
            return reject(format!("decomposition of {name} lives in another group"));
        }
        if d.residual.is_empty() {
            return reject(format!("{name}_1 is empty"));
        }
        if !h.stabilizes(&d.periodic) {
            return reject(format!("{name}_0 is not H-periodic"));
        }
        if !in_one_coset(&d.residual, h) {
            return reject(format!("{name}_1 is not contained in one H-coset"));
        }
        if d.periodic.bits() & d.residual.bits() != 0 {
            return reject(format!("{name}_0 and {name}_1 overlap"));
        }
    }
    let a = cert.a.whole();
    let b = cert.b.whole();
    cert.pair.verify_with(&cert.a.residual, &cert.b.residual, rule)?;

    let phi = g.quotient(h).map_err(|e| Rejection(e.to_string()))?;
    let q = phi.target();
    let a1 = cert.a.residual.min_element().expect("nonempty");
    let b1 = cert.b.residual.min_element().expect("nonempty");
    let u = q.add(phi.apply(a1), phi.apply(b1));
    let image_a = phi.image(&a);
    let image_b = phi.image(&b);
    let hits = image_a.negate().translate(u).intersection(&image_b).expect("same group").len();
    if hits != 1 {
        return reject(format!("quotient clause fails: |(phi(a1+b1) - phi(A)) ∩ phi(B)| = {hits}"));
    }
    if phi.label(u) != cert.quotient_unique_at {
        return reject(format!(
            "recorded quotient element {} is not phi(a1+b1) = {}",
            g.render_element(cert.quotient_unique_at),
            phi.render(u)
        ));
    }
    match check_condition_i(&a, &b) {
        Ok(c) if c.holds => Ok(()),
        Ok(_) => reject("condition (I) fails on the reconstructed pair although (II) holds"),
        Err(e) => reject(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::all_groups_up_to;

    fn set(g: &Group, xs: &[usize]) -> GroupSubset {
        GroupSubset::from_indices(g, xs.iter().copied()).unwrap()
    }

    fn z(n: usize) -> Group {
        Group::new(&[n]).unwrap()
    }

    #[test]
    fn condition_i_examples() {
        let z4 = z(4);
        let c = check_condition_i(&set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap();
        assert!(c.holds && c.sum_size_critical && !c.sum_periodic);

        let z6 = z(6);
        let c = check_condition_i(&set(&z6, &[0, 3]), &set(&z6, &[0, 1, 3])).unwrap();
        assert!(c.holds && c.sum_periodic && c.unique_expression_exists);
        assert_eq!(c.sumset_len, 4);

        let z5 = z(5);
        let c = check_condition_i(&set(&z5, &[0, 1]), &set(&z5, &[0, 2])).unwrap();
        assert!(!c.holds);
        assert_eq!(c.sumset_len, 4);

        assert_eq!(check_condition_i(&set(&z5, &[]), &set(&z5, &[0])), Err(Error::EmptySet));
    }

    #[test]
    fn classification_examples() {
        let z7 = z(7);
        let p = classify_elementary(&set(&z7, &[0, 1, 2]), &set(&z7, &[0, 1])).unwrap().unwrap();
        assert_eq!(p, ElementaryPair::Progressions { difference: z7.element(1).unwrap() });

        let (a, b) = (set(&z7, &[0, 1, 3]), set(&z7, &[1, 2, 3, 5]));
        let p = classify_elementary(&a, &b).unwrap().unwrap();
        assert_eq!(p, ElementaryPair::CosetComplement { subgroup: Subgroup::whole(&z7), shift: Element::ZERO });
        p.verify(&a, &b).unwrap();

        let z5 = z(5);
        let (a, b) = (set(&z5, &[0, 1, 2]), set(&z5, &[0, 1, 3]));
        let p = classify_elementary(&a, &b).unwrap().unwrap();
        assert_eq!(
            p,
            ElementaryPair::PrimeCoset { subgroup: Subgroup::whole(&z5), unique_sum: z5.element(4).unwrap() }
        );

        assert_eq!(
            classify_elementary(&set(&z5, &[3]), &set(&z5, &[0, 1])).unwrap(),
            Some(ElementaryPair::Singleton { side: Side::A })
        );
        // Periodic A: neither SP1 nor SP3, no prime coset fits.
        let z6 = z(6);
        assert_eq!(classify_elementary(&set(&z6, &[0, 3]), &set(&z6, &[0, 1, 3])).unwrap(), None);
    }

    #[test]
    fn kemperman_sp4_is_wider() {
        // Z6: |A|+|B| = |Z6|+1 and 5 is the only uniquely expressed sum,
        // but |Z6| is not prime.
        let z6 = z(6);
        let (a, b) = (set(&z6, &[0, 1, 2]), set(&z6, &[0, 1, 2, 4]));
        assert!(a.rep_counts(&b).unwrap().iter().filter(|&&c| c == 1).count() == 1);
        let strict = classify_all(&a, &b, Sp4Rule::PrimeOrder).unwrap();
        let wide = classify_all(&a, &b, Sp4Rule::AnyOrder).unwrap();
        assert!(strict.iter().all(|p| p.tag() != PairTag::SP4));
        assert!(wide.iter().any(|p| p.tag() == PairTag::SP4));
    }

    #[test]
    fn dichotomy_examples() {
        let z4 = z(4);
        let d = quasiperiod_or_elementary(&set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap();
        assert!(matches!(d, Dichotomy::StrictElementary(ElementaryPair::Progressions { .. })));

        let z7 = z(7);
        let d = quasiperiod_or_elementary(&set(&z7, &[0, 1, 3]), &set(&z7, &[1, 2, 3, 5])).unwrap();
        assert!(matches!(d, Dichotomy::StrictElementary(ElementaryPair::CosetComplement { .. })));

        let d = quasiperiod_or_elementary(&set(&z7, &[4]), &set(&z7, &[1, 2, 5])).unwrap();
        assert_eq!(d, Dichotomy::StrictElementary(ElementaryPair::Singleton { side: Side::A }));

        assert!(matches!(
            quasiperiod_or_elementary(&set(&z7, &[0, 1]), &set(&z7, &[0, 2])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn certificate_examples() {
        let z4 = z(4);
        let cert = build_certificate(&set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap();
        assert!(cert.subgroup.is_whole());
        assert!(cert.a.periodic.is_empty() && cert.b.periodic.is_empty());
        assert_eq!(cert.pair, ElementaryPair::Progressions { difference: z4.element(1).unwrap() });
        verify_certificate(&cert).unwrap();

        let z6 = z(6);
        let cert = build_certificate(&set(&z6, &[0, 3]), &set(&z6, &[0, 1, 3])).unwrap();
        assert_eq!(cert.subgroup.carrier(), &set(&z6, &[0, 3]));
        assert_eq!(cert.route, CertificateRoute::PrimePeriod);
        assert_eq!(cert.b.residual, set(&z6, &[1]));
        assert_eq!(cert.b.periodic, set(&z6, &[0, 3]));
        assert_eq!(cert.pair.tag(), PairTag::SP2);
        verify_certificate(&cert).unwrap();

        let z5 = z(5);
        assert!(matches!(
            build_certificate(&set(&z5, &[0, 1]), &set(&z5, &[0, 2])),
            Err(Error::Precondition(msg)) if msg.contains("|A+B| = 4")
        ));
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let z4 = z(4);
        let cert = build_certificate(&set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap();
        let mut bad = cert.clone();
        bad.pair = ElementaryPair::Progressions { difference: z4.element(2).unwrap() };
        assert!(verify_certificate(&bad).unwrap_err().0.starts_with("SP1 witness fails"));

        let mut bad = cert.clone();
        bad.subgroup = Subgroup::trivial(&z4);
        assert_eq!(verify_certificate(&bad).unwrap_err().0, "H must be nonzero");

        let mut bad = cert;
        bad.quotient_unique_at = z4.element(1).unwrap();
        assert!(verify_certificate(&bad).is_err());
    }

    fn sweep(max_order: usize) -> Vec<(String, usize, usize, usize)> {
        let mut rows = Vec::new();
        for g in all_groups_up_to(max_order).unwrap() {
            let (mut n1, mut prime, mut any) = (0, 0, 0);
            for am in 1..=g.full_mask() {
                for bm in 1..=g.full_mask() {
                    let (a, b) = (GroupSubset::new(&g, am).unwrap(), GroupSubset::new(&g, bm).unwrap());
                    let cond = check_condition_i(&a, &b).unwrap().holds;
                    n1 += cond as usize;
                    for rule in [Sp4Rule::PrimeOrder, Sp4Rule::AnyOrder] {
                        match build_certificate_with(&a, &b, rule) {
                            Ok(cert) => {
                                assert!(cond);
                                verify_certificate_with(&cert, rule).unwrap_or_else(|r| panic!("{a:?} {b:?}: {r}"));
                                assert_eq!(cert.a.whole(), a);
                                assert_eq!(cert.b.whole(), b);
                                if rule == Sp4Rule::PrimeOrder {
                                    prime += 1;
                                } else {
                                    any += 1;
                                }
                            }
                            Err(Error::Precondition(_)) => assert!(!cond),
                            Err(Error::TheoremFalsified(_)) => {
                                assert!(cond && rule == Sp4Rule::PrimeOrder);
                                assert!(search_condition_ii(&a, &b).unwrap().is_none());
                            }
                            Err(e) => panic!("{a:?} {b:?}: {e}"),
                        }
                    }
                    if !cond {
                        let found = search_condition_ii_with(&a, &b, Sp4Rule::AnyOrder).unwrap();
                        assert!(found.is_none(), "{a:?} {b:?}");
                    }
                }
            }
            rows.push((g.name().to_string(), n1, prime, any));
        }
        rows
    }

    #[test]
    fn certificates_match_brute_force_counts() {
        // Reference counts from an independent enumeration: pairs with
        // (I), those with a prime-SP4 witness, those with any witness.
        let expected = [
            ("Z2", 8, 8, 8),
            ("Z3", 42, 42, 42),
            ("Z2xZ2", 152, 152, 152),
            ("Z4", 168, 168, 168),
            ("Z5", 635, 635, 635),
            ("Z2xZ3", 1896, 1536, 1896),
            ("Z6", 1896, 1536, 1896),
        ];
        let got = sweep(6);
        let expected: Vec<_> = expected.iter().map(|&(n, a, b, c)| (n.to_string(), a, b, c)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn prime_sp4_gap_example() {
        let z6 = z(6);
        let (a, b) = (set(&z6, &[0, 3, 4]), set(&z6, &[0, 2, 3, 4]));
        assert!(check_condition_i(&a, &b).unwrap().holds);
        assert!(matches!(build_certificate(&a, &b), Err(Error::TheoremFalsified(_))));
        let cert = build_certificate_with(&a, &b, Sp4Rule::AnyOrder).unwrap();
        assert!(cert.subgroup.is_whole());
        assert_eq!(cert.pair.tag(), PairTag::SP4);
        assert!(verify_certificate(&cert).unwrap_err().0.contains("not prime"));
        verify_certificate_with(&cert, Sp4Rule::AnyOrder).unwrap();
    }

    #[test]
    fn witness_without_critical_quotient() {
        let z8 = z(8);
        let (a, b) = (set(&z8, &[0, 1, 4]), set(&z8, &[0, 2, 4]));
        assert!(!check_condition_i(&a, &b).unwrap().holds);
        let cert = search_condition_ii(&a, &b).unwrap().expect("literal witness");
        assert_eq!(cert.subgroup.order(), 2);
        assert!(!quotient_is_critical(&z8, &cert.subgroup, &a, &b));
        assert!(verify_certificate(&cert).unwrap_err().0.contains("condition (I) fails"));
        for rule in [Sp4Rule::PrimeOrder, Sp4Rule::AnyOrder] {
            assert!(search_condition_ii_critical(&a, &b, rule).unwrap().is_none());
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
