//! Sumset theorems: Kneser, Scherk, Vosper (with Cauchy–Davenport), the
//! structure theorem for critical pairs and the quasi-period dichotomy.

use rayon::prelude::*;
use serde_json::json;

use super::{mask_json, naive, Tally, TheoremReport};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::kemperman::{
    build_certificate_with, check_condition_i, quasiperiod_or_elementary, search_condition_ii_critical,
    search_condition_ii_with, verify_certificate_with, Dichotomy, Sp4Rule,
};
use crate::set::GroupSubset;

/// Runs `body` over every first operand in parallel and merges in order.
fn sweep_pairs<F>(g: &Group, id: &str, universe: String, body: F) -> TheoremReport
where
    F: Fn(u64, u64, &mut Tally) + Sync,
{
    let full = g.full_mask();
    let parts: Vec<Tally> = (1..=full)
        .into_par_iter()
        .map(|a| {
            let mut t = Tally::new(id, "");
            for b in 1..=full {
                body(a, b, &mut t);
            }
            t
        })
        .collect();
    let mut total = Tally::new(id, universe);
    for p in parts {
        total.merge(p);
    }
    total.finish()
}

fn pair_json(g: &Group, a: u64, b: u64) -> serde_json::Value {
    json!({ "group": g.name(), "a": mask_json(g, a), "b": mask_json(g, b) })
}

/// `|A + B| >= |A + H| + |B + H| - |H|` with `H` the period of `A + B`, for
/// every pair of nonempty subsets.
pub fn verify_kneser(g: &Group) -> TheoremReport {
    sweep_pairs(g, "kneser", format!("all nonempty pairs in {g}"), |a, b, t| {
        let sum = naive::sumset(g, a, b);
        let h = naive::period(g, sum);
        let hn = h.count_ones();
        let ah = naive::sumset(g, a, h).count_ones();
        let bh = naive::sumset(g, b, h).count_ones();
        t.check(sum.count_ones() + hn >= ah + bh, || {
            let mut v = pair_json(g, a, b);
            v["period"] = mask_json(g, h);
            v
        });
    })
}

/// Pairs with some `c` having exactly one representation satisfy
/// `|X + Y| >= |X| + |Y| - 1`; a second report covers `A ∩ (-B) = {0}`.
pub fn verify_scherk(g: &Group) -> Vec<TheoremReport> {
    let main = sweep_pairs(g, "scherk", format!("nonempty pairs in {g} with a uniquely expressed sum"), |a, b, t| {
        if (0..g.order()).any(|c| naive::rep_count(g, a, b, c) == 1) {
            let sum = naive::sumset(g, a, b).count_ones();
            t.check(sum + 1 >= a.count_ones() + b.count_ones(), || pair_json(g, a, b));
        }
    });
    let appendix =
        sweep_pairs(g, "scherk/zero-intersection", format!("pairs in {g} with A ∩ (-B) = {{0}}"), |a, b, t| {
            if a & g.negate_bits(b) == 1 {
                let sum = naive::sumset(g, a, b).count_ones();
                t.check(sum + 1 >= a.count_ones() + b.count_ones(), || pair_json(g, a, b));
            }
        });
    vec![main, appendix]
}

/// Vosper's theorem in `Z_p`, the Cauchy–Davenport bound, and tightness of
/// the bound for progressions with a common difference.
///
/// All three are translation invariant, so only pairs with `0 ∈ A ∩ B` are
/// swept.
pub fn verify_vosper_prime(p: usize) -> Result<Vec<TheoremReport>> {
    if !crate::kemperman::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > 13 {
        return Err(Error::Precondition(format!("exhaustive Vosper sweep supports p <= 13, got {p}")));
    }
    let g = Group::new(&[p])?;
    let full = g.full_mask();
    let ap: Vec<u64> = (0..=full).map(|m| if m == 0 { 0 } else { naive::ap_differences(&g, m) }).collect();
    let anchored: Vec<u64> = (1..=full).filter(|m| m & 1 == 1).collect();
    let universe = format!("pairs in Z{p} with 0 in A and 0 in B");

    let parts: Vec<[Tally; 3]> = anchored
        .par_iter()
        .map(|&a| {
            let mut vosper = Tally::new("vosper", "");
            let mut cd = Tally::new("vosper/cauchy-davenport", "");
            let mut tight = Tally::new("vosper/equality", "");
            let al = a.count_ones() as usize;
            for &b in &anchored {
                let bl = b.count_ones() as usize;
                let sum = g.sumset_bits(a, b).count_ones() as usize;
                cd.check(sum >= p.min(al + bl - 1), || pair_json(&g, a, b));
                if al >= 2 && bl >= 2 && sum + 1 == al + bl && sum + 2 <= p {
                    // Nonzero common difference.
                    vosper.check(ap[a as usize] & ap[b as usize] & !1 != 0, || pair_json(&g, a, b));
                }
                if ap[a as usize] & ap[b as usize] & !1 != 0 && al + bl - 1 <= p {
                    tight.check(sum + 1 == al + bl, || pair_json(&g, a, b));
                }
            }
            [vosper, cd, tight]
        })
        .collect();
    let mut totals = [
        Tally::new("vosper", universe.clone()),
        Tally::new("vosper/cauchy-davenport", universe.clone()),
        Tally::new("vosper/equality", format!("{universe}, common-difference progressions")),
    ];
    for part in parts {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(totals.into_iter().map(Tally::finish).collect())
}

/// Condition (I) against certificates, as three reports.
///
/// `kemperman` requires every pair with (I) to get a certificate that
/// verifies. `kemperman/converse` requires pairs without (I) to admit no
/// witness of (II) as literally stated, with no size condition on the
/// quotient. `kemperman/converse-critical-quotient` does the same with
/// the extra clause `|phi(A) + phi(B)| = |phi(A)| + |phi(B)| - 1`.
///
/// Condition (I) is recomputed naively and compared with the library.
pub fn verify_kemperman(g: &Group, rule: Sp4Rule) -> Vec<TheoremReport> {
    let suffix = match rule {
        Sp4Rule::PrimeOrder => "",
        Sp4Rule::AnyOrder => "/any-order-sp4",
    };
    let ids = [
        format!("kemperman{suffix}"),
        format!("kemperman/converse{suffix}"),
        format!("kemperman/converse-critical-quotient{suffix}"),
    ];
    let full = g.full_mask();
    let parts: Vec<[Tally; 3]> = (1..=full)
        .into_par_iter()
        .map(|a| {
            let mut t = ids.clone().map(|id| Tally::new(id, ""));
            let sa = GroupSubset::from_bits(g, a);
            for b in 1..=full {
                let sb = GroupSubset::from_bits(g, b);
                let sum = naive::sumset(g, a, b);
                let critical = sum.count_ones() + 1 == a.count_ones() + b.count_ones();
                let aperiodic = naive::period(g, sum) == 1;
                let cond = critical && (aperiodic || (0..g.order()).any(|c| naive::rep_count(g, a, b, c) == 1));
                let lib = check_condition_i(&sa, &sb).map(|c| c.holds);
                if lib != Ok(cond) {
                    t[0].fail(json!({ "pair": pair_json(g, a, b), "reason": "condition (I) disagrees with the library" }));
                    continue;
                }
                if cond {
                    let outcome = build_certificate_with(&sa, &sb, rule)
                        .map_err(|e| e.to_string())
                        .and_then(|cert| verify_certificate_with(&cert, rule).map_err(|r| r.0));
                    t[0].check(outcome.is_ok(), || json!({ "pair": pair_json(g, a, b), "reason": outcome.unwrap_err() }));
                } else {
                    let literal = search_condition_ii_with(&sa, &sb, rule);
                    t[1].check(matches!(literal, Ok(None)), || {
                        json!({ "pair": pair_json(g, a, b), "reason": "condition (II) holds but (I) fails" })
                    });
                    let strict = search_condition_ii_critical(&sa, &sb, rule);
                    t[2].check(matches!(strict, Ok(None)), || {
                        json!({ "pair": pair_json(g, a, b), "reason": "condition (II) with a critical quotient holds but (I) fails" })
                    });
                }
            }
            t
        })
        .collect();
    let universe = format!("all nonempty pairs in {g}");
    let mut totals = ids.map(|id| Tally::new(id, universe.clone()));
    for part in parts {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    totals.into_iter().map(Tally::finish).collect()
}

/// Every critical pair with aperiodic sum is quasi-periodic for a proper
/// nonzero subgroup or a strict elementary pair.
pub fn verify_dichotomy(g: &Group) -> TheoremReport {
    sweep_pairs(g, "dichotomy", format!("pairs in {g} with |S+T| = |S|+|T|-1 and S+T aperiodic"), |a, b, t| {
        let sum = naive::sumset(g, a, b);
        if sum.count_ones() + 1 != a.count_ones() + b.count_ones() || naive::period(g, sum) != 1 {
            return;
        }
        let s = GroupSubset::from_bits(g, a);
        let tt = GroupSubset::from_bits(g, b);
        let outcome: std::result::Result<(), String> = match quasiperiod_or_elementary(&s, &tt) {
            Ok(Dichotomy::QuasiPeriodic { subgroup, s: ds, t: dt }) => {
                if subgroup.is_trivial() || subgroup.is_whole() {
                    Err("quasi-period is not a proper nonzero subgroup".into())
                } else {
                    ds.check(&s).and(dt.check(&tt)).map_err(|f| format!("{f:?}"))
                }
            }
            Ok(Dichotomy::StrictElementary(pair)) => {
                if pair.is_strict() {
                    pair.verify(&s, &tt).map_err(|r| r.0)
                } else {
                    Err("non-strict pair returned".into())
                }
            }
            Err(e) => Err(e.to_string()),
        };
        t.check(outcome.is_ok(), || json!({ "pair": pair_json(g, a, b), "reason": outcome.unwrap_err() }));
    })
}
