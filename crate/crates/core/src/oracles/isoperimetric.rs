//! Isoperimetric statements checked over every generating `S ∋ 0`.
//!
//! Connectivities, fragments and atoms are recomputed here straight from
//! the definitions (every `X`, no translation normalisation) and compared
//! with the library before being used as hypotheses.

use rayon::prelude::*;
use serde_json::json;

use super::{mask_json, naive, Tally, TheoremReport};
use crate::group::Group;
use crate::isoperimetry::{hyper_atom, is_vosper_subset, kappa, strong_iso_selection};
use crate::set::GroupSubset;

const IDS: [&str; 18] = [
    "isoperimetry/kappa-agreement",
    "isoperimetry/inequality",
    "isoperimetry/bound",
    "isoperimetry/olson",
    "isoperimetry/cay",
    "isoperimetry/inter2frag",
    "isoperimetry/1f2",
    "isoperimetry/2atom",
    "isoperimetry/vosper-corollary",
    "isoperimetry/vosper-subset",
    "isoperimetry/dualitys",
    "isoperimetry/vominus",
    "isoperimetry/quotient",
    "isoperimetry/hyperatom",
    "isoperimetry/plagne",
    "isoperimetry/progression",
    "isoperimetry/non-separable",
    "isoperimetry/strong-iso",
];

const AGREE: usize = 0;
const INEQ: usize = 1;
const BOUND: usize = 2;
const OLSON: usize = 3;
const CAY: usize = 4;
const INTER: usize = 5;
const ONE_F_TWO: usize = 6;
const TWO_ATOM: usize = 7;
const VCOR: usize = 8;
const VSUB: usize = 9;
const DUAL: usize = 10;
const VOMINUS: usize = 11;
const QUOT: usize = 12;
const HYPER: usize = 13;
const PLAGNE: usize = 14;
const PROG: usize = 15;
const NONSEP: usize = 16;
const STRONG: usize = 17;

/// `kappa_k` of `Cay(G, S)` from the definition.
struct NaiveKappa {
    separable: bool,
    kappa: usize,
    /// Sorted masks.
    fragments: Vec<u64>,
    atoms: Vec<u64>,
}

fn naive_kappa(g: &Group, s: u64, k: usize) -> NaiveKappa {
    let n = g.order();
    let mut best: Option<usize> = None;
    let mut fragments = Vec::new();
    for x in 1..=g.full_mask() {
        let xl = x.count_ones() as usize;
        let xs = naive::sumset(g, x, s).count_ones() as usize;
        if xl < k || n - xs < k {
            continue;
        }
        let b = xs - xl;
        match best {
            Some(v) if b > v => {}
            Some(v) if b == v => fragments.push(x),
            _ => {
                best = Some(b);
                fragments = vec![x];
            }
        }
    }
    match best {
        Some(kappa) => {
            let min = fragments.iter().map(|f| f.count_ones()).min().unwrap_or(0);
            let atoms = fragments.iter().copied().filter(|f| f.count_ones() == min).collect();
            NaiveKappa { separable: true, kappa, fragments, atoms }
        }
        None => {
            let sets: Vec<u64> = (1..=g.full_mask()).filter(|x| x.count_ones() as usize == k).collect();
            NaiveKappa { separable: false, kappa: n + 1 - 2 * k, fragments: sets.clone(), atoms: sets }
        }
    }
}

fn is_progression(g: &Group, s: u64) -> bool {
    s.count_ones() == 1 || naive::ap_differences(g, s) & !1 != 0
}

/// `|X + S| >= min(|G| - 1, |X| + |S|)` for every `|X| >= 2`.
fn naive_vosper(g: &Group, s: u64) -> bool {
    let n = g.order();
    let sl = s.count_ones() as usize;
    (1..=g.full_mask())
        .filter(|x| x.count_ones() >= 2)
        .all(|x| naive::sumset(g, x, s).count_ones() as usize >= (n - 1).min(x.count_ones() as usize + sl))
}

fn subgroup_masks(g: &Group) -> Vec<u64> {
    (1..=g.full_mask()).filter(|&h| naive::is_subgroup(g, h)).collect()
}

fn generates(g: &Group, s: u64) -> bool {
    let mut h = s | 1;
    loop {
        let next = naive::sumset(g, h, h);
        if next == h {
            return h == g.full_mask();
        }
        h = next;
    }
}

/// One report per sub-statement, each over all generating `S ∋ 0`.
pub fn verify_isoperimetry(g: &Group) -> Vec<TheoremReport> {
    let subs = subgroup_masks(g);
    let candidates: Vec<u64> = (1..=g.full_mask()).filter(|&s| s & 1 == 1 && generates(g, s)).collect();
    let parts: Vec<Vec<Tally>> = candidates.par_iter().map(|&s| check_one(g, s, &subs)).collect();
    let universe = format!("generating S with 0 in S, in {g}");
    let mut totals: Vec<Tally> = IDS.iter().map(|id| Tally::new(*id, universe.clone())).collect();
    for part in parts {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    totals.into_iter().map(Tally::finish).collect()
}

fn check_one(g: &Group, s: u64, subs: &[u64]) -> Vec<Tally> {
    let mut t: Vec<Tally> = IDS.iter().map(|id| Tally::new(*id, "")).collect();
    let n = g.order();
    let full = g.full_mask();
    let sl = s.count_ones() as usize;
    let set = GroupSubset::from_bits(g, s);
    let here = |extra: serde_json::Value| json!({ "group": g.name(), "s": mask_json(g, s), "detail": extra });
    let plus: Vec<u64> = (0..=full).map(|x| g.sumset_bits(x, s)).collect();
    let size = |x: u64| plus[x as usize].count_ones() as usize;

    let ks: Vec<usize> = (1..=2).filter(|&k| n + 1 >= 2 * k).collect();
    let mut naive_by_k = Vec::new();
    for &k in &ks {
        let nk = naive_kappa(g, s, k);
        let lib = kappa(&set, k).expect("generating S with 0");
        let mut lib_frags: Vec<u64> = lib.fragments.iter().map(GroupSubset::bits).collect();
        let mut lib_atoms: Vec<u64> = lib.atoms.iter().map(GroupSubset::bits).collect();
        lib_frags.sort_unstable();
        lib_atoms.sort_unstable();
        t[AGREE].check(
            lib.separable == nk.separable
                && lib.kappa == nk.kappa
                && lib_frags == nk.fragments
                && lib_atoms == nk.atoms,
            || here(json!({ "k": k, "naive": nk.kappa, "library": lib.kappa })),
        );

        // Isoperimetric inequality, and maximality of kappa when separable.
        let mut tight = false;
        for x in 1..=full {
            let xl = x.count_ones() as usize;
            if xl < k {
                continue;
            }
            let xs = size(x);
            t[INEQ].check(xs >= (n + 1 - k).min(xl + nk.kappa), || here(json!({ "k": k, "x": mask_json(g, x) })));
            tight |= xs < (n + 1 - k).min(xl + nk.kappa + 1);
        }
        if nk.separable {
            t[INEQ].check(tight, || here(json!({ "k": k, "reason": "kappa is not maximal" })));
        } else {
            let expected: Vec<u64> = (1..=full).filter(|x| x.count_ones() as usize == k).collect();
            t[NONSEP].check(lib.kappa == n + 1 - 2 * k && lib_frags == expected && lib_atoms == expected, || {
                here(json!({ "k": k }))
            });
        }

        // Atoms meet fragments in at most k-1 points unless contained.
        for &a in &nk.atoms {
            for &f in &nk.fragments {
                if (a & f).count_ones() as usize >= k {
                    t[INTER].check(a & !f == 0, || {
                        here(json!({ "k": k, "atom": mask_json(g, a), "fragment": mask_json(g, f) }))
                    });
                }
            }
        }
        naive_by_k.push(nk);
    }
    let k1 = &naive_by_k[0];
    t[BOUND].check(k1.kappa < sl, || here(json!({ "kappa1": k1.kappa })));
    t[OLSON].check(2 * k1.kappa >= sl, || here(json!({ "kappa1": k1.kappa })));
    for &a in k1.atoms.iter().filter(|a| *a & 1 == 1) {
        t[CAY].check(naive::is_subgroup(g, a), || here(json!({ "atom": mask_json(g, a) })));
    }
    let progression = is_progression(g, s);
    if progression && k1.separable {
        t[PROG].check(k1.kappa + 1 == sl, || here(json!({ "kappa1": k1.kappa })));
    }

    // Dual complements.
    for x in 0..=full {
        let dual = full & !plus[x as usize];
        let back = full & !g.sumset_bits(dual, g.negate_bits(s));
        t[DUAL].check(g.sumset_bits(back, s) == plus[x as usize], || here(json!({ "x": mask_json(g, x) })));
    }

    // Vosper subsets.
    let vosper = naive_vosper(g, s);
    if let Some(k2) = naive_by_k.get(1) {
        let lib = is_vosper_subset(&set).map(|c| c.is_vosper);
        let via_kappa = !k2.separable || k2.kappa >= sl;
        t[VSUB].check(lib == Ok(vosper) && via_kappa == vosper, || here(json!({ "naive": vosper })));
    }
    if vosper && sl >= 3 {
        for x in 1..=full {
            let xl = x.count_ones() as usize;
            if xl < sl || size(x) + 1 != xl + sl {
                continue;
            }
            for y in 0..n {
                if s >> y & 1 == 1 {
                    let smaller = g.sumset_bits(x, s & !(1u64 << y)).count_ones() as usize;
                    t[VOMINUS].check(smaller + 2 >= xl + sl, || here(json!({ "x": mask_json(g, x), "y": y })));
                }
            }
        }
    }

    // Statements about 2-fragments under kappa_2 <= |S| - 1.
    if let Some(k2) = naive_by_k.get(1) {
        let small = k2.separable && k2.kappa < sl;
        if small {
            let ok = k1.separable
                && k1.kappa == k2.kappa
                && k2.fragments.iter().all(|f| k1.fragments.binary_search(f).is_ok())
                && k1
                    .fragments
                    .iter()
                    .filter(|f| (2..n.saturating_sub(sl)).contains(&(f.count_ones() as usize)))
                    .all(|f| k2.fragments.binary_search(f).is_ok());
            t[ONE_F_TWO].check(ok, || here(json!({ "kappa1": k1.kappa, "kappa2": k2.kappa })));
            for &a in k2.atoms.iter().filter(|a| *a & 1 == 1) {
                t[TWO_ATOM].check(naive::is_subgroup(g, a) || a.count_ones() == 2, || {
                    here(json!({ "atom": mask_json(g, a) }))
                });
            }
            if 2 * sl <= n + 1 && !progression {
                let found = subs.iter().any(|h| k2.fragments.binary_search(h).is_ok());
                t[VCOR].check(found, || here(json!({ "kappa2": k2.kappa })));
            }
        }
        if k2.separable {
            for &h in subs.iter().filter(|h| k2.fragments.binary_search(h).is_ok()) {
                check_quotient(g, s, h, &k2.fragments, &mut t[QUOT], &here);
            }
        }
        if small && 2 * sl <= n + 1 {
            check_hyper_atom(g, s, subs, k1, &mut t[HYPER], &here);
        }
    }

    // The three-way alternative for |S| <= |G|/2.
    if 2 * sl <= n {
        let via_subgroup = subs.iter().any(|&h| {
            h != 1 && (g.sumset_bits(h, s).count_ones() as usize) < (n - 1).min(h.count_ones() as usize + sl)
        });
        t[PLAGNE].check(progression || via_subgroup || vosper, || here(json!({})));
    }

    // Strong isoperimetric selection with k = kappa_1.
    let k = k1.kappa;
    if k >= 1 {
        for x in 1..=full {
            let xl = x.count_ones() as usize;
            if xl.min(n - xl) < k {
                continue;
            }
            let xset = GroupSubset::from_bits(g, x);
            let ok = match strong_iso_selection(&set, &xset, k) {
                Ok(pairs) => {
                    let xs: u64 = pairs.iter().fold(0, |m, p| m | 1u64 << p.0.index());
                    let ys: u64 = pairs.iter().fold(0, |m, p| m | 1u64 << p.1.index());
                    pairs.len() == k
                        && xs.count_ones() as usize == k
                        && ys.count_ones() as usize == k
                        && xs & !x == 0
                        && ys & x == 0
                        && pairs.iter().all(|(a, b)| set.contains(g.sub(*b, *a)))
                }
                Err(_) => false,
            };
            t[STRONG].check(ok, || here(json!({ "x": mask_json(g, x), "k": k })));
        }
    }
    t
}

fn check_quotient(
    g: &Group,
    s: u64,
    h: u64,
    fragments2: &[u64],
    t: &mut Tally,
    here: &dyn Fn(serde_json::Value) -> serde_json::Value,
) {
    let hs = crate::subgroup::Subgroup::new(GroupSubset::from_bits(g, h)).expect("naive subgroup");
    let phi = g.quotient(&hs).expect("same group");
    let q = phi.target();
    let image = phi.image(&GroupSubset::from_bits(g, s));
    let nk = naive_kappa(q, image.bits(), 1);
    t.check(nk.kappa + 1 == image.len(), || here(json!({ "h": mask_json(g, h), "kappa1_image": nk.kappa })));
    if nk.separable {
        for &k in subgroup_masks(q).iter().filter(|k| nk.fragments.binary_search(k).is_ok()) {
            let pre = phi.preimage(&GroupSubset::from_bits(q, k)).expect("same group").bits();
            t.check(fragments2.binary_search(&pre).is_ok(), || {
                here(json!({ "h": mask_json(g, h), "preimage": mask_json(g, pre) }))
            });
        }
    }
}

fn check_hyper_atom(
    g: &Group,
    s: u64,
    subs: &[u64],
    k1: &NaiveKappa,
    t: &mut Tally,
    here: &dyn Fn(serde_json::Value) -> serde_json::Value,
) {
    let frag: Vec<u64> = subs.iter().copied().filter(|h| k1.fragments.binary_search(h).is_ok()).collect();
    let top = frag.iter().map(|h| h.count_ones()).max();
    let Some(top) = top else {
        t.fail(here(json!({ "reason": "no subgroup is a 1-fragment" })));
        return;
    };
    let maximal: Vec<u64> = frag.into_iter().filter(|h| h.count_ones() == top).collect();
    let lib = hyper_atom(&GroupSubset::from_bits(g, s));
    let lib_max: Option<Vec<u64>> = lib.as_ref().ok().map(|r| {
        let mut v: Vec<u64> = r.all_maximal.iter().map(|h| h.bits()).collect();
        v.sort_unstable();
        v
    });
    t.check(lib_max.as_ref() == Some(&maximal), || here(json!({ "reason": "hyper-atoms disagree with the library" })));
    for h in maximal {
        let hs = crate::subgroup::Subgroup::new(GroupSubset::from_bits(g, h)).expect("naive subgroup");
        let phi = g.quotient(&hs).expect("same group");
        let q = phi.target();
        let image = phi.image(&GroupSubset::from_bits(g, s)).bits();
        let il = image.count_ones() as usize;
        t.check(is_progression(q, image) || naive_vosper(q, image), || {
            here(json!({ "h": mask_json(g, h), "reason": "image is neither a progression nor a Vosper subset" }))
        });
        for x in 1..=q.full_mask() {
            let xl = x.count_ones() as usize;
            if naive::sumset(q, x, image).count_ones() as usize + 1 != xl + il {
                continue;
            }
            for y in 0..q.order() {
                if image >> y & 1 == 1 {
                    let smaller = naive::sumset(q, x, image & !(1u64 << y)).count_ones() as usize;
                    t.check(smaller + 2 >= xl + il, || {
                        here(json!({ "h": mask_json(g, h), "x": mask_json(q, x), "y": y }))
                    });
                }
            }
        }
    }
}
