//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A criterion may be marked as a known blocker. It still prints FAIL, but
//! the run only fails if the observed failure differs from the pinned,
//! independently derived expectation. Set `KEMPKIT_LONG=1` to extend the
//! structure-theorem sweep to order 10.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use kempkit::kemperman::{classify_all, classify_elementary, ElementaryPair, PairTag, Sp4Rule};
use kempkit::oracles::{
    run_census, verify_dichotomy, verify_isoperimetry, verify_kemperman, verify_kneser, verify_vosper_prime,
    CensusMode, CensusOptions, CensusSummary, TheoremReport,
};
use kempkit::{all_groups_up_to, Group, GroupSubset, Subgroup};

const GOLDEN: &str = include_str!("data/condition_i_counts.txt");
const CONVERSE: &str = include_str!("data/converse_counts.txt");

enum Outcome {
    Pass(String),
    Fail(String),
    /// Fails exactly as pinned.
    Blocked(String),
}

struct Golden {
    with_i: u64,
    prime: u64,
    any: u64,
}

fn golden() -> BTreeMap<String, Golden> {
    GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let n = |i: usize| f[i].parse::<u64>().expect("golden count");
            (f[0].to_string(), Golden { with_i: n(1), prime: n(2), any: n(3) })
        })
        .collect()
}

fn groups(max: usize) -> Vec<Group> {
    all_groups_up_to(max).unwrap().into_iter().filter(|g| g.order() >= 2).collect()
}

fn summarize(reports: &[TheoremReport]) -> (u64, u64, Vec<String>) {
    let checked = reports.iter().map(|r| r.checked).sum();
    let bad = reports.iter().map(|r| r.violation_count).sum();
    let failing = reports.iter().filter(|r| !r.passed()).map(|r| r.theorem_id.clone()).collect();
    (checked, bad, failing)
}

fn kneser() -> Outcome {
    let reports: Vec<TheoremReport> = groups(8).iter().map(verify_kneser).collect();
    let (checked, bad, _) = summarize(&reports);
    let msg = format!("Kneser over {} groups of order <= 8: {checked} pairs, {bad} violations", reports.len());
    if bad == 0 && checked == 2 * 65025 + 65025 + 16129 + 2 * 3969 + 961 + 2 * 225 + 49 + 9 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn census(max_order: usize, rule: Sp4Rule) -> CensusSummary {
    let mut opts = CensusOptions::new(max_order);
    opts.sp4 = rule;
    run_census(&opts, |_| Ok(())).unwrap()
}

/// Per-group reports from both SP4 rules, computed once.
struct KempermanSweep {
    prime: BTreeMap<String, Vec<TheoremReport>>,
    any: BTreeMap<String, Vec<TheoremReport>>,
}

fn kemperman_sweep(max_order: usize) -> KempermanSweep {
    let mut prime = BTreeMap::new();
    let mut any = BTreeMap::new();
    for g in groups(max_order) {
        prime.insert(g.name().to_string(), verify_kemperman(&g, Sp4Rule::PrimeOrder));
        any.insert(g.name().to_string(), verify_kemperman(&g, Sp4Rule::AnyOrder));
    }
    KempermanSweep { prime, any }
}

fn kemperman(max_order: usize, census: &CensusSummary, sweep: &KempermanSweep) -> Outcome {
    let golden = golden();
    let mut mismatches = Vec::new();
    let (mut with_i, mut uncertified) = (0, 0);
    for g in groups(max_order) {
        let name = g.name().to_string();
        let Some(expect) = golden.get(&name) else {
            mismatches.push(format!("{name}: no golden count"));
            continue;
        };
        let tally = &census.by_group[&name];
        let forward = &sweep.prime[&name][0];
        with_i += tally.condition_i;
        uncertified += tally.alarms;
        if tally.condition_i != expect.with_i {
            mismatches.push(format!("{name}: {} pairs with (I), golden {}", tally.condition_i, expect.with_i));
        }
        if tally.alarms != expect.with_i - expect.prime || forward.violation_count != tally.alarms {
            mismatches.push(format!(
                "{name}: {} uncertified (I)-pairs, {} sweep violations, pinned {}",
                tally.alarms,
                forward.violation_count,
                expect.with_i - expect.prime
            ));
        }
    }
    let msg = format!(
        "(I) implies a certificate, order <= {max_order}: {with_i} pairs with (I) match the golden counts; \
         {uncertified} have no certificate with prime-order SP4 (smallest: Z6, A={{0,3,4}}, B={{0,2,3,4}})"
    );
    if !mismatches.is_empty() {
        Outcome::Fail(format!("{msg}; unexpected: {}", mismatches.join("; ")))
    } else if uncertified > 0 {
        Outcome::Blocked(msg)
    } else {
        Outcome::Pass(msg)
    }
}

fn kemperman_any_order(max_order: usize, census: &CensusSummary, sweep: &KempermanSweep) -> Outcome {
    let golden = golden();
    let mut bad = Vec::new();
    for g in groups(max_order) {
        let name = g.name().to_string();
        let tally = &census.by_group[&name];
        let pinned = golden.get(&name).map(|e| e.any);
        if !sweep.any[&name][0].passed() || tally.alarms != 0 || pinned != Some(tally.condition_i) {
            bad.push(name);
        }
    }
    let msg = format!(
        "(I) implies a certificate with any-order SP4, order <= {max_order}: {} pairs with (I), all certified",
        census.condition_i
    );
    if bad.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; failing groups: {}", bad.join(", ")))
    }
}

/// Pairs without (I) that still admit a witness of (II), per group:
/// literal reading, then with the critical-quotient clause.
fn converse_golden() -> BTreeMap<String, (u64, u64)> {
    CONVERSE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let n = |i: usize| f[i].parse::<u64>().expect("converse count");
            (f[0].to_string(), (n(1), n(2)))
        })
        .collect()
}

fn converse_literal(max_order: usize, sweep: &KempermanSweep) -> Outcome {
    let golden = converse_golden();
    let mut mismatches = Vec::new();
    let mut total = 0;
    for g in groups(max_order) {
        let name = g.name().to_string();
        let Some(&(pinned, _)) = golden.get(&name) else {
            mismatches.push(format!("{name}: no golden count"));
            continue;
        };
        let prime = sweep.prime[&name][1].violation_count;
        let any = sweep.any[&name][1].violation_count;
        total += prime;
        if prime != pinned || any != pinned {
            mismatches.push(format!("{name}: {prime} (prime SP4) and {any} (any SP4), pinned {pinned}"));
        }
    }
    let msg = format!(
        "(II) as stated implies (I), order <= {max_order}: {total} pairs have a witness but not (I) \
         (smallest: Z8, A={{0,1,4}}, B={{0,2,4}}, H={{0,4}}, |A+B|=7 while |phi(A)+phi(B)|=4)"
    );
    if !mismatches.is_empty() {
        Outcome::Fail(format!("{msg}; unexpected: {}", mismatches.join("; ")))
    } else if total > 0 {
        Outcome::Blocked(msg)
    } else {
        Outcome::Pass(msg)
    }
}

fn converse_critical(max_order: usize, sweep: &KempermanSweep) -> Outcome {
    let golden = converse_golden();
    let mut bad = Vec::new();
    let mut checked = 0;
    for g in groups(max_order) {
        let name = g.name().to_string();
        let (prime, any) = (&sweep.prime[&name][2], &sweep.any[&name][2]);
        checked += prime.checked;
        if !prime.passed() || !any.passed() || golden.get(&name).map(|e| e.1) != Some(0) {
            bad.push(name);
        }
    }
    let msg = format!(
        "(II) with |phi(A)+phi(B)| = |phi(A)|+|phi(B)|-1 implies (I), order <= {max_order}: \
         {checked} pairs without (I), none admits a witness under either SP4 rule"
    );
    if bad.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; failing groups: {}", bad.join(", ")))
    }
}

fn dichotomy() -> Outcome {
    let reports: Vec<TheoremReport> = groups(8).iter().map(verify_dichotomy).collect();
    let (checked, bad, _) = summarize(&reports);
    let msg = format!("dichotomy over aperiodic critical pairs, order <= 8: {checked} pairs, {bad} failures");
    if bad == 0 && checked > 0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn isoperimetry() -> Outcome {
    let reports: Vec<TheoremReport> = groups(10).iter().flat_map(verify_isoperimetry).collect();
    let (checked, bad, failing) = summarize(&reports);
    let mut ids: Vec<&str> = reports.iter().map(|r| r.theorem_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let unexercised: Vec<&str> = ids
        .iter()
        .copied()
        .filter(|id| reports.iter().filter(|r| r.theorem_id == *id).all(|r| r.checked == 0))
        .collect();
    let msg = format!("isoperimetry, {} sub-checks, order <= 10: {checked} checks, {bad} violations", ids.len());
    if bad == 0 && unexercised.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; failing {failing:?}; never exercised {unexercised:?}"))
    }
}

fn vosper() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for p in [5, 7, 11, 13] {
        let reports = verify_vosper_prime(p).unwrap();
        let (checked, bad, _) = summarize(&reports);
        let tight = &reports[2];
        ok &= bad == 0 && tight.checked > 0;
        lines.push(format!("p={p}: {checked} checks, {bad} violations ({} equality cases)", tight.checked));
    }
    let msg = format!("Vosper and Cauchy-Davenport: {}", lines.join("; "));
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn sp4_prime(census: &CensusSummary) -> Outcome {
    // Every classification of every pair, not just those inside certificates.
    let mut total = 0u64;
    let mut nonprime = 0u64;
    for g in groups(8) {
        for a in 1..=g.full_mask() {
            for b in 1..=g.full_mask() {
                let (sa, sb) = (GroupSubset::new(&g, a).unwrap(), GroupSubset::new(&g, b).unwrap());
                for pair in classify_all(&sa, &sb, Sp4Rule::PrimeOrder).unwrap() {
                    if let ElementaryPair::PrimeCoset { subgroup, .. } = pair {
                        total += 1;
                        let n = subgroup.order();
                        if n < 2 || (2..n).any(|d| n % d == 0) {
                            nonprime += 1;
                        }
                    }
                }
            }
        }
    }
    let in_certs = census.by_pair_kind.get("SP4").copied().unwrap_or(0);
    let msg = format!(
        "SP4 refinement: {total} SP4 classifications over order <= 8 and {in_certs} SP4 certificates in the census, \
         {} with non-prime |H|",
        nonprime + census.sp4_nonprime
    );
    if nonprime == 0 && census.sp4_nonprime == 0 && total > 0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn named_examples() -> Outcome {
    let z7 = Group::parse("Z7").unwrap();
    let a = GroupSubset::parse(&z7, "0,1,3").unwrap();
    let b = GroupSubset::parse(&z7, "1,2,3,5").unwrap();
    let sp3 = classify_elementary(&a, &b).unwrap();
    let sp3_ok = matches!(
        &sp3,
        Some(ElementaryPair::CosetComplement { subgroup, shift }) if subgroup == &Subgroup::whole(&z7) && shift.index() == 0
    ) && a.rep_counts(&b).unwrap().iter().all(|&c| c != 1);

    let z5 = Group::parse("Z5").unwrap();
    let a = GroupSubset::parse(&z5, "0,1,2").unwrap();
    let b = GroupSubset::parse(&z5, "0,1,3").unwrap();
    let sp4 = classify_elementary(&a, &b).unwrap();
    let sp4_ok = matches!(
        &sp4,
        Some(ElementaryPair::PrimeCoset { subgroup, unique_sum }) if subgroup.is_whole() && unique_sum.index() == 4
    ) && a.rep_counts(&b).unwrap() == vec![2, 2, 2, 2, 1];
    let tag = |p: &Option<ElementaryPair>| p.as_ref().map_or("none".to_string(), |p| p.tag().to_string());
    let msg = format!(
        "named examples: Z7 {{0,1,3}},{{1,2,3,5}} -> {} (H=Z7, g=0); Z5 {{0,1,2}},{{0,1,3}} -> {} (c=4)",
        tag(&sp3),
        tag(&sp4)
    );
    if sp3_ok && sp4_ok && sp3.map(|p| p.tag()) == Some(PairTag::SP3) {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn census_lines(opts: &CensusOptions, threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let mut out = String::new();
    let summary = pool
        .install(|| {
            run_census(opts, |r| {
                out.push_str(&r.to_json().to_string());
                out.push('\n');
                Ok(())
            })
        })
        .unwrap();
    out.push_str(&serde_json::to_string(&summary.by_pair_kind).unwrap());
    out
}

fn determinism() -> Outcome {
    let mut sampled = CensusOptions::new(12);
    sampled.mode = CensusMode::Sample { samples: 400, seed: 2024 };
    sampled.all_pairs = true;
    let first = census_lines(&sampled, 1);
    let second = census_lines(&sampled, 1);
    let parallel = census_lines(&sampled, 4);
    let full = CensusOptions::new(6);
    let seq = census_lines(&full, 1);
    let par = census_lines(&full, 3);
    let msg = format!(
        "determinism: sampled census ({} bytes) identical across runs and worker counts; exhaustive order <= 6 ({} bytes) identical sequential vs parallel",
        first.len(),
        seq.len()
    );
    if first == second && first == parallel && seq == par && !first.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let long = std::env::var("KEMPKIT_LONG").is_ok_and(|v| v == "1");
    let order = if long { 10 } else { 8 };
    let mut unexpected = 0;
    let mut report = |id: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(m) => println!("PASS [{id}] {m} ({secs:.1}s)"),
            Outcome::Blocked(m) => {
                println!("FAIL [{id}] {m} (known blocker, failure matches the pinned expectation) ({secs:.1}s)")
            }
            Outcome::Fail(m) => {
                unexpected += 1;
                println!("FAIL [{id}] {m} ({secs:.1}s)");
            }
        }
    };
    let prime_census = census(order, Sp4Rule::PrimeOrder);
    let any_census = census(order, Sp4Rule::AnyOrder);
    report("1", &kneser);
    let sweep = kemperman_sweep(order);
    report("2", &|| kemperman(order, &prime_census, &sweep));
    report("2b", &|| kemperman_any_order(order, &any_census, &sweep));
    // The converse sweeps reach as far as their independent counts do.
    let converse_order = converse_golden().keys().map(|n| Group::parse(n).unwrap().order()).max().unwrap_or(0).min(order);
    report("2c", &|| converse_literal(converse_order, &sweep));
    report("2d", &|| converse_critical(converse_order, &sweep));
    report("3", &dichotomy);
    report("4", &isoperimetry);
    report("5", &vosper);
    report("6", &|| sp4_prime(&prime_census));
    report("7", &named_examples);
    report("8", &determinism);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
