use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use kempkit::isoperimetry::{hyper_atom, kappa, HyperAtomReport, KappaReport};
use kempkit::kemperman::{
    build_certificate_with, check_condition_i, classify_all, quasiperiod_or_elementary, verify_certificate_with,
    ConditionI, Dichotomy, ElementaryPair, KempermanCertificate, Sp4Rule,
};
use kempkit::oracles::{
    run_census, verify_dichotomy, verify_isoperimetry, verify_kemperman, verify_kneser, verify_scherk,
    verify_vosper_prime, CensusMode, CensusOptions, CensusSummary, TheoremReport,
};
use kempkit::wire::{
    certificate_from_json, certificate_json, element_json, hyper_atom_report_json, kappa_report_json, pair_json,
    set_json, CERT_SCHEMA,
};
use kempkit::{configured_cap, Group, GroupSubset};
use serde_json::{json, Value};

use crate::{render, Command, Failure, Format, Mode, PairArgs, Theorem};

type Outcome = Result<(), Failure>;

/// Alarm records echoed to stderr when a census fails.
const ALARM_DUMP: usize = 10;

pub fn run(command: Command, format: Format) -> Outcome {
    match command {
        Command::Analyze { pair, sp4_any_order, out } => analyze(&pair, rule(sp4_any_order), out.as_deref(), format),
        Command::Kappa { group, set, k } => cmd_kappa(&group, &set, k, format),
        Command::Hyperatom { group, set } => cmd_hyperatom(&group, &set, format),
        Command::Dichotomy { pair } => dichotomy(&pair, format),
        Command::Census { max_order, mode, samples, seed, out, all_pairs, sp4_any_order } => {
            let mut opts = CensusOptions::new(max_order);
            opts.mode = match mode {
                Mode::Exhaustive => CensusMode::Exhaustive { samples, seed },
                Mode::Sample => CensusMode::Sample { samples, seed },
            };
            opts.all_pairs = all_pairs;
            opts.sp4 = rule(sp4_any_order);
            opts.cap = configured_cap()?;
            census(&opts, out.as_deref(), format)
        }
        Command::Verify { input, sp4_any_order } => verify(&input, rule(sp4_any_order), format),
        Command::Oracle { theorem_id, group, sp4_any_order } => oracle(theorem_id, &group, rule(sp4_any_order), format),
    }
}

fn rule(any_order: bool) -> Sp4Rule {
    if any_order {
        Sp4Rule::AnyOrder
    } else {
        Sp4Rule::PrimeOrder
    }
}

fn group(spec: &str) -> Result<Group, Failure> {
    Ok(Group::parse_with_cap(spec, configured_cap()?)?)
}

fn subset(g: &Group, text: &str, name: &str) -> Result<GroupSubset, Failure> {
    GroupSubset::parse(g, text).map_err(|e| Failure::usage(format!("--{name}: {e}")))
}

fn pair_sets(args: &PairArgs) -> Result<(GroupSubset, GroupSubset), Failure> {
    let g = group(&args.group)?;
    Ok((subset(&g, &args.a, "a")?, subset(&g, &args.b, "b")?))
}

/// Prints a report; a closed stdout (`| head`) is not an error.
fn emit(format: Format, json: &Value, text: impl FnOnce() -> Vec<String>) {
    let mut out = std::io::stdout().lock();
    let _ = match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(json).expect("serializable")),
        Format::Text => text().iter().try_for_each(|line| writeln!(out, "{line}")),
    };
}

struct Analysis {
    a: GroupSubset,
    b: GroupSubset,
    sum: GroupSubset,
    period: GroupSubset,
    condition: ConditionI,
    classes: Vec<ElementaryPair>,
    certificate: Option<KempermanCertificate>,
    /// Why a pair with condition (I) has no accepted certificate.
    alarm: Option<String>,
}

impl Analysis {
    fn verdict(&self) -> String {
        let bound = self.a.len() + self.b.len() - 1;
        if self.condition.holds {
            format!("condition (I) holds: |A+B|={} = |A|+|B|-1", self.sum.len())
        } else if !self.condition.sum_size_critical {
            format!("condition (I) fails: |A+B|={} but |A|+|B|-1={bound}", self.sum.len())
        } else {
            format!("condition (I) fails: |A+B|={bound} but A+B is periodic and no sum is uniquely expressed")
        }
    }

    fn to_json(&self) -> Value {
        let g = self.a.group();
        json!({
            "schema": "analysis/1",
            "group": g.name(),
            "a": set_json(&self.a),
            "b": set_json(&self.b),
            "sumset": set_json(&self.sum),
            "sumset_len": self.sum.len(),
            "period": set_json(&self.period),
            "condition_i": self.condition,
            "verdict": self.verdict(),
            "elementary": self.classes.iter().map(|p| pair_json(g, p)).collect::<Vec<_>>(),
            "certificate": self.certificate.as_ref().map(certificate_json),
            "alarm": self.alarm,
        })
    }

    fn to_text(&self) -> Vec<String> {
        let g = self.a.group();
        let mut lines = vec![
            format!("group     {g}"),
            format!("A         {} (|A| = {})", self.a, self.a.len()),
            format!("B         {} (|B| = {})", self.b, self.b.len()),
            format!("A+B       {} (|A+B| = {})", self.sum, self.sum.len()),
            format!("period    {}", self.period),
            self.verdict(),
        ];
        if self.classes.is_empty() {
            lines.push("(A, B) is not an elementary pair".into());
        }
        for p in &self.classes {
            lines.push(format!("(A, B) is {}", render::pair(g, p)));
        }
        if let Some(cert) = &self.certificate {
            lines.push("certificate for condition (II):".into());
            lines.extend(render::certificate(cert));
        }
        if let Some(alarm) = &self.alarm {
            lines.push(format!("ALARM: {alarm}"));
        }
        lines
    }
}

fn analyze(args: &PairArgs, rule: Sp4Rule, out: Option<&Path>, format: Format) -> Outcome {
    let (a, b) = pair_sets(args)?;
    let condition = check_condition_i(&a, &b)?;
    let sum = a.sumset(&b)?;
    let period = sum.period()?.carrier().clone();
    let classes = classify_all(&a, &b, rule)?;
    let (certificate, alarm) = if condition.holds {
        match build_certificate_with(&a, &b, rule) {
            Ok(cert) => match verify_certificate_with(&cert, rule) {
                Ok(()) => (Some(cert), None),
                Err(r) => (None, Some(format!("built certificate rejected: {r}"))),
            },
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let report = Analysis { a, b, sum, period, condition, classes, certificate, alarm };
    emit(format, &report.to_json(), || report.to_text());
    match (out, &report.certificate) {
        (Some(path), Some(cert)) => write_json(path, &certificate_json(cert))?,
        (Some(path), None) => eprintln!("no certificate, {} not written", path.display()),
        _ => {}
    }
    match report.alarm {
        Some(alarm) => Err(Failure::violation(alarm)),
        None => Ok(()),
    }
}

fn write_json(path: &Path, v: &Value) -> Outcome {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut f, v).map_err(|e| Failure::usage(e.to_string()))?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn kappa_text(r: &KappaReport) -> Vec<String> {
    let k = r.k;
    let mut lines = vec![format!("S = {} in {}, k = {k}", r.set, r.set.group())];
    if r.separable {
        lines.push(format!("{k}-separable, kappa_{k} = {}", r.kappa));
    } else {
        lines.push(format!("not {k}-separable, kappa_{k} = |G|-2k+1 = {} by convention", r.kappa));
        return lines;
    }
    let list = |sets: &[GroupSubset]| sets.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    lines.push(format!("atoms     {}", list(&r.atoms)));
    lines.push(format!("fragments {}", list(&r.fragments)));
    if r.truncated {
        lines.push("(fragment list truncated)".into());
    }
    lines
}

fn cmd_kappa(spec: &str, set: &str, k: usize, format: Format) -> Outcome {
    let g = group(spec)?;
    let s = subset(&g, set, "set")?;
    let report = kappa(&s, k)?;
    emit(format, &kappa_report_json(&report), || kappa_text(&report));
    Ok(())
}

fn hyper_atom_text(r: &HyperAtomReport) -> Vec<String> {
    let shape = serde_json::to_value(r.quotient_shape).expect("plain enum");
    let mut lines = vec![
        format!("S = {} in {}, kappa_1 = {}", r.set, r.set.group(), r.kappa1),
        format!("hyper-atom H = {} (order {})", r.hyper_atom, r.hyper_atom.order()),
        format!("phi(S) = {} in G/H (order {})", r.projection.render_set(&r.image), r.projection.target().order()),
        format!("quotient shape: {}", shape.as_str().unwrap_or_default()),
    ];
    if r.all_maximal.len() > 1 {
        let all: Vec<String> = r.all_maximal.iter().map(ToString::to_string).collect();
        lines.push(format!("maximal subgroup 1-fragments: {}", all.join(" ")));
    }
    lines
}

fn cmd_hyperatom(spec: &str, set: &str, format: Format) -> Outcome {
    let g = group(spec)?;
    let s = subset(&g, set, "set")?;
    let report = hyper_atom(&s)?;
    emit(format, &hyper_atom_report_json(&report), || hyper_atom_text(&report));
    Ok(())
}

fn dichotomy(args: &PairArgs, format: Format) -> Outcome {
    let (s, t) = pair_sets(args)?;
    let g = s.group().clone();
    let outcome = quasiperiod_or_elementary(&s, &t)?;
    let (json, text) = match &outcome {
        Dichotomy::QuasiPeriodic { subgroup, s: ds, t: dt } => (
            json!({
                "schema": "dichotomy/1",
                "group": g.name(),
                "outcome": "quasi-periodic",
                "subgroup": set_json(subgroup.carrier()),
                "s0": set_json(&ds.periodic), "s1": set_json(&ds.residual),
                "t0": set_json(&dt.periodic), "t1": set_json(&dt.residual),
            }),
            vec![
                format!("both sets are K-quasi-periodic with K = {subgroup}"),
                format!("  S0, S1  {}, {}", ds.periodic, ds.residual),
                format!("  T0, T1  {}, {}", dt.periodic, dt.residual),
            ],
        ),
        Dichotomy::StrictElementary(pair) => (
            json!({
                "schema": "dichotomy/1",
                "group": g.name(),
                "outcome": "strict-elementary",
                "pair": pair_json(&g, pair),
            }),
            vec![format!("no proper nonzero quasi-period; (S, T) is {}", render::pair(&g, pair))],
        ),
    };
    emit(format, &json, || text);
    Ok(())
}

fn census_text(s: &CensusSummary) -> Vec<String> {
    let mut lines = vec![
        format!(
            "census to order {} ({} mode, seed {}, SP4 {}): {} groups, {} pairs",
            s.max_order, s.mode, s.seed, s.sp4, s.groups, s.pairs_checked
        ),
        format!("condition (I): {} pairs, {} certified, {} alarms", s.condition_i, s.certified, s.alarms),
        "pair kinds:".into(),
    ];
    for (kind, n) in &s.by_pair_kind {
        lines.push(format!("  {kind:<5} {n}"));
    }
    lines.push("hyper-atom order of A - min(A):".into());
    for (key, n) in &s.by_hyper_atom {
        lines.push(format!("  {key:<15} {n}"));
    }
    lines.push("per group:".into());
    for (name, t) in &s.by_group {
        let key: Vec<String> = t.key.iter().map(ToString::to_string).collect();
        lines.push(format!(
            "  {name:<10} key [{}] pairs {} with (I) {} alarms {}",
            key.join(","),
            t.pairs,
            t.condition_i,
            t.alarms
        ));
    }
    lines
}

fn census(opts: &CensusOptions, out: Option<&Path>, format: Format) -> Outcome {
    let mut writer = match out {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let mut alarms = Vec::new();
    let summary = run_census(opts, |record| {
        if record.alarm.is_some() && alarms.len() < ALARM_DUMP {
            alarms.push(record.to_json());
        }
        if let Some(w) = writer.as_mut() {
            serde_json::to_writer(&mut *w, &record.to_json())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    if let Some(mut w) = writer {
        w.flush()?;
    }
    let json = serde_json::to_value(&summary).expect("serializable");
    emit(format, &json, || census_text(&summary));
    if summary.is_clean() {
        return Ok(());
    }
    for a in &alarms {
        eprintln!("{a}");
    }
    Err(Failure::violation(format!(
        "{} pairs with condition (I) lack an accepted certificate ({} SP4 witnesses over non-prime subgroups)",
        summary.alarms, summary.sp4_nonprime
    )))
}

fn verify(path: &Path, rule: Sp4Rule, format: Format) -> Outcome {
    let text = std::fs::read_to_string(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{} is not JSON: {e}", path.display())))?;
    // An analysis report carries the certificate in a field.
    let doc = match value.get("schema").and_then(Value::as_str) {
        Some("analysis/1") => value.get("certificate").cloned().unwrap_or(Value::Null),
        _ => value,
    };
    if doc.is_null() {
        return Err(Failure::violation(format!("{} holds no certificate", path.display())));
    }
    let verdict = certificate_from_json(&doc, configured_cap()?)
        .map_err(|e| e.to_string())
        .and_then(|cert| verify_certificate_with(&cert, rule).map(|()| cert).map_err(|r| r.0));
    let json = json!({
        "schema": "verify/1",
        "input": path.display().to_string(),
        "expected_schema": CERT_SCHEMA,
        "ok": verdict.is_ok(),
        "reason": verdict.as_ref().err(),
        "quotient_element": verdict.as_ref().ok().map(|c| element_json(c.subgroup.group(), c.quotient_unique_at)),
    });
    match &verdict {
        Ok(_) => emit(format, &json, || vec!["OK".into()]),
        Err(reason) => emit(format, &json, || vec![format!("REJECTED: {reason}")]),
    }
    verdict.map(|_| ()).map_err(|reason| Failure::violation(format!("certificate rejected: {reason}")))
}

fn oracle(theorem: Theorem, spec: &str, rule: Sp4Rule, format: Format) -> Outcome {
    let g = group(spec)?;
    let reports: Vec<TheoremReport> = match theorem {
        Theorem::Kneser => vec![verify_kneser(&g)],
        Theorem::Scherk => verify_scherk(&g),
        Theorem::Vosper => {
            if g.orders().len() != 1 {
                return Err(Failure::usage(format!("vosper needs a cyclic group Zp, got {g}")));
            }
            verify_vosper_prime(g.order())?
        }
        Theorem::Kemperman => verify_kemperman(&g, rule),
        Theorem::Dichotomy => vec![verify_dichotomy(&g)],
        Theorem::Isoperimetry => verify_isoperimetry(&g),
    };
    let json = serde_json::to_value(&reports).expect("serializable");
    emit(format, &json, || reports.iter().map(render::report_line).collect());
    let failing: Vec<&TheoremReport> = reports.iter().filter(|r| !r.passed()).collect();
    if failing.is_empty() {
        return Ok(());
    }
    for r in &failing {
        for v in &r.violations {
            eprintln!("{}: {v}", r.theorem_id);
        }
    }
    let ids: Vec<&str> = failing.iter().map(|r| r.theorem_id.as_str()).collect();
    Err(Failure::violation(format!("violations in {}", ids.join(", "))))
}
