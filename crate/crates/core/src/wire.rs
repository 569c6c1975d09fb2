//! JSON encodings: sets, certificates (`kcert/1`) and reports.
//!
//! Elements are always residue arrays (`[1,3]` in `Z2xZ4`, `[4]` in `Z5`);
//! sets are arrays of elements sorted by index. The compact set form is
//! `{"group": "Z2xZ4", "hex": "0x83"}`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::isoperimetry::{HyperAtomReport, KappaReport};
use crate::kemperman::{CertificateRoute, ElementaryPair, KempermanCertificate, Side};
use crate::set::GroupSubset;
use crate::setops::QuasiPeriodicDecomposition;
use crate::subgroup::Subgroup;

pub const CERT_SCHEMA: &str = "kcert/1";

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

pub fn element_json(g: &Group, x: Element) -> Value {
    json!(g.coords(x))
}

pub fn set_json(s: &GroupSubset) -> Value {
    Value::Array(s.iter().map(|x| element_json(s.group(), x)).collect())
}

pub fn set_hex(s: &GroupSubset) -> String {
    format!("{:#x}", s.bits())
}

pub fn compact_set_json(s: &GroupSubset) -> Value {
    json!({ "group": s.group().name(), "hex": set_hex(s) })
}

/// Accepts a residue array or a bare index.
pub fn element_from_json(g: &Group, v: &Value) -> Result<Element> {
    match v {
        Value::Number(n) => {
            let i = n.as_u64().ok_or_else(|| bad(format!("element {n} is not a non-negative integer")))?;
            g.element(i as usize)
        }
        Value::Array(items) => {
            let coords = items
                .iter()
                .map(|c| c.as_u64().map(|c| c as usize).ok_or_else(|| bad(format!("bad residue {c}"))))
                .collect::<Result<Vec<_>>>()?;
            g.element_from_coords(&coords)
        }
        other => Err(bad(format!("expected an element, found {other}"))),
    }
}

pub fn set_from_json(g: &Group, v: &Value) -> Result<GroupSubset> {
    let items = v.as_array().ok_or_else(|| bad(format!("expected an array of elements, found {v}")))?;
    let elements = items.iter().map(|x| element_from_json(g, x)).collect::<Result<Vec<_>>>()?;
    Ok(GroupSubset::from_elements(g, elements))
}

pub fn compact_set_from_json(v: &Value, cap: usize) -> Result<GroupSubset> {
    let spec = field(v, "group")?.as_str().ok_or_else(|| bad("\"group\" must be a string"))?;
    let g = Group::parse_with_cap(spec, cap)?;
    let hex = field(v, "hex")?.as_str().ok_or_else(|| bad("\"hex\" must be a string"))?;
    let digits = hex.strip_prefix("0x").unwrap_or(hex);
    let bits = u64::from_str_radix(digits, 16).map_err(|e| bad(format!("bad hex mask {hex:?}: {e}")))?;
    GroupSubset::new(&g, bits)
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| bad(format!("missing field \"{name}\"")))
}

pub fn pair_json(g: &Group, pair: &ElementaryPair) -> Value {
    let mut m = Map::new();
    m.insert("tag".into(), json!(pair.tag().as_str()));
    m.insert("strict".into(), json!(pair.is_strict()));
    match pair {
        ElementaryPair::Progressions { difference } => {
            m.insert("difference".into(), element_json(g, *difference));
        }
        ElementaryPair::Singleton { side } => {
            m.insert("singleton".into(), serde_json::to_value(side).expect("plain enum"));
        }
        ElementaryPair::CosetComplement { subgroup, shift } => {
            m.insert("subgroup".into(), set_json(subgroup.carrier()));
            m.insert("shift".into(), element_json(g, *shift));
        }
        ElementaryPair::PrimeCoset { subgroup, unique_sum } => {
            m.insert("subgroup".into(), set_json(subgroup.carrier()));
            m.insert("unique_sum".into(), element_json(g, *unique_sum));
        }
    }
    Value::Object(m)
}

fn subgroup_from_json(g: &Group, v: &Value) -> Result<Subgroup> {
    Subgroup::new(set_from_json(g, v)?)
}

pub fn pair_from_json(g: &Group, v: &Value) -> Result<ElementaryPair> {
    let tag = field(v, "tag")?.as_str().ok_or_else(|| bad("\"tag\" must be a string"))?;
    Ok(match tag {
        "SP1" => ElementaryPair::Progressions { difference: element_from_json(g, field(v, "difference")?)? },
        "SP2" => {
            let side: Side = serde_json::from_value(field(v, "singleton")?.clone())
                .map_err(|e| bad(format!("bad \"singleton\": {e}")))?;
            ElementaryPair::Singleton { side }
        }
        "SP3" => ElementaryPair::CosetComplement {
            subgroup: subgroup_from_json(g, field(v, "subgroup")?)?,
            shift: element_from_json(g, field(v, "shift")?)?,
        },
        "SP4" => ElementaryPair::PrimeCoset {
            subgroup: subgroup_from_json(g, field(v, "subgroup")?)?,
            unique_sum: element_from_json(g, field(v, "unique_sum")?)?,
        },
        other => return Err(bad(format!("unknown pair tag {other:?}"))),
    })
}

pub fn certificate_json(cert: &KempermanCertificate) -> Value {
    let g = cert.subgroup.group();
    json!({
        "schema": CERT_SCHEMA,
        "group": g.name(),
        "a": set_json(&cert.a.whole()),
        "b": set_json(&cert.b.whole()),
        "subgroup": set_json(cert.subgroup.carrier()),
        "a0": set_json(&cert.a.periodic),
        "a1": set_json(&cert.a.residual),
        "b0": set_json(&cert.b.periodic),
        "b1": set_json(&cert.b.residual),
        "pair": pair_json(g, &cert.pair),
        "quotient_element": element_json(g, cert.quotient_unique_at),
        "route": serde_json::to_value(cert.route).expect("plain enum"),
    })
}

/// Rebuilds a certificate without judging it; clause checks are left to
/// [`crate::kemperman::verify_certificate`]. Fails only on malformed input
/// or a recorded `H` that is not a subgroup.
pub fn certificate_from_json(v: &Value, cap: usize) -> Result<KempermanCertificate> {
    let schema = field(v, "schema")?.as_str().unwrap_or_default();
    if schema != CERT_SCHEMA {
        return Err(bad(format!("unsupported schema {schema:?}, expected {CERT_SCHEMA:?}")));
    }
    let spec = field(v, "group")?.as_str().ok_or_else(|| bad("\"group\" must be a string"))?;
    let g = Group::parse_with_cap(spec, cap)?;
    let h = subgroup_from_json(&g, field(v, "subgroup")?)?;
    let part = |name: &str| set_from_json(&g, field(v, name)?);
    let decomposition = |periodic: GroupSubset, residual: GroupSubset| QuasiPeriodicDecomposition {
        coset_rep: residual.min_element().map(|x| h.coset(x).min_element().expect("nonempty coset")),
        subgroup: h.clone(),
        periodic,
        residual,
    };
    let a = decomposition(part("a0")?, part("a1")?);
    let b = decomposition(part("b0")?, part("b1")?);
    // The recorded pair, when present, pins what the decompositions must rebuild.
    for (name, d) in [("a", &a), ("b", &b)] {
        if let Some(recorded) = v.get(name) {
            let recorded = set_from_json(&g, recorded)?;
            if recorded != d.whole() {
                return Err(Error::Precondition(format!(
                    "recorded {} = {recorded} is not {name}0 ∪ {name}1 = {}",
                    name.to_uppercase(),
                    d.whole()
                )));
            }
        }
    }
    let route: CertificateRoute = match v.get("route") {
        Some(r) => serde_json::from_value(r.clone()).map_err(|e| bad(format!("bad \"route\": {e}")))?,
        None => CertificateRoute::SubgroupScan,
    };
    Ok(KempermanCertificate {
        pair: pair_from_json(&g, field(v, "pair")?)?,
        quotient_unique_at: element_from_json(&g, field(v, "quotient_element")?)?,
        subgroup: h,
        a,
        b,
        route,
    })
}

pub fn kappa_report_json(r: &KappaReport) -> Value {
    json!({
        "schema": "kappa/1",
        "group": r.set.group().name(),
        "set": set_json(&r.set),
        "k": r.k,
        "separable": r.separable,
        "kappa": r.kappa,
        "atoms": r.atoms.iter().map(set_json).collect::<Vec<_>>(),
        "fragments": r.fragments.iter().map(set_json).collect::<Vec<_>>(),
        "truncated": r.truncated,
    })
}

pub fn hyper_atom_report_json(r: &HyperAtomReport) -> Value {
    let g = r.set.group();
    let image: Vec<Value> = r.image.iter().map(|y| element_json(g, r.projection.label(y))).collect();
    json!({
        "schema": "hyperatom/1",
        "group": g.name(),
        "set": set_json(&r.set),
        "kappa1": r.kappa1,
        "hyper_atom": set_json(r.hyper_atom.carrier()),
        "all_maximal": r.all_maximal.iter().map(|h| set_json(h.carrier())).collect::<Vec<_>>(),
        "quotient_order": r.projection.target().order(),
        "image": image,
        "quotient_shape": serde_json::to_value(r.quotient_shape).expect("plain enum"),
    })
}
