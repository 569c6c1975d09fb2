//! Plain-text renderings of library objects.

use kempkit::kemperman::{ElementaryPair, KempermanCertificate, Side};
use kempkit::oracles::TheoremReport;
use kempkit::{Element, Group};

pub fn element(g: &Group, x: Element) -> String {
    g.render_element(x)
}

pub fn pair(g: &Group, p: &ElementaryPair) -> String {
    let strict = if p.is_strict() { "strict" } else { "not strict" };
    let detail = match p {
        ElementaryPair::Progressions { difference } => {
            format!("progressions with difference {}", element(g, *difference))
        }
        ElementaryPair::Singleton { side } => match side {
            Side::A => "A is a singleton".to_string(),
            Side::B => "B is a singleton".to_string(),
            Side::Both => "both sets are singletons".to_string(),
        },
        ElementaryPair::CosetComplement { subgroup, shift } => {
            format!("g - B = (A+H) \\ A with H = {subgroup}, g = {}", element(g, *shift))
        }
        ElementaryPair::PrimeCoset { subgroup, unique_sum } => {
            format!("H = {subgroup}, unique sum c = {}", element(g, *unique_sum))
        }
    };
    format!("{} ({strict}): {detail}", p.tag())
}

pub fn certificate(cert: &KempermanCertificate) -> Vec<String> {
    let g = cert.subgroup.group();
    let route = match cert.route {
        kempkit::kemperman::CertificateRoute::SubgroupScan => "subgroup scan",
        kempkit::kemperman::CertificateRoute::PrimePeriod => "prime-order period",
    };
    vec![
        format!("  H         {} (order {})", cert.subgroup, cert.subgroup.order()),
        format!("  A0, A1    {}, {}", cert.a.periodic, cert.a.residual),
        format!("  B0, B1    {}, {}", cert.b.periodic, cert.b.residual),
        format!("  (A1, B1)  {}", pair(g, &cert.pair)),
        format!("  unique    a1 + b1 + H = {} + H in G/H", element(g, cert.quotient_unique_at)),
        format!("  route     {route}"),
    ]
}

pub fn report_line(r: &TheoremReport) -> String {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    format!(
        "{verdict} {}: {} checked, {} violations over {} ({:.2}s)",
        r.theorem_id, r.checked, r.violation_count, r.universe, r.elapsed
    )
}
