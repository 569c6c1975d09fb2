//! Finite abelian groups with dense element indexing.
//!
//! A group built from cyclic factors `Z_{d_1} x ... x Z_{d_r}` numbers its
//! elements in mixed radix with the first factor most significant, so the
//! tuple `(x_1, ..., x_r)` has index `x_1 * (d_2 ... d_r) + ... + x_r`.
//! Sorting by index therefore sorts tuples lexicographically. Quotient
//! groups are kept as plain addition tables.
//!
//! Subsets of a group are `u64` bitmasks (bit `i` = element `i`), which caps
//! every group at 64 elements. The default working cap is much lower,
//! see [`DEFAULT_CAP`].

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Default bound on group orders; exhaustive subset searches are `2^|G|`.
pub const DEFAULT_CAP: usize = 24;

/// Hard bound imposed by the `u64` subset representation.
pub const MAX_ORDER: usize = 64;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "KEMPKIT_CAP";

/// Reads the group-order cap from `KEMPKIT_CAP`, falling back to the default.
pub fn configured_cap() -> Result<usize> {
    match std::env::var(CAP_ENV) {
        Ok(raw) => {
            let cap: usize =
                raw.trim().parse().map_err(|_| Error::InvalidSpec(format!("{CAP_ENV}={raw:?} is not an integer")))?;
            if cap == 0 || cap > MAX_ORDER {
                return Err(Error::InvalidSpec(format!("{CAP_ENV} must lie in 1..={MAX_ORDER}, got {cap}")));
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_CAP),
    }
}

/// Index of an element inside its group. Index 0 is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub(crate) u8);

impl Element {
    pub const ZERO: Element = Element(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Element {
        debug_assert!(i < MAX_ORDER);
        Element(i as u8)
    }
}

/// One masked shift: the bits in `up_mask` move up by `up`, the rest move
/// down by `down`. Translating by one coordinate of a product group is
/// exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Shift {
    up_mask: u64,
    up: u32,
    down: u32,
}

struct GroupData {
    name: String,
    orders: Vec<usize>,
    order: usize,
    add: Vec<u8>,
    neg: Vec<u8>,
    /// Per-element translation recipe; `None` for table-backed groups.
    shifts: Option<Vec<Vec<Shift>>>,
    element_orders: Vec<usize>,
    subgroups: OnceLock<Vec<u64>>,
}

/// A finite abelian group. Cheap to clone; all clones share one table.
#[derive(Clone)]
pub struct Group(Arc<GroupData>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.order == other.0.order && self.0.orders == other.0.orders && self.0.add == other.0.add)
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.name)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

fn full_mask(order: usize) -> u64 {
    if order >= 64 {
        u64::MAX
    } else {
        (1u64 << order) - 1
    }
}

impl Group {
    /// `Z_{orders[0]} x Z_{orders[1]} x ...` under [`DEFAULT_CAP`].
    pub fn new(orders: &[usize]) -> Result<Group> {
        Group::with_cap(orders, DEFAULT_CAP)
    }

    pub fn with_cap(orders: &[usize], cap: usize) -> Result<Group> {
        if cap > MAX_ORDER {
            return Err(Error::InvalidSpec(format!("cap {cap} exceeds the bitset width {MAX_ORDER}")));
        }
        if let Some(&bad) = orders.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpec(format!("cyclic factor of order {bad}")));
        }
        let mut order = 1usize;
        for &d in orders {
            order = order.saturating_mul(d);
        }
        if order > cap {
            return Err(Error::CapExceeded { order, cap });
        }
        Ok(Group::build_product(orders, order))
    }

    /// The group of order 1.
    pub fn trivial() -> Group {
        Group::build_product(&[], 1)
    }

    fn build_product(orders: &[usize], order: usize) -> Group {
        let r = orders.len();
        let mut strides = vec![1usize; r];
        for j in (0..r.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * orders[j + 1];
        }
        let coords = |i: usize| -> Vec<usize> { (0..r).map(|j| (i / strides[j]) % orders[j]).collect() };
        let index = |c: &[usize]| -> usize { c.iter().zip(&strides).map(|(x, s)| x * s).sum() };

        let all: Vec<Vec<usize>> = (0..order).map(coords).collect();
        let mut add = vec![0u8; order * order];
        let mut neg = vec![0u8; order];
        for x in 0..order {
            let nx: Vec<usize> = all[x].iter().zip(orders).map(|(&a, &d)| (d - a) % d).collect();
            neg[x] = index(&nx) as u8;
            for y in 0..order {
                let s: Vec<usize> = all[x].iter().zip(&all[y]).zip(orders).map(|((&a, &b), &d)| (a + b) % d).collect();
                add[x * order + y] = index(&s) as u8;
            }
        }

        // Translation by t along coordinate j: positions with x_j + t < d_j
        // move up by t*stride, the others wrap down by (d_j - t)*stride.
        let shifts = (0..order)
            .map(|x| {
                all[x]
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t != 0)
                    .map(|(j, &t)| {
                        let up_mask =
                            (0..order).filter(|&i| all[i][j] + t < orders[j]).fold(0u64, |m, i| m | (1u64 << i));
                        Shift { up_mask, up: (t * strides[j]) as u32, down: ((orders[j] - t) * strides[j]) as u32 }
                    })
                    .collect()
            })
            .collect();

        let name = if orders.is_empty() {
            "trivial".to_string()
        } else {
            orders.iter().map(|d| format!("Z{d}")).collect::<Vec<_>>().join("x")
        };
        Group::assemble(name, orders.to_vec(), order, add, neg, Some(shifts))
    }

    /// Builds a group from a dense addition table (identity at index 0).
    pub(crate) fn from_table(name: String, order: usize, add: Vec<u8>) -> Group {
        let neg = (0..order)
            .map(|x| {
                (0..order).find(|&y| add[x * order + y] == 0).expect("every element of a group table has an inverse")
                    as u8
            })
            .collect();
        Group::assemble(name, Vec::new(), order, add, neg, None)
    }

    fn assemble(
        name: String,
        orders: Vec<usize>,
        order: usize,
        add: Vec<u8>,
        neg: Vec<u8>,
        shifts: Option<Vec<Vec<Shift>>>,
    ) -> Group {
        let element_orders = (0..order)
            .map(|x| {
                let mut acc = x;
                let mut n = 1;
                while acc != 0 {
                    acc = add[acc * order + x] as usize;
                    n += 1;
                }
                n
            })
            .collect();
        Group(Arc::new(GroupData { name, orders, order, add, neg, shifts, element_orders, subgroups: OnceLock::new() }))
    }

    /// Parses `"Z5"`, `"Z2xZ4"` (case-insensitive) or `"trivial"`.
    pub fn parse(spec: &str) -> Result<Group> {
        Group::parse_with_cap(spec, DEFAULT_CAP)
    }

    pub fn parse_with_cap(spec: &str, cap: usize) -> Result<Group> {
        let trimmed = spec.trim();
        if trimmed.eq_ignore_ascii_case("trivial") {
            return Ok(Group::trivial());
        }
        if trimmed.is_empty() {
            return Err(Error::InvalidSpec("empty group spec".into()));
        }
        let mut orders = Vec::new();
        for factor in trimmed.split(['x', 'X', '*']) {
            let f = factor.trim();
            let digits = f
                .strip_prefix('Z')
                .or_else(|| f.strip_prefix('z'))
                .ok_or_else(|| Error::InvalidSpec(format!("factor {f:?} must look like Z<n>")))?;
            let d: usize =
                digits.parse().map_err(|_| Error::InvalidSpec(format!("factor {f:?} has no valid order")))?;
            orders.push(d);
        }
        Group::with_cap(&orders, cap)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    /// Cyclic factors; empty for the trivial group and for table-backed groups.
    pub fn orders(&self) -> &[usize] {
        &self.0.orders
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn is_table_backed(&self) -> bool {
        self.0.shifts.is_none()
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.0.order)
    }

    pub fn zero(&self) -> Element {
        Element::ZERO
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index < self.0.order {
            Ok(Element::from_index(index))
        } else {
            Err(Error::IndexOutOfRange { index, order: self.0.order })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.0.order).map(Element::from_index)
    }

    #[inline]
    pub fn add(&self, x: Element, y: Element) -> Element {
        Element(self.0.add[x.index() * self.0.order + y.index()])
    }

    #[inline]
    pub fn neg(&self, x: Element) -> Element {
        Element(self.0.neg[x.index()])
    }

    #[inline]
    pub fn sub(&self, x: Element, y: Element) -> Element {
        self.add(x, self.neg(y))
    }

    /// `n * x`.
    pub fn mul(&self, n: usize, x: Element) -> Element {
        (0..n).fold(Element::ZERO, |acc, _| self.add(acc, x))
    }

    /// Additive order of `x`.
    pub fn element_order(&self, x: Element) -> usize {
        self.0.element_orders[x.index()]
    }

    /// Residue tuple of `x`. Table-backed groups report the bare index.
    pub fn coords(&self, x: Element) -> Vec<usize> {
        let orders = &self.0.orders;
        if orders.is_empty() {
            return vec![x.index()];
        }
        let mut rest = x.index();
        let mut out = vec![0; orders.len()];
        for j in (0..orders.len()).rev() {
            out[j] = rest % orders[j];
            rest /= orders[j];
        }
        out
    }

    /// Inverse of [`Group::coords`]; residues are reduced modulo each factor.
    pub fn element_from_coords(&self, coords: &[usize]) -> Result<Element> {
        let orders = &self.0.orders;
        if orders.is_empty() {
            return match coords {
                [i] => self.element(*i),
                _ => Err(Error::InvalidSpec(format!("expected a single index for {}, got {coords:?}", self.name()))),
            };
        }
        if coords.len() != orders.len() {
            return Err(Error::InvalidSpec(format!(
                "element tuple {coords:?} has {} entries, {} has {} factors",
                coords.len(),
                self.name(),
                orders.len()
            )));
        }
        let index = coords.iter().zip(orders).fold(0, |acc, (&c, &d)| acc * d + c % d);
        self.element(index)
    }

    /// `"(1,3)"` in product groups, a bare residue in cyclic and table groups.
    pub fn render_element(&self, x: Element) -> String {
        let c = self.coords(x);
        if c.len() == 1 {
            c[0].to_string()
        } else {
            let inner: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            format!("({})", inner.join(","))
        }
    }

    /// Accepts a flat index `"7"` or a residue tuple `"(1,3)"`.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let t = text.trim();
        let parse_num = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse { position: 0, message: format!("{s:?} is not a non-negative integer") })
        };
        if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let coords = inner.split(',').map(parse_num).collect::<Result<Vec<_>>>()?;
            if coords.len() == 1 && self.0.orders.len() <= 1 {
                let order = self.0.orders.first().copied().unwrap_or(self.0.order);
                return self.element(coords[0] % order);
            }
            self.element_from_coords(&coords)
        } else {
            self.element(parse_num(t)?)
        }
    }

    /// Bitmask of `X + x`.
    #[inline]
    pub fn translate_bits(&self, bits: u64, x: Element) -> u64 {
        match &self.0.shifts {
            Some(shifts) => {
                let mut b = bits;
                for s in &shifts[x.index()] {
                    b = ((b & s.up_mask) << s.up) | ((b & !s.up_mask) >> s.down);
                }
                b
            }
            None => {
                let mut out = 0u64;
                let mut rest = bits;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    out |= 1u64 << self.0.add[i * self.0.order + x.index()];
                }
                out
            }
        }
    }

    /// Bitmask of `A + B`, iterating over the sparser operand.
    #[inline]
    pub fn sumset_bits(&self, a: u64, b: u64) -> u64 {
        let (iter, shifted) = if a.count_ones() <= b.count_ones() { (a, b) } else { (b, a) };
        let full = self.full_mask();
        let mut out = 0u64;
        let mut rest = iter;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.translate_bits(shifted, Element::from_index(i));
            if out == full {
                break;
            }
        }
        out
    }

    /// Bitmask of `-X`.
    pub fn negate_bits(&self, bits: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1u64 << self.0.neg[i];
        }
        out
    }

    /// Smallest subgroup (as a bitmask) containing `bits`.
    pub fn closure_bits(&self, bits: u64) -> u64 {
        let mut h = 1u64;
        let mut rest = bits & !1;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if h >> i & 1 == 0 {
                h = self.extend_subgroup_bits(h, Element::from_index(i));
            }
        }
        h
    }

    /// `<H, g>` for a subgroup bitmask `h`; equals `H + <g>`.
    pub(crate) fn extend_subgroup_bits(&self, h: u64, g: Element) -> u64 {
        let mut cur = h;
        loop {
            let next = cur | self.translate_bits(cur, g);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// All subgroup bitmasks sorted by (cardinality, mask). Cached per group.
    pub(crate) fn subgroup_masks(&self) -> &[u64] {
        self.0.subgroups.get_or_init(|| {
            let mut seen = std::collections::HashSet::new();
            let mut frontier = vec![1u64];
            seen.insert(1u64);
            while let Some(h) = frontier.pop() {
                for g in self.elements() {
                    if h >> g.index() & 1 == 1 {
                        continue;
                    }
                    let bigger = self.extend_subgroup_bits(h, g);
                    if seen.insert(bigger) {
                        frontier.push(bigger);
                    }
                }
            }
            let mut all: Vec<u64> = seen.into_iter().collect();
            all.sort_by_key(|&m| (m.count_ones(), m));
            all
        })
    }

    /// Invariant-factor key `[n_1, ..., n_s]` with `n_1 | n_2 | ... | n_s`.
    /// Isomorphic groups share the key. Table-backed groups report `[]`.
    pub fn invariant_factors(&self) -> Vec<usize> {
        let mut per_prime: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &d in &self.0.orders {
            let mut rest = d;
            let mut p = 2;
            while rest > 1 {
                if rest % p == 0 {
                    let mut pe = 1;
                    while rest % p == 0 {
                        rest /= p;
                        pe *= p;
                    }
                    per_prime.entry(p).or_default().push(pe);
                }
                p += 1;
            }
        }
        let width = per_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1usize; width];
        for powers in per_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, pe) in powers.iter().enumerate() {
                factors[i] *= pe;
            }
        }
        factors.reverse();
        factors
    }

    /// Exhaustive check of the abelian group axioms on the stored table.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let n = self.order();
        let els: Vec<Element> = self.elements().collect();
        for &x in &els {
            if self.add(x, Element::ZERO) != x {
                return Err(format!("0 is not an identity for {}", x.index()));
            }
            if self.add(x, self.neg(x)) != Element::ZERO {
                return Err(format!("neg({}) is not an inverse", x.index()));
            }
            for &y in &els {
                if self.add(x, y) != self.add(y, x) {
                    return Err(format!("{} + {} is not commutative", x.index(), y.index()));
                }
                if n <= 24 {
                    for &z in &els {
                        if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)) {
                            return Err(format!(
                                "associativity fails on ({}, {}, {})",
                                x.index(),
                                y.index(),
                                z.index()
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Every group `Z_{d_1} x ... x Z_{d_r}` with `2 <= d_1 <= ... <= d_r` and
/// order in `2..=max_order`, sorted by (order, factors). Isomorphic
/// duplicates such as `Z2xZ3` and `Z6` are both present.
pub fn all_groups_up_to(max_order: usize) -> Result<Vec<Group>> {
    fn rec(min: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for d in min..=budget {
            cur.push(d);
            rec(d, budget / d, cur, out);
            cur.pop();
        }
    }
    let mut specs = Vec::new();
    rec(2, max_order, &mut Vec::new(), &mut specs);
    specs.sort_by(|a, b| {
        let oa: usize = a.iter().product();
        let ob: usize = b.iter().product();
        oa.cmp(&ob).then_with(|| a.cmp(b))
    });
    specs.iter().map(|orders| Group::with_cap(orders, max_order.clamp(DEFAULT_CAP, MAX_ORDER))).collect()
}
