//! Bitset-encoded subsets of a [`Group`].

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// A subset of one group, stored as a bitmask over element indices.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupSubset {
    group: Group,
    bits: u64,
}

impl std::hash::Hash for GroupSubset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.name().hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for GroupSubset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by bitmask; only meaningful within one group.
impl Ord for GroupSubset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits.cmp(&other.bits)
    }
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.group.name(), self)
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|x| self.group.render_element(x)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl GroupSubset {
    pub fn new(group: &Group, bits: u64) -> Result<GroupSubset> {
        if bits & !group.full_mask() != 0 {
            let index = 63 - (bits & !group.full_mask()).leading_zeros() as usize;
            return Err(Error::IndexOutOfRange { index, order: group.order() });
        }
        Ok(GroupSubset { group: group.clone(), bits })
    }

    /// Caller guarantees `bits` lies inside the group.
    #[inline]
    pub(crate) fn from_bits(group: &Group, bits: u64) -> GroupSubset {
        debug_assert_eq!(bits & !group.full_mask(), 0);
        GroupSubset { group: group.clone(), bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &Group, indices: I) -> Result<GroupSubset> {
        let mut bits = 0u64;
        for i in indices {
            bits |= 1 << group.element(i)?.index();
        }
        Ok(GroupSubset::from_bits(group, bits))
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(group: &Group, elements: I) -> GroupSubset {
        let bits = elements.into_iter().fold(0u64, |m, x| m | 1 << x.index());
        GroupSubset::from_bits(group, bits)
    }

    pub fn empty(group: &Group) -> GroupSubset {
        GroupSubset::from_bits(group, 0)
    }

    pub fn full(group: &Group) -> GroupSubset {
        GroupSubset::from_bits(group, group.full_mask())
    }

    pub fn singleton(group: &Group, x: Element) -> GroupSubset {
        GroupSubset::from_bits(group, 1 << x.index())
    }

    /// Parses a comma-separated list of flat indices (`"0,1,3"`) or residue
    /// tuples (`"(0,1),(1,3)"`). Whitespace is ignored; `""` is the empty set.
    pub fn parse(group: &Group, text: &str) -> Result<GroupSubset> {
        let (body, offset) = match (text.find('{'), text.rfind('}')) {
            (Some(open), Some(close)) if open < close && text[..open].trim().is_empty() => {
                (&text[open + 1..close], open + 1)
            }
            _ => (text, 0),
        };
        let mut bits = 0u64;
        if body.trim().is_empty() {
            return Ok(GroupSubset::empty(group));
        }
        let bytes = body.as_bytes();
        let len = bytes.len();
        let parse_err = |position: usize, message: String| Error::Parse { position: offset + position, message };
        let mut pos = 0;
        loop {
            while pos < len && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            let end = if bytes.get(pos) == Some(&b'(') {
                match body[pos..].find(')') {
                    Some(off) => pos + off + 1,
                    None => return Err(parse_err(pos, "unclosed '('".into())),
                }
            } else {
                body[pos..].find(',').map_or(len, |off| pos + off)
            };
            let token = &body[start..end];
            if token.trim().is_empty() {
                return Err(parse_err(start, "empty element".into()));
            }
            let x = group.parse_element(token).map_err(|e| match e {
                Error::Parse { message, .. } => parse_err(start, message),
                other => parse_err(start, other.to_string()),
            })?;
            bits |= 1 << x.index();
            pos = end;
            while pos < len && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos == len {
                break;
            }
            if bytes[pos] != b',' {
                return Err(parse_err(pos, format!("expected ',' but found {:?}", bytes[pos] as char)));
            }
            pos += 1;
        }
        Ok(GroupSubset::from_bits(group, bits))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, x: Element) -> bool {
        self.bits >> x.index() & 1 == 1
    }

    /// Smallest element by index.
    pub fn min_element(&self) -> Option<Element> {
        (self.bits != 0).then(|| Element::from_index(self.bits.trailing_zeros() as usize))
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(Element::from_index(i))
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().map(Element::index).collect()
    }

    fn same_group(&self, other: &GroupSubset) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left: self.group.name().to_string(), right: other.group.name().to_string() })
        }
    }

    fn with_bits(&self, bits: u64) -> GroupSubset {
        GroupSubset::from_bits(&self.group, bits)
    }

    pub fn union(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    pub fn intersection(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    pub fn difference(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        Ok(self.with_bits(self.bits & !other.bits))
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.group == other.group && self.bits & !other.bits == 0
    }

    pub fn insert(&mut self, x: Element) {
        self.bits |= 1 << x.index();
    }

    pub fn remove(&mut self, x: Element) {
        self.bits &= !(1 << x.index());
    }

    /// `A + x`.
    pub fn translate(&self, x: Element) -> GroupSubset {
        self.with_bits(self.group.translate_bits(self.bits, x))
    }

    /// `-A`.
    pub fn negate(&self) -> GroupSubset {
        self.with_bits(self.group.negate_bits(self.bits))
    }

    /// `G \ A`.
    pub fn complement(&self) -> GroupSubset {
        self.with_bits(!self.bits & self.group.full_mask())
    }

    /// Minkowski sum `{a + b : a in A, b in B}` by shifted-OR passes.
    pub fn sumset(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        Ok(self.with_bits(self.group.sumset_bits(self.bits, other.bits)))
    }

    /// Number of pairs `(a, b)` in `A x B` with `a + b = x`,
    /// i.e. `|(x - B) ∩ A|`.
    pub fn rep_count(&self, other: &GroupSubset, x: Element) -> Result<usize> {
        self.same_group(other)?;
        let g = &self.group;
        let x_minus_b = g.translate_bits(g.negate_bits(other.bits), x);
        Ok((x_minus_b & self.bits).count_ones() as usize)
    }

    /// Representation counts for every element, indexed by element.
    pub fn rep_counts(&self, other: &GroupSubset) -> Result<Vec<usize>> {
        self.same_group(other)?;
        let g = &self.group;
        let neg_b = g.negate_bits(other.bits);
        Ok(g.elements().map(|x| (g.translate_bits(neg_b, x) & self.bits).count_ones() as usize).collect())
    }
}
