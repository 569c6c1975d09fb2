//! Subgroups, quotients and the canonical projection.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::set::GroupSubset;

/// A subset known to be closed under addition and negation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    carrier: GroupSubset,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.carrier)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.carrier.fmt(f)
    }
}

/// Checks the subgroup invariant directly on the elements: contains 0,
/// closed under addition and negation.
pub fn is_subgroup(set: &GroupSubset) -> bool {
    let g = set.group();
    set.contains(Element::ZERO)
        && set.iter().all(|x| set.contains(g.neg(x)) && set.iter().all(|y| set.contains(g.add(x, y))))
}

impl Subgroup {
    pub fn new(carrier: GroupSubset) -> Result<Subgroup> {
        if !is_subgroup(&carrier) {
            return Err(Error::NotSubgroup(carrier.to_string()));
        }
        Ok(Subgroup { carrier })
    }

    pub(crate) fn from_bits_unchecked(group: &Group, bits: u64) -> Subgroup {
        Subgroup { carrier: GroupSubset::from_bits(group, bits) }
    }

    pub fn trivial(group: &Group) -> Subgroup {
        Subgroup::from_bits_unchecked(group, 1)
    }

    pub fn whole(group: &Group) -> Subgroup {
        Subgroup::from_bits_unchecked(group, group.full_mask())
    }

    pub fn carrier(&self) -> &GroupSubset {
        &self.carrier
    }

    pub fn group(&self) -> &Group {
        self.carrier.group()
    }

    pub fn bits(&self) -> u64 {
        self.carrier.bits()
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.carrier.bits() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.carrier.bits() == self.group().full_mask()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.carrier.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.carrier.is_subset(&other.carrier)
    }

    /// The coset `x + H`.
    pub fn coset(&self, x: Element) -> GroupSubset {
        self.carrier.translate(x)
    }

    /// `X + H`.
    pub fn saturate(&self, set: &GroupSubset) -> GroupSubset {
        let g = self.group();
        GroupSubset::from_bits(g, g.sumset_bits(set.bits(), self.bits()))
    }

    /// True when `X + H = X`.
    pub fn stabilizes(&self, set: &GroupSubset) -> bool {
        self.group().sumset_bits(set.bits(), self.bits()) == set.bits() || set.is_empty()
    }
}

impl Group {
    /// Every subgroup exactly once, sorted by (cardinality, bitmask).
    pub fn subgroups(&self) -> Vec<Subgroup> {
        self.subgroup_masks().iter().map(|&m| Subgroup::from_bits_unchecked(self, m)).collect()
    }

    /// `<X>`; the trivial subgroup for empty `X`.
    pub fn subgroup_generated(&self, set: &GroupSubset) -> Subgroup {
        Subgroup::from_bits_unchecked(self, self.closure_bits(set.bits()))
    }

    /// Canonical projection onto `G/H`. Elements of the quotient are
    /// numbered by increasing canonical label (the smallest member index of
    /// the coset), so the coset `H` itself is the identity.
    pub fn quotient(&self, h: &Subgroup) -> Result<Morphism> {
        if h.group() != self {
            return Err(Error::GroupMismatch { left: self.name().to_string(), right: h.group().name().to_string() });
        }
        let n = self.order();
        let mut coset_of = vec![u8::MAX; n];
        let mut labels = Vec::new();
        for x in self.elements() {
            if coset_of[x.index()] != u8::MAX {
                continue;
            }
            let idx = labels.len() as u8;
            labels.push(x);
            for y in h.coset(x).iter() {
                coset_of[y.index()] = idx;
            }
        }
        let q = labels.len();
        let mut add = vec![0u8; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = coset_of[self.add(labels[i], labels[j]).index()];
            }
        }
        let name = format!("{}/{}", self.name(), h);
        let target = Group::from_table(name, q, add);
        Ok(Morphism { source: self.clone(), target, kernel: h.clone(), coset_of, labels })
    }
}

/// The projection `G -> G/H`.
#[derive(Clone, Debug)]
pub struct Morphism {
    source: Group,
    target: Group,
    kernel: Subgroup,
    coset_of: Vec<u8>,
    labels: Vec<Element>,
}

impl Morphism {
    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// `phi(x)`.
    pub fn apply(&self, x: Element) -> Element {
        Element(self.coset_of[x.index()])
    }

    /// Smallest source element of the coset labelled by `y`.
    pub fn label(&self, y: Element) -> Element {
        self.labels[y.index()]
    }

    /// `phi(X)`.
    pub fn image(&self, set: &GroupSubset) -> GroupSubset {
        GroupSubset::from_elements(&self.target, set.iter().map(|x| self.apply(x)))
    }

    /// `phi^{-1}(Y)`, the union of the fibres over `Y`.
    pub fn preimage(&self, set: &GroupSubset) -> Result<GroupSubset> {
        if set.group() != &self.target {
            return Err(Error::GroupMismatch {
                left: self.target.name().to_string(),
                right: set.group().name().to_string(),
            });
        }
        Ok(GroupSubset::from_elements(&self.source, self.source.elements().filter(|&x| set.contains(self.apply(x)))))
    }

    /// Renders a quotient element as `[x]` with `x` its canonical label.
    pub fn render(&self, y: Element) -> String {
        format!("[{}]", self.source.render_element(self.label(y)))
    }

    pub fn render_set(&self, set: &GroupSubset) -> String {
        let parts: Vec<String> = set.iter().map(|y| self.render(y)).collect();
        format!("{{{}}}", parts.join(","))
    }
}
