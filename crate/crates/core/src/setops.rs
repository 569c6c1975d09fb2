//! Periods, arithmetic progressions and quasi-periodic decompositions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Element;
use crate::set::GroupSubset;
use crate::subgroup::Subgroup;

impl GroupSubset {
    /// The stabilizer `{h : A + h = A}`. `A` is aperiodic iff this is `{0}`.
    pub fn period(&self) -> Result<Subgroup> {
        let first = self.min_element().ok_or(Error::UndefinedPeriod)?;
        let g = self.group();
        // Any period h satisfies first + h in A.
        let candidates = g.translate_bits(self.bits(), g.neg(first));
        let mut bits = 0u64;
        let mut rest = candidates;
        while rest != 0 {
            let h = Element::from_index(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            if g.translate_bits(self.bits(), h) == self.bits() {
                bits |= 1 << h.index();
            }
        }
        Ok(Subgroup::from_bits_unchecked(g, bits))
    }

    pub fn is_aperiodic(&self) -> Result<bool> {
        Ok(self.period()?.is_trivial())
    }

    /// Every `d` with `A = {a, a+d, ..., a+(|A|-1)d}` for some `a`, all terms
    /// distinct. Singletons are progressions of every difference; an empty
    /// result means `A` is not a progression.
    pub fn ap_differences(&self) -> Result<Vec<Element>> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let g = self.group();
        if self.len() == 1 {
            return Ok(g.elements().collect());
        }
        Ok(g.elements().skip(1).filter(|&d| self.is_progression_with(d)).collect())
    }

    /// True when `A` (with `|A| >= 2`) is a progression of difference `d`.
    pub(crate) fn is_progression_with(&self, d: Element) -> bool {
        let g = self.group();
        let m = self.len();
        if d == Element::ZERO || g.element_order(d) < m {
            return false;
        }
        let bits = self.bits();
        // A start is an element whose predecessor is missing; without one,
        // A is a union of <d>-cosets and is a progression iff it is one coset.
        let starts = bits & !g.translate_bits(bits, d);
        if starts == 0 {
            return g.element_order(d) == m;
        }
        if starts.count_ones() != 1 {
            return false;
        }
        let mut x = Element::from_index(starts.trailing_zeros() as usize);
        for _ in 1..m {
            x = g.add(x, d);
            if !self.contains(x) {
                return false;
            }
        }
        true
    }

    pub fn is_progression(&self) -> bool {
        match self.len() {
            0 => false,
            1 => true,
            _ => self.group().elements().skip(1).any(|d| self.is_progression_with(d)),
        }
    }

    /// All `K`-quasi-periodic decompositions `A = A_0 ∪ A_1` with
    /// `A_0 + K = A_0` and `A_1` inside one `K`-coset.
    ///
    /// One candidate per coset meeting `A` (ordered by coset label), followed
    /// by `(A, ∅)` when `A` itself is `K`-periodic.
    pub fn quasi_periodic_decompositions(&self, k: &Subgroup) -> Result<Vec<QuasiPeriodicDecomposition>> {
        if self.group() != k.group() {
            return Err(Error::GroupMismatch {
                left: self.group().name().to_string(),
                right: k.group().name().to_string(),
            });
        }
        let g = self.group();
        let mut out = Vec::new();
        let mut remaining = self.bits();
        while remaining != 0 {
            let x = Element::from_index(remaining.trailing_zeros() as usize);
            let coset = g.translate_bits(k.bits(), x);
            remaining &= !coset;
            let part1 = self.bits() & coset;
            let part0 = self.bits() & !coset;
            if g.sumset_bits(part0, k.bits()) == part0 {
                out.push(QuasiPeriodicDecomposition {
                    subgroup: k.clone(),
                    periodic: GroupSubset::from_bits(g, part0),
                    residual: GroupSubset::from_bits(g, part1),
                    coset_rep: Some(coset_label(coset)),
                });
            }
        }
        if k.stabilizes(self) {
            out.push(QuasiPeriodicDecomposition {
                subgroup: k.clone(),
                periodic: self.clone(),
                residual: GroupSubset::empty(g),
                coset_rep: None,
            });
        }
        Ok(out)
    }

    pub fn is_quasi_periodic(&self, k: &Subgroup) -> Result<bool> {
        Ok(!self.quasi_periodic_decompositions(k)?.is_empty())
    }
}

fn coset_label(coset_bits: u64) -> Element {
    Element::from_index(coset_bits.trailing_zeros() as usize)
}

/// `A = periodic ∪ residual` with `periodic + K = periodic` and `residual`
/// inside the coset `coset_rep + K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPeriodicDecomposition {
    pub subgroup: Subgroup,
    pub periodic: GroupSubset,
    pub residual: GroupSubset,
    /// Canonical label (smallest index) of the residual's coset; `None` when
    /// the residual is empty.
    pub coset_rep: Option<Element>,
}

/// Which clause of a decomposition fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DecompositionFlaw {
    PeriodicPartNotStable,
    ResidualOutsideCoset,
    PartsOverlap,
    DoesNotReassemble,
}

impl QuasiPeriodicDecomposition {
    /// The decomposed set.
    pub fn whole(&self) -> GroupSubset {
        GroupSubset::from_bits(self.periodic.group(), self.periodic.bits() | self.residual.bits())
    }

    /// Checks the four invariants against `target`.
    pub fn check(&self, target: &GroupSubset) -> std::result::Result<(), DecompositionFlaw> {
        let g = self.subgroup.group();
        if !self.subgroup.stabilizes(&self.periodic) {
            return Err(DecompositionFlaw::PeriodicPartNotStable);
        }
        match self.coset_rep {
            Some(rep) => {
                let coset = g.translate_bits(self.subgroup.bits(), rep);
                if self.residual.bits() & !coset != 0 {
                    return Err(DecompositionFlaw::ResidualOutsideCoset);
                }
            }
            None if !self.residual.is_empty() => return Err(DecompositionFlaw::ResidualOutsideCoset),
            None => {}
        }
        if self.periodic.bits() & self.residual.bits() != 0 {
            return Err(DecompositionFlaw::PartsOverlap);
        }
        if self.periodic.bits() | self.residual.bits() != target.bits() || g != target.group() {
            return Err(DecompositionFlaw::DoesNotReassemble);
        }
        Ok(())
    }
}
