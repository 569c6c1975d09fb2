//! Exact additive combinatorics on small finite abelian groups.
//!
//! Groups are numbered densely and subsets are `u64` bitmasks, so every
//! quantity (sumsets, periods, connectivities, fragments, critical-pair
//! certificates) is computed exactly by exhaustive search.

pub mod error;
pub mod group;
pub mod isoperimetry;
pub mod kemperman;
pub mod matching;
pub mod oracles;
pub mod set;
pub mod setops;
pub mod subgroup;
pub mod wire;

pub use error::{Error, Result};
pub use group::{all_groups_up_to, configured_cap, Element, Group, DEFAULT_CAP, MAX_ORDER};
pub use set::GroupSubset;
pub use setops::QuasiPeriodicDecomposition;
pub use subgroup::{Morphism, Subgroup};
