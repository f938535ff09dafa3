//! Exact-arithmetic Chevalley groups over finite commutative rings.
//!
//! The crate builds reduced irreducible root systems of rank >= 2, a Chevalley
//! basis with integer structure constants, exact matrix realizations of the
//! corresponding groups over finite commutative rings, and the subgroup lattice
//! around relative elementary and congruence subgroups. On top of that sits a
//! verification harness that checks commutator formulas, level computations and
//! explicit exponent bounds by exhaustive computation, and a CLI (`chevalley`)
//! that runs verification plans and emits JSON reports.
//!
//! Everything is computed with exact arithmetic: ring elements are table-driven,
//! matrices are compared entry by entry, and every claimed membership is either
//! decided by enumeration or witnessed by an explicit generator word that is
//! multiplied back.

pub mod calculus;
pub mod chevbasis;
pub mod group;
pub mod harness;
pub mod ring;
pub mod roots;
pub mod subgroups;

#[cfg(doctest)]
mod book {
    //! The guide chapters double as doc-tests so the book's snippets stay
    //! compilable against the current API.
    #[doc = include_str!("../../../book/src/root-systems.md")]
    mod root_systems {}
    #[doc = include_str!("../../../book/src/chevalley-basis.md")]
    mod chevalley_basis {}
    #[doc = include_str!("../../../book/src/finite-rings.md")]
    mod finite_rings {}
    #[doc = include_str!("../../../book/src/group-elements.md")]
    mod group_elements {}
    #[doc = include_str!("../../../book/src/subgroups.md")]
    mod subgroups_ch {}
    #[doc = include_str!("../../../book/src/calculus.md")]
    mod calculus_ch {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness_ch {}
}
