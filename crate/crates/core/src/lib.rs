//! Exact computations around factorization and sewing of vertex-algebra
//! conformal blocks.
//!
//! The crate is layered bottom-up:
//!
//! * [`exact`]: rationals, sparse vectors, fraction-free rank, q-series, Laurent jets.
//! * [`kernel`]: truncated vertex algebras, the ancillary Lie algebra, `γ`, `ϑ`,
//!   Zhu's product and contragredient actions.
//! * [`fock`] and [`virasoro`]: concrete instances (Heisenberg, rank-one lattices,
//!   universal Virasoro).
//! * [`catalog`]: fusion rings of rational families with a validator.
//! * [`factorization`]: stable graphs and the rank recursion.
//! * [`sewing`], [`nodal`], [`genus_zero`]: the sewing identity, nodal gluing
//!   conditions, and a truncated coinvariant estimator on the projective line.

pub mod exact;

pub use exact::{LinComb, QSeries, Rational};
pub mod fock;
pub mod kernel;
pub mod virasoro;
pub mod catalog;
pub mod factorization;
pub mod sewing;
pub mod nodal;
pub mod genus_zero;
