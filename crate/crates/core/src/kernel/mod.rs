//! Truncated vertex algebras and their modules.
//!
//! A [`VertexAlgebra`] exposes a graded basis up to a window `D_V` together with
//! exact mode products `A_{(i)}B` on basis states. Everything that leaves the
//! window is reported as [`KernelError::Overflow`]; nothing is silently dropped.
//! On top of the trait live the ancillary Lie algebra ([`AncillaryLie`]), the
//! transition element `γ = e^{L_1}(−1)^{L_0}` ([`gamma_action`]), Zhu's product
//! and `O(V)` ([`zhu_product`], [`ZhuIdeal`]) and contragredient modules
//! ([`Contragredient`]).

mod contragredient;
mod lie;
mod zhu;

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::Zero;
use thiserror::Error;

use crate::exact::{factorial, sign, ExactError, GradedSpace, LinComb, Rational};

pub use contragredient::{contragredient_action, Contragredient};
pub use lie::{lie_bracket, theta_involution, AncillaryLie, ModeElement};
pub use zhu::{zhu_o_generator, zhu_o_membership, zhu_product, ZhuIdeal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("truncation overflow: degree {degree} exceeds window {window}")]
    Overflow { degree: Rational, window: i64 },
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("{0}")]
    Exact(#[from] ExactError),
}

pub type KernelResult<T> = Result<T, KernelError>;

/// A vertex algebra truncated to degrees `0..=max_degree`.
pub trait VertexAlgebra: Send + Sync {
    type State: Clone + Ord + Hash + Debug + Send + Sync;

    fn central_charge(&self) -> Rational;
    /// Largest degree `D_V` inside the window.
    fn max_degree(&self) -> i64;
    fn degree(&self, a: &Self::State) -> i64;
    /// Basis of `V_d`, in a fixed reproducible order.
    fn basis(&self, degree: i64) -> Vec<Self::State>;
    fn vacuum(&self) -> Self::State;
    fn omega(&self) -> LinComb<Self::State>;
    /// `A_{(i)}B` on basis states, ignoring the window.
    fn mode_exact(&self, a: &Self::State, i: i64, b: &Self::State) -> LinComb<Self::State>;
}

/// A module over a [`VertexAlgebra`], graded by `L_0 − c_W` and truncated at `max_degree`.
pub trait VertexModule: Send + Sync {
    type Algebra: VertexAlgebra;
    type Basis: Clone + Ord + Hash + Debug + Send + Sync;

    fn algebra(&self) -> &Self::Algebra;
    /// Conformal weight `c_W`, the `L_0` eigenvalue on the degree-zero part.
    fn conformal_weight(&self) -> Rational;
    fn max_degree(&self) -> i64;
    fn degree(&self, m: &Self::Basis) -> i64;
    fn basis(&self, degree: i64) -> Vec<Self::Basis>;
    /// `A^M_{(i)} m` on basis vectors, ignoring the window.
    fn act_exact(&self, a: &<Self::Algebra as VertexAlgebra>::State, i: i64, m: &Self::Basis) -> LinComb<Self::Basis>;
}

pub type State<V> = <V as VertexAlgebra>::State;
pub type Vector<V> = LinComb<State<V>>;

/// Degree of the homogeneous vector `v`, or `None` for zero.
pub fn homogeneous_degree<V: VertexAlgebra>(voa: &V, v: &Vector<V>) -> KernelResult<Option<i64>> {
    let mut deg = None;
    for k in v.keys() {
        let d = voa.degree(k);
        match deg {
            None => deg = Some(d),
            Some(e) if e != d => return Err(KernelError::NotHomogeneous),
            _ => {}
        }
    }
    Ok(deg)
}

fn overflow(degree: i64, window: i64) -> KernelError {
    KernelError::Overflow { degree: Rational::from_integer(degree.into()), window }
}

/// `A_{(i)}v` for a basis state `A`, with the window enforced on the output.
pub fn mode<V: VertexAlgebra>(voa: &V, a: &State<V>, i: i64, v: &Vector<V>) -> KernelResult<Vector<V>> {
    let shift = voa.degree(a) - i - 1;
    v.try_map_linear(|b| {
        let target = voa.degree(b) + shift;
        if target > voa.max_degree() {
            return Err(overflow(target, voa.max_degree()));
        }
        if target < 0 {
            return Ok(LinComb::zero());
        }
        Ok(voa.mode_exact(a, i, b))
    })
}

/// `A_{(i)}v` for an arbitrary vector `A`.
pub fn mode_vec<V: VertexAlgebra>(voa: &V, a: &Vector<V>, i: i64, v: &Vector<V>) -> KernelResult<Vector<V>> {
    let mut out = LinComb::zero();
    for (s, c) in a.iter() {
        out.add_scaled(&mode(voa, s, i, v)?, c);
    }
    Ok(out)
}

/// `L_n v = ω_{(n+1)} v`.
pub fn virasoro<V: VertexAlgebra>(voa: &V, n: i64, v: &Vector<V>) -> KernelResult<Vector<V>> {
    mode_vec(voa, &voa.omega(), n + 1, v)
}

/// Graded basis of the window as a [`GradedSpace`].
pub fn graded_space<V: VertexAlgebra>(voa: &V) -> GradedSpace<State<V>> {
    let mut g = GradedSpace::new();
    for d in 0..=voa.max_degree() {
        g.insert_component(Rational::from_integer(d.into()), voa.basis(d));
    }
    g
}

/// `Σ_{i≥0} (1/i!) L_1^i A`, grouped as the list `[A, L_1 A, L_1^2 A/2!, …]` of nonzero terms.
pub(crate) fn exp_l1_terms<V: VertexAlgebra>(voa: &V, a: &Vector<V>) -> KernelResult<Vec<Vector<V>>> {
    let mut terms = Vec::new();
    let mut current = a.clone();
    let mut i = 0u64;
    while !current.is_zero() {
        let f = Rational::from_integer(factorial(i));
        terms.push(current.scale(&f.recip()));
        current = virasoro(voa, 1, &current)?;
        i += 1;
    }
    Ok(terms)
}

/// `γ·A = e^{L_1}(−1)^{L_0} A`, applied degree by degree.
pub fn gamma_action<V: VertexAlgebra>(voa: &V, a: &Vector<V>) -> KernelResult<Vector<V>> {
    let mut out = LinComb::zero();
    let mut by_degree: std::collections::BTreeMap<i64, Vector<V>> = Default::default();
    for (s, c) in a.iter() {
        by_degree.entry(voa.degree(s)).or_default().add_term(s.clone(), c.clone());
    }
    for (k, part) in by_degree {
        for t in exp_l1_terms(voa, &part)? {
            out.add_scaled(&t, &sign(k));
        }
    }
    Ok(out)
}

/// The vertex algebra as a module over itself.
pub struct Adjoint<'a, V: VertexAlgebra> {
    voa: &'a V,
}

impl<'a, V: VertexAlgebra> Adjoint<'a, V> {
    pub fn new(voa: &'a V) -> Self {
        Adjoint { voa }
    }
}

impl<V: VertexAlgebra> VertexModule for Adjoint<'_, V> {
    type Algebra = V;
    type Basis = V::State;

    fn algebra(&self) -> &V {
        self.voa
    }
    fn conformal_weight(&self) -> Rational {
        Rational::zero()
    }
    fn max_degree(&self) -> i64 {
        self.voa.max_degree()
    }
    fn degree(&self, m: &V::State) -> i64 {
        self.voa.degree(m)
    }
    fn basis(&self, degree: i64) -> Vec<V::State> {
        self.voa.basis(degree)
    }
    fn act_exact(&self, a: &V::State, i: i64, m: &V::State) -> LinComb<V::State> {
        self.voa.mode_exact(a, i, m)
    }
}

pub type ModVector<M> = LinComb<<M as VertexModule>::Basis>;

/// `A^M_{(i)} v` with the module window enforced on the output.
pub fn act<M: VertexModule>(module: &M, a: &State<M::Algebra>, i: i64, v: &ModVector<M>) -> KernelResult<ModVector<M>> {
    let shift = module.algebra().degree(a) - i - 1;
    v.try_map_linear(|m| {
        let target = module.degree(m) + shift;
        if target > module.max_degree() {
            return Err(overflow(target, module.max_degree()));
        }
        if target < 0 {
            return Ok(LinComb::zero());
        }
        Ok(module.act_exact(a, i, m))
    })
}

/// `A^M_{(i)} v` for an arbitrary vector `A ∈ V`.
pub fn act_vec<M: VertexModule>(
    module: &M,
    a: &Vector<M::Algebra>,
    i: i64,
    v: &ModVector<M>,
) -> KernelResult<ModVector<M>> {
    let mut out = LinComb::zero();
    for (s, c) in a.iter() {
        out.add_scaled(&act(module, s, i, v)?, c);
    }
    Ok(out)
}

/// Action of a mode element `Σ c A_{[i]}` through `A_{[i]} ↦ A_{(i)}`.
pub fn act_mode_element<M: VertexModule>(
    module: &M,
    x: &ModeElement<State<M::Algebra>>,
    v: &ModVector<M>,
) -> KernelResult<ModVector<M>> {
    let mut out = LinComb::zero();
    for ((s, i), c) in x.terms() {
        out.add_scaled(&act(module, s, *i, v)?, c);
    }
    Ok(out)
}

/// `L_0` eigenvalue check helper: returns `L_0 v` on the module.
pub fn module_l0<M: VertexModule>(module: &M, v: &ModVector<M>) -> KernelResult<ModVector<M>> {
    act_vec(module, &module.algebra().omega(), 1, v)
}

#[cfg(test)]
pub(crate) mod tests;
