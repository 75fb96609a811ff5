//! The contragredient module `M′`, realised on the dual basis of `M`.

use num_traits::Zero;

use super::{exp_l1_terms, KernelResult, ModVector, State, VertexAlgebra, VertexModule};
use crate::exact::{sign, LinComb, Rational};

/// `M′ = ⊕ M_d^*`. A basis label `m` stands for the functional dual to `m`.
///
/// `⟨A_{(n)}ψ, w⟩ = (−1)^k Σ_{l≥0} (1/l!) ⟨ψ, (L_1^l A)_{(2k−l−n−2)} w⟩` for `A ∈ V_k`.
pub struct Contragredient<'a, M: VertexModule> {
    inner: &'a M,
}

impl<'a, M: VertexModule> Contragredient<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        Contragredient { inner }
    }

    pub fn inner(&self) -> &M {
        self.inner
    }

    /// `⟨ψ, w⟩` for dual-basis coordinates `ψ` and a vector `w` of `M`.
    pub fn pair(psi: &ModVector<M>, w: &ModVector<M>) -> Rational {
        psi.iter().map(|(m, c)| c * w.coeff(m)).fold(Rational::zero(), |a, b| a + b)
    }
}

impl<M: VertexModule> VertexModule for Contragredient<'_, M> {
    type Algebra = M::Algebra;
    type Basis = M::Basis;

    fn algebra(&self) -> &M::Algebra {
        self.inner.algebra()
    }
    fn conformal_weight(&self) -> Rational {
        self.inner.conformal_weight()
    }
    fn max_degree(&self) -> i64 {
        self.inner.max_degree()
    }
    fn degree(&self, m: &M::Basis) -> i64 {
        self.inner.degree(m)
    }
    fn basis(&self, degree: i64) -> Vec<M::Basis> {
        self.inner.basis(degree)
    }
    fn act_exact(&self, a: &State<M::Algebra>, n: i64, psi: &M::Basis) -> LinComb<M::Basis> {
        let voa = self.inner.algebra();
        let k = voa.degree(a);
        let target = self.inner.degree(psi) + k - n - 1;
        let mut out = LinComb::zero();
        if target < 0 {
            return out;
        }
        // L_1 only lowers degree, so this never leaves the window.
        let terms = exp_l1_terms(voa, &LinComb::basis(a.clone())).expect("L_1 lowers degree");
        for w in self.inner.basis(target) {
            let mut c = Rational::zero();
            for (l, t) in terms.iter().enumerate() {
                for (s, cs) in t.iter() {
                    c += cs * self.inner.act_exact(s, 2 * k - l as i64 - n - 2, &w).coeff(psi);
                }
            }
            out.add_term(w, sign(k) * c);
        }
        out
    }
}

/// `o(A)·ψ` on `M_0^∨`: `⟨o(A)ψ, m⟩ = (−1)^k ⟨ψ, Σ_i (1/i!) (L_1^i A)_{(k−i−1)} m⟩`.
pub fn contragredient_action<M: VertexModule>(
    module: &M,
    a: &LinComb<State<M::Algebra>>,
    psi: &ModVector<M>,
) -> KernelResult<ModVector<M>> {
    let voa = module.algebra();
    let mut out = LinComb::zero();
    for (s, cs) in a.iter() {
        let k = voa.degree(s);
        let terms = exp_l1_terms(voa, &LinComb::basis(s.clone()))?;
        for m in module.basis(0) {
            let mut c = Rational::zero();
            for (i, t) in terms.iter().enumerate() {
                for (b, cb) in t.iter() {
                    let image = module.act_exact(b, k - i as i64 - 1, &m);
                    c += cb * Contragredient::<M>::pair(psi, &image);
                }
            }
            out.add_term(m, sign(k) * c * cs);
        }
    }
    Ok(out)
}
