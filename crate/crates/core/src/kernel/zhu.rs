//! Zhu's product `A * B` and a truncated approximation of `O(V)`.

use super::{homogeneous_degree, mode, KernelError, KernelResult, State, Vector, VertexAlgebra};
use crate::exact::{binomial, LinComb, Rational, SparseEchelon};

/// `Σ_{j≥0} C(deg A, j) A_{(j−1)}B` for homogeneous `A`.
pub fn zhu_product<V: VertexAlgebra>(voa: &V, a: &Vector<V>, b: &Vector<V>) -> KernelResult<Vector<V>> {
    residue_expansion(voa, a, b, 1)
}

/// The `O(V)` generator `Σ_{j≥0} C(deg A, j) A_{(j−2)}B`.
pub fn zhu_o_generator<V: VertexAlgebra>(voa: &V, a: &Vector<V>, b: &Vector<V>) -> KernelResult<Vector<V>> {
    residue_expansion(voa, a, b, 2)
}

fn residue_expansion<V: VertexAlgebra>(voa: &V, a: &Vector<V>, b: &Vector<V>, shift: i64) -> KernelResult<Vector<V>> {
    let Some(k) = homogeneous_degree(voa, a)? else {
        return Ok(LinComb::zero());
    };
    let mut out = LinComb::zero();
    for j in 0..=k {
        let c = binomial(k, j);
        for (s, cs) in a.iter() {
            out.add_scaled(&mode(voa, s, j - shift, b)?, &(&c * cs));
        }
    }
    Ok(out)
}

/// Span of the `O(V)` generators whose inputs `A, B′` are basis states with
/// `deg A + deg B′ + 1 ≤ cutoff`, so every generator stays inside `V_{≤cutoff}`.
/// This is a subspace of `O(V) ∩ V_{≤cutoff}`, not necessarily all of it.
pub struct ZhuIdeal<'a, V: VertexAlgebra> {
    voa: &'a V,
    cutoff: i64,
    span: SparseEchelon<State<V>>,
}

impl<'a, V: VertexAlgebra> ZhuIdeal<'a, V> {
    pub fn new(voa: &'a V, cutoff: i64) -> KernelResult<Self> {
        if cutoff > voa.max_degree() {
            return Err(KernelError::Overflow { degree: Rational::from_integer(cutoff.into()), window: voa.max_degree() });
        }
        let mut span = SparseEchelon::new();
        for da in 0..cutoff {
            for a in voa.basis(da) {
                let av = LinComb::basis(a);
                for db in 0..cutoff - da {
                    for b in voa.basis(db) {
                        span.insert(zhu_o_generator(voa, &av, &LinComb::basis(b))?);
                    }
                }
            }
        }
        Ok(ZhuIdeal { voa, cutoff, span })
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, b: &Vector<V>) -> bool {
        self.span.contains(b)
    }

    /// Dimension of `V_{≤cutoff}` modulo the truncated ideal.
    pub fn quotient_dim(&self) -> usize {
        let total: usize = (0..=self.cutoff).map(|d| self.voa.basis(d).len()).sum();
        total - self.span.rank()
    }
}

/// Whether `b` lies in the truncated `O(V)` approximation at `cutoff`.
pub fn zhu_o_membership<V: VertexAlgebra>(voa: &V, b: &Vector<V>, cutoff: i64) -> KernelResult<bool> {
    if b.is_zero() {
        return Ok(true);
    }
    Ok(ZhuIdeal::new(voa, cutoff)?.contains(b))
}
