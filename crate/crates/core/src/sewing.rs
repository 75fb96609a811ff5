//! The sewing element `𝟙^W = Σ_i 𝟙^{W_i} q^i`, its vanishing identity, and the
//! `q∂_q + c_W` bookkeeping on q-series blocks.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exact::{int, LinComb, QSeries, Rational};
use crate::kernel::{
    act, act_mode_element, homogeneous_degree, theta_involution, Contragredient, KernelResult, ModeElement, State,
    VertexModule,
};

/// `𝟙^{W_i} = Σ_w w ⊗ w^*` over the basis of each `W_i`, `i ≤ cutoff`.
#[derive(Debug, Clone)]
pub struct SewingElement<B> {
    pub cutoff: usize,
    pub conformal_weight: Rational,
    pub components: Vec<Vec<B>>,
}

impl<B: Clone> SewingElement<B> {
    pub fn new<M: VertexModule<Basis = B>>(module: &M, cutoff: usize) -> Self {
        SewingElement {
            cutoff,
            conformal_weight: module.conformal_weight(),
            components: (0..=cutoff).map(|i| module.basis(i as i64)).collect(),
        }
    }

    /// Contraction of `𝟙^{W_i}`, i.e. `dim W_i`.
    pub fn contraction(&self, i: usize) -> usize {
        self.components.get(i).map_or(0, Vec::len)
    }

    /// `Σ_i dim W_i q^i`.
    pub fn character(&self) -> QSeries {
        QSeries::from_coeffs(self.cutoff, (0..=self.cutoff).map(|i| int(self.contraction(i) as i64)))
    }
}

pub fn sewn_character<M: VertexModule>(module: &M, cutoff: usize) -> QSeries {
    SewingElement::new(module, cutoff).character()
}

/// Checks `(A_{[m]} ⊗ 1 + 1 ⊗ ϑ(A_{[m]}) q^{i−j}) 𝟙^W = 0` for `m = i − j + k − 1`,
/// componentwise in `W_a ⊗ W′_b q^b` for all `a, b ≤ cutoff`. The `ϑ` side acts on
/// the contragredient module.
pub fn sewing_identity_check<M: VertexModule>(
    module: &M,
    a: &LinComb<State<M::Algebra>>,
    i: i64,
    j: i64,
    cutoff: i64,
) -> KernelResult<bool> {
    let voa = module.algebra();
    let Some(k) = homogeneous_degree(voa, a)? else { return Ok(true) };
    let m = i - j + k - 1;
    let sigma = ModeElement::from_vector(a, m);
    let theta = theta_involution(voa, &sigma)?;
    let dual = Contragredient::new(module);
    for b in 0..=cutoff {
        let top = b + j - i;
        if !(0..=cutoff).contains(&top) {
            continue;
        }
        // first[(u, w)] = ⟨u^*, A_(m) w⟩ for w ∈ W_b, u ∈ W_top
        let mut total: BTreeMap<(M::Basis, M::Basis), Rational> = BTreeMap::new();
        for w in module.basis(b) {
            let image = act_mode_element(module, &sigma, &LinComb::basis(w.clone()))?;
            for (u, c) in image.iter() {
                *total.entry((u.clone(), w.clone())).or_insert_with(Rational::zero) += c;
            }
        }
        for u in module.basis(top) {
            let image = act_mode_element(&dual, &theta, &LinComb::basis(u.clone()))?;
            for (w, c) in image.iter() {
                *total.entry((u.clone(), w.clone())).or_insert_with(Rational::zero) += c;
            }
        }
        if total.values().any(|c| !c.is_zero()) {
            return Ok(false);
        }
    }
    // The window is respected by both sides; `act` reports any overflow.
    let _ = act::<M>;
    Ok(true)
}

/// Rank data per label as q-series, with the shift `c_W` of each block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralBlock {
    pub series: BTreeMap<String, QSeries>,
    pub shifts: BTreeMap<String, Rational>,
}

/// `Σ a_d q^d ↦ Σ (d + c_W) a_d q^d` on every block.
pub fn spectral_apply_d(block: &SpectralBlock) -> SpectralBlock {
    let series = block
        .series
        .iter()
        .map(|(label, s)| {
            let shift = block.shifts.get(label).cloned().unwrap_or_else(Rational::zero);
            let coeffs = s.coeffs().iter().enumerate().map(|(d, a)| (int(d as i64) + &shift) * a);
            (label.clone(), QSeries::from_coeffs(s.cutoff(), coeffs))
        })
        .collect();
    SpectralBlock { series, shifts: block.shifts.clone() }
}
