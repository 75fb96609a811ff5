//! The Lie algebra ancillary to `V`: `(V ⊗ Q((t))) / Im ∂` with
//! `∂ = L_{-1} ⊗ 1 + 1 ⊗ ∂_t`, written in the symbols `A_{[i]}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{exp_l1_terms, mode, virasoro, KernelResult, State, VertexAlgebra};
use crate::exact::{binomial, inverse, sign, LinComb, Rational, SparseEchelon};

/// A finite combination `Σ c · A_{[i]}` with `A` ranging over basis states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeElement<S: Ord> {
    terms: LinComb<(S, i64)>,
}

impl<S: Ord + Clone> Default for ModeElement<S> {
    fn default() -> Self {
        ModeElement { terms: LinComb::zero() }
    }
}

impl<S: Ord + Clone> ModeElement<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single symbol `A_{[i]}`.
    pub fn symbol(a: S, i: i64) -> Self {
        ModeElement { terms: LinComb::basis((a, i)) }
    }

    /// `Σ_s c_s · s_{[i]}` for a vector `Σ_s c_s s`.
    pub fn from_vector(v: &LinComb<S>, i: i64) -> Self {
        ModeElement { terms: v.iter().map(|(s, c)| ((s.clone(), i), c.clone())).collect() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (S, i64, Rational)>) -> Self {
        ModeElement { terms: terms.into_iter().map(|(s, i, c)| ((s, i), c)).collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(S, i64), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &S, i: i64) -> Rational {
        self.terms.coeff(&(a.clone(), i))
    }

    pub fn add_term(&mut self, a: S, i: i64, c: Rational) {
        self.terms.add_term((a, i), c);
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        self.terms.add_scaled(&other.terms, c);
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ModeElement { terms: self.terms.scale(c) }
    }

    pub fn sum(&self, other: &Self) -> Self {
        ModeElement { terms: &self.terms + &other.terms }
    }

    pub fn difference(&self, other: &Self) -> Self {
        ModeElement { terms: &self.terms - &other.terms }
    }
}

impl<S: Ord + Clone + std::fmt::Debug> std::fmt::Debug for ModeElement<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((s, i), c)| format!("({c})·{s:?}[{i}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Per-degree data for the normal form modulo `Im ∂`: `V_d` is split as
/// `L_{-1}(V_{d-1}) ⊕ K_d` with `K_d` spanned by basis states.
struct DegreeSplit<S: Ord> {
    index: BTreeMap<S, usize>,
    basis: Vec<S>,
    /// Sources `b_j ∈ V_{d-1}` whose images `L_{-1} b_j` form a basis of the image.
    sources: Vec<LinComb<S>>,
    /// Basis positions spanning the complement `K_d`.
    complement: Vec<usize>,
    /// Inverse of the matrix with columns `[L_{-1} b_j | e_r]`.
    inverse: Vec<Vec<Rational>>,
}

/// The ancillary Lie algebra of a truncated vertex algebra, with a normal form
/// for elements modulo `Im ∂`.
pub struct AncillaryLie<'a, V: VertexAlgebra> {
    voa: &'a V,
    splits: Vec<Option<DegreeSplit<State<V>>>>,
}

impl<'a, V: VertexAlgebra> AncillaryLie<'a, V> {
    pub fn new(voa: &'a V) -> KernelResult<Self> {
        let mut splits = vec![None];
        for d in 1..=voa.max_degree() {
            splits.push(Some(Self::split_degree(voa, d)?));
        }
        Ok(AncillaryLie { voa, splits })
    }

    fn split_degree(voa: &V, d: i64) -> KernelResult<DegreeSplit<State<V>>> {
        let basis = voa.basis(d);
        let index: BTreeMap<_, _> = basis.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let coords = |v: &LinComb<State<V>>| -> LinComb<usize> { v.iter().map(|(s, c)| (index[s], c.clone())).collect() };
        let mut ech = SparseEchelon::new();
        let mut sources = Vec::new();
        let mut columns: Vec<LinComb<usize>> = Vec::new();
        for b in voa.basis(d - 1) {
            let src = LinComb::basis(b);
            let img = virasoro(voa, -1, &src)?;
            let c = coords(&img);
            if ech.insert(c.clone()) {
                sources.push(src);
                columns.push(c);
            }
        }
        let mut complement = Vec::new();
        for r in 0..basis.len() {
            let e = LinComb::basis(r);
            if ech.insert(e.clone()) {
                complement.push(r);
                columns.push(e);
            }
        }
        let n = basis.len();
        let matrix: Vec<Vec<Rational>> =
            (0..n).map(|row| columns.iter().map(|col| col.coeff(&row)).collect()).collect();
        let inverse = if n == 0 { Vec::new() } else { inverse(&matrix)?.expect("split columns form a basis") };
        Ok(DegreeSplit { index, basis, sources, complement, inverse })
    }

    pub fn voa(&self) -> &V {
        self.voa
    }

    /// Degree `deg(A) − i − 1` of the symbol `A_{[i]}`.
    pub fn symbol_degree(&self, a: &State<V>, i: i64) -> i64 {
        self.voa.degree(a) - i - 1
    }

    /// Component of `x` in a fixed degree.
    pub fn degree_part(&self, x: &ModeElement<State<V>>, degree: i64) -> ModeElement<State<V>> {
        ModeElement { terms: x.terms.filter(|(a, i)| self.symbol_degree(a, *i) == degree) }
    }

    /// Normal form modulo `Im ∂`, using `(L_{-1}B)_{[i]} = −i B_{[i-1]}` and `𝟙_{[i]} = 0` for `i ≠ −1`.
    pub fn normalize(&self, x: &ModeElement<State<V>>) -> ModeElement<State<V>> {
        let mut out = ModeElement::zero();
        let mut work: Vec<(State<V>, i64, Rational)> =
            x.terms().map(|((a, i), c)| (a.clone(), *i, c.clone())).collect();
        while let Some((a, i, c)) = work.pop() {
            let d = self.voa.degree(&a);
            if d == 0 {
                if i == -1 {
                    out.add_term(a, i, c);
                }
                continue;
            }
            let split = self.splits[d as usize].as_ref().expect("degree inside window");
            let col = split.index[&a];
            let coords: Vec<Rational> = split.inverse.iter().map(|row| row[col].clone()).collect();
            let (img, rest) = coords.split_at(split.sources.len());
            for (src, x) in split.sources.iter().zip(img) {
                if x.is_zero() || i == 0 {
                    continue;
                }
                let f = &c * x * Rational::from_integer((-i).into());
                for (b, cb) in src.iter() {
                    work.push((b.clone(), i - 1, &f * cb));
                }
            }
            for (&r, x) in split.complement.iter().zip(rest) {
                if !x.is_zero() {
                    out.add_term(split.basis[r].clone(), i, &c * x);
                }
            }
        }
        out
    }

    /// Whether two lifts represent the same class modulo `Im ∂`.
    pub fn equivalent(&self, x: &ModeElement<State<V>>, y: &ModeElement<State<V>>) -> bool {
        self.normalize(&x.difference(y)).is_zero()
    }

    /// `[A_{[i]}, B_{[j]}] = Σ_{k≥0} C(i,k) (A_{(k)}B)_{[i+j−k]}`, extended bilinearly, on lifts.
    pub fn bracket_raw(
        &self,
        x: &ModeElement<State<V>>,
        y: &ModeElement<State<V>>,
    ) -> KernelResult<ModeElement<State<V>>> {
        let mut out = ModeElement::zero();
        for ((a, i), ca) in x.terms() {
            for ((b, j), cb) in y.terms() {
                let top = self.voa.degree(a) + self.voa.degree(b) - 1;
                let bvec = LinComb::basis(b.clone());
                for k in 0..=top {
                    let coeff = binomial(*i, k) * ca * cb;
                    if coeff.is_zero() {
                        continue;
                    }
                    let prod = mode(self.voa, a, k, &bvec)?;
                    for (s, c) in prod.iter() {
                        out.add_term(s.clone(), i + j - k, &coeff * c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Lie bracket in normal form.
    pub fn bracket(&self, x: &ModeElement<State<V>>, y: &ModeElement<State<V>>) -> KernelResult<ModeElement<State<V>>> {
        Ok(self.normalize(&self.bracket_raw(x, y)?))
    }

    /// `ϑ` on lifts, see [`theta_involution`].
    pub fn theta(&self, x: &ModeElement<State<V>>) -> KernelResult<ModeElement<State<V>>> {
        theta_involution(self.voa, x)
    }

    /// `ϑ` followed by the normal form.
    pub fn theta_normalized(&self, x: &ModeElement<State<V>>) -> KernelResult<ModeElement<State<V>>> {
        Ok(self.normalize(&self.theta(x)?))
    }

    /// The central element `𝟙_{[−1]}`.
    pub fn central_unit(&self) -> ModeElement<State<V>> {
        ModeElement::from_terms([(self.voa.vacuum(), -1, Rational::one())])
    }
}

/// `ϑ(A_{[j]}) = (−1)^{k−1} Σ_{i≥0} (1/i!) (L_1^i A)_{[2k−j−i−2]}` for `A ∈ V_k`, applied to a lift.
/// It is an involution already on lifts.
pub fn theta_involution<V: VertexAlgebra>(voa: &V, x: &ModeElement<State<V>>) -> KernelResult<ModeElement<State<V>>> {
    let mut out = ModeElement::zero();
    for ((a, j), c) in x.terms() {
        let k = voa.degree(a);
        let s = sign(k - 1) * c;
        for (l, term) in exp_l1_terms(voa, &LinComb::basis(a.clone()))?.into_iter().enumerate() {
            let idx = 2 * k - j - l as i64 - 2;
            for (b, cb) in term.iter() {
                out.add_term(b.clone(), idx, &s * cb);
            }
        }
    }
    Ok(out)
}

/// Normalized Lie bracket of two elements, see [`AncillaryLie::bracket`].
pub fn lie_bracket<V: VertexAlgebra>(
    voa: &V,
    x: &ModeElement<State<V>>,
    y: &ModeElement<State<V>>,
) -> KernelResult<ModeElement<State<V>>> {
    AncillaryLie::new(voa)?.bracket(x, y)
}
