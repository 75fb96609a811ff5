//! Rank-one Heisenberg and lattice vertex algebras on Fock spaces.
//!
//! A single free boson `h` with `(h, h) = κ` acts on `π_p`, the Fock space whose
//! lowest vector `v_p` has `h_0 v_p = p v_p`. The Heisenberg algebra uses
//! `κ = 1` and charge `0`. The lattice `L = Zα` with `(α, α) = 2k` takes `h = α`,
//! so `κ = 2k`, `V_L = ⊕_{p ∈ 2kZ} π_p`, and the coset `λ + L` with
//! `(α, λ) ≡ r (mod 2k)` is the module `⊕_{p ≡ r} π_p`. Charges are integers for
//! every lattice module, which keeps all structure constants rational.
//!
//! Vertex operators of `e^μ` are the usual exponentials
//! `Y(e^μ, z) = exp(Σ μ_{-n} z^n / n) exp(−Σ μ_n z^{-n} / n) e_μ z^{μ_0}`
//! with trivial cocycle; composite states use the iterate formula.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use parking_lot::Mutex;
use thiserror::Error;

use crate::exact::{binomial, int, sign, to_integer, LinComb, QSeries, Rational};
use crate::kernel::{act, KernelError, KernelResult, VertexAlgebra, VertexModule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("only rank-one lattices are supported, got rank {0}")]
    Rank(usize),
    #[error("lattice is not even and positive definite")]
    NotEven,
    #[error("charge {0} is not in the lattice module")]
    Charge(String),
}

/// `h_{-n_1} ⋯ h_{-n_r} v_p` with `n_1 ≥ ⋯ ≥ n_r ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisVector {
    pub charge: Rational,
    pub partition: Vec<u32>,
}

impl FockBasisVector {
    pub fn lowest(charge: Rational) -> Self {
        FockBasisVector { charge, partition: Vec::new() }
    }

    pub fn new(charge: Rational, mut partition: Vec<u32>) -> Self {
        partition.sort_unstable_by(|a, b| b.cmp(a));
        FockBasisVector { charge, partition }
    }

    /// Total excitation `Σ n_i`.
    pub fn level(&self) -> i64 {
        self.partition.iter().map(|&n| n as i64).sum()
    }

    fn multiplicity(&self, n: u32) -> usize {
        self.partition.iter().filter(|&&m| m == n).count()
    }

    fn with_part(&self, n: u32) -> Self {
        let mut partition = self.partition.clone();
        let pos = partition.iter().position(|&m| m < n).unwrap_or(partition.len());
        partition.insert(pos, n);
        FockBasisVector { charge: self.charge.clone(), partition }
    }

    fn without_part(&self, n: u32) -> Option<Self> {
        let pos = self.partition.iter().position(|&m| m == n)?;
        let mut partition = self.partition.clone();
        partition.remove(pos);
        Some(FockBasisVector { charge: self.charge.clone(), partition })
    }

    fn with_charge(&self, charge: Rational) -> Self {
        FockBasisVector { charge, partition: self.partition.clone() }
    }
}

impl fmt::Debug for FockBasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.partition {
            write!(f, "h(-{n})")?;
        }
        write!(f, "v[{}]", self.charge)
    }
}

/// Positive-definite even lattice, given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenLattice {
    gram: Vec<Vec<Rational>>,
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<Rational>>) -> Result<Self, FockError> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(FockError::NotEven);
        }
        for (i, row) in gram.iter().enumerate() {
            let d = &row[i];
            if !d.is_integer() || d.numer().is_odd() || !d.is_positive() {
                return Err(FockError::NotEven);
            }
            if row.iter().zip(&gram).any(|(x, other)| !x.is_integer() || *x != other[i]) {
                return Err(FockError::NotEven);
            }
        }
        if n == 2 && &gram[0][0] * &gram[1][1] <= &gram[0][1] * &gram[0][1] {
            return Err(FockError::NotEven);
        }
        Ok(EvenLattice { gram })
    }

    /// `√(2k) Z`.
    pub fn rank_one(k: i64) -> Self {
        assert!(k >= 1, "lattice norm must be positive");
        EvenLattice { gram: vec![vec![int(2 * k)]] }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    /// `|L′/L|`, the determinant of the Gram matrix.
    pub fn discriminant(&self) -> Rational {
        match self.rank() {
            1 => self.gram[0][0].clone(),
            2 => &self.gram[0][0] * &self.gram[1][1] - &self.gram[0][1] * &self.gram[1][0],
            _ => unimplemented!("discriminant for rank above two"),
        }
    }
}

/// The set of `h_0`-charges making up a module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChargeClass {
    Single(Rational),
    Coset { residue: i64, modulus: i64 },
}

impl ChargeClass {
    pub fn contains(&self, p: &Rational) -> bool {
        match self {
            ChargeClass::Single(q) => p == q,
            ChargeClass::Coset { residue, modulus } => {
                to_integer(p).is_some_and(|p| (p - residue).rem_euclid(*modulus) == 0)
            }
        }
    }

    /// Charges with `p^2 / 2κ ≤ weight`, in increasing order.
    fn charges_up_to(&self, kappa: i64, weight: &Rational) -> Vec<Rational> {
        let fits = |p: &Rational| p * p / int(2 * kappa) <= *weight;
        match self {
            ChargeClass::Single(q) => {
                if fits(q) {
                    vec![q.clone()]
                } else {
                    Vec::new()
                }
            }
            ChargeClass::Coset { residue, modulus } => {
                let mut out = Vec::new();
                let mut bound = 0i64;
                while fits(&int(bound)) {
                    bound += 1;
                }
                for p in -bound..=bound {
                    if (p - residue).rem_euclid(*modulus) == 0 && fits(&int(p)) {
                        out.push(int(p));
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockKind {
    Heisenberg,
    Lattice { k: i64 },
}

type ModeKey = (FockBasisVector, i64, FockBasisVector);

/// The Heisenberg vertex algebra or `V_L` for `L = √(2k) Z`, truncated at `max_degree`.
pub struct FockVoa {
    kind: FockKind,
    kappa: i64,
    max_degree: i64,
    cache: Mutex<HashMap<ModeKey, LinComb<FockBasisVector>>>,
}

impl fmt::Debug for FockVoa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockVoa").field("kind", &self.kind).field("max_degree", &self.max_degree).finish()
    }
}

/// Weakly decreasing partitions of `n`, in lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.reverse();
    out
}

impl FockVoa {
    pub fn heisenberg(max_degree: i64) -> Self {
        Self::build(FockKind::Heisenberg, 1, max_degree)
    }

    pub fn lattice(k: i64, max_degree: i64) -> Self {
        assert!(k >= 1, "lattice norm must be positive");
        Self::build(FockKind::Lattice { k }, 2 * k, max_degree)
    }

    pub fn from_lattice(lattice: &EvenLattice, max_degree: i64) -> Result<Self, FockError> {
        if lattice.rank() != 1 {
            return Err(FockError::Rank(lattice.rank()));
        }
        let norm = to_integer(&lattice.gram[0][0]).ok_or(FockError::NotEven)?;
        Ok(Self::lattice(norm / 2, max_degree))
    }

    fn build(kind: FockKind, kappa: i64, max_degree: i64) -> Self {
        FockVoa { kind, kappa, max_degree, cache: Mutex::new(HashMap::new()) }
    }

    pub fn kind(&self) -> FockKind {
        self.kind
    }

    /// `(h, h)`.
    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    /// Charges carried by the algebra itself.
    pub fn charge_class(&self) -> ChargeClass {
        match self.kind {
            FockKind::Heisenberg => ChargeClass::Single(Rational::zero()),
            FockKind::Lattice { .. } => ChargeClass::Coset { residue: 0, modulus: self.kappa },
        }
    }

    /// Number of simple modules `|L′/L|` (lattice) or `None` for the Heisenberg algebra.
    pub fn module_count(&self) -> Option<i64> {
        match self.kind {
            FockKind::Heisenberg => None,
            FockKind::Lattice { .. } => Some(self.kappa),
        }
    }

    /// `p^2 / 2κ + level`, the expected `L_0` eigenvalue; used only for bookkeeping,
    /// the tests compare it with the implemented `L_0`.
    pub fn weight(&self, v: &FockBasisVector) -> Rational {
        self.floor(&v.charge) + int(v.level())
    }

    fn floor(&self, p: &Rational) -> Rational {
        p * p / int(2 * self.kappa)
    }

    /// Basis of the given weight inside a charge class.
    pub fn sector_basis(&self, class: &ChargeClass, weight: &Rational) -> Vec<FockBasisVector> {
        let mut out = Vec::new();
        for p in class.charges_up_to(self.kappa, weight) {
            let rest = weight - self.floor(&p);
            let Some(level) = to_integer(&rest) else { continue };
            for part in partitions(level as u32) {
                out.push(FockBasisVector { charge: p.clone(), partition: part });
            }
        }
        out
    }

    /// `h_n v`, exactly.
    pub fn heisenberg_mode_exact(&self, n: i64, v: &FockBasisVector) -> LinComb<FockBasisVector> {
        match n.cmp(&0) {
            std::cmp::Ordering::Equal => LinComb::term(v.clone(), v.charge.clone()),
            std::cmp::Ordering::Less => LinComb::basis(v.with_part((-n) as u32)),
            std::cmp::Ordering::Greater => {
                let m = v.multiplicity(n as u32) as i64;
                match v.without_part(n as u32) {
                    Some(w) => LinComb::term(w, int(n * self.kappa * m)),
                    None => LinComb::zero(),
                }
            }
        }
    }

    fn h_vec(&self, n: i64, v: &LinComb<FockBasisVector>) -> LinComb<FockBasisVector> {
        v.map_linear(|b| self.heisenberg_mode_exact(n, b))
    }

    /// `(e^μ)_{(i)} v` for the state `e^μ = v_{p_μ}`.
    fn exponential_mode(&self, p_mu: &Rational, i: i64, v: &FockBasisVector) -> LinComb<FockBasisVector> {
        let s = to_integer(&(p_mu * &v.charge / int(self.kappa))).expect("integral pairing");
        let scale = p_mu / int(self.kappa);
        let start = LinComb::basis(v.with_charge(&v.charge + p_mu));
        let top = v.level();
        let mut annihilated = vec![start];
        for m in 1..=top {
            let mut acc = LinComb::zero();
            for n in 1..=m {
                acc.add_scaled(&self.h_vec(n, &annihilated[(m - n) as usize]), &scale);
            }
            annihilated.push(acc.scale(&-int(m).recip()));
        }
        let mut out = LinComb::zero();
        for (m, a_m) in annihilated.iter().enumerate() {
            let n_total = m as i64 - i - 1 - s;
            if n_total < 0 || a_m.is_zero() {
                continue;
            }
            let mut created = vec![a_m.clone()];
            for n in 1..=n_total {
                let mut acc = LinComb::zero();
                for j in 1..=n {
                    acc.add_scaled(&self.h_vec(-j, &created[(n - j) as usize]), &scale);
                }
                created.push(acc.scale(&int(n).recip()));
            }
            out += &created[n_total as usize];
        }
        out
    }

    /// `a_{(i)} v` on basis vectors of any charge, without truncation.
    pub fn vertex_mode(&self, a: &FockBasisVector, i: i64, v: &FockBasisVector) -> LinComb<FockBasisVector> {
        let target = self.weight(a) - int(i + 1) + self.weight(v);
        if target < self.floor(&(&a.charge + &v.charge)) {
            return LinComb::zero();
        }
        let key = (a.clone(), i, v.clone());
        if let Some(hit) = self.cache.lock().get(&key) {
            return hit.clone();
        }
        let result = self.vertex_mode_uncached(a, i, v);
        self.cache.lock().insert(key, result.clone());
        result
    }

    fn vertex_mode_vec(&self, a: &FockBasisVector, i: i64, v: &LinComb<FockBasisVector>) -> LinComb<FockBasisVector> {
        v.map_linear(|b| self.vertex_mode(a, i, b))
    }

    fn vertex_mode_uncached(&self, a: &FockBasisVector, i: i64, v: &FockBasisVector) -> LinComb<FockBasisVector> {
        let Some(&n) = a.partition.first() else {
            return self.exponential_mode(&a.charge, i, v);
        };
        let n = n as i64;
        let b = FockBasisVector { charge: a.charge.clone(), partition: a.partition[1..].to_vec() };
        let mut out = LinComb::zero();
        // (h_{(-n)} b)_{(i)} = Σ_j C(n+j-1, j) [h_{-n-j} b_{(i+j)} − (−1)^n b_{(i-n-j)} h_j]
        let floor = self.floor(&(&b.charge + &v.charge));
        let mut j = 0;
        loop {
            if self.weight(&b) - int(i + j + 1) + self.weight(v) < floor {
                break;
            }
            let inner = self.vertex_mode(&b, i + j, v);
            out.add_scaled(&self.h_vec(-n - j, &inner), &binomial(n + j - 1, j));
            j += 1;
        }
        let minus = -sign(n);
        for j in 0..=v.level() {
            let hv = self.heisenberg_mode_exact(j, v);
            if hv.is_zero() {
                continue;
            }
            let inner = self.vertex_mode_vec(&b, i - n - j, &hv);
            out.add_scaled(&inner, &(binomial(n + j - 1, j) * &minus));
        }
        out
    }
}

impl VertexAlgebra for FockVoa {
    type State = FockBasisVector;

    fn central_charge(&self) -> Rational {
        Rational::one()
    }
    fn max_degree(&self) -> i64 {
        self.max_degree
    }
    fn degree(&self, a: &FockBasisVector) -> i64 {
        to_integer(&self.weight(a)).expect("integral weight in the algebra")
    }
    fn basis(&self, degree: i64) -> Vec<FockBasisVector> {
        if degree < 0 {
            return Vec::new();
        }
        self.sector_basis(&self.charge_class(), &int(degree))
    }
    fn vacuum(&self) -> FockBasisVector {
        FockBasisVector::lowest(Rational::zero())
    }
    fn omega(&self) -> LinComb<FockBasisVector> {
        LinComb::term(FockBasisVector::new(Rational::zero(), vec![1, 1]), int(2 * self.kappa).recip())
    }
    fn mode_exact(&self, a: &FockBasisVector, i: i64, b: &FockBasisVector) -> LinComb<FockBasisVector> {
        self.vertex_mode(a, i, b)
    }
}

/// A Fock module `⊕_{p ∈ class} π_p`, graded by `L_0 − c_W` and truncated.
pub struct FockModule<'a> {
    voa: &'a FockVoa,
    class: ChargeClass,
    max_degree: i64,
    conformal_weight: Rational,
}

impl<'a> FockModule<'a> {
    pub fn new(voa: &'a FockVoa, class: ChargeClass, max_degree: i64) -> Result<Self, FockError> {
        if let (FockKind::Lattice { .. }, ChargeClass::Single(p)) = (voa.kind, &class) {
            return Err(FockError::Charge(p.to_string()));
        }
        if let (FockKind::Heisenberg, ChargeClass::Coset { .. }) = (voa.kind, &class) {
            return Err(FockError::Charge("coset".into()));
        }
        let mut bound = Rational::zero();
        let lowest = loop {
            if let Some(p) = class.charges_up_to(voa.kappa, &bound).into_iter().next() {
                break FockBasisVector::lowest(p);
            }
            bound += Rational::one();
        };
        let l0 = voa.vertex_mode_vec(&FockBasisVector::new(Rational::zero(), vec![1, 1]), 1, &LinComb::basis(lowest.clone()));
        let conformal_weight = l0.coeff(&lowest) / int(2 * voa.kappa);
        Ok(FockModule { voa, class, max_degree, conformal_weight })
    }

    /// `V_{L+λ}` with `(α, λ) ≡ residue (mod 2k)`.
    pub fn lattice(voa: &'a FockVoa, residue: i64, max_degree: i64) -> Result<Self, FockError> {
        let FockKind::Lattice { .. } = voa.kind else {
            return Err(FockError::Charge(residue.to_string()));
        };
        Self::new(voa, ChargeClass::Coset { residue: residue.rem_euclid(voa.kappa), modulus: voa.kappa }, max_degree)
    }

    /// The Heisenberg Fock module `π_λ`.
    pub fn heisenberg(voa: &'a FockVoa, charge: Rational, max_degree: i64) -> Result<Self, FockError> {
        Self::new(voa, ChargeClass::Single(charge), max_degree)
    }

    pub fn class(&self) -> &ChargeClass {
        &self.class
    }

    /// `h_n v` with the window enforced.
    pub fn heisenberg_mode(&self, n: i64, v: &FockBasisVector) -> KernelResult<LinComb<FockBasisVector>> {
        let target = self.degree(v) - n;
        if target > self.max_degree {
            return Err(KernelError::Overflow { degree: int(target), window: self.max_degree });
        }
        Ok(self.voa.heisenberg_mode_exact(n, v))
    }

    /// `(e^{mα})_{(i)} v`, with `m` the coordinate of `μ = mα`.
    pub fn lattice_vertex_mode(&self, m: i64, i: i64, v: &LinComb<FockBasisVector>) -> KernelResult<LinComb<FockBasisVector>> {
        let mu = FockBasisVector::lowest(int(m * self.voa.kappa));
        act(self, &mu, i, v)
    }
}

impl VertexModule for FockModule<'_> {
    type Algebra = FockVoa;
    type Basis = FockBasisVector;

    fn algebra(&self) -> &FockVoa {
        self.voa
    }
    fn conformal_weight(&self) -> Rational {
        self.conformal_weight.clone()
    }
    fn max_degree(&self) -> i64 {
        self.max_degree
    }
    fn degree(&self, m: &FockBasisVector) -> i64 {
        to_integer(&(self.voa.weight(m) - &self.conformal_weight)).expect("integral relative degree")
    }
    fn basis(&self, degree: i64) -> Vec<FockBasisVector> {
        if degree < 0 {
            return Vec::new();
        }
        self.voa.sector_basis(&self.class, &(&self.conformal_weight + int(degree)))
    }
    fn act_exact(&self, a: &FockBasisVector, i: i64, m: &FockBasisVector) -> LinComb<FockBasisVector> {
        self.voa.vertex_mode(a, i, m)
    }
}

/// Character of `V_{L+λ}` up to `q^cutoff`, counted from the basis (shifted by `c_W`).
pub fn graded_dimension(voa: &FockVoa, residue: i64, cutoff: usize) -> Result<QSeries, FockError> {
    let module = match voa.kind {
        FockKind::Lattice { .. } => FockModule::lattice(voa, residue, cutoff as i64)?,
        FockKind::Heisenberg => FockModule::heisenberg(voa, int(residue), cutoff as i64)?,
    };
    Ok(QSeries::from_coeffs(cutoff, (0..=cutoff).map(|d| int(module.basis(d as i64).len() as i64))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{mode, mode_vec, module_l0, virasoro};

    #[test]
    fn partitions_are_counted() {
        let counts: Vec<usize> = (0..8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
        assert_eq!(partitions(3), vec![vec![1, 1, 1], vec![2, 1], vec![3]]);
    }

    #[test]
    fn heisenberg_mode_examples() {
        let voa = FockVoa::heisenberg(4);
        let v0 = voa.vacuum();
        let up = voa.heisenberg_mode_exact(-1, &v0);
        let back = voa.h_vec(1, &up);
        assert_eq!(back, LinComb::basis(v0.clone()));
        assert!(voa.heisenberg_mode_exact(2, &v0).is_zero());
        let v = FockBasisVector::lowest(int(3));
        assert_eq!(voa.heisenberg_mode_exact(0, &v), LinComb::term(v, int(3)));
    }

    #[test]
    fn vacuum_axioms_and_l0() {
        for voa in [FockVoa::heisenberg(4), FockVoa::lattice(1, 4), FockVoa::lattice(2, 4)] {
            let vac = LinComb::basis(voa.vacuum());
            for d in 0..=4 {
                for a in voa.basis(d) {
                    assert_eq!(mode(&voa, &a, -1, &vac).unwrap(), LinComb::basis(a.clone()));
                    for i in 0..3 {
                        assert!(mode(&voa, &a, i, &vac).unwrap().is_zero());
                    }
                    let l0 = virasoro(&voa, 0, &LinComb::basis(a.clone())).unwrap();
                    assert_eq!(l0, LinComb::term(a.clone(), int(d)));
                }
            }
            let omega = voa.omega();
            let top = mode_vec(&voa, &omega, 3, &omega).unwrap();
            assert_eq!(top, LinComb::term(voa.vacuum(), Rational::new(1.into(), 2.into())));
        }
    }

    #[test]
    fn lattice_counts_and_weights() {
        let voa = FockVoa::lattice(1, 3);
        assert_eq!(graded_dimension(&voa, 0, 1).unwrap(), QSeries::from_ints(1, &[1, 3]));
        let m = FockModule::lattice(&voa, 1, 2).unwrap();
        assert_eq!(m.conformal_weight(), Rational::new(1.into(), 4.into()));
        assert_eq!(m.basis(0).len(), 2);
        for d in 0..=2 {
            for b in m.basis(d) {
                let l0 = module_l0(&m, &LinComb::basis(b.clone())).unwrap();
                assert_eq!(l0, LinComb::term(b.clone(), voa.weight(&b)));
            }
        }
    }

    #[test]
    fn leading_lattice_mode() {
        let voa = FockVoa::lattice(1, 4);
        let m = FockModule::lattice(&voa, 1, 3).unwrap();
        let v = FockBasisVector::lowest(int(1));
        // (μ, λ) = 1 for μ = α, λ = α/2.
        let out = m.lattice_vertex_mode(1, -2, &LinComb::basis(v)).unwrap();
        assert_eq!(out, LinComb::basis(FockBasisVector::lowest(int(3))));
        let above = m.lattice_vertex_mode(1, -1, &LinComb::basis(FockBasisVector::lowest(int(1)))).unwrap();
        assert!(above.is_zero());
    }
}
