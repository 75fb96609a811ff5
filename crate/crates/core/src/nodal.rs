//! Local data at a node: k-differential jets on the two branches, the gluing
//! condition for stable k-differentials, the chiral condition on `𝔏(V)`-valued
//! jets, and a Riemann-Roch constructor for rational k-differentials on ℙ¹.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{binomial, pow, sign, solve, ExactError, LaurentJet, LinComb, Rational};
use crate::kernel::{homogeneous_degree, theta_involution, AncillaryLie, KernelError, ModeElement, State, VertexAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NodalError {
    #[error("jet has order {order}, below −k = {bound}")]
    Order { order: i64, bound: i64 },
    #[error("coefficient at s^{exponent} lies in the unknown tail")]
    Tail { exponent: i64 },
    #[error("invalid points: {0}")]
    Points(String),
    #[error("no section satisfies the requested jets")]
    Infeasible,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type NodalResult<T> = Result<T, NodalError>;

/// `μ_{Q₊} ∈ ℚ((s₊))(ds₊)^k` and `μ_{Q₋} ∈ ℚ((s₋))(ds₋)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDifferentialJet {
    pub k: i64,
    pub plus: LaurentJet,
    pub minus: LaurentJet,
}

impl KDifferentialJet {
    pub fn new(k: i64, plus: LaurentJet, minus: LaurentJet) -> Self {
        KDifferentialJet { k, plus, minus }
    }

    /// Both branches exchanged.
    pub fn swapped(&self) -> Self {
        KDifferentialJet { k: self.k, plus: self.minus.clone(), minus: self.plus.clone() }
    }
}

/// Coefficient of `s^{−k}(ds)^k`; requires `ord ≥ −k`.
pub fn k_residue(jet: &LaurentJet, k: i64) -> NodalResult<Rational> {
    if jet.order() < -k {
        return Err(NodalError::Order { order: jet.order(), bound: -k });
    }
    jet.coeff(-k).ok_or(NodalError::Tail { exponent: -k })
}

/// `ord ≥ −k` on both branches and `Res^k₊ = (−1)^k Res^k₋`.
pub fn glue_check(jet: &KDifferentialJet) -> NodalResult<bool> {
    let k = jet.k;
    if jet.plus.order() < -k || jet.minus.order() < -k {
        return Ok(false);
    }
    Ok(k_residue(&jet.plus, k)? == sign(k) * k_residue(&jet.minus, k)?)
}

/// One summand `A ⊗ μ` of a section of `V_k ⊗ ω^{1−k}` near the node.
#[derive(Debug, Clone)]
pub struct ChiralComponent<S: Ord> {
    pub state: LinComb<S>,
    pub jet: KDifferentialJet,
}

/// Finitely many graded components of `σ`, each jet carrying `k`-field `1 − deg A`.
#[derive(Debug, Clone)]
pub struct ChiralJetElement<S: Ord> {
    pub components: Vec<ChiralComponent<S>>,
}

impl<S: Ord + Clone> ChiralJetElement<S> {
    pub fn new() -> Self {
        ChiralJetElement { components: Vec::new() }
    }

    pub fn with(mut self, state: LinComb<S>, jet: KDifferentialJet) -> Self {
        self.components.push(ChiralComponent { state, jet });
        self
    }
}

impl<S: Ord + Clone> Default for ChiralJetElement<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Pairs `A ⊗ Σ c_i s^i` with `Σ c_i A_{[i]}`.
pub fn jet_to_mode<S: Ord + Clone>(state: &LinComb<S>, jet: &LaurentJet) -> ModeElement<S> {
    let mut out = ModeElement::zero();
    for (i, c) in jet.terms() {
        for (a, ca) in state.iter() {
            out.add_term(a.clone(), i, c * ca);
        }
    }
    out
}

/// `σ_{Q±} ∈ 𝔏(V)_{≤0}` (order at least `k − 1` on each degree-`k` jet) and
/// `[σ_{Q₋}]₀ = ϑ([σ_{Q₊}]₀)` modulo `Im ∂`.
pub fn nodal_chiral_check<V: VertexAlgebra>(sigma: &ChiralJetElement<State<V>>, voa: &V) -> NodalResult<bool> {
    let mut plus0 = ModeElement::zero();
    let mut minus0 = ModeElement::zero();
    for comp in &sigma.components {
        let Some(k) = homogeneous_degree(voa, &comp.state)? else { continue };
        if comp.jet.k != 1 - k {
            return Ok(false);
        }
        for (side, acc) in [(&comp.jet.plus, &mut plus0), (&comp.jet.minus, &mut minus0)] {
            if side.order() < k - 1 || side.tail_order() < k {
                return Ok(false);
            }
            let c = side.coeff(k - 1).expect("below tail");
            acc.add_scaled(&ModeElement::from_vector(&comp.state, k - 1), &c);
        }
    }
    let lie = AncillaryLie::new(voa)?;
    Ok(lie.equivalent(&minus0, &theta_involution(voa, &plus0)?))
}

/// A point of ℙ¹ in the coordinate `z`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetPoint {
    Finite(Rational),
    Infinity,
}

/// Find `f(z)(dz)^k` regular off `q_points ∪ poles`, with jet `≡ s^d (ds)^k mod s^N` at
/// `q_points[target.0]` and `≡ 0 mod s^N` at the other `q_points`.
#[derive(Debug, Clone)]
pub struct JetProblem {
    pub q_points: Vec<JetPoint>,
    pub poles: Vec<JetPoint>,
    pub k: i64,
    pub target: (usize, i64),
    pub modulus: i64,
}

/// `f = Σ_e a_e z^e + Σ_{p} Σ_{m ≥ 1} c_{p,m} (z − p)^{−m}` times `(dz)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSection {
    pub k: i64,
    pub polynomial: Vec<Rational>,
    pub principal: Vec<(Rational, Vec<Rational>)>,
}

#[derive(Debug, Clone, Copy)]
enum Term<'a> {
    Power(i64),
    Pole(&'a Rational, i64),
}

/// Local coordinate: `s = z − p`, or `w = 1/z` at infinity.
fn expand_term(term: Term, k: i64, at: &JetPoint, tail: i64) -> LaurentJet {
    let mut jet = LaurentJet::new("s", tail);
    let mut push = |e: i64, c: Rational| {
        if e < tail && !c.is_zero() {
            jet.add_term(e, c).expect("below tail");
        }
    };
    match (at, term) {
        (JetPoint::Finite(p), Term::Power(e)) => {
            for n in 0..=e {
                push(n, binomial(e, n) * pow(p, e - n));
            }
        }
        (JetPoint::Finite(p), Term::Pole(q, m)) if p == q => push(-m, Rational::one()),
        (JetPoint::Finite(p), Term::Pole(q, m)) => {
            let delta = p - q;
            for n in 0..tail.max(0) {
                push(n, binomial(-m, n) * pow(&delta, -m - n));
            }
        }
        (JetPoint::Infinity, Term::Power(e)) => push(-e - 2 * k, sign(k)),
        (JetPoint::Infinity, Term::Pole(q, m)) => {
            for n in 0..(tail - m + 2 * k).max(0) {
                push(m + n - 2 * k, sign(k) * binomial(m + n - 1, n) * pow(q, n));
            }
        }
    }
    jet
}

impl RationalSection {
    fn terms(&self) -> impl Iterator<Item = (Term<'_>, &Rational)> {
        let poly = self.polynomial.iter().enumerate().map(|(e, c)| (Term::Power(e as i64), c));
        let poles = self
            .principal
            .iter()
            .flat_map(|(p, cs)| cs.iter().enumerate().map(move |(m, c)| (Term::Pole(p, m as i64 + 1), c)));
        poly.chain(poles)
    }

    /// Laurent jet of the section in the standard coordinate at `at`, modulo `s^tail`.
    pub fn expand_at(&self, at: &JetPoint, tail: i64) -> LaurentJet {
        let mut jet = LaurentJet::new("s", tail);
        for (term, c) in self.terms() {
            if !c.is_zero() {
                jet = jet.add(&expand_term(term, self.k, at, tail).scale(c));
            }
        }
        jet
    }

    /// `z^e (dz)^k`.
    pub fn monomial(k: i64, e: usize) -> Self {
        let mut polynomial = vec![Rational::zero(); e + 1];
        polynomial[e] = Rational::one();
        RationalSection { k, polynomial, principal: Vec::new() }
    }

    /// `(z − p)^{−m} (dz)^k`, `m ≥ 1`.
    pub fn pole(k: i64, p: Rational, m: usize) -> Self {
        let mut cs = vec![Rational::zero(); m];
        cs[m - 1] = Rational::one();
        RationalSection { k, polynomial: Vec::new(), principal: vec![(p, cs)] }
    }

    /// The poles of `f` in the affine chart.
    pub fn finite_poles(&self) -> Vec<Rational> {
        self.principal.iter().filter(|(_, cs)| cs.iter().any(|c| !c.is_zero())).map(|(p, _)| p.clone()).collect()
    }

    /// `f = numerator / denominator`, coefficients listed from the constant term up.
    pub fn to_fraction(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mul = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
            let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let add = |a: &mut Vec<Rational>, b: &[Rational]| {
            if a.len() < b.len() {
                a.resize(b.len(), Rational::zero());
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        };
        let factor = |p: &Rational, m: usize| -> Vec<Rational> {
            (0..m).fold(vec![Rational::one()], |acc, _| mul(&acc, &[-p.clone(), Rational::one()]))
        };
        let orders: Vec<usize> = self.principal.iter().map(|(_, cs)| cs.len()).collect();
        let denominator = self.principal.iter().zip(&orders).fold(vec![Rational::one()], |acc, ((p, _), &m)| {
            mul(&acc, &factor(p, m))
        });
        let mut numerator = if self.polynomial.is_empty() { vec![Rational::zero()] } else { mul(&self.polynomial, &denominator) };
        for (idx, (p, cs)) in self.principal.iter().enumerate() {
            let others = self
                .principal
                .iter()
                .zip(&orders)
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .fold(vec![Rational::one()], |acc, (_, ((q, _), &m))| mul(&acc, &factor(q, m)));
            let top = orders[idx];
            for (m, c) in cs.iter().enumerate() {
                let m = m + 1;
                let piece = mul(&others, &factor(p, top - m));
                add(&mut numerator, &piece.iter().map(|x| x * c).collect::<Vec<_>>());
            }
        }
        while numerator.len() > 1 && numerator.last().is_some_and(Zero::is_zero) {
            numerator.pop();
        }
        (numerator, denominator)
    }
}

fn point_tail_min(jets: &[LaurentJet], extra: i64) -> i64 {
    jets.iter().map(LaurentJet::order).chain([extra]).min().unwrap_or(extra)
}

/// Exact linear solve in a pole-bounded partial-fraction ansatz.
pub fn prescribe_jets_p1(problem: &JetProblem) -> NodalResult<RationalSection> {
    let JetProblem { q_points, poles, k, target, modulus } = problem;
    let (k, n) = (*k, *modulus);
    let all: Vec<&JetPoint> = q_points.iter().chain(poles).collect();
    if all.iter().collect::<BTreeSet<_>>().len() != all.len() {
        return Err(NodalError::Points("points must be distinct".into()));
    }
    if target.0 >= q_points.len() {
        return Err(NodalError::Points("target index out of range".into()));
    }
    if n < 1 {
        return Err(NodalError::Points("modulus must be positive".into()));
    }
    let d = target.1;
    let target_pole = (-d).max(0);
    let has_inf_pole = poles.contains(&JetPoint::Infinity);
    let conditions = q_points.len() as i64 * n + target_pole + 2 * k.abs() + 2;
    let bound = if poles.is_empty() { 0 } else { conditions / poles.len() as i64 + 1 };

    // Ansatz columns.
    let mut centers: Vec<(Rational, i64)> = Vec::new();
    for (idx, p) in q_points.iter().enumerate() {
        if let JetPoint::Finite(x) = p {
            if idx == target.0 && target_pole > 0 {
                centers.push((x.clone(), target_pole));
            }
        }
    }
    for p in poles {
        if let JetPoint::Finite(x) = p {
            centers.push((x.clone(), bound));
        }
    }
    let mut degree = -2 * k;
    if has_inf_pole {
        degree += bound;
    }
    if q_points[target.0] == JetPoint::Infinity {
        degree = degree.max(target_pole - 2 * k);
    }
    let mut columns: Vec<Term> = (0..=degree).map(Term::Power).collect();
    for (p, m) in &centers {
        columns.extend((1..=*m).map(|m| Term::Pole(p, m)));
    }

    // Rows: prescribed coefficients at the Q-points, and regularity at an unmarked ∞.
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut constrain = |at: &JetPoint, tail: i64, goal: Option<i64>| {
        let jets: Vec<LaurentJet> = columns.iter().map(|t| expand_term(*t, k, at, tail)).collect();
        let lo = point_tail_min(&jets, goal.unwrap_or(tail).min(tail));
        for e in lo..tail {
            rows.push(jets.iter().map(|j| j.coeff(e).expect("below tail")).collect());
            rhs.push(if goal == Some(e) { Rational::one() } else { Rational::zero() });
        }
    };
    for (idx, p) in q_points.iter().enumerate() {
        constrain(p, n, (idx == target.0).then_some(d));
    }
    if !has_inf_pole && !q_points.contains(&JetPoint::Infinity) {
        constrain(&JetPoint::Infinity, 0, None);
    }
    if rows.is_empty() || columns.is_empty() {
        return Err(NodalError::Infeasible);
    }
    let x = solve(&rows, &rhs)?.ok_or(NodalError::Infeasible)?;
    let split = (degree + 1).max(0) as usize;
    let mut principal: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let mut at = split;
    for (p, m) in &centers {
        principal.push((p.clone(), x[at..at + *m as usize].to_vec()));
        at += *m as usize;
    }
    let mut polynomial = x[..split].to_vec();
    while polynomial.last().is_some_and(Zero::is_zero) {
        polynomial.pop();
    }
    for (_, cs) in principal.iter_mut() {
        while cs.last().is_some_and(Zero::is_zero) {
            cs.pop();
        }
    }
    principal.retain(|(_, cs)| !cs.is_empty());
    Ok(RationalSection { k, polynomial, principal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::fock::{FockBasisVector, FockVoa};

    fn jet(terms: &[(i64, i64)], tail: i64) -> LaurentJet {
        LaurentJet::from_terms("s", terms.iter().map(|&(e, c)| (e, int(c))), tail).unwrap()
    }

    #[test]
    fn residues() {
        assert_eq!(k_residue(&jet(&[(-1, 1)], 3), 1).unwrap(), int(1));
        assert_eq!(k_residue(&jet(&[(-2, 1), (-1, 3)], 3), 2).unwrap(), int(1));
        assert_eq!(k_residue(&jet(&[(0, 5), (1, 1)], 3), 0).unwrap(), int(5));
        assert!(matches!(k_residue(&jet(&[(-3, 1)], 3), 2), Err(NodalError::Order { .. })));
    }

    #[test]
    fn gluing_examples() {
        let g = |k, a: &[(i64, i64)], b: &[(i64, i64)]| glue_check(&KDifferentialJet::new(k, jet(a, 4), jet(b, 4))).unwrap();
        assert!(g(0, &[(0, 2), (1, 1)], &[(0, 2), (1, -1)]));
        assert!(!g(0, &[(0, 2)], &[(0, 3)]));
        assert!(g(1, &[(-1, 1)], &[(-1, -1)]));
        assert!(g(2, &[(-2, 1)], &[(-2, 1)]));
        assert!(!g(2, &[(-2, 1)], &[(-2, -1)]));
        assert!(!g(1, &[(-2, 1)], &[(-1, -1)]));
    }

    #[test]
    fn chiral_examples() {
        let voa = FockVoa::heisenberg(4);
        let h = LinComb::basis(FockBasisVector::new(int(0), vec![1]));
        let c = rat(3, 2);
        let side = LaurentJet::from_terms("s", [(0, c.clone()), (2, int(1))], 4).unwrap();
        let good = ChiralJetElement::new().with(h.clone(), KDifferentialJet::new(0, side.clone(), side.clone()));
        assert!(nodal_chiral_check(&good, &voa).unwrap());
        let pole = LaurentJet::from_terms("s", [(-1, int(1)), (0, c)], 4).unwrap();
        let bad = ChiralJetElement::new().with(h, KDifferentialJet::new(0, pole, side));
        assert!(!nodal_chiral_check(&bad, &voa).unwrap());
        let w = voa.omega();
        let one = jet(&[(1, 1)], 4);
        let flipped = ChiralJetElement::new().with(w.clone(), KDifferentialJet::new(-1, one.clone(), one.clone()));
        assert!(!nodal_chiral_check(&flipped, &voa).unwrap());
        let matched = ChiralJetElement::new().with(w, KDifferentialJet::new(-1, one.clone(), one.scale(&int(-1))));
        assert!(nodal_chiral_check(&matched, &voa).unwrap());
    }

    #[test]
    fn residue_differential() {
        let problem = JetProblem {
            q_points: vec![JetPoint::Finite(int(0))],
            poles: vec![JetPoint::Finite(int(1))],
            k: 1,
            target: (0, -1),
            modulus: 1,
        };
        let sec = prescribe_jets_p1(&problem).unwrap();
        let at0 = sec.expand_at(&JetPoint::Finite(int(0)), 1);
        assert_eq!(at0, jet(&[(-1, 1)], 1));
        let at1 = sec.expand_at(&JetPoint::Finite(int(1)), 0);
        let inf = sec.expand_at(&JetPoint::Infinity, 0);
        assert_eq!(at0.coeff(-1).unwrap() + at1.coeff(-1).unwrap() + inf.coeff(-1).unwrap(), int(0));
    }
}
