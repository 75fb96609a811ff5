//! Coinvariants on ℙ¹ through Zhu's Lie algebra: elements `φ(B ⊗ μ)` built from
//! a quasi-primary `B ∈ V_k` and a rational section `μ` of `ω^{1−k}`, and a
//! windowed estimate of `dim M^•/𝔤·M^•` for Fock and lattice modules.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::FusionRing;
use crate::exact::{int, nullspace, LinComb, Rational, SparseEchelon};
use crate::fock::{ChargeClass, FockBasisVector, FockError, FockKind, FockModule, FockVoa};
use crate::kernel::{act, homogeneous_degree, virasoro, KernelError, ModeElement, VertexAlgebra, VertexModule};
use crate::nodal::{JetPoint, RationalSection};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("need at least {needed} distinct points, got {got}")]
    Points { needed: usize, got: usize },
    #[error("section has a pole away from the marked points")]
    StrayPole,
    #[error("state is not homogeneous")]
    NotHomogeneous,
    #[error("section is a {found}-differential, expected {expected}")]
    Weight { expected: i64, found: i64 },
    #[error("{0} labels but {1} points")]
    Arity(usize, usize),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type OracleResult<T> = Result<T, OracleError>;

/// `φ(B ⊗ μ) = (Res_{t_i} Y(B, t_i) μ_{P_i})_i`, one mode element per marked point.
#[derive(Debug, Clone)]
pub struct ZhuLieElement {
    pub state: LinComb<FockBasisVector>,
    pub section: RationalSection,
    pub per_point: Vec<ModeElement<FockBasisVector>>,
}

fn check_points(points: &[JetPoint], needed: usize) -> OracleResult<()> {
    let distinct: std::collections::BTreeSet<_> = points.iter().collect();
    if distinct.len() != points.len() || points.len() < needed {
        return Err(OracleError::Points { needed, got: distinct.len() });
    }
    Ok(())
}

/// Expands `μ` at every marked point modulo `s^tail` and pairs `s^i` with `B_{[i]}`.
pub fn zhu_element(
    voa: &FockVoa,
    b: &LinComb<FockBasisVector>,
    mu: &RationalSection,
    points: &[JetPoint],
    tail: i64,
) -> OracleResult<ZhuLieElement> {
    check_points(points, 1)?;
    let k = homogeneous_degree(voa, b)?.ok_or(OracleError::NotHomogeneous)?;
    if mu.k != 1 - k {
        return Err(OracleError::Weight { expected: 1 - k, found: mu.k });
    }
    for p in mu.finite_poles() {
        if !points.contains(&JetPoint::Finite(p)) {
            return Err(OracleError::StrayPole);
        }
    }
    if !points.contains(&JetPoint::Infinity) && mu.expand_at(&JetPoint::Infinity, 0).order() < 0 {
        return Err(OracleError::StrayPole);
    }
    let per_point = points
        .iter()
        .map(|p| {
            let jet = mu.expand_at(p, tail);
            let mut x = ModeElement::zero();
            for (i, c) in jet.terms() {
                for (s, cs) in b.iter() {
                    x.add_term(s.clone(), i, c * cs);
                }
            }
            x
        })
        .collect();
    Ok(ZhuLieElement { state: b.clone(), section: mu.clone(), per_point })
}

/// A basis of `ker(L_1) ∩ V_k`.
pub fn quasi_primaries(voa: &FockVoa, k: i64) -> OracleResult<Vec<LinComb<FockBasisVector>>> {
    let basis = voa.basis(k);
    let lower = voa.basis(k - 1);
    let images = basis
        .iter()
        .map(|s| virasoro(voa, 1, &LinComb::basis(s.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let matrix: Vec<Vec<Rational>> = (0..lower.len())
        .map(|r| images.iter().map(|img| img.coeff(&lower[r])).collect())
        .collect();
    let kernel = if lower.is_empty() {
        (0..basis.len()).map(|i| (0..basis.len()).map(|j| int((i == j) as i64)).collect()).collect()
    } else {
        nullspace(&matrix, basis.len()).expect("rectangular")
    };
    // L_1 preserves charge, so the charge components of a quasi-primary are quasi-primary.
    let mut out = Vec::new();
    for v in kernel {
        let mut parts: BTreeMap<Rational, LinComb<FockBasisVector>> = BTreeMap::new();
        for (s, c) in basis.iter().zip(v) {
            if !c.is_zero() {
                parts.entry(s.charge.clone()).or_default().add_term(s.clone(), c);
            }
        }
        out.extend(parts.into_values());
    }
    let mut ech = SparseEchelon::new();
    out.retain(|v| ech.insert(v.clone()));
    Ok(out)
}

/// Rational sections of `ω^{1−k}` with poles of order at most `bound` at the marked points.
pub fn section_basis(k: i64, points: &[JetPoint], bound: usize) -> Vec<RationalSection> {
    let j = 1 - k;
    let mut out = Vec::new();
    let mut top = -2 * j;
    if points.contains(&JetPoint::Infinity) {
        top += bound as i64;
    }
    for e in 0..=top {
        out.push(RationalSection::monomial(j, e as usize));
    }
    for p in points {
        if let JetPoint::Finite(x) = p {
            for m in 1..=bound {
                let s = RationalSection::pole(j, x.clone(), m);
                // For ω^j with j ≥ 1 a low-order pole can force one at ∞.
                if points.contains(&JetPoint::Infinity) || s.expand_at(&JetPoint::Infinity, 0).order() >= 0 {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Knobs for the estimator.
#[derive(Debug, Clone, Default)]
pub struct OracleOptions {
    /// Largest degree of `B`; defaults to the weight of the shortest charged vector, at least 1.
    pub max_state_degree: Option<i64>,
    /// Largest pole order of `μ`; defaults to `D + max_state_degree`.
    pub pole_bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinvariantEstimate {
    pub cutoff: usize,
    pub ambient: usize,
    pub rank: usize,
    pub estimate: usize,
    pub stabilized: bool,
    /// Estimates at cutoffs `0..=cutoff`.
    pub history: Vec<usize>,
}

type Tensor = Vec<FockBasisVector>;

fn total_charge(t: &Tensor) -> Rational {
    t.iter().map(|b| &b.charge).sum()
}

fn ambient_basis(modules: &[FockModule<'_>], cutoff: i64) -> Vec<(Tensor, Vec<i64>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for m in modules {
        let mut next = Vec::new();
        for (t, degs) in &out {
            let used: i64 = degs.iter().sum();
            for d in 0..=cutoff - used {
                for b in m.basis(d) {
                    let mut t2 = t.clone();
                    t2.push(b);
                    let mut d2 = degs.clone();
                    d2.push(d);
                    next.push((t2, d2));
                }
            }
        }
        out = next;
    }
    out
}

/// `X · u` for a Zhu element `X`, or `None` when some component leaves the window.
fn apply(
    modules: &[FockModule<'_>],
    x: &ZhuLieElement,
    u: &Tensor,
    degs: &[i64],
    cutoff: i64,
) -> Result<Option<LinComb<Tensor>>, KernelError> {
    let total: i64 = degs.iter().sum();
    let mut out = LinComb::zero();
    for (i, (m, xi)) in modules.iter().zip(&x.per_point).enumerate() {
        let slack = cutoff - (total - degs[i]);
        let v = LinComb::basis(u[i].clone());
        for ((s, n), c) in xi.terms() {
            let shift = m.algebra().degree(s) - n - 1;
            if degs[i] + shift < 0 {
                continue;
            }
            if degs[i] + shift > slack {
                return Ok(None);
            }
            let image = match act(m, s, *n, &v) {
                Ok(img) => img,
                Err(KernelError::Overflow { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            for (w, cw) in image.iter() {
                let mut t = u.clone();
                t[i] = w.clone();
                out.add_term(t, c * cw);
            }
        }
    }
    Ok(Some(out))
}

fn default_state_degree(voa: &FockVoa) -> i64 {
    match voa.kind() {
        FockKind::Heisenberg => 1,
        FockKind::Lattice { k } => k.max(1),
    }
}

fn estimate_at(
    voa: &FockVoa,
    classes: &[ChargeClass],
    points: &[JetPoint],
    cutoff: i64,
    options: &OracleOptions,
) -> OracleResult<(usize, usize)> {
    let bmax = options.max_state_degree.unwrap_or_else(|| default_state_degree(voa)).min(voa.max_degree());
    let bound = options.pole_bound.unwrap_or((cutoff + bmax) as usize);
    let modules =
        classes.iter().map(|c| FockModule::new(voa, c.clone(), cutoff)).collect::<Result<Vec<_>, _>>()?;
    let ambient = ambient_basis(&modules, cutoff);
    let mut elements = Vec::new();
    for k in 1..=bmax {
        let sections = section_basis(k, points, bound);
        for b in quasi_primaries(voa, k)? {
            for mu in &sections {
                elements.push(zhu_element(voa, &b, mu, points, cutoff + k)?);
            }
        }
    }
    // High total degree first, so pivots land on high-degree vectors.
    let mut order: Vec<usize> = (0..ambient.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(ambient[i].1.iter().sum::<i64>()));
    let mut position = vec![0; ambient.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    let index: HashMap<&Tensor, usize> = ambient.iter().enumerate().map(|(i, (t, _))| (t, position[i])).collect();
    let mut block_dims: BTreeMap<Rational, usize> = BTreeMap::new();
    // The charge element `h ⊗ 1` first: it alone fills every block of nonzero total charge.
    elements.sort_by_key(|x| (x.state.keys().any(|b| !b.charge.is_zero()), x.state.keys().next().map(|b| b.level()), x.section.polynomial.is_empty()));
    for (t, _) in &ambient {
        *block_dims.entry(total_charge(t)).or_default() += 1;
    }
    // Relations are homogeneous in total charge, so the rank splits into blocks; a block
    // whose rank reaches its dimension needs no further relations.
    let charges: Vec<Rational> = ambient.iter().map(|(t, _)| total_charge(t)).collect();
    let mut echelons: BTreeMap<Rational, SparseEchelon<usize>> = BTreeMap::new();
    for x in &elements {
        let shift = x.state.keys().next().map(|b| b.charge.clone()).unwrap_or_default();
        let open = |q: &Rational| {
            let target = q + &shift;
            block_dims.get(&target).is_some_and(|&dim| echelons.get(&target).map_or(0, SparseEchelon::rank) < dim)
        };
        let live: Vec<usize> = (0..ambient.len()).filter(|&i| open(&charges[i])).collect();
        if live.is_empty() {
            continue;
        }
        let mut relations: Vec<LinComb<usize>> = live
            .par_iter()
            .map(|&i| {
                let (u, degs) = &ambient[i];
                Ok(apply(&modules, x, u, degs, cutoff)?
                    .map(|r| r.iter().map(|(t, c)| (index[t], c.clone())).collect::<LinComb<usize>>()))
            })
            .collect::<Result<Vec<_>, KernelError>>()?
            .into_iter()
            .flatten()
            .filter(|r| !r.is_zero())
            .collect();
        relations.sort_by_key(LinComb::len);
        for r in relations {
            let pos = *r.keys().next().expect("nonzero");
            let charge = total_charge(&ambient[order[pos]].0);
            let ech = echelons.entry(charge.clone()).or_default();
            if ech.rank() < block_dims[&charge] {
                ech.insert(r);
            }
        }
    }
    let rank = echelons.values().map(SparseEchelon::rank).sum();
    Ok((ambient.len(), rank))
}

/// `dim F_D M^• − rank(relations inside F_D M^•)`, with per-cutoff history.
/// Stabilized means the estimate at `D` equals the one at `D − 1`.
pub fn truncated_coinvariant_dim(
    voa: &FockVoa,
    classes: &[ChargeClass],
    points: &[JetPoint],
    cutoff: usize,
    options: &OracleOptions,
) -> OracleResult<CoinvariantEstimate> {
    check_points(points, 3)?;
    if classes.len() != points.len() {
        return Err(OracleError::Arity(classes.len(), points.len()));
    }
    let mut history = Vec::new();
    let mut last = (0, 0);
    for d in 0..=cutoff as i64 {
        last = estimate_at(voa, classes, points, d, options)?;
        history.push(last.0 - last.1);
    }
    let estimate = *history.last().expect("nonempty");
    let stabilized = cutoff > 0 && history[cutoff - 1] == estimate;
    Ok(CoinvariantEstimate { cutoff, ambient: last.0, rank: last.1, estimate, stabilized, history })
}

/// The standard marked points `0, 1, −1, 2, −2, …`.
pub fn default_points(n: usize) -> Vec<JetPoint> {
    (0..n as i64).map(|i| JetPoint::Finite(int(if i % 2 == 1 { (i + 1) / 2 } else { -(i / 2) }))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRow {
    pub labels: [usize; 3],
    pub fusion: u32,
    pub estimate: CoinvariantEstimate,
}

impl OracleRow {
    pub fn matches(&self) -> bool {
        self.estimate.stabilized && self.estimate.estimate as u64 == self.fusion as u64
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn mismatches(&self) -> Vec<&OracleRow> {
        self.rows.iter().filter(|r| !r.matches()).collect()
    }
}

/// Compares the estimator with `N_{abc}` for every ordered triple of a lattice ring.
/// Label `i` of the ring is the coset with residue `i`. The cutoff is raised from 1
/// until the estimate stabilizes or `max_cutoff` is reached.
pub fn oracle_vs_fusion(ring: &FusionRing, k: i64, max_cutoff: usize) -> OracleResult<OracleReport> {
    let voa = FockVoa::lattice(k, default_state_degree(&FockVoa::lattice(k, 0)).max(1));
    let n = ring.len();
    let triples: Vec<[usize; 3]> =
        (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c]))).collect();
    let points = default_points(3);
    let rows = triples
        .par_iter()
        .map(|&t| {
            let classes: Vec<ChargeClass> = t
                .iter()
                .map(|&i| {
                    let r: i64 = ring.label(i).parse().expect("lattice labels are residues");
                    ChargeClass::Coset { residue: r, modulus: 2 * k }
                })
                .collect();
            let mut estimate = truncated_coinvariant_dim(&voa, &classes, &points, 1, &OracleOptions::default())?;
            let mut d = 1;
            while !estimate.stabilized && d < max_cutoff {
                d += 1;
                estimate = truncated_coinvariant_dim(&voa, &classes, &points, d, &OracleOptions::default())?;
            }
            Ok(OracleRow { labels: t, fusion: ring.n(t[0], t[1], t[2]), estimate })
        })
        .collect::<OracleResult<Vec<_>>>()?;
    Ok(OracleReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lattice_catalog;

    fn coset(r: i64, k: i64) -> ChargeClass {
        ChargeClass::Coset { residue: r, modulus: 2 * k }
    }

    #[test]
    fn element_examples() {
        let voa = FockVoa::heisenberg(3);
        let h = LinComb::basis(FockBasisVector::new(int(0), vec![1]));
        let pts = [JetPoint::Finite(int(0)), JetPoint::Infinity];
        let inv_z = RationalSection::pole(0, int(0), 1);
        let x = zhu_element(&voa, &h, &inv_z, &pts, 3).unwrap();
        assert_eq!(x.per_point[0], ModeElement::from_vector(&h, -1));
        assert_eq!(x.per_point[1], ModeElement::from_vector(&h, 1));
        let one = RationalSection::monomial(-1, 0);
        let w = voa.omega();
        let fin = [JetPoint::Finite(int(0)), JetPoint::Finite(int(2))];
        let y = zhu_element(&voa, &w, &one, &fin, 4).unwrap();
        assert!(y.per_point.iter().all(|p| *p == ModeElement::from_vector(&w, 0)));
        let stray = RationalSection::pole(0, int(5), 1);
        assert_eq!(zhu_element(&voa, &h, &stray, &pts, 3).unwrap_err(), OracleError::StrayPole);
    }

    #[test]
    fn lattice_examples() {
        let voa = FockVoa::lattice(1, 1);
        let pts = default_points(3);
        let opts = OracleOptions::default();
        let e = truncated_coinvariant_dim(&voa, &[coset(0, 1), coset(1, 1), coset(1, 1)], &pts, 3, &opts).unwrap();
        assert_eq!((e.estimate, e.stabilized), (1, true), "{e:?}");
        let e = truncated_coinvariant_dim(&voa, &[coset(1, 1), coset(1, 1), coset(1, 1)], &pts, 3, &opts).unwrap();
        assert!(e.history.iter().all(|&x| x == 0));
        let voa2 = FockVoa::lattice(2, 2);
        let e = truncated_coinvariant_dim(&voa2, &[coset(1, 2), coset(1, 2), coset(2, 2)], &pts, 3, &opts).unwrap();
        assert_eq!((e.estimate, e.stabilized), (1, true), "{e:?}");
    }

    #[test]
    fn corrupted_table_is_caught() {
        let mut ring = lattice_catalog(1).unwrap().ring;
        let report = oracle_vs_fusion(&ring, 1, 4).unwrap();
        assert!(report.mismatches().is_empty(), "{:?}", report.mismatches());
        ring.set_symmetric(0, 0, 1, 1);
        let report = oracle_vs_fusion(&ring, 1, 4).unwrap();
        assert!(!report.mismatches().is_empty());
    }
}
