//! Python bindings. Rationals cross the boundary as `"a/b"` strings, which
//! `fractions.Fraction` accepts directly.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use confblocks::catalog::{self, CatalogEntry};
use confblocks::exact::{format_rational, parse_rational, LaurentJet, Rational};
use confblocks::factorization::{self, RankEngine, RankQuery};
use confblocks::fock::{self, ChargeClass, FockModule, FockVoa};
use confblocks::genus_zero::{self, OracleOptions};
use confblocks::nodal::{self, JetPoint, JetProblem, KDifferentialJet};
use confblocks::sewing;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(value_err)
}

fn point(s: &str) -> PyResult<JetPoint> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(JetPoint::Infinity),
        other => Ok(JetPoint::Finite(rational(other)?)),
    }
}

fn jet(terms: &BTreeMap<i64, String>, tail: i64) -> PyResult<LaurentJet> {
    let terms = terms.iter().map(|(e, c)| Ok((*e, rational(c)?))).collect::<PyResult<Vec<_>>>()?;
    LaurentJet::from_terms("s", terms, tail).map_err(value_err)
}

/// A fusion ring with its catalog family and provenance.
#[pyclass(name = "FusionRing", module = "pyconfblocks", frozen)]
struct PyFusionRing {
    entry: CatalogEntry,
    engine: RankEngine,
}

impl PyFusionRing {
    fn wrap(entry: CatalogEntry) -> Self {
        let engine = RankEngine::new(entry.ring.clone());
        PyFusionRing { entry, engine }
    }

    fn indices(&self, names: &[String]) -> PyResult<Vec<usize>> {
        names.iter().map(|n| self.entry.ring.index(n).map_err(value_err)).collect()
    }
}

#[pymethods]
impl PyFusionRing {
    /// `lattice:k`, `virasoro:p,q`, `sl2:l`, or a path to a fusion document.
    #[staticmethod]
    #[pyo3(signature = (selector, force = false))]
    fn resolve(selector: &str, force: bool) -> PyResult<Self> {
        catalog::resolve(selector, force).map(Self::wrap).map_err(value_err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, force = false))]
    fn from_json(text: &str, force: bool) -> PyResult<Self> {
        let (ring, provenance) = catalog::parse_fusion(text, force).map_err(value_err)?;
        Ok(Self::wrap(CatalogEntry {
            family: catalog::Family::Custom,
            ring,
            provenance: provenance.unwrap_or_default(),
        }))
    }

    fn to_json(&self) -> String {
        catalog::to_json(&self.entry.ring, Some(self.entry.provenance.clone()))
    }

    #[getter]
    fn family(&self) -> String {
        self.entry.family.to_string()
    }

    #[getter]
    fn provenance(&self) -> String {
        self.entry.provenance.clone()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.entry.ring.labels().to_vec()
    }

    #[getter]
    fn central_charge(&self) -> String {
        format_rational(self.entry.ring.central_charge())
    }

    /// Conformal weight of each label.
    fn weights(&self) -> BTreeMap<String, String> {
        let ring = &self.entry.ring;
        ring.labels().iter().cloned().zip(ring.weights().iter().map(format_rational)).collect()
    }

    fn dual(&self, label: &str) -> PyResult<String> {
        let ring = &self.entry.ring;
        Ok(ring.label(ring.dual(ring.index(label).map_err(value_err)?)).to_string())
    }

    fn fusion(&self, a: &str, b: &str, c: &str) -> PyResult<u32> {
        let i = self.indices(&[a.into(), b.into(), c.into()])?;
        Ok(self.entry.ring.n(i[0], i[1], i[2]))
    }

    /// Failed constraints as `(constraint, witness labels)`; empty when the ring is valid.
    fn validate(&self) -> Vec<(String, Vec<String>)> {
        self.entry.ring.validate().failures.into_iter().map(|f| (f.constraint.to_string(), f.witness)).collect()
    }

    #[pyo3(signature = (genus, insertions = Vec::new()))]
    fn rank(&self, genus: u32, insertions: Vec<String>) -> PyResult<BigUint> {
        let idx = self.indices(&insertions)?;
        self.engine.rank(genus, &idx).map_err(value_err)
    }

    /// Compares the recursion with `trials` random full degenerations; returns the report as JSON.
    #[pyo3(signature = (genus, insertions = Vec::new(), trials = 5, seed = 0))]
    fn invariance_check(&self, genus: u32, insertions: Vec<String>, trials: usize, seed: u64) -> PyResult<String> {
        let query = RankQuery::new(genus, self.indices(&insertions)?);
        let report = factorization::invariance_check(&self.engine, &query, trials, seed).map_err(value_err)?;
        serde_json::to_string(&report).map_err(runtime_err)
    }

    fn __len__(&self) -> usize {
        self.entry.ring.len()
    }

    fn __repr__(&self) -> String {
        format!("FusionRing({}, {} labels, c={})", self.entry.family, self.entry.ring.len(), self.central_charge())
    }
}

/// Selectors of every built-in catalog.
#[pyfunction]
fn builtin_catalogs() -> Vec<String> {
    catalog::builtin_entries().iter().map(|e| e.family.to_string()).collect()
}

/// Graded dimensions of the lattice module with the given residue, up to `q^cutoff`.
#[pyfunction]
fn lattice_character(k: i64, residue: i64, cutoff: usize) -> PyResult<Vec<String>> {
    let voa = FockVoa::lattice(k, 0);
    let q = fock::graded_dimension(&voa, residue, cutoff).map_err(value_err)?;
    Ok(q.coeffs().iter().map(format_rational).collect())
}

/// Character of the sewing element `Σ_d id_{W_d} q^d`, read off by contraction.
#[pyfunction]
fn sewn_character(k: i64, residue: i64, cutoff: usize) -> PyResult<Vec<String>> {
    let voa = FockVoa::lattice(k, cutoff as i64);
    let module = FockModule::lattice(&voa, residue, cutoff as i64).map_err(value_err)?;
    Ok(sewing::sewn_character(&module, cutoff).coeffs().iter().map(format_rational).collect())
}

/// Sewing identity for every basis state of degree `≤ max_degree` and `i, j ≤ max_index`.
#[pyfunction]
#[pyo3(signature = (k, residue, cutoff, max_degree = 2, max_index = 1))]
fn sewing_identity(k: i64, residue: i64, cutoff: usize, max_degree: i64, max_index: i64) -> PyResult<bool> {
    use confblocks::kernel::VertexAlgebra;
    let voa = FockVoa::lattice(k, cutoff as i64);
    let module = FockModule::lattice(&voa, residue, cutoff as i64).map_err(value_err)?;
    for d in 0..=max_degree {
        for a in voa.basis(d) {
            let a = confblocks::LinComb::basis(a);
            for i in 0..=max_index {
                for j in 0..=max_index {
                    if !sewing::sewing_identity_check(&module, &a, i, j, cutoff as i64).map_err(runtime_err)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Gluing condition at a node for a `k`-differential given by two jets `{exponent: coefficient}`.
#[pyfunction]
fn glue_check(k: i64, plus: BTreeMap<i64, String>, minus: BTreeMap<i64, String>, tail: i64) -> PyResult<bool> {
    nodal::glue_check(&KDifferentialJet::new(k, jet(&plus, tail)?, jet(&minus, tail)?)).map_err(value_err)
}

/// Section of `ω^k` on the line with the requested jets; returns `(numerator, denominator)`
/// coefficient lists, constant term first. Points are rational strings or `"inf"`.
#[pyfunction]
fn prescribe_jets(
    q_points: Vec<String>,
    poles: Vec<String>,
    k: i64,
    target: (usize, i64),
    modulus: i64,
) -> PyResult<(Vec<String>, Vec<String>)> {
    let problem = JetProblem {
        q_points: q_points.iter().map(|s| point(s)).collect::<PyResult<_>>()?,
        poles: poles.iter().map(|s| point(s)).collect::<PyResult<_>>()?,
        k,
        target,
        modulus,
    };
    let section = nodal::prescribe_jets_p1(&problem).map_err(value_err)?;
    let (num, den) = section.to_fraction();
    Ok((num.iter().map(format_rational).collect(), den.iter().map(format_rational).collect()))
}

/// Truncated coinvariant estimate for lattice modules at `0, 1, −1, 2, …`.
/// Returns `(estimate, stabilized, history)`.
#[pyfunction]
fn coinvariant_estimate(k: i64, residues: Vec<i64>, cutoff: usize) -> PyResult<(usize, bool, Vec<usize>)> {
    let voa = FockVoa::lattice(k, k);
    let classes: Vec<ChargeClass> = residues.iter().map(|&r| ChargeClass::Coset { residue: r, modulus: 2 * k }).collect();
    let points = genus_zero::default_points(classes.len());
    let e = genus_zero::truncated_coinvariant_dim(&voa, &classes, &points, cutoff, &OracleOptions::default())
        .map_err(value_err)?;
    Ok((e.estimate, e.stabilized, e.history))
}

/// Every label triple of `lattice:k` as `(labels, fusion, estimate)`.
#[pyfunction]
fn oracle_vs_fusion(k: i64, max_cutoff: usize) -> PyResult<Vec<([String; 3], u32, usize)>> {
    let ring = catalog::lattice_catalog(k).map_err(value_err)?.ring;
    let report = genus_zero::oracle_vs_fusion(&ring, k, max_cutoff).map_err(runtime_err)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.labels.map(|i| ring.label(i).to_string()), r.fusion, r.estimate.estimate))
        .collect())
}

#[pymodule]
fn pyconfblocks(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFusionRing>()?;
    m.add_function(wrap_pyfunction!(builtin_catalogs, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_character, m)?)?;
    m.add_function(wrap_pyfunction!(sewn_character, m)?)?;
    m.add_function(wrap_pyfunction!(sewing_identity, m)?)?;
    m.add_function(wrap_pyfunction!(glue_check, m)?)?;
    m.add_function(wrap_pyfunction!(prescribe_jets, m)?)?;
    m.add_function(wrap_pyfunction!(coinvariant_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_vs_fusion, m)?)?;
    Ok(())
}
