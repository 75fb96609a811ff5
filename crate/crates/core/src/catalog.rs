//! Fusion rings of rational vertex algebras: labels, duality, conformal weights
//! and three-point multiplicities, with a consistency validator and a JSON format.
//!
//! Minimal-model and affine `sl_2` tables ship as data files generated by
//! `tools/gen_catalog.py`; lattice rings are the group law of `Z/2k`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, int, parse_rational, rat, Rational};
use crate::fock::{FockModule, FockVoa};
use crate::kernel::VertexModule;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no shipped table for {0}")]
    NotShipped(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("malformed fusion document: {0}")]
    Parse(String),
    #[error("fusion ring fails validation:\n{0}")]
    Validation(ValidationReport),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Finite fusion data. Labels are addressed by index; `n` is stored for every
/// ordered triple exactly as given, so asymmetric input is representable and
/// caught by [`FusionRing::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    vacuum: usize,
    dual: Vec<usize>,
    weights: Vec<Rational>,
    central_charge: Rational,
    n: Vec<u32>,
    aliases: BTreeMap<String, usize>,
}

impl FusionRing {
    /// Builds a ring from ordered triples; unlisted triples are zero.
    pub fn new(
        labels: Vec<String>,
        vacuum: usize,
        dual: Vec<usize>,
        weights: Vec<Rational>,
        central_charge: Rational,
        triples: impl IntoIterator<Item = (usize, usize, usize, u32)>,
    ) -> Result<Self, CatalogError> {
        let len = labels.len();
        if vacuum >= len || dual.len() != len || weights.len() != len || dual.iter().any(|&d| d >= len) {
            return Err(CatalogError::Parse("label tables have inconsistent sizes".into()));
        }
        let mut n = vec![0; len * len * len];
        for (a, b, c, m) in triples {
            if a >= len || b >= len || c >= len {
                return Err(CatalogError::Parse("fusion entry out of range".into()));
            }
            n[(a * len + b) * len + c] = m;
        }
        Ok(FusionRing { labels, vacuum, dual, weights, central_charge, n, aliases: BTreeMap::new() })
    }

    pub fn with_alias(mut self, alias: &str, target: usize) -> Self {
        self.aliases.insert(alias.to_string(), target);
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn aliases(&self) -> &BTreeMap<String, usize> {
        &self.aliases
    }

    /// Resolves a label or alias.
    pub fn index(&self, name: &str) -> Result<usize, CatalogError> {
        self.labels
            .iter()
            .position(|l| l == name)
            .or_else(|| self.aliases.get(name).copied())
            .ok_or_else(|| CatalogError::UnknownLabel(name.to_string()))
    }

    pub fn vacuum(&self) -> usize {
        self.vacuum
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    pub fn weight(&self, a: usize) -> &Rational {
        &self.weights[a]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn central_charge(&self) -> &Rational {
        &self.central_charge
    }

    /// Multiplicity `N(a, b, c)`.
    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        let len = self.len();
        self.n[(a * len + b) * len + c]
    }

    /// Overwrites one ordered entry, used to build corrupted controls.
    pub fn set_n(&mut self, a: usize, b: usize, c: usize, m: u32) {
        let len = self.len();
        self.n[(a * len + b) * len + c] = m;
    }

    /// Sets `N` on all orderings of `(a, b, c)`.
    pub fn set_symmetric(&mut self, a: usize, b: usize, c: usize, m: u32) {
        for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            self.set_n(x, y, z, m);
        }
    }

    /// `Σ_T N(a, b, T) N(T′, c, d)`, the four-point count in the `(ab)(cd)` channel.
    pub fn four_point(&self, a: usize, b: usize, c: usize, d: usize) -> u64 {
        (0..self.len()).map(|t| self.n(a, b, t) as u64 * self.n(self.dual(t), c, d) as u64).sum()
    }

    /// Whether every fusion row `N(a, b, ·)` has a single entry equal to one.
    pub fn is_group_like(&self) -> bool {
        let len = self.len();
        (0..len).all(|a| (0..len).all(|b| (0..len).map(|c| self.n(a, b, c)).sum::<u32>() == 1))
    }

    pub fn validate(&self) -> ValidationReport {
        let len = self.len();
        let name = |i: usize| self.labels[i].clone();
        let mut failures = Vec::new();
        let mut fail = |constraint: Constraint, witness: Vec<usize>| {
            failures.push(Failure { constraint, witness: witness.into_iter().map(name).collect() });
        };
        for a in 0..len {
            if self.dual[self.dual[a]] != a {
                fail(Constraint::DualInvolution, vec![a]);
            }
        }
        if self.dual[self.vacuum] != self.vacuum {
            fail(Constraint::VacuumSelfDual, vec![self.vacuum]);
        }
        for a in 0..len {
            if self.weights[a] != self.weights[self.dual[a]] {
                fail(Constraint::DualWeight, vec![a, self.dual[a]]);
            }
        }
        for w in 0..len {
            for y in 0..len {
                let expected = u32::from(y == self.dual[w]);
                if self.n(self.vacuum, w, y) != expected {
                    fail(Constraint::UnitLaw, vec![self.vacuum, w, y]);
                }
            }
        }
        for a in 0..len {
            for b in 0..len {
                for c in 0..len {
                    let m = self.n(a, b, c);
                    if [self.n(a, c, b), self.n(b, a, c), self.n(b, c, a), self.n(c, a, b), self.n(c, b, a)]
                        .iter()
                        .any(|&x| x != m)
                    {
                        fail(Constraint::Symmetry, vec![a, b, c]);
                    }
                }
            }
        }
        for a in 0..len {
            for b in 0..len {
                for c in 0..len {
                    for d in 0..len {
                        if self.four_point(a, b, c, d) != self.four_point(a, c, b, d) {
                            fail(Constraint::Associativity, vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        ValidationReport { failures }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    DualInvolution,
    VacuumSelfDual,
    DualWeight,
    UnitLaw,
    Symmetry,
    Associativity,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::DualInvolution => "dual-involution",
            Constraint::VacuumSelfDual => "vacuum-self-dual",
            Constraint::DualWeight => "dual-weight",
            Constraint::UnitLaw => "unit-law",
            Constraint::Symmetry => "symmetry",
            Constraint::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub constraint: Constraint,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, constraint: Constraint) -> bool {
        self.failures.iter().any(|f| f.constraint == constraint)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "pass");
        }
        for x in &self.failures {
            writeln!(f, "fail({}, witness ({}))", x.constraint, x.witness.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    VirasoroMinimal { p: i64, q: i64 },
    AffineSl2 { level: i64 },
    Lattice { k: i64 },
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::VirasoroMinimal { p, q } => write!(f, "virasoro:{p},{q}"),
            Family::AffineSl2 { level } => write!(f, "sl2:{level}"),
            Family::Lattice { k } => write!(f, "lattice:{k}"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub family: Family,
    pub ring: FusionRing,
    pub provenance: String,
}

/// On-disk fusion document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FusionDocument {
    pub labels: Vec<String>,
    pub vacuum: String,
    #[serde(default)]
    pub dual: Vec<(String, String)>,
    pub central_charge: String,
    pub weights: BTreeMap<String, String>,
    pub fusion: Vec<(String, String, String, u32)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl FusionDocument {
    /// Converts to a ring; duality pairs act both ways and unlisted labels are self-dual.
    pub fn into_ring(self) -> Result<FusionRing, CatalogError> {
        let index: BTreeMap<&str, usize> = self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != self.labels.len() {
            return Err(CatalogError::Parse("duplicate label".into()));
        }
        let look = |s: &str| index.get(s).copied().ok_or_else(|| CatalogError::UnknownLabel(s.to_string()));
        let vacuum = look(&self.vacuum)?;
        let mut dual: Vec<usize> = (0..self.labels.len()).collect();
        for (a, b) in &self.dual {
            let (a, b) = (look(a)?, look(b)?);
            dual[a] = b;
            dual[b] = a;
        }
        let mut weights = Vec::new();
        for l in &self.labels {
            let w = self.weights.get(l).ok_or_else(|| CatalogError::Parse(format!("missing weight for {l}")))?;
            weights.push(parse_rational(w).map_err(|e| CatalogError::Parse(e.to_string()))?);
        }
        let c = parse_rational(&self.central_charge).map_err(|e| CatalogError::Parse(e.to_string()))?;
        let mut triples = Vec::new();
        for (a, b, cc, m) in &self.fusion {
            triples.push((look(a)?, look(b)?, look(cc)?, *m));
        }
        let mut ring = FusionRing::new(self.labels.clone(), vacuum, dual, weights, c, triples)?;
        for (alias, target) in &self.aliases {
            let t = look(target)?;
            ring = ring.with_alias(alias, t);
        }
        Ok(ring)
    }

    pub fn from_ring(ring: &FusionRing, provenance: Option<String>) -> Self {
        let len = ring.len();
        let mut fusion = Vec::new();
        for a in 0..len {
            for b in 0..len {
                for c in 0..len {
                    let m = ring.n(a, b, c);
                    if m > 0 {
                        fusion.push((ring.labels[a].clone(), ring.labels[b].clone(), ring.labels[c].clone(), m));
                    }
                }
            }
        }
        FusionDocument {
            labels: ring.labels.clone(),
            vacuum: ring.labels[ring.vacuum].clone(),
            dual: (0..len)
                .filter(|&a| ring.dual(a) > a)
                .map(|a| (ring.labels[a].clone(), ring.labels[ring.dual(a)].clone()))
                .collect(),
            central_charge: format_rational(&ring.central_charge),
            weights: (0..len).map(|a| (ring.labels[a].clone(), format_rational(&ring.weights[a]))).collect(),
            fusion,
            aliases: ring.aliases.iter().map(|(k, &v)| (k.clone(), ring.labels[v].clone())).collect(),
            provenance,
        }
    }
}

/// Parses a fusion document; rejects rings failing validation unless `force`.
pub fn parse_fusion(text: &str, force: bool) -> Result<(FusionRing, Option<String>), CatalogError> {
    let doc: FusionDocument = serde_json::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
    let provenance = doc.provenance.clone();
    let ring = doc.into_ring()?;
    if !force {
        let report = ring.validate();
        if !report.passed() {
            return Err(CatalogError::Validation(report));
        }
    }
    Ok((ring, provenance))
}

pub fn load_fusion_file(path: &Path, force: bool) -> Result<CatalogEntry, CatalogError> {
    let text = std::fs::read_to_string(path)?;
    let (ring, provenance) = parse_fusion(&text, force)?;
    Ok(CatalogEntry { family: Family::Custom, ring, provenance: provenance.unwrap_or_default() })
}

pub fn to_json(ring: &FusionRing, provenance: Option<String>) -> String {
    serde_json::to_string_pretty(&FusionDocument::from_ring(ring, provenance)).expect("serializable")
}

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/", $name, ".json")))),*]
    };
}

static SHIPPED: &[(&str, &str)] = shipped!(
    "virasoro_2_3", "virasoro_2_5", "virasoro_2_7", "virasoro_2_9", "virasoro_2_11", "virasoro_2_13",
    "virasoro_2_15", "virasoro_2_17", "virasoro_2_19", "virasoro_3_4", "virasoro_3_5", "virasoro_3_7",
    "virasoro_3_8", "virasoro_3_10", "virasoro_3_11", "virasoro_3_13", "virasoro_4_5", "virasoro_4_7",
    "virasoro_4_9", "virasoro_5_6", "virasoro_5_7", "virasoro_5_8", "sl2_1", "sl2_2", "sl2_3", "sl2_4",
    "sl2_5", "sl2_6", "sl2_7", "sl2_8",
);

/// Names of the shipped data tables.
pub fn shipped_tables() -> impl Iterator<Item = &'static str> {
    SHIPPED.iter().map(|(n, _)| *n)
}

fn shipped(name: &str) -> Result<(FusionRing, String), CatalogError> {
    let text = SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CatalogError::NotShipped(name.to_string()))?;
    let (ring, provenance) = parse_fusion(text, false)?;
    Ok((ring, provenance.unwrap_or_default()))
}

/// `c_{p,q} = 1 − 6(p−q)^2/(pq)`.
pub fn minimal_central_charge(p: i64, q: i64) -> Rational {
    int(1) - rat(6 * (p - q) * (p - q), p * q)
}

/// `h_{m,n} = ((np − mq)^2 − (p−q)^2)/(4pq)`.
pub fn minimal_weight(p: i64, q: i64, m: i64, n: i64) -> Rational {
    rat((n * p - m * q).pow(2) - (p - q).pow(2), 4 * p * q)
}

/// Canonical label of `(m, n) ~ (p − m, q − n)`.
pub fn minimal_label(p: i64, q: i64, m: i64, n: i64) -> String {
    let (m, n) = (m, n).min((p - m, q - n));
    format!("phi_{m}_{n}")
}

/// The Virasoro minimal model `(p, q)`; the fusion table is read from the shipped data and
/// the central charge and weights are recomputed and compared against it.
pub fn minimal_model(p: i64, q: i64) -> Result<CatalogEntry, CatalogError> {
    if !(1 < p && p < q) || p.gcd(&q) != 1 {
        return Err(CatalogError::InvalidParameters(format!("minimal model needs coprime 1 < p < q, got ({p},{q})")));
    }
    let (ring, provenance) = shipped(&format!("virasoro_{p}_{q}"))?;
    if ring.len() as i64 != (p - 1) * (q - 1) / 2 || *ring.central_charge() != minimal_central_charge(p, q) {
        return Err(CatalogError::Parse(format!("shipped table for ({p},{q}) disagrees with c_(p,q)")));
    }
    for m in 1..p {
        for n in 1..q {
            let idx = ring.index(&minimal_label(p, q, m, n))?;
            if *ring.weight(idx) != minimal_weight(p, q, m, n) {
                return Err(CatalogError::Parse(format!("shipped weight of ({m},{n}) disagrees")));
            }
        }
    }
    Ok(CatalogEntry { family: Family::VirasoroMinimal { p, q }, ring, provenance })
}

pub fn affine_sl2(level: i64) -> Result<CatalogEntry, CatalogError> {
    if level < 1 {
        return Err(CatalogError::InvalidParameters(format!("level must be positive, got {level}")));
    }
    let (ring, provenance) = shipped(&format!("sl2_{level}"))?;
    Ok(CatalogEntry { family: Family::AffineSl2 { level }, ring, provenance })
}

/// `Z/2k` with the group law; weights are read off the implemented `L_0` on each coset module.
pub fn lattice_catalog(k: i64) -> Result<CatalogEntry, CatalogError> {
    if k < 1 {
        return Err(CatalogError::InvalidParameters(format!("lattice norm must be positive, got {k}")));
    }
    let m = 2 * k;
    let voa = FockVoa::lattice(k, 0);
    let weights = (0..m)
        .map(|r| FockModule::lattice(&voa, r, 0).map(|module| module.conformal_weight()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CatalogError::InvalidParameters(e.to_string()))?;
    let labels = (0..m).map(|r| r.to_string()).collect();
    let dual = (0..m).map(|r| ((m - r) % m) as usize).collect();
    let mut triples = Vec::new();
    for a in 0..m {
        for b in 0..m {
            triples.push((a as usize, b as usize, ((2 * m - a - b) % m) as usize, 1));
        }
    }
    let ring = FusionRing::new(labels, 0, dual, weights, int(1), triples)?.with_alias("V", 0);
    Ok(CatalogEntry {
        family: Family::Lattice { k },
        ring,
        provenance: format!("lattice sqrt({m})Z: discriminant group Z/{m}, fusion is the group law"),
    })
}

/// A two-label ring `{V, X}`, self-dual, with `N(X,X,X) = 0` and `N(V,X,X) = 1`
/// but also `N(V,V,X) = 1`, so the unit law and associativity both fail.
pub fn nonassociative_control() -> CatalogEntry {
    let labels = vec!["V".to_string(), "X".to_string()];
    let mut ring = FusionRing::new(labels, 0, vec![0, 1], vec![Rational::zero(), rat(1, 2)], int(1), []).expect("sizes");
    ring.set_symmetric(0, 0, 0, 1);
    ring.set_symmetric(0, 0, 1, 1);
    ring.set_symmetric(0, 1, 1, 1);
    CatalogEntry { family: Family::Custom, ring, provenance: "negative control, not a fusion ring".into() }
}

/// Resolves `lattice:k`, `virasoro:p,q`, `sl2:l`, or a path to a fusion document.
pub fn resolve(selector: &str, force: bool) -> Result<CatalogEntry, CatalogError> {
    let bad = || CatalogError::InvalidParameters(format!("cannot parse catalog selector {selector:?}"));
    let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    if let Some((family, args)) = selector.split_once(':') {
        match family {
            "lattice" => return lattice_catalog(parse(args)?),
            "sl2" => return affine_sl2(parse(args)?),
            "virasoro" => {
                let (p, q) = args.split_once(',').ok_or_else(bad)?;
                return minimal_model(parse(p)?, parse(q)?);
            }
            "control" if args == "nonassociative" => return Ok(nonassociative_control()),
            _ => {}
        }
    }
    let path = Path::new(selector);
    if path.exists() {
        return load_fusion_file(path, force);
    }
    Err(bad())
}

/// Every built-in entry: lattices `k ≤ 3`, `sl_2` levels `1..=8`, and all shipped minimal models.
pub fn builtin_entries() -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = (1..=3).map(|k| lattice_catalog(k).expect("lattice")).collect();
    for name in shipped_tables() {
        let entry = if let Some(rest) = name.strip_prefix("sl2_") {
            affine_sl2(rest.parse().expect("level"))
        } else {
            let mut it = name.trim_start_matches("virasoro_").split('_').map(|s| s.parse::<i64>().expect("p,q"));
            minimal_model(it.next().expect("p"), it.next().expect("q"))
        };
        out.push(entry.expect("shipped entry"));
    }
    out
}
