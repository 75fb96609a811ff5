//! Property suites behind `confblocks verify`.

use std::time::Instant;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use confblocks::catalog::{builtin_entries, lattice_catalog, nonassociative_control};
use confblocks::exact::{int, rat, LaurentJet, LinComb, QSeries, Rational};
use confblocks::factorization::{invariance_check, RankEngine, RankQuery};
use confblocks::fock::{FockModule, FockVoa};
use confblocks::genus_zero::oracle_vs_fusion;
use confblocks::kernel::{gamma_action, theta_involution, AncillaryLie, ModeElement, VertexAlgebra};
use confblocks::nodal::{glue_check, prescribe_jets_p1, JetPoint, JetProblem, KDifferentialJet};
use confblocks::sewing::{sewing_identity_check, spectral_apply_d, SpectralBlock};

use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Catalog,
    Factorization,
    Kernel,
    Sewing,
    Nodal,
    Oracle,
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog(_: usize, _: u64) -> Check {
    for entry in builtin_entries() {
        let report = entry.ring.validate();
        ensure(report.passed(), || format!("{}: {report}", entry.family))?;
    }
    ensure(!nonassociative_control().ring.validate().passed(), || "control ring validates".into())
}

fn factorization(_: usize, seed: u64) -> Check {
    for entry in builtin_entries() {
        let engine = RankEngine::new(entry.ring.clone());
        let n = entry.ring.len();
        for g in 0..=2u32 {
            let queries = [vec![], vec![n - 1], vec![n / 2, n - 1]];
            for ins in queries {
                let q = RankQuery::new(g, ins);
                let r = invariance_check(&engine, &q, 3, seed).map_err(|e| e.to_string())?;
                ensure(r.agree, || format!("{}: {q:?} disagrees", entry.family))?;
            }
        }
    }
    let control = RankEngine::new(nonassociative_control().ring);
    let caught = (0..=2u32).any(|g| {
        invariance_check(&control, &RankQuery::new(g, vec![1, 1]), 5, seed).is_ok_and(|r| !r.agree)
    });
    ensure(caught, || "control ring never disagrees".into())
}

fn kernel(cutoff: usize, _: u64) -> Check {
    let d = cutoff as i64;
    for voa in [FockVoa::heisenberg(d), FockVoa::lattice(1, d)] {
        let lie = AncillaryLie::new(&voa).map_err(|e| e.to_string())?;
        for deg in 0..=d {
            for a in voa.basis(deg) {
                let v = LinComb::basis(a.clone());
                let g = gamma_action(&voa, &v).and_then(|g| gamma_action(&voa, &g)).map_err(|e| e.to_string())?;
                ensure(g == v, || format!("γγ on {v:?}"))?;
                for i in -2..=2 {
                    let x = ModeElement::symbol(a.clone(), i);
                    let tt = theta_involution(&voa, &x)
                        .and_then(|t| theta_involution(&voa, &t))
                        .map_err(|e| e.to_string())?;
                    ensure(lie.equivalent(&tt, &x), || format!("ϑϑ on {x:?}"))?;
                }
            }
        }
    }
    Ok(())
}

fn sewing(cutoff: usize, _: u64) -> Check {
    let voa = FockVoa::lattice(1, cutoff as i64);
    for residue in 0..2 {
        let module = FockModule::lattice(&voa, residue, cutoff as i64).map_err(|e| e.to_string())?;
        for deg in 0..=2 {
            for a in voa.basis(deg) {
                let a = LinComb::basis(a);
                for i in 0..=1 {
                    for j in 0..=1 {
                        let ok = sewing_identity_check(&module, &a, i, j, cutoff as i64).map_err(|e| e.to_string())?;
                        ensure(ok, || format!("residue {residue} A={a:?} i={i} j={j}"))?;
                    }
                }
            }
        }
    }
    for entry in builtin_entries() {
        let ones = QSeries::from_coeffs(cutoff, (0..=cutoff).map(|_| int(1)));
        let block = SpectralBlock {
            series: entry.ring.labels().iter().map(|l| (l.clone(), ones.clone())).collect(),
            shifts: entry.ring.labels().iter().cloned().zip(entry.ring.weights().iter().cloned()).collect(),
        };
        let out = spectral_apply_d(&block);
        for (a, l) in entry.ring.labels().iter().enumerate() {
            for d in 0..=cutoff {
                ensure(out.series[l].coeff(d) == int(d as i64) + entry.ring.weight(a), || {
                    format!("{}: spectral eigenvalue of {l} at q^{d}", entry.family)
                })?;
            }
        }
    }
    Ok(())
}

fn nodal(cutoff: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tail = cutoff as i64;
    for k in [0i64, 1, 2] {
        for _ in 0..20 {
            let mut jet = || {
                let terms: Vec<(i64, Rational)> = (-k..tail).map(|e| (e, rat(rng.gen_range(-3..=3), 1))).collect();
                LaurentJet::from_terms("s", terms, tail).expect("below tail")
            };
            let (plus, minus) = (jet(), jet());
            let a = glue_check(&KDifferentialJet::new(k, plus.clone(), minus.clone())).map_err(|e| e.to_string())?;
            let b = glue_check(&KDifferentialJet::new(k, minus, plus)).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("k={k}: glue_check is not symmetric"))?;
        }
    }
    for k in [-1i64, 0, 1, 2] {
        let problem = JetProblem {
            q_points: vec![JetPoint::Finite(int(0)), JetPoint::Finite(int(1))],
            poles: vec![JetPoint::Infinity],
            k,
            target: (0, 0),
            modulus: tail.max(1),
        };
        let s = prescribe_jets_p1(&problem).map_err(|e| e.to_string())?;
        let at0 = s.expand_at(&JetPoint::Finite(int(0)), tail.max(1));
        let at1 = s.expand_at(&JetPoint::Finite(int(1)), tail.max(1));
        let mut want = LaurentJet::new("s", tail.max(1));
        want.add_term(0, int(1)).expect("below tail");
        ensure(at0 == want && at1 == LaurentJet::new("s", tail.max(1)), || format!("k={k}: jets not as prescribed"))?;
    }
    Ok(())
}

fn oracle(cutoff: usize, _: u64) -> Check {
    let ring = lattice_catalog(1).map_err(|e| e.to_string())?.ring;
    let report = oracle_vs_fusion(&ring, 1, cutoff.clamp(2, 6)).map_err(|e| e.to_string())?;
    match report.mismatches().first() {
        Some(bad) => Err(format!("{:?}: fusion {} estimate {}", bad.labels, bad.fusion, bad.estimate.estimate)),
        None => Ok(()),
    }
}

pub fn run(suite: Suite, cutoff: usize, seed: u64) -> Output {
    let all: [(Suite, &str, fn(usize, u64) -> Check); 6] = [
        (Suite::Catalog, "catalog", catalog),
        (Suite::Factorization, "factorization", factorization),
        (Suite::Kernel, "kernel", kernel),
        (Suite::Sewing, "sewing", sewing),
        (Suite::Nodal, "nodal", nodal),
        (Suite::Oracle, "oracle", oracle),
    ];
    let mut rows = Vec::new();
    for (s, name, check) in all {
        if suite != Suite::All && suite != s {
            continue;
        }
        let start = Instant::now();
        let outcome = check(cutoff, seed);
        let secs = format!("{:.2}", start.elapsed().as_secs_f64());
        let (status, detail) = match outcome {
            Ok(()) => ("pass", String::new()),
            Err(why) => ("fail", why),
        };
        rows.push(vec![name.to_string(), status.to_string(), secs, detail]);
    }
    let failed = rows.iter().filter(|r| r[1] == "fail").count();
    let text = rows
        .iter()
        .map(|r| {
            let tail = if r[3].is_empty() { String::new() } else { format!(": {}", r[3]) };
            format!("{:<14} {} ({}s){tail}", r[0], r[1].to_uppercase(), r[2])
        })
        .chain([format!("{} suites, {failed} failed", rows.len())])
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = Output::new(
        json!({ "cutoff": cutoff, "seed": seed, "failed": failed, "suites": rows }),
        &["suite", "status", "seconds", "detail"],
        rows,
        text,
    );
    if failed > 0 {
        out.status = 4;
    }
    out
}
