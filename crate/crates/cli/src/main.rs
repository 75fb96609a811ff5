//! `confblocks` command-line tool.

mod output;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use confblocks::catalog::{builtin_entries, parse_fusion, resolve, to_json, CatalogEntry, CatalogError, Family};
use confblocks::exact::format_rational;
use confblocks::factorization::{
    enumerate_graphs, invariance_check, rank_via_graph, stabilize, RankEngine, RankQuery,
};
use confblocks::fock::{graded_dimension, ChargeClass, FockVoa};
use confblocks::genus_zero::{default_points, oracle_vs_fusion, truncated_coinvariant_dim, OracleOptions};

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "confblocks", version, about = "Conformal block ranks, fusion catalogs and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Directory searched for fusion documents named by `--catalog`.
    #[arg(long, global = true, env = "CONFBLOCKS_CATALOG_DIR")]
    catalog_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of the bundle of coinvariants for a genus and insertions.
    Rank(RankArgs),
    /// Rank evaluated on every stable graph of the given type.
    GraphRank(GraphArgs),
    /// Run the fusion-ring validator on a catalog or file.
    Validate(CatalogArg),
    /// List built-in catalogs, or show one.
    Catalog {
        #[arg(long)]
        show: Option<String>,
        /// With `--show`, print the fusion document accepted by `--catalog <file>`.
        #[arg(long, requires = "show")]
        export: bool,
    },
    /// Run property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = suites::Suite::All)]
        suite: suites::Suite,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Genus-zero coinvariant estimates for lattice catalogs.
    Oracle {
        #[arg(long)]
        catalog: String,
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
        /// Labels at the marked points; without them every triple is compared with the fusion table.
        #[arg(long, value_delimiter = ',')]
        insertions: Vec<String>,
    },
    /// Truncated characters of the lattice modules.
    Characters {
        #[arg(long)]
        catalog: String,
        #[arg(long, default_value_t = 6)]
        cutoff: usize,
    },
}

#[derive(Args)]
struct CatalogArg {
    #[arg(long)]
    catalog: String,
    /// Accept fusion documents that fail validation.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    catalog: CatalogArg,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, value_delimiter = ',')]
    insertions: Vec<String>,
    /// Number of random degenerations to compare with the recursion.
    #[arg(long)]
    invariance: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    catalog: CatalogArg,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, value_delimiter = ',')]
    insertions: Vec<String>,
}

#[derive(Debug)]
enum CliError {
    Internal(String),
    Invalid(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Validation(_) => CliError::Validation(e.to_string()),
            CatalogError::Io(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load(selector: &str, force: bool, dir: Option<&Path>) -> CliResult<CatalogEntry> {
    match resolve(selector, force) {
        Err(CatalogError::InvalidParameters(msg)) if dir.is_some() => {
            let dir = dir.expect("checked");
            for candidate in [dir.join(selector), dir.join(format!("{selector}.json"))] {
                if candidate.exists() {
                    return Ok(resolve(candidate.to_str().unwrap_or(selector), force)?);
                }
            }
            Err(CliError::Invalid(msg))
        }
        other => Ok(other?),
    }
}

fn label_indices(entry: &CatalogEntry, names: &[String]) -> CliResult<Vec<usize>> {
    names.iter().map(|n| entry.ring.index(n.trim()).map_err(CliError::from)).collect()
}

fn cmd_rank(args: &RankArgs, dir: Option<&Path>) -> CliResult<Output> {
    let entry = load(&args.catalog.catalog, args.catalog.force, dir)?;
    let insertions = label_indices(&entry, &args.insertions)?;
    let engine = RankEngine::new(entry.ring.clone());
    let query = RankQuery::new(args.genus, insertions);
    let rank = engine.rank_query(&query).map_err(|e| CliError::Invalid(e.to_string()))?;
    let mut out = Output::new(
        json!({ "catalog": entry.family.to_string(), "genus": args.genus, "insertions": args.insertions, "rank": rank.to_string() }),
        &["catalog", "genus", "insertions", "rank"],
        vec![vec![entry.family.to_string(), args.genus.to_string(), args.insertions.join(" "), rank.to_string()]],
        format!("{rank}"),
    );
    if let Some(trials) = args.invariance {
        let report =
            invariance_check(&engine, &query, trials, args.seed).map_err(|e| CliError::Invalid(e.to_string()))?;
        out.json["invariance"] = serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?;
        let witnesses: Vec<String> = report.witnesses().map(|t| t.rank.clone()).collect();
        if report.agree {
            out.text.push_str(&format!("\ninvariance: {trials} degenerations agree"));
        } else {
            out.text.push_str(&format!("\ninvariance: disagreement, graph sums {}", witnesses.join(", ")));
            out.status = 4;
        }
    }
    Ok(out)
}

fn cmd_graph_rank(args: &GraphArgs, dir: Option<&Path>) -> CliResult<Output> {
    let entry = load(&args.catalog.catalog, args.catalog.force, dir)?;
    let insertions = label_indices(&entry, &args.insertions)?;
    let labels = stabilize(args.genus, &insertions, entry.ring.vacuum());
    let dim = 3 * args.genus as i64 - 3 + labels.len() as i64;
    if dim > 6 {
        return Err(CliError::Invalid(format!("boundary stratum count grows too fast for 3g-3+n = {dim} > 6")));
    }
    let engine = RankEngine::new(entry.ring.clone());
    let recursion = engine.rank(args.genus, &insertions).map_err(|e| CliError::Invalid(e.to_string()))?.to_string();
    let mut rows = Vec::new();
    for (i, g) in enumerate_graphs(args.genus, &labels).iter().enumerate() {
        let r = rank_via_graph(g, &engine).map_err(|e| CliError::Internal(e.to_string()))?;
        rows.push(vec![i.to_string(), g.vertex_count().to_string(), g.edges.len().to_string(), r.to_string()]);
    }
    let agree = rows.iter().all(|r| r[3] == recursion);
    let text = rows
        .iter()
        .map(|r| format!("graph {}: {} vertices, {} edges, rank {}", r[0], r[1], r[2], r[3]))
        .chain([format!("recursion: {recursion}, all graphs agree: {agree}")])
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = Output::new(
        json!({ "recursion": recursion, "agree": agree, "graphs": rows }),
        &["graph", "vertices", "edges", "rank"],
        rows,
        text,
    );
    if !agree {
        out.status = 4;
    }
    Ok(out)
}

fn cmd_validate(args: &CatalogArg, dir: Option<&Path>) -> CliResult<Output> {
    let path = Path::new(&args.catalog);
    let ring = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(e.to_string()))?;
        parse_fusion(&text, true)?.0
    } else {
        load(&args.catalog, true, dir)?.ring
    };
    let report = ring.validate();
    let rows: Vec<Vec<String>> =
        report.failures.iter().map(|f| vec![f.constraint.to_string(), f.witness.join(",")]).collect();
    let mut out = Output::new(
        json!({ "passed": report.passed(), "failures": rows }),
        &["constraint", "witness"],
        rows,
        report.to_string().trim_end().to_string(),
    );
    if !report.passed() {
        out.status = 3;
    }
    Ok(out)
}

fn describe(entry: &CatalogEntry) -> Output {
    let ring = &entry.ring;
    let rows: Vec<Vec<String>> = (0..ring.len())
        .map(|i| vec![ring.label(i).to_string(), format_rational(ring.weight(i)), ring.label(ring.dual(i)).to_string()])
        .collect();
    let weights: Vec<String> = ring.weights().iter().map(format_rational).collect();
    let text = format!(
        "{}\nc = {}\nweights {{{}}}\n{}\nprovenance: {}",
        entry.family,
        format_rational(ring.central_charge()),
        weights.join(","),
        rows.iter().map(|r| format!("  {}  h = {}  dual {}", r[0], r[1], r[2])).collect::<Vec<_>>().join("\n"),
        entry.provenance
    );
    Output::new(
        json!({
            "family": entry.family.to_string(),
            "central_charge": format_rational(ring.central_charge()),
            "labels": rows,
            "provenance": entry.provenance,
        }),
        &["label", "weight", "dual"],
        rows,
        text,
    )
}

fn cmd_catalog(show: Option<&str>, export: bool, dir: Option<&Path>) -> CliResult<Output> {
    if let Some(sel) = show {
        let entry = load(sel, false, dir)?;
        if export {
            let doc = to_json(&entry.ring, Some(entry.provenance.clone()));
            let value = serde_json::from_str(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            return Ok(Output::new(value, &["document"], vec![vec![doc.clone()]], doc));
        }
        return Ok(describe(&entry));
    }
    let rows: Vec<Vec<String>> = builtin_entries()
        .iter()
        .map(|e| vec![e.family.to_string(), e.ring.len().to_string(), format_rational(e.ring.central_charge())])
        .collect();
    let text = rows.iter().map(|r| format!("{:<16} {:>3} labels  c = {}", r[0], r[1], r[2])).collect::<Vec<_>>().join("\n");
    Ok(Output::new(json!({ "catalogs": rows }), &["catalog", "labels", "central_charge"], rows, text))
}

fn lattice_k(entry: &CatalogEntry) -> CliResult<i64> {
    match entry.family {
        Family::Lattice { k } => Ok(k),
        other => Err(CliError::Invalid(format!("{other} has no concrete modules; use lattice:k"))),
    }
}

fn cmd_oracle(catalog: &str, cutoff: usize, insertions: &[String], dir: Option<&Path>) -> CliResult<Output> {
    let entry = load(catalog, false, dir)?;
    let k = lattice_k(&entry)?;
    if insertions.is_empty() {
        let report = oracle_vs_fusion(&entry.ring, k, cutoff).map_err(|e| CliError::Internal(e.to_string()))?;
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| {
                let names: Vec<&str> = r.labels.iter().map(|&i| entry.ring.label(i)).collect();
                vec![
                    names.join(","),
                    r.fusion.to_string(),
                    r.estimate.estimate.to_string(),
                    r.estimate.cutoff.to_string(),
                    r.matches().to_string(),
                ]
            })
            .collect();
        let bad = report.mismatches().len();
        let text = rows
            .iter()
            .map(|r| format!("({})  N = {}  estimate {} at D = {}  {}", r[0], r[1], r[2], r[3], if r[4] == "true" { "ok" } else { "MISMATCH" }))
            .chain([format!("{} triples, {bad} mismatches", rows.len())])
            .collect::<Vec<_>>()
            .join("\n");
        let mut out = Output::new(
            json!({ "catalog": entry.family.to_string(), "mismatches": bad, "rows": rows }),
            &["labels", "fusion", "estimate", "cutoff", "match"],
            rows,
            text,
        );
        if bad > 0 {
            out.status = 4;
        }
        return Ok(out);
    }
    let idx = label_indices(&entry, insertions)?;
    let classes: Vec<ChargeClass> = idx
        .iter()
        .map(|&i| {
            let r: i64 = entry.ring.label(i).parse().expect("lattice labels are residues");
            ChargeClass::Coset { residue: r, modulus: 2 * k }
        })
        .collect();
    let voa = FockVoa::lattice(k, k);
    let e = truncated_coinvariant_dim(&voa, &classes, &default_points(classes.len()), cutoff, &OracleOptions::default())
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let history: Vec<String> = e.history.iter().map(ToString::to_string).collect();
    let text = format!(
        "estimate {} (ambient {}, relation rank {}), stabilized: {}\nhistory by cutoff: {}",
        e.estimate,
        e.ambient,
        e.rank,
        e.stabilized,
        history.join(" ")
    );
    Ok(Output::new(
        json!({ "estimate": e.estimate, "ambient": e.ambient, "rank": e.rank, "stabilized": e.stabilized, "history": e.history }),
        &["cutoff", "estimate"],
        e.history.iter().enumerate().map(|(d, x)| vec![d.to_string(), x.to_string()]).collect(),
        text,
    ))
}

fn cmd_characters(catalog: &str, cutoff: usize, dir: Option<&Path>) -> CliResult<Output> {
    let entry = load(catalog, false, dir)?;
    let k = lattice_k(&entry)?;
    let voa = FockVoa::lattice(k, 0);
    let mut rows = Vec::new();
    for i in 0..entry.ring.len() {
        let r: i64 = entry.ring.label(i).parse().expect("lattice labels are residues");
        let series = graded_dimension(&voa, r, cutoff).map_err(|e| CliError::Internal(e.to_string()))?;
        let coeffs: Vec<String> = series.coeffs().iter().map(format_rational).collect();
        rows.push(vec![entry.ring.label(i).to_string(), format_rational(entry.ring.weight(i)), coeffs.join(" ")]);
    }
    let text = rows.iter().map(|r| format!("{}  h = {}  dims {}", r[0], r[1], r[2])).collect::<Vec<_>>().join("\n");
    Ok(Output::new(json!({ "catalog": entry.family.to_string(), "characters": rows }), &["label", "weight", "dims"], rows, text))
}

fn run(cli: &Cli) -> CliResult<Output> {
    let dir = cli.catalog_dir.as_deref();
    match &cli.command {
        Command::Rank(args) => cmd_rank(args, dir),
        Command::GraphRank(args) => cmd_graph_rank(args, dir),
        Command::Validate(args) => cmd_validate(args, dir),
        Command::Catalog { show, export } => cmd_catalog(show.as_deref(), *export, dir),
        Command::Verify { suite, cutoff, seed } => Ok(suites::run(*suite, *cutoff, *seed)),
        Command::Oracle { catalog, cutoff, insertions } => cmd_oracle(catalog, *cutoff, insertions, dir),
        Command::Characters { catalog, cutoff } => cmd_characters(catalog, *cutoff, dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => match out.emit(cli.format, cli.output.as_deref()) {
            Ok(()) => ExitCode::from(out.status),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            let (CliError::Internal(msg) | CliError::Invalid(msg) | CliError::Validation(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
