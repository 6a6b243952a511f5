use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nswpd::exact::{heuristic_extension, nsw_pipeline_with, optimal_extension_exact, ExactError, ExactOptions};
use nswpd::gen::{contract_shortest, gen_network, sample_costs};
use nswpd::ilp::{check_assignment, emit_ilp, encode_extension};
use nswpd::io::{digest, parse_costs, parse_enewick, serialize_enewick, weight_value, write_costs, ResultRecord};
use nswpd::oracles::{brute_budgeted, brute_pd_max, brute_pd_min, exhaustive_nsw, Variant, DEFAULT_SWITCHING_CAP};
use nswpd::pd::{compute_min_tree_pd, solve_b_map_pd, solve_b_maxtree_pd, BudgetedSolution};
use nswpd::{model::validate_network, CostTable, Dag, Network, TaxonSet, TreeExtension};

#[derive(Parser)]
#[command(name = "nswpd", version, about = "Node scanwidth and phylogenetic diversity on rooted networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a network file is a valid phylogenetic network.
    Validate {
        #[arg(long)]
        net: PathBuf,
        /// Also require every reticulation to have in-degree 2.
        #[arg(long)]
        strict: bool,
    },
    /// Compute a tree-extension and its node scanwidth.
    Nsw(NswArgs),
    /// Solve a diversity problem.
    Pd {
        #[arg(value_enum)]
        problem: PdProblem,
        #[command(flatten)]
        input: PdInput,
        /// Tree-extension file to use instead of computing one.
        #[arg(long)]
        extension: Option<PathBuf>,
    },
    /// Brute-force references for cross-checking.
    Oracle {
        #[arg(value_enum)]
        problem: OracleProblem,
        #[command(flatten)]
        input: PdInput,
    },
    /// Generate a random network and cost table.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        leaves: usize,
        #[arg(long, default_value_t = 0)]
        reticulations: usize,
        #[arg(long, default_value_t = 0.0)]
        contract_frac: f64,
        /// Writes PREFIX.enwk and PREFIX.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Integer program for node scanwidth.
    Ilp {
        #[command(subcommand)]
        cmd: IlpCmd,
    },
    /// Time the solvers over a corpus of `NAME.enwk` + `NAME.csv` pairs.
    Bench(BenchArgs),
}

#[derive(Args)]
struct NswArgs {
    #[arg(long)]
    net: PathBuf,
    /// Exact solver on the whole graph, without reductions.
    #[arg(long, conflicts_with = "heuristic")]
    exact: bool,
    /// Greedy extension only.
    #[arg(long)]
    heuristic: bool,
    /// Same as --exact.
    #[arg(long)]
    no_reduce: bool,
    /// Fail with exit code 3 if the width exceeds K.
    #[arg(long, value_name = "K")]
    upper_bound: Option<usize>,
    #[arg(long)]
    out_extension: Option<PathBuf>,
}

#[derive(Args)]
struct PdInput {
    #[arg(long)]
    net: PathBuf,
    #[arg(long, conflicts_with = "unit_costs")]
    costs: Option<PathBuf>,
    #[arg(long)]
    unit_costs: bool,
    #[arg(long, conflicts_with = "budget_frac")]
    budget: Option<u64>,
    /// Budget as floor(p * total cost).
    #[arg(long, value_name = "P")]
    budget_frac: Option<f64>,
    /// Comma-separated taxa (min and pdmax).
    #[arg(long, value_delimiter = ',')]
    taxa: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PdProblem {
    Map,
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleProblem {
    /// Budgeted all-paths diversity by subset enumeration.
    Map,
    /// Budgeted max-tree diversity by subset and switching enumeration.
    Max,
    /// Min-tree diversity of --taxa by switching enumeration.
    Min,
    /// Max-tree diversity of --taxa by switching enumeration.
    Pdmax,
    /// Node scanwidth by trying every parent map.
    Nsw,
}

#[derive(Subcommand)]
enum IlpCmd {
    /// Write the LP file.
    Emit {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the assignment induced by an extension against the model.
    Check {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        extension: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.9")]
    fractions: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "map,max")]
    problems: Vec<String>,
    /// Per-instance CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-group mean and interquartile range CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Error with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

type Res<T> = Result<T, Failure>;

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: err.into() }
}

fn infeasible(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, err: err.into() }
}

fn io(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 4, err: err.into() }
}

fn exact_failure(e: ExactError) -> Failure {
    infeasible(e)
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(io)
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(io)
}

/// Any DAG; the width commands do not need a phylogenetic network.
fn load_dag(path: &Path) -> Res<(Dag, String)> {
    let text = read(path)?;
    let dag = parse_enewick(&text).with_context(|| format!("parsing {}", path.display())).map_err(usage)?;
    Ok((dag, digest(&text)))
}

fn load_net(path: &Path) -> Res<(Network, String)> {
    let (dag, dig) = load_dag(path)?;
    let net = validate_network(dag).with_context(|| format!("validating {}", path.display())).map_err(usage)?;
    Ok((net, dig))
}

fn load_costs(input: &PdInput, net: &Network) -> Res<CostTable> {
    match (&input.costs, input.unit_costs) {
        (Some(p), _) => parse_costs(&read(p)?, net).with_context(|| format!("parsing {}", p.display())).map_err(usage),
        (None, true) => Ok(CostTable::unit(net)),
        (None, false) => Err(usage(anyhow!("one of --costs or --unit-costs is required"))),
    }
}

fn budget(input: &PdInput, costs: &CostTable) -> Res<u64> {
    match (input.budget, input.budget_frac) {
        (Some(b), _) => Ok(b),
        (None, Some(p)) if (0.0..=1.0).contains(&p) => Ok((p * costs.total() as f64).floor() as u64),
        (None, Some(p)) => Err(usage(anyhow!("--budget-frac {p} is outside [0, 1]"))),
        (None, None) => Err(usage(anyhow!("one of --budget or --budget-frac is required"))),
    }
}

fn taxa(input: &PdInput, net: &Network) -> Res<TaxonSet> {
    if input.taxa.is_empty() {
        return Err(usage(anyhow!("--taxa is required")));
    }
    net.taxon_set(&input.taxa).map_err(|name| usage(anyhow!("unknown taxon {name}")))
}

fn extension_for(net: &Network, path: Option<&PathBuf>) -> Res<TreeExtension> {
    match path {
        Some(p) => TreeExtension::from_text(net.dag(), &read(p)?).with_context(|| format!("reading extension {}", p.display())).map_err(usage),
        None => nsw_pipeline_with(net.dag(), ExactOptions::default()).map(|(e, _)| e).map_err(exact_failure),
    }
}

/// Writes to standard output; a closed pipe is not an error.
fn stdout(text: &str) {
    let mut handle = std::io::stdout().lock();
    let _ = handle.write_all(text.as_bytes()).and_then(|_| handle.flush());
}

fn emit(rec: &ResultRecord) {
    stdout(&(rec.to_json_line() + "\n"));
}

fn budgeted_record(problem: &str, net: &Network, sol: &BudgetedSolution, nsw: usize) -> ResultRecord {
    let g = net.dag();
    ResultRecord {
        problem: problem.to_string(),
        value: weight_value(&sol.value),
        taxa: net.taxon_names(&sol.taxa),
        budget: Some(sol.budget),
        nsw: Some(nsw),
        budget_used: Some(sol.cost),
        witness: sol.witness.as_ref().map(|w| w.iter().map(|&e| [g.edge(e).tail, g.edge(e).head]).collect()),
        ..Default::default()
    }
}

fn run(cli: Cli) -> Res<()> {
    let start = Instant::now();
    match cli.cmd {
        Cmd::Validate { net, strict } => {
            let (net, dig) = load_net(&net)?;
            if strict {
                net.require_strict().map_err(usage)?;
            }
            emit(&ResultRecord {
                problem: "validate".into(),
                value: serde_json::json!({
                    "vertices": net.dag().num_vertices(),
                    "edges": net.dag().num_edges(),
                    "taxa": net.num_taxa(),
                    "reticulations": net.reticulations().len(),
                    "level": net.level(),
                    "strict": net.is_strict(),
                }),
                taxa: net.taxa().to_vec(),
                digest: Some(dig),
                millis: start.elapsed().as_millis(),
                ..Default::default()
            });
        }
        Cmd::Nsw(a) => {
            let (g, dig) = load_dag(&a.net)?;
            let g = &g;
            let opts = ExactOptions { upper_bound: a.upper_bound, ..Default::default() };
            let (ext, w, problem) = if a.heuristic {
                let (e, w) = heuristic_extension(g);
                if a.upper_bound.is_some_and(|k| w > k) {
                    return Err(infeasible(ExactError::Exceeded(a.upper_bound.unwrap_or(0))));
                }
                (e, w, "nsw-heuristic")
            } else if a.exact || a.no_reduce {
                let (e, w) = optimal_extension_exact(g, opts).map_err(exact_failure)?;
                (e, w, "nsw-exact")
            } else {
                let (e, w) = nsw_pipeline_with(g, opts).map_err(exact_failure)?;
                (e, w, "nsw")
            };
            if let Some(p) = &a.out_extension {
                write(p, &ext.to_text())?;
            }
            emit(&ResultRecord {
                problem: problem.into(),
                value: w.into(),
                nsw: Some(w),
                digest: Some(dig),
                millis: start.elapsed().as_millis(),
                ..Default::default()
            });
        }
        Cmd::Pd { problem, input, extension } => {
            let (net, dig) = load_net(&input.net)?;
            let ext = extension_for(&net, extension.as_ref())?;
            let mut rec = match problem {
                PdProblem::Map | PdProblem::Max => {
                    let costs = load_costs(&input, &net)?;
                    let b = budget(&input, &costs)?;
                    let (name, sol) = match problem {
                        PdProblem::Map => ("b-map-pd", solve_b_map_pd(&net, &costs, b, &ext)),
                        _ => ("b-maxtree-pd", solve_b_maxtree_pd(&net, &costs, b, &ext)),
                    };
                    budgeted_record(name, &net, &sol.map_err(usage)?, ext.width())
                }
                PdProblem::Min => {
                    let a = taxa(&input, &net)?;
                    let v = compute_min_tree_pd(&net, &a, &ext).map_err(usage)?;
                    ResultRecord {
                        problem: "min-tree-pd".into(),
                        value: weight_value(&v),
                        taxa: net.taxon_names(&a),
                        nsw: Some(ext.width()),
                        ..Default::default()
                    }
                }
            };
            rec.digest = Some(dig);
            rec.millis = start.elapsed().as_millis();
            emit(&rec);
        }
        Cmd::Oracle { problem: OracleProblem::Nsw, input } => {
            let (g, dig) = load_dag(&input.net)?;
            let (_, w) = exhaustive_nsw(&g).map_err(infeasible)?;
            emit(&ResultRecord {
                problem: "oracle-nsw".into(),
                value: w.into(),
                nsw: Some(w),
                digest: Some(dig),
                millis: start.elapsed().as_millis(),
                ..Default::default()
            });
        }
        Cmd::Oracle { problem, input } => {
            let (net, dig) = load_net(&input.net)?;
            let mut rec = match problem {
                OracleProblem::Map | OracleProblem::Max => {
                    let costs = load_costs(&input, &net)?;
                    let b = budget(&input, &costs)?;
                    let (name, variant) = match problem {
                        OracleProblem::Map => ("oracle-b-map-pd", Variant::Map),
                        _ => ("oracle-b-maxtree-pd", Variant::MaxTree),
                    };
                    let (v, a) = brute_budgeted(&net, &costs, b, variant).map_err(infeasible)?;
                    ResultRecord {
                        problem: name.into(),
                        value: weight_value(&v),
                        taxa: net.taxon_names(&a),
                        budget: Some(b),
                        budget_used: Some(costs.cost_of(&a)),
                        ..Default::default()
                    }
                }
                OracleProblem::Min | OracleProblem::Pdmax => {
                    let a = taxa(&input, &net)?;
                    let (name, v) = match problem {
                        OracleProblem::Min => ("oracle-pd-min", brute_pd_min(&net, &a, DEFAULT_SWITCHING_CAP)),
                        _ => ("oracle-pd-max", brute_pd_max(&net, &a, DEFAULT_SWITCHING_CAP)),
                    };
                    ResultRecord {
                        problem: name.into(),
                        value: weight_value(&v.map_err(infeasible)?),
                        taxa: net.taxon_names(&a),
                        ..Default::default()
                    }
                }
                OracleProblem::Nsw => unreachable!("handled above"),
            };
            rec.digest = Some(dig);
            rec.millis = start.elapsed().as_millis();
            emit(&rec);
        }
        Cmd::Gen { seed, leaves, reticulations, contract_frac, out } => {
            if !(0.0..1.0).contains(&contract_frac) {
                return Err(usage(anyhow!("--contract-frac must lie in [0, 1)")));
            }
            let net = gen_network(leaves, reticulations, seed).map_err(usage)?;
            let net = if contract_frac > 0.0 { contract_shortest(&net, contract_frac) } else { net };
            let costs = sample_costs(&net, seed);
            let text = serialize_enewick(&net) + "\n";
            write(&out.with_extension("enwk"), &text)?;
            write(&out.with_extension("csv"), &write_costs(&costs, &net))?;
            emit(&ResultRecord {
                problem: "gen".into(),
                value: serde_json::json!({
                    "vertices": net.dag().num_vertices(),
                    "reticulations": net.reticulations().len(),
                    "level": net.level(),
                    "total_cost": costs.total(),
                }),
                taxa: net.taxa().to_vec(),
                seed: Some(seed),
                digest: Some(digest(&text)),
                millis: start.elapsed().as_millis(),
                ..Default::default()
            });
        }
        Cmd::Ilp { cmd: IlpCmd::Emit { net, out } } => {
            let (g, _) = load_dag(&net)?;
            let lp = emit_ilp(&g).to_lp_string();
            match out {
                Some(p) => write(&p, &lp)?,
                None => stdout(&lp),
            }
        }
        Cmd::Ilp { cmd: IlpCmd::Check { net, extension } } => {
            let (g, dig) = load_dag(&net)?;
            let ext = TreeExtension::from_text(&g, &read(&extension)?)
                .with_context(|| format!("reading extension {}", extension.display()))
                .map_err(usage)?;
            let model = emit_ilp(&g);
            let report = check_assignment(&model, &encode_extension(&g, &ext)).map_err(usage)?;
            stdout(&format!(
                "{}\n",
                serde_json::json!({
                    "problem": "ilp-check",
                    "digest": dig,
                    "feasible": report.feasible,
                    "objective": report.objective,
                    "violations": report.violations,
                })
            ));
            if !report.feasible {
                return Err(infeasible(anyhow!("{} violated constraints", report.violations.len())));
            }
        }
        Cmd::Bench(a) => bench(a)?,
    }
    Ok(())
}

struct Row {
    instance: String,
    n_leaves: usize,
    level: usize,
    nsw: usize,
    problem: String,
    frac: f64,
    millis: f64,
    value: String,
}

fn bench(a: BenchArgs) -> Res<()> {
    let mut names: Vec<PathBuf> = fs::read_dir(&a.corpus)
        .with_context(|| format!("reading {}", a.corpus.display()))
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "enwk"))
        .collect();
    names.sort();
    let mut rows = Vec::new();
    for path in &names {
        let (net, _) = load_net(path)?;
        let costs_path = path.with_extension("csv");
        let costs = if costs_path.exists() {
            parse_costs(&read(&costs_path)?, &net).map_err(usage)?
        } else {
            CostTable::unit(&net)
        };
        let instance = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let t = Instant::now();
        let (ext, w) = nsw_pipeline_with(net.dag(), ExactOptions::default()).map_err(exact_failure)?;
        let nsw_ms = t.elapsed().as_secs_f64() * 1e3;
        let base = |problem: &str, frac: f64, millis: f64, value: String| Row {
            instance: instance.clone(),
            n_leaves: net.num_taxa(),
            level: net.level(),
            nsw: w,
            problem: problem.to_string(),
            frac,
            millis,
            value,
        };
        rows.push(base("nsw", 0.0, nsw_ms, w.to_string()));
        for problem in &a.problems {
            for &frac in &a.fractions {
                let b = (frac * costs.total() as f64).floor() as u64;
                let t = Instant::now();
                let sol = match problem.as_str() {
                    "map" => solve_b_map_pd(&net, &costs, b, &ext),
                    "max" => solve_b_maxtree_pd(&net, &costs, b, &ext),
                    other => return Err(usage(anyhow!("unknown bench problem {other}"))),
                }
                .map_err(usage)?;
                let ms = t.elapsed().as_secs_f64() * 1e3;
                rows.push(base(problem, frac, ms, nswpd::io::weight_value(&sol.value).to_string()));
            }
        }
    }
    let mut csv = String::from("instance,n_leaves,level,nsw,problem,budget_frac,millis,value\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:.3},{}\n",
            r.instance, r.n_leaves, r.level, r.nsw, r.problem, r.frac, r.millis, r.value
        ));
    }
    match &a.out {
        Some(p) => write(p, &csv)?,
        None => stdout(&csv),
    }
    let summary = summarize(&rows);
    match &a.summary {
        Some(p) => write(p, &summary)?,
        None => eprint!("{summary}"),
    }
    Ok(())
}

/// Mean and interquartile range of the running time per
/// (n_leaves, level, problem, budget_frac).
fn summarize(rows: &[Row]) -> String {
    let mut groups: std::collections::BTreeMap<(usize, usize, String, String), Vec<f64>> = Default::default();
    for r in rows {
        groups.entry((r.n_leaves, r.level, r.problem.clone(), r.frac.to_string())).or_default().push(r.millis);
    }
    let mut out = String::from("n_leaves,level,problem,budget_frac,count,mean_millis,q1_millis,q3_millis\n");
    for ((n, level, problem, frac), mut ms) in groups {
        ms.sort_by(f64::total_cmp);
        let mean = ms.iter().sum::<f64>() / ms.len() as f64;
        out.push_str(&format!(
            "{n},{level},{problem},{frac},{},{mean:.3},{:.3},{:.3}\n",
            ms.len(),
            quantile(&ms, 0.25),
            quantile(&ms, 0.75)
        ));
    }
    out
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
