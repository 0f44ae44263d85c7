mod tables;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asep::ansatz::{check_relations, transfer_psi};
use asep::arborescence::{
    enumerate_arborescences, mctt_measure, psi_tree, ratio_q, ratio_q_at, DEFAULT_TREE_CAP, TREE_CAP_ENV,
};
use asep::markov::{Measure, StationaryMethod, SymbolicChain};
use asep::models::{Model, Partition, Word};
use asep::poly::{BigInt, MultiPoly};
use asep::schubert::{is_evil_avoiding, schubert_poly, verify_kw, Permutation};
use asep::tableaux::{count_tableaux, enumerate_tableaux, partition_function, psi_tableaux, tableaux_measure, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Largest open-boundary lattice accepted on the command line.
const MAX_OPEN_SITES: usize = 10;
/// Largest ring accepted on the command line.
const MAX_RING_SITES: usize = 8;

#[derive(Parser)]
#[command(name = "asep", version, about = "Exact stationary measures of exclusion processes")]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to this file instead of standard output; for `export`
    /// this is the target directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Open3,
    Open5,
    Masep,
    Tasep,
    FiveState,
}

#[derive(Args)]
struct ModelSel {
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Number of sites for the open-boundary models.
    #[arg(long)]
    n: Option<usize>,
    /// Partition for the ring models, e.g. `4,3,2,1`.
    #[arg(long)]
    lambda: Option<String>,
    /// Keep the `y` parameters of the inhomogeneous process.
    #[arg(long)]
    with_y: bool,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum MethodArg {
    #[default]
    Auto,
    Elimination,
    Modular,
    Reconstruction,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum MeasureKind {
    /// Stationary measure with common factors removed.
    #[default]
    Compact,
    /// Tree-theorem measure, common factors kept.
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Letters alpha and beta.
    Ab,
    /// Letters alpha, beta, gamma and delta.
    Abgd,
}

#[derive(Subcommand)]
enum Command {
    /// Compact stationary measure of a model or of a chain file.
    Solve {
        #[command(flatten)]
        model: ModelSel,
        /// Chain in the JSON format written by `export`.
        #[arg(long, conflicts_with = "model")]
        chain: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        method: MethodArg,
    },
    /// Reproduce one of the six reference tables.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        table: u8,
        /// Largest lattice for the ratio table.
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Write `chain.json` and `measure.json` into the `--out` directory.
    Export {
        #[command(flatten)]
        model: ModelSel,
        #[arg(long, value_enum, default_value_t)]
        measure: MeasureKind,
        /// Integer values for the ring variables, in ring order.
        #[arg(long)]
        at: Option<String>,
    },
    /// Staircase tableaux of size n.
    Tableaux {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Ab)]
        mode: ModeArg,
        /// Restrict to tableaux of this type, e.g. `BOB`.
        #[arg(long = "type")]
        tau: Option<String>,
        /// List every tableau with its q boxes and weight.
        #[arg(long)]
        weights: bool,
        /// Print the weight generating function.
        #[arg(long)]
        gf: bool,
    },
    /// Explicit transfer matrices.
    Ansatz {
        /// Print the transfer-matrix measure on n sites.
        #[arg(long)]
        n: Option<usize>,
        /// Check the quadratic and boundary relations.
        #[arg(long)]
        check_relations: bool,
        /// Truncation size for the relation check; 2 to 10 when omitted.
        #[arg(long)]
        dim: Option<usize>,
        /// Compare the transfer product with the tableaux sum on one word.
        #[arg(long)]
        state: Option<String>,
    },
    /// Spanning arborescences and the tree-theorem measure.
    Trees {
        #[command(flatten)]
        model: ModelSel,
        /// Root state; without it the whole measure is printed.
        #[arg(long)]
        root: Option<String>,
        /// List the arborescences at the root.
        #[arg(long, requires = "root")]
        list: bool,
        /// Ratio of the tree measure to the tableaux measure (open3 only).
        #[arg(long)]
        ratio: bool,
        /// Integer point for the ratio, in ring order.
        #[arg(long, requires = "ratio")]
        at: Option<String>,
        /// Maximum number of arborescences to list.
        #[arg(long, env = TREE_CAP_ENV, default_value_t = DEFAULT_TREE_CAP)]
        cap: usize,
    },
    /// Schubert polynomial of a permutation.
    Schubert {
        #[arg(long)]
        perm: String,
    },
    /// Check the Schubert factorizations for the staircase ring of size n.
    VerifyKw {
        #[arg(long)]
        n: usize,
    },
}

/// Rendered result of one command.
struct Outcome {
    json: Value,
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Outcome {
        Outcome { json, text, pass: true }
    }
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let body = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&outcome.json).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Text => outcome.text,
            };
            let written = match (&cli.out, &cli.command) {
                (Some(path), c) if !matches!(c, Command::Export { .. }) => {
                    fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))
                }
                _ => std::io::stdout().write_all(body.as_bytes()).map_err(err),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Res<Outcome> {
    match &cli.command {
        Command::Solve { model, chain, method } => solve(model, chain.as_deref(), *method),
        Command::Verify { table, max_n } => verify(*table, *max_n),
        Command::Export { model, measure, at } => {
            let dir = cli.out.as_deref().ok_or("export needs --out DIR")?;
            export(model, *measure, at.as_deref(), dir)
        }
        Command::Tableaux {
            n,
            mode,
            tau,
            weights,
            gf,
        } => tableaux(*n, *mode, tau.as_deref(), *weights, *gf),
        Command::Ansatz {
            n,
            check_relations,
            dim,
            state,
        } => ansatz(*n, *check_relations, *dim, state.as_deref()),
        Command::Trees {
            model,
            root,
            list,
            ratio,
            at,
            cap,
        } => trees(model, root.as_deref(), *list, *ratio, at.as_deref(), *cap),
        Command::Schubert { perm } => schubert(perm),
        Command::VerifyKw { n } => kw(*n),
    }
}

fn build_model(sel: &ModelSel) -> Res<(ModelKind, SymbolicChain)> {
    let kind = sel.model.ok_or("--model is required")?;
    let open = |n: Option<usize>| -> Res<usize> {
        let n = n.ok_or("--n is required for open-boundary models")?;
        if n == 0 || n > MAX_OPEN_SITES {
            return Err(format!("--n must be between 1 and {MAX_OPEN_SITES}"));
        }
        Ok(n)
    };
    let ring = |l: &Option<String>| -> Res<Partition> {
        let l = l.as_deref().ok_or("--lambda is required for ring models")?;
        let p: Partition = l.parse().map_err(err)?;
        if p.len() > MAX_RING_SITES {
            return Err(format!("--lambda may have at most {MAX_RING_SITES} parts"));
        }
        Ok(p)
    };
    let model = match kind {
        ModelKind::Open3 => Model::Open3 { n: open(sel.n)? },
        ModelKind::Open5 => Model::Open5 { n: open(sel.n)? },
        ModelKind::Masep => Model::Masep {
            lambda: ring(&sel.lambda)?,
        },
        ModelKind::Tasep => Model::Tasep {
            lambda: ring(&sel.lambda)?,
            with_y: sel.with_y,
        },
        ModelKind::FiveState => Model::FiveState,
    };
    Ok((kind, model.build().map_err(err)?))
}

fn measure_text(m: &Measure) -> String {
    let mut s = String::new();
    for (state, v) in m.states().iter().zip(m.values()) {
        let _ = writeln!(s, "{state}: {v}");
    }
    s
}

fn solve(sel: &ModelSel, chain: Option<&Path>, method: MethodArg) -> Res<Outcome> {
    let c = match chain {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            SymbolicChain::from_json(&value).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => build_model(sel)?.1,
    };
    let method = match method {
        MethodArg::Auto => StationaryMethod::Auto,
        MethodArg::Elimination => StationaryMethod::Elimination,
        MethodArg::Modular => StationaryMethod::Modular,
        MethodArg::Reconstruction => StationaryMethod::Reconstruction,
    };
    let m = c.stationary_with(method).map_err(err)?;
    Ok(Outcome::ok(m.to_json(), measure_text(&m)))
}

fn verify(table: u8, max_n: Option<usize>) -> Res<Outcome> {
    let report = tables::run(table, max_n)?;
    let mut text = String::new();
    for c in &report.checks {
        if c.pass {
            let _ = writeln!(text, "PASS {}: {}", c.name, c.computed);
        } else {
            let _ = writeln!(text, "FAIL {}: expected {}, computed {}", c.name, c.expected, c.computed);
        }
    }
    for n in &report.notes {
        let _ = writeln!(text, "NOTE {n}");
    }
    let _ = writeln!(text, "table {}: {}", table, if report.pass { "pass" } else { "fail" });
    Ok(Outcome {
        pass: report.pass,
        json: serde_json::to_value(&report).map_err(err)?,
        text,
    })
}

fn parse_point(spec: &str, nvars: usize) -> Res<Vec<BigInt>> {
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<BigInt>().map_err(|_| format!("`{s}` is not an integer")))
        .collect::<Res<Vec<_>>>()?;
    if values.len() != nvars {
        return Err(format!("--at needs {nvars} values, one per variable, got {}", values.len()));
    }
    Ok(values)
}

fn export(sel: &ModelSel, kind: MeasureKind, at: Option<&str>, dir: &Path) -> Res<Outcome> {
    let (_, c) = build_model(sel)?;
    let m = match kind {
        MeasureKind::Compact => c.stationary_compact().map_err(err)?,
        MeasureKind::Tree => mctt_measure(&c).map_err(err)?,
    };
    let measure_json = match at {
        None => m.to_json(),
        Some(spec) => {
            let point = parse_point(spec, c.ring().nvars())?;
            let map: serde_json::Map<String, Value> = m
                .states()
                .iter()
                .zip(m.values())
                .map(|(s, v)| (s.clone(), Value::String(v.eval_int(&point).to_string())))
                .collect();
            Value::Object(map)
        }
    };
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let chain_path = dir.join("chain.json");
    let measure_path = dir.join("measure.json");
    for (path, value) in [(&chain_path, c.to_json()), (&measure_path, measure_json)] {
        let mut body = serde_json::to_string_pretty(&value).map_err(err)?;
        body.push('\n');
        fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let text = format!("{}\n{}\n", chain_path.display(), measure_path.display());
    Ok(Outcome::ok(
        json!({"chain": chain_path.display().to_string(), "measure": measure_path.display().to_string()}),
        text,
    ))
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Ab => Mode::TwoLetter,
        ModeArg::Abgd => Mode::FourLetter,
    }
}

fn tableaux(n: usize, mode: ModeArg, tau: Option<&str>, weights: bool, gf: bool) -> Res<Outcome> {
    let mode = mode_of(mode);
    let word = tau.map(|t| t.parse::<Word>().map_err(err)).transpose()?;
    if let Some(w) = &word {
        if w.len() != n {
            return Err(format!("--type has {} sites but --n is {n}", w.len()));
        }
    }
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    json.insert("n".into(), json!(n));
    json.insert("mode".into(), json!(if mode == Mode::TwoLetter { "ab" } else { "abgd" }));
    if let Some(w) = &word {
        json.insert("type".into(), json!(w.to_string()));
    }
    let list = if weights || word.is_some() {
        Some(enumerate_tableaux(n, mode, word.as_ref()).map_err(err)?)
    } else {
        None
    };
    let count = match &list {
        Some(l) => l.len() as u64,
        None => count_tableaux(n, mode).map_err(err)?,
    };
    json.insert("count".into(), json!(count));
    let _ = writeln!(text, "count: {count}");
    if gf {
        let g = match &word {
            Some(w) => psi_tableaux(n, w, mode).map_err(err)?,
            None => partition_function(n, mode).map_err(err)?,
        };
        json.insert("generating_function".into(), json!(g.to_string()));
        json.insert("generating_function_terms".into(), json!(g.len()));
        let _ = writeln!(text, "generating function: {g}\nterms: {}", g.len());
    }
    if weights {
        let items: Vec<Value> = list
            .as_ref()
            .expect("listed")
            .iter()
            .map(|t| t.place_q().to_json())
            .collect();
        for t in list.as_ref().expect("listed") {
            let w = t.place_q();
            let _ = writeln!(text, "\n{}weight: {}", t, w.weight);
        }
        json.insert("tableaux".into(), Value::Array(items));
    }
    Ok(Outcome::ok(Value::Object(json), text))
}

fn ansatz(n: Option<usize>, check: bool, dim: Option<usize>, state: Option<&str>) -> Res<Outcome> {
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    let mut pass = true;
    if check {
        let dims: Vec<usize> = match dim {
            Some(d) if d >= 1 => vec![d],
            Some(_) => return Err("--dim must be positive".into()),
            None => (2..=10).collect(),
        };
        let results: Vec<Value> = dims
            .iter()
            .map(|&d| {
                let holds = check_relations(d);
                pass &= holds;
                let _ = writeln!(text, "relations at {d}: {}", if holds { "hold" } else { "fail" });
                json!({"dim": d, "holds": holds})
            })
            .collect();
        json.insert("relations".into(), Value::Array(results));
    }
    if let Some(s) = state {
        let w: Word = s.parse().map_err(err)?;
        let t = transfer_psi(&w);
        let tab = psi_tableaux(w.len(), &w, Mode::TwoLetter).map_err(err)?;
        let equal = t == tab;
        pass &= equal;
        let _ = writeln!(text, "{w}: {t}\ntableaux: {tab}\nequal: {equal}");
        json.insert(
            "state".into(),
            json!({"state": w.to_string(), "transfer": t.to_string(), "tableaux": tab.to_string(), "equal": equal}),
        );
    }
    if let Some(n) = n {
        if n == 0 || n > MAX_OPEN_SITES {
            return Err(format!("--n must be between 1 and {MAX_OPEN_SITES}"));
        }
        let states: Vec<String> = Word::all(n).iter().map(ToString::to_string).collect();
        let values: Vec<MultiPoly> = Word::all(n).iter().map(transfer_psi).collect();
        let m = Measure::new(states, values).map_err(err)?;
        text.push_str(&measure_text(&m));
        json.insert("measure".into(), m.to_json());
    }
    if json.is_empty() {
        return Err("nothing to do: pass --check-relations, --state or --n".into());
    }
    Ok(Outcome {
        json: Value::Object(json),
        text,
        pass,
    })
}

fn trees(sel: &ModelSel, root: Option<&str>, list: bool, ratio: bool, at: Option<&str>, cap: usize) -> Res<Outcome> {
    let (kind, c) = build_model(sel)?;
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    if let Some(r) = root {
        let idx = c.state_index(r).map_err(err)?;
        let psi = psi_tree(&c, idx).map_err(err)?;
        json.insert("root".into(), json!(r));
        json.insert("psi".into(), json!(psi.to_string()));
        let _ = writeln!(text, "psi({r}) = {psi}");
        if list {
            let found = enumerate_arborescences(&c, idx, cap).map_err(err)?;
            let items: Vec<Value> = found
                .iter()
                .map(|t| {
                    let edges: Vec<Value> = t
                        .edges()
                        .map(|(a, b)| json!([c.states()[a], c.states()[b]]))
                        .collect();
                    json!({"edges": edges, "weight": t.weight(&c).to_string()})
                })
                .collect();
            for t in &found {
                let edges: Vec<String> = t
                    .edges()
                    .map(|(a, b)| format!("{}->{}", c.states()[a], c.states()[b]))
                    .collect();
                let _ = writeln!(text, "{}  weight {}", edges.join(" "), t.weight(&c));
            }
            json.insert("arborescences".into(), Value::Array(items));
        }
    } else if !ratio {
        let m = mctt_measure(&c).map_err(err)?;
        text.push_str(&measure_text(&m));
        json.insert("measure".into(), m.to_json());
    }
    if ratio {
        if kind != ModelKind::Open3 {
            return Err("--ratio compares with the tableaux measure and needs --model open3".into());
        }
        let n = sel.n.expect("checked by build_model");
        let reference = tableaux_measure(n, Mode::TwoLetter).map_err(err)?;
        let q = match at {
            Some(spec) => {
                let point = parse_point(spec, c.ring().nvars())?;
                let values: Vec<BigInt> = reference.values().iter().map(|p| p.eval_int(&point)).collect();
                ratio_q_at(&c, &values, &point).map_err(err)?.to_string()
            }
            None => ratio_q(&c, &reference).map_err(err)?.to_string(),
        };
        let _ = writeln!(text, "Q_{n} = {q}");
        json.insert("ratio".into(), json!(q));
    }
    Ok(Outcome::ok(Value::Object(json), text))
}

fn schubert(perm: &str) -> Res<Outcome> {
    let w: Permutation = perm.parse().map_err(err)?;
    let s = schubert_poly(&w).map_err(err)?;
    let inv = w.inverse().descents();
    Ok(Outcome::ok(
        json!({
            "perm": w.to_string(),
            "length": w.length(),
            "evil_avoiding": is_evil_avoiding(&w),
            "inverse_descents": inv,
            "schubert": s.to_string(),
        }),
        format!("S_{w} = {s}\n"),
    ))
}

fn kw(n: usize) -> Res<Outcome> {
    if !(1..=5).contains(&n) {
        return Err("--n must be between 1 and 5".into());
    }
    let report = verify_kw(n).map_err(err)?;
    let mut text = String::new();
    for e in &report.entries {
        let factors = match &e.factors {
            Some(f) => f.iter().map(|w| format!("S_{w}")).collect::<Vec<_>>().join(" * "),
            None if e.evil_avoiding => "not found".into(),
            None => "not checked".into(),
        };
        let _ = writeln!(
            text,
            "{} k={} evil-avoiding={} monomial={} factors: {}",
            e.state,
            e.k,
            e.evil_avoiding,
            e.monomial.as_deref().unwrap_or("-"),
            factors
        );
    }
    let _ = writeln!(text, "total mass: {}", report.total);
    let _ = writeln!(text, "product formula: {}", report.z_product);
    let _ = writeln!(text, "product formula, inverted variables: {}", report.z_inverted);
    Ok(Outcome {
        pass: report.all_verified && report.total_equals_z_inverted,
        json: serde_json::to_value(&report).map_err(err)?,
        text,
    })
}
