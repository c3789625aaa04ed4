//! Command-line frontend. `run` never touches the process: it returns the
//! exit code and both output streams.

pub mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algord::{
    distinguish, iso_search, limit_order_holds, LimitSystem, BlockSystem, IsoOutcome, OrderVerdict, OrderedNestSystem,
    DEFAULT_ISO_DEPTH,
};
use crate::diagram::{BratteliDiagram, OrderedBratteliDiagram};
use crate::dimgroup::{in_scale, k0_report, positive, LimitElement, PositivityVerdict, ScaleVerdict, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::fdcsl::search::DEFAULT_SEARCH_BUDGET;
use crate::fdcsl::{search_regular_embedding, PreorderAlgebra, SearchOutcome};
use crate::statpair::{collapse_detect, enumerate_intermediates, unimodularity_check};
pub use spec::{Kind, Model, SpecFile};

/// Levels materialised for stationary presentations when nothing else asks.
pub const DEFAULT_LEVELS: usize = 8;
pub const DEFAULT_ORDER_DEPTH: usize = 12;
pub const DEFAULT_DISTINGUISH_DEPTH: usize = 12;
pub const DEFAULT_COLLAPSE_DEPTH: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "afk0", version, about = "Exact K0 invariants and algebraic orders of limit algebras")]
pub struct Cli {
    /// Emit a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the default depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limit group, Perron data and level sizes.
    K0 { file: PathBuf },
    /// Positivity of an element in the limit order.
    Positive {
        file: PathBuf,
        #[arg(long)]
        element: String,
    },
    /// Algebraic order `a S b`: units of `b` carried onto those of `a`.
    Order {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Whether `0 <= element <= unit`.
    Scale {
        file: PathBuf,
        #[arg(long)]
        element: String,
    },
    /// Derived pair data: `Y`, `S`, determinants and the commuting square.
    Statpair { file: PathBuf },
    /// Candidate intermediate relations on one group, with collapsed classes.
    Intermediates {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        group: usize,
    },
    /// Bounded search for an isomorphism of two ordered diagrams.
    Iso { first: PathBuf, second: PathBuf },
    /// Special-point comparison of two ordered diagrams.
    Distinguish { first: PathBuf, second: PathBuf },
    /// Star-extendible embedding with prescribed diagonal multiplicities.
    Embedsearch {
        source: PathBuf,
        target: PathBuf,
        /// Rows `m_0,m_1,...` per source index, separated by `;`.
        #[arg(long)]
        assignment: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Verdict kinds; the exit code depends on nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Decisive,
    Undecided,
}

impl Decision {
    pub fn code(self) -> i32 {
        match self {
            Decision::Decisive => 0,
            Decision::Undecided => 2,
        }
    }
}

/// Machine-readable report.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<LimitElement>,
    pub certificate: Value,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

struct Computed {
    decision: Decision,
    verdict: String,
    elements: Vec<LimitElement>,
    certificate: Value,
    depth: usize,
    lines: Vec<String>,
}

/// Parses `stage:v1,v2,...`.
pub fn parse_element(s: &str) -> Result<LimitElement> {
    let bad = |m: &str| Error::Parse {
        line: 1,
        column: 1,
        message: format!("element `{s}`: {m}; expected stage:v1,v2,..."),
    };
    let (stage, coords) = s.split_once(':').ok_or_else(|| bad("missing `:`"))?;
    let stage = stage.trim().parse().map_err(|_| bad("stage is not a natural number"))?;
    let vector = coords
        .split(',')
        .map(|c| c.trim().parse::<BigInt>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad("coordinate is not an integer"))?;
    Ok(LimitElement::new(stage, vector))
}

/// Parses `1,1,0;0,0,1` into per-source rows.
pub fn parse_assignment(s: &str) -> Result<Vec<Vec<u64>>> {
    s.split(';')
        .map(|row| row.split(',').map(|c| c.trim().parse::<u64>()).collect::<std::result::Result<Vec<_>, _>>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Parse {
            line: 1,
            column: 1,
            message: format!("assignment `{s}`: expected rows of natural numbers like 1,0;0,1"),
        })
}

fn in_file(path: &std::path::Path, e: Error) -> String {
    format!("{}: {e}", path.display())
}

struct Inputs {
    texts: Vec<(PathBuf, String)>,
}

impl Inputs {
    fn read(paths: &[&PathBuf]) -> std::result::Result<Self, String> {
        let texts = paths
            .iter()
            .map(|p| {
                std::fs::read_to_string(p)
                    .map(|t| ((*p).clone(), t))
                    .map_err(|e| format!("{}: {e}", p.display()))
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(Inputs { texts })
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (_, t) in &self.texts {
            h.update((t.len() as u64).to_le_bytes());
            h.update(t.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn spec(&self, i: usize) -> std::result::Result<SpecFile, String> {
        let (p, t) = &self.texts[i];
        SpecFile::parse(t).map_err(|e| in_file(p, e))
    }

    fn model(&self, i: usize, levels: usize) -> std::result::Result<(SpecFile, Model), String> {
        let spec = self.spec(i)?;
        let m = spec.model(spec.depth.unwrap_or(levels).max(levels)).map_err(|e| in_file(&self.texts[i].0, e))?;
        Ok((spec, m))
    }
}

/// The unordered diagram behind any model; relations are forgotten.
pub fn diagram_of(model: &Model, levels: usize) -> Result<BratteliDiagram> {
    match model {
        Model::Diagram(d) => Ok(d.clone()),
        Model::Ordered(d) => Ok(d.underlying()),
        Model::Pair { pair, intermediate } => intermediate.system(pair)?.diagram(levels),
        Model::Algebra(a) => BlockSystem::finite("algebra", a)?.diagram(levels),
    }
}

/// The order system a model describes, realised through `depth` stages.
pub fn system_of(model: &Model, depth: usize) -> Result<Box<dyn LimitSystem>> {
    Ok(match model {
        Model::Pair { pair, intermediate } => Box::new(intermediate.system(pair)?),
        Model::Ordered(d) => Box::new(OrderedNestSystem::new("ordered", d, depth)?),
        Model::Algebra(a) => Box::new(BlockSystem::finite("algebra", a)?),
        Model::Diagram(_) => {
            return Err(Error::Relation(
                "a plain diagram carries no relation; use a pair, ordered-diagram or fdcsl file".into(),
            ))
        }
    })
}

fn ordered(model: Model, path: &std::path::Path) -> std::result::Result<OrderedBratteliDiagram, String> {
    match model {
        Model::Ordered(d) => Ok(d),
        other => Err(format!("{}: expected an ordered-diagram file, found a {}", path.display(), other.kind_name())),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fmt_vec(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_element(e: &LimitElement) -> String {
    format!("{}:{}", e.stage, fmt_vec(&e.vector))
}

fn positivity(v: &PositivityVerdict) -> (Decision, Vec<String>) {
    let d = if v.is_decided() { Decision::Decisive } else { Decision::Undecided };
    let detail = match v {
        PositivityVerdict::Positive { stage } | PositivityVerdict::Zero { stage } => format!("stage: {stage}"),
        PositivityVerdict::NotPositive { certificate } => format!("certificate: {}", to_value(certificate)),
        PositivityVerdict::Inconclusive { depth } => format!("depth: {depth}"),
    };
    (d, vec![detail])
}

fn compute(cli: &Cli, inputs: &Inputs) -> std::result::Result<Computed, String> {
    let path = |i: usize| inputs.texts[i].0.clone();
    let lib = |i: usize| move |e: Error| in_file(&path(i), e);
    let plain = |e: Error| e.to_string();
    Ok(match &cli.command {
        Command::K0 { .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_LEVELS);
            let (_, m) = inputs.model(0, depth)?;
            let d = diagram_of(&m, depth).map_err(lib(0))?;
            let r = k0_report(&d).map_err(lib(0))?;
            let mut lines = vec![format!("rank: {}", r.rank), format!("classification: {}", to_value(&r.classification))];
            for c in &r.classes {
                lines.push(format!(
                    "class {:?}: primitive {}, eigenvalue {}, polynomial {}",
                    c.vertices,
                    c.primitive,
                    c.eigenvalue.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into()),
                    c.eigenvalue_polynomial.as_deref().unwrap_or("-"),
                ));
            }
            Computed {
                decision: Decision::Decisive,
                verdict: "computed".into(),
                elements: vec![],
                certificate: to_value(&r),
                depth: d.depth(),
                lines,
            }
        }
        Command::Positive { element, .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_DEPTH);
            let e = parse_element(element).map_err(plain)?;
            let (_, m) = inputs.model(0, DEFAULT_LEVELS)?;
            let d = diagram_of(&m, DEFAULT_LEVELS).map_err(lib(0))?;
            let v = positive(&d, &e, depth).map_err(lib(0))?;
            let (decision, lines) = positivity(&v);
            Computed {
                decision,
                verdict: v.label().into(),
                elements: vec![e],
                certificate: to_value(&v),
                depth,
                lines,
            }
        }
        Command::Scale { element, .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_DEPTH);
            let e = parse_element(element).map_err(plain)?;
            let (_, m) = inputs.model(0, DEFAULT_LEVELS)?;
            let d = diagram_of(&m, DEFAULT_LEVELS).map_err(lib(0))?;
            let v = in_scale(&d, &e, depth).map_err(lib(0))?;
            let (decision, verdict, line) = match &v {
                ScaleVerdict::InScale { stage } => (Decision::Decisive, "in_scale", format!("stage: {stage}")),
                ScaleVerdict::NotInScale { witness } => (Decision::Decisive, "not_in_scale", format!("witness: {witness}")),
                ScaleVerdict::Inconclusive { depth } => (Decision::Undecided, "inconclusive", format!("depth: {depth}")),
            };
            Computed {
                decision,
                verdict: verdict.into(),
                elements: vec![e],
                certificate: to_value(&v),
                depth,
                lines: vec![line],
            }
        }
        Command::Order { a, b, .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_ORDER_DEPTH);
            let (a, b) = (parse_element(a).map_err(plain)?, parse_element(b).map_err(plain)?);
            let (_, m) = inputs.model(0, depth)?;
            let sys = system_of(&m, depth + 2).map_err(lib(0))?;
            let v = limit_order_holds(sys.as_ref(), &a, &b, depth).map_err(lib(0))?;
            let (decision, line) = match &v {
                OrderVerdict::Holds { certificate } => (
                    Decision::Decisive,
                    format!("transport at stage {}: {} -> {}", certificate.stage, fmt_vec(&certificate.q), fmt_vec(&certificate.p)),
                ),
                OrderVerdict::Refuted { reason } => (Decision::Decisive, format!("reason: {}", to_value(reason))),
                OrderVerdict::Inconclusive { depth } => (Decision::Undecided, format!("depth: {depth}")),
            };
            Computed {
                decision,
                verdict: v.label().into(),
                elements: vec![a, b],
                certificate: to_value(&v),
                depth,
                lines: vec![line],
            }
        }
        Command::Statpair { .. } => {
            let (_, m) = inputs.model(0, DEFAULT_LEVELS)?;
            let Model::Pair { pair, .. } = m else {
                return Err(format!("{}: expected a file with a `partition`", path(0).display()));
            };
            let u = unimodularity_check(&pair).map_err(lib(0))?;
            let commuting = pair.s().mul(pair.x()).map_err(lib(0))? == pair.y().mul(pair.s()).map_err(lib(0))?;
            let lines = vec![
                format!("Y = {}", pair.y()),
                format!("S = {}", pair.s()),
                format!("det X = {}, det Y = {}, det Y divides det X: {}", u.det_x, u.det_y, u.divides),
                format!("S X = Y S: {commuting}"),
            ];
            Computed {
                decision: Decision::Decisive,
                verdict: "derived".into(),
                elements: vec![],
                certificate: json!({ "pair": to_value(&pair), "unimodularity": to_value(&u), "commuting_square": commuting }),
                depth: 0,
                lines,
            }
        }
        Command::Intermediates { group, .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_COLLAPSE_DEPTH);
            let (_, m) = inputs.model(0, DEFAULT_LEVELS)?;
            let Model::Pair { pair, .. } = m else {
                return Err(format!("{}: expected a file with a `partition`", path(0).display()));
            };
            let specs = enumerate_intermediates(&pair, *group).map_err(lib(0))?;
            let classes = collapse_detect(&pair, &specs, depth).map_err(lib(0))?;
            let relations: Vec<Value> = specs
                .iter()
                .map(|s| {
                    let n = s.relation.len();
                    let off: Vec<(usize, usize)> = (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .filter(|&(i, j)| i != j && s.relation[i][j])
                        .collect();
                    to_value(&off)
                })
                .collect();
            Computed {
                decision: Decision::Decisive,
                verdict: "enumerated".into(),
                elements: vec![],
                certificate: json!({
                    "group": group,
                    "candidates": specs.len(),
                    "all_distinct": classes.len() == specs.len(),
                    "relations": relations,
                    "classes": classes,
                }),
                depth,
                lines: vec![
                    format!("candidate intermediate relations on group {group}: {}", specs.len()),
                    format!("distinct through depth {depth}: {}", classes.len()),
                ],
            }
        }
        Command::Iso { .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_ISO_DEPTH);
            let a = ordered(inputs.model(0, DEFAULT_LEVELS)?.1, &path(0))?;
            let b = ordered(inputs.model(1, DEFAULT_LEVELS)?.1, &path(1))?;
            let v = iso_search(&a, &b, depth).map_err(plain)?;
            let (decision, verdict, line) = match &v {
                IsoOutcome::Found { certificate } => {
                    (Decision::Decisive, "found", format!("alternating maps: {}", certificate.maps.len()))
                }
                IsoOutcome::Exhausted { depth, nodes } => {
                    (Decision::Undecided, "exhausted", format!("no certificate through depth {depth} ({nodes} nodes)"))
                }
                IsoOutcome::BudgetExceeded { nodes } => {
                    (Decision::Undecided, "budget_exceeded", format!("nodes: {nodes}"))
                }
            };
            Computed {
                decision,
                verdict: verdict.into(),
                elements: vec![],
                certificate: to_value(&v),
                depth,
                lines: vec![line],
            }
        }
        Command::Distinguish { .. } => {
            let depth = cli.depth.unwrap_or(DEFAULT_DISTINGUISH_DEPTH);
            let a = ordered(inputs.model(0, DEFAULT_LEVELS)?.1, &path(0))?;
            let b = ordered(inputs.model(1, DEFAULT_LEVELS)?.1, &path(1))?;
            let v = distinguish(&a, &b, depth).map_err(plain)?;
            let side = |s: &crate::algord::SpecialPointVerdict| {
                if s.exists() {
                    format!("exists ({} germ{})", s.germs(), if s.germs() == 1 { "" } else { "s" })
                } else {
                    "none".to_string()
                }
            };
            Computed {
                decision: if v.distinguished { Decision::Decisive } else { Decision::Undecided },
                verdict: if v.distinguished { "distinguished" } else { "not_distinguished" }.into(),
                elements: vec![],
                certificate: to_value(&v),
                depth,
                lines: vec![format!("special point: {} vs {}", side(&v.first), side(&v.second))],
            }
        }
        Command::Embedsearch { assignment, budget, .. } => {
            let algebra = |i: usize| -> std::result::Result<PreorderAlgebra, String> {
                match inputs.model(i, DEFAULT_LEVELS)?.1 {
                    Model::Algebra(a) => Ok(a),
                    other => Err(format!("{}: expected an fdcsl file, found a {}", path(i).display(), other.kind_name())),
                }
            };
            let (src, tgt) = (algebra(0)?, algebra(1)?);
            let assignment = parse_assignment(assignment).map_err(plain)?;
            let v = search_regular_embedding(&src, &tgt, &assignment, *budget).map_err(plain)?;
            let (decision, verdict, certificate, line) = match &v {
                SearchOutcome::Found(e) => {
                    let regular = e.check_strongly_regular().is_none();
                    (Decision::Decisive, "found", to_value(e), format!("embedding found; strongly regular: {regular}"))
                }
                SearchOutcome::None { nodes } => (
                    Decision::Decisive,
                    "none",
                    json!({ "nodes": nodes }),
                    format!("no star-extendible embedding ({nodes} nodes searched)"),
                ),
                SearchOutcome::Inconclusive { nodes } => (
                    Decision::Undecided,
                    "inconclusive",
                    json!({ "nodes": nodes }),
                    format!("budget exhausted after {nodes} nodes"),
                ),
            };
            Computed {
                decision,
                verdict: verdict.into(),
                elements: vec![],
                certificate,
                depth: 0,
                lines: vec![line],
            }
        }
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::K0 { .. } => "k0",
        Command::Positive { .. } => "positive",
        Command::Order { .. } => "order",
        Command::Scale { .. } => "scale",
        Command::Statpair { .. } => "statpair",
        Command::Intermediates { .. } => "intermediates",
        Command::Iso { .. } => "iso",
        Command::Distinguish { .. } => "distinguish",
        Command::Embedsearch { .. } => "embedsearch",
    }
}

fn files(c: &Command) -> Vec<&PathBuf> {
    match c {
        Command::K0 { file }
        | Command::Positive { file, .. }
        | Command::Order { file, .. }
        | Command::Scale { file, .. }
        | Command::Statpair { file }
        | Command::Intermediates { file, .. } => vec![file],
        Command::Iso { first, second } | Command::Distinguish { first, second } => vec![first, second],
        Command::Embedsearch { source, target, .. } => vec![source, target],
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let shown = e.render().to_string();
            let informational = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            return if informational {
                CliOutcome { code: 0, stdout: shown, stderr: String::new() }
            } else {
                CliOutcome { code: 1, stdout: String::new(), stderr: shown }
            };
        }
    };
    let failed = |m: String| CliOutcome {
        code: 1,
        stdout: String::new(),
        stderr: format!("error: {m}\n"),
    };
    let inputs = match Inputs::read(&files(&cli.command)) {
        Ok(i) => i,
        Err(m) => return failed(m),
    };
    let start = Instant::now();
    let c = match compute(&cli, &inputs) {
        Ok(c) => c,
        Err(m) => return failed(m),
    };
    let wall_time_ms = cli.timing.then(|| start.elapsed().as_millis() as u64);
    let name = command_name(&cli.command);
    let stdout = if cli.json {
        let r = Report {
            command: name.into(),
            input_digest: inputs.digest(),
            verdict: c.verdict,
            elements: c.elements,
            certificate: c.certificate,
            depth: c.depth,
            wall_time_ms,
        };
        serde_json::to_string_pretty(&r).expect("reports serialize") + "\n"
    } else {
        let mut out = format!("{name}: {}\n", c.verdict);
        if !c.elements.is_empty() {
            let shown: Vec<String> = c.elements.iter().map(fmt_element).collect();
            out += &format!("elements: {}\n", shown.join(" "));
        }
        for l in c.lines {
            out += &l;
            out.push('\n');
        }
        out += &format!("depth: {}\n", c.depth);
        if let Some(ms) = wall_time_ms {
            out += &format!("wall time: {ms} ms\n");
        }
        out
    };
    CliOutcome {
        code: c.decision.code(),
        stdout,
        stderr: String::new(),
    }
}
