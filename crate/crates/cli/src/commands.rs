//! The `eval`, `check` and `fan` commands.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cutpaste::csupport::MeasureOnCompacts;
use cutpaste::kring::{normalize, parse_expr, KClass, RelationSet};
use cutpaste::measures::{apply_measure_with, weight_report, MeasureRegistry, MeasureSpec, MeasureValue, WeightReport};
use cutpaste::site::{DeclaredObject, SiteObject};
use cutpaste::toric::{complete, Fan, FanProperties, ToricObject};
use cutpaste::{Error, Result};

use crate::corpus::{Corpus, RECIPE};
use crate::report::{Header, Report};
use crate::run::{run_corpus, CheckOptions};
use crate::suite::{parse_measure, Suite};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cutpaste", version, about = "Classes, measures and descent checks for toric and declared varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// euler, e_poly, poincare or count:<q>; repeatable. A `+perturbed`
    /// suffix selects the non-motivic mutation of a measure.
    #[arg(long = "measure", global = true)]
    pub measures: Vec<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class and measures of an expression.
    Eval {
        expr: String,
        /// Relation file declaring extra generators.
        #[arg(long)]
        relations: Option<PathBuf>,
        /// Measure values of residual generators.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Run a check suite, or the seeded corpus.
    Check {
        #[arg(long, conflicts_with_all = ["corpus_seed", "corpus_size"])]
        suite: Option<PathBuf>,
        #[arg(long, requires = "corpus_size")]
        corpus_seed: Option<u64>,
        #[arg(long, requires = "corpus_seed")]
        corpus_size: Option<usize>,
        /// Attach traces to passing records too.
        #[arg(long)]
        trace: bool,
    },
    /// Properties, class or completion of a fan file or builtin fan.
    Fan {
        fan: String,
        #[arg(long, group = "what")]
        props: bool,
        #[arg(long, group = "what")]
        class: bool,
        #[arg(long, group = "what")]
        complete: bool,
    },
}

/// Output of a command and whether it records a failure.
pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn measure_names(measures: &[MeasureOnCompacts]) -> Vec<String> {
    measures.iter().map(|m| m.name.clone()).collect()
}

fn selected(common: &Common, default: &[MeasureSpec]) -> Result<Vec<MeasureOnCompacts>> {
    if common.measures.is_empty() {
        return Ok(default.iter().map(|&s| MeasureOnCompacts::builtin(s)).collect());
    }
    common.measures.iter().map(|m| parse_measure(m)).collect()
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Eval { expr, relations, registry } => cmd_eval(&cli.common, expr, relations.as_deref(), registry.as_deref()),
        Command::Check { suite, corpus_seed, corpus_size, trace } => {
            let report = match (suite, corpus_seed, corpus_size) {
                (Some(path), _, _) => cmd_check_suite(&cli.common, path, *trace)?,
                (None, Some(seed), Some(size)) => cmd_check_corpus(&cli.common, *seed, *size, *trace)?,
                _ => return Err(Error::Schema("check needs --suite or --corpus-seed with --corpus-size".into())),
            };
            let text = match cli.common.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            Ok(Output { text, failed: report.has_failures() })
        }
        Command::Fan { fan, props, class, complete } => cmd_fan(&cli.common, fan, *props, *class, *complete),
    }
}

#[derive(Serialize)]
struct MeasureLine {
    measure: String,
    value: MeasureValue,
}

#[derive(Serialize)]
struct EvalReport {
    input: String,
    class: KClass,
    measures: Vec<MeasureLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<WeightReport>,
}

pub fn cmd_eval(common: &Common, text: &str, relations: Option<&Path>, registry: Option<&Path>) -> Result<Output> {
    let mut rels = match relations {
        Some(p) => RelationSet::from_json(&read(p)?)?,
        None => RelationSet::new(),
    };
    let registry = match registry {
        Some(p) => MeasureRegistry::from_json(&read(p)?)?,
        None => MeasureRegistry::new(),
    };
    for base in point_blowup_bases(text) {
        rels.add_point_blowup(&base)?;
    }
    // An expression, or failing that the name of a builtin fan.
    let class = match parse_expr(text, &rels) {
        Ok(expr) => normalize(&expr, &rels)?,
        Err(e) => match Fan::builtin(text.trim()) {
            Ok(f) => ToricObject::whole(Arc::new(f)).class(),
            Err(_) => return Err(e),
        },
    };
    let measures = selected(common, &[MeasureSpec::Euler, MeasureSpec::EPoly])?;
    let mut lines = Vec::new();
    let mut weights = None;
    for m in &measures {
        let value = apply_measure_with(m.spec, &class, &registry)?;
        if m.spec == MeasureSpec::EPoly && weights.is_none() {
            // Purity is only judged when the input names a whole toric variety.
            let obj: SiteObject = match Fan::builtin(text.trim()) {
                Ok(f) => ToricObject::whole(Arc::new(f)).into(),
                Err(_) => SiteObject::Declared(DeclaredObject::empty()),
            };
            weights = Some(weight_report(&obj, &value)?);
        }
        lines.push(MeasureLine { measure: m.spec.name(), value });
    }
    let report = EvalReport { input: text.to_owned(), class, measures: lines, weights };
    let text = match common.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = format!("class: {}\n", report.class);
            for l in &report.measures {
                s += &format!("{}: {}\n", l.measure, l.value);
            }
            if let Some(w) = &report.weights {
                s += "weight  coeff\n";
                for e in &w.weights {
                    s += &format!("{:>6}  {}\n", e.weight, e.coeff);
                }
                if let Some(p) = w.purity {
                    s += &format!("pure: {p}\n");
                }
                s += &format!("mixed: {}\n", w.mixed);
            }
            s
        }
    };
    Ok(Output { text, failed: false })
}

/// Bases `X` of every `Bl(X;pt)` and `E(X;pt)` in `text`.
fn point_blowup_bases(text: &str) -> Vec<String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    for head in ["Bl(", "E("] {
        for (at, _) in compact.match_indices(head) {
            let rest = &compact[at + head.len()..];
            if let Some((base, tail)) = rest.split_once(';') {
                if tail.starts_with("pt)") && !out.iter().any(|b| b == base) {
                    out.push(base.to_owned());
                }
            }
        }
    }
    out
}

fn header(common: &Common, command: String, measures: &[MeasureOnCompacts]) -> Header {
    Header {
        tool: "cutpaste".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        recipe: None,
        seed: None,
        size: None,
        measures: measure_names(measures),
        depth: common.depth,
    }
}

pub fn cmd_check_suite(common: &Common, path: &Path, trace: bool) -> Result<Report> {
    let suite = Suite::from_json(&read(path)?)?;
    let measures = selected(common, &[MeasureSpec::Euler, MeasureSpec::EPoly])?;
    let records = suite.run(&measures, common.depth, trace);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Report::new(header(common, format!("check --suite {name}"), &measures), records))
}

pub fn cmd_check_corpus(common: &Common, seed: u64, size: usize, trace: bool) -> Result<Report> {
    let measures = selected(common, &[MeasureSpec::Euler, MeasureSpec::EPoly])?;
    let corpus = Corpus::generate(seed, size);
    let opts = CheckOptions { measures: measures.clone(), depth: common.depth, trace };
    let records = run_corpus(&corpus, &opts);
    let mut h = header(common, "check --corpus".into(), &measures);
    h.recipe = Some(RECIPE.into());
    h.seed = Some(seed);
    h.size = Some(size);
    Ok(Report::new(h, records))
}

/// A fan file, or a builtin name such as `P2` or `F1`.
pub fn load_fan(arg: &str) -> Result<Fan> {
    let path = Path::new(arg);
    if path.exists() {
        Fan::from_json(&read(path)?)
    } else {
        Fan::builtin(arg)
    }
}

#[derive(Serialize)]
struct FanReport {
    rank: usize,
    rays: usize,
    face_numbers: Vec<usize>,
    #[serde(flatten)]
    properties: FanProperties,
}

pub fn cmd_fan(common: &Common, arg: &str, props: bool, class: bool, completion: bool) -> Result<Output> {
    let fan = load_fan(arg)?;
    let text = if completion {
        let done = complete(&fan)?;
        match common.format {
            Format::Json => json(&done.to_file()),
            Format::Text => {
                let mut s = format!("rank {}\n", done.rank());
                for (i, r) in done.rays().iter().enumerate() {
                    s += &format!("ray {i}: {r:?}\n");
                }
                for c in done.maximal_cones() {
                    s += &format!("cone {:?}\n", c.rays());
                }
                s
            }
        }
    } else if class {
        let cls = ToricObject::whole(Arc::new(fan)).class();
        match common.format {
            Format::Json => json(&cls),
            Format::Text => format!("{cls}\n"),
        }
    } else {
        // `--props` is the default.
        let _ = props;
        let r = FanReport {
            rank: fan.rank(),
            rays: fan.rays().len(),
            face_numbers: fan.face_numbers(),
            properties: fan.properties(),
        };
        match common.format {
            Format::Json => json(&r),
            Format::Text => format!(
                "rank: {}\nrays: {}\nface numbers: {:?}\ncomplete: {}\nsmooth: {}\ndimension: {}\n",
                r.rank, r.rays, r.face_numbers, r.properties.complete, r.properties.smooth, r.properties.dimension
            ),
        }
    };
    Ok(Output { text, failed: false })
}
