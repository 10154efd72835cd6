//! The `ccmu` command line. [`run`] takes the argument vector and returns
//! the process exit code: 0 for true or success, 1 for false or no witness,
//! 2 for an undetermined answer or any usage, input or output error.

use anyhow::{anyhow, bail, Context, Result};
use ccmu::dnf::to_df;
use ccmu::search::{witness_search, SearchError};
use ccmu::syntax::parse_inferring_alphabet;
use ccmu::tableau::TableauError;
use ccmu::{
    build_tableau, check_cc, eliminate, find_marking, largest_refinement, parse, Caps, Formula, PointedModel,
    QuantifierSignature, Verdict,
};
use ccmu_conformance::report::Report;
use ccmu_conformance::suites::{self, Config};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(name = "ccmu", version, about = "Refinement modal mu-calculus: check, refine, translate")]
struct Cli {
    /// Print one JSON object on standard output instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model-check a formula, quantifiers included, at a state.
    Check(CheckArgs),
    /// Decide whether one pointed model refines another.
    Refines(RefinesArgs),
    /// Rewrite a formula into an equivalent quantifier-free one.
    Translate(TranslateArgs),
    /// Search for a small refinement satisfying a formula.
    Witness(WitnessArgs),
    /// Bring a fixpoint-free formula into disjunctive form.
    Dnf(FormulaArg),
    /// Build the tableau of a disjunctive formula, optionally with a marking.
    Tableau(TableauArgs),
    /// Run the exhaustive property suites.
    Selftest(SelftestArgs),
}

/// `file.json` or `file.json#state`.
#[derive(Debug, Clone)]
struct Selector {
    path: PathBuf,
    state: Option<String>,
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (path, state) = match s.rsplit_once('#') {
            Some((p, st)) if !st.is_empty() => (p, Some(st.to_string())),
            Some((p, _)) => (p, None),
            None => (s, None),
        };
        if path.is_empty() {
            return Err("empty model path".into());
        }
        Ok(Selector {
            path: path.into(),
            state,
        })
    }
}

impl Selector {
    fn load(&self) -> Result<PointedModel> {
        let text = fs::read_to_string(&self.path).with_context(|| format!("reading {}", self.path.display()))?;
        PointedModel::from_json(&text, self.state.as_deref()).map_err(|e| anyhow!(Failure::Model(e.to_string())))
    }
}

/// `depth=D,states=N,models=M`, any subset.
fn parse_caps(s: &str) -> Result<Caps, String> {
    let mut caps = Caps::default();
    for item in s.split(',').filter(|i| !i.is_empty()) {
        let (key, value) = item.split_once('=').ok_or_else(|| format!("expected key=value, got {item:?}"))?;
        let value: usize = value.parse().map_err(|_| format!("{key}: not a number: {value:?}"))?;
        match key {
            "depth" => caps.depth = value,
            "states" => caps.states = value,
            "models" => caps.models = value,
            _ => return Err(format!("unknown cap {key:?} (depth, states, models)")),
        }
    }
    Ok(caps)
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|a| !a.is_empty()).map(str::to_string).collect()
}

#[derive(Args, Debug)]
struct FormulaArg {
    #[arg(long)]
    formula: String,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    model: Selector,
    #[arg(long)]
    formula: String,
    /// Settle untranslatable quantifiers by witness search up to this many
    /// states; 0 turns the fallback off.
    #[arg(long, default_value_t = 0)]
    fallback_bound: usize,
    #[arg(long, value_parser = parse_caps, default_value = "")]
    caps: Caps,
}

#[derive(Args, Debug)]
struct SignatureArgs {
    /// Covariant actions, comma separated.
    #[arg(long, default_value = "")]
    cov: String,
    /// Contravariant actions, comma separated.
    #[arg(long, default_value = "")]
    contra: String,
}

impl SignatureArgs {
    fn signature(&self) -> Result<QuantifierSignature> {
        QuantifierSignature::new(list(&self.cov), list(&self.contra)).map_err(|e| anyhow!(Failure::Usage(e.to_string())))
    }
}

#[derive(Args, Debug)]
struct RefinesArgs {
    #[arg(long = "spec")]
    spec: Selector,
    #[arg(long = "impl")]
    implementation: Selector,
    #[command(flatten)]
    sig: SignatureArgs,
    /// Atoms exempt from the agreement clause, comma separated.
    #[arg(long, default_value = "")]
    restrict: String,
    /// Write the largest refinement relation as a JSON list of pairs.
    #[arg(long)]
    emit_relation: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, value_parser = parse_caps, default_value = "")]
    caps: Caps,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    model: Selector,
    #[command(flatten)]
    sig: SignatureArgs,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    max_states: usize,
    /// Write the witness as a model file.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableauArgs {
    #[arg(long)]
    formula: String,
    /// Also look for a consistent marking of this pointed model.
    #[arg(long)]
    model: Option<Selector>,
    /// Write the tableau in dot format here instead of standard output.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Small bounds that finish in seconds.
    #[arg(long)]
    quick: bool,
    /// Run only these criteria, comma separated (1 to 9).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    #[arg(long)]
    universe_states: Option<usize>,
    #[arg(long)]
    witness_bound: Option<usize>,
    #[arg(long)]
    sparse_edges: Option<usize>,
    #[arg(long)]
    random_models: Option<usize>,
    #[arg(long)]
    random_max_states: Option<usize>,
    #[arg(long)]
    fixpoint_states: Option<usize>,
    #[arg(long)]
    fixpoint_sample: Option<usize>,
    #[arg(long)]
    small_states: Option<usize>,
    #[arg(long)]
    intermediate_states: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Errors that map to a JSON `reason` other than a verdict's own.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Model(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Model(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

fn reason_of(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<Failure>() {
        Some(Failure::Usage(_)) => "usage",
        Some(Failure::Parse(_)) => "parse",
        Some(Failure::Model(_)) => "model",
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "error",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Status {
    True,
    False,
    Undetermined(String),
}

/// What a command produced: a status, text for people and fields for JSON.
struct Outcome {
    status: Status,
    text: String,
    fields: Map<String, Value>,
}

impl Outcome {
    fn new(status: Status, text: impl Into<String>) -> Outcome {
        Outcome {
            status,
            text: text.into(),
            fields: Map::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Outcome {
        self.fields.insert(key.to_string(), value.into());
        self
    }
}

fn parse_formula(text: &str, pm: Option<&PointedModel>) -> Result<Formula> {
    let parsed = match pm {
        Some(pm) => parse(text, pm.model.alphabet()),
        None => parse_inferring_alphabet(text).map(|(f, _)| f),
    };
    parsed.map_err(|e| anyhow!(Failure::Parse(e.to_string())))
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::True => Status::True,
        Verdict::False => Status::False,
        Verdict::Undetermined(r) => Status::Undetermined(r.to_string()),
    }
}

fn check(args: CheckArgs) -> Result<Outcome> {
    let pm = args.model.load()?;
    let f = parse_formula(&args.formula, Some(&pm))?;
    let fallback = (args.fallback_bound > 0).then_some(args.fallback_bound);
    let verdict = check_cc(&pm, &f, fallback, &args.caps);
    Ok(Outcome::new(verdict_status(verdict), verdict.to_string())
        .with("state", pm.point_name())
        .with("formula", f.to_string()))
}

fn refines(args: RefinesArgs) -> Result<Outcome> {
    let pm = args.spec.load()?;
    let pn = args.implementation.load()?;
    let sig = args.sig.signature()?;
    let restrict: BTreeSet<String> = list(&args.restrict).into_iter().collect();
    let relation = largest_refinement(&pm.model, &pn.model, &restrict, &sig)
        .map_err(|e| anyhow!(Failure::Usage(e.to_string())))?;
    if let Some(path) = &args.emit_relation {
        fs::write(path, relation.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let related = relation.contains_index(pm.point(), pn.point());
    let text = format!(
        "{} {} {} ({} pairs in the largest relation)",
        pn.point_name(),
        if related { "refines" } else { "does not refine" },
        pm.point_name(),
        relation.len()
    );
    Ok(Outcome::new(if related { Status::True } else { Status::False }, text)
        .with("pairs", relation.len())
        .with("relation", serde_json::to_value(relation.pairs()).expect("pairs serialise")))
}

fn translate(args: TranslateArgs) -> Result<Outcome> {
    let f = parse_formula(&args.formula, None)?;
    Ok(match eliminate(&f, &args.caps) {
        Ok(g) => Outcome::new(Status::True, g.to_string()).with("result", g.to_string()),
        Err(e) => Outcome::new(Status::Undetermined(e.reason().to_string()), e.to_string()).with("message", e.to_string()),
    })
}

fn witness(args: WitnessArgs) -> Result<Outcome> {
    let pm = args.model.load()?;
    let sig = args.sig.signature()?;
    let f = parse_formula(&args.formula, Some(&pm))?;
    match witness_search(&pm, &sig, &f, args.max_states) {
        Ok(Some(w)) => {
            let text = w.model.to_json();
            if let Some(path) = &args.emit {
                fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
            }
            let model: Value = serde_json::from_str(&text).expect("model JSON");
            Ok(Outcome::new(Status::True, text)
                .with("states", w.model.model.len())
                .with("witness", model)
                .with("relation", serde_json::to_value(w.relation.pairs()).expect("pairs serialise")))
        }
        Ok(None) => Ok(Outcome::new(
            Status::False,
            format!("no witness with at most {} states", args.max_states),
        )),
        Err(SearchError::Undetermined(e)) => {
            Ok(Outcome::new(Status::Undetermined(e.reason().to_string()), e.to_string()).with("message", e.to_string()))
        }
        Err(e) => bail!(Failure::Usage(e.to_string())),
    }
}

fn dnf(args: FormulaArg) -> Result<Outcome> {
    let f = parse_formula(&args.formula, None)?;
    Ok(match to_df(&f) {
        Ok(g) => Outcome::new(Status::True, g.to_string()).with("result", g.to_string()),
        Err(e) => Outcome::new(Status::Undetermined("Unsupported".into()), e.to_string()).with("message", e.to_string()),
    })
}

fn tableau(args: TableauArgs) -> Result<Outcome> {
    let pm = args.model.as_ref().map(Selector::load).transpose()?;
    let f = parse_formula(&args.formula, pm.as_ref())?;
    let t = match build_tableau(&f) {
        Ok(t) => t,
        Err(e @ (TableauError::NotDisjunctive | TableauError::NonUniqueCover(_))) => {
            return Ok(Outcome::new(Status::Undetermined("NotDisjunctive".into()), e.to_string()))
        }
        Err(e) => return Ok(Outcome::new(Status::Undetermined("Unsupported".into()), e.to_string())),
    };
    let dot = t.to_dot();
    let mut text = String::new();
    match &args.dot {
        Some(path) => fs::write(path, &dot).with_context(|| format!("writing {}", path.display()))?,
        None => text.push_str(&dot),
    }
    let mut out = Outcome::new(Status::True, String::new()).with("nodes", t.nodes().len()).with("dot", dot.clone());
    if let Some(pm) = &pm {
        match find_marking(&t, pm) {
            Some(marking) => {
                let pairs = marking.to_json(pm);
                text.push_str(&format!("marking: {pairs}\n"));
                out = out.with("marking", serde_json::from_str::<Value>(&pairs).expect("pairs JSON"));
            }
            None => {
                text.push_str("no consistent marking\n");
                out.status = Status::False;
                out = out.with("marking", Value::Null);
            }
        }
    }
    out.text = text.trim_end().to_string();
    Ok(out)
}

fn selftest(args: SelftestArgs) -> Result<Outcome> {
    let mut cfg = if args.quick { Config::quick() } else { Config::default() };
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v; })* };
    }
    set!(
        universe_states,
        witness_bound,
        sparse_edges,
        random_models,
        random_max_states,
        fixpoint_states,
        fixpoint_sample,
        small_states,
        intermediate_states,
        seed
    );
    if let Some(bad) = args.only.iter().find(|&&c| !(1..=9).contains(&c)) {
        bail!(Failure::Usage(format!("no criterion {bad}")));
    }
    let wanted = |c: u8| args.only.is_empty() || args.only.contains(&c);
    let mut reports: Vec<Report> = Vec::new();
    if (1..=3).any(wanted) {
        reports.extend(suites::elimination(&cfg).into_iter().filter(|r| wanted(r.id)));
    }
    type Suite = fn(&Config) -> Report;
    let rest: [(u8, Suite); 6] = [
        (4, suites::special_cases),
        (5, suites::composition),
        (6, suites::fixpoint_oracle),
        (7, suites::tableau),
        (8, suites::normal_form),
        (9, suites::structural),
    ];
    for (id, suite) in rest {
        if wanted(id) {
            reports.push(suite(&cfg));
        }
    }
    let all = reports.iter().all(Report::passed);
    let text = reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
    let json: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "criterion": r.id,
                "title": r.title,
                "passed": r.passed(),
                "checked": r.checked,
                "violations": r.violations,
                "examples": r.examples,
                "notes": r.notes,
                "seconds": r.elapsed.as_secs_f64(),
            })
        })
        .collect();
    Ok(Outcome::new(if all { Status::True } else { Status::False }, text).with("reports", json))
}

fn status_name(s: &Status) -> &'static str {
    match s {
        Status::True => "true",
        Status::False => "false",
        Status::Undetermined(_) => "undetermined",
    }
}

/// Runs one command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let wants_json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            if wants_json {
                let msg = e.kind().to_string();
                println!("{}", json!({"status": "error", "reason": "usage", "message": msg}));
            } else {
                eprint!("{e}");
            }
            return 2;
        }
    };
    let (name, result) = match cli.command {
        Command::Check(a) => ("check", check(a)),
        Command::Refines(a) => ("refines", refines(a)),
        Command::Translate(a) => ("translate", translate(a)),
        Command::Witness(a) => ("witness", witness(a)),
        Command::Dnf(a) => ("dnf", dnf(a)),
        Command::Tableau(a) => ("tableau", tableau(a)),
        Command::Selftest(a) => ("selftest", selftest(a)),
    };
    match result {
        Ok(out) => {
            let code = match out.status {
                Status::True => 0,
                Status::False => 1,
                Status::Undetermined(_) => 2,
            };
            if cli.json {
                let mut obj = Map::new();
                obj.insert("command".into(), name.into());
                obj.insert("status".into(), status_name(&out.status).into());
                if let Status::Undetermined(r) = &out.status {
                    obj.insert("reason".into(), r.clone().into());
                }
                obj.extend(out.fields);
                println!("{}", Value::Object(obj));
            } else {
                println!("{}", out.text);
            }
            code
        }
        Err(e) => {
            if cli.json {
                println!(
                    "{}",
                    json!({"command": name, "status": "error", "reason": reason_of(&e), "message": format!("{e:#}")})
                );
            } else {
                eprintln!("error: {e:#}");
            }
            2
        }
    }
}
