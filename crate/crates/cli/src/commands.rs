use std::path::PathBuf;

use anyhow::{anyhow, bail, Context as _};
use clap::{Args as ClapArgs, Parser, Subcommand};
use serde_json::{json, Value};

use edgecond::attention::{check_principle, AttentionPrinciple, GeneratorRegistry, Revelation};
use edgecond::equivalence::{bisimilar, isomorphic};
use edgecond::formula::{Formula, LanguageTag};
use edgecond::parse::{parse_with, ParseOptions};
use edgecond::sat::{k_satisfiable, reduce, simplify};
use edgecond::semantics::{eval, satisfies, update, UpdateResult};
use edgecond::transforms::TransformRegistry;

use crate::battery::{CaseRegistry, Context};
use crate::dot::{event_dot, model_dot};
use crate::workspace::{event_workspace, model_workspace, Workspace};

#[derive(Parser, Debug)]
#[command(name = "edgecond", version, about = "Dynamic epistemic logic with edge-conditioned event models")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// World bound for isomorphism search without a candidate map.
    #[arg(long, global = true, default_value_t = 12)]
    pub bound: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula at a model's point.
    Check {
        workspace: PathBuf,
        model: String,
        formula: String,
        /// List the worlds satisfying each subformula.
        #[arg(long)]
        trace: bool,
    },
    /// Product update; prints the updated model as a workspace.
    Update {
        workspace: PathBuf,
        model: String,
        event: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisimilarity of two pointed models.
    Bisim(Pair),
    /// Isomorphism of two models.
    Iso(Pair),
    /// Translate an event model.
    Transform {
        workspace: PathBuf,
        event: String,
        #[arg(long)]
        via: String,
    },
    /// Attention event models.
    Attention {
        #[command(subcommand)]
        command: AttentionCommand,
    },
    /// Size of an event model or formula.
    Size { workspace: PathBuf, name: String },
    /// Satisfiability of a static formula, with a witness.
    Sat(FormulaInput),
    /// Static equivalent of a dynamic formula.
    Reduce {
        #[command(flatten)]
        input: FormulaInput,
        /// Remove ⊤/⊥ and double negations from the result.
        #[arg(long)]
        simplify: bool,
    },
    /// Graphviz rendering of a model or event model.
    ExportDot { workspace: PathBuf, name: String },
    /// Run a battery spec.
    Battery {
        spec: PathBuf,
        #[arg(long)]
        ws: Option<PathBuf>,
    },
    /// Check an attention principle on a model.
    Principle {
        workspace: PathBuf,
        model: String,
        /// conjunctive, commutativity, sublanguage, subformula,
        /// introspection, ignoring:A:B or attending:A:B.
        principle: String,
        /// File with one formula per line.
        #[arg(long)]
        universe: Option<PathBuf>,
    },
}

#[derive(ClapArgs, Debug)]
pub struct Pair {
    pub workspace: PathBuf,
    pub left: String,
    pub right: String,
    /// Workspace holding the right model, if different.
    #[arg(long)]
    pub other: Option<PathBuf>,
}

#[derive(ClapArgs, Debug)]
pub struct FormulaInput {
    pub formula: String,
    #[arg(long)]
    pub ws: Option<PathBuf>,
    /// Language used when no workspace is given.
    #[arg(long, default_value = "PA")]
    pub lang: String,
}

#[derive(Subcommand, Debug)]
pub enum AttentionCommand {
    /// Build F, H or R for a revelation.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long, value_delimiter = ',', required = true)]
        agents: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        atoms: Vec<String>,
        /// Revealed formulas; F and H take one conjunction of literals.
        formulas: Vec<String>,
    },
}

/// Result of a command: exit status follows `ok`.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn new(ok: bool, text: impl Into<String>, json: Value) -> Self {
        Outcome { ok, text: text.into(), json }
    }
}

fn parse_free(input: &FormulaInput) -> anyhow::Result<(Formula, Option<Workspace>)> {
    if let Some(p) = &input.ws {
        let ws = Workspace::load(p)?;
        let f = ws.formula(&input.formula)?;
        return Ok((f, Some(ws)));
    }
    let tag = LanguageTag::parse(&input.lang).ok_or_else(|| anyhow!("unknown language `{}`", input.lang))?;
    let opts = ParseOptions { attention_atoms: tag.attention_atoms(), ..Default::default() };
    let f = parse_with(&input.formula, &opts)?;
    tag.check(&f)?;
    Ok((f, None))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Check { workspace, model, formula, trace } => {
            let ws = Workspace::load(workspace)?;
            let m = ws.model(model)?;
            let f = ws.formula(formula)?;
            let value = satisfies(&m, &f)?;
            let mut text = format!("{value}\n");
            let mut rows = Vec::new();
            if *trace {
                let mut seen = std::collections::BTreeSet::new();
                for g in f.subformulas() {
                    if !seen.insert(g.clone()) {
                        continue;
                    }
                    let truth = eval(&m.model, g)?;
                    let worlds: Vec<&str> =
                        (0..m.model.len()).filter(|&w| truth[w]).map(|w| m.model.worlds[w].as_str()).collect();
                    text.push_str(&format!("  {g}: {{{}}}\n", worlds.join(", ")));
                    rows.push(json!({"formula": g.to_string(), "worlds": worlds}));
                }
            }
            Ok(Outcome::new(value, text, json!({"value": value, "point": m.point_name(), "trace": rows})))
        }
        Command::Update { workspace, model, event, out } => {
            let ws = Workspace::load(workspace)?;
            let m = ws.model(model)?;
            let d = ws.event(event)?;
            match update(&m, &d)? {
                UpdateResult::Inapplicable => Ok(Outcome::new(
                    false,
                    format!("{event} is not applicable at {}\n", m.point_name()),
                    json!({"applicable": false}),
                )),
                UpdateResult::Applied(u) => {
                    let name = format!("{model}*{event}");
                    let dto = model_workspace(ws.agents(), &ws.dto.atoms, &name, &u);
                    if let Some(path) = out {
                        std::fs::write(path, pretty(&dto)).with_context(|| format!("writing {}", path.display()))?;
                    }
                    let j = json!({"applicable": true, "point": u.point_name(), "workspace": dto});
                    Ok(Outcome::new(true, pretty(&dto) + "\n", j))
                }
            }
        }
        Command::Bisim(p) | Command::Iso(p) => {
            let ws = Workspace::load(&p.workspace)?;
            let other = p.other.as_ref().map(|o| Workspace::load(o)).transpose()?;
            let m1 = ws.model(&p.left)?;
            let m2 = other.as_ref().unwrap_or(&ws).model(&p.right)?;
            if matches!(cli.command, Command::Bisim(_)) {
                Ok(match bisimilar(&m1, &m2)? {
                    Some(w) => {
                        let pairs = w.named(&m1.model, &m2.model);
                        let text = pairs.iter().map(|(a, b)| format!("  {a} ~ {b}\n")).collect::<String>();
                        Outcome::new(true, format!("bisimilar\n{text}"), json!({"bisimilar": true, "relation": pairs}))
                    }
                    None => Outcome::new(false, "not bisimilar\n", json!({"bisimilar": false})),
                })
            } else {
                Ok(match isomorphic(&m1.model, &m2.model, cli.bound)? {
                    Some(w) => {
                        let map = w.named(&m1.model, &m2.model);
                        let text = map.iter().map(|(a, b)| format!("  {a} -> {b}\n")).collect::<String>();
                        Outcome::new(true, format!("isomorphic\n{text}"), json!({"isomorphic": true, "bijection": map}))
                    }
                    None => Outcome::new(false, "not isomorphic\n", json!({"isomorphic": false})),
                })
            }
        }
        Command::Transform { workspace, event, via } => {
            let ws = Workspace::load(workspace)?;
            let d = ws.event(event)?;
            let out = TransformRegistry::default().get(via)?.apply(&d)?;
            let dto = event_workspace(ws.agents(), &ws.dto.atoms, &out);
            Ok(Outcome::new(true, pretty(&dto) + "\n", json!({"name": out.name(), "workspace": dto})))
        }
        Command::Attention { command: AttentionCommand::Gen { kind, agents, atoms, formulas } } => {
            let ws = Workspace::empty(agents, atoms);
            let parse = |t: &str| -> anyhow::Result<Formula> {
                let sets = kind == "R";
                let opts = ParseOptions { attention_atoms: !sets, signature: None, events: None };
                Ok(parse_with(t, &opts)?)
            };
            let rev = if kind == "R" {
                Revelation::General(formulas.iter().map(|t| parse(t)).collect::<anyhow::Result<_>>()?)
            } else {
                match formulas.as_slice() {
                    [f] => Revelation::Propositional(parse(f)?),
                    [] => Revelation::Propositional(Formula::Top),
                    _ => bail!("{kind} takes a single conjunction of literals"),
                }
            };
            let d = GeneratorRegistry::default().get(kind)?.build(&rev, ws.agents())?;
            let dto = event_workspace(agents, atoms, &d);
            Ok(Outcome::new(true, pretty(&dto) + "\n", json!({"name": d.name(), "workspace": dto})))
        }
        Command::Size { workspace, name } => {
            let ws = Workspace::load(workspace)?;
            if ws.dto.models.contains_key(name) {
                let m = ws.model(name)?;
                let j = json!({"worlds": m.model.len(), "edges": m.model.edge_count()});
                return Ok(Outcome::new(true, format!("{} worlds, {} edges\n", m.model.len(), m.model.edge_count()), j));
            }
            if let Ok(d) = ws.event(name) {
                let j = json!({"kind": d.kind().as_str(), "size": d.size(), "events": d.event_ids().len(), "level": d.level()});
                return Ok(Outcome::new(
                    true,
                    format!("{} {}: size {}, {} events, level {}\n", d.kind().as_str(), d.name(), d.size(), d.event_ids().len(), d.level()),
                    j,
                ));
            }
            let f = ws.formula(name)?;
            let j = json!({"size": f.size(), "depth": f.modal_depth(), "level": f.hierarchy_level()});
            Ok(Outcome::new(
                true,
                format!("size {}, modal depth {}, level {}\n", f.size(), f.modal_depth(), f.hierarchy_level()),
                j,
            ))
        }
        Command::Sat(input) => {
            let (f, _) = parse_free(input)?;
            let f = if f.is_static() { f } else { reduce(&f)? };
            let v = k_satisfiable(&f)?;
            let witness = v.witness.as_ref().map(|w| model_workspace(&w.model.agents, &[], "witness", w));
            let text = match &witness {
                Some(w) => format!("satisfiable\n{}\n", pretty(w)),
                None => "unsatisfiable\n".to_string(),
            };
            Ok(Outcome::new(v.satisfiable, text, json!({"satisfiable": v.satisfiable, "witness": witness})))
        }
        Command::Reduce { input, simplify: s } => {
            let (f, _) = parse_free(input)?;
            let mut r = reduce(&f)?;
            if *s {
                r = simplify(&r);
            }
            Ok(Outcome::new(true, format!("{r}\n"), json!({"formula": r.to_string(), "size": r.size()})))
        }
        Command::ExportDot { workspace, name } => {
            let ws = Workspace::load(workspace)?;
            let dot = if ws.dto.models.contains_key(name) {
                model_dot(name, &ws.model(name)?)
            } else {
                event_dot(&ws.event(name)?)
            };
            Ok(Outcome::new(true, dot.clone(), json!({"dot": dot})))
        }
        Command::Battery { spec, ws } => {
            let text = std::fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
            let ws = ws.as_ref().map(|p| Workspace::load(p)).transpose()?;
            let transforms = TransformRegistry::default();
            let ctx = Context { workspace: ws.as_ref(), transforms: &transforms, seed: cli.seed };
            let reports = CaseRegistry::default().run(&text, &ctx)?;
            let ok = reports.iter().all(|r| r.passed);
            let mut out = String::new();
            let mut rows = Vec::new();
            for r in &reports {
                let status = if r.passed { "pass" } else { "FAIL" };
                out.push_str(&format!("{status} [{}] {} ({} checked)\n", r.line, r.detail, r.checked));
                if let Some(c) = &r.counterexample {
                    out.push_str(&format!("  counterexample: {c}\n"));
                }
                rows.push(json!({
                    "case": r.line, "passed": r.passed, "checked": r.checked, "detail": r.detail,
                    "counterexample": r.counterexample.as_ref().map(|c| serde_json::from_str::<Value>(c).ok()),
                }));
            }
            Ok(Outcome::new(ok, out, json!({"passed": ok, "seed": cli.seed, "cases": rows})))
        }
        Command::Principle { workspace, model, principle, universe } => {
            let ws = Workspace::load(workspace)?;
            let m = ws.model(model)?;
            let p = AttentionPrinciple::parse(principle).ok_or_else(|| anyhow!("unknown principle `{principle}`"))?;
            let universe: Vec<Formula> = match universe {
                Some(path) => std::fs::read_to_string(path)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| ws.parse(l))
                    .collect::<anyhow::Result<_>>()?,
                None => vec![],
            };
            let violations = check_principle(&m.model, &p, &universe)?;
            let ok = violations.is_empty();
            let mut text = if ok { "holds".to_string() } else { format!("{} violations", violations.len()) };
            text.push_str(&format!(" (relative to a universe of {} formulas)\n", universe.len()));
            let mut rows = Vec::new();
            for v in &violations {
                let ws_: Vec<String> = v.witnesses.iter().map(Formula::to_string).collect();
                text.push_str(&format!("  {} {}: {}\n", v.world, v.agent, ws_.join(", ")));
                rows.push(json!({"world": v.world, "agent": v.agent, "witnesses": ws_}));
            }
            Ok(Outcome::new(ok, text, json!({"holds": ok, "universe": universe.len(), "violations": rows})))
        }
    }
}
