//! Seeded property batteries.
//!
//! A spec file holds one case per line, `kind key=value ...`; blank lines
//! and `#` comments are ignored. Case kinds are looked up in a
//! [`CaseRegistry`], transforms in a [`TransformRegistry`].

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context as _};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use edgecond::attention::{build_r, check_principle, AttentionPrinciple};
use edgecond::equivalence::{
    bisimilar, coarsest_partition, isomorphic_via, update_equivalence_battery, validate_bisimulation,
    BatteryParams, BatteryVerdict,
};
use edgecond::events::{EventModel, Kind};
use edgecond::formula::{atom, attends, bel, iff, not, top, Formula};
use edgecond::models::{KripkeModel, PointedModel};
use edgecond::random::{
    enforce_introspection, random_ecem, random_formula, random_gau, random_model, random_sem, AttentionLeaves,
    AttentionMode, EventParams, FormulaParams, ModelParams,
};
use edgecond::sat::{axiom_rhs, k_satisfiable, reduce};
use edgecond::semantics::{applicable_event, product, satisfies};
use edgecond::transforms::TransformRegistry;

use crate::workspace::{model_to_dto, Workspace};

/// `key=value` arguments of one case line.
#[derive(Clone, Debug, Default)]
pub struct Args {
    map: BTreeMap<String, String>,
}

impl Args {
    pub fn parse(words: &[&str]) -> anyhow::Result<Self> {
        let mut map = BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| anyhow!("expected key=value, got `{w}`"))?;
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Args { map })
    }

    pub fn str(&self, k: &str) -> Option<&str> {
        self.map.get(k).map(String::as_str)
    }

    pub fn usize(&self, k: &str, default: usize) -> anyhow::Result<usize> {
        self.map.get(k).map_or(Ok(default), |v| v.parse().with_context(|| format!("`{k}`")))
    }

    pub fn f64(&self, k: &str, default: f64) -> anyhow::Result<f64> {
        self.map.get(k).map_or(Ok(default), |v| v.parse().with_context(|| format!("`{k}`")))
    }

    pub fn list(&self, k: &str, default: &[&str]) -> Vec<String> {
        match self.map.get(k) {
            Some(v) => v.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            None => default.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub struct Context<'a> {
    pub workspace: Option<&'a Workspace>,
    pub transforms: &'a TransformRegistry,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub line: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
    /// JSON of the first failing pointed model.
    pub counterexample: Option<String>,
}

impl CaseReport {
    fn pass(checked: usize, detail: impl Into<String>) -> Self {
        CaseReport { line: String::new(), passed: true, checked, detail: detail.into(), counterexample: None }
    }

    fn fail(checked: usize, detail: impl Into<String>, m: Option<&PointedModel>) -> Self {
        CaseReport {
            line: String::new(),
            passed: false,
            checked,
            detail: detail.into(),
            counterexample: m.map(|m| serde_json::to_string(&model_to_dto(m)).expect("serializable")),
        }
    }
}

pub trait BatteryCase: Send + Sync {
    fn name(&self) -> &str;
    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport>;
}

pub struct CaseRegistry {
    entries: BTreeMap<String, Box<dyn BatteryCase>>,
}

impl Default for CaseRegistry {
    fn default() -> Self {
        let mut r = CaseRegistry { entries: BTreeMap::new() };
        r.register(Box::new(EquivalenceCase));
        r.register(Box::new(TransformCase));
        r.register(Box::new(ReductionCase));
        r.register(Box::new(TableauCase));
        r.register(Box::new(IntrospectionCase));
        r.register(Box::new(BisimulationCase));
        r
    }
}

impl CaseRegistry {
    pub fn register(&mut self, c: Box<dyn BatteryCase>) {
        self.entries.insert(c.name().to_string(), c);
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn run(&self, spec: &str, ctx: &Context<'_>) -> anyhow::Result<Vec<CaseReport>> {
        let mut out = Vec::new();
        for (n, line) in spec.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let case = self.entries.get(words[0]).ok_or_else(|| anyhow!("line {}: unknown case `{}`", n + 1, words[0]))?;
            let args = Args::parse(&words[1..]).with_context(|| format!("line {}", n + 1))?;
            let mut report = case.run(&args, ctx).with_context(|| format!("line {}", n + 1))?;
            report.line = line.to_string();
            out.push(report);
        }
        Ok(out)
    }
}

fn rng(args: &Args, ctx: &Context<'_>) -> anyhow::Result<ChaCha8Rng> {
    Ok(ChaCha8Rng::seed_from_u64(ctx.seed ^ args.usize("seed", 0)? as u64))
}

fn model_params(args: &Args) -> anyhow::Result<ModelParams> {
    let agents = args.list("agents", &["a", "b"]);
    let atoms = args.list("atoms", &["p", "q"]);
    let a: Vec<&str> = agents.iter().map(String::as_str).collect();
    let p: Vec<&str> = atoms.iter().map(String::as_str).collect();
    let mut mp = ModelParams::new(&a, &p, args.usize("worlds", 5)?);
    mp.edge_prob = args.f64("edge_prob", 0.4)?;
    if args.str("attention").unwrap_or("atoms") == "atoms" {
        mp.attention = AttentionMode::Atoms;
    }
    Ok(mp)
}

fn formula_params(args: &Args, depth: usize) -> anyhow::Result<FormulaParams> {
    let agents = args.list("agents", &["a", "b"]);
    let atoms = args.list("atoms", &["p", "q"]);
    let a: Vec<&str> = agents.iter().map(String::as_str).collect();
    let p: Vec<&str> = atoms.iter().map(String::as_str).collect();
    let mut fp = FormulaParams::new(&a, &p, depth);
    fp.size = args.usize("size", 4)?;
    if args.str("attention").unwrap_or("atoms") == "atoms" {
        fp.attention = AttentionLeaves::Atoms;
    }
    Ok(fp)
}

fn pool(args: &Args, ctx: &Context<'_>) -> anyhow::Result<Vec<Formula>> {
    let Some(text) = args.str("pool") else { return Ok(vec![]) };
    let agents = args.list("agents", &["a", "b"]);
    let atoms = args.list("atoms", &["p", "q"]);
    let fallback;
    let ws = match ctx.workspace {
        Some(ws) => ws,
        None => {
            fallback = Workspace::empty(&agents, &atoms);
            &fallback
        }
    };
    text.split(';').map(|t| ws.parse(t)).collect()
}

/// `equivalence d1=NAME d2=NAME count=N` over workspace event models.
pub struct EquivalenceCase;

impl BatteryCase for EquivalenceCase {
    fn name(&self) -> &str {
        "equivalence"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let ws = ctx.workspace.ok_or_else(|| anyhow!("equivalence needs a workspace"))?;
        let d1 = ws.event(args.str("d1").ok_or_else(|| anyhow!("missing d1"))?)?;
        let d2 = ws.event(args.str("d2").ok_or_else(|| anyhow!("missing d2"))?)?;
        let params = BatteryParams {
            count: args.usize("count", 200)?,
            model: model_params(args)?,
            seed: ctx.seed ^ args.usize("seed", 0)? as u64,
        };
        let expect_equivalent = args.str("expect").unwrap_or("equivalent") == "equivalent";
        Ok(match update_equivalence_battery(&d1, &d2, &params)? {
            BatteryVerdict::NoCounterexample { samples } if expect_equivalent => {
                CaseReport::pass(samples, "no counterexample")
            }
            BatteryVerdict::NoCounterexample { samples } => {
                CaseReport::fail(samples, "expected a counterexample, found none", None)
            }
            BatteryVerdict::Counterexample { model, reason } if expect_equivalent => {
                CaseReport::fail(0, reason, Some(&model))
            }
            BatteryVerdict::Counterexample { reason, .. } => CaseReport::pass(1, format!("counterexample: {reason}")),
        })
    }
}

/// `transform via=NAME sources=N models=M [size_factor=K]`: random source
/// event models, isomorphism of updates through the transform's candidate map.
pub struct TransformCase;

impl BatteryCase for TransformCase {
    fn name(&self) -> &str {
        "transform"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let t = ctx.transforms.get(args.str("via").ok_or_else(|| anyhow!("missing via"))?)?;
        let mut rng = rng(args, ctx)?;
        let mp = model_params(args)?;
        let ep = EventParams::new(formula_params(args, args.usize("depth", 1)?)?, args.usize("events", 3)?)
            .with_pool(pool(args, ctx)?);
        let factor = args.usize("size_factor", 0)?;
        let (sources, models) = (args.usize("sources", 20)?, args.usize("models", 20)?);
        let mut checked = 0;
        for i in 0..sources {
            let d: EventModel = match t.source() {
                Kind::Sem => random_sem(&mut rng, &ep, &format!("e{i}")).into(),
                Kind::Ecem => random_ecem(&mut rng, &ep, &format!("c{i}")).into(),
                Kind::Gau => random_gau(&mut rng, &ep, &format!("u{i}")).into(),
            };
            let d2 = t.apply(&d)?;
            if factor > 0 && d2.size() > factor * d.size() {
                return Ok(CaseReport::fail(
                    checked,
                    format!("size {} exceeds {factor}·{} for {}", d2.size(), d.size(), d.name()),
                    None,
                ));
            }
            for _ in 0..models {
                let m = random_model(&mut rng, &mp);
                if let Some(reason) = transform_mismatch(t, &m, &d, &d2)? {
                    return Ok(CaseReport::fail(checked, format!("{}: {reason}", d.name()), Some(&m)));
                }
                checked += 1;
            }
        }
        Ok(CaseReport::pass(checked, "isomorphic via candidate map"))
    }
}

/// Why `M⊗d` and `M⊗d2` fail to be isomorphic via the transform's map, if
/// they do; applicability must also agree and the points must correspond.
pub fn transform_mismatch(
    t: &dyn edgecond::transforms::Transform,
    m: &PointedModel,
    d: &EventModel,
    d2: &EventModel,
) -> anyhow::Result<Option<String>> {
    let (p1, p2) = (product(&m.model, d)?, product(&m.model, d2)?);
    let f = t.candidate_map(&m.model, d, &p1, &p2)?;
    let Some(w) = isomorphic_via(&p1.model, &p2.model, &f)? else {
        return Ok(Some("candidate map is not an isomorphism".into()));
    };
    let (e1, e2) = (applicable_event(m, d)?, applicable_event(m, d2)?);
    Ok(match (e1, e2) {
        (None, None) => None,
        (Some(x), Some(y)) => {
            (w.bijection[p1.index[&(m.point, x)]] != p2.index[&(m.point, y)]).then(|| "points do not correspond".into())
        }
        _ => Some("applicability differs".into()),
    })
}

/// `reduction shape=top|atom|not|and|bel count=N`: the reduction axiom of
/// the given shape and full reduction agree with the semantics.
pub struct ReductionCase;

impl BatteryCase for ReductionCase {
    fn name(&self) -> &str {
        "reduction"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let mut rng = rng(args, ctx)?;
        let mp = model_params(args)?;
        let fp = formula_params(args, args.usize("depth", 2)?)?;
        let ep = EventParams::new(formula_params(args, 1)?, args.usize("events", 3)?);
        let shape = args.str("shape").unwrap_or("bel");
        let count = args.usize("count", 500)?;
        for i in 0..count {
            let m = random_model(&mut rng, &mp);
            let c = std::sync::Arc::new(random_ecem(&mut rng, &ep, "c"));
            let psi = shaped(&mut rng, &fp, shape)?;
            let lhs = Formula::DynEcm(c.clone(), Box::new(psi.clone()));
            let rhs = axiom_rhs(&c, &psi).ok_or_else(|| anyhow!("no axiom for {psi}"))?;
            if !satisfies(&m, &iff(lhs.clone(), rhs))? {
                return Ok(CaseReport::fail(i, format!("axiom fails for {psi}"), Some(&m)));
            }
            if satisfies(&m, &lhs)? != satisfies(&m, &reduce(&lhs)?)? {
                return Ok(CaseReport::fail(i, format!("reduction changes the value of {lhs}"), Some(&m)));
            }
        }
        Ok(CaseReport::pass(count, format!("shape {shape}")))
    }
}

/// A random formula of modal depth at most `fp.depth` with the given top
/// connective.
pub fn shaped<R: Rng>(rng: &mut R, fp: &FormulaParams, shape: &str) -> anyhow::Result<Formula> {
    let sub = |rng: &mut R, d: usize| {
        let mut p = fp.clone();
        p.depth = d;
        random_formula(rng, &p)
    };
    Ok(match shape {
        "top" => top(),
        "atom" => match (&fp.attention, rng.gen_range(0..3)) {
            (AttentionLeaves::Atoms, 0) => {
                Formula::AttAtom(fp.agents.choose(rng).unwrap().clone(), fp.atoms.choose(rng).unwrap().clone())
            }
            _ => atom(fp.atoms.choose(rng).unwrap()),
        },
        "not" => not(sub(rng, fp.depth)),
        "and" => edgecond::formula::and(sub(rng, fp.depth), sub(rng, fp.depth)),
        "bel" => bel(fp.agents.choose(rng).unwrap(), sub(rng, fp.depth.saturating_sub(1))),
        s => bail!("unknown shape `{s}`"),
    })
}

/// `tableau count=N depth=D`: every satisfiable verdict has a witness that
/// satisfies the formula.
pub struct TableauCase;

impl BatteryCase for TableauCase {
    fn name(&self) -> &str {
        "tableau"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let mut rng = rng(args, ctx)?;
        let fp = formula_params(args, args.usize("depth", 2)?)?;
        let count = args.usize("count", 1000)?;
        let mut sat = 0;
        for i in 0..count {
            let f = random_formula(&mut rng, &fp);
            let v = k_satisfiable(&f)?;
            if v.satisfiable {
                sat += 1;
                let w = v.witness.ok_or_else(|| anyhow!("satisfiable without witness"))?;
                if !satisfies(&w, &f)? {
                    return Ok(CaseReport::fail(i, format!("witness fails {f}"), Some(&w)));
                }
            }
        }
        Ok(CaseReport::pass(count, format!("{sat} satisfiable")))
    }
}

/// `introspection count=N gamma=K`: revelations preserve attention
/// introspection.
pub struct IntrospectionCase;

impl BatteryCase for IntrospectionCase {
    fn name(&self) -> &str {
        "introspection"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let mut rng = rng(args, ctx)?;
        let mut fp = formula_params(args, 1)?;
        fp.attention = AttentionLeaves::None;
        fp.size = 2;
        let count = args.usize("count", 100)?;
        let max_gamma = args.usize("gamma", 2)?;
        for i in 0..count {
            let mut gamma: Vec<Formula> = Vec::new();
            let k = rng.gen_range(0..=max_gamma);
            while gamma.len() < k {
                let f = random_formula(&mut rng, &fp);
                if !gamma.contains(&f) {
                    gamma.push(f);
                }
            }
            let mut universe = gamma.clone();
            universe.push(atom(&fp.atoms[0]));
            universe.push(attends(&fp.agents[0], atom(&fp.atoms[0])));
            let mp = ModelParams { attention: AttentionMode::Sets(universe), ..model_params(args)? };
            let mut m = random_model(&mut rng, &mp);
            enforce_introspection(&mut m.model);
            let r: EventModel = build_r(&gamma, &fp.agents)?.into();
            let out = product(&m.model, &r)?.model;
            let v = check_principle(&out, &AttentionPrinciple::AttentionIntrospection, &[])?;
            if !v.is_empty() {
                return Ok(CaseReport::fail(i, format!("{} violations after {}", v.len(), r.name()), Some(&m)));
            }
        }
        Ok(CaseReport::pass(count, "introspection preserved"))
    }
}

/// A copy of `m` with every world doubled; bisimilar to `m`.
pub fn doubled(m: &PointedModel) -> PointedModel {
    let k = &m.model;
    let n = k.len();
    let names: Vec<String> = (0..2 * n).map(|i| format!("{}{}", k.worlds[i % n], if i < n { "" } else { "'" })).collect();
    let mut out = KripkeModel::new(&k.agents, &names);
    out.val = (0..2 * n).map(|i| k.val[i % n].clone()).collect();
    out.att = k.att.as_ref().map(|att| att.iter().map(|rows| (0..2 * n).map(|i| rows[i % n].clone()).collect()).collect());
    for a in 0..k.agents.len() {
        for x in 0..2 * n {
            for &v in &k.rel[a][x % n] {
                // Originals see originals, copies see both.
                out.add_edge(a, x, v);
                if x >= n {
                    out.add_edge(a, x, v + n);
                }
            }
        }
    }
    PointedModel::new(out, m.point + n)
}

/// `bisimulation count=N formulas=K`: witnesses validate, and bisimilar
/// points agree on sampled formulas.
pub struct BisimulationCase;

impl BatteryCase for BisimulationCase {
    fn name(&self) -> &str {
        "bisimulation"
    }

    fn run(&self, args: &Args, ctx: &Context<'_>) -> anyhow::Result<CaseReport> {
        let mut rng = rng(args, ctx)?;
        let mp = model_params(args)?;
        let fp = formula_params(args, 2)?;
        let count = args.usize("count", 200)?;
        let per = args.usize("formulas", 20)?;
        let mut linked = 0;
        for i in 0..count {
            let m1 = random_model(&mut rng, &mp);
            let m2 = if rng.gen_bool(0.5) { doubled(&m1) } else { random_model(&mut rng, &mp) };
            let block = coarsest_partition(&m1.model, &m2.model)?;
            let n1 = m1.model.len();
            let mut full = std::collections::BTreeSet::new();
            for w in 0..n1 {
                for v in 0..m2.model.len() {
                    if block[w] == block[n1 + v] {
                        full.insert((w, v));
                    }
                }
            }
            let problems = validate_bisimulation(&m1.model, &m2.model, &full)?;
            if !problems.is_empty() {
                return Ok(CaseReport::fail(i, problems.join("; "), Some(&m1)));
            }
            if bisimilar(&m1, &m2)?.is_some() {
                linked += 1;
                for _ in 0..per {
                    let f = random_formula(&mut rng, &fp);
                    if satisfies(&m1, &f)? != satisfies(&m2, &f)? {
                        return Ok(CaseReport::fail(i, format!("bisimilar points disagree on {f}"), Some(&m1)));
                    }
                }
            }
        }
        Ok(CaseReport::pass(count, format!("{linked} bisimilar pairs")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(reg: &TransformRegistry) -> Context<'_> {
        Context { workspace: None, transforms: reg, seed: 1 }
    }

    #[test]
    fn empty_spec_passes() {
        let reg = TransformRegistry::default();
        assert!(CaseRegistry::default().run("# nothing\n\n", &ctx(&reg)).unwrap().is_empty());
    }

    #[test]
    fn small_cases_pass() {
        let reg = TransformRegistry::default();
        let spec = "transform via=t1 sources=3 models=3 size_factor=3\n\
                    transform via=t1pp sources=3 models=3 size_factor=2\n\
                    reduction shape=bel count=20\n\
                    tableau count=20\n\
                    introspection count=5\n\
                    bisimulation count=5 formulas=3\n";
        let reports = CaseRegistry::default().run(spec, &ctx(&reg)).unwrap();
        assert_eq!(reports.len(), 6);
        for r in reports {
            assert!(r.passed, "{}: {}", r.line, r.detail);
        }
    }

    #[test]
    fn unknown_case_is_an_error() {
        let reg = TransformRegistry::default();
        assert!(CaseRegistry::default().run("frobnicate", &ctx(&reg)).is_err());
    }
}
