//! JSON workspaces: agents, atoms, named models, event models and formulas.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use edgecond::attention::{build_f, build_h, build_r};
use edgecond::events::{CondEdge, Ecem, EventModel, Gau, Sem};
use edgecond::formula::{Agent, Atom, Formula};
use edgecond::models::{KripkeModel, PointedModel, Prop};
use edgecond::parse::{parse_with, EventResolver, ParseOptions, Signature};

/// How `A[a]φ` is read in workspace formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttentionSyntax {
    /// `A[a]p` is the attention atom `Att[a]p`.
    #[default]
    Atoms,
    /// `A[a]φ` is the attention modality.
    Sets,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct WorldDto {
    pub id: String,
    #[serde(default)]
    pub val: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub att: Option<BTreeMap<Agent, Vec<String>>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ModelDto {
    pub worlds: Vec<WorldDto>,
    #[serde(default)]
    pub rel: BTreeMap<Agent, Vec<(String, String)>>,
    pub point: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EdgeDto {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventDto {
    pub kind: String,
    pub events: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<Agent, Vec<EdgeDto>>,
    pub designated: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct WorkspaceDto {
    #[serde(default)]
    pub agents: Vec<Agent>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub attention: AttentionSyntax,
    #[serde(default)]
    pub models: BTreeMap<String, ModelDto>,
    #[serde(default)]
    pub events: BTreeMap<String, EventDto>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub formulas: BTreeMap<String, String>,
}

impl WorkspaceDto {
    /// Adds the other workspace's entries; names must not clash.
    pub fn merge(&mut self, other: WorkspaceDto) -> anyhow::Result<()> {
        for a in other.agents {
            if !self.agents.contains(&a) {
                self.agents.push(a);
            }
        }
        for p in other.atoms {
            if !self.atoms.contains(&p) {
                self.atoms.push(p);
            }
        }
        if other.attention == AttentionSyntax::Sets {
            self.attention = AttentionSyntax::Sets;
        }
        for (k, v) in other.models {
            if self.models.insert(k.clone(), v).is_some() {
                bail!("model `{k}` defined twice");
            }
        }
        for (k, v) in other.events {
            if self.events.insert(k.clone(), v).is_some() {
                bail!("event model `{k}` defined twice");
            }
        }
        for (k, v) in other.formulas {
            if self.formulas.insert(k.clone(), v).is_some() {
                bail!("formula `{k}` defined twice");
            }
        }
        Ok(())
    }
}

pub struct Workspace {
    pub dto: WorkspaceDto,
    signature: Signature,
    cache: RefCell<BTreeMap<String, EventModel>>,
    resolving: RefCell<BTreeSet<String>>,
    failure: RefCell<Option<String>>,
}

impl EventResolver for Workspace {
    fn resolve(&self, name: &str) -> Option<EventModel> {
        match self.event(name) {
            Ok(e) => Some(e),
            Err(err) => {
                self.failure.borrow_mut().get_or_insert(format!("{err:#}"));
                None
            }
        }
    }
}

impl Workspace {
    pub fn new(dto: WorkspaceDto) -> Self {
        let signature = Signature::new(&dto.agents, &dto.atoms);
        Workspace {
            dto,
            signature,
            cache: RefCell::new(BTreeMap::new()),
            resolving: RefCell::new(BTreeSet::new()),
            failure: RefCell::new(None),
        }
    }

    pub fn empty(agents: &[Agent], atoms: &[Atom]) -> Self {
        Workspace::new(WorkspaceDto { agents: agents.to_vec(), atoms: atoms.to_vec(), ..Default::default() })
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let ws = Workspace::new(serde_json::from_str(text)?);
        ws.check()?;
        Ok(ws)
    }

    /// A JSON file, or a directory whose `*.json` files are merged.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let mut dto = WorkspaceDto::default();
        let files: Vec<_> = if path.is_dir() {
            let mut v: Vec<_> = std::fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            v.sort();
            v
        } else {
            vec![path.to_path_buf()]
        };
        for f in files {
            let text = std::fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
            let part: WorkspaceDto =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", f.display()))?;
            dto.merge(part)?;
        }
        let ws = Workspace::new(dto);
        ws.check()?;
        Ok(ws)
    }

    /// Resolves every model, event model and formula.
    pub fn check(&self) -> anyhow::Result<()> {
        for name in self.dto.models.keys() {
            self.model(name).with_context(|| format!("model `{name}`"))?;
        }
        for name in self.dto.events.keys() {
            self.event(name).with_context(|| format!("event model `{name}`"))?;
        }
        for (name, text) in &self.dto.formulas {
            self.formula(text).with_context(|| format!("formula `{name}`"))?;
        }
        Ok(())
    }

    pub fn agents(&self) -> &[Agent] {
        &self.dto.agents
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Parses formula text, or looks up a named formula.
    pub fn formula(&self, text: &str) -> anyhow::Result<Formula> {
        if let Some(t) = self.dto.formulas.get(text) {
            return self.parse(t);
        }
        self.parse(text)
    }

    pub fn parse(&self, text: &str) -> anyhow::Result<Formula> {
        let opts = ParseOptions {
            attention_atoms: self.dto.attention == AttentionSyntax::Atoms,
            signature: Some(&self.signature),
            events: Some(self),
        };
        self.failure.borrow_mut().take();
        parse_with(text, &opts).map_err(|e| match self.failure.borrow_mut().take() {
            Some(inner) => anyhow!("{e}: {inner}"),
            None => anyhow!("{e}"),
        })
    }

    pub fn model(&self, name: &str) -> anyhow::Result<PointedModel> {
        let dto = self.dto.models.get(name).ok_or_else(|| anyhow!("unknown model `{name}`"))?;
        self.model_from(dto)
    }

    pub fn model_from(&self, dto: &ModelDto) -> anyhow::Result<PointedModel> {
        let names: Vec<&str> = dto.worlds.iter().map(|w| w.id.as_str()).collect();
        let mut m = KripkeModel::new(&self.dto.agents, &names);
        let has_att = self.dto.attention == AttentionSyntax::Sets || dto.worlds.iter().any(|w| w.att.is_some());
        if has_att {
            m = m.with_empty_attention();
        }
        let world = |w: &str| m.world_index(w).ok_or_else(|| anyhow!("unknown world `{w}`"));
        let mut edges = Vec::new();
        for (a, pairs) in &dto.rel {
            let ai = m.agent_index(a).ok_or_else(|| anyhow!("undeclared agent `{a}`"))?;
            for (w, v) in pairs {
                edges.push((ai, world(w)?, world(v)?));
            }
        }
        for (ai, w, v) in edges {
            m.add_edge(ai, w, v);
        }
        for (i, w) in dto.worlds.iter().enumerate() {
            for p in &w.val {
                m.val[i].insert(Prop::parse(p).ok_or_else(|| anyhow!("bad valuation entry `{p}`"))?);
            }
            if let Some(att) = &w.att {
                for (a, fs) in att {
                    let ai = m.agent_index(a).ok_or_else(|| anyhow!("undeclared agent `{a}`"))?;
                    for f in fs {
                        let f = self.parse(f)?;
                        m.att.as_mut().expect("attention model")[ai][i].insert(f);
                    }
                }
            }
        }
        let problems = [m.validate(), m.validate_against(&self.signature)].concat();
        if !problems.is_empty() {
            bail!("{}", problems.join("; "));
        }
        let point = m.world_index(&dto.point).ok_or_else(|| anyhow!("unknown point `{}`", dto.point))?;
        Ok(PointedModel::new(m, point))
    }

    /// Named event model. Names of the form `F[φ]`, `H[φ]` and `R[φ, ψ, ...]`
    /// that are not defined in the workspace are generated on demand.
    pub fn event(&self, name: &str) -> anyhow::Result<EventModel> {
        if let Some(e) = self.cache.borrow().get(name) {
            return Ok(e.clone());
        }
        if !self.resolving.borrow_mut().insert(name.to_string()) {
            bail!("event model `{name}` refers to itself");
        }
        let built = match self.dto.events.get(name) {
            Some(dto) => self.event_from(name, dto),
            None => self.generated(name),
        };
        self.resolving.borrow_mut().remove(name);
        let built = built?;
        self.cache.borrow_mut().insert(name.to_string(), built.clone());
        Ok(built)
    }

    fn generated(&self, name: &str) -> anyhow::Result<EventModel> {
        let inner = |k: &str| name.strip_prefix(k).and_then(|r| r.strip_suffix(']'));
        let agents = &self.dto.agents;
        if let Some(t) = inner("F[") {
            return Ok(build_f(&self.parse(t)?, agents)?.into());
        }
        if let Some(t) = inner("H[") {
            return Ok(build_h(&self.parse(t)?, agents)?.into());
        }
        if let Some(t) = inner("R[") {
            let gamma = split_top_level(t).iter().map(|s| self.parse(s)).collect::<anyhow::Result<Vec<_>>>()?;
            return Ok(build_r(&gamma, agents)?.into());
        }
        bail!("unknown event model `{name}`")
    }

    fn event_from(&self, name: &str, dto: &EventDto) -> anyhow::Result<EventModel> {
        let ids = dto.events.clone();
        let idx = |e: &str| ids.iter().position(|x| x == e).ok_or_else(|| anyhow!("unknown event `{e}`"));
        let cond = |s: &Option<String>| s.as_deref().map_or(Ok(Formula::Top), |t| self.parse(t));
        let mut pre = Vec::new();
        for e in &ids {
            pre.push(dto.pre.get(e).map_or(Ok(Formula::Top), |t| self.parse(t))?);
        }
        for k in dto.pre.keys() {
            idx(k)?;
        }
        let designated: Vec<usize> = dto.designated.iter().map(|d| idx(d)).collect::<anyhow::Result<_>>()?;
        let mut cond_edges: BTreeMap<Agent, BTreeSet<CondEdge>> = BTreeMap::new();
        for a in &self.dto.agents {
            cond_edges.insert(a.clone(), BTreeSet::new());
        }
        for (a, es) in &dto.edges {
            if !self.dto.agents.contains(a) {
                bail!("undeclared agent `{a}`");
            }
            for e in es {
                cond_edges.get_mut(a).expect("declared agent").insert(CondEdge {
                    from: idx(&e.from)?,
                    src: cond(&e.src)?,
                    to: idx(&e.to)?,
                    tgt: cond(&e.tgt)?,
                });
            }
        }
        let single = || match designated.as_slice() {
            [d] => Ok(*d),
            _ => Err(anyhow!("`{name}` must designate exactly one event")),
        };
        let model: EventModel = match dto.kind.as_str() {
            "sem" => {
                if cond_edges.values().flatten().any(|e| e.src != Formula::Top || e.tgt != Formula::Top) {
                    bail!("standard event model `{name}` has conditioned edges");
                }
                let rel = cond_edges
                    .into_iter()
                    .map(|(a, es)| (a, es.into_iter().map(|e| (e.from, e.to)).collect()))
                    .collect();
                Sem { name: name.to_string(), events: ids, pre, rel, designated: designated.into_iter().collect() }
                    .into()
            }
            "ecem" => Ecem { name: name.to_string(), events: ids, pre, edges: cond_edges, designated: single()? }.into(),
            "gau" => {
                if !dto.pre.is_empty() {
                    bail!("arrow update `{name}` has preconditions");
                }
                Gau { name: name.to_string(), outcomes: ids, arrows: cond_edges, designated: single()? }.into()
            }
            k => bail!("unknown event model kind `{k}`"),
        };
        let problems = model.validate();
        if !problems.is_empty() {
            bail!("{}", problems.join("; "));
        }
        Ok(model)
    }
}

/// Splits at commas outside brackets and parentheses.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

pub fn model_to_dto(m: &PointedModel) -> ModelDto {
    let k = &m.model;
    let worlds = (0..k.len())
        .map(|w| WorldDto {
            id: k.worlds[w].clone(),
            val: k.val[w].iter().map(Prop::to_string).collect(),
            att: k.att.as_ref().map(|att| {
                k.agents.iter().enumerate().map(|(a, name)| (name.clone(), att[a][w].iter().map(Formula::to_string).collect())).collect()
            }),
        })
        .collect();
    let rel = k
        .agents
        .iter()
        .enumerate()
        .map(|(a, name)| {
            let pairs = (0..k.len())
                .flat_map(|w| k.rel[a][w].iter().map(move |&v| (w, v)))
                .map(|(w, v)| (k.worlds[w].clone(), k.worlds[v].clone()))
                .collect();
            (name.clone(), pairs)
        })
        .collect();
    ModelDto { worlds, rel, point: m.point_name().to_string() }
}

fn edges_to_dto(ids: &[String], edges: &BTreeMap<Agent, BTreeSet<CondEdge>>) -> BTreeMap<Agent, Vec<EdgeDto>> {
    edges
        .iter()
        .map(|(a, es)| {
            let v = es
                .iter()
                .map(|e| EdgeDto {
                    from: ids[e.from].clone(),
                    to: ids[e.to].clone(),
                    src: Some(e.src.to_string()),
                    tgt: Some(e.tgt.to_string()),
                })
                .collect();
            (a.clone(), v)
        })
        .collect()
}

pub fn event_to_dto(d: &EventModel) -> EventDto {
    match d {
        EventModel::Sem(e) => EventDto {
            kind: "sem".into(),
            events: e.events.clone(),
            pre: e.events.iter().cloned().zip(e.pre.iter().map(Formula::to_string)).collect(),
            edges: e
                .rel
                .iter()
                .map(|(a, q)| {
                    let v = q
                        .iter()
                        .map(|&(x, y)| EdgeDto { from: e.events[x].clone(), to: e.events[y].clone(), src: None, tgt: None })
                        .collect();
                    (a.clone(), v)
                })
                .collect(),
            designated: e.designated.iter().map(|&x| e.events[x].clone()).collect(),
        },
        EventModel::Ecem(c) => EventDto {
            kind: "ecem".into(),
            events: c.events.clone(),
            pre: c.events.iter().cloned().zip(c.pre.iter().map(Formula::to_string)).collect(),
            edges: edges_to_dto(&c.events, &c.edges),
            designated: vec![c.events[c.designated].clone()],
        },
        EventModel::Gau(u) => EventDto {
            kind: "gau".into(),
            events: u.outcomes.clone(),
            pre: BTreeMap::new(),
            edges: edges_to_dto(&u.outcomes, &u.arrows),
            designated: vec![u.outcomes[u.designated].clone()],
        },
    }
}

/// Workspace holding `d` and every event model its conditions refer to.
pub fn event_workspace(agents: &[Agent], atoms: &[Atom], d: &EventModel) -> WorkspaceDto {
    let mut dto = WorkspaceDto { agents: agents.to_vec(), atoms: atoms.to_vec(), ..Default::default() };
    let mut todo = vec![d.clone()];
    while let Some(e) = todo.pop() {
        if dto.events.contains_key(e.name()) {
            continue;
        }
        for f in e.cond_set() {
            if f.contains_attends() {
                dto.attention = AttentionSyntax::Sets;
            }
            todo.extend(f.embedded_models());
        }
        dto.events.insert(e.name().to_string(), event_to_dto(&e));
    }
    dto
}

pub fn model_workspace(agents: &[Agent], atoms: &[Atom], name: &str, m: &PointedModel) -> WorkspaceDto {
    let mut dto = WorkspaceDto { agents: agents.to_vec(), atoms: atoms.to_vec(), ..Default::default() };
    if m.model.is_attention_model() {
        dto.attention = AttentionSyntax::Sets;
    }
    dto.models.insert(name.to_string(), model_to_dto(m));
    dto
}

#[cfg(test)]
mod tests {
    use super::*;
    use edgecond::formula::*;

    const WS: &str = r#"{
        "agents": ["a"], "atoms": ["p"],
        "models": {"m": {"worlds": [{"id": "w", "val": ["p", "Att[a]p"]}, {"id": "v"}],
                         "rel": {"a": [["w", "v"]]}, "point": "w"}},
        "events": {"c": {"kind": "ecem", "events": ["e"], "pre": {"e": "[@H[p]:p]p"},
                         "edges": {"a": [{"from": "e", "to": "e", "src": "A[a]p", "tgt": "T"}]},
                         "designated": ["e"]}}
    }"#;

    #[test]
    fn loads_and_resolves_generated_names() {
        let ws = Workspace::from_json(WS).unwrap();
        let m = ws.model("m").unwrap();
        assert_eq!(m.point_name(), "w");
        let c = ws.event("c").unwrap();
        assert_eq!(c.level(), 1);
        let e = c.as_ecem().unwrap();
        assert_eq!(e.edges["a"].iter().next().unwrap().src, att("a", "p"));
    }

    #[test]
    fn round_trip() {
        let ws = Workspace::from_json(WS).unwrap();
        let c = ws.event("c").unwrap();
        let dto = event_workspace(ws.agents(), &ws.dto.atoms, &c);
        let ws2 = Workspace::new(dto);
        assert_eq!(ws2.event("c").unwrap(), c);
        let m = ws.model("m").unwrap();
        let ws3 = Workspace::new(model_workspace(ws.agents(), &ws.dto.atoms, "m", &m));
        assert_eq!(ws3.model("m").unwrap(), m);
    }

    #[test]
    fn resolution_errors() {
        let ws = Workspace::from_json(WS).unwrap();
        assert!(ws.model("nope").is_err());
        assert!(ws.parse("[@nope]p").is_err());
        assert!(ws.parse("q").is_err());
        let cyclic = r#"{"agents": ["a"], "atoms": ["p"], "events": {"c": {"kind": "ecem", "events": ["e"],
            "pre": {"e": "[@c]p"}, "designated": ["e"]}}}"#;
        assert!(Workspace::from_json(cyclic).is_err());
    }
}
