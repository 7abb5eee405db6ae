//! Kripke models and attention models.
//!
//! Worlds are indexed; names are kept for IO and for the pair encoding of
//! product updates. A model carries attention sets exactly when it is a
//! general attention model, and then its valuation holds plain atoms only.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::formula::{Agent, Atom, Formula, LanguageTag};
use crate::parse::Signature;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    Atom(Atom),
    Att(Agent, Atom),
}

impl Prop {
    pub fn atom(p: &str) -> Self {
        Prop::Atom(p.to_string())
    }

    pub fn att(a: &str, p: &str) -> Self {
        Prop::Att(a.to_string(), p.to_string())
    }

    pub fn parse(s: &str) -> Option<Prop> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("Att[") {
            let (a, p) = rest.split_once(']')?;
            return Some(Prop::Att(a.trim().to_string(), p.trim().to_string()));
        }
        let ok = s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        ok.then(|| Prop::Atom(s.to_string()))
    }

    pub fn base_atom(&self) -> &str {
        match self {
            Prop::Atom(p) | Prop::Att(_, p) => p,
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Atom(p) => write!(f, "{p}"),
            Prop::Att(a, p) => write!(f, "Att[{a}]{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub agents: Vec<Agent>,
    pub worlds: Vec<String>,
    /// `rel[i][w]` holds the successors of `w` for `agents[i]`.
    pub rel: Vec<Vec<BTreeSet<usize>>>,
    pub val: Vec<BTreeSet<Prop>>,
    /// `att[i][w]` is the attention set of `agents[i]` at `w`.
    pub att: Option<Vec<Vec<BTreeSet<Formula>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: usize) -> Self {
        PointedModel { model, point }
    }

    pub fn point_name(&self) -> &str {
        &self.model.worlds[self.point]
    }
}

impl KripkeModel {
    /// Worlds without edges or true atoms.
    pub fn new<S: AsRef<str>>(agents: &[Agent], worlds: &[S]) -> Self {
        let n = worlds.len();
        KripkeModel {
            agents: agents.to_vec(),
            worlds: worlds.iter().map(|w| w.as_ref().to_string()).collect(),
            rel: vec![vec![BTreeSet::new(); n]; agents.len()],
            val: vec![BTreeSet::new(); n],
            att: None,
        }
    }

    /// Turn into a general attention model with empty attention sets.
    pub fn with_empty_attention(mut self) -> Self {
        self.att = Some(vec![vec![BTreeSet::new(); self.worlds.len()]; self.agents.len()]);
        self
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn is_attention_model(&self) -> bool {
        self.att.is_some()
    }

    pub fn agent_index(&self, a: &str) -> Option<usize> {
        self.agents.iter().position(|x| x == a)
    }

    pub fn world_index(&self, w: &str) -> Option<usize> {
        self.worlds.iter().position(|x| x == w)
    }

    pub fn add_edge(&mut self, a: usize, w: usize, v: usize) {
        self.rel[a][w].insert(v);
    }

    pub fn edge(&self, a: usize, w: usize, v: usize) -> bool {
        self.rel[a][w].contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.rel.iter().flatten().map(BTreeSet::len).sum()
    }

    pub fn attention(&self, a: usize, w: usize) -> Option<&BTreeSet<Formula>> {
        self.att.as_ref().map(|att| &att[a][w])
    }

    pub fn props(&self) -> BTreeSet<Prop> {
        self.val.iter().flatten().cloned().collect()
    }

    /// Structural problems, one message per violation.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.worlds.len();
        if n == 0 {
            out.push("model has no worlds".to_string());
        }
        let mut seen = BTreeSet::new();
        for w in &self.worlds {
            if !seen.insert(w) {
                out.push(format!("duplicate world id {w}"));
            }
        }
        if self.val.len() != n {
            out.push("valuation does not cover every world".to_string());
        }
        if self.rel.len() != self.agents.len() {
            out.push("relation table does not match the agent list".to_string());
        }
        for (i, rows) in self.rel.iter().enumerate() {
            let a = self.agents.get(i).map(String::as_str).unwrap_or("?");
            if rows.len() != n {
                out.push(format!("relation of {a} does not cover every world"));
            }
            for (w, succ) in rows.iter().enumerate() {
                for &v in succ {
                    if v >= n {
                        out.push(format!("{a}-edge from world {w} to undeclared world {v}"));
                    }
                }
            }
        }
        for (w, props) in self.val.iter().enumerate() {
            for p in props {
                if let Prop::Att(a, _) = p {
                    if self.att.is_some() {
                        out.push(format!(
                            "world {}: attention atom {p} in the valuation of an attention model",
                            self.worlds[w]
                        ));
                    } else if self.agent_index(a).is_none() {
                        out.push(format!("world {}: attention atom for undeclared agent {a}", self.worlds[w]));
                    }
                }
            }
        }
        if let Some(att) = &self.att {
            if att.len() != self.agents.len() {
                out.push("attention function does not cover every agent".to_string());
            }
            for (i, rows) in att.iter().enumerate() {
                let a = self.agents.get(i).map(String::as_str).unwrap_or("?");
                if rows.len() != n {
                    out.push(format!("attention of {a} is missing for some world"));
                }
                for (w, set) in rows.iter().enumerate() {
                    for f in set {
                        if let Err(e) = LanguageTag::GA.check(f) {
                            out.push(format!(
                                "attention set of {a} at world {}: {f}: {e}",
                                self.worlds.get(w).map(String::as_str).unwrap_or("?")
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// Also reports atoms and agents missing from a signature.
    pub fn validate_against(&self, sig: &Signature) -> Vec<String> {
        let mut out = self.validate();
        for a in &self.agents {
            if !sig.agents.contains(a) {
                out.push(format!("undeclared agent {a}"));
            }
        }
        for p in self.props() {
            if !sig.atoms.contains(p.base_atom()) {
                out.push(format!("undeclared atom in {p}"));
            }
        }
        out
    }

    /// Worlds reachable from `start` through any agent's relation, in BFS order.
    pub fn reachable(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(w) = queue.pop_front() {
            order.push(w);
            for rows in &self.rel {
                for &v in &rows[w] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        order
    }

    /// Restriction to the given worlds, keeping their relative order.
    pub fn restrict(&self, keep: &[usize]) -> (KripkeModel, BTreeMap<usize, usize>) {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let rel = self
            .rel
            .iter()
            .map(|rows| {
                keep.iter()
                    .map(|&w| rows[w].iter().filter_map(|v| index.get(v).copied()).collect())
                    .collect()
            })
            .collect();
        let att = self
            .att
            .as_ref()
            .map(|att| att.iter().map(|rows| keep.iter().map(|&w| rows[w].clone()).collect()).collect());
        let m = KripkeModel {
            agents: self.agents.clone(),
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            rel,
            val: keep.iter().map(|&w| self.val[w].clone()).collect(),
            att,
        };
        (m, index)
    }
}

/// Submodel generated by the point.
pub fn generated_submodel(m: &PointedModel) -> PointedModel {
    let keep = m.model.reachable(m.point);
    let (model, index) = m.model.restrict(&keep);
    PointedModel { model, point: index[&m.point] }
}
