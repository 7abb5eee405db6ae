//! Standard event models, edge-conditioned event models and generalized
//! arrow updates.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Agent, Formula};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sem {
    pub name: String,
    pub events: Vec<String>,
    pub pre: Vec<Formula>,
    pub rel: BTreeMap<Agent, BTreeSet<(usize, usize)>>,
    pub designated: BTreeSet<usize>,
}

/// `(from : src, to : tgt)`; for arrow updates `from` is the outcome whose
/// arrow set holds the triple `(src, to, tgt)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CondEdge {
    pub from: usize,
    pub src: Formula,
    pub to: usize,
    pub tgt: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ecem {
    pub name: String,
    pub events: Vec<String>,
    pub pre: Vec<Formula>,
    pub edges: BTreeMap<Agent, BTreeSet<CondEdge>>,
    pub designated: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gau {
    pub name: String,
    pub outcomes: Vec<String>,
    pub arrows: BTreeMap<Agent, BTreeSet<CondEdge>>,
    pub designated: usize,
}

fn index_of(ids: &[String], id: &str) -> Result<usize> {
    ids.iter()
        .position(|e| e == id)
        .ok_or_else(|| Error::Unknown { kind: "event", name: id.to_string() })
}

fn max_level<'a>(conds: impl IntoIterator<Item = &'a Formula>) -> usize {
    conds.into_iter().map(Formula::hierarchy_level).max().unwrap_or(0)
}

fn edge_cost(edges: &BTreeMap<Agent, BTreeSet<CondEdge>>) -> usize {
    edges
        .values()
        .flat_map(|q| q.iter())
        .map(|e| 1 + e.src.size() + e.tgt.size())
        .sum()
}

impl Sem {
    pub fn index(&self, id: &str) -> Result<usize> {
        index_of(&self.events, id)
    }

    pub fn is_pointed(&self) -> bool {
        self.designated.len() == 1
    }

    /// |E| + Σ_a |Q_a| + Σ_e |pre(e)|.
    pub fn size(&self) -> usize {
        self.events.len()
            + self.rel.values().map(BTreeSet::len).sum::<usize>()
            + self.pre.iter().map(Formula::size).sum::<usize>()
    }

    pub fn cond_set(&self) -> BTreeSet<&Formula> {
        self.pre.iter().collect()
    }

    pub fn level(&self) -> usize {
        max_level(self.pre.iter())
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.events.len();
        if n == 0 {
            out.push(format!("event model {}: no events", self.name));
        }
        if self.pre.len() != n {
            out.push(format!("event model {}: precondition count differs from event count", self.name));
        }
        if self.designated.is_empty() {
            out.push(format!("event model {}: nothing designated", self.name));
        }
        if self.designated.iter().any(|&d| d >= n) {
            out.push(format!("event model {}: designated event out of range", self.name));
        }
        for (a, q) in &self.rel {
            if q.iter().any(|&(e, f)| e >= n || f >= n) {
                out.push(format!("event model {}: {a}-edge references an undeclared event", self.name));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.events {
            if !seen.insert(e) {
                out.push(format!("event model {}: duplicate event id {e}", self.name));
            }
        }
        out
    }
}

impl Ecem {
    pub fn index(&self, id: &str) -> Result<usize> {
        index_of(&self.events, id)
    }

    /// |E| + Σ_a (|Q_a| + Σ (|φ|+|ψ|)) + Σ_e |pre(e)|.
    pub fn size(&self) -> usize {
        self.events.len() + edge_cost(&self.edges) + self.pre.iter().map(Formula::size).sum::<usize>()
    }

    pub fn cond_set(&self) -> BTreeSet<&Formula> {
        let mut out: BTreeSet<&Formula> = self.pre.iter().collect();
        for e in self.edges.values().flatten() {
            out.insert(&e.src);
            out.insert(&e.tgt);
        }
        out
    }

    pub fn level(&self) -> usize {
        max_level(self.cond_set())
    }

    pub fn edges_of(&self, a: &str) -> impl Iterator<Item = &CondEdge> {
        self.edges.get(a).into_iter().flatten()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.events.len();
        if n == 0 {
            out.push(format!("event model {}: no events", self.name));
        }
        if self.pre.len() != n {
            out.push(format!("event model {}: precondition count differs from event count", self.name));
        }
        if self.designated >= n {
            out.push(format!("event model {}: designated event out of range", self.name));
        }
        for (a, q) in &self.edges {
            if q.iter().any(|e| e.from >= n || e.to >= n) {
                out.push(format!("event model {}: {a}-edge references an undeclared event", self.name));
            }
        }
        out
    }
}

impl Gau {
    pub fn index(&self, id: &str) -> Result<usize> {
        index_of(&self.outcomes, id)
    }

    /// |O| + Σ_{a,o} (|𝖺_a(o)| + Σ (|φ|+|ψ|)).
    pub fn size(&self) -> usize {
        self.outcomes.len() + edge_cost(&self.arrows)
    }

    pub fn cond_set(&self) -> BTreeSet<&Formula> {
        let mut out = BTreeSet::new();
        for e in self.arrows.values().flatten() {
            out.insert(&e.src);
            out.insert(&e.tgt);
        }
        out
    }

    pub fn level(&self) -> usize {
        max_level(self.cond_set())
    }

    pub fn arrows_of(&self, a: &str) -> impl Iterator<Item = &CondEdge> {
        self.arrows.get(a).into_iter().flatten()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.outcomes.len();
        if n == 0 {
            out.push(format!("arrow update {}: no outcomes", self.name));
        }
        if self.designated >= n {
            out.push(format!("arrow update {}: designated outcome out of range", self.name));
        }
        for (a, q) in &self.arrows {
            if q.iter().any(|e| e.from >= n || e.to >= n) {
                out.push(format!("arrow update {}: {a}-arrow references an undeclared outcome", self.name));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Sem,
    Ecem,
    Gau,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Sem => "sem",
            Kind::Ecem => "ecem",
            Kind::Gau => "gau",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventModel {
    Sem(Arc<Sem>),
    Ecem(Arc<Ecem>),
    Gau(Arc<Gau>),
}

impl EventModel {
    pub fn kind(&self) -> Kind {
        match self {
            EventModel::Sem(_) => Kind::Sem,
            EventModel::Ecem(_) => Kind::Ecem,
            EventModel::Gau(_) => Kind::Gau,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            EventModel::Sem(e) => &e.name,
            EventModel::Ecem(c) => &c.name,
            EventModel::Gau(u) => &u.name,
        }
    }

    pub fn event_ids(&self) -> &[String] {
        match self {
            EventModel::Sem(e) => &e.events,
            EventModel::Ecem(c) => &c.events,
            EventModel::Gau(u) => &u.outcomes,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            EventModel::Sem(e) => e.size(),
            EventModel::Ecem(c) => c.size(),
            EventModel::Gau(u) => u.size(),
        }
    }

    pub fn cond_set(&self) -> BTreeSet<Formula> {
        match self {
            EventModel::Sem(e) => e.cond_set().into_iter().cloned().collect(),
            EventModel::Ecem(c) => c.cond_set().into_iter().cloned().collect(),
            EventModel::Gau(u) => u.cond_set().into_iter().cloned().collect(),
        }
    }

    pub fn level(&self) -> usize {
        match self {
            EventModel::Sem(e) => e.level(),
            EventModel::Ecem(c) => c.level(),
            EventModel::Gau(u) => u.level(),
        }
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let keys: Vec<&Agent> = match self {
            EventModel::Sem(e) => e.rel.keys().collect(),
            EventModel::Ecem(c) => c.edges.keys().collect(),
            EventModel::Gau(u) => u.arrows.keys().collect(),
        };
        let mut out: BTreeSet<Agent> = keys.into_iter().cloned().collect();
        for f in self.cond_set() {
            out.extend(f.agents());
        }
        out
    }

    pub fn validate(&self) -> Vec<String> {
        match self {
            EventModel::Sem(e) => e.validate(),
            EventModel::Ecem(c) => c.validate(),
            EventModel::Gau(u) => u.validate(),
        }
    }

    /// Same model pointed at a single event.
    pub fn with_point(&self, id: &str) -> Result<EventModel> {
        Ok(match self {
            EventModel::Sem(e) => {
                let i = e.index(id)?;
                let mut e2 = (**e).clone();
                e2.designated = BTreeSet::from([i]);
                EventModel::Sem(Arc::new(e2))
            }
            EventModel::Ecem(c) => {
                let i = c.index(id)?;
                let mut c2 = (**c).clone();
                c2.designated = i;
                EventModel::Ecem(Arc::new(c2))
            }
            EventModel::Gau(u) => {
                let i = u.index(id)?;
                let mut u2 = (**u).clone();
                u2.designated = i;
                EventModel::Gau(Arc::new(u2))
            }
        })
    }

    pub fn as_sem(&self) -> Option<&Arc<Sem>> {
        match self {
            EventModel::Sem(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_ecem(&self) -> Option<&Arc<Ecem>> {
        match self {
            EventModel::Ecem(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_gau(&self) -> Option<&Arc<Gau>> {
        match self {
            EventModel::Gau(u) => Some(u),
            _ => None,
        }
    }
}

impl From<Sem> for EventModel {
    fn from(e: Sem) -> Self {
        EventModel::Sem(Arc::new(e))
    }
}

impl From<Ecem> for EventModel {
    fn from(c: Ecem) -> Self {
        EventModel::Ecem(Arc::new(c))
    }
}

impl From<Gau> for EventModel {
    fn from(u: Gau) -> Self {
        EventModel::Gau(Arc::new(u))
    }
}

/// Single ⊤ event with a ⊤/⊤ loop for each agent.
pub fn trivial_ecem(agents: &[Agent]) -> Ecem {
    Ecem {
        name: "trivial".into(),
        events: vec!["e".into()],
        pre: vec![Formula::Top],
        edges: agents
            .iter()
            .map(|a| {
                let e = CondEdge { from: 0, src: Formula::Top, to: 0, tgt: Formula::Top };
                (a.clone(), BTreeSet::from([e]))
            })
            .collect(),
        designated: 0,
    }
}

pub fn trivial_sem(agents: &[Agent]) -> Sem {
    Sem {
        name: "trivial".into(),
        events: vec!["e".into()],
        pre: vec![Formula::Top],
        rel: agents.iter().map(|a| (a.clone(), BTreeSet::from([(0, 0)]))).collect(),
        designated: BTreeSet::from([0]),
    }
}

pub fn trivial_gau(agents: &[Agent]) -> Gau {
    let t = trivial_ecem(agents);
    Gau { name: "trivial".into(), outcomes: vec!["o".into()], arrows: t.edges, designated: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag(v: &[&str]) -> Vec<Agent> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sizes_of_small_models() {
        let mut e = trivial_sem(&[]);
        assert_eq!(e.size(), 2);
        e.events.push("f".into());
        e.pre.push(Formula::Top);
        e.rel.insert("a".into(), BTreeSet::from([(0, 1)]));
        assert_eq!(e.size(), 5);
        assert_eq!(trivial_ecem(&ag(&["a"])).size(), 5);
        assert_eq!(trivial_gau(&ag(&["a"])).size(), 4);
        let mut u = trivial_gau(&ag(&["a"]));
        u.arrows.clear();
        assert_eq!(u.size(), 1);
    }

    #[test]
    fn conditions() {
        assert_eq!(trivial_sem(&ag(&["a"])).cond_set().len(), 1);
        let mut u = trivial_gau(&ag(&["a"]));
        u.arrows.clear();
        assert!(u.cond_set().is_empty());
    }
}
