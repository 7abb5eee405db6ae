//! Attention event models and attention principles.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::events::{CondEdge, Ecem, EventModel, Sem};
use crate::formula::{
    as_literal_conjunction, att, attends, canonicalize_literal_conjunction, conj, not, Agent, Formula, Literal,
};
use crate::models::KripkeModel;

/// Sorted, duplicate-free literals of a revealed conjunction.
pub fn revealed_literals(phi: &Formula) -> Result<Vec<Literal>> {
    let lits = as_literal_conjunction(phi)
        .ok_or_else(|| Error::Invalid(format!("{phi} is not a conjunction of literals")))?;
    canonicalize_literal_conjunction(&lits)?;
    let mut lits = lits;
    lits.sort();
    lits.dedup();
    Ok(lits)
}

fn subset<T: Clone>(items: &[T], mask: usize) -> Vec<T> {
    items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| x.clone()).collect()
}

fn lit_conj(lits: &[Literal]) -> Formula {
    conj(lits.iter().map(Literal::to_formula))
}

/// Multi-pointed standard event model for propositional attention.
pub fn build_f(phi: &Formula, agents: &[Agent]) -> Result<Sem> {
    let lits = revealed_literals(phi)?;
    let n = lits.len();
    let full = (1usize << n) - 1;
    // S and one X_a ⊆ S per agent.
    let mut profiles: Vec<(usize, Vec<usize>)> = Vec::new();
    for s in 0..=full {
        let mut xs: Vec<Vec<usize>> = vec![vec![]];
        for _ in agents {
            let mut next = Vec::new();
            for prefix in &xs {
                for x in (0..=s).filter(|x| x & !s == 0) {
                    let mut v = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            xs = next;
        }
        profiles.extend(xs.into_iter().map(|x| (s, x)));
    }
    let mut events = Vec::new();
    let mut pre = Vec::new();
    for (s, xs) in &profiles {
        let mut parts: Vec<Formula> = subset(&lits, *s).iter().map(Literal::to_formula).collect();
        for (a, &x) in agents.iter().zip(xs) {
            for (i, l) in lits.iter().enumerate() {
                if x & (1 << i) != 0 {
                    parts.push(att(a, &l.atom));
                }
            }
            for (i, l) in lits.iter().enumerate() {
                if s & (1 << i) != 0 && x & (1 << i) == 0 {
                    parts.push(not(att(a, &l.atom)));
                }
            }
        }
        let f = conj(parts);
        events.push(f.to_string());
        pre.push(f);
    }
    let mut rel = BTreeMap::new();
    for (ai, a) in agents.iter().enumerate() {
        let mut q = BTreeSet::new();
        for (e, (_, xe)) in profiles.iter().enumerate() {
            for (f, (sf, xf)) in profiles.iter().enumerate() {
                let ok = (0..n).all(|p| {
                    let bit = 1 << p;
                    if xe[ai] & bit != 0 {
                        // Attentiveness
                        xf[ai] & bit != 0 && sf & bit != 0
                    } else {
                        // Inertia
                        sf & bit == 0
                    }
                });
                if ok {
                    q.insert((e, f));
                }
            }
        }
        rel.insert(a.clone(), q);
    }
    let designated = profiles.iter().enumerate().filter(|(_, (s, _))| *s == full).map(|(i, _)| i).collect();
    Ok(Sem { name: format!("F[{phi}]"), events, pre, rel, designated })
}

/// Edge-conditioned event model for propositional attention, pointed at φ.
pub fn build_h(phi: &Formula, agents: &[Agent]) -> Result<Ecem> {
    let lits = revealed_literals(phi)?;
    let n = lits.len();
    let full = (1usize << n) - 1;
    let events: Vec<Formula> = (0..=full).map(|s| lit_conj(&subset(&lits, s))).collect();
    let mut edges = BTreeMap::new();
    for a in agents {
        let mut q = BTreeSet::new();
        for s in 0..=full {
            for t in (0..=s).rev().filter(|t| t & !s == 0) {
                let attended: Vec<Formula> = subset(&lits, t).iter().map(|l| att(a, &l.atom)).collect();
                let ignored = subset(&lits, s & !t).into_iter().map(|l| not(att(a, &l.atom)));
                let src = conj(attended.iter().cloned().chain(ignored));
                q.insert(CondEdge { from: s, src, to: t, tgt: conj(attended) });
            }
        }
        edges.insert(a.clone(), q);
    }
    Ok(Ecem {
        name: format!("H[{phi}]"),
        events: events.iter().map(Formula::to_string).collect(),
        pre: events,
        edges,
        designated: full,
    })
}

/// Sorted revelation; duplicates are rejected.
pub fn canonical_revelation(gamma: &[Formula]) -> Result<Vec<Formula>> {
    let mut g = gamma.to_vec();
    g.sort();
    for w in g.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Invalid(format!("{} is revealed twice", w[0])));
        }
    }
    Ok(g)
}

/// Event model for general attention, pointed at ⋀Γ. Events are the
/// formulas ⋀S themselves, so subsets with equal conjunctions share an event.
pub fn build_r(gamma: &[Formula], agents: &[Agent]) -> Result<Ecem> {
    let g = canonical_revelation(gamma)?;
    let n = g.len();
    if n > 12 {
        return Err(Error::Invalid(format!("revelation of {n} formulas is too large")));
    }
    let full = (1usize << n) - 1;
    let mut events: Vec<Formula> = Vec::new();
    let mut index: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut id_of = |f: Formula, events: &mut Vec<Formula>| -> usize {
        *index.entry(f.clone()).or_insert_with(|| {
            events.push(f);
            events.len() - 1
        })
    };
    let ids: Vec<usize> = (0..=full).map(|s| id_of(conj(subset(&g, s)), &mut events)).collect();
    let mut edges = BTreeMap::new();
    for a in agents {
        let mut q = BTreeSet::new();
        for s in 0..=full {
            for t in (0..=s).rev().filter(|t| t & !s == 0) {
                let attended: Vec<Formula> = subset(&g, t).into_iter().map(|f| attends(a, f)).collect();
                let ignored = subset(&g, s & !t).into_iter().map(|f| not(attends(a, f)));
                let src = conj(attended.iter().cloned().chain(ignored));
                q.insert(CondEdge { from: ids[s], src, to: ids[t], tgt: conj(attended) });
            }
        }
        edges.insert(a.clone(), q);
    }
    Ok(Ecem {
        name: format!("R[{}]", g.iter().map(Formula::to_string).collect::<Vec<_>>().join(", ")),
        events: events.iter().map(Formula::to_string).collect(),
        pre: events,
        edges,
        designated: ids[full],
    })
}

/// What is revealed: a literal conjunction or a set of formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Revelation {
    Propositional(Formula),
    General(Vec<Formula>),
}

/// Builds an attention event model from a revelation.
pub trait AttentionGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn build(&self, rev: &Revelation, agents: &[Agent]) -> Result<EventModel>;
}

fn propositional(rev: &Revelation) -> Result<&Formula> {
    match rev {
        Revelation::Propositional(f) => Ok(f),
        Revelation::General(_) => Err(Error::Invalid("expected a conjunction of literals".into())),
    }
}

pub struct FGenerator;
pub struct HGenerator;
pub struct RGenerator;

impl AttentionGenerator for FGenerator {
    fn name(&self) -> &str {
        "F"
    }
    fn build(&self, rev: &Revelation, agents: &[Agent]) -> Result<EventModel> {
        Ok(build_f(propositional(rev)?, agents)?.into())
    }
}

impl AttentionGenerator for HGenerator {
    fn name(&self) -> &str {
        "H"
    }
    fn build(&self, rev: &Revelation, agents: &[Agent]) -> Result<EventModel> {
        Ok(build_h(propositional(rev)?, agents)?.into())
    }
}

impl AttentionGenerator for RGenerator {
    fn name(&self) -> &str {
        "R"
    }
    fn build(&self, rev: &Revelation, agents: &[Agent]) -> Result<EventModel> {
        let gamma = match rev {
            Revelation::General(g) => g.clone(),
            Revelation::Propositional(f) => vec![f.clone()],
        };
        Ok(build_r(&gamma, agents)?.into())
    }
}

pub struct GeneratorRegistry {
    entries: BTreeMap<String, Box<dyn AttentionGenerator>>,
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        let mut r = GeneratorRegistry { entries: BTreeMap::new() };
        r.register(Box::new(FGenerator));
        r.register(Box::new(HGenerator));
        r.register(Box::new(RGenerator));
        r
    }
}

impl GeneratorRegistry {
    pub fn register(&mut self, g: Box<dyn AttentionGenerator>) {
        self.entries.insert(g.name().to_string(), g);
    }

    pub fn get(&self, name: &str) -> Result<&dyn AttentionGenerator> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown { kind: "attention generator", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttentionPrinciple {
    ConjunctiveClosure,
    Commutativity,
    SublanguageClosure,
    SubformulaClosure,
    Ignoring { subject: Agent, ignored: Agent },
    AttendingTo { subject: Agent, attended: Agent },
    AttentionIntrospection,
}

impl AttentionPrinciple {
    /// `conjunctive`, `commutativity`, `sublanguage`, `subformula`,
    /// `introspection`, `ignoring:a:b`, `attending:a:b`.
    pub fn parse(s: &str) -> Option<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        Some(match parts.as_slice() {
            ["conjunctive"] => AttentionPrinciple::ConjunctiveClosure,
            ["commutativity"] => AttentionPrinciple::Commutativity,
            ["sublanguage"] => AttentionPrinciple::SublanguageClosure,
            ["subformula"] => AttentionPrinciple::SubformulaClosure,
            ["introspection"] => AttentionPrinciple::AttentionIntrospection,
            ["ignoring", a, b] => AttentionPrinciple::Ignoring { subject: a.to_string(), ignored: b.to_string() },
            ["attending", a, b] => {
                AttentionPrinciple::AttendingTo { subject: a.to_string(), attended: b.to_string() }
            }
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub world: String,
    pub agent: Agent,
    pub witnesses: Vec<Formula>,
}

/// Violations of `p`. Closure principles only quantify over `universe` and
/// the attention sets themselves.
pub fn check_principle(
    m: &KripkeModel,
    p: &AttentionPrinciple,
    universe: &[Formula],
) -> Result<Vec<Violation>> {
    let att = m.att.as_ref().ok_or_else(|| Error::Regime("principles need attention sets".into()))?;
    let mut out = Vec::new();
    let mut push = |w: usize, a: usize, witnesses: Vec<Formula>| {
        out.push(Violation { world: m.worlds[w].clone(), agent: m.agents[a].clone(), witnesses });
    };
    for (ai, rows) in att.iter().enumerate() {
        for (w, set) in rows.iter().enumerate() {
            let candidates: BTreeSet<&Formula> = universe.iter().chain(set.iter()).collect();
            match p {
                AttentionPrinciple::ConjunctiveClosure => {
                    for f in &candidates {
                        if let Formula::And(l, r) = f {
                            if set.contains(*f) != (set.contains(l.as_ref()) && set.contains(r.as_ref())) {
                                push(w, ai, vec![(*f).clone()]);
                            }
                        }
                    }
                }
                AttentionPrinciple::Commutativity => {
                    for f in &candidates {
                        if let Formula::And(l, r) = f {
                            let swapped = Formula::And(r.clone(), l.clone());
                            if set.contains(*f) != set.contains(&swapped) {
                                push(w, ai, vec![(*f).clone(), swapped]);
                            }
                        }
                    }
                }
                AttentionPrinciple::SublanguageClosure => {
                    for f in set {
                        let atoms = f.atoms();
                        for g in universe {
                            if g.atoms().is_subset(&atoms) && !set.contains(g) {
                                push(w, ai, vec![f.clone(), g.clone()]);
                            }
                        }
                    }
                }
                AttentionPrinciple::SubformulaClosure => {
                    for f in set {
                        for g in f.subformulas() {
                            if universe.contains(g) && !set.contains(g) {
                                push(w, ai, vec![f.clone(), g.clone()]);
                            }
                        }
                    }
                }
                AttentionPrinciple::Ignoring { subject, ignored } => {
                    if &m.agents[ai] == subject {
                        let bad: Vec<Formula> = set
                            .iter()
                            .filter(|f| matches!(f, Formula::Believes(b, _) if b == ignored))
                            .cloned()
                            .collect();
                        if !bad.is_empty() {
                            push(w, ai, bad);
                        }
                    }
                }
                AttentionPrinciple::AttendingTo { subject, attended } => {
                    if &m.agents[ai] == subject {
                        let missing: Vec<Formula> = universe
                            .iter()
                            .filter(|f| matches!(f, Formula::Believes(b, _) if b == attended))
                            .filter(|f| !set.contains(*f))
                            .cloned()
                            .collect();
                        if !missing.is_empty() {
                            push(w, ai, missing);
                        }
                    }
                }
                AttentionPrinciple::AttentionIntrospection => {
                    let diff: BTreeSet<Formula> =
                        m.rel[ai][w].iter().flat_map(|&v| set.symmetric_difference(&rows[v]).cloned()).collect();
                    if !diff.is_empty() {
                        push(w, ai, diff.into_iter().collect());
                    }
                }
            }
        }
    }
    Ok(out)
}
