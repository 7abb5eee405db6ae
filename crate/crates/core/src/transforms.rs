//! Translations between the three event-model formalisms.
//!
//! * `t1`   standard → edge-conditioned, every edge gets ⊤/⊤ conditions;
//! * `t1p`  edge-conditioned → standard, events split by the maximal
//!   consistent sign assignments over their edge conditions;
//! * `t1pp` arrow update → edge-conditioned, outcomes become ⊤ events.
//!
//! Each comes with a formula companion (`t2`, `t2p`, `t2pp`) that rewrites
//! the modalities of its source kind everywhere, including inside the
//! conditions of other models. Arguments of attention modalities are never
//! rewritten since attention is matched syntactically.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::events::{CondEdge, Ecem, EventModel, Gau, Kind, Sem};
use crate::formula::{and, conj, imp, not, Formula};
use crate::models::KripkeModel;
use crate::sat::reduce;
use crate::semantics::{eval, pair_name, Product};
use crate::tableau::consistent;

fn map_children(f: &Formula, g: &mut dyn FnMut(&Formula) -> Result<Formula>) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) | Formula::Attends(..) => f.clone(),
        Formula::Not(x) => not(g(x)?),
        Formula::And(l, r) => and(g(l)?, g(r)?),
        Formula::Believes(a, x) => Formula::Believes(a.clone(), Box::new(g(x)?)),
        _ => unreachable!("dynamic modalities are handled by the caller"),
    })
}

fn map_sem(e: &Sem, g: &mut dyn FnMut(&Formula) -> Result<Formula>) -> Result<Sem> {
    let mut out = e.clone();
    for p in &mut out.pre {
        *p = g(p)?;
    }
    Ok(out)
}

fn map_edges(
    edges: &BTreeMap<String, BTreeSet<CondEdge>>,
    g: &mut dyn FnMut(&Formula) -> Result<Formula>,
) -> Result<BTreeMap<String, BTreeSet<CondEdge>>> {
    let mut out = BTreeMap::new();
    for (a, q) in edges {
        let mut set = BTreeSet::new();
        for e in q {
            set.insert(CondEdge { from: e.from, src: g(&e.src)?, to: e.to, tgt: g(&e.tgt)? });
        }
        out.insert(a.clone(), set);
    }
    Ok(out)
}

fn map_ecem(c: &Ecem, g: &mut dyn FnMut(&Formula) -> Result<Formula>) -> Result<Ecem> {
    let mut out = c.clone();
    for p in &mut out.pre {
        *p = g(p)?;
    }
    out.edges = map_edges(&c.edges, g)?;
    Ok(out)
}

fn map_gau(u: &Gau, g: &mut dyn FnMut(&Formula) -> Result<Formula>) -> Result<Gau> {
    let mut out = u.clone();
    out.arrows = map_edges(&u.arrows, g)?;
    Ok(out)
}

/// Standard event model to edge-conditioned event model. A multi-pointed
/// input is pointed at its first designated event.
pub fn t1(e: &Sem) -> Ecem {
    let pre = e.pre.iter().map(t2).collect();
    let edges = e
        .rel
        .iter()
        .map(|(a, q)| {
            let set = q
                .iter()
                .map(|&(x, y)| CondEdge { from: x, src: Formula::Top, to: y, tgt: Formula::Top })
                .collect();
            (a.clone(), set)
        })
        .collect();
    Ecem {
        name: format!("t1({})", e.name),
        events: e.events.clone(),
        pre,
        edges,
        designated: *e.designated.iter().next().expect("designated event"),
    }
}

pub fn t2(f: &Formula) -> Formula {
    fn go(f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::DynSem(e, g) => {
                let c = t1(e);
                let body = go(g)?;
                let at = |d: usize| {
                    let mut c2 = c.clone();
                    c2.designated = d;
                    Formula::DynEcm(Arc::new(c2), Box::new(body.clone()))
                };
                if e.is_pointed() {
                    at(c.designated)
                } else {
                    conj(e.designated.iter().map(|&d| {
                        let others = e.designated.iter().filter(|&&x| x != d).map(|&x| not(c.pre[x].clone()));
                        imp(and(c.pre[d].clone(), conj(others)), at(d))
                    }))
                }
            }
            Formula::DynEcm(c, g) => Formula::DynEcm(Arc::new(map_ecem(c, &mut go)?), Box::new(go(g)?)),
            Formula::DynGau(u, g) => Formula::DynGau(Arc::new(map_gau(u, &mut go)?), Box::new(go(g)?)),
            _ => map_children(f, &mut go)?,
        })
    }
    go(f).expect("t2 is total")
}

/// Φ(e), Φ'(e) and mc(e) for one event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiConditions {
    pub phi: Vec<Formula>,
    pub phi_prime: Vec<Formula>,
    pub mc: Vec<MaximalConsistentSet>,
}

/// A consistent sign assignment over Φ(e); `signed[i]` is the sign of `phi[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MaximalConsistentSet {
    pub signed: Vec<(Formula, bool)>,
    pub conjunction: Formula,
}

impl MaximalConsistentSet {
    fn new(signed: Vec<(Formula, bool)>) -> Self {
        let conjunction = conj(signed.iter().map(|(f, s)| if *s { f.clone() } else { not(f.clone()) }));
        MaximalConsistentSet { signed, conjunction }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.signed.iter().any(|(g, s)| *s && g == f)
    }
}

/// Source conditions of edges out of `e` and target conditions of edges
/// into `e`, deduplicated syntactically and sorted.
pub fn phi_set(c: &Ecem, e: usize) -> Vec<Formula> {
    let mut out = BTreeSet::new();
    for q in c.edges.values().flatten() {
        if q.from == e {
            out.insert(q.src.clone());
        }
        if q.to == e {
            out.insert(q.tgt.clone());
        }
    }
    out.into_iter().collect()
}

pub fn phi_conditions(c: &Ecem, e: usize) -> Result<PhiConditions> {
    let phi = phi_set(c, e);
    let reduced: Vec<Formula> = phi.iter().map(reduce).collect::<Result<_>>()?;
    let k = phi.len();
    if k > 20 {
        return Err(Error::Invalid(format!("event {} has {k} distinct conditions", c.events[e])));
    }
    let mut mc = Vec::new();
    for bits in 0..(1usize << k) {
        // Bit set means the negated condition, so the all-positive set comes first.
        let signs: Vec<bool> = (0..k).map(|i| bits & (1 << (k - 1 - i)) == 0).collect();
        let literal: Vec<Formula> = reduced
            .iter()
            .zip(&signs)
            .map(|(f, &s)| if s { f.clone() } else { not(f.clone()) })
            .collect();
        if consistent(&literal)? {
            mc.push(MaximalConsistentSet::new(phi.iter().cloned().zip(signs).collect()));
        }
    }
    let phi_prime = phi.iter().cloned().chain(phi.iter().map(|f| not(f.clone()))).collect();
    Ok(PhiConditions { phi, phi_prime, mc })
}

pub fn t1p_event_name(event: &str, gamma: &Formula) -> String {
    format!("({event},{gamma})")
}

/// Output of [`t1p`] together with the split of every source event.
#[derive(Clone, Debug)]
pub struct T1pResult {
    pub sem: Sem,
    /// `(source event, mc entry)` for each output event.
    pub origin: Vec<(usize, MaximalConsistentSet)>,
    pub phi: Vec<PhiConditions>,
}

/// Edge-conditioned event model to standard event model. The designated
/// event `e` becomes the designated set {(e,Γ) : Γ ∈ mc(e)}; exactly one of
/// them applies wherever pre(e) holds.
pub fn t1p_full(c: &Ecem) -> Result<T1pResult> {
    let phi: Vec<PhiConditions> = (0..c.events.len()).map(|e| phi_conditions(c, e)).collect::<Result<_>>()?;
    let mut events = Vec::new();
    let mut pre = Vec::new();
    let mut origin = Vec::new();
    let mut first = vec![0; c.events.len()];
    for (e, pc) in phi.iter().enumerate() {
        first[e] = events.len();
        for g in &pc.mc {
            events.push(t1p_event_name(&c.events[e], &g.conjunction));
            pre.push(t2p(&and(c.pre[e].clone(), g.conjunction.clone()))?);
            origin.push((e, g.clone()));
        }
    }
    let mut rel: BTreeMap<String, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (a, q) in &c.edges {
        let set = rel.entry(a.clone()).or_default();
        for edge in q {
            for (i, g) in phi[edge.from].mc.iter().enumerate() {
                if !g.contains(&edge.src) {
                    continue;
                }
                for (j, h) in phi[edge.to].mc.iter().enumerate() {
                    if h.contains(&edge.tgt) {
                        set.insert((first[edge.from] + i, first[edge.to] + j));
                    }
                }
            }
        }
    }
    let d = c.designated;
    let designated = (0..phi[d].mc.len()).map(|i| first[d] + i).collect();
    let sem = Sem { name: format!("t1p({})", c.name), events, pre, rel, designated };
    Ok(T1pResult { sem, origin, phi })
}

pub fn t1p(c: &Ecem) -> Result<Sem> {
    Ok(t1p_full(c)?.sem)
}

pub fn t2p(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::DynEcm(c, g) => Formula::DynSem(Arc::new(t1p(c)?), Box::new(t2p(g)?)),
        Formula::DynSem(e, g) => Formula::DynSem(Arc::new(map_sem(e, &mut t2p)?), Box::new(t2p(g)?)),
        Formula::DynGau(u, g) => Formula::DynGau(Arc::new(map_gau(u, &mut t2p)?), Box::new(t2p(g)?)),
        _ => map_children(f, &mut t2p)?,
    })
}

/// Arrow update to edge-conditioned event model.
pub fn t1pp(u: &Gau) -> Ecem {
    let mut go = |f: &Formula| Ok(t2pp(f));
    Ecem {
        name: format!("t1pp({})", u.name),
        events: u.outcomes.clone(),
        pre: vec![Formula::Top; u.outcomes.len()],
        edges: map_edges(&u.arrows, &mut go).expect("t2pp is total"),
        designated: u.designated,
    }
}

pub fn t2pp(f: &Formula) -> Formula {
    fn go(f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::DynGau(u, g) => Formula::DynEcm(Arc::new(t1pp(u)), Box::new(go(g)?)),
            Formula::DynSem(e, g) => Formula::DynSem(Arc::new(map_sem(e, &mut go)?), Box::new(go(g)?)),
            Formula::DynEcm(c, g) => Formula::DynEcm(Arc::new(map_ecem(c, &mut go)?), Box::new(go(g)?)),
            _ => map_children(f, &mut go)?,
        })
    }
    go(f).expect("t2pp is total")
}

/// A translation between event-model kinds, selectable by name.
pub trait Transform: Send + Sync {
    fn name(&self) -> &str;
    fn source(&self) -> Kind;
    fn target(&self) -> Kind;
    fn apply(&self, d: &EventModel) -> Result<EventModel>;

    /// Proposed isomorphism from the worlds of `M⊗d` to those of `M⊗apply(d)`.
    /// The default matches product worlds by name.
    fn candidate_map(
        &self,
        _m: &KripkeModel,
        _d: &EventModel,
        src: &Product,
        dst: &Product,
    ) -> Result<Vec<Option<usize>>> {
        Ok(src.model.worlds.iter().map(|w| dst.model.world_index(w)).collect())
    }
}

fn wrong_kind(t: &dyn Transform, d: &EventModel) -> Error {
    Error::Invalid(format!(
        "transform {} expects a {} model, got {}",
        t.name(),
        t.source().as_str(),
        d.kind().as_str()
    ))
}

pub struct SemToEcem;
pub struct EcemToSem;
pub struct GauToEcem;

impl Transform for SemToEcem {
    fn name(&self) -> &str {
        "t1"
    }
    fn source(&self) -> Kind {
        Kind::Sem
    }
    fn target(&self) -> Kind {
        Kind::Ecem
    }
    fn apply(&self, d: &EventModel) -> Result<EventModel> {
        let e = d.as_sem().ok_or_else(|| wrong_kind(self, d))?;
        if !e.is_pointed() {
            return Err(Error::Invalid(format!(
                "{} is multi-pointed; edge-conditioned event models are pointed",
                e.name
            )));
        }
        Ok(t1(e).into())
    }
}

impl Transform for EcemToSem {
    fn name(&self) -> &str {
        "t1p"
    }
    fn source(&self) -> Kind {
        Kind::Ecem
    }
    fn target(&self) -> Kind {
        Kind::Sem
    }
    fn apply(&self, d: &EventModel) -> Result<EventModel> {
        let c = d.as_ecem().ok_or_else(|| wrong_kind(self, d))?;
        Ok(t1p(c)?.into())
    }

    /// f(w,e) = (w,(e,Γ_(w,e))) with Γ_(w,e) the conditions of Φ(e) true at w.
    fn candidate_map(
        &self,
        m: &KripkeModel,
        d: &EventModel,
        src: &Product,
        dst: &Product,
    ) -> Result<Vec<Option<usize>>> {
        let c = d.as_ecem().ok_or_else(|| wrong_kind(self, d))?;
        let mut truth: BTreeMap<Formula, Vec<bool>> = BTreeMap::new();
        let mut out = Vec::new();
        for &(w, e) in &src.pairs {
            let mut signed = Vec::new();
            for f in phi_set(c, e) {
                if !truth.contains_key(&f) {
                    truth.insert(f.clone(), eval(m, &f)?);
                }
                let s = truth[&f][w];
                signed.push((f, s));
            }
            let gamma = MaximalConsistentSet::new(signed);
            let name = pair_name(&m.worlds[w], &t1p_event_name(&c.events[e], &gamma.conjunction));
            out.push(dst.model.world_index(&name));
        }
        Ok(out)
    }
}

impl Transform for GauToEcem {
    fn name(&self) -> &str {
        "t1pp"
    }
    fn source(&self) -> Kind {
        Kind::Gau
    }
    fn target(&self) -> Kind {
        Kind::Ecem
    }
    fn apply(&self, d: &EventModel) -> Result<EventModel> {
        let u = d.as_gau().ok_or_else(|| wrong_kind(self, d))?;
        Ok(t1pp(u).into())
    }
}

/// Name-indexed collection of transforms.
pub struct TransformRegistry {
    entries: BTreeMap<String, Box<dyn Transform>>,
}

impl Default for TransformRegistry {
    fn default() -> Self {
        let mut r = TransformRegistry::empty();
        r.register(Box::new(SemToEcem));
        r.register(Box::new(EcemToSem));
        r.register(Box::new(GauToEcem));
        r
    }
}

impl TransformRegistry {
    pub fn empty() -> Self {
        TransformRegistry { entries: BTreeMap::new() }
    }

    /// Registers `t`, replacing any transform of the same name.
    pub fn register(&mut self, t: Box<dyn Transform>) {
        self.entries.insert(t.name().to_string(), t);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Transform> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown { kind: "transform", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    /// The transform taking `from` models to `to` models, if any.
    pub fn between(&self, from: Kind, to: Kind) -> Option<&dyn Transform> {
        self.entries.values().map(|b| b.as_ref()).find(|t| t.source() == from && t.target() == to)
    }
}
