//! Truth of formulas and product updates.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::events::{CondEdge, Ecem, EventModel, Gau, Sem};
use crate::formula::{Agent, Formula};
use crate::models::{KripkeModel, PointedModel, Prop};

pub fn pair_name(w: &str, e: &str) -> String {
    format!("({w},{e})")
}

/// Truth value of `f` at every world of `m`.
pub fn eval(m: &KripkeModel, f: &Formula) -> Result<Vec<bool>> {
    let n = m.len();
    Ok(match f {
        Formula::Top => vec![true; n],
        Formula::Atom(p) => {
            let prop = Prop::Atom(p.clone());
            m.val.iter().map(|v| v.contains(&prop)).collect()
        }
        Formula::AttAtom(a, p) => {
            if m.is_attention_model() {
                return Err(Error::Regime(format!(
                    "attention atom Att[{a}]{p} evaluated on a general attention model"
                )));
            }
            let prop = Prop::Att(a.clone(), p.clone());
            m.val.iter().map(|v| v.contains(&prop)).collect()
        }
        Formula::Not(g) => eval(m, g)?.into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => {
            let l = eval(m, l)?;
            let r = eval(m, r)?;
            l.into_iter().zip(r).map(|(x, y)| x && y).collect()
        }
        Formula::Believes(a, g) => {
            let t = eval(m, g)?;
            match m.agent_index(a) {
                Some(i) => m.rel[i].iter().map(|succ| succ.iter().all(|&v| t[v])).collect(),
                None => return Err(Error::Unknown { kind: "agent", name: a.clone() }),
            }
        }
        Formula::Attends(a, g) => {
            let i = m.agent_index(a).ok_or_else(|| Error::Unknown { kind: "agent", name: a.clone() })?;
            match &m.att {
                Some(att) => att[i].iter().map(|set| set.contains(g.as_ref())).collect(),
                None => {
                    return Err(Error::Regime(format!(
                        "attention modality A[{a}]{g} evaluated on a model without attention sets"
                    )))
                }
            }
        }
        Formula::DynSem(e, g) => {
            let p = product_sem(m, e)?;
            let t = eval(&p.model, g)?;
            let pres = eval_all(m, &e.pre)?;
            (0..n)
                .map(|w| {
                    let holding: Vec<usize> =
                        e.designated.iter().copied().filter(|&d| pres[d][w]).collect();
                    match holding.as_slice() {
                        [d] => t[p.index[&(w, *d)]],
                        _ => true,
                    }
                })
                .collect()
        }
        Formula::DynEcm(c, g) => {
            let p = product_ecem(m, c)?;
            let t = eval(&p.model, g)?;
            (0..n)
                .map(|w| p.index.get(&(w, c.designated)).map_or(true, |&i| t[i]))
                .collect()
        }
        Formula::DynGau(u, g) => {
            let p = product_gau(m, u)?;
            let t = eval(&p.model, g)?;
            (0..n).map(|w| t[p.index[&(w, u.designated)]]).collect()
        }
    })
}

fn eval_all(m: &KripkeModel, fs: &[Formula]) -> Result<Vec<Vec<bool>>> {
    fs.iter().map(|f| eval(m, f)).collect()
}

pub fn satisfies(m: &PointedModel, f: &Formula) -> Result<bool> {
    Ok(eval(&m.model, f)?[m.point])
}

/// Full product update, independent of designation.
#[derive(Clone, Debug)]
pub struct Product {
    pub model: KripkeModel,
    /// Source world and event of each product world.
    pub pairs: Vec<(usize, usize)>,
    pub index: BTreeMap<(usize, usize), usize>,
}

fn product_worlds(
    m: &KripkeModel,
    event_ids: &[String],
    keep: impl Fn(usize, usize) -> bool,
) -> (KripkeModel, Vec<(usize, usize)>, BTreeMap<(usize, usize), usize>) {
    let mut pairs = Vec::new();
    for w in 0..m.len() {
        for e in 0..event_ids.len() {
            if keep(w, e) {
                pairs.push((w, e));
            }
        }
    }
    let index: BTreeMap<_, _> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let names: Vec<String> =
        pairs.iter().map(|&(w, e)| pair_name(&m.worlds[w], &event_ids[e])).collect();
    let mut out = KripkeModel::new(&m.agents, &names);
    out.val = pairs.iter().map(|&(w, _)| m.val[w].clone()).collect();
    out.att = m
        .att
        .as_ref()
        .map(|att| att.iter().map(|rows| pairs.iter().map(|&(w, _)| rows[w].clone()).collect()).collect());
    (out, pairs, index)
}

fn reject_attention_sets(m: &KripkeModel, what: &str) -> Result<()> {
    if m.is_attention_model() {
        Err(Error::Regime(format!("{what} updates are defined for Kripke models without attention sets")))
    } else {
        Ok(())
    }
}

pub fn product_sem(m: &KripkeModel, e: &Sem) -> Result<Product> {
    reject_attention_sets(m, "standard event model")?;
    let pres = eval_all(m, &e.pre)?;
    let (mut out, pairs, index) = product_worlds(m, &e.events, |w, ev| pres[ev][w]);
    for (i, a) in m.agents.iter().enumerate() {
        let Some(q) = e.rel.get(a) else { continue };
        let mut succ = vec![Vec::new(); e.events.len()];
        for &(x, y) in q {
            succ[x].push(y);
        }
        for (k, &(w, ev)) in pairs.iter().enumerate() {
            for &v in &m.rel[i][w] {
                for &f in &succ[ev] {
                    if let Some(&j) = index.get(&(v, f)) {
                        out.rel[i][k].insert(j);
                    }
                }
            }
        }
    }
    Ok(Product { model: out, pairs, index })
}

fn add_conditioned_edges(
    m: &KripkeModel,
    out: &mut KripkeModel,
    pairs: &[(usize, usize)],
    index: &BTreeMap<(usize, usize), usize>,
    edges: &BTreeMap<Agent, BTreeSet<CondEdge>>,
) -> Result<()> {
    let mut cache: BTreeMap<&Formula, Vec<bool>> = BTreeMap::new();
    for q in edges.values() {
        for ce in q {
            for f in [&ce.src, &ce.tgt] {
                if !cache.contains_key(f) {
                    cache.insert(f, eval(m, f)?);
                }
            }
        }
    }
    for (i, a) in m.agents.iter().enumerate() {
        let Some(q) = edges.get(a) else { continue };
        for ce in q {
            let src = &cache[&ce.src];
            let tgt = &cache[&ce.tgt];
            for (k, &(w, e)) in pairs.iter().enumerate() {
                if e != ce.from || !src[w] {
                    continue;
                }
                for &v in &m.rel[i][w] {
                    if !tgt[v] {
                        continue;
                    }
                    if let Some(&j) = index.get(&(v, ce.to)) {
                        out.rel[i][k].insert(j);
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn product_ecem(m: &KripkeModel, c: &Ecem) -> Result<Product> {
    let pres = eval_all(m, &c.pre)?;
    let (mut out, pairs, index) = product_worlds(m, &c.events, |w, e| pres[e][w]);
    add_conditioned_edges(m, &mut out, &pairs, &index, &c.edges)?;
    Ok(Product { model: out, pairs, index })
}

pub fn product_gau(m: &KripkeModel, u: &Gau) -> Result<Product> {
    reject_attention_sets(m, "arrow")?;
    let (mut out, pairs, index) = product_worlds(m, &u.outcomes, |_, _| true);
    add_conditioned_edges(m, &mut out, &pairs, &index, &u.arrows)?;
    Ok(Product { model: out, pairs, index })
}

pub fn product(m: &KripkeModel, d: &EventModel) -> Result<Product> {
    match d {
        EventModel::Sem(e) => product_sem(m, e),
        EventModel::Ecem(c) => product_ecem(m, c),
        EventModel::Gau(u) => product_gau(m, u),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateResult {
    Applied(PointedModel),
    Inapplicable,
}

impl UpdateResult {
    pub fn applicable(&self) -> bool {
        matches!(self, UpdateResult::Applied(_))
    }

    pub fn model(&self) -> Option<&PointedModel> {
        match self {
            UpdateResult::Applied(m) => Some(m),
            UpdateResult::Inapplicable => None,
        }
    }
}

/// The designated event that applies at the point, if the model is applicable.
pub fn applicable_event(m: &PointedModel, d: &EventModel) -> Result<Option<usize>> {
    Ok(match d {
        EventModel::Sem(e) => {
            let mut holding = Vec::new();
            for &x in &e.designated {
                if satisfies(m, &e.pre[x])? {
                    holding.push(x);
                }
            }
            (holding.len() == 1).then(|| holding[0])
        }
        EventModel::Ecem(c) => satisfies(m, &c.pre[c.designated])?.then_some(c.designated),
        EventModel::Gau(u) => Some(u.designated),
    })
}

pub fn update(m: &PointedModel, d: &EventModel) -> Result<UpdateResult> {
    let p = product(&m.model, d)?;
    Ok(match applicable_event(m, d)? {
        Some(e) => UpdateResult::Applied(PointedModel::new(p.model, p.index[&(m.point, e)])),
        None => UpdateResult::Inapplicable,
    })
}

pub fn update_sem(m: &PointedModel, e: &Sem) -> Result<UpdateResult> {
    update(m, &EventModel::Sem(std::sync::Arc::new(e.clone())))
}

pub fn update_ecem(m: &PointedModel, c: &Ecem) -> Result<UpdateResult> {
    update(m, &EventModel::Ecem(std::sync::Arc::new(c.clone())))
}

pub fn update_gau(m: &PointedModel, u: &Gau) -> Result<UpdateResult> {
    update(m, &EventModel::Gau(std::sync::Arc::new(u.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{trivial_ecem, trivial_gau, trivial_sem};
    use crate::formula::*;

    fn ag(v: &[&str]) -> Vec<Agent> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn sample() -> KripkeModel {
        let mut m = KripkeModel::new(&ag(&["a", "b"]), &["w", "v"]);
        m.add_edge(0, 0, 1);
        m.add_edge(1, 0, 0);
        m.add_edge(1, 1, 1);
        m.val[0].insert(Prop::atom("p"));
        m
    }

    #[test]
    fn vacuous_belief() {
        let m = PointedModel::new(sample(), 1);
        assert!(satisfies(&m, &bel("a", bot())).unwrap());
        assert!(satisfies(&m, &top()).unwrap());
    }

    #[test]
    fn trivial_updates_copy_the_model() {
        let m = PointedModel::new(sample(), 0);
        let agents = ag(&["a", "b"]);
        for d in [
            EventModel::from(trivial_sem(&agents)),
            EventModel::from(trivial_ecem(&agents)),
            EventModel::from(trivial_gau(&agents)),
        ] {
            let UpdateResult::Applied(r) = update(&m, &d).unwrap() else { panic!() };
            assert_eq!(r.model.rel, m.model.rel);
            assert_eq!(r.model.val, m.model.val);
        }
    }

    #[test]
    fn empty_arrow_set_removes_edges() {
        let m = PointedModel::new(sample(), 0);
        let mut u = trivial_gau(&ag(&["b"]));
        u.arrows.remove("a");
        let r = update_gau(&m, &u).unwrap();
        assert!(r.model().unwrap().model.rel[0].iter().all(BTreeSet::is_empty));
    }

    #[test]
    fn multi_pointed_needs_unique_designated_event() {
        let m = PointedModel::new(sample(), 0);
        let mut e = trivial_sem(&ag(&["a"]));
        e.events.push("f".into());
        e.pre.push(atom("p"));
        e.designated.insert(1);
        assert_eq!(update_sem(&m, &e).unwrap(), UpdateResult::Inapplicable);
        assert!(satisfies(&m, &Formula::DynSem(e.into(), Box::new(bot()))).unwrap());
    }

    #[test]
    fn regimes_are_not_mixed() {
        let g = PointedModel::new(sample().with_empty_attention(), 0);
        assert!(satisfies(&g, &att("a", "p")).is_err());
        assert!(!satisfies(&g, &attends("a", atom("p"))).unwrap());
        let pa = PointedModel::new(sample(), 0);
        assert!(satisfies(&pa, &attends("a", atom("p"))).is_err());
        assert!(update_sem(&g, &trivial_sem(&ag(&["a"]))).is_err());
    }
}
