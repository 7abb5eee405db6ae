//! Bisimulation, isomorphism and update equivalence batteries.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::events::EventModel;
use crate::formula::Formula;
use crate::models::{KripkeModel, PointedModel, Prop};
use crate::random::{random_model, ModelParams};
use crate::semantics::update;

/// Pairs of world indices (left, right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimulationWitness {
    pub relation: BTreeSet<(usize, usize)>,
}

impl BisimulationWitness {
    pub fn named(&self, m1: &KripkeModel, m2: &KripkeModel) -> Vec<(String, String)> {
        self.relation.iter().map(|&(w, v)| (m1.worlds[w].clone(), m2.worlds[v].clone())).collect()
    }
}

/// `bijection[w]` is the image of world `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismWitness {
    pub bijection: Vec<usize>,
}

impl IsomorphismWitness {
    pub fn named(&self, m1: &KripkeModel, m2: &KripkeModel) -> BTreeMap<String, String> {
        self.bijection.iter().enumerate().map(|(w, &v)| (m1.worlds[w].clone(), m2.worlds[v].clone())).collect()
    }
}

/// Index of each left agent in the right model.
fn agent_map(m1: &KripkeModel, m2: &KripkeModel) -> Result<Vec<usize>> {
    let a1: BTreeSet<&String> = m1.agents.iter().collect();
    let a2: BTreeSet<&String> = m2.agents.iter().collect();
    if a1 != a2 {
        return Err(Error::Invalid("models have different agent sets".into()));
    }
    if m1.is_attention_model() != m2.is_attention_model() {
        return Err(Error::Regime("cannot compare an attention model with a Kripke model".into()));
    }
    Ok(m1.agents.iter().map(|a| m2.agent_index(a).expect("same agents")).collect())
}

/// Atomic information of a world: valuation and, for attention models, the
/// attention sets in left-agent order.
type Label = (BTreeSet<Prop>, Vec<BTreeSet<Formula>>);

fn label(m: &KripkeModel, w: usize, order: &[usize]) -> Label {
    let att = match &m.att {
        Some(att) => order.iter().map(|&a| att[a][w].clone()).collect(),
        None => vec![],
    };
    (m.val[w].clone(), att)
}

/// Coarsest bisimulation partition of the disjoint union; entries
/// `0..m1.len()` are the left worlds.
pub fn coarsest_partition(m1: &KripkeModel, m2: &KripkeModel) -> Result<Vec<usize>> {
    let amap = agent_map(m1, m2)?;
    let ident: Vec<usize> = (0..m1.agents.len()).collect();
    let n1 = m1.len();
    let labels: Vec<Label> =
        (0..n1).map(|w| label(m1, w, &ident)).chain((0..m2.len()).map(|v| label(m2, v, &amap))).collect();
    let succ = |x: usize, a: usize| -> Vec<usize> {
        if x < n1 {
            m1.rel[a][x].iter().copied().collect()
        } else {
            m2.rel[amap[a]][x - n1].iter().map(|v| v + n1).collect()
        }
    };
    let mut block = renumber(&labels);
    loop {
        let sigs: Vec<(usize, Vec<BTreeSet<usize>>)> = (0..labels.len())
            .map(|x| (block[x], ident.iter().map(|&a| succ(x, a).into_iter().map(|y| block[y]).collect()).collect()))
            .collect();
        let next = renumber(&sigs);
        let stable = next.iter().max() == block.iter().max();
        block = next;
        if stable {
            return Ok(block);
        }
    }
}

fn renumber<T: Ord>(keys: &[T]) -> Vec<usize> {
    let mut ids: BTreeMap<&T, usize> = BTreeMap::new();
    keys.iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k).or_insert(n)
        })
        .collect()
}

/// The coarsest bisimulation between the models if it links the points.
pub fn bisimilar(p1: &PointedModel, p2: &PointedModel) -> Result<Option<BisimulationWitness>> {
    let (m1, m2) = (&p1.model, &p2.model);
    let block = coarsest_partition(m1, m2)?;
    let n1 = m1.len();
    if block[p1.point] != block[n1 + p2.point] {
        return Ok(None);
    }
    let mut relation = BTreeSet::new();
    for w in 0..n1 {
        for v in 0..m2.len() {
            if block[w] == block[n1 + v] {
                relation.insert((w, v));
            }
        }
    }
    Ok(Some(BisimulationWitness { relation }))
}

/// Failures of [Atom], [Forth] and [Back] (plus attention agreement for
/// attention models). Empty means `z` is a bisimulation.
pub fn validate_bisimulation(m1: &KripkeModel, m2: &KripkeModel, z: &BTreeSet<(usize, usize)>) -> Result<Vec<String>> {
    let amap = agent_map(m1, m2)?;
    let ident: Vec<usize> = (0..m1.agents.len()).collect();
    let mut out = Vec::new();
    for &(w, v) in z {
        let (wn, vn) = (&m1.worlds[w], &m2.worlds[v]);
        if label(m1, w, &ident) != label(m2, v, &amap) {
            out.push(format!("atom: {wn} and {vn} differ"));
        }
        for (a, &b) in amap.iter().enumerate() {
            for &w2 in &m1.rel[a][w] {
                if !m2.rel[b][v].iter().any(|&v2| z.contains(&(w2, v2))) {
                    out.push(format!("forth: {wn} -{}-> {} unmatched from {vn}", m1.agents[a], m1.worlds[w2]));
                }
            }
            for &v2 in &m2.rel[b][v] {
                if !m1.rel[a][w].iter().any(|&w2| z.contains(&(w2, v2))) {
                    out.push(format!("back: {vn} -{}-> {} unmatched from {wn}", m1.agents[a], m2.worlds[v2]));
                }
            }
        }
    }
    Ok(out)
}

/// Failures of the isomorphism conditions for `f`.
pub fn validate_isomorphism(m1: &KripkeModel, m2: &KripkeModel, f: &[usize]) -> Result<Vec<String>> {
    let amap = agent_map(m1, m2)?;
    let ident: Vec<usize> = (0..m1.agents.len()).collect();
    let mut out = Vec::new();
    if m1.len() != m2.len() || f.len() != m1.len() {
        out.push(format!("sizes differ: {} vs {}", m1.len(), m2.len()));
        return Ok(out);
    }
    let image: BTreeSet<usize> = f.iter().copied().collect();
    if image.len() != f.len() || image.iter().any(|&v| v >= m2.len()) {
        out.push("not a bijection".into());
        return Ok(out);
    }
    for w in 0..m1.len() {
        if label(m1, w, &ident) != label(m2, f[w], &amap) {
            out.push(format!("atom: {} and {} differ", m1.worlds[w], m2.worlds[f[w]]));
        }
        for (a, &b) in amap.iter().enumerate() {
            let mapped: BTreeSet<usize> = m1.rel[a][w].iter().map(|&x| f[x]).collect();
            if mapped != m2.rel[b][f[w]] {
                out.push(format!("edges of {} for {} not preserved", m1.worlds[w], m1.agents[a]));
            }
        }
    }
    Ok(out)
}

/// Checks a proposed bijection; missing entries count as failure.
pub fn isomorphic_via(m1: &KripkeModel, m2: &KripkeModel, candidate: &[Option<usize>]) -> Result<Option<IsomorphismWitness>> {
    let Some(f) = candidate.iter().copied().collect::<Option<Vec<usize>>>() else {
        return Ok(None);
    };
    Ok(validate_isomorphism(m1, m2, &f)?.is_empty().then_some(IsomorphismWitness { bijection: f }))
}

/// Backtracking search over label- and degree-compatible bijections.
pub fn isomorphic(m1: &KripkeModel, m2: &KripkeModel, bound: usize) -> Result<Option<IsomorphismWitness>> {
    let amap = agent_map(m1, m2)?;
    if m1.len() != m2.len() {
        return Ok(None);
    }
    if m1.len() > bound {
        return Err(Error::Bound { bound, size: m1.len() });
    }
    let ident: Vec<usize> = (0..m1.agents.len()).collect();
    let n = m1.len();
    let inv = |m: &KripkeModel, w: usize, order: &[usize]| {
        let degrees: Vec<(usize, usize, bool)> = order
            .iter()
            .map(|&a| {
                let indeg = (0..m.len()).filter(|&x| m.rel[a][x].contains(&w)).count();
                (m.rel[a][w].len(), indeg, m.rel[a][w].contains(&w))
            })
            .collect();
        (label(m, w, order), degrees)
    };
    let inv1: Vec<_> = (0..n).map(|w| inv(m1, w, &ident)).collect();
    let inv2: Vec<_> = (0..n).map(|v| inv(m2, v, &amap)).collect();
    let cands: Vec<Vec<usize>> = (0..n).map(|w| (0..n).filter(|&v| inv1[w] == inv2[v]).collect()).collect();
    if cands.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        w: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
        cands: &[Vec<usize>],
        m1: &KripkeModel,
        m2: &KripkeModel,
        amap: &[usize],
    ) -> bool {
        if w == f.len() {
            return true;
        }
        for &v in &cands[w] {
            if used[v] {
                continue;
            }
            // Edges between w and already mapped worlds must agree.
            let ok = (0..w).all(|x| {
                amap.iter().enumerate().all(|(a, &b)| {
                    m1.rel[a][w].contains(&x) == m2.rel[b][v].contains(&f[x])
                        && m1.rel[a][x].contains(&w) == m2.rel[b][f[x]].contains(&v)
                })
            }) && amap.iter().enumerate().all(|(a, &b)| m1.rel[a][w].contains(&w) == m2.rel[b][v].contains(&v));
            if !ok {
                continue;
            }
            f[w] = v;
            used[v] = true;
            if go(w + 1, f, used, cands, m1, m2, amap) {
                return true;
            }
            used[v] = false;
        }
        false
    }
    Ok(go(0, &mut f, &mut used, &cands, m1, m2, &amap).then_some(IsomorphismWitness { bijection: f }))
}

#[derive(Clone, Debug)]
pub struct BatteryParams {
    pub count: usize,
    pub model: ModelParams,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum BatteryVerdict {
    NoCounterexample { samples: usize },
    Counterexample { model: PointedModel, reason: String },
}

impl BatteryVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, BatteryVerdict::NoCounterexample { .. })
    }
}

/// Samples pointed models and compares applicability and, where both apply,
/// bisimilarity of the updates. Finding no counterexample is not a proof.
pub fn update_equivalence_battery(d1: &EventModel, d2: &EventModel, params: &BatteryParams) -> Result<BatteryVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.count {
        let m = random_model(&mut rng, &params.model);
        let (u1, u2) = (update(&m, d1)?, update(&m, d2)?);
        let reason = match (u1.model(), u2.model()) {
            (None, None) => None,
            (Some(_), None) => Some(format!("{} applies but {} does not", d1.name(), d2.name())),
            (None, Some(_)) => Some(format!("{} applies but {} does not", d2.name(), d1.name())),
            (Some(a), Some(b)) => {
                bisimilar(a, b)?.is_none().then(|| "updated models are not bisimilar".to_string())
            }
        };
        if let Some(reason) = reason {
            return Ok(BatteryVerdict::Counterexample { model: m, reason });
        }
    }
    Ok(BatteryVerdict::NoCounterexample { samples: params.count })
}
