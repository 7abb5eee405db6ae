//! Seeded generators for models, formulas and event models.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::events::{CondEdge, Ecem, Gau, Sem};
use crate::formula::{and, att, atom, attends, bel, not, top, Agent, Atom, Formula};
use crate::models::{KripkeModel, PointedModel, Prop};

/// Which attention information a random model carries.
#[derive(Clone, Debug, Default)]
pub enum AttentionMode {
    #[default]
    None,
    /// `Att[a]p` valuation entries.
    Atoms,
    /// Attention sets drawn from the given formulas.
    Sets(Vec<Formula>),
}

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub agents: Vec<Agent>,
    pub atoms: Vec<Atom>,
    pub max_worlds: usize,
    pub edge_prob: f64,
    pub attention: AttentionMode,
}

impl ModelParams {
    pub fn new(agents: &[&str], atoms: &[&str], max_worlds: usize) -> Self {
        ModelParams {
            agents: agents.iter().map(|s| s.to_string()).collect(),
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            max_worlds,
            edge_prob: 0.4,
            attention: AttentionMode::None,
        }
    }

    pub fn with_attention(mut self, mode: AttentionMode) -> Self {
        self.attention = mode;
        self
    }
}

pub fn random_model<R: Rng>(rng: &mut R, p: &ModelParams) -> PointedModel {
    let n = rng.gen_range(1..=p.max_worlds.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let mut m = KripkeModel::new(&p.agents, &names);
    for a in 0..p.agents.len() {
        for w in 0..n {
            for v in 0..n {
                if rng.gen_bool(p.edge_prob) {
                    m.add_edge(a, w, v);
                }
            }
        }
    }
    for w in 0..n {
        for q in &p.atoms {
            if rng.gen_bool(0.5) {
                m.val[w].insert(Prop::atom(q));
            }
        }
        if let AttentionMode::Atoms = p.attention {
            for a in &p.agents {
                for q in &p.atoms {
                    if rng.gen_bool(0.5) {
                        m.val[w].insert(Prop::att(a, q));
                    }
                }
            }
        }
    }
    if let AttentionMode::Sets(universe) = &p.attention {
        m = m.with_empty_attention();
        let att = m.att.as_mut().expect("attention sets");
        for rows in att.iter_mut() {
            for set in rows.iter_mut() {
                *set = universe.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            }
        }
    }
    let point = rng.gen_range(0..n);
    PointedModel::new(m, point)
}

/// Makes attention sets constant on each agent's connected components, so
/// that accessible worlds share them.
pub fn enforce_introspection(m: &mut KripkeModel) {
    let Some(att) = m.att.as_mut() else { return };
    for (a, rows) in att.iter_mut().enumerate() {
        let n = rows.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            if c[x] != x {
                let r = find(c, c[x]);
                c[x] = r;
            }
            c[x]
        }
        for w in 0..n {
            for &v in &m.rel[a][w] {
                let (x, y) = (find(&mut comp, w), find(&mut comp, v));
                comp[x] = y;
            }
        }
        for w in 0..n {
            let r = find(&mut comp, w);
            rows[w] = rows[r].clone();
        }
    }
}

/// Leaves available to random formulas besides ⊤ and atoms.
#[derive(Clone, Debug, Default)]
pub enum AttentionLeaves {
    #[default]
    None,
    Atoms,
    /// `A[a]φ` for φ in the given list.
    Modal(Vec<Formula>),
}

#[derive(Clone, Debug)]
pub struct FormulaParams {
    pub agents: Vec<Agent>,
    pub atoms: Vec<Atom>,
    pub depth: usize,
    pub size: usize,
    pub attention: AttentionLeaves,
}

impl FormulaParams {
    pub fn new(agents: &[&str], atoms: &[&str], depth: usize) -> Self {
        FormulaParams {
            agents: agents.iter().map(|s| s.to_string()).collect(),
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            depth,
            size: 4,
            attention: AttentionLeaves::None,
        }
    }

    pub fn with_attention(mut self, leaves: AttentionLeaves) -> Self {
        self.attention = leaves;
        self
    }
}

fn leaf<R: Rng>(rng: &mut R, p: &FormulaParams) -> Formula {
    let k = rng.gen_range(0..10);
    match (&p.attention, k) {
        (_, 0) => top(),
        (AttentionLeaves::Atoms, 7..) => {
            let a = p.agents.choose(rng).expect("agents");
            att(a, p.atoms.choose(rng).expect("atoms"))
        }
        (AttentionLeaves::Modal(fs), 7..) if !fs.is_empty() => {
            let a = p.agents.choose(rng).expect("agents");
            attends(a, fs.choose(rng).expect("formulas").clone())
        }
        _ => atom(p.atoms.choose(rng).expect("atoms")),
    }
}

/// Static formula of modal depth at most `p.depth`.
pub fn random_formula<R: Rng>(rng: &mut R, p: &FormulaParams) -> Formula {
    gen(rng, p, p.depth, p.size)
}

fn gen<R: Rng>(rng: &mut R, p: &FormulaParams, depth: usize, budget: usize) -> Formula {
    if budget == 0 {
        return leaf(rng, p);
    }
    match rng.gen_range(0..10) {
        0..=2 => leaf(rng, p),
        3..=4 => not(gen(rng, p, depth, budget - 1)),
        5..=7 => {
            let l = rng.gen_range(0..budget);
            and(gen(rng, p, depth, l), gen(rng, p, depth, budget - 1 - l))
        }
        _ if depth > 0 => bel(p.agents.choose(rng).expect("agents"), gen(rng, p, depth - 1, budget - 1)),
        _ => not(gen(rng, p, depth, budget - 1)),
    }
}

/// Shape parameters for random event models. Conditions and preconditions
/// come from `pool` when it is non-empty, otherwise from `formulas`.
#[derive(Clone, Debug)]
pub struct EventParams {
    pub agents: Vec<Agent>,
    pub max_events: usize,
    pub edge_prob: f64,
    pub formulas: FormulaParams,
    pub pool: Vec<Formula>,
}

impl EventParams {
    pub fn new(formulas: FormulaParams, max_events: usize) -> Self {
        EventParams { agents: formulas.agents.clone(), max_events, edge_prob: 0.5, formulas, pool: vec![] }
    }

    pub fn with_pool(mut self, pool: Vec<Formula>) -> Self {
        self.pool = pool;
        self
    }
}

fn condition<R: Rng>(rng: &mut R, p: &EventParams) -> Formula {
    match p.pool.choose(rng) {
        Some(f) => f.clone(),
        None => random_formula(rng, &p.formulas),
    }
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_sem<R: Rng>(rng: &mut R, p: &EventParams, name: &str) -> Sem {
    let n = rng.gen_range(1..=p.max_events.max(1));
    let pre = (0..n).map(|_| condition(rng, p)).collect();
    let mut rel = BTreeMap::new();
    for a in &p.agents {
        let q: BTreeSet<(usize, usize)> =
            (0..n).flat_map(|e| (0..n).map(move |f| (e, f))).filter(|_| rng.gen_bool(p.edge_prob)).collect();
        rel.insert(a.clone(), q);
    }
    Sem { name: name.to_string(), events: ids("e", n), pre, rel, designated: [rng.gen_range(0..n)].into() }
}

fn random_edges<R: Rng>(rng: &mut R, p: &EventParams, n: usize) -> BTreeMap<Agent, BTreeSet<CondEdge>> {
    let mut edges = BTreeMap::new();
    for a in &p.agents {
        let mut q = BTreeSet::new();
        for from in 0..n {
            for to in 0..n {
                while rng.gen_bool(p.edge_prob) {
                    q.insert(CondEdge { from, src: condition(rng, p), to, tgt: condition(rng, p) });
                    if q.len() > 4 * n * n {
                        break;
                    }
                }
            }
        }
        edges.insert(a.clone(), q);
    }
    edges
}

pub fn random_ecem<R: Rng>(rng: &mut R, p: &EventParams, name: &str) -> Ecem {
    let n = rng.gen_range(1..=p.max_events.max(1));
    let pre = (0..n).map(|_| condition(rng, p)).collect();
    let edges = random_edges(rng, p, n);
    Ecem { name: name.to_string(), events: ids("e", n), pre, edges, designated: rng.gen_range(0..n) }
}

pub fn random_gau<R: Rng>(rng: &mut R, p: &EventParams, name: &str) -> Gau {
    let n = rng.gen_range(1..=p.max_events.max(1));
    let arrows = random_edges(rng, p, n);
    Gau { name: name.to_string(), outcomes: ids("o", n), arrows, designated: rng.gen_range(0..n) }
}
