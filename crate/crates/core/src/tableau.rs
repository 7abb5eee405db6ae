//! Tableau decision procedure for multi-agent K.
//!
//! Attention atoms and attention modalities are opaque propositional
//! tokens; a satisfiable input yields a finite tree model as witness.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{conj, Agent, Formula};
use crate::models::{KripkeModel, PointedModel, Prop};

#[derive(Clone, Debug)]
pub struct TableauVerdict {
    pub satisfiable: bool,
    pub witness: Option<PointedModel>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Token {
    Atom(String),
    Att(Agent, String),
    Attends(Agent, Formula),
}

#[derive(Clone, Debug)]
enum Nnf {
    True,
    False,
    Lit(usize, bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Box(usize, std::boxed::Box<Nnf>),
    Dia(usize, std::boxed::Box<Nnf>),
}

#[derive(Default)]
struct Interner {
    tokens: Vec<Token>,
    agents: Vec<Agent>,
}

impl Interner {
    fn token(&mut self, t: Token) -> usize {
        match self.tokens.iter().position(|x| *x == t) {
            Some(i) => i,
            None => {
                self.tokens.push(t);
                self.tokens.len() - 1
            }
        }
    }

    fn agent(&mut self, a: &str) -> usize {
        match self.agents.iter().position(|x| x == a) {
            Some(i) => i,
            None => {
                self.agents.push(a.to_string());
                self.agents.len() - 1
            }
        }
    }

    fn nnf(&mut self, f: &Formula, pos: bool) -> Result<Nnf> {
        Ok(match f {
            Formula::Top => {
                if pos {
                    Nnf::True
                } else {
                    Nnf::False
                }
            }
            Formula::Atom(p) => Nnf::Lit(self.token(Token::Atom(p.clone())), pos),
            Formula::AttAtom(a, p) => Nnf::Lit(self.token(Token::Att(a.clone(), p.clone())), pos),
            Formula::Attends(a, g) => {
                self.agent(a);
                Nnf::Lit(self.token(Token::Attends(a.clone(), (**g).clone())), pos)
            }
            Formula::Not(g) => self.nnf(g, !pos)?,
            Formula::And(l, r) => {
                let parts = vec![self.nnf(l, pos)?, self.nnf(r, pos)?];
                if pos {
                    Nnf::And(parts)
                } else {
                    Nnf::Or(parts)
                }
            }
            Formula::Believes(a, g) => {
                let i = self.agent(a);
                let body = std::boxed::Box::new(self.nnf(g, pos)?);
                if pos {
                    Nnf::Box(i, body)
                } else {
                    Nnf::Dia(i, body)
                }
            }
            Formula::DynSem(..) | Formula::DynEcm(..) | Formula::DynGau(..) => {
                return Err(Error::Invalid("the tableau accepts static formulas only".into()))
            }
        })
    }
}

/// A node of the tree model under construction.
struct Node {
    lits: BTreeMap<usize, bool>,
    children: Vec<(usize, Node)>,
}

#[derive(Clone, Default)]
struct Branch {
    todo: Vec<Nnf>,
    ors: Vec<Vec<Nnf>>,
    lits: BTreeMap<usize, bool>,
    boxes: Vec<(usize, Nnf)>,
    dias: Vec<(usize, Nnf)>,
}

fn expand(mut b: Branch) -> Option<Node> {
    while let Some(f) = b.todo.pop() {
        match f {
            Nnf::True => {}
            Nnf::False => return None,
            Nnf::Lit(t, v) => {
                if b.lits.insert(t, v) == Some(!v) {
                    return None;
                }
            }
            Nnf::And(xs) => b.todo.extend(xs),
            Nnf::Or(xs) => b.ors.push(xs),
            Nnf::Box(a, x) => b.boxes.push((a, *x)),
            Nnf::Dia(a, x) => b.dias.push((a, *x)),
        }
    }
    if let Some(xs) = b.ors.pop() {
        for x in xs {
            let mut nb = b.clone();
            nb.todo.push(x);
            if let Some(n) = expand(nb) {
                return Some(n);
            }
        }
        return None;
    }
    let mut children = Vec::new();
    for (a, x) in &b.dias {
        let mut todo = vec![x.clone()];
        todo.extend(b.boxes.iter().filter(|(c, _)| c == a).map(|(_, y)| y.clone()));
        children.push((*a, expand(Branch { todo, ..Branch::default() })?));
    }
    Some(Node { lits: b.lits, children })
}

fn build_witness(root: Node, it: &Interner) -> PointedModel {
    let mut flat: Vec<(BTreeMap<usize, bool>, Vec<(usize, usize)>)> = Vec::new();
    fn walk(n: Node, flat: &mut Vec<(BTreeMap<usize, bool>, Vec<(usize, usize)>)>) -> usize {
        let id = flat.len();
        flat.push((n.lits, vec![]));
        for (a, c) in n.children {
            let cid = walk(c, flat);
            flat[id].1.push((a, cid));
        }
        id
    }
    walk(root, &mut flat);
    let names: Vec<String> = (0..flat.len()).map(|i| format!("t{i}")).collect();
    let mut m = KripkeModel::new(&it.agents, &names);
    if it.tokens.iter().any(|t| matches!(t, Token::Attends(..))) {
        m = m.with_empty_attention();
    }
    for (w, (lits, succ)) in flat.into_iter().enumerate() {
        for (a, v) in succ {
            m.add_edge(a, w, v);
        }
        for (t, v) in lits {
            if !v {
                continue;
            }
            match &it.tokens[t] {
                Token::Atom(p) => {
                    m.val[w].insert(Prop::Atom(p.clone()));
                }
                Token::Att(a, p) => {
                    m.val[w].insert(Prop::Att(a.clone(), p.clone()));
                }
                Token::Attends(a, g) => {
                    let i = it.agents.iter().position(|x| x == a).expect("interned agent");
                    m.att.as_mut().expect("attention model")[i][w].insert(g.clone());
                }
            }
        }
    }
    PointedModel::new(m, 0)
}

/// Satisfiability in multi-agent K, with a witness when satisfiable.
pub fn k_satisfiable(f: &Formula) -> Result<TableauVerdict> {
    if f.contains_att_atom() && f.contains_attends() {
        return Err(Error::Regime(
            "formula mixes attention atoms and attention modalities".into(),
        ));
    }
    let mut it = Interner::default();
    for a in f.agents() {
        it.agent(&a);
    }
    let root = it.nnf(f, true)?;
    let node = expand(Branch { todo: vec![root], ..Branch::default() });
    Ok(match node {
        Some(n) => TableauVerdict { satisfiable: true, witness: Some(build_witness(n, &it)) },
        None => TableauVerdict { satisfiable: false, witness: None },
    })
}

/// Joint satisfiability; the empty set is consistent.
pub fn consistent(g: &[Formula]) -> Result<bool> {
    Ok(k_satisfiable(&conj(g.iter().cloned()))?.satisfiable)
}
