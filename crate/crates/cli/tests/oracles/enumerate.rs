//! Satisfiability by exhaustive search over pointed models with a fixed
//! number of worlds. Partial models are evaluated in three-valued logic so
//! that whole subtrees of the search can be cut.

use std::collections::BTreeMap;

use edgecond::formula::Formula;

struct Partial {
    n: usize,
    agents: Vec<String>,
    props: BTreeMap<String, usize>,
    /// Valuation bits first, then edge bits, in search order.
    bits: Vec<Option<bool>>,
    order: Vec<usize>,
}

impl Partial {
    fn val(&self, w: usize, p: &str) -> Option<bool> {
        self.bits[w * self.props.len() + self.props[p]]
    }

    fn edge(&self, a: usize, w: usize, v: usize) -> Option<bool> {
        let base = self.n * self.props.len();
        self.bits[base + (a * self.n + w) * self.n + v]
    }

    fn eval(&self, f: &Formula, w: usize) -> Option<bool> {
        match f {
            Formula::Top => Some(true),
            Formula::Atom(p) => self.val(w, p),
            Formula::AttAtom(a, p) => self.val(w, &format!("Att[{a}]{p}")),
            Formula::Not(g) => self.eval(g, w).map(|b| !b),
            Formula::And(l, r) => match (self.eval(l, w), self.eval(r, w)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Formula::Believes(a, g) => {
                let ai = self.agents.iter().position(|x| x == a).unwrap();
                let mut out = Some(true);
                for v in 0..self.n {
                    let term = match (self.edge(ai, w, v), self.eval(g, v)) {
                        (Some(false), _) | (_, Some(true)) => Some(true),
                        (Some(true), Some(false)) => Some(false),
                        _ => None,
                    };
                    out = match (out, term) {
                        (Some(false), _) | (_, Some(false)) => Some(false),
                        (Some(true), Some(true)) => Some(true),
                        _ => None,
                    };
                }
                out
            }
            _ => panic!("enumeration handles static formulas without attention modalities"),
        }
    }

    fn search(&mut self, f: &Formula, k: usize) -> bool {
        match self.eval(f, 0) {
            Some(b) => b,
            None => {
                let i = self.order[k];
                for b in [false, true] {
                    self.bits[i] = Some(b);
                    if self.search(f, k + 1) {
                        return true;
                    }
                }
                self.bits[i] = None;
                false
            }
        }
    }
}

fn collect_props(f: &Formula, out: &mut BTreeMap<String, usize>) {
    let name = match f {
        Formula::Atom(p) => Some(p.clone()),
        Formula::AttAtom(a, p) => Some(format!("Att[{a}]{p}")),
        _ => None,
    };
    if let Some(n) = name {
        let k = out.len();
        out.entry(n).or_insert(k);
    }
    for c in f.children() {
        collect_props(c, out);
    }
}

/// Whether some pointed model with exactly `n` worlds (point 0) satisfies
/// `f`. Models with fewer worlds are covered, since unreachable worlds do
/// not affect truth at the point.
pub fn satisfiable_within(f: &Formula, agents: &[String], n: usize) -> bool {
    let mut props = BTreeMap::new();
    collect_props(f, &mut props);
    let np = props.len();
    let total = n * np + agents.len() * n * n;
    // World by world: valuation, then outgoing edges.
    let mut order = Vec::with_capacity(total);
    for w in 0..n {
        order.extend((0..np).map(|i| w * np + i));
        for a in 0..agents.len() {
            order.extend((0..n).map(|v| n * np + (a * n + w) * n + v));
        }
    }
    let mut p = Partial { n, agents: agents.to_vec(), props, bits: vec![None; total], order };
    p.search(f, 0)
}
