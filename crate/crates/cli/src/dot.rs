//! Graphviz output. The point of a model and the designated events of an
//! event model are drawn with a double outline; edges are labelled by agent,
//! and conditioned edges by `a:(src,tgt)`.

use std::fmt::Write;

use edgecond::events::{CondEdge, EventModel};
use edgecond::models::PointedModel;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

pub fn model_dot(name: &str, m: &PointedModel) -> String {
    let k = &m.model;
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    for w in 0..k.len() {
        let props: Vec<String> = k.val[w].iter().map(ToString::to_string).collect();
        let label = format!("{}\\n{}", k.worlds[w], props.join(", "));
        let shape = if w == m.point { "doublecircle" } else { "circle" };
        writeln!(out, "  n{w} [label={}, shape={shape}];", quote(&label)).unwrap();
    }
    for (a, rows) in k.rel.iter().enumerate() {
        for (w, succ) in rows.iter().enumerate() {
            for v in succ {
                writeln!(out, "  n{w} -> n{v} [label={}];", quote(&k.agents[a])).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn event_dot(d: &EventModel) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(d.name())).unwrap();
    let ids = d.event_ids();
    let designated: Vec<usize> = match d {
        EventModel::Sem(e) => e.designated.iter().copied().collect(),
        EventModel::Ecem(c) => vec![c.designated],
        EventModel::Gau(u) => vec![u.designated],
    };
    for (i, id) in ids.iter().enumerate() {
        let label = match d {
            EventModel::Sem(e) => format!("{id}\\npre: {}", e.pre[i]),
            EventModel::Ecem(c) => format!("{id}\\npre: {}", c.pre[i]),
            EventModel::Gau(_) => id.clone(),
        };
        let shape = if designated.contains(&i) { "doubleoctagon" } else { "box" };
        writeln!(out, "  e{i} [label={}, shape={shape}];", quote(&label)).unwrap();
    }
    let mut conditioned = |a: &str, e: &CondEdge| {
        let label = format!("{a}:({},{})", e.src, e.tgt);
        writeln!(out, "  e{} -> e{} [label={}];", e.from, e.to, quote(&label)).unwrap();
    };
    match d {
        EventModel::Sem(e) => {
            for (a, q) in &e.rel {
                for (x, y) in q {
                    writeln!(out, "  e{x} -> e{y} [label={}];", quote(a)).unwrap();
                }
            }
        }
        EventModel::Ecem(c) => c.edges.iter().for_each(|(a, q)| q.iter().for_each(|e| conditioned(a, e))),
        EventModel::Gau(u) => u.arrows.iter().for_each(|(a, q)| q.iter().for_each(|e| conditioned(a, e))),
    }
    out.push_str("}\n");
    out
}
