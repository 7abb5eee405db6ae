//! Greatest fixpoint of the bisimulation conditions by repeated deletion.

use std::collections::BTreeSet;

use edgecond::models::KripkeModel;

fn same_label(m1: &KripkeModel, w: usize, m2: &KripkeModel, v: usize) -> bool {
    if m1.val[w] != m2.val[v] {
        return false;
    }
    match (&m1.att, &m2.att) {
        (None, None) => true,
        (Some(a1), Some(a2)) => m1.agents.iter().enumerate().all(|(i, a)| {
            let j = m2.agents.iter().position(|b| b == a).unwrap();
            a1[i][w] == a2[j][v]
        }),
        _ => false,
    }
}

/// The largest bisimulation between the two models.
pub fn largest_bisimulation(m1: &KripkeModel, m2: &KripkeModel) -> BTreeSet<(usize, usize)> {
    let mut z: BTreeSet<(usize, usize)> = (0..m1.len())
        .flat_map(|w| (0..m2.len()).map(move |v| (w, v)))
        .filter(|&(w, v)| same_label(m1, w, m2, v))
        .collect();
    loop {
        let keep: BTreeSet<(usize, usize)> = z
            .iter()
            .copied()
            .filter(|&(w, v)| {
                m1.agents.iter().enumerate().all(|(i, a)| {
                    let j = m2.agents.iter().position(|b| b == a).unwrap();
                    let forth = m1.rel[i][w].iter().all(|&w2| m2.rel[j][v].iter().any(|&v2| z.contains(&(w2, v2))));
                    let back = m2.rel[j][v].iter().all(|&v2| m1.rel[i][w].iter().any(|&w2| z.contains(&(w2, v2))));
                    forth && back
                })
            })
            .collect();
        if keep.len() == z.len() {
            return z;
        }
        z = keep;
    }
}
