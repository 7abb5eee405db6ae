mod oracles;

use edgecond::attention::{build_f, build_h, build_r};
use edgecond::formula::{and, atom, bel, not, or};
use edgecond::parse::{parse_with, ParseOptions};
use edgecond::transforms::phi_conditions;
use edgecond::Formula;

use oracles::{counts, enumerate};

fn agents(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

#[test]
fn f_event_counts() {
    let pq = and(atom("p"), not(atom("q")));
    for n in 1..=3 {
        let f = build_f(&pq, &agents(n)).unwrap();
        assert_eq!(f.events.len() as u64, counts::f_events(2, n as u32));
        assert_eq!(f.designated.len() as u64, counts::f_designated(2, n as u32));
    }
}

#[test]
fn h_sizes() {
    for n in 1..=6 {
        assert_eq!(build_h(&atom("p"), &agents(n)).unwrap().size(), counts::h_p_size(n));
    }
    // Two literals: four events, nine edges per agent.
    let h = build_h(&and(atom("p"), atom("q")), &agents(2)).unwrap();
    assert_eq!(h.events.len(), 4);
    assert!(h.edges.values().all(|q| q.len() == 9));
}

#[test]
fn r_counts() {
    let gamma = [atom("p"), bel("a0", atom("q")), not(bel("a1", atom("p")))];
    for k in 0..=3 {
        let r = build_r(&gamma[..k], &agents(2)).unwrap();
        let (events, edges) = counts::r_counts(k as u32);
        assert_eq!(r.events.len() as u64, events);
        assert!(r.edges.values().all(|q| q.len() as u64 == edges));
    }
}

#[test]
fn phi_and_mc_of_h_p() {
    let h = build_h(&atom("p"), &["a".to_string()]).unwrap();
    let p = h.events.iter().position(|e| e == "p").unwrap();
    let t = 1 - p;
    let att: Formula = parse_with("A[a]p", &ParseOptions { attention_atoms: true, ..Default::default() }).unwrap();
    let pc = phi_conditions(&h, p).unwrap();
    let mut phi = pc.phi.clone();
    phi.sort();
    assert_eq!(phi, vec![att.clone(), not(att.clone())]);
    // A_a p and ¬A_a p cannot both hold or both fail.
    assert_eq!(pc.mc.len(), 2);
    let pt = phi_conditions(&h, t).unwrap();
    assert_eq!(pt.mc.len(), 1);
}

#[test]
fn enumeration_finds_small_models() {
    let ab = ["a".to_string(), "b".to_string()];
    let (p, q) = (atom("p"), atom("q"));
    assert!(!enumerate::satisfiable_within(&and(p.clone(), not(p.clone())), &ab, 3));
    assert!(!enumerate::satisfiable_within(&and(bel("a", p.clone()), not(bel("a", p.clone()))), &ab, 3));
    // Needs two successors besides the point.
    let two = and(
        and(not(or(p.clone(), q.clone())), and(not(bel("a", p.clone())), not(bel("a", q.clone())))),
        bel("a", or(p.clone(), q.clone())),
    );
    assert!(!enumerate::satisfiable_within(&two, &ab, 2));
    assert!(enumerate::satisfiable_within(&two, &ab, 3));
}
