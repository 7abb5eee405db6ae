//! Reduction of dynamic formulas to static ones.
//!
//! Edge-conditioned modalities are rewritten with the reduction axioms
//! ```text
//! [(C,e)]⊤        ↔ ⊤
//! [(C,e)]p        ↔ (pre(e) → p)
//! [(C,e)]¬ψ       ↔ (pre(e) → ¬[(C,e)]ψ)
//! [(C,e)](ψ ∧ χ)  ↔ ([(C,e)]ψ ∧ [(C,e)]χ)
//! [(C,e)]B_a ψ    ↔ (pre(e) → ⋀_{(e:χ,f:χ')∈Q_a} (χ → B_a(χ' → [(C,f)]ψ)))
//! ```
//! Attention atoms and attention modalities are left untouched by updates, so
//! they reduce like atoms. Standard event models and arrow updates are first
//! translated into edge-conditioned models.

use crate::error::Result;
use crate::events::Ecem;
use crate::formula::{and, conj, imp, not, Formula};
use crate::transforms::{t1, t1pp};

pub use crate::tableau::{consistent, k_satisfiable, TableauVerdict};

/// Static formula equivalent to `f` on every model.
pub fn reduce(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) | Formula::Attends(..) => f.clone(),
        Formula::Not(g) => not(reduce(g)?),
        Formula::And(l, r) => and(reduce(l)?, reduce(r)?),
        Formula::Believes(a, g) => Formula::Believes(a.clone(), Box::new(reduce(g)?)),
        Formula::DynEcm(c, g) => {
            let c = reduce_model(c)?;
            reduce_at(&c, c.designated, &reduce(g)?)
        }
        Formula::DynSem(e, g) => {
            let c = reduce_model(&t1(e))?;
            let body = reduce(g)?;
            if e.is_pointed() {
                reduce_at(&c, c.designated, &body)
            } else {
                // Exactly one designated precondition must hold.
                conj(e.designated.iter().map(|&d| {
                    let others = e.designated.iter().filter(|&&x| x != d).map(|&x| not(c.pre[x].clone()));
                    let unique = and(c.pre[d].clone(), conj(others));
                    imp(unique, reduce_at(&c, d, &body))
                }))
            }
        }
        Formula::DynGau(u, g) => {
            let c = reduce_model(&t1pp(u))?;
            reduce_at(&c, c.designated, &reduce(g)?)
        }
    })
}

/// The model with every precondition and edge condition reduced.
pub fn reduce_model(c: &Ecem) -> Result<Ecem> {
    let mut out = c.clone();
    for p in &mut out.pre {
        *p = reduce(p)?;
    }
    for q in out.edges.values_mut() {
        let mut reduced = std::collections::BTreeSet::new();
        for e in q.iter() {
            let mut e = e.clone();
            e.src = reduce(&e.src)?;
            e.tgt = reduce(&e.tgt)?;
            reduced.insert(e);
        }
        *q = reduced;
    }
    Ok(out)
}

/// `[(C,e)]psi` for a static `psi` and a model with static conditions.
pub fn reduce_at(c: &Ecem, e: usize, psi: &Formula) -> Formula {
    let pre = || c.pre[e].clone();
    match psi {
        Formula::Top => Formula::Top,
        Formula::Atom(_) | Formula::AttAtom(..) | Formula::Attends(..) => imp(pre(), psi.clone()),
        Formula::Not(g) => imp(pre(), not(reduce_at(c, e, g))),
        Formula::And(l, r) => and(reduce_at(c, e, l), reduce_at(c, e, r)),
        Formula::Believes(a, g) => {
            let parts = c.edges_of(a).filter(|q| q.from == e).map(|q| {
                let inner = imp(q.tgt.clone(), reduce_at(c, q.to, g));
                imp(q.src.clone(), Formula::Believes(a.clone(), Box::new(inner)))
            });
            imp(pre(), conj(parts))
        }
        Formula::DynSem(..) | Formula::DynEcm(..) | Formula::DynGau(..) => {
            unreachable!("reduce_at expects a static formula")
        }
    }
}

/// One application of the matching reduction axiom, keeping `[(C,f)]ψ`
/// subterms as dynamic modalities.
pub fn axiom_rhs(c: &std::sync::Arc<Ecem>, psi: &Formula) -> Option<Formula> {
    let e = c.designated;
    let at = |f: usize, g: &Formula| {
        let mut c2 = (**c).clone();
        c2.designated = f;
        Formula::DynEcm(std::sync::Arc::new(c2), Box::new(g.clone()))
    };
    let pre = c.pre[e].clone();
    Some(match psi {
        Formula::Top => Formula::Top,
        Formula::Atom(_) | Formula::AttAtom(..) | Formula::Attends(..) => imp(pre, psi.clone()),
        Formula::Not(g) => imp(pre, not(at(e, g))),
        Formula::And(l, r) => and(at(e, l), at(e, r)),
        Formula::Believes(a, g) => {
            let parts = c.edges_of(a).filter(|q| q.from == e).map(|q| {
                let inner = imp(q.tgt.clone(), at(q.to, g));
                imp(q.src.clone(), Formula::Believes(a.clone(), Box::new(inner)))
            });
            imp(pre, conj(parts))
        }
        _ => return None,
    })
}

/// ⊤/⊥ absorption and double negation elimination.
pub fn simplify(f: &Formula) -> Formula {
    let is_bot = |g: &Formula| matches!(g, Formula::Not(x) if **x == Formula::Top);
    match f {
        Formula::Not(g) => match simplify(g) {
            Formula::Not(x) => *x,
            g => not(g),
        },
        Formula::And(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            if l == Formula::Top {
                r
            } else if r == Formula::Top {
                l
            } else if is_bot(&l) || is_bot(&r) {
                not(Formula::Top)
            } else {
                and(l, r)
            }
        }
        Formula::Believes(a, g) => match simplify(g) {
            Formula::Top => Formula::Top,
            g => Formula::Believes(a.clone(), Box::new(g)),
        },
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::build_h;
    use crate::formula::*;

    fn ag(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn atom_axiom_and_simplification() {
        let c = std::sync::Arc::new(crate::events::trivial_ecem(&ag(&["a"])));
        let f = Formula::DynEcm(c, Box::new(atom("p")));
        let r = reduce(&f).unwrap();
        assert_eq!(r, imp(top(), atom("p")));
        assert_eq!(simplify(&r), atom("p"));
    }

    #[test]
    fn belief_axiom_on_h_of_p() {
        let h = build_h(&atom("p"), &ag(&["a"])).unwrap();
        let f = Formula::DynEcm(std::sync::Arc::new(h), Box::new(bel("a", atom("p"))));
        // Edges out of event p: (p : A_a p, p : A_a p) and (p : ¬A_a p, ⊤ : ⊤).
        let expected = imp(
            atom("p"),
            and(
                imp(att("a", "p"), bel("a", imp(att("a", "p"), imp(atom("p"), atom("p"))))),
                imp(not(att("a", "p")), bel("a", imp(top(), imp(top(), atom("p"))))),
            ),
        );
        assert_eq!(reduce(&f).unwrap(), expected);
    }
}
