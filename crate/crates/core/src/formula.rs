//! Formula AST shared by every language of the toolkit.
//!
//! One tree type covers L_EL up to L_GA; [`LanguageTag::check`] decides
//! membership in a particular language. Derived connectives are expanded
//! into the `~`/`&` core by the constructors below and by the parser.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::events::{Ecem, EventModel, Gau, Sem};

pub type Agent = String;
pub type Atom = String;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Atom(Atom),
    /// Propositional attention atom `A_a p`, stored in the valuation.
    AttAtom(Agent, Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Believes(Agent, Box<Formula>),
    /// General attention modality `A_a φ`, true iff φ is in the attention set.
    Attends(Agent, Box<Formula>),
    DynSem(Arc<Sem>, Box<Formula>),
    DynEcm(Arc<Ecem>, Box<Formula>),
    DynGau(Arc<Gau>, Box<Formula>),
}

pub fn top() -> Formula {
    Formula::Top
}

pub fn bot() -> Formula {
    not(Formula::Top)
}

pub fn atom(p: &str) -> Formula {
    Formula::Atom(p.to_string())
}

pub fn att(a: &str, p: &str) -> Formula {
    Formula::AttAtom(a.to_string(), p.to_string())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(f: Formula, g: Formula) -> Formula {
    Formula::And(Box::new(f), Box::new(g))
}

pub fn or(f: Formula, g: Formula) -> Formula {
    not(and(not(f), not(g)))
}

pub fn imp(f: Formula, g: Formula) -> Formula {
    not(and(f, not(g)))
}

pub fn iff(f: Formula, g: Formula) -> Formula {
    and(imp(f.clone(), g.clone()), imp(g, f))
}

pub fn bel(a: &str, f: Formula) -> Formula {
    Formula::Believes(a.to_string(), Box::new(f))
}

pub fn attends(a: &str, f: Formula) -> Formula {
    Formula::Attends(a.to_string(), Box::new(f))
}

/// Dual of belief: `a` considers `f` possible.
pub fn poss(a: &str, f: Formula) -> Formula {
    not(bel(a, not(f)))
}

/// Left-folded conjunction; the empty conjunction is ⊤.
pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
    let mut it = items.into_iter();
    match it.next() {
        None => Formula::Top,
        Some(first) => it.fold(first, and),
    }
}

/// Apply a (pointed or multi-pointed) event model as a dynamic modality.
pub fn dynamic(d: &EventModel, f: Formula) -> Formula {
    match d {
        EventModel::Sem(e) => Formula::DynSem(e.clone(), Box::new(f)),
        EventModel::Ecem(c) => Formula::DynEcm(c.clone(), Box::new(f)),
        EventModel::Gau(u) => Formula::DynGau(u.clone(), Box::new(f)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(p: &str) -> Self {
        Literal { atom: p.to_string(), positive: true }
    }

    pub fn neg(p: &str) -> Self {
        Literal { atom: p.to_string(), positive: false }
    }

    pub fn to_formula(&self) -> Formula {
        if self.positive {
            atom(&self.atom)
        } else {
            not(atom(&self.atom))
        }
    }
}

/// Conjunction of literals in lexicographic atom order with duplicates merged.
pub fn canonicalize_literal_conjunction(literals: &[Literal]) -> Result<Formula> {
    let mut sorted: Vec<&Literal> = literals.iter().collect();
    sorted.sort();
    sorted.dedup();
    for w in sorted.windows(2) {
        if w[0].atom == w[1].atom {
            return Err(Error::Contradictory(w[0].atom.clone()));
        }
    }
    Ok(conj(sorted.into_iter().map(Literal::to_formula)))
}

/// Reads a formula back as a conjunction of literals, if it is one.
pub fn as_literal_conjunction(f: &Formula) -> Option<Vec<Literal>> {
    fn go(f: &Formula, out: &mut Vec<Literal>) -> bool {
        match f {
            Formula::Top => true,
            Formula::Atom(p) => {
                out.push(Literal::pos(p));
                true
            }
            Formula::Not(g) => match g.as_ref() {
                Formula::Atom(p) => {
                    out.push(Literal::neg(p));
                    true
                }
                _ => false,
            },
            Formula::And(l, r) => go(l, out) && go(r, out),
            _ => false,
        }
    }
    let mut out = Vec::new();
    if go(f, &mut out) {
        Some(out)
    } else {
        None
    }
}

impl Formula {
    pub fn is_static(&self) -> bool {
        self.hierarchy_level() == 0
    }

    /// Token count of the canonical rendering: every connective, modality,
    /// agent id and atom id is one token, brackets are free.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 1,
            Formula::AttAtom(..) => 3,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(l, r) => 1 + l.size() + r.size(),
            Formula::Believes(_, f) | Formula::Attends(_, f) => 2 + f.size(),
            Formula::DynSem(e, f) => 1 + e.size() + f.size(),
            Formula::DynEcm(c, f) => 1 + c.size() + f.size(),
            Formula::DynGau(u, f) => 1 + u.size() + f.size(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Believes(_, f) | Formula::Attends(_, f) => 1 + f.modal_depth(),
            Formula::DynSem(_, f) | Formula::DynEcm(_, f) | Formula::DynGau(_, f) => {
                f.modal_depth()
            }
        }
    }

    /// Level in the language hierarchy: 0 when static, otherwise one more
    /// than the highest level among the conditions of any embedded model.
    pub fn hierarchy_level(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) => 0,
            Formula::Not(f) | Formula::Believes(_, f) | Formula::Attends(_, f) => {
                f.hierarchy_level()
            }
            Formula::And(l, r) => l.hierarchy_level().max(r.hierarchy_level()),
            Formula::DynSem(e, f) => (1 + e.level()).max(f.hierarchy_level()),
            Formula::DynEcm(c, f) => (1 + c.level()).max(f.hierarchy_level()),
            Formula::DynGau(u, f) => (1 + u.level()).max(f.hierarchy_level()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(p) | Formula::AttAtom(_, p) => {
                out.insert(p.clone());
            }
            _ => {}
        });
        out
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::AttAtom(a, _) | Formula::Believes(a, _) | Formula::Attends(a, _) => {
                out.insert(a.clone());
            }
            _ => {}
        });
        for d in self.embedded_models() {
            out.extend(d.agents());
        }
        out
    }

    pub fn contains_att_atom(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::AttAtom(..)));
        found
    }

    pub fn contains_attends(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Attends(..)));
        found
    }

    /// Pre-order walk over all subformulas, descending into the conditions of
    /// embedded event models.
    pub fn visit(&self, g: &mut dyn FnMut(&Formula)) {
        g(self);
        match self {
            Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) => {}
            Formula::Not(f) | Formula::Believes(_, f) | Formula::Attends(_, f) => f.visit(g),
            Formula::And(l, r) => {
                l.visit(g);
                r.visit(g);
            }
            Formula::DynSem(e, f) => {
                for c in e.cond_set() {
                    c.visit(g);
                }
                f.visit(g);
            }
            Formula::DynEcm(c, f) => {
                for x in c.cond_set() {
                    x.visit(g);
                }
                f.visit(g);
            }
            Formula::DynGau(u, f) => {
                for x in u.cond_set() {
                    x.visit(g);
                }
                f.visit(g);
            }
        }
    }

    /// Event models occurring as dynamic modalities, outermost first.
    pub fn embedded_models(&self) -> Vec<EventModel> {
        let mut out = Vec::new();
        self.visit(&mut |f| match f {
            Formula::DynSem(e, _) => out.push(EventModel::Sem(e.clone())),
            Formula::DynEcm(c, _) => out.push(EventModel::Ecem(c.clone())),
            Formula::DynGau(u, _) => out.push(EventModel::Gau(u.clone())),
            _ => {}
        });
        out
    }

    /// Immediate proper subformulas (event model conditions excluded).
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::AttAtom(..) => vec![],
            Formula::Not(f)
            | Formula::Believes(_, f)
            | Formula::Attends(_, f)
            | Formula::DynSem(_, f)
            | Formula::DynEcm(_, f)
            | Formula::DynGau(_, f) => vec![f],
            Formula::And(l, r) => vec![l, r],
        }
    }

    /// All subformulas reachable through [`Formula::children`], including self.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let kids = out[i].children();
            out.extend(kids);
            i += 1;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LanguageTag {
    EL,
    DEL,
    ECM,
    PA,
    PAplus,
    GA,
    GAU,
}

impl LanguageTag {
    pub const ALL: [LanguageTag; 7] = [
        LanguageTag::EL,
        LanguageTag::DEL,
        LanguageTag::ECM,
        LanguageTag::PA,
        LanguageTag::PAplus,
        LanguageTag::GA,
        LanguageTag::GAU,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "EL" => LanguageTag::EL,
            "DEL" => LanguageTag::DEL,
            "ECM" => LanguageTag::ECM,
            "PA" => LanguageTag::PA,
            "PA+" | "PAPLUS" => LanguageTag::PAplus,
            "GA" => LanguageTag::GA,
            "GAU" => LanguageTag::GAU,
            _ => return None,
        })
    }

    /// Whether `A[a]p` denotes a propositional attention atom.
    pub fn attention_atoms(self) -> bool {
        matches!(self, LanguageTag::PA | LanguageTag::PAplus)
    }

    fn allows_att_atom(self) -> bool {
        self.attention_atoms()
    }

    fn allows_attends(self) -> bool {
        self == LanguageTag::GA
    }

    fn allows_sem(self) -> bool {
        matches!(self, LanguageTag::DEL | LanguageTag::PA)
    }

    fn allows_ecem(self) -> bool {
        matches!(self, LanguageTag::ECM | LanguageTag::PAplus | LanguageTag::GA)
    }

    fn allows_gau(self) -> bool {
        self == LanguageTag::GAU
    }

    /// Membership of `f`, including the conditions of embedded models.
    pub fn check(self, f: &Formula) -> Result<()> {
        let mut bad: Option<&'static str> = None;
        f.visit(&mut |g| {
            if bad.is_some() {
                return;
            }
            bad = match g {
                Formula::AttAtom(..) if !self.allows_att_atom() => Some("attention atom"),
                Formula::Attends(..) if !self.allows_attends() => Some("attention modality"),
                Formula::DynSem(..) if !self.allows_sem() => Some("standard event model modality"),
                Formula::DynEcm(..) if !self.allows_ecem() => {
                    Some("edge-conditioned event model modality")
                }
                Formula::DynGau(..) if !self.allows_gau() => Some("arrow update modality"),
                _ => None,
            };
        });
        match bad {
            None => Ok(()),
            Some(c) => Err(Error::Language { construct: c.to_string(), tag: self }),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "T"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::AttAtom(a, p) => write!(f, "Att[{a}]{p}"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Believes(a, g) => write!(f, "B[{a}]{g}"),
            Formula::Attends(a, g) => write!(f, "A[{a}]{g}"),
            Formula::DynSem(e, g) => {
                if e.designated.len() == 1 {
                    let d = *e.designated.iter().next().unwrap();
                    write!(f, "[@{}:{}]{g}", e.name, e.events[d])
                } else {
                    write!(f, "[@{}]{g}", e.name)
                }
            }
            Formula::DynEcm(c, g) => write!(f, "[@{}:{}]{g}", c.name, c.events[c.designated]),
            Formula::DynGau(u, g) => write!(f, "[@{}:{}]{g}", u.name, u.outcomes[u.designated]),
        }
    }
}

pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_follow_token_count() {
        assert_eq!(top().size(), 1);
        assert_eq!(not(att("a", "p")).size(), 4);
        assert_eq!(and(atom("p"), atom("q")).size(), 3);
        assert_eq!(bel("a", atom("p")).size(), 3);
    }

    #[test]
    fn literal_conjunctions() {
        let f = canonicalize_literal_conjunction(&[Literal::pos("q"), Literal::pos("p")]).unwrap();
        assert_eq!(f, and(atom("p"), atom("q")));
        assert_eq!(canonicalize_literal_conjunction(&[]).unwrap(), top());
        assert_eq!(
            canonicalize_literal_conjunction(&[Literal::pos("p"), Literal::pos("p")]).unwrap(),
            atom("p")
        );
        assert!(canonicalize_literal_conjunction(&[Literal::pos("p"), Literal::neg("p")]).is_err());
    }

    #[test]
    fn atoms_include_attention() {
        assert_eq!(att("a", "p").atoms().into_iter().collect::<Vec<_>>(), vec!["p"]);
        assert!(top().atoms().is_empty());
    }

    #[test]
    fn printing() {
        assert_eq!(print(&top()), "T");
        assert_eq!(print(&and(atom("p"), not(atom("q")))), "(p & ~q)");
        assert_eq!(print(&bel("a", atom("p"))), "B[a]p");
    }

    #[test]
    fn tags() {
        assert!(LanguageTag::EL.check(&bel("a", atom("p"))).is_ok());
        assert!(LanguageTag::EL.check(&att("a", "p")).is_err());
        assert!(LanguageTag::GA.check(&att("a", "p")).is_err());
        assert!(LanguageTag::GA.check(&attends("a", bel("b", atom("p")))).is_ok());
        assert!(LanguageTag::PA.check(&attends("a", atom("p"))).is_err());
    }
}
