//! ASCII formula syntax.
//!
//! ```text
//! T  F  p  ~f  (f & g)  (f | g)  (f -> g)  (f <-> g)
//! B[a]f  <a>f  A[a]f  Att[a]p  [@model]f  [@model:event]f
//! ```
//! Binary connectives may also appear without the outer parentheses;
//! `&` binds tighter than `|`, which binds tighter than `->` and `<->`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::events::EventModel;
use crate::formula::{self as fm, Agent, Atom, Formula, LanguageTag};

#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub agents: BTreeSet<Agent>,
    pub atoms: BTreeSet<Atom>,
}

impl Signature {
    pub fn new<A: AsRef<str>, P: AsRef<str>>(agents: &[A], atoms: &[P]) -> Self {
        Signature {
            agents: agents.iter().map(|a| a.as_ref().to_string()).collect(),
            atoms: atoms.iter().map(|p| p.as_ref().to_string()).collect(),
        }
    }
}

pub trait EventResolver {
    fn resolve(&self, name: &str) -> Option<EventModel>;
}

#[derive(Clone, Copy, Default)]
pub struct ParseOptions<'a> {
    /// Read `A[a]p` with an atomic argument as the attention atom `Att[a]p`.
    pub attention_atoms: bool,
    pub signature: Option<&'a Signature>,
    pub events: Option<&'a dyn EventResolver>,
}

/// Parse and check membership in `tag`.
pub fn parse(text: &str, tag: LanguageTag) -> Result<Formula> {
    parse_in(text, tag, None, None)
}

pub fn parse_in(
    text: &str,
    tag: LanguageTag,
    signature: Option<&Signature>,
    events: Option<&dyn EventResolver>,
) -> Result<Formula> {
    let opts = ParseOptions { attention_atoms: tag.attention_atoms(), signature, events };
    let f = parse_with(text, &opts)?;
    tag.check(&f)?;
    Ok(f)
}

/// Parse without a language check.
pub fn parse_with(text: &str, opts: &ParseOptions<'_>) -> Result<Formula> {
    let mut p = Parser { src: text, pos: 0, opts };
    let f = p.expr()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'s, 'o> {
    src: &'s str,
    pos: usize,
    opts: &'o ParseOptions<'o>,
}

impl Parser<'_, '_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat("<->") {
            let rhs = self.expr()?;
            Ok(fm::iff(lhs, rhs))
        } else if self.eat("->") {
            let rhs = self.expr()?;
            Ok(fm::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.eat("|") {
            let g = self.conj()?;
            f = fm::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            let g = self.unary()?;
            f = fm::and(f, g);
        }
        Ok(f)
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let len = self
            .rest()
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Some(s)
    }

    fn agent_in_brackets(&mut self, close: &str) -> Result<Agent> {
        let start = self.pos;
        let a = self.ident().ok_or_else(|| self.err("expected agent id"))?;
        if let Some(sig) = self.opts.signature {
            if !sig.agents.contains(&a) {
                self.pos = start;
                return Err(Error::Undeclared { kind: "agent", name: a });
            }
        }
        self.expect(close)?;
        Ok(a)
    }

    fn check_atom(&self, p: &str) -> Result<()> {
        let mut chars = p.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !ok {
            return Err(self.err(&format!("`{p}` is not an atom")));
        }
        if let Some(sig) = self.opts.signature {
            if !sig.atoms.contains(p) {
                return Err(Error::Undeclared { kind: "atom", name: p.to_string() });
            }
        }
        Ok(())
    }

    fn unary(&mut self) -> Result<Formula> {
        self.ws();
        if self.eat("~") {
            return Ok(fm::not(self.unary()?));
        }
        if self.eat("(") {
            let f = self.expr()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("[@") {
            return self.dynamic();
        }
        if self.eat("<") {
            let a = self.agent_in_brackets(">")?;
            return Ok(fm::poss(&a, self.unary()?));
        }
        if self.eat("Att[") {
            let a = self.agent_in_brackets("]")?;
            let p = self.ident().ok_or_else(|| self.err("expected atom after Att[..]"))?;
            self.check_atom(&p)?;
            return Ok(Formula::AttAtom(a, p));
        }
        if self.eat("B[") {
            let a = self.agent_in_brackets("]")?;
            return Ok(fm::bel(&a, self.unary()?));
        }
        if self.eat("A[") {
            let a = self.agent_in_brackets("]")?;
            let f = self.unary()?;
            return Ok(match f {
                Formula::Atom(p) if self.opts.attention_atoms => Formula::AttAtom(a, p),
                _ if self.opts.attention_atoms => {
                    return Err(self.err("attention atoms apply to atoms only"));
                }
                f => fm::attends(&a, f),
            });
        }
        let start = self.pos;
        match self.ident() {
            Some(s) if s == "T" => Ok(Formula::Top),
            Some(s) if s == "F" => Ok(fm::bot()),
            Some(s) => {
                self.pos = start;
                self.check_atom(&s)?;
                self.pos = start + s.len();
                Ok(Formula::Atom(s))
            }
            None => Err(self.err("expected a formula")),
        }
    }

    /// Scan up to `:` or `]` at bracket depth zero.
    fn scan_ref_part(&mut self, stop_at_colon: bool) -> Result<String> {
        let mut depth = 0i32;
        let start = self.pos;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                ']' if depth == 0 => {
                    let s = self.src[start..start + i].trim().to_string();
                    self.pos = start + i;
                    return Ok(s);
                }
                ']' => depth -= 1,
                ':' if depth == 0 && stop_at_colon => {
                    let s = self.src[start..start + i].trim().to_string();
                    self.pos = start + i;
                    return Ok(s);
                }
                _ => {}
            }
        }
        Err(self.err("unterminated dynamic modality"))
    }

    fn dynamic(&mut self) -> Result<Formula> {
        let at = self.pos;
        let name = self.scan_ref_part(true)?;
        let point = if self.eat(":") { Some(self.scan_ref_part(false)?) } else { None };
        self.expect("]")?;
        let resolver = self.opts.events.ok_or_else(|| Error::Syntax {
            pos: at,
            msg: "dynamic modality without an event model context".into(),
        })?;
        let model = resolver
            .resolve(&name)
            .ok_or_else(|| Error::Unknown { kind: "event model", name: name.clone() })?;
        let model = match point {
            Some(e) => model.with_point(&e)?,
            None => model,
        };
        let body = self.unary()?;
        Ok(fm::dynamic(&model, body))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::*;

    #[test]
    fn base_cases() {
        assert_eq!(parse("T", LanguageTag::EL).unwrap(), top());
        assert_eq!(parse("F", LanguageTag::EL).unwrap(), bot());
    }

    #[test]
    fn attention_by_tag() {
        assert_eq!(
            parse("(A[a]p & ~A[a]q)", LanguageTag::GA).unwrap(),
            and(attends("a", atom("p")), not(attends("a", atom("q"))))
        );
        assert_eq!(
            parse("B[b]B[a](Att[a]p & Att[a]q)", LanguageTag::PA).unwrap(),
            bel("b", bel("a", and(att("a", "p"), att("a", "q"))))
        );
        assert_eq!(parse("A[a]p", LanguageTag::PA).unwrap(), att("a", "p"));
        assert!(parse("Att[a]p", LanguageTag::GA).is_err());
        assert!(parse("A[a]B[b]p", LanguageTag::PA).is_err());
    }

    #[test]
    fn sugar_and_precedence() {
        assert_eq!(parse("p -> q", LanguageTag::EL).unwrap(), imp(atom("p"), atom("q")));
        assert_eq!(
            parse("p & q | r", LanguageTag::EL).unwrap(),
            or(and(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(parse("<a>p", LanguageTag::EL).unwrap(), poss("a", atom("p")));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("(p &", LanguageTag::EL), Err(Error::Syntax { .. })));
        let sig = Signature::new(&["a"], &["p"]);
        assert!(matches!(
            parse_in("B[b]p", LanguageTag::EL, Some(&sig), None),
            Err(Error::Undeclared { kind: "agent", .. })
        ));
        assert!(matches!(
            parse_in("q", LanguageTag::EL, Some(&sig), None),
            Err(Error::Undeclared { kind: "atom", .. })
        ));
    }
}
