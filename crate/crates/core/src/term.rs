//! Terms of the algebra and their concrete text syntax.
//!
//! ```text
//! choice := par ('+' par)*  |  par ('[' alpha ']' par)*
//! par    := seq ('||' seq)*
//! seq    := star (';' star)*
//! star   := primary '*' star  |  primary '*'*
//! primary:= '0' | '1' | name | '(' choice ')'
//! ```
//!
//! `+` and `[alpha]` share the lowest precedence level and may not be mixed
//! without brackets. `E*` abbreviates `E*1`.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, is_probability, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Action(String),
    Plus(Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
    /// Left operand taken with probability `1 - alpha`, right with `alpha`.
    PChoice(Box<Term>, Rational, Box<Term>),
    /// Binary Kleene star `E*F`.
    Star(Box<Term>, Box<Term>),
}

impl Term {
    pub fn action(name: &str) -> Term {
        Term::Action(name.to_string())
    }

    pub fn plus(l: Term, r: Term) -> Term {
        Term::Plus(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Term, r: Term) -> Term {
        Term::Seq(Box::new(l), Box::new(r))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Box::new(l), Box::new(r))
    }

    pub fn pchoice(l: Term, alpha: Rational, r: Term) -> Term {
        Term::PChoice(Box::new(l), alpha, Box::new(r))
    }

    pub fn star(l: Term, r: Term) -> Term {
        Term::Star(Box::new(l), Box::new(r))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Action(_) => 1,
            Term::Plus(l, r)
            | Term::Seq(l, r)
            | Term::Par(l, r)
            | Term::Star(l, r)
            | Term::PChoice(l, _, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn has_pchoice(&self) -> bool {
        match self {
            Term::Zero | Term::One | Term::Action(_) => false,
            Term::PChoice(..) => true,
            Term::Plus(l, r) | Term::Seq(l, r) | Term::Par(l, r) | Term::Star(l, r) => {
                l.has_pchoice() || r.has_pchoice()
            }
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            Term::Zero | Term::One | Term::Action(_) => false,
            Term::Star(..) => true,
            Term::Plus(l, r) | Term::Seq(l, r) | Term::Par(l, r) | Term::PChoice(l, _, r) => {
                l.has_star() || r.has_star()
            }
        }
    }

    /// Canonical JSON form: `{"kind", "children"?, "name"?, "alpha"?}`.
    pub fn to_json(&self) -> Value {
        let bin = |kind: &str, l: &Term, r: &Term| json!({"kind": kind, "children": [l.to_json(), r.to_json()]});
        match self {
            Term::Zero => json!({"kind": "zero"}),
            Term::One => json!({"kind": "one"}),
            Term::Action(a) => json!({"kind": "action", "name": a}),
            Term::Plus(l, r) => bin("plus", l, r),
            Term::Seq(l, r) => bin("seq", l, r),
            Term::Par(l, r) => bin("par", l, r),
            Term::Star(l, r) => bin("star", l, r),
            Term::PChoice(l, a, r) => json!({
                "kind": "pchoice",
                "alpha": format_rational(a),
                "children": [l.to_json(), r.to_json()],
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Term> {
        let bad = |m: &str| Error::Json(format!("term: {m}"));
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing kind"))?;
        let children = || -> Result<(Term, Term)> {
            let cs = v
                .get("children")
                .and_then(Value::as_array)
                .filter(|cs| cs.len() == 2)
                .ok_or_else(|| bad("expected two children"))?;
            Ok((Term::from_json(&cs[0])?, Term::from_json(&cs[1])?))
        };
        Ok(match kind {
            "zero" => Term::Zero,
            "one" => Term::One,
            "action" => {
                let name = v
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("missing name"))?;
                if !valid_action(name) {
                    return Err(bad("invalid action name"));
                }
                Term::action(name)
            }
            "plus" => children().map(|(l, r)| Term::plus(l, r))?,
            "seq" => children().map(|(l, r)| Term::seq(l, r))?,
            "par" => children().map(|(l, r)| Term::par(l, r))?,
            "star" => children().map(|(l, r)| Term::star(l, r))?,
            "pchoice" => {
                let text = v
                    .get("alpha")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("missing alpha"))?;
                let alpha = parse_rational(text)?;
                if !is_probability(&alpha) {
                    return Err(Error::AlphaOutOfRange(text.to_string()));
                }
                let (l, r) = children()?;
                Term::pchoice(l, alpha, r)
            }
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        })
    }

    fn level(&self) -> u8 {
        match self {
            Term::Plus(..) => 0,
            Term::Par(..) => 1,
            Term::Seq(..) => 2,
            Term::Star(..) => 3,
            Term::Zero | Term::One | Term::Action(_) | Term::PChoice(..) => 4,
        }
    }
}

fn valid_action(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    render_into(t, &mut out);
    out
}

fn render_child(t: &Term, min_level: u8, out: &mut String) {
    if t.level() < min_level {
        out.push('(');
        render_into(t, out);
        out.push(')');
    } else {
        render_into(t, out);
    }
}

fn render_into(t: &Term, out: &mut String) {
    match t {
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Action(a) => out.push_str(a),
        Term::Plus(l, r) => {
            render_child(l, 0, out);
            out.push_str(" + ");
            render_child(r, 1, out);
        }
        Term::Par(l, r) => {
            render_child(l, 1, out);
            out.push_str(" || ");
            render_child(r, 2, out);
        }
        Term::Seq(l, r) => {
            render_child(l, 2, out);
            out.push_str(" ; ");
            render_child(r, 3, out);
        }
        Term::Star(l, r) => {
            render_child(l, 4, out);
            out.push('*');
            if **r != Term::One {
                render_child(r, 3, out);
            }
        }
        Term::PChoice(l, a, r) => {
            out.push('(');
            render_child(l, 1, out);
            out.push_str(" [");
            out.push_str(&format_rational(a));
            out.push_str("] ");
            render_child(r, 1, out);
            out.push(')');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        parse_term(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Zero,
    One,
    Plus,
    Semi,
    Bar,
    Star,
    Open,
    Close,
    Alpha(Rational),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let err = |message: String| Error::Syntax {
            offset: start,
            message,
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => toks.push((start, Tok::Plus)),
            b';' => toks.push((start, Tok::Semi)),
            b'*' => toks.push((start, Tok::Star)),
            b'(' => toks.push((start, Tok::Open)),
            b')' => toks.push((start, Tok::Close)),
            b'|' => {
                if bytes.get(i + 1) != Some(&b'|') {
                    return Err(err("expected `||`".into()));
                }
                i += 1;
                toks.push((start, Tok::Bar));
            }
            b'0' | b'1' => {
                if bytes
                    .get(i + 1)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
                {
                    return Err(err(
                        "constants are `0` and `1`; names start with a letter".into()
                    ));
                }
                toks.push((start, if c == b'0' { Tok::Zero } else { Tok::One }));
            }
            b'[' => {
                let close = text[i..]
                    .find(']')
                    .map(|off| i + off)
                    .ok_or_else(|| err("unterminated `[`".into()))?;
                let inner = &text[i + 1..close];
                let alpha =
                    parse_rational(inner).map_err(|_| err(format!("bad probability `{inner}`")))?;
                if !is_probability(&alpha) {
                    return Err(Error::AlphaOutOfRange(inner.trim().to_string()));
                }
                toks.push((start, Tok::Alpha(alpha)));
                i = close;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                toks.push((start, Tok::Name(text[i..j].to_string())));
                i = j;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    toks.push((text.len(), Tok::End));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Tok::Name(_) | Tok::Zero | Tok::One | Tok::Open)
    }

    fn choice(&mut self) -> Result<Term> {
        let mut lhs = self.par()?;
        let mut seen_plus = false;
        let mut seen_alpha = false;
        loop {
            match self.peek().clone() {
                Tok::Plus => {
                    if seen_alpha {
                        return self.error("`+` and `[alpha]` must be separated by brackets");
                    }
                    seen_plus = true;
                    self.bump();
                    lhs = Term::plus(lhs, self.par()?);
                }
                Tok::Alpha(alpha) => {
                    if seen_plus {
                        return self.error("`+` and `[alpha]` must be separated by brackets");
                    }
                    seen_alpha = true;
                    self.bump();
                    lhs = Term::pchoice(lhs, alpha, self.par()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn par(&mut self) -> Result<Term> {
        let mut lhs = self.seq()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Term::par(lhs, self.seq()?);
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> Result<Term> {
        let mut lhs = self.star()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            lhs = Term::seq(lhs, self.star()?);
        }
        Ok(lhs)
    }

    fn star(&mut self) -> Result<Term> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            if self.starts_primary() {
                return Ok(Term::star(base, self.star()?));
            }
            base = Term::star(base, Term::One);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::One => {
                self.bump();
                Ok(Term::One)
            }
            Tok::Name(n) => {
                self.bump();
                Ok(Term::Action(n))
            }
            Tok::Open => {
                self.bump();
                let t = self.choice()?;
                if *self.peek() != Tok::Close {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(t)
            }
            Tok::End => self.error("unexpected end of input"),
            other => self.error(format!("unexpected token {other:?}")),
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let t = p.choice()?;
    if *p.peek() != Tok::End {
        return p.error("trailing input");
    }
    Ok(t)
}
