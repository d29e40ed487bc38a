//! A small expression language for inspecting series:
//!
//! ```text
//! expr  := op* atom
//! op    := ("Y" | "Yg" | "Ytw") "(" vec "," var ")"  |  gen "(" mode ")"
//! vec   := (gen "(" mode ")")* atom
//! atom  := "vac" | "vac0" | "vac1" | gen | "(" vec ")"
//! ```
//!
//! `Y` acts on the algebra, `Yg` on the twisted module, and `Ytw(w, x)`
//! sends algebra vectors to the module. A bare generator name is its state
//! `a(-wt)𝟏`; `gen(r)` applies the mode `a(r)` to whatever follows.

use crate::error::{CalcError, Result};
use crate::formal_calculus::series::format_monomial;
use crate::formal_calculus::{Exponent, Series, Var};
use crate::model_zoo::Model;
use crate::twist_operator::TwistOperatorMap;
use crate::vosa_core::fields::apply_field;
use crate::vosa_core::{FockKey, FockSpace, GradedVector};
use num_rational::Rational64;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational64),
    LParen,
    RParen,
    Comma,
}

fn err(msg: impl Into<String>) -> CalcError {
    CalcError::Model(format!("expression: {}", msg.into()))
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else if c == ',' {
            out.push(Tok::Comma);
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if c == '-' || c.is_ascii_digit() {
            let st = i;
            i += 1;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '/') {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            let r: Rational64 = t.parse().map_err(|_| err(format!("bad number {t:?}")))?;
            out.push(Tok::Num(r));
        } else {
            return Err(err(format!("unexpected {c:?}")));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Y,
    Yg,
    Ytw,
}

#[derive(Clone, Debug)]
enum Atom {
    Vac(Option<u8>),
    Gen(String),
    Group(Box<Vector>),
}

#[derive(Clone, Debug)]
struct Vector {
    modes: Vec<(String, Rational64)>,
    atom: Atom,
}

#[derive(Clone, Debug)]
enum Op {
    Field(Field, Vector, Var),
    Mode(String, Rational64),
}

#[derive(Clone, Debug)]
struct Expr {
    ops: Vec<Op>,
    atom: Atom,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(x) if x == t => Ok(()),
            other => Err(err(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn field_kind(s: &str) -> Option<Field> {
        match s {
            "Y" => Some(Field::Y),
            "Yg" => Some(Field::Yg),
            "Ytw" => Some(Field::Ytw),
            _ => None,
        }
    }

    /// `gen(r)` where a number follows the parenthesis.
    fn at_mode(&self) -> bool {
        matches!((self.peek(0), self.peek(1), self.peek(2)), (Some(Tok::Ident(s)), Some(Tok::LParen), Some(Tok::Num(_))) if Self::field_kind(s).is_none())
    }

    fn mode(&mut self) -> Result<(String, Rational64)> {
        let Some(Tok::Ident(g)) = self.next() else { unreachable!() };
        self.expect(Tok::LParen)?;
        let Some(Tok::Num(r)) = self.next() else { unreachable!() };
        self.expect(Tok::RParen)?;
        Ok((g, r))
    }

    fn atom(&mut self) -> Result<Atom> {
        match self.next() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "vac" => Ok(Atom::Vac(None)),
                "vac0" => Ok(Atom::Vac(Some(0))),
                "vac1" => Ok(Atom::Vac(Some(1))),
                _ if Self::field_kind(&s).is_some() => Err(err(format!("{s} needs arguments here"))),
                _ => Ok(Atom::Gen(s)),
            },
            Some(Tok::LParen) => {
                let v = self.vector()?;
                self.expect(Tok::RParen)?;
                Ok(Atom::Group(Box::new(v)))
            }
            other => Err(err(format!("expected a vector, found {other:?}"))),
        }
    }

    fn vector(&mut self) -> Result<Vector> {
        let mut modes = Vec::new();
        while self.at_mode() {
            modes.push(self.mode()?);
        }
        Ok(Vector { modes, atom: self.atom()? })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut ops = Vec::new();
        loop {
            if self.at_mode() {
                let (g, r) = self.mode()?;
                ops.push(Op::Mode(g, r));
                continue;
            }
            let kind = match self.peek(0) {
                Some(Tok::Ident(s)) => Self::field_kind(s),
                _ => None,
            };
            let Some(kind) = kind else { break };
            self.next();
            self.expect(Tok::LParen)?;
            let v = self.vector()?;
            self.expect(Tok::Comma)?;
            let var = match self.next() {
                Some(Tok::Ident(s)) => Var::named(&s).filter(|v| *v != Var::Y).ok_or_else(|| err(format!("unknown variable {s:?}")))?,
                other => return Err(err(format!("expected a variable, found {other:?}"))),
            };
            self.expect(Tok::RParen)?;
            ops.push(Op::Field(kind, v, var));
        }
        let atom = self.atom()?;
        if self.pos != self.toks.len() {
            return Err(err(format!("trailing input at token {}", self.pos)));
        }
        Ok(Expr { ops, atom })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sort {
    Algebra,
    Module,
}

fn sorts(f: Field) -> (Sort, Sort) {
    // (acts on, produces)
    match f {
        Field::Y => (Sort::Algebra, Sort::Algebra),
        Field::Yg => (Sort::Module, Sort::Module),
        Field::Ytw => (Sort::Algebra, Sort::Module),
    }
}

struct Env<'a> {
    model: &'a Model,
}

impl Env<'_> {
    fn fock(&self, s: Sort) -> Result<Arc<FockSpace>> {
        Ok(match s {
            Sort::Algebra => self.model.algebra.fock.clone(),
            Sort::Module => self.model.module()?.fock.clone(),
        })
    }

    fn apply_mode(&self, s: Sort, g: &str, r: Rational64, v: &GradedVector) -> Result<GradedVector> {
        let f = self.fock(s)?;
        let gi = f.gens.iter().position(|x| x.name == g).ok_or_else(|| err(format!("unknown generator {g:?}")))? as u8;
        let twice = r * Rational64::from_integer(2);
        if !twice.is_integer() || !f.mode_allowed(gi, twice.to_integer() as i32) {
            return Err(err(format!("mode {g}({r}) does not act on this space")));
        }
        Ok(f.apply_mode_vec(gi, twice.to_integer() as i32, v))
    }

    fn atom(&self, s: Sort, a: &Atom) -> Result<GradedVector> {
        match a {
            Atom::Vac(k) => {
                let k = k.unwrap_or(0);
                if k == 1 && (s == Sort::Algebra || !self.fock(s)?.ramond) {
                    return Err(err("vac1 exists only in a Ramond module"));
                }
                Ok(GradedVector::basis(FockKey::vacuum(k)))
            }
            Atom::Gen(g) => match s {
                Sort::Algebra => self.model.algebra.generator_by_name(g).ok_or_else(|| err(format!("unknown generator {g:?}"))),
                Sort::Module => Err(err(format!("{g} is an algebra state; write {g}(r) vac for a module vector"))),
            },
            Atom::Group(v) => self.vector(s, v),
        }
    }

    fn vector(&self, s: Sort, v: &Vector) -> Result<GradedVector> {
        let mut x = self.atom(s, &v.atom)?;
        for (g, r) in v.modes.iter().rev() {
            x = self.apply_mode(s, g, *r, &x)?;
        }
        Ok(x)
    }
}

/// An evaluated expression: the series and the space its values live in.
pub struct Evaluated {
    pub series: Series<GradedVector>,
    pub in_module: bool,
    fock: Arc<FockSpace>,
}

#[derive(Serialize)]
pub struct EntryDump {
    pub monomial: String,
    pub vector: Vec<(String, String)>,
}

impl Evaluated {
    pub fn entries(&self) -> Result<Vec<(String, GradedVector)>> {
        Ok(self.series.entries()?.into_iter().map(|(m, c)| (format_monomial(self.series.vars(), &m), c)).collect())
    }

    /// One line per nonzero coefficient, `monomial: vector`.
    pub fn pretty(&self) -> Result<String> {
        let e = self.entries()?;
        if e.is_empty() {
            return Ok("0".into());
        }
        Ok(e.iter().map(|(m, c)| format!("{m}: {}", self.fock.describe_vec(c))).collect::<Vec<_>>().join("\n"))
    }

    pub fn dump(&self) -> Result<Vec<EntryDump>> {
        Ok(self
            .entries()?
            .into_iter()
            .map(|(m, c)| EntryDump { monomial: m, vector: c.comps.iter().map(|(k, s)| (self.fock.describe(k), s.to_string())).collect() })
            .collect())
    }
}

/// Parses without evaluating.
pub fn parse(text: &str) -> Result<()> {
    Parser { toks: lex(text)?, pos: 0 }.expr().map(|_| ())
}

/// Evaluates an expression on the model with exponent half-width `hw`.
pub fn evaluate(model: &Model, text: &str, hw: i64) -> Result<Evaluated> {
    let e = Parser { toks: lex(text)?, pos: 0 }.expr()?;
    let env = Env { model };
    let mut seen = Vec::new();
    let mut out_sort = None;
    let mut cur = None;
    // sorts from the left: each field fixes what it acts on
    let mut need: Vec<Sort> = Vec::new();
    for op in &e.ops {
        if let Op::Field(f, _, x) = op {
            if seen.contains(x) {
                return Err(err(format!("variable {} used twice", x.name())));
            }
            seen.push(*x);
            let (on, produces) = sorts(*f);
            if let Some(c) = cur {
                if c != produces {
                    return Err(err(format!("{f:?} produces the wrong space for the operator on its left")));
                }
            }
            out_sort.get_or_insert(produces);
            cur = Some(on);
        }
        need.push(cur.unwrap_or(Sort::Algebra));
    }
    let base_sort = match (cur, &e.atom) {
        (Some(s), _) => s,
        (None, Atom::Vac(Some(_))) => Sort::Module,
        (None, _) => Sort::Algebra,
    };
    // mode operators left of every field act on the output space
    let first_field = e.ops.iter().position(|o| matches!(o, Op::Field(..)));
    let mut s = Series::constant(env.atom(base_sort, &e.atom)?);
    let mut sort = base_sort;
    for (i, op) in e.ops.iter().enumerate().rev() {
        match op {
            Op::Mode(g, r) => {
                let here = if first_field.is_some_and(|f| i < f) { out_sort.unwrap_or(sort) } else { sort };
                let (fock_sort, g, r) = (here, g.clone(), *r);
                // validate once, then map lazily
                env.apply_mode(fock_sort, &g, r, &GradedVector::zero())?;
                let f = env.fock(fock_sort)?;
                let gi = f.gens.iter().position(|x| x.name == g).unwrap() as u8;
                let twice = (r * Rational64::from_integer(2)).to_integer() as i32;
                s = s.map(false, move |c| f.apply_mode_vec(gi, twice, c));
            }
            Op::Field(f, v, x) => {
                let (on, produces) = sorts(*f);
                debug_assert_eq!(on, sort);
                s = match f {
                    Field::Y => apply_field(&model.algebra.engine, &env.vector(Sort::Algebra, v)?, *x, &s, hw),
                    Field::Yg => apply_field(&model.module()?.engine, &env.vector(Sort::Algebra, v)?, *x, &s, hw),
                    Field::Ytw => {
                        let cut: Exponent = Rational64::from_integer(4);
                        let t = Arc::new(TwistOperatorMap::new(model.module()?, cut)?);
                        t.apply(&env.vector(Sort::Module, v)?, *x, &s, hw)
                    }
                };
                sort = produces;
            }
        }
    }
    let _ = need;
    let in_module = sort == Sort::Module;
    Ok(Evaluated { series: s.with_window(crate::formal_calculus::Window::symmetric(seen.len(), hw, 0)), in_module, fock: env.fock(sort)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_zoo::load_model;

    #[test]
    fn fermion_two_point() {
        let m = load_model("fermion").unwrap();
        let e = evaluate(&m, "Y(psi,x) psi", 3).unwrap();
        let p = e.pretty().unwrap();
        assert!(p.starts_with("x^-1: (1)·|0⟩"), "{p}");
    }

    #[test]
    fn ramond_twist() {
        let m = load_model("ramond").unwrap();
        let e = evaluate(&m, "Ytw(vac,x) psi", 3).unwrap();
        assert!(e.in_module);
        let p = e.pretty().unwrap();
        assert!(p.starts_with("x^-1/2: "), "{p}");
        assert!(p.contains("2^{-1/2}"), "{p}");
    }

    #[test]
    fn parse_errors() {
        let m = load_model("fermion").unwrap();
        assert!(evaluate(&m, "Y(vac...)", 3).is_err());
        assert!(evaluate(&m, "Y(psi,x) Y(psi,x) vac", 3).is_err());
        assert!(evaluate(&m, "Yg(psi,x) Y(psi,x1) vac", 3).is_err());
        assert!(parse("psi(-1/2) vac").is_ok());
    }

    #[test]
    fn modes_build_states() {
        let m = load_model("fermion").unwrap();
        let e = evaluate(&m, "psi(1/2) psi(-1/2) vac", 3).unwrap();
        assert_eq!(e.pretty().unwrap(), "1: (1)·|0⟩");
    }
}
