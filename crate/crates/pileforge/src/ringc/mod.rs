//! Compiler from bounded coformulas to ring formulas over admissible field
//! encodings, with a finite-field differential oracle.
//!
//! A quantified point variable becomes a block of base-field variables
//! encoding a finite extension (structure constants of a commutative
//! algebra in a padded basis), a distinguished automorphism table, a
//! compositum algebra and embedding tables into it. Atoms translate to
//! linear-algebra conditions routed through the compositum coordinates.

mod compile;
mod eval;
pub mod ff;

pub use compile::{compile, emit_admissibility, emit_talg, Polynomial};
pub use eval::{eval_ring, eval_ring_limited, EvalMode, DEFAULT_BRUTE_LIMIT};
pub use ff::FiniteFieldModel;

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

pub type VarId = usize;

/// Terms in the language of rings, with integer literals for convenience.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(VarId),
    Const(i64),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn var(v: VarId) -> Term {
        Term::Var(v)
    }

    pub fn zero() -> Term {
        Term::Const(0)
    }

    pub fn one() -> Term {
        Term::Const(1)
    }

    pub fn add(self, other: Term) -> Term {
        match (&self, &other) {
            (Term::Const(0), _) => other,
            (_, Term::Const(0)) => self,
            _ => Term::Add(Box::new(self), Box::new(other)),
        }
    }

    pub fn mul(self, other: Term) -> Term {
        match (&self, &other) {
            (Term::Const(0), _) | (_, Term::Const(0)) => Term::Const(0),
            (Term::Const(1), _) => other,
            (_, Term::Const(1)) => self,
            _ => Term::Mul(Box::new(self), Box::new(other)),
        }
    }

    pub fn neg(self) -> Term {
        match self {
            Term::Const(0) => Term::Const(0),
            t => Term::Neg(Box::new(t)),
        }
    }

    pub fn sum(parts: impl IntoIterator<Item = Term>) -> Term {
        parts.into_iter().fold(Term::zero(), Term::add)
    }
}

/// Layout of one admissible block: which variables (or forced constants)
/// hold each table entry. Entries forced by unitality are not materialized
/// as variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Var(VarId),
    Zero,
    One,
}

impl Entry {
    pub fn term(&self) -> Term {
        match self {
            Entry::Var(v) => Term::Var(*v),
            Entry::Zero => Term::Const(0),
            Entry::One => Term::Const(1),
        }
    }
}

/// The variable layout of the admissible block for one quantified point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Slot index of the point variable (binding order).
    pub slot: usize,
    /// Rank bound `n`: the field part has degree at most `n`.
    pub bound: usize,
    /// Padded compositum dimension.
    pub mdim: usize,
    /// Padded compositum dimensions of the enclosing blocks, slot order.
    pub prev_mdims: Vec<usize>,
    /// `c[j][k][l]`: structure constants of the extension algebra.
    pub c: Vec<Vec<Vec<Entry>>>,
    /// `sigma[t][l]`: the distinguished automorphism table.
    pub sigma: Vec<Vec<Entry>>,
    /// `cstar[j][k][l]`: structure constants of the compositum algebra.
    pub cstar: Vec<Vec<Vec<Entry>>>,
    /// `eps[t][l]`: embedding of the extension into the compositum.
    pub eps: Vec<Vec<Entry>>,
    /// `cross[j][a][l]`: embedding of the j-th enclosing compositum.
    pub cross: Vec<Vec<Vec<Entry>>>,
    /// All fresh variables of the block, in allocation order.
    pub vars: Vec<VarId>,
}

/// Formulas in the language of rings plus declared opaque predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingFormula {
    True,
    False,
    Eq(Term, Term),
    Pred(String, Vec<Term>),
    Not(Box<RingFormula>),
    And(Vec<RingFormula>),
    Or(Vec<RingFormula>),
    Exists(Vec<VarId>, Box<RingFormula>),
    Forall(Vec<VarId>, Box<RingFormula>),
    /// Existential over an admissible block. Brute evaluation ranges over
    /// all base-field tuples; guided evaluation enumerates the canonical
    /// encodings of tower subextensions.
    ExistsBlock(Block, Box<RingFormula>),
    /// Marks admissibility side conditions: true on every canonical
    /// encoding by construction, so guided evaluation skips the subtree
    /// while brute evaluation checks it in full.
    Admissibility(Box<RingFormula>),
}

impl RingFormula {
    pub fn not(self) -> RingFormula {
        match self {
            RingFormula::True => RingFormula::False,
            RingFormula::False => RingFormula::True,
            f => RingFormula::Not(Box::new(f)),
        }
    }

    pub fn and_all(parts: Vec<RingFormula>) -> RingFormula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                RingFormula::True => {}
                RingFormula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => RingFormula::True,
            1 => flat.pop().unwrap(),
            _ => {
                if flat.iter().any(|f| matches!(f, RingFormula::False)) {
                    RingFormula::False
                } else {
                    RingFormula::And(flat)
                }
            }
        }
    }

    pub fn or_all(parts: Vec<RingFormula>) -> RingFormula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                RingFormula::False => {}
                RingFormula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => RingFormula::False,
            1 => flat.pop().unwrap(),
            _ => {
                if flat.iter().any(|f| matches!(f, RingFormula::True)) {
                    RingFormula::True
                } else {
                    RingFormula::Or(flat)
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            RingFormula::True | RingFormula::False => 1,
            RingFormula::Eq(a, b) => 1 + term_size(a) + term_size(b),
            RingFormula::Pred(_, args) => 1 + args.iter().map(term_size).sum::<usize>(),
            RingFormula::Not(f) | RingFormula::Admissibility(f) => 1 + f.size(),
            RingFormula::And(fs) | RingFormula::Or(fs) => {
                1 + fs.iter().map(|f| f.size()).sum::<usize>()
            }
            RingFormula::Exists(_, f) | RingFormula::Forall(_, f) => 1 + f.size(),
            RingFormula::ExistsBlock(_, f) => 1 + f.size(),
        }
    }
}

fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 1,
        Term::Add(a, b) | Term::Mul(a, b) => 1 + term_size(a) + term_size(b),
        Term::Neg(a) => 1 + term_size(a),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub name: String,
    pub arity: usize,
}

/// A compiled ring formula with its variable budget and declared opaque
/// predicates. Serializes as S-expression text with a declaration header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingProgram {
    pub n_vars: usize,
    pub decls: Vec<PredDecl>,
    pub formula: RingFormula,
}

impl fmt::Display for RingProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(program")?;
        writeln!(f, " (vars {})", self.n_vars)?;
        for d in &self.decls {
            writeln!(f, " (declare-pred {} {})", d.name, d.arity)?;
        }
        write!(f, " ")?;
        write_formula(f, &self.formula)?;
        write!(f, ")")
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::Var(v) => write!(f, "x{v}"),
        Term::Const(c) => write!(f, "{c}"),
        Term::Add(a, b) => {
            write!(f, "(+ ")?;
            write_term(f, a)?;
            write!(f, " ")?;
            write_term(f, b)?;
            write!(f, ")")
        }
        Term::Mul(a, b) => {
            write!(f, "(* ")?;
            write_term(f, a)?;
            write!(f, " ")?;
            write_term(f, b)?;
            write!(f, ")")
        }
        Term::Neg(a) => {
            write!(f, "(- ")?;
            write_term(f, a)?;
            write!(f, ")")
        }
    }
}

fn write_entries2(f: &mut fmt::Formatter<'_>, rows: &[Vec<Entry>]) -> fmt::Result {
    write!(f, "(")?;
    for row in rows {
        write!(f, "(")?;
        for e in row {
            match e {
                Entry::Var(v) => write!(f, "x{v} ")?,
                Entry::Zero => write!(f, "0 ")?,
                Entry::One => write!(f, "1 ")?,
            }
        }
        write!(f, ")")?;
    }
    write!(f, ")")
}

fn write_entries3(f: &mut fmt::Formatter<'_>, t: &[Vec<Vec<Entry>>]) -> fmt::Result {
    write!(f, "(")?;
    for plane in t {
        write_entries2(f, plane)?;
    }
    write!(f, ")")
}

fn write_formula(f: &mut fmt::Formatter<'_>, formula: &RingFormula) -> fmt::Result {
    match formula {
        RingFormula::True => write!(f, "true"),
        RingFormula::False => write!(f, "false"),
        RingFormula::Eq(a, b) => {
            write!(f, "(= ")?;
            write_term(f, a)?;
            write!(f, " ")?;
            write_term(f, b)?;
            write!(f, ")")
        }
        RingFormula::Pred(name, args) => {
            write!(f, "({name}")?;
            for a in args {
                write!(f, " ")?;
                write_term(f, a)?;
            }
            write!(f, ")")
        }
        RingFormula::Not(inner) => {
            write!(f, "(not ")?;
            write_formula(f, inner)?;
            write!(f, ")")
        }
        RingFormula::And(parts) => {
            write!(f, "(and")?;
            for p in parts {
                write!(f, " ")?;
                write_formula(f, p)?;
            }
            write!(f, ")")
        }
        RingFormula::Or(parts) => {
            write!(f, "(or")?;
            for p in parts {
                write!(f, " ")?;
                write_formula(f, p)?;
            }
            write!(f, ")")
        }
        RingFormula::Exists(vars, body) => {
            write!(f, "(exists (")?;
            for v in vars {
                write!(f, "x{v} ")?;
            }
            write!(f, ") ")?;
            write_formula(f, body)?;
            write!(f, ")")
        }
        RingFormula::Forall(vars, body) => {
            write!(f, "(forall (")?;
            for v in vars {
                write!(f, "x{v} ")?;
            }
            write!(f, ") ")?;
            write_formula(f, body)?;
            write!(f, ")")
        }
        RingFormula::ExistsBlock(b, body) => {
            write!(
                f,
                "(exists-block (slot {}) (bound {}) (mdim {}) (prev (",
                b.slot, b.bound, b.mdim
            )?;
            for m in &b.prev_mdims {
                write!(f, "{m} ")?;
            }
            write!(f, ")) (c ")?;
            write_entries3(f, &b.c)?;
            write!(f, ") (sigma ")?;
            write_entries2(f, &b.sigma)?;
            write!(f, ") (cstar ")?;
            write_entries3(f, &b.cstar)?;
            write!(f, ") (eps ")?;
            write_entries2(f, &b.eps)?;
            write!(f, ") (cross ")?;
            for t in &b.cross {
                write_entries2(f, t)?;
            }
            write!(f, ") ")?;
            write_formula(f, body)?;
            write!(f, ")")
        }
        RingFormula::Admissibility(inner) => {
            write!(f, "(admissible ")?;
            write_formula(f, inner)?;
            write!(f, ")")
        }
    }
}

/// Parses the S-expression form written by `Display`.
pub fn parse_program(text: &str) -> Result<RingProgram> {
    let sexpr = sexpr::parse(text)?;
    sexpr::program_from(&sexpr)
}

mod sexpr {
    use super::*;

    #[derive(Debug, Clone)]
    pub enum Sx {
        Atom(String),
        List(Vec<Sx>),
    }

    pub fn parse(text: &str) -> Result<Sx> {
        let mut toks = Vec::new();
        let mut cur = String::new();
        for ch in text.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        toks.push(std::mem::take(&mut cur));
                    }
                    toks.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        toks.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            toks.push(cur);
        }
        let mut pos = 0;
        let out = parse_at(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::InvalidInput("trailing tokens in s-expression".into()));
        }
        Ok(out)
    }

    fn parse_at(toks: &[String], pos: &mut usize) -> Result<Sx> {
        let Some(t) = toks.get(*pos) else {
            return Err(Error::InvalidInput("unexpected end of s-expression".into()));
        };
        *pos += 1;
        if t == "(" {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(parse_at(toks, pos)?),
                    None => {
                        return Err(Error::InvalidInput("unclosed s-expression".into()))
                    }
                }
            }
        } else if t == ")" {
            Err(Error::InvalidInput("unexpected ')'".into()))
        } else {
            Ok(Sx::Atom(t.clone()))
        }
    }

    fn bad(what: &str) -> Error {
        Error::InvalidInput(format!("malformed ring program: {what}"))
    }

    fn atom(sx: &Sx) -> Result<&str> {
        match sx {
            Sx::Atom(s) => Ok(s),
            _ => Err(bad("expected atom")),
        }
    }

    fn num(sx: &Sx) -> Result<usize> {
        atom(sx)?.parse().map_err(|_| bad("expected number"))
    }

    fn var_of(s: &str) -> Result<VarId> {
        s.strip_prefix('x')
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| bad("expected variable"))
    }

    pub fn program_from(sx: &Sx) -> Result<RingProgram> {
        let Sx::List(items) = sx else { return Err(bad("expected (program ...)")) };
        if items.is_empty() || atom(&items[0])? != "program" {
            return Err(bad("expected (program ...)"));
        }
        let mut n_vars = 0;
        let mut decls = Vec::new();
        let mut formula = None;
        for item in &items[1..] {
            let Sx::List(parts) = item else { return Err(bad("expected list")) };
            match atom(&parts[0])? {
                "vars" => n_vars = num(&parts[1])?,
                "declare-pred" => decls.push(PredDecl {
                    name: atom(&parts[1])?.to_string(),
                    arity: num(&parts[2])?,
                }),
                _ => formula = Some(formula_from(item)?),
            }
        }
        Ok(RingProgram {
            n_vars,
            decls,
            formula: formula.ok_or_else(|| bad("missing formula"))?,
        })
    }

    fn term_from(sx: &Sx) -> Result<Term> {
        match sx {
            Sx::Atom(s) => {
                if let Ok(v) = var_of(s) {
                    Ok(Term::Var(v))
                } else {
                    s.parse::<i64>().map(Term::Const).map_err(|_| bad("expected term atom"))
                }
            }
            Sx::List(items) => {
                let op = atom(&items[0])?;
                match op {
                    "+" => Ok(Term::Add(
                        Box::new(term_from(&items[1])?),
                        Box::new(term_from(&items[2])?),
                    )),
                    "*" => Ok(Term::Mul(
                        Box::new(term_from(&items[1])?),
                        Box::new(term_from(&items[2])?),
                    )),
                    "-" => Ok(Term::Neg(Box::new(term_from(&items[1])?))),
                    _ => Err(bad("unknown term operator")),
                }
            }
        }
    }

    fn entries2_from(sx: &Sx) -> Result<Vec<Vec<Entry>>> {
        let Sx::List(rows) = sx else { return Err(bad("expected entry rows")) };
        rows.iter()
            .map(|row| {
                let Sx::List(cells) = row else { return Err(bad("expected entry row")) };
                cells
                    .iter()
                    .map(|cell| {
                        let s = atom(cell)?;
                        Ok(match s {
                            "0" => Entry::Zero,
                            "1" => Entry::One,
                            v => Entry::Var(var_of(v)?),
                        })
                    })
                    .collect()
            })
            .collect()
    }

    fn entries3_from(sx: &Sx) -> Result<Vec<Vec<Vec<Entry>>>> {
        let Sx::List(planes) = sx else { return Err(bad("expected entry planes")) };
        planes.iter().map(entries2_from).collect()
    }

    pub fn formula_from(sx: &Sx) -> Result<RingFormula> {
        match sx {
            Sx::Atom(s) if s == "true" => Ok(RingFormula::True),
            Sx::Atom(s) if s == "false" => Ok(RingFormula::False),
            Sx::Atom(_) => Err(bad("unexpected atom formula")),
            Sx::List(items) => {
                let op = atom(&items[0])?;
                match op {
                    "=" => Ok(RingFormula::Eq(term_from(&items[1])?, term_from(&items[2])?)),
                    "not" => Ok(RingFormula::Not(Box::new(formula_from(&items[1])?))),
                    "and" => Ok(RingFormula::And(
                        items[1..].iter().map(formula_from).collect::<Result<_>>()?,
                    )),
                    "or" => Ok(RingFormula::Or(
                        items[1..].iter().map(formula_from).collect::<Result<_>>()?,
                    )),
                    "admissible" => {
                        Ok(RingFormula::Admissibility(Box::new(formula_from(&items[1])?)))
                    }
                    "exists" | "forall" => {
                        let Sx::List(vs) = &items[1] else { return Err(bad("expected vars")) };
                        let vars: Result<Vec<VarId>> =
                            vs.iter().map(|v| var_of(atom(v)?)).collect();
                        let body = Box::new(formula_from(&items[2])?);
                        Ok(if op == "exists" {
                            RingFormula::Exists(vars?, body)
                        } else {
                            RingFormula::Forall(vars?, body)
                        })
                    }
                    "exists-block" => {
                        let mut slot = 0;
                        let mut bound = 0;
                        let mut mdim = 0;
                        let mut prev = Vec::new();
                        let mut c = Vec::new();
                        let mut sigma = Vec::new();
                        let mut cstar = Vec::new();
                        let mut eps = Vec::new();
                        let mut cross = Vec::new();
                        let mut body = None;
                        for item in &items[1..] {
                            match item {
                                Sx::List(parts) if !parts.is_empty() => {
                                    match atom(&parts[0]).unwrap_or("") {
                                        "slot" => slot = num(&parts[1])?,
                                        "bound" => bound = num(&parts[1])?,
                                        "mdim" => mdim = num(&parts[1])?,
                                        "prev" => {
                                            let Sx::List(ms) = &parts[1] else {
                                                return Err(bad("expected prev list"));
                                            };
                                            prev = ms
                                                .iter()
                                                .map(num)
                                                .collect::<Result<Vec<_>>>()?;
                                        }
                                        "c" => c = entries3_from(&parts[1])?,
                                        "sigma" => sigma = entries2_from(&parts[1])?,
                                        "cstar" => cstar = entries3_from(&parts[1])?,
                                        "eps" => eps = entries2_from(&parts[1])?,
                                        "cross" => {
                                            cross = parts[1..]
                                                .iter()
                                                .map(entries2_from)
                                                .collect::<Result<Vec<_>>>()?;
                                        }
                                        _ => body = Some(formula_from(item)?),
                                    }
                                }
                                other => body = Some(formula_from(other)?),
                            }
                        }
                        let mut vars = Vec::new();
                        let collect2 = |rows: &Vec<Vec<Entry>>, vars: &mut Vec<VarId>| {
                            for row in rows {
                                for e in row {
                                    if let Entry::Var(v) = e {
                                        vars.push(*v);
                                    }
                                }
                            }
                        };
                        for plane in &c {
                            collect2(plane, &mut vars);
                        }
                        collect2(&sigma, &mut vars);
                        for plane in &cstar {
                            collect2(plane, &mut vars);
                        }
                        collect2(&eps, &mut vars);
                        for t in &cross {
                            collect2(t, &mut vars);
                        }
                        Ok(RingFormula::ExistsBlock(
                            Block {
                                slot,
                                bound,
                                mdim,
                                prev_mdims: prev,
                                c,
                                sigma,
                                cstar,
                                eps,
                                cross,
                                vars,
                            },
                            Box::new(body.ok_or_else(|| bad("missing block body"))?),
                        ))
                    }
                    name => Ok(RingFormula::Pred(
                        name.to_string(),
                        items[1..].iter().map(term_from).collect::<Result<_>>()?,
                    )),
                }
            }
        }
    }
}

/// Declared predicate names of a formula, with arities.
pub fn collect_pred_decls(formula: &RingFormula) -> Vec<PredDecl> {
    let mut map: BTreeMap<String, usize> = BTreeMap::new();
    fn walk(f: &RingFormula, map: &mut BTreeMap<String, usize>) {
        match f {
            RingFormula::Pred(name, args) => {
                map.insert(name.clone(), args.len());
            }
            RingFormula::Not(inner) | RingFormula::Admissibility(inner) => walk(inner, map),
            RingFormula::And(parts) | RingFormula::Or(parts) => {
                for p in parts {
                    walk(p, map);
                }
            }
            RingFormula::Exists(_, b) | RingFormula::Forall(_, b) => walk(b, map),
            RingFormula::ExistsBlock(_, b) => walk(b, map),
            _ => {}
        }
    }
    walk(formula, &mut map);
    map.into_iter().map(|(name, arity)| PredDecl { name, arity }).collect()
}
