//! Bounded formulas over inverse systems: abstract syntax, concrete syntax,
//! Tarskian evaluation, the bounded cotheory generator and the C-pile
//! checker.
//!
//! The signature has `<=` (level comparison), `[=` (coset containment),
//! the partial product `P`, equality, the level-size bounds `Gn` and the
//! per-label family relations `Gp(label, n)`. Every quantifier is bounded:
//! `exists v in Gn . body` ranges over the points of level size at most `n`.

mod cotheory;
mod parser;

pub use cotheory::{check_cpile_bounded, generate_tc, AxiomKind, CoTheoryAxiom, CpileReport};
pub use parser::parse;

use crate::error::{Error, Result};
use crate::isystem::InverseSystem;
use std::collections::BTreeMap;
use std::fmt;

pub type Var = String;

/// A bounded co-language formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoFormula {
    Leq(Var, Var),
    Sqsub(Var, Var),
    P(Var, Var, Var),
    Eq(Var, Var),
    /// `Gn(n, v)`: the level of `v` has at most `n` elements.
    Gn(usize, Var),
    /// `Gpn(label, n, args)`: the argument set is a family member at arity `n`.
    Gpn(String, usize, Vec<Var>),
    Not(Box<CoFormula>),
    And(Box<CoFormula>, Box<CoFormula>),
    Or(Box<CoFormula>, Box<CoFormula>),
    Implies(Box<CoFormula>, Box<CoFormula>),
    Exists(Var, usize, Box<CoFormula>),
    Forall(Var, usize, Box<CoFormula>),
}

impl CoFormula {
    pub fn not(self) -> CoFormula {
        CoFormula::Not(Box::new(self))
    }

    pub fn and(self, other: CoFormula) -> CoFormula {
        CoFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: CoFormula) -> CoFormula {
        CoFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: CoFormula) -> CoFormula {
        CoFormula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(v: impl Into<Var>, n: usize, body: CoFormula) -> CoFormula {
        CoFormula::Exists(v.into(), n, Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, n: usize, body: CoFormula) -> CoFormula {
        CoFormula::Forall(v.into(), n, Box::new(body))
    }

    /// Conjunction of a list; the empty conjunction is a tautology.
    pub fn conj(mut parts: Vec<CoFormula>) -> CoFormula {
        match parts.len() {
            0 => {
                // v = v over an arbitrary fresh bound variable
                CoFormula::exists("taut", 1, CoFormula::Eq("taut".into(), "taut".into()))
            }
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, f| acc.and(f))
            }
        }
    }

    pub fn disj(mut parts: Vec<CoFormula>) -> CoFormula {
        match parts.len() {
            0 => CoFormula::exists("taut", 1, CoFormula::Eq("taut".into(), "taut".into())).not(),
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, f| acc.or(f))
            }
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.walk_free(&mut bound, &mut out);
        out
    }

    fn walk_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let visit = |v: &Var, bound: &Vec<Var>, out: &mut Vec<Var>| {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            CoFormula::Leq(a, b) | CoFormula::Sqsub(a, b) | CoFormula::Eq(a, b) => {
                visit(a, bound, out);
                visit(b, bound, out);
            }
            CoFormula::P(a, b, c) => {
                visit(a, bound, out);
                visit(b, bound, out);
                visit(c, bound, out);
            }
            CoFormula::Gn(_, v) => visit(v, bound, out),
            CoFormula::Gpn(_, _, args) => {
                for a in args {
                    visit(a, bound, out);
                }
            }
            CoFormula::Not(f) => f.walk_free(bound, out),
            CoFormula::And(a, b) | CoFormula::Or(a, b) | CoFormula::Implies(a, b) => {
                a.walk_free(bound, out);
                b.walk_free(bound, out);
            }
            CoFormula::Exists(v, _, body) | CoFormula::Forall(v, _, body) => {
                bound.push(v.clone());
                body.walk_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Largest `Gn` index appearing anywhere (atoms and quantifier bounds).
    pub fn max_bound(&self) -> usize {
        match self {
            CoFormula::Gn(n, _) => *n,
            CoFormula::Gpn(_, n, _) => *n,
            CoFormula::Leq(..) | CoFormula::Sqsub(..) | CoFormula::P(..) | CoFormula::Eq(..) => 0,
            CoFormula::Not(f) => f.max_bound(),
            CoFormula::And(a, b) | CoFormula::Or(a, b) | CoFormula::Implies(a, b) => {
                a.max_bound().max(b.max_bound())
            }
            CoFormula::Exists(_, n, body) | CoFormula::Forall(_, n, body) => {
                (*n).max(body.max_bound())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CoFormula::Exists(..) | CoFormula::Forall(..) => 0,
            CoFormula::Implies(..) => 1,
            CoFormula::Or(..) => 2,
            CoFormula::And(..) => 3,
            CoFormula::Not(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            CoFormula::Leq(a, b) => write!(f, "{a} <= {b}")?,
            CoFormula::Sqsub(a, b) => write!(f, "{a} [= {b}")?,
            CoFormula::P(a, b, c) => write!(f, "P({a},{b},{c})")?,
            CoFormula::Eq(a, b) => write!(f, "{a} = {b}")?,
            CoFormula::Gn(n, v) => write!(f, "G{n}({v})")?,
            CoFormula::Gpn(p, n, args) => {
                write!(f, "Gp({p},{n})({})", args.join(","))?;
            }
            CoFormula::Not(inner) => {
                write!(f, "not ")?;
                inner.fmt_prec(f, 5)?;
            }
            CoFormula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            CoFormula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            CoFormula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            CoFormula::Exists(v, n, body) => {
                write!(f, "exists {v} in G{n} . ")?;
                body.fmt_prec(f, 0)?;
            }
            CoFormula::Forall(v, n, body) => {
                write!(f, "forall {v} in G{n} . ")?;
                body.fmt_prec(f, 0)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for CoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Variable assignment for open formulas.
pub type Assignment = BTreeMap<Var, usize>;

/// Tarskian evaluation over an inverse system. Bounded quantifiers range
/// over the points whose level has at most the stated size.
pub fn cosatisfies(sys: &InverseSystem, formula: &CoFormula, env: &Assignment) -> Result<bool> {
    let mut env = env.clone();
    eval(sys, formula, &mut env)
}

fn lookup(env: &Assignment, v: &Var) -> Result<usize> {
    env.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.clone()))
}

fn eval(sys: &InverseSystem, formula: &CoFormula, env: &mut Assignment) -> Result<bool> {
    Ok(match formula {
        CoFormula::Leq(a, b) => sys.leq(lookup(env, a)?, lookup(env, b)?),
        CoFormula::Sqsub(a, b) => sys.sqsub(lookup(env, a)?, lookup(env, b)?),
        CoFormula::P(a, b, c) => sys.p(lookup(env, a)?, lookup(env, b)?, lookup(env, c)?),
        CoFormula::Eq(a, b) => lookup(env, a)? == lookup(env, b)?,
        CoFormula::Gn(n, v) => sys.gn_holds(*n, lookup(env, v)?),
        CoFormula::Gpn(p, n, args) => {
            let points: Result<Vec<usize>> = args.iter().map(|a| lookup(env, a)).collect();
            sys.gpn_holds(p, *n, &points?)
        }
        CoFormula::Not(f) => !eval(sys, f, env)?,
        CoFormula::And(a, b) => eval(sys, a, env)? && eval(sys, b, env)?,
        CoFormula::Or(a, b) => eval(sys, a, env)? || eval(sys, b, env)?,
        CoFormula::Implies(a, b) => !eval(sys, a, env)? || eval(sys, b, env)?,
        CoFormula::Exists(v, n, body) => {
            let saved = env.get(v).copied();
            let mut found = false;
            for x in 0..sys.n_points() {
                if !sys.gn_holds(*n, x) {
                    continue;
                }
                env.insert(v.clone(), x);
                if eval(sys, body, env)? {
                    found = true;
                    break;
                }
            }
            restore(env, v, saved);
            found
        }
        CoFormula::Forall(v, n, body) => {
            let saved = env.get(v).copied();
            let mut all = true;
            for x in 0..sys.n_points() {
                if !sys.gn_holds(*n, x) {
                    continue;
                }
                env.insert(v.clone(), x);
                if !eval(sys, body, env)? {
                    all = false;
                    break;
                }
            }
            restore(env, v, saved);
            all
        }
    })
}

fn restore(env: &mut Assignment, v: &Var, saved: Option<usize>) {
    match saved {
        Some(x) => {
            env.insert(v.clone(), x);
        }
        None => {
            env.remove(v);
        }
    }
}

/// Deterministic random sentences for differential testing. All quantifier
/// bounds and `Gn` indices stay at most `rank_bound`; `labels` feeds family
/// atoms (pass an empty slice for the family-free fragment).
pub fn random_sentence(
    rng: &mut impl rand::Rng,
    rank_bound: usize,
    max_quantifiers: usize,
    labels: &[&str],
) -> CoFormula {
    gen_formula(rng, rank_bound, max_quantifiers, &mut Vec::new(), labels, 3)
}

fn gen_formula(
    rng: &mut impl rand::Rng,
    rank_bound: usize,
    quant_budget: usize,
    scope: &mut Vec<(Var, usize)>,
    labels: &[&str],
    depth: usize,
) -> CoFormula {
    let can_atom = !scope.is_empty();
    let want_quant = quant_budget > 0 && (scope.is_empty() || rng.gen_bool(0.45));
    if want_quant {
        let v = format!("v{}", scope.len());
        let n = rng.gen_range(1..=rank_bound);
        scope.push((v.clone(), n));
        let body = gen_formula(rng, rank_bound, quant_budget - 1, scope, labels, depth);
        scope.pop();
        return if rng.gen_bool(0.5) {
            CoFormula::exists(v, n, body)
        } else {
            CoFormula::forall(v, n, body)
        };
    }
    if depth == 0 || !can_atom {
        return gen_atom(rng, scope, labels, rank_bound);
    }
    match rng.gen_range(0..6) {
        0 => gen_atom(rng, scope, labels, rank_bound),
        1 => gen_formula(rng, rank_bound, 0, scope, labels, depth - 1).not(),
        2 => gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)
            .and(gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)),
        3 => gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)
            .or(gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)),
        4 => gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)
            .implies(gen_formula(rng, rank_bound, 0, scope, labels, depth - 1)),
        _ => gen_atom(rng, scope, labels, rank_bound),
    }
}

fn gen_atom(
    rng: &mut impl rand::Rng,
    scope: &[(Var, usize)],
    labels: &[&str],
    rank_bound: usize,
) -> CoFormula {
    use CoFormula::*;
    let picks: Vec<Var> = (0..4)
        .map(|_| scope[rng.gen_range(0..scope.len())].0.clone())
        .collect();
    let max_kind = if labels.is_empty() { 5 } else { 6 };
    match rng.gen_range(0..max_kind) {
        0 => Leq(picks[0].clone(), picks[1].clone()),
        1 => Sqsub(picks[0].clone(), picks[1].clone()),
        2 => P(picks[0].clone(), picks[1].clone(), picks[2].clone()),
        3 => Eq(picks[0].clone(), picks[1].clone()),
        4 => Gn(rng.gen_range(1..=rank_bound), picks[0].clone()),
        _ => {
            let label = labels[rng.gen_range(0..labels.len())];
            let n = rng.gen_range(1..=rank_bound);
            let args = (0..n)
                .map(|_| scope[rng.gen_range(0..scope.len())].0.clone())
                .collect();
            Gpn(label.to_string(), n, args)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::isystem::encode;
    use crate::pile::GroupPile;
    use rand::SeedableRng;

    fn z2_system() -> InverseSystem {
        encode(&GroupPile::bare(FiniteGroup::cyclic(2), ["p".to_string()])).unwrap()
    }

    #[test]
    fn forall_reflexive_eq() {
        let sys = z2_system();
        let f = parse("forall v in G1 . v = v").unwrap();
        assert!(cosatisfies(&sys, &f, &Assignment::new()).unwrap());
    }

    #[test]
    fn nonidentity_coset_is_not_idempotent() {
        let sys = z2_system();
        let f = parse("exists v in G2 . not P(v,v,v)").unwrap();
        assert!(cosatisfies(&sys, &f, &Assignment::new()).unwrap());
        // but at level bound 1 only the two trivial-level points... the
        // bottom-level identity and the top point are all idempotent
        let f1 = parse("exists v in G1 . not P(v,v,v)").unwrap();
        assert!(!cosatisfies(&sys, &f1, &Assignment::new()).unwrap());
    }

    #[test]
    fn family_tuples_on_s3_pile() {
        let s3 = FiniteGroup::symmetric(3);
        let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
        let h = crate::group::generated(&s3, &[t]);
        let pile = GroupPile::deficient(s3, [("p".to_string(), vec![h])]).unwrap();
        let sys = encode(&pile).unwrap();
        // at the top level (index 1) the family image is the singleton level
        let f = parse("exists v in G1 . Gp(p,1)(v)").unwrap();
        assert!(cosatisfies(&sys, &f, &Assignment::new()).unwrap());
        // at level 6 there are tuples exactly for the conjugate images
        let f = parse(
            "exists v0 in G6 . exists v1 in G6 . not v0 = v1 & Gp(p,2)(v0,v1)",
        )
        .unwrap();
        assert!(cosatisfies(&sys, &f, &Assignment::new()).unwrap());
    }

    #[test]
    fn unbound_variable_errors() {
        let sys = z2_system();
        let f = parse("v = v").unwrap();
        assert!(matches!(
            cosatisfies(&sys, &f, &Assignment::new()),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn truncation_agrees_on_bounded_formulas() {
        // evaluation only inspects levels up to the max Gn index
        let pile = GroupPile::bare(FiniteGroup::cyclic(8), ["p".to_string()]);
        let full = encode(&pile).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..60 {
            let f = random_sentence(&mut rng, 2, 3, &[]);
            let trunc = crate::isystem::encode_upto(&pile, f.max_bound()).unwrap();
            assert_eq!(
                cosatisfies(&full, &f, &Assignment::new()).unwrap(),
                cosatisfies(&trunc, &f, &Assignment::new()).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn print_parse_roundtrip() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..200 {
            let f = random_sentence(&mut rng, 3, 3, &["p", "q"]);
            let printed = f.to_string();
            let reparsed = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(f, reparsed, "{printed}");
        }
    }
}
