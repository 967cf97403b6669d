//! Exact Haar-measure computation for test sentences over finite Galois
//! data: a finite group acting on labeled roots, polynomials as root sets,
//! and Boolean sentences over root-existence atoms. The measure of a
//! sentence is the exact fraction of automorphism tuples whose fixed field
//! satisfies it, with a seeded Monte-Carlo cross-check.

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const DEFAULT_TUPLE_LIMIT: u64 = 100_000_000;

/// Finite Galois data: a group acting on the roots of named polynomials.
#[derive(Clone, Debug)]
pub struct GaloisScenario {
    group: FiniteGroup,
    roots: Vec<String>,
    /// Permutation of root indices per group element.
    action: Vec<Vec<usize>>,
    polys: BTreeMap<String, BTreeSet<usize>>,
    splits_totally: BTreeSet<String>,
    e: usize,
}

impl GaloisScenario {
    /// Validates the action (a homomorphism into the symmetric group on the
    /// roots), the invariance of every root set, and the separability
    /// assumption (no repeated root labels).
    pub fn new(
        group: FiniteGroup,
        roots: Vec<String>,
        action: Vec<Vec<usize>>,
        polys: BTreeMap<String, BTreeSet<usize>>,
        splits_totally: BTreeSet<String>,
        e: usize,
    ) -> Result<Self> {
        let n_roots = roots.len();
        {
            let mut seen = BTreeSet::new();
            for r in &roots {
                if !seen.insert(r) {
                    return Err(Error::InvalidInput(format!(
                        "repeated root label {r}; separable data required"
                    )));
                }
            }
        }
        if action.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "action table has {} entries for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        for (g, perm) in action.iter().enumerate() {
            if perm.len() != n_roots {
                return Err(Error::InvalidInput(format!(
                    "action of element {g} is not a permutation of the roots"
                )));
            }
            let mut seen = vec![false; n_roots];
            for &img in perm {
                if img >= n_roots || seen[img] {
                    return Err(Error::InvalidInput(format!(
                        "action of element {g} is not a permutation of the roots"
                    )));
                }
                seen[img] = true;
            }
        }
        // identity acts trivially and the table is a homomorphism
        if action[0] != (0..n_roots).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("identity must act trivially".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.mul(a, b);
                for r in 0..n_roots {
                    if action[ab][r] != action[a][action[b][r]] {
                        return Err(Error::InvalidInput(format!(
                            "action is not a homomorphism at pair ({a},{b})"
                        )));
                    }
                }
            }
        }
        for (name, set) in &polys {
            for &r in set {
                if r >= n_roots {
                    return Err(Error::InvalidInput(format!(
                        "polynomial {name} references an unknown root"
                    )));
                }
            }
            for g in group.elements() {
                let image: BTreeSet<usize> = set.iter().map(|&r| action[g][r]).collect();
                if &image != set {
                    return Err(Error::InvalidInput(format!(
                        "root set of {name} is not invariant under element {g}"
                    )));
                }
            }
        }
        for name in &splits_totally {
            if !polys.contains_key(name) {
                return Err(Error::InvalidInput(format!(
                    "declared splitting polynomial {name} has no root set"
                )));
            }
        }
        Ok(GaloisScenario { group, roots, action, polys, splits_totally, e })
    }

    /// Builds the action from permutations given for a generating set,
    /// extending multiplicatively.
    pub fn from_generator_action(
        group: FiniteGroup,
        roots: Vec<String>,
        gen_action: &BTreeMap<usize, Vec<usize>>,
        polys: BTreeMap<String, BTreeSet<usize>>,
        splits_totally: BTreeSet<String>,
        e: usize,
    ) -> Result<Self> {
        let n_roots = roots.len();
        let mut action: Vec<Option<Vec<usize>>> = vec![None; group.order()];
        action[0] = Some((0..n_roots).collect());
        for (&g, perm) in gen_action {
            if g >= group.order() {
                return Err(Error::InvalidInput(format!("generator {g} out of range")));
            }
            action[g] = Some(perm.clone());
        }
        // close under multiplication by the given generators
        loop {
            let mut progressed = false;
            for a in group.elements() {
                let Some(pa) = action[a].clone() else { continue };
                for (&g, pg) in gen_action {
                    let target = group.mul(g, a);
                    if action[target].is_none() {
                        // (g a)(r) = g(a(r))
                        let comp: Vec<usize> = (0..n_roots).map(|r| pg[pa[r]]).collect();
                        action[target] = Some(comp);
                        progressed = true;
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        let full: Option<Vec<Vec<usize>>> = action.into_iter().collect();
        let Some(full) = full else {
            return Err(Error::InvalidInput(
                "generator action does not reach every group element".into(),
            ));
        };
        GaloisScenario::new(group, roots, full, polys, splits_totally, e)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    pub fn poly_names(&self) -> impl Iterator<Item = &String> {
        self.polys.keys()
    }

    pub fn splits_totally(&self) -> &BTreeSet<String> {
        &self.splits_totally
    }
}

/// Boolean sentences over root-existence atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestSentence {
    Exists(String),
    Not(Box<TestSentence>),
    And(Box<TestSentence>, Box<TestSentence>),
    Or(Box<TestSentence>, Box<TestSentence>),
}

impl TestSentence {
    pub fn exists(name: impl Into<String>) -> Self {
        TestSentence::Exists(name.into())
    }

    pub fn not(self) -> Self {
        TestSentence::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        TestSentence::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        TestSentence::Or(Box::new(self), Box::new(other))
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        match self {
            TestSentence::Exists(name) => std::iter::once(name.as_str()).collect(),
            TestSentence::Not(inner) => inner.atoms(),
            TestSentence::And(a, b) | TestSentence::Or(a, b) => {
                let mut s = a.atoms();
                s.extend(b.atoms());
                s
            }
        }
    }

    /// Parses the concrete syntax: `Exists(name)`, `!`, `&`, `|`, parens.
    pub fn parse(text: &str) -> Result<TestSentence> {
        let toks = tokenize(text)?;
        let mut pos = 0;
        let out = parse_or(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Syntax {
                line: 1,
                col: pos + 1,
                msg: "trailing input after the sentence".into(),
            });
        }
        Ok(out)
    }
}

impl fmt::Display for TestSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestSentence::Exists(name) => write!(f, "Exists({name})"),
            TestSentence::Not(inner) => match inner.as_ref() {
                TestSentence::Exists(_) | TestSentence::Not(_) => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            TestSentence::And(a, b) => {
                let wrap = |s: &TestSentence| matches!(s, TestSentence::Or(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " & ")?;
                if wrap(b) || matches!(b.as_ref(), TestSentence::And(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            TestSentence::Or(a, b) => {
                write!(f, "{a} | ")?;
                if matches!(b.as_ref(), TestSentence::Or(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Exists(String),
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '!' => {
                out.push(Tok::Bang);
                i += 1;
            }
            '&' => {
                out.push(Tok::Amp);
                i += 1;
            }
            '|' => {
                out.push(Tok::Pipe);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            _ => {
                let rest = &text[i..];
                if let Some(after) = rest.strip_prefix("Exists(") {
                    let Some(close) = after.find(')') else {
                        return Err(Error::Syntax {
                            line: 1,
                            col: i + 1,
                            msg: "unclosed Exists(".into(),
                        });
                    };
                    out.push(Tok::Exists(after[..close].trim().to_string()));
                    i += "Exists(".len() + close + 1;
                } else {
                    return Err(Error::Syntax {
                        line: 1,
                        col: i + 1,
                        msg: format!("unexpected character {c:?}"),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn parse_or(toks: &[Tok], pos: &mut usize) -> Result<TestSentence> {
    let mut lhs = parse_and(toks, pos)?;
    while toks.get(*pos) == Some(&Tok::Pipe) {
        *pos += 1;
        let rhs = parse_and(toks, pos)?;
        lhs = lhs.or(rhs);
    }
    Ok(lhs)
}

fn parse_and(toks: &[Tok], pos: &mut usize) -> Result<TestSentence> {
    let mut lhs = parse_unary(toks, pos)?;
    while toks.get(*pos) == Some(&Tok::Amp) {
        *pos += 1;
        let rhs = parse_unary(toks, pos)?;
        lhs = lhs.and(rhs);
    }
    Ok(lhs)
}

fn parse_unary(toks: &[Tok], pos: &mut usize) -> Result<TestSentence> {
    match toks.get(*pos) {
        Some(Tok::Bang) => {
            *pos += 1;
            Ok(parse_unary(toks, pos)?.not())
        }
        Some(Tok::LParen) => {
            *pos += 1;
            let inner = parse_or(toks, pos)?;
            if toks.get(*pos) != Some(&Tok::RParen) {
                return Err(Error::Syntax { line: 1, col: *pos, msg: "expected ')'".into() });
            }
            *pos += 1;
            Ok(inner)
        }
        Some(Tok::Exists(name)) => {
            let name = name.clone();
            *pos += 1;
            Ok(TestSentence::Exists(name))
        }
        other => Err(Error::Syntax {
            line: 1,
            col: *pos,
            msg: format!("expected a sentence, found {other:?}"),
        }),
    }
}

/// True iff every atom references a polynomial declared to split totally.
/// The error carries the first offending name.
pub fn recognize(sentence: &TestSentence, sc: &GaloisScenario) -> std::result::Result<(), String> {
    for atom in sentence.atoms() {
        if !sc.splits_totally.contains(atom) {
            return Err(atom.to_string());
        }
    }
    Ok(())
}

/// Evaluates a sentence in the fixed field of the tuple: a root-existence
/// atom holds iff some root of the polynomial is fixed by every tuple entry.
pub fn holds_in_fixed_field(tau: &[usize], sentence: &TestSentence, sc: &GaloisScenario) -> bool {
    match sentence {
        TestSentence::Exists(name) => sc.polys[name]
            .iter()
            .any(|&r| tau.iter().all(|&t| sc.action[t][r] == r)),
        TestSentence::Not(inner) => !holds_in_fixed_field(tau, inner, sc),
        TestSentence::And(a, b) => {
            holds_in_fixed_field(tau, a, sc) && holds_in_fixed_field(tau, b, sc)
        }
        TestSentence::Or(a, b) => {
            holds_in_fixed_field(tau, a, sc) || holds_in_fixed_field(tau, b, sc)
        }
    }
}

/// An exact measure as a fully reduced fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMeasure {
    pub value: BigRational,
}

impl ExactMeasure {
    pub fn as_f64(&self) -> f64 {
        let num = self.value.numer();
        let den = self.value.denom();
        num.to_string().parse::<f64>().unwrap() / den.to_string().parse::<f64>().unwrap()
    }
}

impl fmt::Display for ExactMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

/// Counts the tuples whose fixed field satisfies the sentence, over all
/// `|Γ|^e` tuples in odometer order, as an exact reduced fraction.
pub fn exact_measure(sentence: &TestSentence, sc: &GaloisScenario) -> Result<ExactMeasure> {
    exact_measure_limited(sentence, sc, DEFAULT_TUPLE_LIMIT)
}

pub fn exact_measure_limited(
    sentence: &TestSentence,
    sc: &GaloisScenario,
    limit: u64,
) -> Result<ExactMeasure> {
    if let Err(name) = recognize(sentence, sc) {
        return Err(Error::pre(format!(
            "sentence references {name}, which is not declared to split totally"
        )));
    }
    let order = sc.group.order() as u64;
    let total = order
        .checked_pow(sc.e as u32)
        .filter(|&t| t <= limit)
        .ok_or_else(|| Error::capacity("tuple enumeration", limit))?;
    let mut tau = vec![0usize; sc.e];
    let mut count: u64 = 0;
    for _ in 0..total {
        if holds_in_fixed_field(&tau, sentence, sc) {
            count += 1;
        }
        for slot in tau.iter_mut() {
            *slot += 1;
            if *slot < sc.group.order() {
                break;
            }
            *slot = 0;
        }
    }
    let value = BigRational::new(BigInt::from(count), BigInt::from(total));
    debug_assert!(value >= BigRational::zero() && value <= BigRational::one());
    Ok(ExactMeasure { value })
}

/// A Monte-Carlo estimate with its standard error and provenance metadata.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// Identity of the generator, recorded for reproducibility.
    pub algorithm: &'static str,
}

impl fmt::Display for McEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.6} ± {:.6} ({} samples, seed {}, {})",
            self.mean, self.stderr, self.samples, self.seed, self.algorithm
        )
    }
}

/// Uniform i.i.d. tuples from a counter-based generator; deterministic for
/// a fixed seed.
pub fn monte_carlo(
    sentence: &TestSentence,
    sc: &GaloisScenario,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if let Err(name) = recognize(sentence, sc) {
        return Err(Error::pre(format!(
            "sentence references {name}, which is not declared to split totally"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    let mut tau = vec![0usize; sc.e];
    for _ in 0..samples {
        for slot in tau.iter_mut() {
            *slot = rng.gen_range(0..sc.group.order());
        }
        if holds_in_fixed_field(&tau, sentence, sc) {
            hits += 1;
        }
    }
    let mean = hits as f64 / samples as f64;
    let stderr = (mean * (1.0 - mean) / samples as f64).sqrt();
    Ok(McEstimate { mean, stderr, samples, seed, algorithm: "chacha12" })
}

/// The quadratic scenario: Z/2 swapping the two roots of one polynomial.
pub fn quadratic_scenario(e: usize) -> GaloisScenario {
    GaloisScenario::new(
        FiniteGroup::cyclic(2),
        vec!["r1".into(), "r2".into()],
        vec![vec![0, 1], vec![1, 0]],
        [("f".to_string(), [0usize, 1].into_iter().collect())].into_iter().collect(),
        ["f".to_string()].into_iter().collect(),
        e,
    )
    .unwrap()
}

/// S3 permuting the three roots of a cubic.
pub fn cubic_scenario(e: usize) -> GaloisScenario {
    let s3 = FiniteGroup::symmetric(3);
    // the catalog S3 is built from permutations of 3 points; recover that
    // action by expanding the generators used there
    let action: Vec<Vec<usize>> = {
        // brute-force: find a faithful action matching the group table using
        // the regular embedding of S3 into Sym(3): enumerate all assignments
        // of elements to permutations consistent with multiplication
        let perms: Vec<Vec<usize>> = all_permutations(3);
        let mut table = vec![usize::MAX; 6];
        // assign the identity
        table[0] = perms.iter().position(|p| p == &vec![0, 1, 2]).unwrap();
        // backtracking over the five remaining elements
        fn assign(
            g: &FiniteGroup,
            perms: &[Vec<usize>],
            table: &mut Vec<usize>,
            next: usize,
        ) -> bool {
            if next == g.order() {
                return true;
            }
            if table[next] != usize::MAX {
                return assign(g, perms, table, next + 1);
            }
            'cand: for (pi, _) in perms.iter().enumerate() {
                if table.contains(&pi) {
                    continue;
                }
                table[next] = pi;
                // check consistency with everything assigned so far
                for a in 0..g.order() {
                    if table[a] == usize::MAX {
                        continue;
                    }
                    for b in 0..g.order() {
                        if table[b] == usize::MAX || table[g.mul(a, b)] == usize::MAX {
                            continue;
                        }
                        let composed: Vec<usize> =
                            (0..3).map(|r| perms[table[a]][perms[table[b]][r]]).collect();
                        if composed != perms[table[g.mul(a, b)]] {
                            table[next] = usize::MAX;
                            continue 'cand;
                        }
                    }
                }
                if assign(g, perms, table, next + 1) {
                    return true;
                }
                table[next] = usize::MAX;
            }
            false
        }
        assert!(assign(&s3, &perms, &mut table, 0));
        table.into_iter().map(|pi| perms[pi].clone()).collect()
    };
    GaloisScenario::new(
        s3,
        vec!["r1".into(), "r2".into(), "r3".into()],
        action,
        [("f".to_string(), [0usize, 1, 2].into_iter().collect())].into_iter().collect(),
        ["f".to_string()].into_iter().collect(),
        e,
    )
    .unwrap()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let smaller = all_permutations(n - 1);
    let mut out = Vec::new();
    for p in smaller {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent brute-force oracle written against the raw definitions:
    /// enumerate tuples, check each atom by scanning roots.
    fn oracle_measure(sentence: &TestSentence, sc: &GaloisScenario) -> (u64, u64) {
        fn eval(tau: &[usize], s: &TestSentence, sc: &GaloisScenario) -> bool {
            match s {
                TestSentence::Exists(name) => {
                    let roots = &sc.polys[name];
                    roots.iter().any(|&r| tau.iter().all(|&t| sc.action[t][r] == r))
                }
                TestSentence::Not(x) => !eval(tau, x, sc),
                TestSentence::And(a, b) => eval(tau, a, sc) && eval(tau, b, sc),
                TestSentence::Or(a, b) => eval(tau, a, sc) || eval(tau, b, sc),
            }
        }
        let order = sc.group().order();
        let total = order.pow(sc.e() as u32);
        let mut hits = 0;
        for idx in 0..total {
            let mut tau = Vec::with_capacity(sc.e());
            let mut v = idx;
            for _ in 0..sc.e() {
                tau.push(v % order);
                v /= order;
            }
            if eval(&tau, sentence, sc) {
                hits += 1;
            }
        }
        (hits as u64, total as u64)
    }

    #[test]
    fn quadratic_measure_is_one_half() {
        let sc = quadratic_scenario(1);
        let s = TestSentence::exists("f");
        let (hits, total) = oracle_measure(&s, &sc);
        assert_eq!((hits, total), (1, 2));
        let m = exact_measure(&s, &sc).unwrap();
        assert_eq!(m.to_string(), "1/2");
    }

    #[test]
    fn cubic_measure_is_two_thirds() {
        let sc = cubic_scenario(1);
        let s = TestSentence::exists("f");
        // identity fixes 3 roots, each transposition fixes one, 3-cycles none
        let (hits, total) = oracle_measure(&s, &sc);
        assert_eq!((hits, total), (4, 6));
        let m = exact_measure(&s, &sc).unwrap();
        assert_eq!(m.to_string(), "2/3");
    }

    #[test]
    fn tautology_and_contradiction() {
        let sc = quadratic_scenario(2);
        let a = TestSentence::exists("f");
        let taut = a.clone().or(a.clone().not());
        assert_eq!(exact_measure(&taut, &sc).unwrap().to_string(), "1/1");
        let contra = a.clone().and(a.not());
        assert_eq!(exact_measure(&contra, &sc).unwrap().to_string(), "0/1");
        let mc = monte_carlo(&contra, &sc, 1000, 5).unwrap();
        assert_eq!(mc.mean, 0.0);
        assert_eq!(mc.stderr, 0.0);
    }

    #[test]
    fn recognize_flags_undeclared_atoms() {
        let sc = quadratic_scenario(1);
        let s = TestSentence::exists("g");
        assert_eq!(recognize(&s, &sc), Err("g".to_string()));
        let nested = TestSentence::exists("f")
            .and(TestSentence::exists("f").not())
            .not();
        assert_eq!(recognize(&nested, &sc), Ok(()));
    }

    #[test]
    fn identity_tuple_satisfies_atoms() {
        let sc = cubic_scenario(2);
        let s = TestSentence::exists("f");
        assert!(holds_in_fixed_field(&[0, 0], &s, &sc));
        // a 3-cycle fixes nothing
        let three_cycle = sc
            .group()
            .elements()
            .find(|&g| sc.group().element_order(g) == 3)
            .unwrap();
        assert!(!holds_in_fixed_field(&[three_cycle, 0], &s, &sc));
        assert!(holds_in_fixed_field(&[three_cycle, 0], &s.clone().not(), &sc));
    }

    #[test]
    fn inclusion_exclusion_and_complement() {
        let sc = cubic_scenario(2);
        let a = TestSentence::exists("f");
        let b = TestSentence::exists("f").not().not();
        let m = |s: &TestSentence| exact_measure(s, &sc).unwrap().value;
        let union = m(&a.clone().or(b.clone()));
        let inter = m(&a.clone().and(b.clone()));
        assert_eq!(union + inter, m(&a) + m(&b));
        let one = BigRational::one();
        assert_eq!(m(&a.clone().not()), one - m(&a));
    }

    #[test]
    fn measure_invariant_under_inflation() {
        // replacing the group by G x Z2 acting through the projection keeps
        // the measure
        let sc = cubic_scenario(1);
        let s = TestSentence::exists("f");
        let base = exact_measure(&s, &sc).unwrap();

        let inflated_group = sc.group().direct_product(&FiniteGroup::cyclic(2));
        let action: Vec<Vec<usize>> = inflated_group
            .elements()
            .map(|x| sc.action[x / 2].clone())
            .collect();
        let inflated = GaloisScenario::new(
            inflated_group,
            sc.roots().to_vec(),
            action,
            sc.polys.clone(),
            sc.splits_totally.clone(),
            1,
        )
        .unwrap();
        let lifted = exact_measure(&s, &inflated).unwrap();
        assert_eq!(base.value, lifted.value);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_converges() {
        let sc = quadratic_scenario(1);
        let s = TestSentence::exists("f");
        let a = monte_carlo(&s, &sc, 10_000, 7).unwrap();
        let b = monte_carlo(&s, &sc, 10_000, 7).unwrap();
        assert_eq!(a.mean, b.mean);
        assert!((a.mean - 0.5).abs() <= 3.0 * a.stderr.max(1e-9));
    }

    #[test]
    fn sentence_parser_roundtrip() {
        for text in [
            "Exists(f)",
            "Exists(f) | !Exists(g)",
            "!(Exists(f) & Exists(g)) | Exists(h)",
            "!!Exists(f)",
        ] {
            let s = TestSentence::parse(text).unwrap();
            let printed = s.to_string();
            assert_eq!(TestSentence::parse(&printed).unwrap(), s, "{text} -> {printed}");
        }
        assert!(TestSentence::parse("Exists(f) &").is_err());
    }

    #[test]
    fn capacity_guard() {
        let sc = quadratic_scenario(40);
        let s = TestSentence::exists("f");
        assert!(matches!(
            exact_measure(&s, &sc),
            Err(Error::Capacity { .. })
        ));
    }
}
