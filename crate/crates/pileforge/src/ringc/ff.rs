//! Finite-field tower used as the differential-testing oracle: one top field
//! `F_{p^L}` with `L = lcm(1..=max_degree)` represented as a polynomial
//! quotient, and per-divisor subfield data (canonical generator, power
//! basis, structure constants, Frobenius matrices, inclusion matrices).
//!
//! All exported tables are coordinate data over the base field `F_p`; the
//! tower exists only to compute them canonically.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap};

type Fp = u64;

/// An element of the top field as a coefficient vector of length `L`.
type Elt = Vec<Fp>;

pub struct FiniteFieldModel {
    p: u64,
    max_degree: usize,
    ell: usize,
    /// Monic irreducible of degree `ell` over `F_p`, low-to-high, length
    /// `ell + 1` with leading coefficient 1.
    modulus: Vec<Fp>,
    sub: BTreeMap<usize, Subfield>,
    pred_stubs: HashMap<String, Box<dyn Fn(&[u64]) -> bool + Send + Sync>>,
}

struct Subfield {
    degree: usize,
    basis: Vec<Elt>,          // 1, g, ..., g^{d-1}
    solver: CoordSolver,      // expresses subfield elements in the basis
    structure: Vec<Vec<Vec<Fp>>>, // c[j][k] = coords of g^j * g^k
}

impl std::fmt::Debug for FiniteFieldModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteFieldModel(p = {}, tower to degree {})", self.p, self.max_degree)
    }
}

impl FiniteFieldModel {
    /// Builds the tower for quantifier bounds up to `max_degree`.
    pub fn new(p: u64, max_degree: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("base characteristic {p} is not prime")));
        }
        if max_degree == 0 || max_degree > 6 {
            return Err(Error::InvalidInput(
                "supported tower degrees are 1..=6".into(),
            ));
        }
        let ell = (1..=max_degree).fold(1usize, |acc, d| lcm(acc, d));
        let modulus = find_irreducible(p, ell);
        let mut model = FiniteFieldModel {
            p,
            max_degree,
            ell,
            modulus,
            sub: BTreeMap::new(),
            pred_stubs: HashMap::new(),
        };
        let primitive = model.find_primitive();
        let mut divisors: Vec<usize> = (1..=ell).filter(|d| ell % d == 0).collect();
        divisors.sort_unstable();
        for d in divisors {
            let exponent = (pow_u128(p as u128, ell as u32) - 1) / (pow_u128(p as u128, d as u32) - 1);
            let gen = model.pow_elt(&primitive, exponent);
            let basis: Vec<Elt> = {
                let mut b = Vec::with_capacity(d);
                let mut cur = model.one();
                for _ in 0..d {
                    b.push(cur.clone());
                    cur = model.mul_elt(&cur, &gen);
                }
                b
            };
            let solver = CoordSolver::new(p, &basis);
            let mut structure = vec![vec![Vec::new(); d]; d];
            for j in 0..d {
                for k in 0..d {
                    let prod = model.mul_elt(&basis[j], &basis[k]);
                    structure[j][k] = solver
                        .solve(&prod)
                        .expect("products stay inside the subfield");
                }
            }
            model.sub.insert(d, Subfield { degree: d, basis, solver, structure });
        }
        Ok(model)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn top_degree(&self) -> usize {
        self.ell
    }

    /// Registers a resolver for a declared opaque predicate. Unresolved
    /// predicates evaluate to false.
    pub fn with_pred_stub(
        mut self,
        name: impl Into<String>,
        f: impl Fn(&[u64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.pred_stubs.insert(name.into(), Box::new(f));
        self
    }

    pub fn resolve_pred(&self, name: &str, args: &[u64]) -> bool {
        self.pred_stubs.get(name).map_or(false, |f| f(args))
    }

    pub fn has_subfield(&self, d: usize) -> bool {
        self.sub.contains_key(&d)
    }

    /// Structure constants of the degree-`d` subfield in its power basis:
    /// `c[j][k][l]` with `g^j g^k = sum_l c[j][k][l] g^l`.
    pub fn structure_constants(&self, d: usize) -> &Vec<Vec<Vec<Fp>>> {
        &self.sub[&d].structure
    }

    /// Matrix of the Frobenius power `x -> x^{p^r}` on the degree-`d`
    /// subfield; row `t` holds the coordinates of `(g^t)^{p^r}`.
    pub fn frobenius_matrix(&self, d: usize, r: usize) -> Vec<Vec<Fp>> {
        let sf = &self.sub[&d];
        let exp = pow_u128(self.p as u128, r as u32);
        (0..d)
            .map(|t| {
                let img = self.pow_elt(&sf.basis[t], exp);
                sf.solver.solve(&img).expect("frobenius preserves the subfield")
            })
            .collect()
    }

    /// Matrix of the canonical inclusion of the degree-`d` subfield into the
    /// degree-`big` subfield (`d` divides `big`); row `t` holds the
    /// coordinates of `g_d^t` in the power basis of `g_big`.
    pub fn inclusion_matrix(&self, d: usize, big: usize) -> Vec<Vec<Fp>> {
        let small = &self.sub[&d];
        let target = &self.sub[&big];
        (0..small.degree)
            .map(|t| {
                target
                    .solver
                    .solve(&small.basis[t])
                    .expect("subfields of the tower nest")
            })
            .collect()
    }

    fn one(&self) -> Elt {
        let mut e = vec![0; self.ell];
        e[0] = 1;
        e
    }

    fn mul_elt(&self, a: &Elt, b: &Elt) -> Elt {
        let l = self.ell;
        let p = self.p;
        let mut raw = vec![0u64; 2 * l - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                raw[i + j] = (raw[i + j] + ai * bj) % p;
            }
        }
        // reduce modulo the monic modulus
        for i in (l..raw.len()).rev() {
            let coef = raw[i];
            if coef == 0 {
                continue;
            }
            raw[i] = 0;
            for (k, &mk) in self.modulus.iter().take(l).enumerate() {
                let idx = i - l + k;
                raw[idx] = (raw[idx] + coef * (p - mk) % p) % p;
            }
        }
        raw.truncate(l);
        raw
    }

    fn pow_elt(&self, base: &Elt, mut exp: u128) -> Elt {
        let mut result = self.one();
        let mut acc = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul_elt(&result, &acc);
            }
            acc = self.mul_elt(&acc, &acc);
            exp >>= 1;
        }
        result
    }

    fn find_primitive(&self) -> Elt {
        let order = pow_u128(self.p as u128, self.ell as u32) - 1;
        let primes = prime_factors(order);
        // candidates: x, x+1, x+2, ..., then x^2 + ... (deterministic scan)
        let mut counter = 0u64;
        loop {
            counter += 1;
            let cand = self.nth_element(counter);
            if cand.iter().all(|&c| c == 0) {
                continue;
            }
            let ok = primes.iter().all(|&r| {
                let e = order / r;
                self.pow_elt(&cand, e) != self.one()
            });
            if ok {
                return cand;
            }
        }
    }

    fn nth_element(&self, n: u64) -> Elt {
        // base-p digits, skipping the constant-only elements first
        let mut e = vec![0; self.ell];
        let mut v = n;
        // start from x so that candidates generate the top field
        if self.ell > 1 {
            e[1] = 1;
        }
        let mut i = 0;
        while v > 0 && i < self.ell {
            e[i] = (e[i] + v % self.p) % self.p;
            v /= self.p;
            i += 1;
        }
        e
    }
}

/// Solves coordinates with respect to a fixed basis by Gaussian elimination
/// over `F_p` (precomputed row echelon of the basis matrix).
struct CoordSolver {
    p: u64,
    dim: usize,             // basis size
    ell: usize,
    rows: Vec<Vec<Fp>>,     // echelon rows of the (basis | identity) system
    pivots: Vec<usize>,
}

impl CoordSolver {
    fn new(p: u64, basis: &[Elt]) -> Self {
        let dim = basis.len();
        let ell = basis[0].len();
        // augmented rows: [basis vector | unit coordinate vector]
        let mut rows: Vec<Vec<Fp>> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut row = b.clone();
                row.extend((0..dim).map(|j| u64::from(j == i)));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..ell {
            let Some(pivot_row) = (rank..dim).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot_row);
            let inv = mod_inv(rows[rank][col], p);
            for x in rows[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..dim {
                if r != rank && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..ell + dim {
                        let sub = factor * rows[rank][c] % p;
                        rows[r][c] = (rows[r][c] + p - sub) % p;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == dim {
                break;
            }
        }
        assert_eq!(rank, dim, "basis vectors must be independent");
        CoordSolver { p, dim, ell, rows, pivots }
    }

    /// Coordinates of `target` in the basis, or None if outside the span.
    fn solve(&self, target: &Elt) -> Option<Vec<Fp>> {
        let mut residual = target.clone();
        let mut coords = vec![0u64; self.dim];
        for (r, &col) in self.pivots.iter().enumerate() {
            let factor = residual[col];
            if factor == 0 {
                continue;
            }
            for c in 0..self.ell {
                let sub = factor * self.rows[r][c] % self.p;
                residual[c] = (residual[c] + self.p - sub) % self.p;
            }
            for (j, coord) in coords.iter_mut().enumerate() {
                *coord = (*coord + factor * self.rows[r][self.ell + j]) % self.p;
            }
        }
        if residual.iter().any(|&x| x != 0) {
            return None;
        }
        Some(coords)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    base.pow(exp)
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat
    let mut result = 1u64;
    let mut acc = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * acc % p;
        }
        acc = acc * acc % p;
        e >>= 1;
    }
    result
}

/// Polynomial arithmetic over F_p for the irreducibility search.
fn poly_mul_mod(a: &[Fp], b: &[Fp], modulus: &[Fp], p: u64) -> Vec<Fp> {
    let deg = modulus.len() - 1;
    let mut raw = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            raw[i + j] = (raw[i + j] + ai * bj) % p;
        }
    }
    for i in (deg..raw.len()).rev() {
        let c = raw[i];
        if c == 0 {
            continue;
        }
        raw[i] = 0;
        for k in 0..deg {
            raw[i - deg + k] = (raw[i - deg + k] + c * (p - modulus[k]) % p) % p;
        }
    }
    raw.truncate(deg);
    while raw.len() < deg {
        raw.push(0);
    }
    raw
}

fn poly_pow_x(e: u128, modulus: &[Fp], p: u64) -> Vec<Fp> {
    // x^e mod modulus
    let deg = modulus.len() - 1;
    let mut result = vec![0u64; deg];
    result[0] = 1;
    let mut base = vec![0u64; deg];
    if deg == 1 {
        // x mod (linear) is a constant
        base[0] = (p - modulus[0]) % p;
    } else {
        base[1] = 1;
    }
    let mut exp = e;
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mul_mod(&result, &base, modulus, p);
        }
        base = poly_mul_mod(&base, &base, modulus, p);
        exp >>= 1;
    }
    result
}

fn poly_gcd(a: &[Fp], b: &[Fp], p: u64) -> Vec<Fp> {
    let trim = |v: &[Fp]| -> Vec<Fp> {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        // a mod b
        let lead_inv = mod_inv(*b.last().unwrap(), p);
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let factor = *a.last().unwrap() * lead_inv % p;
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + p - factor * bc % p) % p;
            }
            a = trim(&a);
            if a.len() < b.len() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
        b = trim(&b);
    }
    a
}

/// First monic irreducible of degree `d` over F_p in lexicographic order of
/// the low coefficients.
fn find_irreducible(p: u64, d: usize) -> Vec<Fp> {
    if d == 1 {
        return vec![0, 1];
    }
    let total = pow_u128(p as u128, d as u32);
    let factors = prime_factors(d as u128);
    let mut counter = 0u128;
    loop {
        // candidate: x^d + (digits of counter)
        let mut cand = vec![0u64; d + 1];
        cand[d] = 1;
        let mut v = counter;
        for c in cand.iter_mut().take(d) {
            *c = (v % p as u128) as u64;
            v /= p as u128;
        }
        counter += 1;
        assert!(counter <= total, "ran out of candidate polynomials");
        // irreducible iff x^{p^d} = x mod cand and gcd(x^{p^{d/r}} - x, cand) = 1
        let xpd = poly_pow_x(pow_u128(p as u128, d as u32), &cand, p);
        let mut x_poly = vec![0u64; d];
        if d > 1 {
            x_poly[1] = 1;
        }
        if xpd != x_poly {
            continue;
        }
        let mut ok = true;
        for &r in &factors {
            let sub = d / r as usize;
            let mut diff = poly_pow_x(pow_u128(p as u128, sub as u32), &cand, p);
            // subtract x
            if d > 1 {
                diff[1] = (diff[1] + p - 1) % p;
            } else {
                diff[0] = (diff[0] + p - 1) % p;
            }
            let g = poly_gcd(&diff, &cand, p);
            if g.len() > 1 {
                ok = false;
                break;
            }
        }
        if ok {
            return cand;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_towers() {
        for p in [2u64, 3, 5] {
            let m = FiniteFieldModel::new(p, 3).unwrap();
            assert_eq!(m.top_degree(), 6);
            for d in [1usize, 2, 3, 6] {
                assert!(m.has_subfield(d));
            }
        }
    }

    #[test]
    fn structure_constants_define_a_field() {
        let m = FiniteFieldModel::new(2, 2).unwrap();
        let c = m.structure_constants(2);
        // power basis: e1^2 = c[1][1]; for F4 over F2 with g a generator,
        // g^2 = g + 1 under the canonical x^2 + x + 1 tower
        assert_eq!(c[0][0], vec![1, 0]);
        assert_eq!(c[0][1], vec![0, 1]);
        // g^2 must not be 0 or 1 (g has degree 2)
        assert_ne!(c[1][1], vec![0, 0]);
        assert_ne!(c[1][1], vec![1, 0]);
    }

    #[test]
    fn frobenius_has_the_right_order() {
        let m = FiniteFieldModel::new(3, 3).unwrap();
        let f1 = m.frobenius_matrix(3, 1);
        let f2 = m.frobenius_matrix(3, 2);
        let f3 = m.frobenius_matrix(3, 3);
        let id = m.frobenius_matrix(3, 0);
        assert_ne!(f1, id);
        assert_ne!(f2, id);
        assert_eq!(f3, id);
        // composing f1 with itself gives f2: check on the generator row
        let d = 3;
        let compose = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
            (0..d)
                .map(|t| {
                    let mut row = vec![0u64; d];
                    for s in 0..d {
                        for l in 0..d {
                            row[l] = (row[l] + a[t][s] * b[s][l]) % 3;
                        }
                    }
                    row
                })
                .collect()
        };
        assert_eq!(compose(&f1, &f1), f2);
    }

    #[test]
    fn inclusions_compose() {
        let m = FiniteFieldModel::new(2, 3).unwrap();
        let i23 = m.inclusion_matrix(2, 6);
        let i36 = m.inclusion_matrix(3, 6);
        assert_eq!(i23.len(), 2);
        assert_eq!(i36.len(), 3);
        // row 0 is always the unit vector
        assert_eq!(i23[0][0], 1);
        assert!(i23[0][1..].iter().all(|&x| x == 0));
        // inclusion respects multiplication: image of g2^1 squared equals
        // image of g2^2
        let c6 = m.structure_constants(6);
        let g2_img = &i23[1];
        let mut sq = vec![0u64; 6];
        for a in 0..6 {
            for b in 0..6 {
                if g2_img[a] == 0 || g2_img[b] == 0 {
                    continue;
                }
                for l in 0..6 {
                    sq[l] = (sq[l] + g2_img[a] * g2_img[b] % 2 * c6[a][b][l]) % 2;
                }
            }
        }
        // g2^2 coords: from the degree-2 structure constants pushed through
        let c2 = m.structure_constants(2);
        let mut expected = vec![0u64; 6];
        for (l, &coef) in c2[1][1].iter().enumerate() {
            if coef != 0 {
                for (i, &x) in i23[l].iter().enumerate() {
                    expected[i] = (expected[i] + coef * x) % 2;
                }
            }
        }
        assert_eq!(sq, expected);
    }
}
