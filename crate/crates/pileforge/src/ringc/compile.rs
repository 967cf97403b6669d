//! Translation of bounded coformulas into ring formulas.
//!
//! Each quantified point variable gets an admissible block; the binding site
//! branches over the exact degree of the field part, so atom conditions are
//! emitted against known degrees. The admissibility side conditions sit
//! under `Admissibility` markers: canonical tower encodings satisfy them by
//! construction, so guided evaluation skips them while brute evaluation
//! checks everything.
//!
//! Family atoms translate to subgroup-closure conditions on the transported
//! automorphisms plus a declared `ClosureRoot_<label>` predicate carrying
//! the root-transfer criterion; the predicate stays opaque here.

use super::{collect_pred_decls, Block, Entry, RingFormula, RingProgram, Term, VarId};
use crate::colang::CoFormula;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Full compositum field axioms are emitted only up to this padded
/// dimension; beyond it the blocks are out of brute-force reach and carry
/// the cheap structural clauses only.
const FULL_CSTAR_AXIOMS_UPTO: usize = 2;

struct Compiler {
    next_var: VarId,
}

#[derive(Clone)]
struct SlotCtx {
    block: Block,
    degree: usize,
}

fn lcm(a: usize, b: usize) -> usize {
    a / super::ff::gcd(a, b) * b
}

fn lcm_upto(n: usize) -> usize {
    (1..=n.max(1)).fold(1, lcm)
}

impl Compiler {
    fn fresh(&mut self) -> VarId {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn table2(&mut self, rows: usize, cols: usize, vars: &mut Vec<VarId>) -> Vec<Vec<Entry>> {
        (0..rows)
            .map(|t| {
                (0..cols)
                    .map(|l| {
                        if t == 0 {
                            if l == 0 {
                                Entry::One
                            } else {
                                Entry::Zero
                            }
                        } else {
                            let v = self.fresh();
                            vars.push(v);
                            Entry::Var(v)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn table3(&mut self, dim: usize, vars: &mut Vec<VarId>) -> Vec<Vec<Vec<Entry>>> {
        (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|k| {
                        (0..dim)
                            .map(|l| {
                                if j == 0 {
                                    if k == l {
                                        Entry::One
                                    } else {
                                        Entry::Zero
                                    }
                                } else if k == 0 {
                                    if j == l {
                                        Entry::One
                                    } else {
                                        Entry::Zero
                                    }
                                } else {
                                    let v = self.fresh();
                                    vars.push(v);
                                    Entry::Var(v)
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn make_block(&mut self, slot: usize, bound: usize, ctx: &[SlotCtx]) -> Block {
        let max_bound = ctx
            .iter()
            .map(|s| s.block.bound)
            .chain(std::iter::once(bound))
            .max()
            .unwrap();
        let mdim = lcm_upto(max_bound);
        let prev_mdims: Vec<usize> = ctx.iter().map(|s| s.block.mdim).collect();
        let mut vars = Vec::new();
        let c = self.table3(bound, &mut vars);
        let sigma = self.table2(bound, bound, &mut vars);
        let cstar = self.table3(mdim, &mut vars);
        let eps = self.table2(bound, mdim, &mut vars);
        let cross = prev_mdims
            .iter()
            .map(|&mj| self.table2(mj, mdim, &mut vars))
            .collect();
        Block { slot, bound, mdim, prev_mdims, c, sigma, cstar, eps, cross, vars }
    }

    fn fresh_many(&mut self, n: usize) -> Vec<VarId> {
        (0..n).map(|_| self.fresh()).collect()
    }
}

fn entry_term(e: &Entry) -> Term {
    e.term()
}

/// Algebra-table helpers: symbolic multiplication of coordinate rows.
fn mul_rows(table: &[Vec<Vec<Entry>>], a: &[Term], b: &[Term]) -> Vec<Term> {
    let dim = table.len();
    (0..dim)
        .map(|l| {
            let mut acc = Term::zero();
            for (j, aj) in a.iter().enumerate().take(dim) {
                if aj == &Term::Const(0) {
                    continue;
                }
                for (k, bk) in b.iter().enumerate().take(dim) {
                    if bk == &Term::Const(0) {
                        continue;
                    }
                    let c = entry_term(&table[j][k][l]);
                    acc = acc.add(aj.clone().mul(bk.clone()).mul(c));
                }
            }
            acc
        })
        .collect()
}

fn row_terms(rows: &[Vec<Entry>], t: usize) -> Vec<Term> {
    rows[t].iter().map(entry_term).collect()
}

fn eq_rows(a: &[Term], b: &[Term]) -> Vec<RingFormula> {
    a.iter()
        .zip(b)
        .map(|(x, y)| RingFormula::Eq(x.clone(), y.clone()))
        .collect()
}

fn scaled_sum(coeffs: &[Term], rows: &[Vec<Term>]) -> Vec<Term> {
    let cols = rows.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|l| {
            Term::sum(
                coeffs
                    .iter()
                    .zip(rows)
                    .map(|(w, row)| w.clone().mul(row[l].clone())),
            )
        })
        .collect()
}

/// The image matrix of slot `j`'s extension inside slot `k`'s compositum:
/// row `t` (t < bound_j) is the coordinate vector of the image of the t-th
/// basis vector.
fn g_matrix(ctx: &[SlotCtx], j: usize, k: usize) -> Vec<Vec<Term>> {
    let bj = &ctx[j].block;
    let bk = &ctx[k].block;
    if j == k {
        (0..bj.bound).map(|t| row_terms(&bj.eps, t)).collect()
    } else {
        // eps_j then the cross embedding stored in block k
        let cross = &bk.cross[j];
        (0..bj.bound)
            .map(|t| {
                (0..bk.mdim)
                    .map(|l| {
                        Term::sum((0..bj.mdim).map(|s| {
                            entry_term(&bj.eps[t][s]).mul(entry_term(&cross[s][l]))
                        }))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Row `t` of the composite `g_j ∘ sigma_j` (image of the sigma-image of the
/// t-th basis vector).
fn g_sigma_matrix(ctx: &[SlotCtx], j: usize, k: usize) -> Vec<Vec<Term>> {
    let bj = &ctx[j].block;
    let g = g_matrix(ctx, j, k);
    (0..ctx[j].degree)
        .map(|t| {
            let coeffs: Vec<Term> =
                (0..ctx[j].degree).map(|u| entry_term(&bj.sigma[t][u])).collect();
            scaled_sum(&coeffs, &g[..ctx[j].degree])
        })
        .collect()
}

/// Admissibility clauses of one block at field-part degree `d`.
fn alpha_clauses(comp: &mut Compiler, ctx: &[SlotCtx], slot: usize, d: usize) -> Vec<RingFormula> {
    let block = ctx[slot].block.clone();
    let n = block.bound;
    let m = block.mdim;
    let mut out = Vec::new();
    let zero = |e: &Entry, out: &mut Vec<RingFormula>| {
        if let Entry::Var(_) = e {
            out.push(RingFormula::Eq(e.term(), Term::zero()));
        }
    };
    // padding rows and closure columns of the extension algebra vanish
    for j in 1..n {
        for k in 1..n {
            for l in 0..n {
                if j >= d || k >= d || l >= d {
                    zero(&block.c[j][k][l], &mut out);
                }
            }
        }
    }
    // commutativity
    for j in 1..d {
        for k in (j + 1)..d {
            for l in 0..d {
                out.push(RingFormula::Eq(
                    block.c[j][k][l].term(),
                    block.c[k][j][l].term(),
                ));
            }
        }
    }
    // associativity on the field part
    for j in 1..d {
        for k in 1..d {
            for l in 1..d {
                for coord in 0..d {
                    let lhs = Term::sum((0..d).map(|a| {
                        block.c[j][k][a].term().mul(block.c[a][l][coord].term())
                    }));
                    let rhs = Term::sum((0..d).map(|b| {
                        block.c[k][l][b].term().mul(block.c[j][b][coord].term())
                    }));
                    out.push(RingFormula::Eq(lhs, rhs));
                }
            }
        }
    }
    // invertibility of nonzero elements of the field part
    if d > 1 {
        let z = comp.fresh_many(d);
        let w = comp.fresh_many(d);
        let z_terms: Vec<Term> = z.iter().map(|&v| Term::Var(v)).collect();
        let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
        let c_rows: Vec<Vec<Vec<Entry>>> =
            block.c.iter().take(d).map(|p| p.iter().take(d).cloned().collect()).collect();
        let prod = mul_rows(&c_rows, &z_terms[..], &w_terms[..]);
        let mut unit_eqs: Vec<RingFormula> = Vec::new();
        for (l, p) in prod.iter().enumerate().take(d) {
            let target = if l == 0 { Term::one() } else { Term::zero() };
            unit_eqs.push(RingFormula::Eq(p.clone(), target));
        }
        let z_nonzero = RingFormula::Not(Box::new(RingFormula::And(
            z_terms
                .iter()
                .map(|t| RingFormula::Eq(t.clone(), Term::zero()))
                .collect(),
        )));
        out.push(RingFormula::Forall(
            z,
            Box::new(RingFormula::or_all(vec![
                z_nonzero.not(),
                RingFormula::Exists(w, Box::new(RingFormula::and_all(unit_eqs))),
            ])),
        ));
    }
    // sigma: zero rows beyond the field part, image inside the field part,
    // multiplicativity
    for t in 1..n {
        for l in 0..n {
            if t >= d || l >= d {
                zero(&block.sigma[t][l], &mut out);
            }
        }
    }
    for t in 1..d {
        for s in 1..d {
            // sigma(e_t) * sigma(e_s) = sigma(e_t e_s)
            let st: Vec<Term> = (0..d).map(|a| block.sigma[t][a].term()).collect();
            let ss: Vec<Term> = (0..d).map(|b| block.sigma[s][b].term()).collect();
            let c_rows: Vec<Vec<Vec<Entry>>> = block
                .c
                .iter()
                .take(d)
                .map(|p| p.iter().take(d).cloned().collect())
                .collect();
            let lhs = mul_rows(&c_rows, &st, &ss);
            let rhs: Vec<Term> = (0..d)
                .map(|l| {
                    Term::sum(
                        (0..d).map(|u| block.c[t][s][u].term().mul(block.sigma[u][l].term())),
                    )
                })
                .collect();
            out.extend(eq_rows(&lhs, &rhs));
        }
    }
    // compositum algebra clauses: shape per divisor of the padded dimension
    let divisors: Vec<usize> = (1..=m).filter(|dd| m % dd == 0).collect();
    let mut cstar_branches = Vec::new();
    for &dstar in &divisors {
        if dstar < d {
            continue; // the compositum contains the extension
        }
        let mut parts = Vec::new();
        for j in 1..m {
            for k in 1..m {
                for l in 0..m {
                    if (j >= dstar || k >= dstar || l >= dstar)
                        && matches!(block.cstar[j][k][l], Entry::Var(_))
                    {
                        parts.push(RingFormula::Eq(
                            block.cstar[j][k][l].term(),
                            Term::zero(),
                        ));
                    }
                }
            }
        }
        if m <= FULL_CSTAR_AXIOMS_UPTO {
            for j in 1..dstar {
                for k in (j + 1)..dstar {
                    for l in 0..dstar {
                        parts.push(RingFormula::Eq(
                            block.cstar[j][k][l].term(),
                            block.cstar[k][j][l].term(),
                        ));
                    }
                }
            }
            for j in 1..dstar {
                for k in 1..dstar {
                    for l in 1..dstar {
                        for coord in 0..dstar {
                            let lhs = Term::sum((0..dstar).map(|a| {
                                block.cstar[j][k][a]
                                    .term()
                                    .mul(block.cstar[a][l][coord].term())
                            }));
                            let rhs = Term::sum((0..dstar).map(|b| {
                                block.cstar[k][l][b]
                                    .term()
                                    .mul(block.cstar[j][b][coord].term())
                            }));
                            parts.push(RingFormula::Eq(lhs, rhs));
                        }
                    }
                }
            }
            if dstar > 1 {
                let z = comp.fresh_many(dstar);
                let w = comp.fresh_many(dstar);
                let z_terms: Vec<Term> = z.iter().map(|&v| Term::Var(v)).collect();
                let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
                let cs_rows: Vec<Vec<Vec<Entry>>> = block
                    .cstar
                    .iter()
                    .take(dstar)
                    .map(|p| p.iter().take(dstar).cloned().collect())
                    .collect();
                let prod = mul_rows(&cs_rows, &z_terms, &w_terms);
                let mut unit_eqs = Vec::new();
                for (l, p) in prod.iter().enumerate().take(dstar) {
                    let target = if l == 0 { Term::one() } else { Term::zero() };
                    unit_eqs.push(RingFormula::Eq(p.clone(), target));
                }
                let z_zero = RingFormula::And(
                    z_terms
                        .iter()
                        .map(|t| RingFormula::Eq(t.clone(), Term::zero()))
                        .collect(),
                );
                parts.push(RingFormula::Forall(
                    z,
                    Box::new(RingFormula::or_all(vec![
                        z_zero,
                        RingFormula::Exists(w, Box::new(RingFormula::and_all(unit_eqs))),
                    ])),
                ));
            }
        }
        cstar_branches.push(RingFormula::and_all(parts));
    }
    out.push(RingFormula::or_all(cstar_branches));
    // eps: embedding of the extension into the compositum
    for t in 1..n {
        if t >= d {
            for l in 0..m {
                zero(&block.eps[t][l], &mut out);
            }
        }
    }
    for t in 1..d {
        for s in 1..d {
            let et = row_terms(&block.eps, t);
            let es = row_terms(&block.eps, s);
            let lhs = mul_rows(&block.cstar, &et, &es);
            let rhs: Vec<Term> = (0..m)
                .map(|l| {
                    Term::sum((0..d).map(|u| block.c[t][s][u].term().mul(block.eps[u][l].term())))
                })
                .collect();
            out.extend(eq_rows(&lhs, &rhs));
        }
    }
    // cross embeddings from the enclosing composita, with composition
    // compatibility; multiplicativity ranges over all rows since padding
    // rows multiply to zero in both algebras
    for j in 0..block.prev_mdims.len() {
        let mj = block.prev_mdims[j];
        let prev = &ctx[j].block;
        for a in 1..mj {
            for b in 1..mj {
                let ra = row_terms(&block.cross[j], a);
                let rb = row_terms(&block.cross[j], b);
                let lhs = mul_rows(&block.cstar, &ra, &rb);
                let rhs: Vec<Term> = (0..m)
                    .map(|l| {
                        Term::sum((0..mj).map(|u| {
                            prev.cstar[a][b][u].term().mul(block.cross[j][u][l].term())
                        }))
                    })
                    .collect();
                out.extend(eq_rows(&lhs, &rhs));
            }
        }
        // composition: cross_k->slot = cross_j->slot ∘ cross_k->j
        for k in 0..j {
            let mk = block.prev_mdims[k];
            let kj = &ctx[j].block.cross[k];
            for a in 0..mk {
                for l in 0..m {
                    let composed = Term::sum((0..ctx[j].block.mdim).map(|s| {
                        entry_term(&kj[a][s]).mul(entry_term(&block.cross[j][s][l]))
                    }));
                    out.push(RingFormula::Eq(composed, block.cross[k][a][l].term()));
                }
            }
        }
    }
    out
}

/// Containment condition: the image of slot `j`'s extension lies inside the
/// image of slot `i`'s (`x_i <= x_j` in the co-language).
fn containment_condition(comp: &mut Compiler, ctx: &[SlotCtx], i: usize, j: usize) -> RingFormula {
    let k = i.max(j);
    let g_i = g_matrix(ctx, i, k);
    let g_j = g_matrix(ctx, j, k);
    let d_i = ctx[i].degree;
    let d_j = ctx[j].degree;
    let mut parts = Vec::new();
    for t in 0..d_j {
        let w = comp.fresh_many(d_i);
        let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
        let span = scaled_sum(&w_terms, &g_i[..d_i]);
        let eqs = eq_rows(&g_j[t], &span);
        parts.push(RingFormula::Exists(w, Box::new(RingFormula::and_all(eqs))));
    }
    RingFormula::and_all(parts)
}

/// Coset-containment condition `x_i [= x_j`: level containment plus the
/// automorphisms agreeing under restriction.
fn sqsub_condition(comp: &mut Compiler, ctx: &[SlotCtx], i: usize, j: usize) -> RingFormula {
    let k = i.max(j);
    let g_i = g_matrix(ctx, i, k);
    let g_j = g_matrix(ctx, j, k);
    let gs_i = g_sigma_matrix(ctx, i, k);
    let gs_j = g_sigma_matrix(ctx, j, k);
    let d_i = ctx[i].degree;
    let d_j = ctx[j].degree;
    let mut parts = Vec::new();
    for t in 0..d_j {
        let w = comp.fresh_many(d_i);
        let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
        let span = scaled_sum(&w_terms, &g_i[..d_i]);
        let span_sigma = scaled_sum(&w_terms, &gs_i[..d_i]);
        let mut eqs = eq_rows(&g_j[t], &span);
        eqs.extend(eq_rows(&gs_j[t], &span_sigma));
        parts.push(RingFormula::Exists(w, Box::new(RingFormula::and_all(eqs))));
    }
    RingFormula::and_all(parts)
}

/// Product condition `P(x_a, x_b, x_c)`: equal levels and the transported
/// automorphisms composing.
fn p_condition(comp: &mut Compiler, ctx: &[SlotCtx], a: usize, b: usize, c: usize) -> RingFormula {
    let d = ctx[c].degree;
    if ctx[a].degree != d || ctx[b].degree != d {
        return RingFormula::False;
    }
    let k = a.max(b).max(c);
    let g_a = g_matrix(ctx, a, k);
    let g_b = g_matrix(ctx, b, k);
    let g_c = g_matrix(ctx, c, k);
    let gs_a = g_sigma_matrix(ctx, a, k);
    let gs_b = g_sigma_matrix(ctx, b, k);
    let gs_c = g_sigma_matrix(ctx, c, k);
    let mut parts = vec![
        containment_condition(comp, ctx, a, c),
        containment_condition(comp, ctx, b, c),
    ];
    for t in 0..d {
        let w = comp.fresh_many(d);
        let wp = comp.fresh_many(d);
        let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
        let wp_terms: Vec<Term> = wp.iter().map(|&v| Term::Var(v)).collect();
        // g_c(e_t) expressed in g_b; its sigma_b image expressed in g_a;
        // the sigma_a image of that must be g_c(sigma_c e_t)
        let mut eqs = eq_rows(&g_c[t], &scaled_sum(&w_terms, &g_b[..d]));
        eqs.extend(eq_rows(
            &scaled_sum(&w_terms, &gs_b[..d]),
            &scaled_sum(&wp_terms, &g_a[..d]),
        ));
        eqs.extend(eq_rows(&scaled_sum(&wp_terms, &gs_a[..d]), &gs_c[t]));
        parts.push(RingFormula::Exists(
            w,
            Box::new(RingFormula::Exists(wp, Box::new(RingFormula::and_all(eqs)))),
        ));
    }
    RingFormula::and_all(parts)
}

/// Family-atom condition: equal levels, subgroup closure of the transported
/// automorphisms, and the opaque root-transfer criterion.
fn gpn_condition(
    comp: &mut Compiler,
    ctx: &[SlotCtx],
    label: &str,
    bound: usize,
    slots: &[usize],
) -> RingFormula {
    let d = ctx[slots[0]].degree;
    if d > bound || slots.iter().any(|&s| ctx[s].degree != d) {
        return RingFormula::False;
    }
    let mut parts = Vec::new();
    for &s in &slots[1..] {
        parts.push(containment_condition(comp, ctx, slots[0], s));
        parts.push(containment_condition(comp, ctx, s, slots[0]));
    }
    // closure under composition
    for &a in slots {
        for &b in slots {
            let alts: Vec<RingFormula> =
                slots.iter().map(|&c| p_condition(comp, ctx, a, b, c)).collect();
            parts.push(RingFormula::or_all(alts));
        }
    }
    // root-transfer criterion over the fixed field, with the closure
    // predicate left opaque
    let k = *slots.iter().max().unwrap();
    let g0 = g_matrix(ctx, slots[0], k);
    let m = ctx[k].block.mdim;
    let coeffs = comp.fresh_many(d + 1);
    let coeff_terms: Vec<Term> = coeffs.iter().map(|&v| Term::Var(v)).collect();
    // z in the level field: z = sum u_t g0(e_t)
    let root_in = |comp: &mut Compiler, fixed: bool, ctx: &[SlotCtx]| -> RingFormula {
        let u = comp.fresh_many(d);
        let u_terms: Vec<Term> = u.iter().map(|&v| Term::Var(v)).collect();
        let z = scaled_sum(&u_terms, &g0[..d]);
        // powers of z in compositum coordinates
        let mut powers: Vec<Vec<Term>> = Vec::with_capacity(d + 1);
        let mut unit = vec![Term::zero(); m];
        unit[0] = Term::one();
        powers.push(unit);
        for _ in 0..d {
            let prev = powers.last().unwrap().clone();
            powers.push(mul_rows(&ctx[k].block.cstar, &prev, &z));
        }
        let f_of_z: Vec<Term> = (0..m)
            .map(|l| {
                Term::sum(
                    coeff_terms
                        .iter()
                        .zip(&powers)
                        .map(|(cr, zr)| cr.clone().mul(zr[l].clone())),
                )
            })
            .collect();
        let mut eqs: Vec<RingFormula> =
            f_of_z.into_iter().map(|t| RingFormula::Eq(t, Term::zero())).collect();
        if fixed {
            for &s in slots {
                let gs = g_sigma_matrix(ctx, s, k);
                let g_s = g_matrix(ctx, s, k);
                let v = comp.fresh_many(d);
                let v_terms: Vec<Term> = v.iter().map(|&x| Term::Var(x)).collect();
                let mut sub = eq_rows(&z, &scaled_sum(&v_terms, &g_s[..d]));
                sub.extend(eq_rows(&scaled_sum(&v_terms, &gs[..d]), &z));
                eqs.push(RingFormula::Exists(v, Box::new(RingFormula::and_all(sub))));
            }
        }
        RingFormula::Exists(u, Box::new(RingFormula::and_all(eqs)))
    };
    let has_root = root_in(comp, false, ctx);
    let has_fixed_root = root_in(comp, true, ctx);
    let mut pred_args = coeff_terms.clone();
    pred_args.push(Term::Const(d as i64));
    let pred = RingFormula::Pred(format!("ClosureRoot_{label}"), pred_args);
    let iff = RingFormula::and_all(vec![
        RingFormula::or_all(vec![has_fixed_root.clone().not(), pred.clone()]),
        RingFormula::or_all(vec![pred.not(), has_fixed_root]),
    ]);
    parts.push(RingFormula::Forall(
        coeffs,
        Box::new(RingFormula::or_all(vec![has_root.not(), iff])),
    ));
    RingFormula::and_all(parts)
}

fn rec(
    comp: &mut Compiler,
    formula: &CoFormula,
    ctx: &mut Vec<SlotCtx>,
    scope: &mut HashMap<String, Vec<usize>>,
) -> Result<RingFormula> {
    let slot_of = |v: &str, scope: &HashMap<String, Vec<usize>>| -> Result<usize> {
        scope
            .get(v)
            .and_then(|stack| stack.last().copied())
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    };
    Ok(match formula {
        CoFormula::Leq(a, b) => {
            let (i, j) = (slot_of(a, scope)?, slot_of(b, scope)?);
            // x_i <= x_j: the level of j is a quotient, so its field sits
            // inside the field of i
            containment_condition(comp, ctx, i, j)
        }
        CoFormula::Sqsub(a, b) => {
            let (i, j) = (slot_of(a, scope)?, slot_of(b, scope)?);
            sqsub_condition(comp, ctx, i, j)
        }
        CoFormula::P(a, b, c) => {
            let (i, j, k) = (slot_of(a, scope)?, slot_of(b, scope)?, slot_of(c, scope)?);
            p_condition(comp, ctx, i, j, k)
        }
        CoFormula::Eq(a, b) => {
            let (i, j) = (slot_of(a, scope)?, slot_of(b, scope)?);
            if ctx[i].degree != ctx[j].degree {
                RingFormula::False
            } else {
                sqsub_condition(comp, ctx, i, j)
            }
        }
        CoFormula::Gn(n, v) => {
            let i = slot_of(v, scope)?;
            if ctx[i].degree <= *n {
                RingFormula::True
            } else {
                RingFormula::False
            }
        }
        CoFormula::Gpn(label, n, args) => {
            let slots: Result<Vec<usize>> =
                args.iter().map(|a| slot_of(a, scope)).collect();
            gpn_condition(comp, ctx, label, *n, &slots?)
        }
        CoFormula::Not(f) => rec(comp, f, ctx, scope)?.not(),
        CoFormula::And(a, b) => RingFormula::and_all(vec![
            rec(comp, a, ctx, scope)?,
            rec(comp, b, ctx, scope)?,
        ]),
        CoFormula::Or(a, b) => RingFormula::or_all(vec![
            rec(comp, a, ctx, scope)?,
            rec(comp, b, ctx, scope)?,
        ]),
        CoFormula::Implies(a, b) => RingFormula::or_all(vec![
            rec(comp, a, ctx, scope)?.not(),
            rec(comp, b, ctx, scope)?,
        ]),
        CoFormula::Exists(v, n, body) => {
            quantifier(comp, v, *n, body, false, ctx, scope)?
        }
        CoFormula::Forall(v, n, body) => {
            quantifier(comp, v, *n, body, true, ctx, scope)?
        }
    })
}

fn quantifier(
    comp: &mut Compiler,
    v: &str,
    n: usize,
    body: &CoFormula,
    negated: bool,
    ctx: &mut Vec<SlotCtx>,
    scope: &mut HashMap<String, Vec<usize>>,
) -> Result<RingFormula> {
    let slot = ctx.len();
    let block = comp.make_block(slot, n, ctx);
    let mut branches = Vec::new();
    for d in 1..=n {
        ctx.push(SlotCtx { block: block.clone(), degree: d });
        scope.entry(v.to_string()).or_default().push(slot);
        let inner = rec(comp, body, ctx, scope)?;
        let inner = if negated { inner.not() } else { inner };
        let alpha = RingFormula::Admissibility(Box::new(RingFormula::and_all(
            alpha_clauses(comp, ctx, slot, d),
        )));
        scope.get_mut(v).unwrap().pop();
        ctx.pop();
        branches.push(RingFormula::and_all(vec![alpha, inner]));
    }
    let node = RingFormula::ExistsBlock(block, Box::new(RingFormula::or_all(branches)));
    Ok(if negated { node.not() } else { node })
}

/// Compiles a bounded coformula. `degrees` supplies the rank bound of each
/// free variable in first-occurrence order (empty for sentences); a missing
/// bound is an error.
pub fn compile(formula: &CoFormula, degrees: &[usize]) -> Result<RingProgram> {
    let free = formula.free_vars();
    if free.len() != degrees.len() {
        let missing = free.get(degrees.len()).cloned().unwrap_or_else(|| "?".into());
        return Err(Error::UnrankedVariable(missing));
    }
    let mut comp = Compiler { next_var: 0 };
    let mut ctx: Vec<SlotCtx> = Vec::new();
    let mut scope: HashMap<String, Vec<usize>> = HashMap::new();
    let mut free_blocks = Vec::new();
    for (i, (name, &bound)) in free.iter().zip(degrees).enumerate() {
        if bound == 0 {
            return Err(Error::UnrankedVariable(name.clone()));
        }
        let block = comp.make_block(i, bound, &ctx);
        ctx.push(SlotCtx { block: block.clone(), degree: 1 });
        scope.entry(name.clone()).or_default().push(i);
        free_blocks.push(block);
    }
    // branch over the exact degrees of the free slots
    let mut degree_choices: Vec<Vec<usize>> = vec![Vec::new()];
    for &bound in degrees {
        let mut next = Vec::new();
        for partial in &degree_choices {
            for d in 1..=bound {
                let mut ext = partial.clone();
                ext.push(d);
                next.push(ext);
            }
        }
        degree_choices = next;
    }
    let mut branches = Vec::new();
    for choice in degree_choices {
        for (i, &d) in choice.iter().enumerate() {
            ctx[i].degree = d;
        }
        let mut parts = Vec::new();
        for i in 0..choice.len() {
            parts.push(RingFormula::Admissibility(Box::new(RingFormula::and_all(
                alpha_clauses(&mut comp, &ctx, i, choice[i]),
            ))));
        }
        parts.push(rec(&mut comp, formula, &mut ctx, &mut scope)?);
        branches.push(RingFormula::and_all(parts));
    }
    let out = if branches.len() == 1 {
        branches.pop().unwrap()
    } else {
        RingFormula::or_all(branches)
    };
    let decls = collect_pred_decls(&out);
    Ok(RingProgram { n_vars: comp.next_var, decls, formula: out })
}

/// The standalone admissibility formula for `lambda` blocks with the given
/// rank bounds, including the compositum spanning clause (every compositum
/// basis vector is a combination of products of embedded subfield basis
/// vectors). Free variables are the block tables.
pub fn emit_admissibility(lambda: usize, bounds: &[usize]) -> Result<RingProgram> {
    if bounds.len() != lambda {
        return Err(Error::InvalidInput(format!(
            "expected {lambda} bounds, got {}",
            bounds.len()
        )));
    }
    if lambda == 0 {
        return Ok(RingProgram { n_vars: 0, decls: Vec::new(), formula: RingFormula::True });
    }
    let mut comp = Compiler { next_var: 0 };
    let mut ctx: Vec<SlotCtx> = Vec::new();
    for (i, &bound) in bounds.iter().enumerate() {
        let block = comp.make_block(i, bound, &ctx);
        ctx.push(SlotCtx { block, degree: 1 });
    }
    let mut degree_choices: Vec<Vec<usize>> = vec![Vec::new()];
    for &bound in bounds {
        let mut next = Vec::new();
        for partial in &degree_choices {
            for d in 1..=bound {
                let mut ext = partial.clone();
                ext.push(d);
                next.push(ext);
            }
        }
        degree_choices = next;
    }
    let mut branches = Vec::new();
    for choice in degree_choices {
        for (i, &d) in choice.iter().enumerate() {
            ctx[i].degree = d;
        }
        let mut parts = Vec::new();
        for i in 0..lambda {
            parts.extend(alpha_clauses(&mut comp, &ctx, i, choice[i]));
            parts.push(compositum_spanning_clause(&mut comp, &ctx, i));
        }
        branches.push(RingFormula::and_all(parts));
    }
    let formula = RingFormula::or_all(branches);
    let decls = collect_pred_decls(&formula);
    Ok(RingProgram { n_vars: comp.next_var, decls, formula })
}

/// Every basis vector of the compositum of the first `i + 1` extensions is
/// spanned by products of one embedded basis vector per extension. The
/// compositum degree is taken as the least common multiple of the chosen
/// extension degrees.
fn compositum_spanning_clause(comp: &mut Compiler, ctx: &[SlotCtx], i: usize) -> RingFormula {
    let dstar = ctx[..=i].iter().fold(1, |acc, s| lcm(acc, s.degree));
    let m = ctx[i].block.mdim;
    // all product vectors of one basis image per slot
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for s in ctx.iter().take(i + 1) {
        let mut next = Vec::new();
        for partial in &tuples {
            for t in 0..s.degree {
                let mut ext = partial.clone();
                ext.push(t);
                next.push(ext);
            }
        }
        tuples = next;
    }
    let mut products: Vec<Vec<Term>> = Vec::with_capacity(tuples.len());
    for tuple in &tuples {
        let mut acc = vec![Term::zero(); m];
        acc[0] = Term::one();
        for (j, &t) in tuple.iter().enumerate() {
            let g = g_matrix(ctx, j, i);
            acc = mul_rows(&ctx[i].block.cstar, &acc, &g[t]);
        }
        products.push(acc);
    }
    let mut parts = Vec::new();
    for s in 0..dstar {
        let w = comp.fresh_many(products.len());
        let w_terms: Vec<Term> = w.iter().map(|&v| Term::Var(v)).collect();
        let span = scaled_sum(&w_terms, &products);
        let target: Vec<Term> = (0..m)
            .map(|l| if l == s { Term::one() } else { Term::zero() })
            .collect();
        parts.push(RingFormula::Exists(
            w,
            Box::new(RingFormula::and_all(eq_rows(&target, &span))),
        ));
    }
    RingFormula::and_all(parts)
}

/// A univariate polynomial with integer coefficients, low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub coeffs: Vec<i64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Polynomial { coeffs }
    }

    fn term_at(&self, x: VarId) -> Term {
        // Horner
        let mut acc = Term::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(Term::Var(x)).add(Term::Const(c));
        }
        acc
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (r, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match r {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "x")?,
                1 => write!(f, "{c}*x")?,
                _ if c == 1 => write!(f, "x^{r}")?,
                _ => write!(f, "{c}*x^{r}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The algebraic-part axioms: one no-root sentence per polynomial, with the
/// per-label lists guarded by the declared opaque predicate `R_<label>`.
pub fn emit_talg(
    no_root_in_tot: &[Polynomial],
    no_root_in_r: &std::collections::BTreeMap<String, Vec<Polynomial>>,
) -> Vec<RingProgram> {
    let mut out = Vec::new();
    for f in no_root_in_tot {
        let x: VarId = 0;
        let formula = RingFormula::Not(Box::new(RingFormula::Exists(
            vec![x],
            Box::new(RingFormula::Eq(f.term_at(x), Term::zero())),
        )));
        out.push(RingProgram { n_vars: 1, decls: Vec::new(), formula });
    }
    for (label, polys) in no_root_in_r {
        for f in polys {
            let x: VarId = 0;
            let formula = RingFormula::Not(Box::new(RingFormula::Exists(
                vec![x],
                Box::new(RingFormula::and_all(vec![
                    RingFormula::Pred(format!("R_{label}"), vec![Term::Var(x)]),
                    RingFormula::Eq(f.term_at(x), Term::zero()),
                ])),
            )));
            let decls = collect_pred_decls(&formula);
            out.push(RingProgram { n_vars: 1, decls, formula });
        }
    }
    out
}
