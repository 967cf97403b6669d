//! Batch command-line interface: every subcommand is a thin adapter over
//! the library with stable text output and an optional JSON mode.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 capacity limit.

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use pileforge::colang::{self, Assignment};
use pileforge::error::Error;
use pileforge::measure::TestSentence;
use pileforge::ringc::{self, EvalMode, FiniteFieldModel, Polynomial};
use pileforge::{catalog, embedding, files, group, isystem, measure};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "pileforge", version, about = "finite group piles, embedding problems, comodels, ring-formula compilation and exact Haar measures")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    format: String,
    /// Search / enumeration capacity limit (defaults per operation).
    #[arg(long, global = true)]
    limit: Option<u64>,
    /// Close family inputs under conjugation instead of requiring closed
    /// sets in pile files.
    #[arg(long, global = true)]
    auto_close: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Finite group operations.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Group pile operations.
    Pile {
        #[command(subcommand)]
        cmd: PileCmd,
    },
    /// Embedding problems.
    Ep {
        #[command(subcommand)]
        cmd: EpCmd,
    },
    /// Inverse systems.
    Isys {
        #[command(subcommand)]
        cmd: IsysCmd,
    },
    /// Coformulas and the bounded cotheory.
    Co {
        #[command(subcommand)]
        cmd: CoCmd,
    },
    /// Ring-formula compilation and evaluation.
    Compile {
        #[command(subcommand)]
        cmd: CompileCmd,
    },
    /// Exact and Monte-Carlo Haar measures.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// The bundled small-group catalog.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Args)]
struct InFile {
    /// Input file.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormulaArg {
    /// Formula text.
    #[arg(long)]
    formula: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

impl FormulaArg {
    fn text(&self) -> anyhow::Result<String> {
        match (&self.formula, &self.formula_file) {
            (Some(t), None) => Ok(t.clone()),
            (None, Some(p)) => Ok(std::fs::read_to_string(p)?),
            _ => Err(anyhow!("give exactly one of --formula / --formula-file")),
        }
    }
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Validate a group file, reporting the failed axiom on rejection.
    Validate(InFile),
    /// List all subgroups.
    Subgroups(InFile),
    /// Minimal size of a generating set.
    Rank(InFile),
    /// Quotient by a normal subgroup.
    Quotient {
        #[command(flatten)]
        input: InFile,
        /// Elements of the normal subgroup, comma separated.
        #[arg(long)]
        normal: String,
    },
    /// All surjective homomorphisms onto a second group.
    Epis {
        #[command(flatten)]
        input: InFile,
        /// Target group file.
        #[arg(long)]
        onto: PathBuf,
    },
}

#[derive(Subcommand)]
enum PileCmd {
    /// Validate a pile file.
    Validate(InFile),
    /// Classification flags.
    Classify {
        #[command(flatten)]
        input: InFile,
        /// Values of e to query, comma separated.
        #[arg(long, default_value = "0,1,2")]
        e: String,
    },
    /// The derived pile G' and the bar quotient.
    Derived(InFile),
    /// Quotient pile by a normal subgroup.
    Quotient {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        normal: String,
    },
}

#[derive(Subcommand)]
enum EpCmd {
    /// Check local solvability, printing the witness table.
    LsCheck(InFile),
    /// Solve the problem (first solution, or all).
    Solve {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        all: bool,
    },
    /// Rigid product of the deficient reducts.
    RigidProduct(InFile),
    /// Quotient problem by a normal subgroup of B.
    Quotient {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        normal: String,
    },
    /// Dominate by a rigid e-bounded problem.
    Dominate {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        e: usize,
    },
}

#[derive(Subcommand)]
enum IsysCmd {
    /// Encode a deficient pile file as an inverse system.
    Encode {
        #[command(flatten)]
        input: InFile,
        /// Keep only levels of index at most this bound.
        #[arg(long)]
        upto: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a system file back to a pile.
    Decode(InFile),
    /// Check the nine inverse-system axioms.
    Validate(InFile),
    /// Encode then decode a pile and verify the round trip.
    Roundtrip(InFile),
}

#[derive(Subcommand)]
enum CoCmd {
    /// Parse a coformula and print its canonical form.
    Parse {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate a coformula on an inverse system.
    Eval {
        /// System file.
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Generate the bounded cotheory axioms.
    TcGen {
        #[arg(long)]
        e: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long)]
        kmax: usize,
        /// Prime labels, comma separated.
        #[arg(long, default_value = "p")]
        labels: String,
    },
    /// Bounded C-pile check against the catalog.
    CpileCheck {
        /// Pile file.
        #[arg(long)]
        pile: PathBuf,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum CompileCmd {
    /// Compile a coformula to a ring formula.
    Cocompile {
        #[command(flatten)]
        formula: FormulaArg,
        /// Rank bounds of the free variables, comma separated.
        #[arg(long, default_value = "")]
        degrees: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the standalone admissibility formula.
    Alpha {
        #[arg(long)]
        lambda: usize,
        #[arg(long, default_value = "")]
        degrees: String,
    },
    /// Emit the algebraic no-root axioms from explicit polynomial lists.
    Talg {
        /// JSON file: {"no_root_in_tot": [[coeffs]], "no_root_in_r": {"p": [[coeffs]]}}.
        #[command(flatten)]
        input: InFile,
    },
    /// Evaluate a compiled ring formula over a finite field.
    EvalFf {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value = "guided", value_parser = ["guided", "brute"])]
        mode: String,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Exact measure of a test sentence.
    Exact {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        sentence: String,
    },
    /// Monte-Carlo estimate.
    Mc {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        sentence: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the bundled groups.
    List,
    /// Write every catalog group as a JSON file into a directory.
    Dump {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_elems(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|e| anyhow!("bad element list: {e}")))
        .collect()
}

/// Catalog groups, honoring the PILEFORGE_CATALOG override directory.
fn catalog_groups() -> anyhow::Result<Vec<pileforge::FiniteGroup>> {
    match std::env::var_os("PILEFORGE_CATALOG") {
        None => Ok(catalog::catalog()),
        Some(dir) => {
            let mut out = Vec::new();
            let mut entries: Vec<PathBuf> = std::fs::read_dir(Path::new(&dir))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            for path in entries {
                out.push(files::load_group(&path)?);
            }
            if out.is_empty() {
                return Err(anyhow!("no group files in PILEFORGE_CATALOG directory"));
            }
            Ok(out)
        }
    }
}

fn emit(format: &str, text: String, value: serde_json::Value) {
    if format == "json" {
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        println!("{text}");
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let format = cli.format.clone();
    let limit = cli.limit.unwrap_or(2_000_000);
    let tuple_limit = cli.limit.unwrap_or(measure::DEFAULT_TUPLE_LIMIT);
    let auto_close = cli.auto_close;
    match cli.command {
        Cmd::Group { cmd } => match cmd {
            GroupCmd::Validate(f) => {
                let g = files::load_group(&f.input)?;
                emit(
                    &format,
                    format!("valid group of order {}", g.order()),
                    json!({"valid": true, "order": g.order(), "name": g.name()}),
                );
            }
            GroupCmd::Subgroups(f) => {
                let g = files::load_group(&f.input)?;
                let subs = group::subgroups_limited(&g, limit)?;
                let lists: Vec<Vec<usize>> =
                    subs.iter().map(|s| s.elements().to_vec()).collect();
                emit(
                    &format,
                    format!(
                        "{} subgroups\n{}",
                        subs.len(),
                        lists
                            .iter()
                            .map(|l| format!("{l:?}"))
                            .collect::<Vec<_>>()
                            .join("\n")
                    ),
                    json!({"count": subs.len(), "subgroups": lists}),
                );
            }
            GroupCmd::Rank(f) => {
                let g = files::load_group(&f.input)?;
                let r = group::rank(&g);
                emit(&format, format!("{r}"), json!({"rank": r}));
            }
            GroupCmd::Quotient { input, normal } => {
                let g = files::load_group(&input.input)?;
                let n = pileforge::Subgroup::new(&g, parse_elems(&normal)?)?;
                let (q, proj) = group::quotient(&g, &n)?;
                emit(
                    &format,
                    format!(
                        "quotient of order {}\nprojection: {:?}",
                        q.order(),
                        proj.map_table()
                    ),
                    json!({"order": q.order(), "mul": q.mul_rows(), "projection": proj.map_table()}),
                );
            }
            GroupCmd::Epis { input, onto } => {
                let g = files::load_group(&input.input)?;
                let h = files::load_group(&onto)?;
                let epis = group::epimorphisms_limited(&g, &h, limit)?;
                let maps: Vec<Vec<usize>> =
                    epis.iter().map(|f| f.map_table().to_vec()).collect();
                emit(
                    &format,
                    format!(
                        "{} epimorphisms\n{}",
                        maps.len(),
                        maps.iter().map(|m| format!("{m:?}")).collect::<Vec<_>>().join("\n")
                    ),
                    json!({"count": maps.len(), "maps": maps}),
                );
            }
        },
        Cmd::Pile { cmd } => match cmd {
            PileCmd::Validate(f) => {
                let pile = files::load_pile(&f.input, auto_close)?;
                let diags = pile.validate();
                let ok = diags.is_empty();
                let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                emit(
                    &format,
                    if ok { "valid pile".into() } else { lines.join("\n") },
                    json!({"valid": ok, "diagnostics": lines}),
                );
                if !ok {
                    std::process::exit(1);
                }
            }
            PileCmd::Classify { input, e } => {
                let pile = files::load_pile(&input.input, auto_close)?;
                let e_values = parse_elems(&e)?;
                let flags = pile.classify(&e_values);
                let text = format!(
                    "separated: {}\nreduced: {}\nself_generated: {}\ndeficient: {}\nbare: {}\ne_generated: {:?}\ne_bounded: {:?}",
                    flags.separated,
                    flags.reduced,
                    flags.self_generated,
                    flags.deficient,
                    flags.bare,
                    flags.e_generated,
                    flags.e_bounded
                );
                emit(
                    &format,
                    text,
                    json!({
                        "separated": flags.separated,
                        "reduced": flags.reduced,
                        "self_generated": flags.self_generated,
                        "deficient": flags.deficient,
                        "bare": flags.bare,
                        "e_generated": flags.e_generated,
                        "e_bounded": flags.e_bounded,
                    }),
                );
            }
            PileCmd::Derived(f) => {
                let pile = files::load_pile(&f.input, auto_close)?;
                let (derived, sub) = pile.derived_pile();
                let (bar, _) = pile.bar_pile();
                emit(
                    &format,
                    format!(
                        "G' = {:?} of order {}\nbar group of order {}",
                        sub.elements(),
                        derived.group().order(),
                        bar.group().order()
                    ),
                    json!({
                        "derived_subgroup": sub.elements(),
                        "derived_order": derived.group().order(),
                        "bar_order": bar.group().order(),
                    }),
                );
            }
            PileCmd::Quotient { input, normal } => {
                let pile = files::load_pile(&input.input, auto_close)?;
                let n = pileforge::Subgroup::new(pile.group(), parse_elems(&normal)?)?;
                let (q, _) = pile.quotient(&n)?;
                let fams: BTreeMap<String, Vec<Vec<usize>>> = q
                    .families()
                    .iter()
                    .map(|(p, fam)| {
                        (p.clone(), fam.iter().map(|s| s.elements().to_vec()).collect())
                    })
                    .collect();
                emit(
                    &format,
                    format!("quotient pile of order {}, families {fams:?}", q.group().order()),
                    json!({"order": q.group().order(), "families": fams}),
                );
            }
        },
        Cmd::Ep { cmd } => match cmd {
            EpCmd::LsCheck(f) => {
                let ep = files::load_ep(&f.input, auto_close)?;
                let report = embedding::check_ls_limited(&ep, limit)?;
                let mut lines = vec![format!("locally solvable: {}", report.holds)];
                for w in &report.witnesses {
                    let dir = if w.from_g { "G->B" } else { "B->G" };
                    match &w.matched {
                        Some((partner, graph)) => lines.push(format!(
                            "  [{}] {} {:?} ~ {:?} via {:?}",
                            w.label,
                            dir,
                            w.source.elements(),
                            partner.elements(),
                            graph
                        )),
                        None => lines.push(format!(
                            "  [{}] {} {:?} UNMATCHED",
                            w.label,
                            dir,
                            w.source.elements()
                        )),
                    }
                }
                let rows: Vec<serde_json::Value> = report
                    .witnesses
                    .iter()
                    .map(|w| {
                        json!({
                            "label": w.label,
                            "from_g": w.from_g,
                            "source": w.source.elements(),
                            "matched": w.matched.as_ref().map(|(s, g)| json!({
                                "partner": s.elements(),
                                "map": g,
                            })),
                        })
                    })
                    .collect();
                emit(
                    &format,
                    lines.join("\n"),
                    json!({"holds": report.holds, "witnesses": rows}),
                );
                if !report.holds {
                    std::process::exit(1);
                }
            }
            EpCmd::Solve { input, all } => {
                let ep = files::load_ep(&input.input, auto_close)?;
                let sols = if all {
                    embedding::solve_all_limited(&ep, usize::MAX, limit)?
                } else {
                    embedding::solve_all_limited(&ep, 1, limit)?
                };
                let maps: Vec<Vec<usize>> = sols
                    .iter()
                    .map(|s| s.gamma.underlying().map_table().to_vec())
                    .collect();
                emit(
                    &format,
                    if maps.is_empty() {
                        "no solution".into()
                    } else {
                        maps.iter().map(|m| format!("{m:?}")).collect::<Vec<_>>().join("\n")
                    },
                    json!({"solutions": maps}),
                );
            }
            EpCmd::RigidProduct(f) => {
                let ep = files::load_ep(&f.input, auto_close)?;
                let b_def = ep.b().deficient_reduct();
                let a_def = ep.a().deficient_reduct();
                let g_def = ep.g().deficient_reduct();
                let alpha = pileforge::PileHom::new(
                    b_def.clone(),
                    a_def.clone(),
                    ep.alpha().underlying().clone(),
                )?;
                let phi = pileforge::PileHom::new(
                    g_def.clone(),
                    a_def.clone(),
                    ep.phi().underlying().clone(),
                )?;
                let (prod, pi, beta) =
                    embedding::rigid_product(&b_def, &a_def, &g_def, &alpha, &phi, limit)?;
                emit(
                    &format,
                    format!(
                        "rigid product of order {}; pi epi: {}, beta epi: {}, beta rigid: {}",
                        prod.group().order(),
                        pi.is_pile_epi(),
                        beta.is_pile_epi(),
                        beta.is_rigid()
                    ),
                    json!({
                        "order": prod.group().order(),
                        "pi_epi": pi.is_pile_epi(),
                        "beta_epi": beta.is_pile_epi(),
                        "beta_rigid": beta.is_rigid(),
                    }),
                );
            }
            EpCmd::Quotient { input, normal } => {
                let ep = files::load_ep(&input.input, auto_close)?;
                let n = pileforge::Subgroup::new(ep.b().group(), parse_elems(&normal)?)?;
                let q = embedding::quotient_ep(&ep, &n)?;
                let ls = embedding::check_ls_limited(&q, limit)?;
                emit(
                    &format,
                    format!(
                        "quotient problem: B of order {}, A of order {}, locally solvable: {}",
                        q.b().group().order(),
                        q.a().group().order(),
                        ls.holds
                    ),
                    json!({
                        "b_order": q.b().group().order(),
                        "a_order": q.a().group().order(),
                        "locally_solvable": ls.holds,
                    }),
                );
            }
            EpCmd::Dominate { input, e } => {
                let ep = files::load_ep(&input.input, auto_close)?;
                let d = embedding::dominate(&ep, e, limit)?;
                let ok = embedding::verify_domination(&ep, &d, e);
                emit(
                    &format,
                    format!(
                        "dominated: Bhat of order {}, alphahat rigid: {}, contracts hold: {ok}",
                        d.bhat.group().order(),
                        d.alphahat.is_rigid()
                    ),
                    json!({
                        "bhat_order": d.bhat.group().order(),
                        "alphahat_rigid": d.alphahat.is_rigid(),
                        "verified": ok,
                    }),
                );
            }
        },
        Cmd::Isys { cmd } => match cmd {
            IsysCmd::Encode { input, upto, out } => {
                let pile = files::load_pile(&input.input, auto_close)?;
                let sys = match upto {
                    Some(n) => isystem::encode_upto(&pile, n)?,
                    None => isystem::encode(&pile)?,
                };
                if let Some(path) = out {
                    files::save_system(&path, &sys)?;
                }
                emit(
                    &format,
                    format!("{} points, {} levels", sys.n_points(), sys.levels().len()),
                    json!({"points": sys.n_points(), "levels": sys.levels().len()}),
                );
            }
            IsysCmd::Decode(f) => {
                let sys = files::load_system(&f.input)?;
                let pile = sys.decode()?;
                emit(
                    &format,
                    format!("pile over a group of order {}", pile.group().order()),
                    json!({"order": pile.group().order()}),
                );
            }
            IsysCmd::Validate(f) => {
                let sys = files::load_system(&f.input)?;
                let diags = sys.validate_axioms();
                let ok = diags.is_empty();
                let lines: Vec<String> =
                    diags.iter().map(|(a, w)| format!("axiom ({a}): {w}")).collect();
                emit(
                    &format,
                    if ok { "valid inverse system".into() } else { lines.join("\n") },
                    json!({"valid": ok, "violations": lines}),
                );
                if !ok {
                    std::process::exit(1);
                }
            }
            IsysCmd::Roundtrip(f) => {
                let pile = files::load_pile(&f.input, auto_close)?;
                let decoded = isystem::encode(&pile)?.decode()?;
                let ok = decoded.is_isomorphic_to(&pile);
                emit(
                    &format,
                    format!("round trip isomorphic: {ok}"),
                    json!({"isomorphic": ok}),
                );
                if !ok {
                    std::process::exit(1);
                }
            }
        },
        Cmd::Co { cmd } => match cmd {
            CoCmd::Parse { formula } => {
                let f = colang::parse(&formula.text()?)?;
                emit(
                    &format,
                    f.to_string(),
                    json!({"canonical": f.to_string(), "sentence": f.is_sentence()}),
                );
            }
            CoCmd::Eval { system, formula } => {
                let sys = files::load_system(&system)?;
                let f = colang::parse(&formula.text()?)?;
                let value = colang::cosatisfies(&sys, &f, &Assignment::new())?;
                emit(&format, format!("{value}"), json!({"value": value}));
            }
            CoCmd::TcGen { e, nmax, kmax, labels } => {
                let labels: Vec<&str> = labels.split(',').filter(|s| !s.is_empty()).collect();
                let axioms = colang::generate_tc(e, nmax, kmax, &labels, limit)?;
                let mut lines = Vec::new();
                let mut rows = Vec::new();
                for ax in &axioms {
                    lines.push(format!("{:?}: {}", ax.kind, ax.rendered));
                    rows.push(json!({
                        "kind": format!("{:?}", ax.kind),
                        "sentence": ax.rendered.to_string(),
                    }));
                }
                emit(
                    &format,
                    format!("{} axioms\n{}", axioms.len(), lines.join("\n")),
                    json!({"count": axioms.len(), "axioms": rows}),
                );
            }
            CoCmd::CpileCheck { pile: pile_path, e, bound } => {
                let pile = files::load_pile(&pile_path, auto_close)?;
                let report = colang::check_cpile_bounded(&pile, e, bound, limit)?;
                emit(
                    &format,
                    report.to_string(),
                    json!({
                        "checked": report.problems_checked,
                        "failures": report.failures.len(),
                        "passed": report.passed(),
                    }),
                );
                if !report.passed() {
                    std::process::exit(1);
                }
            }
        },
        Cmd::Compile { cmd } => match cmd {
            CompileCmd::Cocompile { formula, degrees, out } => {
                let f = colang::parse(&formula.text()?)?;
                let degs = parse_elems(&degrees)?;
                let prog = ringc::compile(&f, &degs)?;
                let text = prog.to_string();
                if let Some(path) = out {
                    std::fs::write(&path, &text)?;
                }
                emit(
                    &format,
                    format!("{} variables, {} nodes", prog.n_vars, prog.formula.size()),
                    json!({"vars": prog.n_vars, "nodes": prog.formula.size()}),
                );
            }
            CompileCmd::Alpha { lambda, degrees } => {
                let degs = parse_elems(&degrees)?;
                let prog = ringc::emit_admissibility(lambda, &degs)?;
                emit(
                    &format,
                    format!("{} variables, {} nodes\n{}", prog.n_vars, prog.formula.size(), prog),
                    json!({
                        "vars": prog.n_vars,
                        "nodes": prog.formula.size(),
                        "formula": prog.to_string(),
                    }),
                );
            }
            CompileCmd::Talg { input } => {
                #[derive(serde::Deserialize)]
                struct TalgFile {
                    #[serde(default)]
                    no_root_in_tot: Vec<Vec<i64>>,
                    #[serde(default)]
                    no_root_in_r: BTreeMap<String, Vec<Vec<i64>>>,
                }
                let text = std::fs::read_to_string(&input.input)?;
                let file: TalgFile = serde_json::from_str(&text)?;
                let tot: Vec<Polynomial> =
                    file.no_root_in_tot.into_iter().map(Polynomial::new).collect();
                let per_label: BTreeMap<String, Vec<Polynomial>> = file
                    .no_root_in_r
                    .into_iter()
                    .map(|(k, v)| (k, v.into_iter().map(Polynomial::new).collect()))
                    .collect();
                let sentences = ringc::emit_talg(&tot, &per_label);
                let lines: Vec<String> = sentences.iter().map(|s| s.to_string()).collect();
                emit(
                    &format,
                    lines.join("\n"),
                    json!({"count": sentences.len(), "sentences": lines}),
                );
            }
            CompileCmd::EvalFf { input, q, max_degree, mode } => {
                let text = std::fs::read_to_string(&input.input)?;
                let prog = ringc::parse_program(&text)?;
                let model = FiniteFieldModel::new(q, max_degree)?;
                let mode = if mode == "brute" { EvalMode::Brute } else { EvalMode::Guided };
                let value = ringc::eval_ring_limited(&prog, &model, mode, limit)?;
                emit(&format, format!("{value}"), json!({"value": value}));
            }
        },
        Cmd::Measure { cmd } => match cmd {
            MeasureCmd::Exact { scenario, sentence } => {
                let sc = files::load_scenario(&scenario)?;
                let s = TestSentence::parse(&sentence)?;
                let m = measure::exact_measure_limited(&s, &sc, tuple_limit.max(1))?;
                emit(
                    &format,
                    format!("{m}"),
                    json!({"fraction": m.to_string(), "decimal": m.as_f64()}),
                );
            }
            MeasureCmd::Mc { scenario, sentence, samples, seed } => {
                let sc = files::load_scenario(&scenario)?;
                let s = TestSentence::parse(&sentence)?;
                let est = measure::monte_carlo(&s, &sc, samples, seed)?;
                emit(
                    &format,
                    est.to_string(),
                    json!({
                        "mean": est.mean,
                        "stderr": est.stderr,
                        "samples": est.samples,
                        "seed": est.seed,
                        "algorithm": est.algorithm,
                    }),
                );
            }
        },
        Cmd::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                let groups = catalog_groups()?;
                let rows: Vec<String> = groups
                    .iter()
                    .map(|g| format!("{} (order {})", g.name().unwrap_or("?"), g.order()))
                    .collect();
                emit(
                    &format,
                    rows.join("\n"),
                    json!({
                        "groups": groups
                            .iter()
                            .map(|g| json!({"name": g.name(), "order": g.order()}))
                            .collect::<Vec<_>>(),
                    }),
                );
            }
            CatalogCmd::Dump { out } => {
                std::fs::create_dir_all(&out)?;
                let groups = catalog_groups()?;
                for (i, g) in groups.iter().enumerate() {
                    let name = g
                        .name()
                        .map(|n| n.replace(['(', ')', '^'], "_"))
                        .unwrap_or_else(|| format!("group{i}"));
                    files::save_group(&out.join(format!("{i:03}_{name}.json")), g)?;
                }
                emit(
                    &format,
                    format!("wrote {} groups", groups.len()),
                    json!({"written": groups.len()}),
                );
            }
        },
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Capacity { .. }) => 3,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}
