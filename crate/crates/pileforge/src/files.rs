//! JSON file formats: groups (table or permutation generators), piles,
//! embedding problems, inverse systems and Galois scenarios. Pile, group and
//! problem references may be inline objects or paths relative to the
//! referencing file.

use crate::embedding::EmbeddingProblem;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHom, Subgroup};
use crate::isystem::InverseSystem;
use crate::measure::GaloisScenario;
use crate::pile::{GroupPile, PileHom};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupFile {
    Table {
        order: usize,
        mul: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Perms {
        degree: usize,
        perm_gens: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

impl GroupFile {
    pub fn into_group(self) -> Result<FiniteGroup> {
        match self {
            GroupFile::Table { order, mul, name } => {
                if mul.len() != order {
                    return Err(Error::InvalidGroup(format!(
                        "declared order {order} does not match the table size {}",
                        mul.len()
                    )));
                }
                FiniteGroup::from_table(mul, name)
            }
            GroupFile::Perms { degree, perm_gens, name } => {
                FiniteGroup::from_permutations(degree, &perm_gens, name)
            }
        }
    }

    pub fn from_group(g: &FiniteGroup) -> GroupFile {
        GroupFile::Table {
            order: g.order(),
            mul: g.mul_rows(),
            name: g.name().map(String::from),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

impl GroupRef {
    fn resolve(self, base: &Path) -> Result<FiniteGroup> {
        match self {
            GroupRef::Inline(f) => f.into_group(),
            GroupRef::Path(p) => load_group(&base.join(p)),
        }
    }
}

pub fn load_group(path: &Path) -> Result<FiniteGroup> {
    let text = std::fs::read_to_string(path)?;
    let file: GroupFile = serde_json::from_str(&text)?;
    file.into_group()
}

pub fn save_group(path: &Path, g: &FiniteGroup) -> Result<()> {
    let file = GroupFile::from_group(g);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PileFile {
    pub group: GroupRef,
    /// Subgroups as sorted element lists; defaults to the deficient class.
    #[serde(default)]
    pub class0: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub families: BTreeMap<String, Vec<Vec<usize>>>,
}

/// Loads a pile. With `auto_close`, the class-0 entry and every family are
/// closed under conjugation before validation; otherwise the file must list
/// complete conjugation-closed sets.
pub fn load_pile(path: &Path, auto_close: bool) -> Result<GroupPile> {
    let text = std::fs::read_to_string(path)?;
    let file: PileFile = serde_json::from_str(&text)?;
    pile_from_file(file, path.parent().unwrap_or(Path::new(".")), auto_close)
}

pub fn pile_from_file(file: PileFile, base: &Path, auto_close: bool) -> Result<GroupPile> {
    let group = file.group.resolve(base)?;
    let parse_sub = |elems: &[usize]| Subgroup::new(&group, elems.iter().copied());
    let class0: Vec<Subgroup> = match &file.class0 {
        None => vec![Subgroup::trivial()],
        Some(list) => list
            .iter()
            .map(|e| parse_sub(e))
            .collect::<Result<Vec<_>>>()?,
    };
    let families: Vec<(String, Vec<Subgroup>)> = file
        .families
        .iter()
        .map(|(p, list)| {
            let subs: Result<Vec<Subgroup>> = list.iter().map(|e| parse_sub(e)).collect();
            Ok((p.clone(), subs?))
        })
        .collect::<Result<Vec<_>>>()?;
    if auto_close {
        let rep = class0
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("class0 must be nonempty".into()))?;
        GroupPile::from_representatives(group, rep, families)
    } else {
        GroupPile::new(group, class0, families)
    }
}

pub fn save_pile(path: &Path, pile: &GroupPile) -> Result<()> {
    let file = PileFile {
        group: GroupRef::Inline(GroupFile::from_group(pile.group())),
        class0: Some(pile.class0().iter().map(|s| s.elements().to_vec()).collect()),
        families: pile
            .families()
            .iter()
            .map(|(p, fam)| {
                (p.clone(), fam.iter().map(|s| s.elements().to_vec()).collect())
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PileRef {
    Path(String),
    Inline(PileFile),
}

impl PileRef {
    fn resolve(self, base: &Path, auto_close: bool) -> Result<GroupPile> {
        match self {
            PileRef::Path(p) => load_pile(&base.join(p), auto_close),
            PileRef::Inline(f) => pile_from_file(f, base, auto_close),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EpFile {
    pub g: PileRef,
    pub a: PileRef,
    pub b: PileRef,
    /// Element map tables of the two epimorphisms.
    pub phi: Vec<usize>,
    pub alpha: Vec<usize>,
}

pub fn load_ep(path: &Path, auto_close: bool) -> Result<EmbeddingProblem> {
    let text = std::fs::read_to_string(path)?;
    let file: EpFile = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let g = file.g.resolve(base, auto_close)?;
    let a = file.a.resolve(base, auto_close)?;
    let b = file.b.resolve(base, auto_close)?;
    let phi_hom = GroupHom::new(g.group().clone(), a.group().clone(), file.phi)?;
    let alpha_hom = GroupHom::new(b.group().clone(), a.group().clone(), file.alpha)?;
    let phi = PileHom::new(g, a.clone(), phi_hom)?;
    let alpha = PileHom::new(b, a, alpha_hom)?;
    EmbeddingProblem::new(phi, alpha)
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct SystemFile {
    pub points: usize,
    #[serde(default)]
    pub leq: Vec<(usize, usize)>,
    #[serde(default)]
    pub sqsub: Vec<(usize, usize)>,
    #[serde(default)]
    pub p: Vec<(usize, usize, usize)>,
    /// Optional explicit Gn sets, keyed by the bound.
    #[serde(default)]
    pub gn: BTreeMap<String, Vec<usize>>,
    /// Family member sets per label; each set lies inside one level.
    #[serde(default)]
    pub families: BTreeMap<String, Vec<Vec<usize>>>,
}

pub fn load_system(path: &Path) -> Result<InverseSystem> {
    let text = std::fs::read_to_string(path)?;
    let file: SystemFile = serde_json::from_str(&text)?;
    system_from_file(file)
}

pub fn system_from_file(file: SystemFile) -> Result<InverseSystem> {
    let gn: Result<BTreeMap<usize, BTreeSet<usize>>> = file
        .gn
        .into_iter()
        .map(|(k, v)| {
            let bound: usize = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad Gn key {k}")))?;
            Ok((bound, v.into_iter().collect()))
        })
        .collect();
    let families: BTreeMap<String, Vec<BTreeSet<usize>>> = file
        .families
        .into_iter()
        .map(|(p, sets)| (p, sets.into_iter().map(|s| s.into_iter().collect()).collect()))
        .collect();
    InverseSystem::from_parts(file.points, file.leq, file.sqsub, file.p, gn?, families)
}

pub fn system_to_file(sys: &InverseSystem) -> SystemFile {
    let n = sys.n_points();
    let mut leq = Vec::new();
    let mut sqsub = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if sys.leq(a, b) {
                leq.push((a, b));
            }
            if sys.sqsub(a, b) {
                sqsub.push((a, b));
            }
        }
    }
    let mut p = Vec::new();
    for a in 0..n {
        let level = sys.level_of(a);
        for &b in &level {
            for &c in &level {
                if sys.p(a, b, c) {
                    p.push((a, b, c));
                }
            }
        }
    }
    let families = sys
        .families()
        .iter()
        .map(|(label, fam)| {
            (
                label.clone(),
                fam.iter().map(|s| s.iter().copied().collect()).collect(),
            )
        })
        .collect();
    SystemFile { points: n, leq, sqsub, p, gn: BTreeMap::new(), families }
}

pub fn save_system(path: &Path, sys: &InverseSystem) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&system_to_file(sys))?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub group: GroupRef,
    pub roots: Vec<String>,
    /// Action permutations keyed by element index; any generating subset
    /// suffices, the rest extends multiplicatively.
    pub action: BTreeMap<String, Vec<usize>>,
    pub polys: BTreeMap<String, Vec<String>>,
    pub splits_totally: Vec<String>,
    pub e: usize,
}

pub fn load_scenario(path: &Path) -> Result<GaloisScenario> {
    let text = std::fs::read_to_string(path)?;
    let file: ScenarioFile = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let group = file.group.resolve(base)?;
    let root_index: BTreeMap<&str, usize> = file
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_str(), i))
        .collect();
    let polys: Result<BTreeMap<String, BTreeSet<usize>>> = file
        .polys
        .iter()
        .map(|(name, labels)| {
            let set: Result<BTreeSet<usize>> = labels
                .iter()
                .map(|l| {
                    root_index.get(l.as_str()).copied().ok_or_else(|| {
                        Error::InvalidInput(format!("unknown root label {l} in {name}"))
                    })
                })
                .collect();
            Ok((name.clone(), set?))
        })
        .collect();
    let gen_action: Result<BTreeMap<usize, Vec<usize>>> = file
        .action
        .iter()
        .map(|(k, v)| {
            let g: usize = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad action key {k}")))?;
            Ok((g, v.clone()))
        })
        .collect();
    GaloisScenario::from_generator_action(
        group,
        file.roots.clone(),
        &gen_action?,
        polys?,
        file.splits_totally.into_iter().collect(),
        file.e,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn group_roundtrip_and_perm_input() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("z4.json");
        save_group(&path, &FiniteGroup::cyclic(4)).unwrap();
        let loaded = load_group(&path).unwrap();
        assert_eq!(loaded, FiniteGroup::cyclic(4));

        let perm = dir.path().join("s3.json");
        std::fs::write(
            &perm,
            r#"{"degree": 3, "perm_gens": [[1,0,2],[1,2,0]], "name": "S3"}"#,
        )
        .unwrap();
        let s3 = load_group(&perm).unwrap();
        assert_eq!(s3.order(), 6);
    }

    #[test]
    fn bad_group_file_is_rejected_with_witness() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, r#"{"order": 2, "mul": [[0,1],[1,1]]}"#).unwrap();
        let err = load_group(&path).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("identity") || msg.contains("inverse"), "{msg}");
    }

    #[test]
    fn pile_file_strict_vs_auto_close() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("pile.json");
        // S3 family with a single transposition subgroup: not closed
        std::fs::write(
            &path,
            r#"{
              "group": {"degree": 3, "perm_gens": [[1,0,2],[1,2,0]]},
              "families": {"p": [[0,3]]}
            }"#,
        )
        .unwrap();
        let strict = load_pile(&path, false);
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], None).unwrap();
        let is_closed_already = {
            let sub = Subgroup::new(&s3, [0usize, 3]).is_ok();
            sub && false // the transposition class has three members
        };
        assert!(strict.is_err() || is_closed_already);
        let closed = load_pile(&path, true).unwrap();
        assert_eq!(closed.family("p").unwrap().len(), 3);
    }

    #[test]
    fn system_file_roundtrip() {
        let pile = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
        let sys = crate::isystem::encode(&pile).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("sys.json");
        save_system(&path, &sys).unwrap();
        let loaded = load_system(&path).unwrap();
        assert!(loaded.validate_axioms().is_empty());
        assert_eq!(loaded.n_points(), sys.n_points());
        let decoded = loaded.decode().unwrap();
        assert!(decoded.is_isomorphic_to(&pile));
    }

    #[test]
    fn scenario_file_loads_with_generator_action() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("quad.json");
        std::fs::write(
            &path,
            r#"{
              "group": {"order": 2, "mul": [[0,1],[1,0]]},
              "roots": ["r1", "r2"],
              "action": {"1": [1, 0]},
              "polys": {"f": ["r1", "r2"]},
              "splits_totally": ["f"],
              "e": 1
            }"#,
        )
        .unwrap();
        let sc = load_scenario(&path).unwrap();
        let m = crate::measure::exact_measure(
            &crate::measure::TestSentence::exists("f"),
            &sc,
        )
        .unwrap();
        assert_eq!(m.to_string(), "1/2");
    }
}
