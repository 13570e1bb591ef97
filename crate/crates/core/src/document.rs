//! JSON documents: frame specifications and refutation certificates.
//!
//! Element ids are plain integers. A product group numbers the tuple
//! `(a, b, ...)` lexicographically, so in `Z2 x Z2 x Z2` the tuple
//! `(a, b, c)` is `4a + 2b + c`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::CosetRelationAlgebra;
use crate::frame::{make_iso, FrameError, GroupPair, GroupSystem, GroupTriple, IsoSystem};
use crate::group::{Elem, FiniteGroup, GroupError};
use crate::nonrep::{NonrepError, RefutationSummary};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("group {0:?} is defined twice")]
    DuplicateGroup(String),
    #[error("bad group expression {0:?}")]
    BadGroupExpr(String),
    #[error("pair ({0:?}, {1:?}) is listed twice")]
    DuplicatePair(String, String),
    #[error("pair ({0:?}, {1:?}) must be listed with x <= y in index order")]
    PairOrder(String, String),
    #[error("pair ({0:?}, {1:?}) is missing")]
    MissingPair(String, String),
    #[error("iso for ({x:?}, {y:?}): {reason}")]
    BadIso { x: String, y: String, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// How a group is given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupKind {
    Cyclic {
        n: usize,
    },
    /// Factors are names of earlier groups or `Zn` shorthands.
    Product {
        factors: Vec<String>,
    },
    Table {
        cayley: Vec<Vec<Elem>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: GroupKind,
}

/// `phi_xy : G_x/H -> G_y/K`, given as pairs of coset representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub x: String,
    pub y: String,
    pub h: Vec<Elem>,
    pub k: Vec<Elem>,
    pub iso: Vec<[Elem; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetSpec {
    pub x: String,
    pub y: String,
    pub z: String,
    pub representative: Elem,
}

/// A group triple: groups (the index set, in order), the partition defining
/// `E`, one quotient map per pair `x <= y` of related indices, and the
/// non-identity cosets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpecDocument {
    pub groups: Vec<GroupSpec>,
    pub classes: Vec<Vec<String>>,
    pub pairs: Vec<PairSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cosets: Vec<CosetSpec>,
}

/// Parses `Zn` or `A x B x ...` with `x` or `*` between factors.
pub fn parse_group_expr(expr: &str) -> Result<FiniteGroup, DocumentError> {
    let bad = || DocumentError::BadGroupExpr(expr.to_string());
    let mut out: Option<FiniteGroup> = None;
    for part in expr.split(['x', '*']).map(str::trim) {
        let g = if let Some(n) = part.strip_prefix('Z') {
            FiniteGroup::cyclic(n.parse().map_err(|_| bad())?)?
        } else if let Some(n) = part.strip_prefix('S') {
            FiniteGroup::symmetric(n.parse().map_err(|_| bad())?)?
        } else {
            return Err(bad());
        };
        out = Some(match out {
            None => g,
            Some(acc) => FiniteGroup::direct_product(&acc, &g),
        });
    }
    out.ok_or_else(bad)
}

impl FrameSpecDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn to_triple(&self) -> Result<GroupTriple, DocumentError> {
        let mut built: Vec<(String, Arc<FiniteGroup>)> = Vec::new();
        for spec in &self.groups {
            if built.iter().any(|(n, _)| n == &spec.name) {
                return Err(DocumentError::DuplicateGroup(spec.name.clone()));
            }
            let g = match &spec.kind {
                GroupKind::Cyclic { n } => FiniteGroup::cyclic(*n)?,
                GroupKind::Table { cayley } => FiniteGroup::from_table(cayley.clone())?,
                GroupKind::Product { factors } => {
                    let mut acc: Option<FiniteGroup> = None;
                    for f in factors {
                        let g = match built.iter().find(|(n, _)| n == f) {
                            Some((_, g)) => (**g).clone(),
                            None => parse_group_expr(f).map_err(|_| DocumentError::UnknownGroup(f.clone()))?,
                        };
                        acc = Some(match acc {
                            None => g,
                            Some(a) => FiniteGroup::direct_product(&a, &g),
                        });
                    }
                    acc.ok_or_else(|| DocumentError::BadGroupExpr(spec.name.clone()))?
                }
            };
            built.push((spec.name.clone(), Arc::new(g)));
        }
        let system = GroupSystem::new(built)?;
        let classes = self
            .classes
            .iter()
            .map(|c| c.iter().map(|n| system.index_of(n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut isos = IsoSystem::new(&system, classes)?;

        let mut seen = BTreeMap::new();
        for p in &self.pairs {
            let x = system.index_of(&p.x)?;
            let y = system.index_of(&p.y)?;
            if x > y {
                return Err(DocumentError::PairOrder(p.x.clone(), p.y.clone()));
            }
            if seen.insert((x, y), ()).is_some() {
                return Err(DocumentError::DuplicatePair(p.x.clone(), p.y.clone()));
            }
            if !isos.related(x, y) {
                return Err(FrameError::NotRelated(p.x.clone(), p.y.clone()).into());
            }
            let bad = |reason: String| DocumentError::BadIso { x: p.x.clone(), y: p.y.clone(), reason };
            let (gx, gy) = (system.group(x), system.group(y));
            let dom = crate::frame::quotient_by(gx, &p.h)?;
            let cod = crate::frame::quotient_by(gy, &p.k)?;
            let mut map = vec![usize::MAX; dom.len()];
            for &[a, b] in &p.iso {
                gx.check_elem(a)?;
                gy.check_elem(b)?;
                let i = dom.index_of(a);
                if map[i] != usize::MAX {
                    return Err(bad(format!("coset of {a} is mapped twice")));
                }
                map[i] = cod.index_of(b);
            }
            if let Some(i) = map.iter().position(|&m| m == usize::MAX) {
                return Err(bad(format!("coset of {} is not mapped", dom.coset(i).representative)));
            }
            let iso = make_iso(gx, &p.h, gy, &p.k, map).map_err(|e| bad(e.to_string()))?;
            isos.set_pair(x, y, iso);
        }
        for (x, y) in isos.e2() {
            if x <= y && !seen.contains_key(&(x, y)) {
                return Err(DocumentError::MissingPair(system.name(x).into(), system.name(y).into()));
            }
        }
        let pair = GroupPair::new(system, isos)?;
        let mut reps = BTreeMap::new();
        for c in &self.cosets {
            let key = (pair.system().index_of(&c.x)?, pair.system().index_of(&c.y)?, pair.system().index_of(&c.z)?);
            reps.insert(key, c.representative);
        }
        Ok(GroupTriple::new(pair, &reps)?)
    }

    /// Tables for every group, canonical representatives, and only the
    /// non-identity cosets.
    pub fn from_triple(t: &GroupTriple) -> Self {
        let groups = (0..t.len())
            .map(|x| GroupSpec { name: t.name(x).to_string(), kind: GroupKind::Table { cayley: t.group(x).rows() } })
            .collect();
        Self::with_groups(t, groups)
    }

    /// As [`from_triple`](Self::from_triple) with the group entries supplied.
    pub fn with_groups(t: &GroupTriple, groups: Vec<GroupSpec>) -> Self {
        let name = |x: usize| t.name(x).to_string();
        let classes = t.isos().classes().iter().map(|c| c.iter().map(|&x| name(x)).collect()).collect();
        let mut pairs = Vec::new();
        for (x, y) in t.isos().e2() {
            if x > y {
                continue;
            }
            let iso = t.pair().iso(x, y);
            let (dom, cod) = (iso.domain(), iso.codomain());
            pairs.push(PairSpec {
                x: name(x),
                y: name(y),
                h: dom.normal().elements().to_vec(),
                k: cod.normal().elements().to_vec(),
                iso: (0..dom.len())
                    .map(|i| [dom.coset(i).representative, cod.coset(iso.apply(i)).representative])
                    .collect(),
            });
        }
        let cosets = t
            .representatives()
            .iter()
            .filter(|(&(x, y, z), _)| !t.is_identity_coset(x, y, z))
            .map(|(&(x, y, z), &r)| CosetSpec { x: name(x), y: name(y), z: name(z), representative: r })
            .collect();
        Self { groups, classes, pairs, cosets }
    }
}

/// A refutation run together with the frame it was run on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefutationDocument {
    pub frame: FrameSpecDocument,
    pub summary: RefutationSummary,
}

#[derive(Debug, Error)]
pub enum RecheckError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Nonrep(#[from] NonrepError),
    #[error("summary is inconsistent with its certificates: {0}")]
    Summary(String),
}

impl RefutationDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// Rebuilds the algebra from the embedded frame and replays every certificate.
    pub fn recheck(&self) -> Result<(), RecheckError> {
        let alg = CosetRelationAlgebra::build(&self.frame.to_triple()?).map_err(NonrepError::from)?;
        let s = &self.summary;
        for c in &s.certificates {
            c.revalidate(&alg)?;
        }
        let refuted = s.certificates.iter().filter(|c| c.refuted).count();
        if s.chase_scaffolds != s.certificates.len() {
            return Err(RecheckError::Summary("scaffold count differs from certificate count".into()));
        }
        if s.refuted != refuted || s.all_refuted != (refuted == s.certificates.len() && refuted > 0) {
            return Err(RecheckError::Summary("refutation tallies differ".into()));
        }
        Ok(())
    }
}
