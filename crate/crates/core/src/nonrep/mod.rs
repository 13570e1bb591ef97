//! The pentagon example over `(Z2)^3`, its generalisation to `base^3` for
//! abelian `base`, and a finite certificate of its non-representability.

mod chase;
mod scaffold;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::frame::{
    check_coset_conditions, check_group_frame, check_semi_frame, make_iso, quotient_by, FrameError, GroupPair,
    GroupSystem, GroupTriple, IsoSystem, ValidationReport,
};
use crate::group::{quotient_iso, Elem, FiniteGroup, GroupError, QuotientGroup, QuotientIso};

pub use chase::{
    chase_refute, refute, ChaseRoles, CompositionFact, EdgeIntersection, Membership, Point, RefutationCertificate,
    RefutationSummary,
};
pub use scaffold::{
    enumerate_relaxed_scaffolds, enumerate_scaffolds, scaffold_violations, verify_scaffold_properties, AtomRef,
    Scaffold, ScaffoldReport,
};

/// Vertex names of the pentagon, in index order.
pub const VERTICES: [&str; 5] = ["p", "q", "r", "s", "t"];

const P: usize = 0;
const Q: usize = 1;
const R: usize = 2;
const S: usize = 3;
const T: usize = 4;

/// Edge labels fixed by the prose description of the diagram: `(x, y, label)`.
pub const LABEL_ANCHORS: [(usize, usize, usize); 6] =
    [(P, T, 3), (T, P, 0), (Q, S, 2), (S, Q, 1), (P, Q, 0), (Q, P, 0)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NonrepError {
    #[error("base group must be abelian")]
    NonAbelianBase,
    #[error("base group must be nontrivial")]
    TrivialBase,
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
    #[error("invalid quotient isomorphism choice for ({x}, {y}): {reason}")]
    BadIsoChoice { x: String, y: String, reason: String },
    #[error("no labeling completion admits a coherent iso system")]
    NoCompletion,
    #[error("validation failed: {}", failed_list(.0))]
    Validation(Box<ValidationReport>),
    #[error("scaffolds need a frame with a single class")]
    NotSimple,
    #[error("the chase needs five indices, found {0}")]
    TooFewIndices(usize),
    #[error("chase failed: {0}")]
    ChaseFailed(String),
    #[error("certificate does not re-validate: {0}")]
    CertificateInvalid(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn failed_list(r: &ValidationReport) -> String {
    let mut parts: Vec<String> = r.precondition.iter().cloned().collect();
    for e in r.failures().take(4) {
        let w = e.witness.as_ref().map(|w| w.note.as_str()).unwrap_or("");
        parts.push(format!("{} at {:?} ({w})", e.condition, e.instance));
    }
    parts.join("; ")
}

/// Which of the subgroups `L0..L3` is `H_xy`, for every ordered pair of
/// distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PentagonLabeling {
    labels: [[usize; 5]; 5],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub x: String,
    pub y: String,
    pub label: usize,
}

impl PentagonLabeling {
    /// `labels[x][y]` for `x != y`; diagonal entries are ignored.
    pub fn new(mut labels: [[usize; 5]; 5]) -> Result<Self, NonrepError> {
        for x in 0..5 {
            labels[x][x] = 0;
            let mut seen = [false; 4];
            for y in (0..5).filter(|&y| y != x) {
                let l = labels[x][y];
                if l > 3 {
                    return Err(NonrepError::InvalidLabeling(format!(
                        "label {l} on ({}, {})",
                        VERTICES[x], VERTICES[y]
                    )));
                }
                if seen[l] {
                    return Err(NonrepError::InvalidLabeling(format!("label {l} repeats at vertex {}", VERTICES[x])));
                }
                seen[l] = true;
            }
        }
        Ok(Self { labels })
    }

    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[x][y]
    }

    pub fn satisfies_anchors(&self) -> bool {
        LABEL_ANCHORS.iter().all(|&(x, y, l)| self.labels[x][y] == l)
    }

    /// Labels in lexicographic pair order.
    pub fn entries(&self) -> Vec<LabelEntry> {
        ordered_pairs()
            .map(|(x, y)| LabelEntry { x: VERTICES[x].into(), y: VERTICES[y].into(), label: self.labels[x][y] })
            .collect()
    }

    pub fn from_entries(entries: &[LabelEntry]) -> Result<Self, NonrepError> {
        let mut labels = [[usize::MAX; 5]; 5];
        for e in entries {
            let x = vertex(&e.x)?;
            let y = vertex(&e.y)?;
            labels[x][y] = e.label;
        }
        Self::new(labels)
    }

    /// Every anchored labeling, in lexicographic order of the label vector.
    pub fn anchored() -> Vec<PentagonLabeling> {
        let rows: Vec<Vec<[usize; 5]>> = (0..5)
            .map(|x| {
                permutations4()
                    .into_iter()
                    .map(|perm| {
                        let mut row = [0; 5];
                        let others = (0..5).filter(|&y| y != x);
                        for (y, l) in others.zip(perm) {
                            row[y] = l;
                        }
                        row
                    })
                    .filter(|row| LABEL_ANCHORS.iter().all(|&(ax, y, l)| ax != x || row[y] == l))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = [[0; 5]; 5];
        fn rec(x: usize, rows: &[Vec<[usize; 5]>], cur: &mut [[usize; 5]; 5], out: &mut Vec<PentagonLabeling>) {
            if x == 5 {
                out.push(PentagonLabeling { labels: *cur });
                return;
            }
            for row in &rows[x] {
                cur[x] = *row;
                rec(x + 1, rows, cur, out);
            }
        }
        rec(0, &rows, &mut cur, &mut out);
        out
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

fn vertex(name: &str) -> Result<usize, NonrepError> {
    VERTICES
        .iter()
        .position(|v| *v == name)
        .ok_or_else(|| NonrepError::InvalidLabeling(format!("unknown vertex {name:?}")))
}

fn ordered_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..5).flat_map(|x| (0..5).filter(move |&y| y != x).map(move |y| (x, y)))
}

fn unordered_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..5).flat_map(|x| (x + 1..5).map(move |y| (x, y)))
}

/// Chosen `phi_xy` for `x < y`, as maps on canonical coset indices of
/// `G_x/H_xy -> G_y/H_yx`.
pub type IsoChoice = BTreeMap<(usize, usize), Vec<usize>>;

/// A required value of one quotient map: `phi_xy` sends the coset `from`
/// of `H_xy` to the coset `to` of `H_yx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoAnchor {
    pub x: usize,
    pub y: usize,
    pub from: Vec<Elem>,
    pub to: Vec<Elem>,
}

/// The stated values of `phi_pq` on the cosets of `L0` in `(Z2)^3`:
/// `(010)L0 -> (011)L0`, `(011)L0 -> (010)L0`, `(001)L0 -> (001)L0`.
pub fn pentagon_iso_anchors() -> Vec<IsoAnchor> {
    let c1 = vec![2, 6];
    let c2 = vec![1, 5];
    let c3 = vec![3, 7];
    vec![
        IsoAnchor { x: P, y: Q, from: c3.clone(), to: c1.clone() },
        IsoAnchor { x: P, y: Q, from: c1, to: c3 },
        IsoAnchor { x: P, y: Q, from: c2.clone(), to: c2 },
    ]
}

/// `base^3` with the analogues of `L0..L3`: the three factor embeddings and the diagonal.
#[derive(Debug, Clone)]
pub struct CubeLayout {
    pub group: Arc<FiniteGroup>,
    pub subgroups: [Vec<Elem>; 4],
    quotients: Vec<Arc<QuotientGroup>>,
}

impl CubeLayout {
    pub fn new(base: &FiniteGroup) -> Result<Self, NonrepError> {
        if base.order() < 2 {
            return Err(NonrepError::TrivialBase);
        }
        if !base.is_abelian() {
            return Err(NonrepError::NonAbelianBase);
        }
        let m = base.order();
        let group = Arc::new(FiniteGroup::direct_product(&FiniteGroup::direct_product(base, base), base));
        let id = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
        let sorted = |mut v: Vec<Elem>| {
            v.sort_unstable();
            v
        };
        let subgroups = [
            sorted((0..m).map(|a| id(a, 0, 0)).collect()),
            sorted((0..m).map(|b| id(0, b, 0)).collect()),
            sorted((0..m).map(|c| id(0, 0, c)).collect()),
            sorted((0..m).map(|a| id(a, a, a)).collect()),
        ];
        let quotients = subgroups.iter().map(|s| quotient_by(&group, s)).collect::<Result<_, _>>()?;
        Ok(Self { group, subgroups, quotients })
    }

    fn h(&self, lab: &PentagonLabeling, x: usize, y: usize) -> &[Elem] {
        &self.subgroups[lab.label(x, y)]
    }

    fn hh(&self, lab: &PentagonLabeling, x: usize, y: usize, z: usize) -> Vec<Elem> {
        self.group.product_set(self.h(lab, x, y), self.h(lab, x, z))
    }

    fn iso(&self, lab: &PentagonLabeling, x: usize, y: usize, map: Vec<usize>) -> Result<QuotientIso, GroupError> {
        quotient_iso(&self.quotients[lab.label(x, y)], &self.quotients[lab.label(y, x)], map)
    }
}

/// Lexicographically least iso system for `lab` satisfying frame condition
/// (iii) on every triangle, coherence on every triangle, and the anchors.
pub fn search_isos(
    layout: &CubeLayout,
    lab: &PentagonLabeling,
    anchors: &[IsoAnchor],
) -> Result<Option<IsoChoice>, NonrepError> {
    let pairs: Vec<(usize, usize)> = unordered_pairs().collect();
    let mut candidates = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        let dom = &layout.quotients[lab.label(x, y)];
        let cod = &layout.quotients[lab.label(y, x)];
        let mut keep = Vec::new();
        for map in dom.isomorphisms_to(cod) {
            let iso = layout.iso(lab, x, y, map)?;
            let images_ok = (0..5)
                .filter(|&z| z != x && z != y)
                .all(|z| iso.image_set(&layout.hh(lab, x, y, z)) == layout.hh(lab, y, x, z));
            let anchors_ok = anchors.iter().filter(|a| a.x == x && a.y == y).all(|a| iso.image_set(&a.from) == a.to);
            if images_ok && anchors_ok {
                keep.push(iso);
            }
        }
        if keep.is_empty() {
            return Ok(None);
        }
        candidates.push(keep);
    }

    struct Search<'a> {
        layout: &'a CubeLayout,
        lab: &'a PentagonLabeling,
        pairs: &'a [(usize, usize)],
        candidates: &'a [Vec<QuotientIso>],
        chosen: BTreeMap<(usize, usize), QuotientIso>,
    }

    impl Search<'_> {
        fn oriented(&self, a: usize, b: usize) -> QuotientIso {
            if a < b {
                self.chosen[&(a, b)].clone()
            } else {
                self.chosen[&(b, a)].inverse()
            }
        }

        /// `phi_ab ; phi_bc = phi_ac` on the cosets of `H_ab H_ac`.
        fn coherent(&self, a: usize, b: usize, c: usize) -> bool {
            let g = &self.layout.group;
            let n = self.layout.hh(self.lab, a, b, c);
            let (ab, bc, ac) = (self.oriented(a, b), self.oriented(b, c), self.oriented(a, c));
            let mut seen = vec![false; g.order()];
            for rep in g.elements() {
                if seen[rep] {
                    continue;
                }
                let d = g.translate(rep, &n);
                for &e in &d {
                    seen[e] = true;
                }
                if bc.image_set(&ab.image_set(&d)) != ac.image_set(&d) {
                    return false;
                }
            }
            true
        }

        fn run(&mut self, k: usize) -> bool {
            if k == self.pairs.len() {
                return true;
            }
            let (y, z) = self.pairs[k];
            for iso in &self.candidates[k] {
                self.chosen.insert((y, z), iso.clone());
                // Triangles x < y < z are complete once (y, z) is placed.
                let ok = (0..y).all(|x| {
                    let t = [x, y, z];
                    (0..3).all(|i| (0..3).all(|j| i == j || self.coherent(t[i], t[j], t[3 - i - j])))
                });
                if ok && self.run(k + 1) {
                    return true;
                }
            }
            self.chosen.remove(&(y, z));
            false
        }
    }

    let mut search = Search { layout, lab, pairs: &pairs, candidates: &candidates, chosen: BTreeMap::new() };
    if !search.run(0) {
        return Ok(None);
    }
    Ok(Some(search.chosen.into_iter().map(|(k, v)| (k, v.map().to_vec())).collect()))
}

/// A validated pentagon-family triple together with the choices that produced it.
#[derive(Debug, Clone)]
pub struct PentagonBuild {
    pub triple: GroupTriple,
    pub labeling: PentagonLabeling,
    pub isos: IsoChoice,
    /// Representative of `C_pqr`.
    pub twist: Elem,
    /// Anchored labelings examined before one admitted an iso system.
    pub labelings_tried: usize,
    pub report: ValidationReport,
}

/// The pentagon example: least anchored labeling that admits a coherent,
/// anchored iso system, the least such system, and the non-identity cosets
/// on permutations of `(p, q, r)`.
pub fn build_pentagon() -> Result<PentagonBuild, NonrepError> {
    build_pentagon_over(&FiniteGroup::cyclic(2)?)
}

/// The same search over `base^3`. The stated `phi_pq` values only make sense
/// for `base = Z2`, so other bases use the label anchors alone.
pub fn build_pentagon_over(base: &FiniteGroup) -> Result<PentagonBuild, NonrepError> {
    let layout = CubeLayout::new(base)?;
    let anchors = if base.order() == 2 { pentagon_iso_anchors() } else { Vec::new() };
    for (i, lab) in PentagonLabeling::anchored().into_iter().enumerate() {
        if let Some(isos) = search_isos(&layout, &lab, &anchors)? {
            let mut build = build_generalized(base, &lab, &isos, None)?;
            build.labelings_tried = i + 1;
            return Ok(build);
        }
    }
    Err(NonrepError::NoCompletion)
}

/// The construction over `base^3`. The iso choice is validated, not derived;
/// `twist` is the representative of `C_pqr`, by default the least element
/// outside `H_pq H_pr`. The other five cosets on permutations of `(p, q, r)`
/// follow from `C_pqr` by inversion and the maps `phi_pq`, `phi_pr`.
pub fn build_generalized(
    base: &FiniteGroup,
    lab: &PentagonLabeling,
    isos: &IsoChoice,
    twist: Option<Elem>,
) -> Result<PentagonBuild, NonrepError> {
    let layout = CubeLayout::new(base)?;
    let g = &layout.group;
    let system = GroupSystem::new(VERTICES.iter().map(|v| (v.to_string(), Arc::clone(g))).collect())?;
    let mut iso_system = IsoSystem::new(&system, vec![(0..5).collect()])?;
    for x in 0..5 {
        iso_system.set_pair(x, x, make_iso(g, &[0], g, &[0], (0..g.order()).collect())?);
    }
    for (x, y) in unordered_pairs() {
        let bad = |reason: String| NonrepError::BadIsoChoice { x: VERTICES[x].into(), y: VERTICES[y].into(), reason };
        let map = isos.get(&(x, y)).ok_or_else(|| bad("missing".into()))?;
        let iso = layout.iso(lab, x, y, map.clone()).map_err(|e| bad(e.to_string()))?;
        iso_system.set_pair(x, y, iso);
    }
    let pair = GroupPair::new(system, iso_system)?;
    let mut report = check_group_frame(&pair);
    if !report.passed() {
        return Err(NonrepError::Validation(Box::new(report)));
    }

    let n = pair.hh(P, Q, R);
    let rep = match twist {
        Some(t) => {
            g.check_elem(t)?;
            t
        }
        None => g.elements().find(|e| n.binary_search(e).is_err()).expect("H_pq H_pr is proper"),
    };
    let c_pqr = g.translate(rep, &n);
    let c_qrp = pair.pair(P, Q).image(&c_pqr);
    let c_rpq = pair.pair(P, R).image(&c_pqr);
    let min = |s: &[Elem]| *s.iter().min().expect("cosets are nonempty");
    let mut reps = BTreeMap::new();
    reps.insert((P, Q, R), min(&c_pqr));
    reps.insert((P, R, Q), min(&g.inverse_set(&c_pqr)));
    reps.insert((Q, R, P), min(&c_qrp));
    reps.insert((Q, P, R), min(&g.inverse_set(&c_qrp)));
    reps.insert((R, P, Q), min(&c_rpq));
    reps.insert((R, Q, P), min(&g.inverse_set(&c_rpq)));
    let triple = GroupTriple::new(pair, &reps)?;

    report.extend(check_semi_frame(&triple));
    report.extend(check_coset_conditions(&triple));
    if !report.passed() {
        return Err(NonrepError::Validation(Box::new(report)));
    }
    Ok(PentagonBuild { triple, labeling: lab.clone(), isos: isos.clone(), twist: rep, labelings_tried: 1, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_axioms, measurability_report, CosetRelationAlgebra, DEFAULT_SAMPLE_SEED};
    use crate::frame::{check_simplified, check_tripsub, check_trithm, is_simple_frame};
    use std::sync::OnceLock;

    pub(crate) fn pentagon() -> &'static PentagonBuild {
        static CELL: OnceLock<PentagonBuild> = OnceLock::new();
        CELL.get_or_init(|| build_pentagon().unwrap())
    }

    #[test]
    fn labelings_respect_anchors_and_order() {
        let all = PentagonLabeling::anchored();
        // p and q have two free labels each, r all four, s and t three.
        assert_eq!(all.len(), 2 * 2 * 24 * 6 * 6);
        assert!(all.iter().all(|l| l.satisfies_anchors()));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(PentagonLabeling::new([[0; 5]; 5]).is_err());
    }

    #[test]
    fn pentagon_matches_the_stated_data() {
        let b = pentagon();
        let t = &b.triple;
        assert!(b.labeling.satisfies_anchors());
        // The phi_pq values force label(p,r) = 1, label(q,r) = 3, label(p,s) = 2, label(q,t) = 1.
        assert_eq!(b.labeling.label(P, R), 1);
        assert_eq!(b.labeling.label(Q, R), 3);
        assert_eq!(b.labeling.label(P, S), 2);
        assert_eq!(b.labeling.label(Q, T), 1);
        // Canonical cosets of L0: {0,4}, {1,5}, {2,6}, {3,7}.
        assert_eq!(b.isos[&(P, Q)], vec![0, 1, 3, 2]);
        assert_eq!(t.pair().h(P, T), &[0, 7]);
        assert_eq!(t.pair().h(T, P), &[0, 4]);
        assert_eq!(t.pair().h(Q, S), &[0, 1]);
        assert_eq!(t.pair().h(S, Q), &[0, 2]);
        assert_eq!(t.data(P, Q).kappa(), 4);
        assert_eq!(t.data(P, P).kappa(), 8);
        // C_pqr is the complement of H_pq H_pr = L0 L1 = {0,2,4,6}.
        assert_eq!(t.coset(P, Q, R), &[1, 3, 5, 7]);
        assert!(t.is_identity_coset(P, Q, S));
        assert!(!t.is_identity_coset(R, Q, P));
        assert!(b.report.passed());
    }

    #[test]
    fn pentagon_passes_every_validator() {
        let t = &pentagon().triple;
        assert!(check_group_frame(t.pair()).passed());
        assert!(check_semi_frame(t).passed());
        assert!(check_coset_conditions(t).passed());
        assert!(check_simplified(t).passed());
        assert!(check_tripsub(t));
        assert!(check_trithm(t, P, Q, R).unwrap().passed());
        assert!(is_simple_frame(t));
        let alg = CosetRelationAlgebra::build(t).unwrap();
        assert_eq!(alg.atom_count(), 120);
        assert!(check_axioms(&alg, DEFAULT_SAMPLE_SEED).passed());
        let m = measurability_report(&alg);
        assert!(m.passed());
        assert!(m.entries.iter().all(|e| e.measure == 8));
    }

    #[test]
    fn z3_generalisation() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let layout = CubeLayout::new(&z3).unwrap();
        let lab = &pentagon().labeling;
        let isos = search_isos(&layout, lab, &[]).unwrap().expect("coherent isos exist");
        let b = build_generalized(&z3, lab, &isos, None).unwrap();
        let t = &b.triple;
        assert_eq!(t.group(P).order(), 27);
        assert_eq!(t.data(P, Q).kappa(), 9);
        assert_eq!(t.data(P, P).kappa(), 27);
        let alg = CosetRelationAlgebra::build(t).unwrap();
        assert!(measurability_report(&alg).entries.iter().all(|e| e.measure == 27));
    }

    #[test]
    fn incoherent_iso_choice_is_rejected() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let b = pentagon();
        let mut isos = b.isos.clone();
        isos.insert((P, Q), vec![0, 1, 2, 3]);
        match build_generalized(&z2, &b.labeling, &isos, None) {
            Err(NonrepError::Validation(r)) => assert!(r.failures().next().unwrap().witness.is_some()),
            other => panic!("expected a validation failure, got {other:?}"),
        }
        isos.insert((P, Q), vec![0, 1, 2]);
        assert!(matches!(build_generalized(&z2, &b.labeling, &isos, None), Err(NonrepError::BadIsoChoice { .. })));
    }

    #[test]
    fn base_must_be_abelian_and_nontrivial() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(CubeLayout::new(&s3).unwrap_err(), NonrepError::NonAbelianBase);
        assert_eq!(CubeLayout::new(&FiniteGroup::cyclic(1).unwrap()).unwrap_err(), NonrepError::TrivialBase);
    }

    #[test]
    fn z2_generalisation_reproduces_the_pentagon() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let b = pentagon();
        let g = build_generalized(&z2, &b.labeling, &b.isos, None).unwrap();
        let a1 = CosetRelationAlgebra::build(&b.triple).unwrap();
        let a2 = CosetRelationAlgebra::build(&g.triple).unwrap();
        assert_eq!(a1.otimes_table(), a2.otimes_table());
    }

    #[test]
    fn label_entries_round_trip() {
        let lab = &pentagon().labeling;
        assert_eq!(&PentagonLabeling::from_entries(&lab.entries()).unwrap(), lab);
    }
}
