//! Group pairs and group triples: systems of groups indexed by an ordered set
//! `I`, quotient isomorphisms over an equivalence relation `E`, and coset
//! systems over `E3`, together with validators for every condition family.

mod checks;
mod report;
mod structure;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{quotient, quotient_iso, Elem, FiniteGroup, GroupError, QuotientGroup, QuotientIso, Subgroup};

pub use checks::{
    check_coset_conditions, check_group_frame, check_pre_semi_frame, check_semi_frame, check_simplified, check_tripsub,
    check_trithm, image_lemma_forms, permutation_conditions, tripsub_witness,
};
pub use report::{Condition, Entry, ValidationReport, Witness};
pub use structure::{components, from_group_pair, is_simple_frame, reassemble};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("duplicate index name {0:?}")]
    DuplicateName(String),
    #[error("unknown index {0:?}")]
    UnknownName(String),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("classes do not partition the index set: index {0:?} appears {1} times")]
    NotAPartition(String, usize),
    #[error("class list contains an empty class")]
    EmptyClass,
    #[error("indices {0:?} and {1:?} are not related by E")]
    NotRelated(String, String),
    #[error("no quotient isomorphism for the pair ({0:?}, {1:?})")]
    MissingIso(String, String),
    #[error("quotient isomorphism for ({0:?}, {1:?}) is not between G_x and G_y")]
    IsoGroupMismatch(String, String),
    #[error("indices ({0:?}, {1:?}, {2:?}) do not form a triple in E3")]
    NotInE3(String, String, String),
    #[error("coset representative {elem} is out of range for group {index:?}")]
    RepresentativeOutOfRange { index: String, elem: Elem },
    #[error("indices must satisfy {0:?} < {1:?} < {2:?}")]
    NotOrdered(String, String, String),
    #[error("the pair is not a group frame: {0}")]
    NotAFrame(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The ordered index set `I` with one group per index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSystem {
    names: Vec<String>,
    groups: Vec<Arc<FiniteGroup>>,
}

impl GroupSystem {
    pub fn new(entries: Vec<(String, Arc<FiniteGroup>)>) -> Result<Self, FrameError> {
        let mut names = Vec::with_capacity(entries.len());
        let mut groups = Vec::with_capacity(entries.len());
        for (name, g) in entries {
            if names.contains(&name) {
                return Err(FrameError::DuplicateName(name));
            }
            names.push(name);
            groups.push(g);
        }
        Ok(Self { names, groups })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FrameError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| FrameError::UnknownName(name.to_string()))
    }

    pub fn group(&self, x: usize) -> &Arc<FiniteGroup> {
        &self.groups[x]
    }
}

/// The equivalence relation `E`, given as a partition of `I`, and the
/// directed quotient isomorphisms `phi_xy` for `(x, y)` in `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoSystem {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    isos: BTreeMap<(usize, usize), QuotientIso>,
}

impl IsoSystem {
    /// Classes are normalised: members sorted, classes ordered by least member.
    pub fn new(system: &GroupSystem, classes: Vec<Vec<usize>>) -> Result<Self, FrameError> {
        let n = system.len();
        let mut seen = vec![0usize; n];
        for class in &classes {
            if class.is_empty() {
                return Err(FrameError::EmptyClass);
            }
            for &x in class {
                if x >= n {
                    return Err(FrameError::IndexOutOfRange(x));
                }
                seen[x] += 1;
            }
        }
        if let Some(x) = (0..n).find(|&x| seen[x] != 1) {
            return Err(FrameError::NotAPartition(system.name(x).to_string(), seen[x]));
        }
        let mut classes: Vec<Vec<usize>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort();
        let mut class_of = vec![0; n];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x] = i;
            }
        }
        Ok(Self { classes, class_of, isos: BTreeMap::new() })
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// Sets `phi_xy` and, for `x != y`, `phi_yx` as its inverse.
    pub fn set_pair(&mut self, x: usize, y: usize, iso: QuotientIso) {
        if x != y {
            self.isos.insert((y, x), iso.inverse());
        }
        self.isos.insert((x, y), iso);
    }

    /// Sets only the directed map `phi_xy`.
    pub fn set_directed(&mut self, x: usize, y: usize, iso: QuotientIso) {
        self.isos.insert((x, y), iso);
    }

    pub fn iso(&self, x: usize, y: usize) -> Option<&QuotientIso> {
        self.isos.get(&(x, y))
    }

    /// Ordered pairs of `E`, lexicographic.
    pub fn e2(&self) -> Vec<(usize, usize)> {
        let n = self.class_of.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.related(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `E3`: triples with `(x, y)` and `(y, z)` in `E`, lexicographic.
    pub fn e3(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (x, y) in self.e2() {
            for z in 0..self.class_of.len() {
                if self.related(y, z) {
                    out.push((x, y, z));
                }
            }
        }
        out
    }

    /// `E4`: quadruples with consecutive pairs in `E`, lexicographic.
    pub fn e4(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        for (x, y, z) in self.e3() {
            for w in 0..self.class_of.len() {
                if self.related(z, w) {
                    out.push((x, y, z, w));
                }
            }
        }
        out
    }
}

/// Derived coset data for one directed pair `(x, y)` in `E`.
///
/// `h_cosets[g]` is `H_{xy,g}` and `k_cosets[g] = phi_xy(H_{xy,g})`. For
/// `x <= y` the enumeration is the canonical one of `G_x/H_xy`; for `x > y`
/// it follows `K_{yx,g}` whenever `H_xy = K_yx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairData {
    pub h: Vec<Elem>,
    pub k: Vec<Elem>,
    pub h_cosets: Vec<Vec<Elem>>,
    pub k_cosets: Vec<Vec<Elem>>,
    h_index: Vec<usize>,
    k_index: Vec<usize>,
}

impl PairData {
    fn new(iso: &QuotientIso, order: Option<&[Vec<Elem>]>) -> Self {
        let dom = iso.domain();
        let cod = iso.codomain();
        let h_cosets: Vec<Vec<Elem>> = match order {
            Some(o) => o.to_vec(),
            None => dom.cosets().iter().map(|c| c.elements.clone()).collect(),
        };
        let k_cosets: Vec<Vec<Elem>> =
            h_cosets.iter().map(|c| cod.coset(iso.apply(dom.index_of(c[0]))).elements.clone()).collect();
        let mut h_index = vec![0; dom.group().order()];
        for (g, c) in h_cosets.iter().enumerate() {
            for &e in c {
                h_index[e] = g;
            }
        }
        let mut k_index = vec![0; cod.group().order()];
        for (g, c) in k_cosets.iter().enumerate() {
            for &e in c {
                k_index[e] = g;
            }
        }
        Self {
            h: dom.normal().elements().to_vec(),
            k: cod.normal().elements().to_vec(),
            h_cosets,
            k_cosets,
            h_index,
            k_index,
        }
    }

    /// `kappa_xy`, the number of cosets.
    pub fn kappa(&self) -> usize {
        self.h_cosets.len()
    }

    /// Enumeration index of the `H_xy` coset containing `e`.
    pub fn h_index(&self, e: Elem) -> usize {
        self.h_index[e]
    }

    /// Enumeration index of the `K_xy` coset containing `e`.
    pub fn k_index(&self, e: Elem) -> usize {
        self.k_index[e]
    }

    /// `phi_xy[S]`, taken over every `H_xy` coset that meets `S`.
    pub fn image(&self, set: &[Elem]) -> Vec<Elem> {
        saturate(set, &self.h_index, &self.k_cosets)
    }

    /// `phi_xy^-1[S]`, taken over every `K_xy` coset that meets `S`.
    pub fn preimage(&self, set: &[Elem]) -> Vec<Elem> {
        saturate(set, &self.k_index, &self.h_cosets)
    }
}

fn saturate(set: &[Elem], index: &[usize], target: &[Vec<Elem>]) -> Vec<Elem> {
    let mut hit = vec![false; target.len()];
    for &e in set {
        hit[index[e]] = true;
    }
    let mut out: Vec<Elem> =
        hit.iter().enumerate().filter(|(_, &h)| h).flat_map(|(g, _)| target[g].iter().copied()).collect();
    out.sort_unstable();
    out
}

/// A group pair `(G, phi)` with derived coset data for every pair in `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPair {
    system: GroupSystem,
    isos: IsoSystem,
    data: BTreeMap<(usize, usize), PairData>,
}

impl GroupPair {
    pub fn new(system: GroupSystem, isos: IsoSystem) -> Result<Self, FrameError> {
        let name = |x: usize| system.name(x).to_string();
        for (x, y) in isos.e2() {
            let iso = isos.iso(x, y).ok_or_else(|| FrameError::MissingIso(name(x), name(y)))?;
            if **iso.domain().group() != **system.group(x) || **iso.codomain().group() != **system.group(y) {
                return Err(FrameError::IsoGroupMismatch(name(x), name(y)));
            }
        }
        if let Some(&(x, y)) = isos.isos.keys().find(|&&(x, y)| !isos.related(x, y)) {
            return Err(FrameError::NotRelated(name(x), name(y)));
        }
        let mut data = BTreeMap::new();
        for (x, y) in isos.e2() {
            let iso = isos.iso(x, y).unwrap();
            let order = if x > y {
                let back = isos.iso(y, x).unwrap();
                (back.codomain().normal().elements() == iso.domain().normal().elements()).then(|| {
                    (0..back.domain().len())
                        .map(|g| back.codomain().coset(back.apply(g)).elements.clone())
                        .collect::<Vec<_>>()
                })
            } else {
                None
            };
            data.insert((x, y), PairData::new(iso, order.as_deref()));
        }
        Ok(Self { system, isos, data })
    }

    pub fn system(&self) -> &GroupSystem {
        &self.system
    }

    pub fn isos(&self) -> &IsoSystem {
        &self.isos
    }

    pub fn group(&self, x: usize) -> &Arc<FiniteGroup> {
        self.system.group(x)
    }

    pub fn name(&self, x: usize) -> &str {
        self.system.name(x)
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    /// Coset data for `(x, y)`; panics if the pair is not in `E`.
    pub fn pair(&self, x: usize, y: usize) -> &PairData {
        &self.data[&(x, y)]
    }

    pub fn iso(&self, x: usize, y: usize) -> &QuotientIso {
        self.isos.iso(x, y).expect("pair in E")
    }

    pub fn h(&self, x: usize, y: usize) -> &[Elem] {
        &self.pair(x, y).h
    }

    pub fn k(&self, x: usize, y: usize) -> &[Elem] {
        &self.pair(x, y).k
    }

    /// `H_xy H_xz`, a normal subgroup of `G_x`.
    pub fn hh(&self, x: usize, y: usize, z: usize) -> Vec<Elem> {
        self.group(x).product_set(self.h(x, y), self.h(x, z))
    }

    /// Returns a copy with `phi_xy` replaced (and `phi_yx` set to its inverse).
    pub fn with_pair_iso(&self, x: usize, y: usize, iso: QuotientIso) -> Result<Self, FrameError> {
        let mut isos = self.isos.clone();
        isos.set_pair(x, y, iso);
        Self::new(self.system.clone(), isos)
    }

    /// Returns a copy with only the directed map `phi_xy` replaced.
    pub fn with_directed_iso(&self, x: usize, y: usize, iso: QuotientIso) -> Result<Self, FrameError> {
        let mut isos = self.isos.clone();
        isos.set_directed(x, y, iso);
        Self::new(self.system.clone(), isos)
    }

    pub(crate) fn names_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.name(i).to_string()).collect()
    }
}

/// Builds `phi: G_x/H -> G_y/K` from a map on canonical coset indices.
pub fn make_iso(
    gx: &Arc<FiniteGroup>,
    h: &[Elem],
    gy: &Arc<FiniteGroup>,
    k: &[Elem],
    map: Vec<usize>,
) -> Result<QuotientIso, GroupError> {
    let dom = Arc::new(quotient(gx, &Subgroup::new(gx, h)?)?);
    let cod = Arc::new(quotient(gy, &Subgroup::new(gy, k)?)?);
    quotient_iso(&dom, &cod, map)
}

/// Canonical quotient `G/N` for a normal subgroup given as an element set.
pub fn quotient_by(g: &Arc<FiniteGroup>, n: &[Elem]) -> Result<Arc<QuotientGroup>, GroupError> {
    Ok(Arc::new(quotient(g, &Subgroup::new(g, n)?)?))
}

/// A group triple `(G, phi, C)`. Cosets are stored by minimal representative;
/// triples without an explicit entry carry the identity coset `H_xy H_xz`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTriple {
    pair: GroupPair,
    representatives: BTreeMap<(usize, usize, usize), Elem>,
    cosets: BTreeMap<(usize, usize, usize), Vec<Elem>>,
}

impl GroupTriple {
    /// `reps` may omit triples; those default to the identity coset.
    pub fn new(pair: GroupPair, reps: &BTreeMap<(usize, usize, usize), Elem>) -> Result<Self, FrameError> {
        for &(x, y, z) in reps.keys() {
            let n = pair.len();
            if x >= n || y >= n || z >= n || !pair.isos.related(x, y) || !pair.isos.related(y, z) {
                let nm = |i: usize| if i < n { pair.name(i).to_string() } else { i.to_string() };
                return Err(FrameError::NotInE3(nm(x), nm(y), nm(z)));
            }
        }
        let mut representatives = BTreeMap::new();
        let mut cosets = BTreeMap::new();
        for (x, y, z) in pair.isos.e3() {
            let g = pair.group(x);
            let rep = reps.get(&(x, y, z)).copied().unwrap_or(0);
            if rep >= g.order() {
                return Err(FrameError::RepresentativeOutOfRange { index: pair.name(x).to_string(), elem: rep });
            }
            let coset = g.translate(rep, &pair.hh(x, y, z));
            representatives.insert((x, y, z), coset[0]);
            cosets.insert((x, y, z), coset);
        }
        Ok(Self { pair, representatives, cosets })
    }

    /// Every `C_xyz` is the identity coset.
    pub fn identity_cosets(pair: GroupPair) -> Self {
        Self::new(pair, &BTreeMap::new()).expect("identity cosets are always valid")
    }

    pub fn pair(&self) -> &GroupPair {
        &self.pair
    }

    pub fn system(&self) -> &GroupSystem {
        self.pair.system()
    }

    pub fn isos(&self) -> &IsoSystem {
        self.pair.isos()
    }

    pub fn len(&self) -> usize {
        self.pair.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pair.is_empty()
    }

    pub fn name(&self, x: usize) -> &str {
        self.pair.name(x)
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FrameError> {
        self.pair.system().index_of(name)
    }

    pub fn group(&self, x: usize) -> &Arc<FiniteGroup> {
        self.pair.group(x)
    }

    pub fn data(&self, x: usize, y: usize) -> &PairData {
        self.pair.pair(x, y)
    }

    /// `C_xyz` as an element set; panics outside `E3`.
    pub fn coset(&self, x: usize, y: usize, z: usize) -> &[Elem] {
        &self.cosets[&(x, y, z)]
    }

    pub fn representative(&self, x: usize, y: usize, z: usize) -> Elem {
        self.representatives[&(x, y, z)]
    }

    /// All representatives, keyed by triple.
    pub fn representatives(&self) -> &BTreeMap<(usize, usize, usize), Elem> {
        &self.representatives
    }

    /// Is `C_xyz = H_xy H_xz`?
    pub fn is_identity_coset(&self, x: usize, y: usize, z: usize) -> bool {
        self.representative(x, y, z) == 0
    }

    /// Copy with one coset replaced; `rep` is any element of the new coset.
    pub fn with_coset(&self, x: usize, y: usize, z: usize, rep: Elem) -> Result<Self, FrameError> {
        let mut reps = self.representatives.clone();
        if !self.cosets.contains_key(&(x, y, z)) {
            let nm = |i: usize| if i < self.len() { self.name(i).to_string() } else { i.to_string() };
            return Err(FrameError::NotInE3(nm(x), nm(y), nm(z)));
        }
        reps.insert((x, y, z), rep);
        Self::new(self.pair.clone(), &reps)
    }

    /// Copy with the same coset representatives over a different pair.
    pub fn with_pair(&self, pair: GroupPair) -> Result<Self, FrameError> {
        Self::new(pair, &self.representatives)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn names_system(names: &[&str]) -> GroupSystem {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        GroupSystem::new(names.iter().map(|n| (n.to_string(), Arc::clone(&g))).collect()).unwrap()
    }

    #[test]
    fn e3_and_e4_sizes() {
        let sys = names_system(&["p", "q", "r", "s", "t"]);
        let universal = IsoSystem::new(&sys, vec![(0..5).collect()]).unwrap();
        assert_eq!(universal.e3().len(), 125);
        assert_eq!(universal.e4().len(), 625);
        let discrete = IsoSystem::new(&sys, (0..5).map(|x| vec![x]).collect()).unwrap();
        assert_eq!(discrete.e3(), (0..5).map(|x| (x, x, x)).collect::<Vec<_>>());
        let sys3 = names_system(&["p", "q", "r"]);
        let two = IsoSystem::new(&sys3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(two.e3().len(), 9);
        let mut brute = 0;
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    if two.related(x, y) && two.related(y, z) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 9);
    }

    #[test]
    fn partitions_are_validated() {
        let sys = names_system(&["p", "q"]);
        assert!(matches!(IsoSystem::new(&sys, vec![vec![0]]), Err(FrameError::NotAPartition(..))));
        assert!(matches!(IsoSystem::new(&sys, vec![vec![0, 1], vec![1]]), Err(FrameError::NotAPartition(..))));
        assert_eq!(IsoSystem::new(&sys, vec![vec![0], vec![]]), Err(FrameError::EmptyClass));
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        assert!(matches!(
            GroupSystem::new(vec![("p".into(), Arc::clone(&g)), ("p".into(), g)]),
            Err(FrameError::DuplicateName(_))
        ));
    }

    #[test]
    fn missing_isos_are_rejected() {
        let sys = names_system(&["p", "q"]);
        let isos = IsoSystem::new(&sys, vec![vec![0, 1]]).unwrap();
        assert!(matches!(GroupPair::new(sys, isos), Err(FrameError::MissingIso(..))));
    }

    #[test]
    fn reverse_enumeration_follows_the_forward_images() {
        let t = v4_frame(2, false);
        let fwd = t.data(0, 1);
        let back = t.data(1, 0);
        assert_eq!(fwd.kappa(), 2);
        for g in 0..2 {
            assert_eq!(back.h_cosets[g], fwd.k_cosets[g]);
            assert_eq!(back.k_cosets[g], fwd.h_cosets[g]);
        }
        assert_eq!(t.data(0, 0).kappa(), 4);
        assert_eq!(fwd.image(&[2]), vec![2, 3]);
        assert_eq!(fwd.preimage(&[0, 1]), vec![0, 1]);
    }

    #[test]
    fn cosets_default_to_identity() {
        let t = v4_frame(3, false);
        assert_eq!(t.coset(0, 1, 2), &[0, 1]);
        assert!(t.is_identity_coset(0, 1, 2));
        let t2 = t.with_coset(0, 1, 2, 3).unwrap();
        assert_eq!(t2.coset(0, 1, 2), &[2, 3]);
        assert_eq!(t2.representative(0, 1, 2), 2);
        assert!(t.with_coset(0, 1, 2, 9).is_err());
        // C_xxy is a coset of H_xy = {0,1}; C_xxx of {0}.
        assert_eq!(t.coset(0, 0, 0), &[0]);
        assert_eq!(t.coset(0, 0, 1), &[0, 1]);
    }

    #[test]
    fn single_group_frame() {
        let t = single(FiniteGroup::cyclic(2).unwrap());
        assert_eq!(t.isos().e3(), vec![(0, 0, 0)]);
        assert_eq!(t.data(0, 0).kappa(), 2);
    }
}
