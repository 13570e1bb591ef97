use serde::{Deserialize, Serialize};

use super::{ChaseRoles, NonrepError};
use crate::algebra::{BitMatrix, CosetRelationAlgebra};
use crate::frame::is_simple_frame;

/// An atom named by block and coset index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomRef {
    pub x: String,
    pub y: String,
    pub alpha: usize,
}

impl AtomRef {
    pub(crate) fn of(alg: &CosetRelationAlgebra, i: usize) -> Self {
        let a = alg.atoms()[i];
        let t = alg.triple();
        Self { x: t.name(a.x).to_string(), y: t.name(a.y).to_string(), alpha: a.alpha }
    }

    pub(crate) fn resolve(&self, alg: &CosetRelationAlgebra) -> Result<usize, NonrepError> {
        let t = alg.triple();
        Ok(alg.atom_index(t.index_of(&self.x)?, t.index_of(&self.y)?, self.alpha)?)
    }
}

/// A system of atoms `a_xy`, one per block, with `a_xx` the subidentity atom
/// and `a_yx` the converse of `a_xy`.
///
/// `relaxed` names a set of three indices on which `a_xz <= a_xy (x) a_yz`
/// is not imposed; `None` means every triple is constrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scaffold {
    atoms: Vec<Vec<usize>>,
    relaxed: Option<[usize; 3]>,
}

impl Scaffold {
    /// Builds from the atoms on pairs `x < y`, filling in the diagonal and converses.
    pub fn from_upper(
        alg: &CosetRelationAlgebra,
        upper: &[((usize, usize), usize)],
        relaxed: Option<[usize; 3]>,
    ) -> Result<Self, NonrepError> {
        let n = alg.triple().len();
        let mut atoms = vec![vec![usize::MAX; n]; n];
        for (x, row) in atoms.iter_mut().enumerate() {
            row[x] = alg.block_atoms(x, x).start;
        }
        for &((x, y), a) in upper {
            let atom = alg.atoms().get(a).ok_or_else(|| NonrepError::CertificateInvalid(format!("no atom {a}")))?;
            if (atom.x, atom.y) != (x, y) || x >= y {
                return Err(NonrepError::CertificateInvalid(format!(
                    "atom {} placed on ({x}, {y})",
                    alg.atom_label(a)
                )));
            }
            atoms[x][y] = a;
            atoms[y][x] = alg.atom_converse(a);
        }
        if atoms.iter().flatten().any(|&a| a == usize::MAX) {
            return Err(NonrepError::CertificateInvalid("scaffold misses a pair".into()));
        }
        Ok(Self { atoms, relaxed: relaxed.map(sorted3) })
    }

    pub fn atom(&self, x: usize, y: usize) -> usize {
        self.atoms[x][y]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn relaxed(&self) -> Option<[usize; 3]> {
        self.relaxed
    }

    /// Atoms on pairs `x < y`, lexicographic.
    pub fn upper(&self) -> Vec<((usize, usize), usize)> {
        let n = self.len();
        (0..n).flat_map(|x| (x + 1..n).map(move |y| ((x, y), self.atoms[x][y]))).collect()
    }
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

fn exempt(relaxed: Option<[usize; 3]>, x: usize, y: usize, z: usize) -> bool {
    relaxed.is_some_and(|r| sorted3([x, y, z]) == r && x != y && y != z && x != z)
}

fn below_product(alg: &CosetRelationAlgebra, a: &[Vec<usize>], x: usize, y: usize, z: usize) -> bool {
    alg.atom_otimes(a[x][y], a[y][z]).contains(a[x][z])
}

/// Triples `(x, y, z)` where `a_xz <= a_xy (x) a_yz` fails, skipping the relaxed set.
pub fn scaffold_violations(alg: &CosetRelationAlgebra, s: &Scaffold) -> Vec<(usize, usize, usize)> {
    let n = s.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if !exempt(s.relaxed, x, y, z) && !below_product(alg, &s.atoms, x, y, z) {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

struct Search<'a> {
    alg: &'a CosetRelationAlgebra,
    relaxed: Option<[usize; 3]>,
    pairs: Vec<(usize, usize)>,
    atoms: Vec<Vec<usize>>,
    out: Vec<Scaffold>,
}

impl Search<'_> {
    /// Every fully assigned triangle through the edge `{x, y}` satisfies the product condition.
    fn consistent(&self, x: usize, y: usize) -> bool {
        let a = &self.atoms;
        (0..a.len()).all(|z| {
            let t = [x, y, z];
            [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)].iter().all(|&(i, j, k)| {
                let (u, v, w) = (t[i], t[j], t[k]);
                let assigned = a[u][v] != usize::MAX && a[v][w] != usize::MAX && a[u][w] != usize::MAX;
                !assigned || exempt(self.relaxed, u, v, w) || below_product(self.alg, a, u, v, w)
            })
        })
    }

    fn run(&mut self, k: usize) {
        if k == self.pairs.len() {
            self.out.push(Scaffold { atoms: self.atoms.clone(), relaxed: self.relaxed });
            return;
        }
        let (x, y) = self.pairs[k];
        for atom in self.alg.block_atoms(x, y) {
            self.atoms[x][y] = atom;
            self.atoms[y][x] = self.alg.atom_converse(atom);
            if self.consistent(x, y) {
                self.run(k + 1);
            }
        }
        self.atoms[x][y] = usize::MAX;
        self.atoms[y][x] = usize::MAX;
    }
}

fn enumerate(alg: &CosetRelationAlgebra, relaxed: Option<[usize; 3]>) -> Result<Vec<Scaffold>, NonrepError> {
    let t = alg.triple();
    if !is_simple_frame(t) {
        return Err(NonrepError::NotSimple);
    }
    let n = t.len();
    let mut atoms = vec![vec![usize::MAX; n]; n];
    for (x, row) in atoms.iter_mut().enumerate() {
        row[x] = alg.block_atoms(x, x).start;
    }
    let pairs = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let mut search = Search { alg, relaxed: relaxed.map(sorted3), pairs, atoms, out: Vec::new() };
    search.run(0);
    Ok(search.out)
}

/// All scaffolds: `a_xx` is the subidentity atom, `a_yx = a_xy^`, and
/// `a_xz <= a_xy (x) a_yz` for all `x, y, z`. Ordered lexicographically by
/// the coset indices on the pairs `x < y`.
pub fn enumerate_scaffolds(alg: &CosetRelationAlgebra) -> Result<Vec<Scaffold>, NonrepError> {
    enumerate(alg, None)
}

/// Scaffolds with the product condition dropped on the triples whose index
/// set is `relaxed`.
pub fn enumerate_relaxed_scaffolds(
    alg: &CosetRelationAlgebra,
    relaxed: [usize; 3],
) -> Result<Vec<Scaffold>, NonrepError> {
    enumerate(alg, Some(relaxed))
}

/// Checks of the scaffold properties used by the chase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaffoldReport {
    /// Every `a_yx` is the set-theoretic inverse of `a_xy`.
    pub converse_inverse: bool,
    /// Triples off `{p, q, r}` checked for `a_xy (x) a_yz = a_xy ; a_yz`.
    pub composition_checked: usize,
    pub composition_failures: Vec<(String, String, String)>,
    /// Permutations of `(p, q, r)` checked for `a_xy (x) a_yz = G_x x G_z - a_xy ; a_yz`.
    pub complement_checked: usize,
    pub complement_failures: Vec<(String, String, String)>,
    /// `(a_xs (x) a_sy) & (a_xt (x) a_ty) = a_xy` for the six ordered pairs inside `{p, q, r}`.
    pub edges: Vec<EdgeCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub x: String,
    pub y: String,
    pub intersection: Vec<AtomRef>,
    pub holds: bool,
}

impl ScaffoldReport {
    pub fn passed(&self) -> bool {
        self.converse_inverse
            && self.composition_failures.is_empty()
            && self.complement_failures.is_empty()
            && self.edges.iter().all(|e| e.holds)
    }
}

pub(crate) fn product_matrix(alg: &CosetRelationAlgebra, a: usize, b: usize) -> BitMatrix {
    let (x, z) = (alg.atoms()[a].x, alg.atoms()[b].y);
    let t = alg.triple();
    let mut m = BitMatrix::new(t.group(x).order(), t.group(z).order());
    for i in alg.atom_otimes(a, b).ones() {
        m.union_with(alg.atom_relation(i));
    }
    m
}

pub(crate) fn composition_matrix(alg: &CosetRelationAlgebra, a: usize, b: usize) -> BitMatrix {
    alg.atom_relation(a).compose(alg.atom_relation(b))
}

/// Atoms of `(a_xs (x) a_sy) & (a_xt (x) a_ty)`.
pub(crate) fn edge_intersection(
    alg: &CosetRelationAlgebra,
    s: &Scaffold,
    r: &ChaseRoles,
    x: usize,
    y: usize,
) -> Vec<usize> {
    let mut via_s = alg.atom_otimes(s.atom(x, r.s), s.atom(r.s, y)).clone();
    via_s.intersect_with(alg.atom_otimes(s.atom(x, r.t), s.atom(r.t, y)));
    via_s.ones().collect()
}

/// Checks the converse, composition, complement and edge-intersection
/// properties bit by bit on the concrete relations.
pub fn verify_scaffold_properties(alg: &CosetRelationAlgebra, s: &Scaffold, roles: &ChaseRoles) -> ScaffoldReport {
    let t = alg.triple();
    let n = s.len();
    let name = |i: usize| t.name(i).to_string();
    let rel = |x: usize, y: usize| alg.atom_relation(s.atom(x, y));
    let converse_inverse = (0..n).all(|x| (0..n).all(|y| *rel(y, x) == rel(x, y).transpose()));
    let special = sorted3([roles.p, roles.q, roles.r]);
    let mut report = ScaffoldReport {
        converse_inverse,
        composition_checked: 0,
        composition_failures: Vec::new(),
        complement_checked: 0,
        complement_failures: Vec::new(),
        edges: Vec::new(),
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let product = product_matrix(alg, s.atom(x, y), s.atom(y, z));
                let composition = composition_matrix(alg, s.atom(x, y), s.atom(y, z));
                let triple = (name(x), name(y), name(z));
                if exempt(Some(special), x, y, z) {
                    let mut complement = BitMatrix::full(t.group(x).order(), t.group(z).order());
                    complement.difference_with(&composition);
                    report.complement_checked += 1;
                    if product != complement {
                        report.complement_failures.push(triple);
                    }
                } else {
                    report.composition_checked += 1;
                    if product != composition {
                        report.composition_failures.push(triple);
                    }
                }
            }
        }
    }
    let (p, q, r) = (roles.p, roles.q, roles.r);
    for (x, y) in [(p, q), (q, p), (q, r), (r, q), (p, r), (r, p)] {
        let atoms = edge_intersection(alg, s, roles, x, y);
        report.edges.push(EdgeCheck {
            x: name(x),
            y: name(y),
            holds: atoms == [s.atom(x, y)],
            intersection: atoms.into_iter().map(|i| AtomRef::of(alg, i)).collect(),
        });
    }
    report
}
