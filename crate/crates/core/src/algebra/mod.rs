//! The coset relation algebra on a group triple: atomic relations
//! `R_{xy,a}`, Boolean operations on atom sets, converse, the shifted product
//! and plain relational composition, plus axiom, measurability and
//! decomposition checks.

mod axioms;
mod bits;
mod structure;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::frame::{check_pre_semi_frame, GroupTriple};
use crate::group::Elem;

pub use axioms::{check_axioms, Axiom, AxiomFailure, AxiomOutcome, AxiomReport, DEFAULT_SAMPLE_SEED};
pub use bits::{BitMatrix, ConcreteRelation};
pub use structure::{
    decompose, is_simple, measurability_report, verify_partition, BlockPartition, Decomposition, MeasurabilityReport,
    MeasureEntry,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("the triple is not a pre-semi-frame: {0}")]
    NotPreSemiFrame(String),
    #[error("converse of atom {0} does not match the transposed relation")]
    ConverseMismatch(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("relation is not in A: pair ({x}, {g}) -> ({y}, {h}) is {reason}")]
    NotInA { x: String, g: Elem, y: String, h: Elem, reason: &'static str },
    #[error("no atom ({0}, {1}, {2})")]
    NoSuchAtom(usize, usize, usize),
}

/// The atom `R_{xy,alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub x: usize,
    pub y: usize,
    pub alpha: usize,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A set of atoms of one specific algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: u64,
    atoms: FixedBitSet,
}

impl AlgebraElement {
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms.ones()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_clear()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.atoms
    }

    pub fn is_subset(&self, other: &AlgebraElement) -> bool {
        self.atoms.is_subset(&other.atoms)
    }
}

/// Result of composing two atoms as plain relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalComposition {
    pub relation: ConcreteRelation,
    /// The composition as an atom set, when it is a union of atoms.
    pub element: Option<AlgebraElement>,
}

impl RelationalComposition {
    pub fn in_a(&self) -> bool {
        self.element.is_some()
    }
}

/// The full algebra `C[F]` on a group triple, with every atom-level table
/// precomputed.
#[derive(Debug, Clone)]
pub struct CosetRelationAlgebra {
    id: u64,
    triple: GroupTriple,
    atoms: Vec<Atom>,
    block_start: BTreeMap<(usize, usize), usize>,
    relations: Vec<BitMatrix>,
    converse: Vec<usize>,
    otimes: Vec<FixedBitSet>,
    none: FixedBitSet,
}

impl CosetRelationAlgebra {
    /// Builds the algebra. The triple must be a pre-semi-frame so that `A`
    /// contains the identity and is closed under converse.
    pub fn build(triple: &GroupTriple) -> Result<Self, AlgebraError> {
        let pre = check_pre_semi_frame(triple);
        if let Some(e) = pre.failures().next() {
            return Err(AlgebraError::NotPreSemiFrame(format!("{} fails at {:?}", e.condition, e.instance)));
        }
        let mut atoms = Vec::new();
        let mut block_start = BTreeMap::new();
        let mut relations = Vec::new();
        for (x, y) in triple.isos().e2() {
            block_start.insert((x, y), atoms.len());
            let d = triple.data(x, y);
            let gy = triple.group(y);
            for alpha in 0..d.kappa() {
                atoms.push(Atom { x, y, alpha });
                let mut m = BitMatrix::new(triple.group(x).order(), gy.order());
                for (hg, kg) in d.h_cosets.iter().zip(&d.k_cosets) {
                    let right = gy.product_set(kg, &d.k_cosets[alpha]);
                    for &g in hg {
                        for &h in &right {
                            m.set(g, h);
                        }
                    }
                }
                relations.push(m);
            }
        }
        let n = atoms.len();
        let mut alg = Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            triple: triple.clone(),
            atoms,
            block_start,
            relations,
            converse: Vec::new(),
            otimes: Vec::new(),
            none: FixedBitSet::with_capacity(n),
        };
        alg.converse = alg.compute_converse()?;
        alg.otimes = alg.product_table(true);
        Ok(alg)
    }

    fn compute_converse(&self) -> Result<Vec<usize>, AlgebraError> {
        let mut out = Vec::with_capacity(self.atoms.len());
        for (i, a) in self.atoms.iter().enumerate() {
            let d = self.triple.data(a.x, a.y);
            let g = self.triple.group(a.x);
            // H_{xy,beta} = H_{xy,alpha}^-1
            let beta = d.h_index(g.inv(d.h_cosets[a.alpha][0]));
            let j = self.block_start[&(a.y, a.x)] + beta;
            if self.relations[j] != self.relations[i].transpose() {
                return Err(AlgebraError::ConverseMismatch(self.atom_label(i)));
            }
            out.push(j);
        }
        Ok(out)
    }

    /// Atom-pair table from the product formula, shifted by `C_xyz` when
    /// `shifted`, otherwise the plain Composition-Theorem formula.
    fn product_table(&self, shifted: bool) -> Vec<FixedBitSet> {
        let n = self.atoms.len();
        let mut table = vec![FixedBitSet::new(); n * n];
        for (i, a) in self.atoms.iter().enumerate() {
            for (j, b) in self.atoms.iter().enumerate() {
                if a.y == b.x {
                    table[i * n + j] = self.product_formula(a, b, shifted);
                }
            }
        }
        table
    }

    fn product_formula(&self, a: &Atom, b: &Atom, shifted: bool) -> FixedBitSet {
        let (x, y, z) = (a.x, a.y, b.y);
        let t = &self.triple;
        let xy = t.data(x, y);
        let gx = t.group(x);
        let inner = t.group(y).product_set(&xy.k_cosets[a.alpha], &t.data(y, z).h_cosets[b.alpha]);
        let mut s = xy.preimage(&inner);
        if shifted {
            s = gx.product_set(&s, t.coset(x, y, z));
        }
        let mut mark = vec![false; gx.order()];
        for &e in &s {
            mark[e] = true;
        }
        let xz = t.data(x, z);
        let start = self.block_start[&(x, z)];
        let mut out = FixedBitSet::with_capacity(self.atoms.len());
        for (gamma, c) in xz.h_cosets.iter().enumerate() {
            if c.iter().all(|&e| mark[e]) {
                out.insert(start + gamma);
            }
        }
        out
    }

    pub fn triple(&self) -> &GroupTriple {
        &self.triple
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, x: usize, y: usize, alpha: usize) -> Result<usize, AlgebraError> {
        let start = *self.block_start.get(&(x, y)).ok_or(AlgebraError::NoSuchAtom(x, y, alpha))?;
        if alpha >= self.triple.data(x, y).kappa() {
            return Err(AlgebraError::NoSuchAtom(x, y, alpha));
        }
        Ok(start + alpha)
    }

    /// Human-readable atom name, e.g. `R[p,q,3]`.
    pub fn atom_label(&self, i: usize) -> String {
        let a = self.atoms[i];
        format!("R[{},{},{}]", self.triple.name(a.x), self.triple.name(a.y), a.alpha)
    }

    /// Atom indices of block `(x, y)`.
    pub fn block_atoms(&self, x: usize, y: usize) -> std::ops::Range<usize> {
        let start = self.block_start[&(x, y)];
        start..start + self.triple.data(x, y).kappa()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.block_start.keys().copied()
    }

    pub fn atom_relation(&self, i: usize) -> &BitMatrix {
        &self.relations[i]
    }

    pub fn atom_converse(&self, i: usize) -> usize {
        self.converse[i]
    }

    /// `a (x) b` as an atom set (shared empty set for mismatched middles).
    pub fn atom_otimes(&self, a: usize, b: usize) -> &FixedBitSet {
        let row = &self.otimes[a * self.atoms.len() + b];
        if row.is_empty() {
            &self.none
        } else {
            row
        }
    }

    /// The atom-pair table given by the Composition-Theorem formula (no shift).
    pub fn composition_theorem_table(&self) -> Vec<FixedBitSet> {
        self.product_table(false).into_iter().map(|r| if r.is_empty() { self.none.clone() } else { r }).collect()
    }

    /// The full `otimes` table with empty rows materialised.
    pub fn otimes_table(&self) -> Vec<FixedBitSet> {
        (0..self.atoms.len() * self.atoms.len())
            .map(|k| self.atom_otimes(k / self.atoms.len(), k % self.atoms.len()).clone())
            .collect()
    }

    /// Plain set composition of two atoms, and whether it lies in `A`.
    pub fn atom_compose_relational(&self, a: usize, b: usize) -> RelationalComposition {
        let relation = self.atom_concrete(a).compose(&self.atom_concrete(b));
        let element = self.abstract_relation(&relation).ok();
        RelationalComposition { relation, element }
    }

    pub fn atom_concrete(&self, i: usize) -> ConcreteRelation {
        let a = self.atoms[i];
        ConcreteRelation::from_block(a.x, a.y, self.relations[i].clone())
    }

    // ---- elements ----

    fn element(&self, atoms: FixedBitSet) -> AlgebraElement {
        AlgebraElement { algebra: self.id, atoms }
    }

    fn same(&self, e: &AlgebraElement) -> Result<(), AlgebraError> {
        if e.algebra == self.id {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        self.element(FixedBitSet::with_capacity(self.atoms.len()))
    }

    /// The unit `E`, the set of all atoms.
    pub fn unit(&self) -> AlgebraElement {
        let mut b = FixedBitSet::with_capacity(self.atoms.len());
        b.insert_range(..);
        self.element(b)
    }

    /// The identity element `{R_xx,0 : x in I}`.
    pub fn identity(&self) -> AlgebraElement {
        let mut b = FixedBitSet::with_capacity(self.atoms.len());
        for x in 0..self.triple.len() {
            b.insert(self.block_start[&(x, x)]);
        }
        self.element(b)
    }

    pub fn atom_element(&self, i: usize) -> AlgebraElement {
        self.element_from_atoms([i])
    }

    pub fn element_from_atoms(&self, atoms: impl IntoIterator<Item = usize>) -> AlgebraElement {
        let mut b = FixedBitSet::with_capacity(self.atoms.len());
        b.extend(atoms);
        self.element(b)
    }

    pub fn element_from_bits(&self, bits: FixedBitSet) -> AlgebraElement {
        assert_eq!(bits.len(), self.atoms.len());
        self.element(bits)
    }

    pub fn union(&self, e: &AlgebraElement, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same(e)?;
        self.same(f)?;
        let mut b = e.atoms.clone();
        b.union_with(&f.atoms);
        Ok(self.element(b))
    }

    pub fn intersect(&self, e: &AlgebraElement, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same(e)?;
        self.same(f)?;
        let mut b = e.atoms.clone();
        b.intersect_with(&f.atoms);
        Ok(self.element(b))
    }

    pub fn complement(&self, e: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same(e)?;
        let mut b = e.atoms.clone();
        b.toggle_range(..);
        Ok(self.element(b))
    }

    pub fn converse(&self, e: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same(e)?;
        Ok(self.converse_unchecked(e))
    }

    pub(crate) fn converse_unchecked(&self, e: &AlgebraElement) -> AlgebraElement {
        self.element_from_atoms(e.atoms.ones().map(|i| self.converse[i]))
    }

    pub fn otimes(&self, e: &AlgebraElement, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same(e)?;
        self.same(f)?;
        Ok(self.otimes_unchecked(e, f))
    }

    pub(crate) fn otimes_unchecked(&self, e: &AlgebraElement, f: &AlgebraElement) -> AlgebraElement {
        let mut b = FixedBitSet::with_capacity(self.atoms.len());
        for i in e.atoms.ones() {
            let y = self.atoms[i].y;
            for j in f.atoms.ones() {
                if self.atoms[j].x == y {
                    b.union_with(&self.otimes[i * self.atoms.len() + j]);
                }
            }
        }
        self.element(b)
    }

    /// Union of the atoms' relations.
    pub fn concrete(&self, e: &AlgebraElement) -> Result<ConcreteRelation, AlgebraError> {
        self.same(e)?;
        let mut r = ConcreteRelation::empty();
        for i in e.atoms.ones() {
            let a = self.atoms[i];
            r.insert_block(a.x, a.y, self.relations[i].clone());
        }
        Ok(r)
    }

    /// The atom set whose union is exactly `r`; otherwise the first pair
    /// (block-major order) that is either outside `E` or only partly covers an atom.
    pub fn abstract_relation(&self, r: &ConcreteRelation) -> Result<AlgebraElement, AlgebraError> {
        let mut b = FixedBitSet::with_capacity(self.atoms.len());
        for (&(x, y), m) in r.blocks() {
            let Some(range) = self.block_start.get(&(x, y)).map(|_| self.block_atoms(x, y)) else {
                let (g, h) = m.pairs().next().expect("stored blocks are nonempty");
                return Err(self.not_in_a(x, g, y, h, "outside the unit E"));
            };
            for i in range {
                if self.relations[i].is_subset(m) {
                    b.insert(i);
                }
            }
        }
        let e = self.element(b);
        let covered = self.concrete(&e)?;
        if let Some((x, g, y, h)) = r.difference(&covered).pairs().next() {
            return Err(self.not_in_a(x, g, y, h, "in a partially covered atom"));
        }
        Ok(e)
    }

    fn not_in_a(&self, x: usize, g: Elem, y: usize, h: Elem, reason: &'static str) -> AlgebraError {
        AlgebraError::NotInA { x: self.triple.name(x).to_string(), g, y: self.triple.name(y).to_string(), h, reason }
    }

    /// Is `e` below the identity element?
    pub fn is_subidentity(&self, e: &AlgebraElement) -> bool {
        e.is_subset(&self.identity())
    }

    /// Atom labels of an element, in atom order.
    pub fn labels(&self, e: &AlgebraElement) -> Vec<String> {
        e.atoms.ones().map(|i| self.atom_label(i)).collect()
    }
}
