//! Bit-matrix binary relations between (tagged) group elements.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::group::Elem;

/// A relation between `0..rows` and `0..cols`, one bitset per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<FixedBitSet>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, bits: vec![FixedBitSet::with_capacity(cols); rows] }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut m = Self::new(rows, cols);
        for r in &mut m.bits {
            r.insert_range(..);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i].contains(j)
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i].insert(j);
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.bits[i]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|r| r.is_clear())
    }

    /// Relational composition `self ; other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "composition of mismatched blocks");
        let mut out = BitMatrix::new(self.rows, other.cols);
        for (i, row) in self.bits.iter().enumerate() {
            for j in row.ones() {
                out.bits[i].union_with(&other.bits[j]);
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::new(self.cols, self.rows);
        for (i, row) in self.bits.iter().enumerate() {
            for j in row.ones() {
                out.bits[j].insert(i);
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &BitMatrix) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            a.union_with(b);
        }
    }

    pub fn intersect_with(&mut self, other: &BitMatrix) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            a.intersect_with(b);
        }
    }

    pub fn difference_with(&mut self, other: &BitMatrix) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            a.difference_with(b);
        }
    }

    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_disjoint(&self, other: &BitMatrix) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a.is_disjoint(b))
    }

    /// Every row and every column holds exactly one bit.
    pub fn is_bijection(&self) -> bool {
        self.rows == self.cols
            && self.bits.iter().all(|r| r.count_ones(..) == 1)
            && self.transpose().bits.iter().all(|r| r.count_ones(..) == 1)
    }

    /// Set pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, r)| r.ones().map(move |j| (i, j)))
    }
}

/// A binary relation on the tagged base set, stored block by block.
/// Only nonempty blocks are kept, so equal relations compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcreteRelation {
    blocks: BTreeMap<(usize, usize), BitMatrix>,
}

impl ConcreteRelation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_block(x: usize, y: usize, m: BitMatrix) -> Self {
        let mut r = Self::empty();
        r.insert_block(x, y, m);
        r
    }

    /// Unions `m` into block `(x, y)`.
    pub fn insert_block(&mut self, x: usize, y: usize, m: BitMatrix) {
        if m.is_empty() {
            return;
        }
        match self.blocks.get_mut(&(x, y)) {
            Some(b) => b.union_with(&m),
            None => {
                self.blocks.insert((x, y), m);
            }
        }
    }

    /// Adds the single pair `((x, g), (y, h))`; block dimensions are needed
    /// in case the block does not exist yet.
    pub fn insert_pair(&mut self, x: usize, g: Elem, y: usize, h: Elem, dims: (usize, usize)) {
        self.blocks.entry((x, y)).or_insert_with(|| BitMatrix::new(dims.0, dims.1)).set(g, h);
    }

    pub fn block(&self, x: usize, y: usize) -> Option<&BitMatrix> {
        self.blocks.get(&(x, y))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &BitMatrix)> {
        self.blocks.iter()
    }

    pub fn contains(&self, x: usize, g: Elem, y: usize, h: Elem) -> bool {
        self.blocks.get(&(x, y)).is_some_and(|b| b.get(g, h))
    }

    pub fn count(&self) -> usize {
        self.blocks.values().map(|b| b.count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn union(&self, other: &ConcreteRelation) -> ConcreteRelation {
        let mut out = self.clone();
        for (&(x, y), m) in &other.blocks {
            out.insert_block(x, y, m.clone());
        }
        out
    }

    pub fn intersect(&self, other: &ConcreteRelation) -> ConcreteRelation {
        let mut out = ConcreteRelation::empty();
        for (&(x, y), m) in &self.blocks {
            if let Some(o) = other.blocks.get(&(x, y)) {
                let mut b = m.clone();
                b.intersect_with(o);
                out.insert_block(x, y, b);
            }
        }
        out
    }

    pub fn difference(&self, other: &ConcreteRelation) -> ConcreteRelation {
        let mut out = ConcreteRelation::empty();
        for (&(x, y), m) in &self.blocks {
            let mut b = m.clone();
            if let Some(o) = other.blocks.get(&(x, y)) {
                b.difference_with(o);
            }
            out.insert_block(x, y, b);
        }
        out
    }

    pub fn transpose(&self) -> ConcreteRelation {
        let mut out = ConcreteRelation::empty();
        for (&(x, y), m) in &self.blocks {
            out.insert_block(y, x, m.transpose());
        }
        out
    }

    pub fn compose(&self, other: &ConcreteRelation) -> ConcreteRelation {
        let mut out = ConcreteRelation::empty();
        for (&(x, y), a) in &self.blocks {
            for (&(_, z), b) in other.blocks.range((y, 0)..=(y, usize::MAX)) {
                out.insert_block(x, z, a.compose(b));
            }
        }
        out
    }

    pub fn is_subset(&self, other: &ConcreteRelation) -> bool {
        self.blocks.iter().all(|(k, m)| other.blocks.get(k).is_some_and(|o| m.is_subset(o)))
    }

    /// Pairs `(x, g, y, h)` in block-major, then row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, Elem, usize, Elem)> + '_ {
        self.blocks.iter().flat_map(|(&(x, y), m)| m.pairs().map(move |(g, h)| (x, g, y, h)))
    }
}
