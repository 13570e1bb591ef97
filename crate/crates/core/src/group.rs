//! Finite groups given by Cayley tables, and the coset calculus built on them:
//! subgroups, normality, complex products, quotient groups, isomorphisms
//! between quotients, induced maps, and inner automorphisms.
//!
//! Element ids are `0..order` with the identity fixed at `0`. Element sets are
//! sorted, duplicate-free `Vec<Elem>`s throughout.

use std::sync::Arc;

use thiserror::Error;

/// Element id inside a [`FiniteGroup`].
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order must be positive")]
    ZeroOrder,
    #[error("Cayley table must be {order}x{order}; row {row} has {len} entries")]
    RaggedTable { order: usize, row: usize, len: usize },
    #[error("table entry {value} at ({row}, {col}) is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element 0 is not a two-sided identity (fails at element {0})")]
    IdentityNotZero(Elem),
    #[error("element {0} has no two-sided inverse")]
    NoInverse(Elem),
    #[error("operation is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(Elem, Elem, Elem),
    #[error("element id {elem} out of range for a group of order {order}")]
    ElementOutOfRange { elem: Elem, order: usize },
    #[error("subset does not contain the identity")]
    MissingIdentity,
    #[error("subset is not closed: {0}*{1} = {2} is missing")]
    NotClosed(Elem, Elem, Elem),
    #[error("subset is not closed under inverses: the inverse {1} of {0} is missing")]
    MissingInverse(Elem, Elem),
    #[error("subgroup is not normal: {g}*{h}*{g}^-1 = {image} is missing")]
    NotNormal { g: Elem, h: Elem, image: Elem },
    #[error("quotients have different sizes ({domain} vs {codomain})")]
    CosetCountMismatch { domain: usize, codomain: usize },
    #[error("coset map has length {len}, expected {expected}")]
    MapLength { len: usize, expected: usize },
    #[error("coset map is not a bijection: coset {0} is hit twice or out of range")]
    NotBijective(usize),
    #[error("coset map must send coset 0 to coset 0, got {0}")]
    IdentityNotFixed(usize),
    #[error("coset map is not a homomorphism at cosets ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("subgroup does not contain the quotient's normal subgroup")]
    NotCoarser,
    #[error("image of the coarser subgroup is not a normal subgroup of the codomain")]
    ImageNotNormalSubgroup,
    #[error("image of coarse coset {0} is not a single coset of the image subgroup")]
    ImageNotCoset(usize),
    #[error("set is not a coset of the quotient's normal subgroup")]
    NotACoset,
    #[error("subgroup belongs to a different group")]
    GroupMismatch,
}

/// A finite group stored as a full Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    inverse: Vec<Elem>,
}

impl FiniteGroup {
    /// Validates an explicit Cayley table (row `a`, column `b` holds `a*b`).
    pub fn from_table(rows: Vec<Vec<Elem>>) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::ZeroOrder);
        }
        let mut table = Vec::with_capacity(order * order);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != order {
                return Err(GroupError::RaggedTable { order, row, len: r.len() });
            }
            for (col, &value) in r.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange { row, col, value });
                }
            }
            table.extend_from_slice(r);
        }
        for a in 0..order {
            if table[a] != a || table[a * order] != a {
                return Err(GroupError::IdentityNotZero(a));
            }
        }
        let mut inverse = vec![0; order];
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| table[a * order + b] == 0 && table[b * order + a] == 0)
                .ok_or(GroupError::NoInverse(a))?;
            inverse[a] = inv;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a * order + b];
                for c in 0..order {
                    let bc = table[b * order + c];
                    if table[ab * order + c] != table[a * order + bc] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Self { order, table, inverse })
    }

    /// The cyclic group of order `n`, element `i` being the residue `i`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroOrder);
        }
        let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        let inverse = (0..n).map(|a| (n - a) % n).collect();
        Ok(Self { order: n, table, inverse })
    }

    /// Direct product; the pair `(a, b)` gets id `a * |b| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.order, b.order);
        let order = na * nb;
        let mut table = Vec::with_capacity(order * order);
        for u in 0..order {
            for v in 0..order {
                let (ua, ub) = (u / nb, u % nb);
                let (va, vb) = (v / nb, v % nb);
                table.push(a.op(ua, va) * nb + b.op(ub, vb));
            }
        }
        let inverse = (0..order).map(|u| a.inv(u / nb) * nb + b.inv(u % nb)).collect();
        Self { order, table, inverse }
    }

    /// Symmetric group on `n` letters; permutations are numbered in
    /// lexicographic order of their one-line notation, so id 0 is the identity.
    /// Composition is `(a*b)(i) = b(a(i))`.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroOrder);
        }
        let perms = permutations(n);
        let find = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
        let rows = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let composed: Vec<usize> = (0..n).map(|i| b[a[i]]).collect();
                        find(&composed)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        0
    }

    #[inline]
    pub fn op(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a]
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    /// The Cayley table as rows.
    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.op(a, b) == self.op(b, a)))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn check_elem(&self, elem: Elem) -> Result<(), GroupError> {
        if elem < self.order {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange { elem, order: self.order })
        }
    }

    /// `{u*v : u in a, v in b}`, sorted and deduplicated. Ids must be in range.
    pub fn product_set(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order];
        for &u in a {
            for &v in b {
                seen[self.op(u, v)] = true;
            }
        }
        collect_marked(&seen)
    }

    /// Element-wise inverse of a set.
    pub fn inverse_set(&self, a: &[Elem]) -> Vec<Elem> {
        let mut out: Vec<Elem> = a.iter().map(|&u| self.inv(u)).collect();
        out.sort_unstable();
        out
    }

    /// Left translate `g*S`.
    pub fn translate(&self, g: Elem, s: &[Elem]) -> Vec<Elem> {
        let mut out: Vec<Elem> = s.iter().map(|&h| self.op(g, h)).collect();
        out.sort_unstable();
        out
    }

    /// The whole group as an element set.
    pub fn all(&self) -> Vec<Elem> {
        (0..self.order).collect()
    }

    /// Smallest subgroup containing `gens`, as a sorted element set.
    pub fn generated(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut marks = vec![false; self.order];
        marks[0] = true;
        let mut frontier = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.op(a, g);
                if !marks[b] {
                    marks[b] = true;
                    frontier.push(b);
                }
            }
        }
        collect_marked(&marks)
    }

    /// Every subgroup as a sorted element set, ordered by size and then
    /// lexicographically. Joins of cyclic subgroups are closed until stable.
    pub fn subgroups(&self) -> Vec<Vec<Elem>> {
        let mut found: std::collections::BTreeSet<Vec<Elem>> = self.elements().map(|a| self.generated(&[a])).collect();
        let cyclic: Vec<Vec<Elem>> = found.iter().cloned().collect();
        let mut frontier: Vec<Vec<Elem>> = cyclic.clone();
        while let Some(s) = frontier.pop() {
            for c in &cyclic {
                let gens: Vec<Elem> = s.iter().chain(c).copied().collect();
                let j = self.generated(&gens);
                if found.insert(j.clone()) {
                    frontier.push(j);
                }
            }
        }
        let mut out: Vec<Vec<Elem>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub(crate) fn collect_marked(marks: &[bool]) -> Vec<Elem> {
    marks.iter().enumerate().filter_map(|(i, &m)| m.then_some(i)).collect()
}

/// Sorts and deduplicates an element list.
pub fn normalize_set(mut s: Vec<Elem>) -> Vec<Elem> {
    s.sort_unstable();
    s.dedup();
    s
}

/// Is `a` a subset of `b`? Both sorted.
pub fn is_subset(a: &[Elem], b: &[Elem]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

/// Complex product of two element sets of `g`.
pub fn complex_product(a: &[Elem], b: &[Elem], g: &FiniteGroup) -> Result<Vec<Elem>, GroupError> {
    for &e in a.iter().chain(b) {
        g.check_elem(e)?;
    }
    Ok(g.product_set(a, b))
}

/// A validated subgroup of a shared parent group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<Elem>,
}

impl Subgroup {
    pub fn new(parent: &Arc<FiniteGroup>, elements: &[Elem]) -> Result<Self, GroupError> {
        for &e in elements {
            parent.check_elem(e)?;
        }
        let elements = normalize_set(elements.to_vec());
        let mut member = vec![false; parent.order()];
        for &e in &elements {
            member[e] = true;
        }
        if !member[0] {
            return Err(GroupError::MissingIdentity);
        }
        for &a in &elements {
            let ai = parent.inv(a);
            if !member[ai] {
                return Err(GroupError::MissingInverse(a, ai));
            }
        }
        for &a in &elements {
            for &b in &elements {
                let ab = parent.op(a, b);
                if !member[ab] {
                    return Err(GroupError::NotClosed(a, b, ab));
                }
            }
        }
        Ok(Self { parent: Arc::clone(parent), elements })
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        Self { parent: Arc::clone(parent), elements: vec![0] }
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Self {
        Self { parent: Arc::clone(parent), elements: parent.all() }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// `g*s*g^-1 = s` for every `g`.
    pub fn is_normal(&self) -> bool {
        self.normality_witness().is_none()
    }

    fn normality_witness(&self) -> Option<(Elem, Elem, Elem)> {
        let g = &self.parent;
        for x in g.elements() {
            for &h in &self.elements {
                let image = g.op(g.op(x, h), g.inv(x));
                if !self.contains(image) {
                    return Some((x, h, image));
                }
            }
        }
        None
    }
}

/// A coset `rep * N` of a normal subgroup, stored with its minimal element as
/// representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub representative: Elem,
    pub elements: Vec<Elem>,
}

/// `G/N` with the canonical coset order: coset 0 is `N` itself, the rest
/// ascend by minimal representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGroup {
    group: Arc<FiniteGroup>,
    normal: Subgroup,
    cosets: Vec<Coset>,
    index: Vec<usize>,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

/// Builds `g / n`; `n` must be a normal subgroup of `g`.
pub fn quotient(g: &Arc<FiniteGroup>, n: &Subgroup) -> Result<QuotientGroup, GroupError> {
    if n.parent() != g {
        return Err(GroupError::GroupMismatch);
    }
    if let Some((x, h, image)) = n.normality_witness() {
        return Err(GroupError::NotNormal { g: x, h, image });
    }
    let order = g.order();
    let mut index = vec![usize::MAX; order];
    let mut cosets = Vec::new();
    for rep in g.elements() {
        if index[rep] != usize::MAX {
            continue;
        }
        let elements = g.translate(rep, n.elements());
        for &e in &elements {
            index[e] = cosets.len();
        }
        cosets.push(Coset { representative: rep, elements });
    }
    let k = cosets.len();
    let mut table = vec![0; k * k];
    let mut inverse = vec![0; k];
    for i in 0..k {
        let ri = cosets[i].representative;
        inverse[i] = index[g.inv(ri)];
        for j in 0..k {
            table[i * k + j] = index[g.op(ri, cosets[j].representative)];
        }
    }
    Ok(QuotientGroup { group: Arc::clone(g), normal: n.clone(), cosets, index, table, inverse })
}

impl QuotientGroup {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn normal(&self) -> &Subgroup {
        &self.normal
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    /// Number of cosets.
    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    /// Coset index of an element.
    pub fn index_of(&self, e: Elem) -> usize {
        self.index[e]
    }

    pub fn coset(&self, i: usize) -> &Coset {
        &self.cosets[i]
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.cosets.len() + j]
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Index of the coset equal to `set`, if `set` is one.
    pub fn find_coset(&self, set: &[Elem]) -> Option<usize> {
        let first = *set.first()?;
        let i = self.index[first];
        (self.cosets[i].elements == set).then_some(i)
    }

    pub fn is_abelian(&self) -> bool {
        let k = self.len();
        (0..k).all(|i| (0..i).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    /// All isomorphisms onto `other`, as coset-index maps in lexicographic order.
    pub fn isomorphisms_to(&self, other: &QuotientGroup) -> Vec<Vec<usize>> {
        enumerate_isomorphisms(self.len(), |a, b| self.mul(a, b), other.len(), |a, b| other.mul(a, b))
    }
}

fn small_order(n: usize, mul: &impl Fn(usize, usize) -> usize, a: usize) -> usize {
    let mut k = 1;
    let mut x = a;
    while x != 0 {
        x = mul(x, a);
        k += 1;
        debug_assert!(k <= n);
    }
    k
}

/// Enumerates isomorphisms between two small groups given by multiplication
/// closures (identity 0 on both sides). Results are sorted lexicographically.
pub(crate) fn enumerate_isomorphisms(
    n: usize,
    mul_a: impl Fn(usize, usize) -> usize,
    m: usize,
    mul_b: impl Fn(usize, usize) -> usize,
) -> Vec<Vec<usize>> {
    if n != m {
        return Vec::new();
    }
    // Greedy generating set of the domain.
    let mut generators = Vec::new();
    let mut reached = vec![false; n];
    reached[0] = true;
    for cand in 0..n {
        if reached[cand] {
            continue;
        }
        generators.push(cand);
        // Close the subgroup generated so far.
        let mut frontier: Vec<usize> = (0..n).filter(|&x| reached[x]).collect();
        while let Some(u) = frontier.pop() {
            for &g in &generators {
                for w in [mul_a(u, g), mul_a(g, u)] {
                    if !reached[w] {
                        reached[w] = true;
                        frontier.push(w);
                    }
                }
            }
        }
    }
    let orders_b: Vec<usize> = (0..m).map(|b| small_order(m, &mul_b, b)).collect();
    let candidates: Vec<Vec<usize>> = generators
        .iter()
        .map(|&g| {
            let og = small_order(n, &mul_a, g);
            (0..m).filter(|&b| orders_b[b] == og).collect()
        })
        .collect();

    let mut results = Vec::new();
    let mut choice = vec![0usize; generators.len()];
    loop {
        if candidates.iter().any(|c| c.is_empty()) {
            break;
        }
        let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_homomorphism(n, &mul_a, &mul_b, &generators, &images) {
            results.push(map);
        }
        // Advance the mixed-radix counter.
        let mut pos = generators.len();
        loop {
            if pos == 0 {
                results.sort();
                return results;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
    results.sort();
    results
}

fn extend_homomorphism(
    n: usize,
    mul_a: &impl Fn(usize, usize) -> usize,
    mul_b: &impl Fn(usize, usize) -> usize,
    generators: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut queue = vec![0usize];
    while let Some(u) = queue.pop() {
        for (&g, &img) in generators.iter().zip(images) {
            let w = mul_a(u, g);
            let wi = mul_b(map[u], img);
            if map[w] == usize::MAX {
                map[w] = wi;
                queue.push(w);
            } else if map[w] != wi {
                return None;
            }
        }
    }
    let mut hit = vec![false; n];
    for &v in &map {
        if v == usize::MAX || hit[v] {
            return None;
        }
        hit[v] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if map[mul_a(a, b)] != mul_b(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

/// Isomorphism between two quotient groups, stored as a coset-index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientIso {
    domain: Arc<QuotientGroup>,
    codomain: Arc<QuotientGroup>,
    map: Vec<usize>,
}

/// Validates `map` as an isomorphism `domain -> codomain`.
pub fn quotient_iso(
    domain: &Arc<QuotientGroup>,
    codomain: &Arc<QuotientGroup>,
    map: Vec<usize>,
) -> Result<QuotientIso, GroupError> {
    let k = domain.len();
    if codomain.len() != k {
        return Err(GroupError::CosetCountMismatch { domain: k, codomain: codomain.len() });
    }
    if map.len() != k {
        return Err(GroupError::MapLength { len: map.len(), expected: k });
    }
    let mut hit = vec![false; k];
    for &v in &map {
        if v >= k || hit[v] {
            return Err(GroupError::NotBijective(v));
        }
        hit[v] = true;
    }
    if map[0] != 0 {
        return Err(GroupError::IdentityNotFixed(map[0]));
    }
    for i in 0..k {
        for j in 0..k {
            if map[domain.mul(i, j)] != codomain.mul(map[i], map[j]) {
                return Err(GroupError::NotHomomorphism(i, j));
            }
        }
    }
    Ok(QuotientIso { domain: Arc::clone(domain), codomain: Arc::clone(codomain), map })
}

impl QuotientIso {
    /// The identity automorphism of `q`.
    pub fn identity(q: &Arc<QuotientGroup>) -> Self {
        Self { domain: Arc::clone(q), codomain: Arc::clone(q), map: (0..q.len()).collect() }
    }

    pub fn domain(&self) -> &Arc<QuotientGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<QuotientGroup> {
        &self.codomain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn inverse(&self) -> QuotientIso {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        QuotientIso { domain: Arc::clone(&self.codomain), codomain: Arc::clone(&self.domain), map: inv }
    }

    pub fn is_identity_map(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Image of a union of domain cosets, as an element set of the codomain group.
    pub fn image_set(&self, set: &[Elem]) -> Vec<Elem> {
        let mut marks = vec![false; self.codomain.len()];
        for &e in set {
            marks[self.map[self.domain.index_of(e)]] = true;
        }
        let mut out = Vec::new();
        for (j, m) in marks.iter().enumerate() {
            if *m {
                out.extend_from_slice(&self.codomain.coset(j).elements);
            }
        }
        normalize_set(out)
    }
}

/// The map induced by `phi` on the quotient by a coarser normal subgroup.
pub fn induced_iso(phi: &QuotientIso, coarser: &Subgroup) -> Result<QuotientIso, GroupError> {
    let dom = phi.domain();
    let g = dom.group();
    if coarser.parent() != g {
        return Err(GroupError::GroupMismatch);
    }
    if !is_subset(dom.normal().elements(), coarser.elements()) {
        return Err(GroupError::NotCoarser);
    }
    let coarse_q = Arc::new(quotient(g, coarser)?);
    let h = phi.codomain().group();
    let image = phi.image_set(coarser.elements());
    let image_sub = Subgroup::new(h, &image).map_err(|_| GroupError::ImageNotNormalSubgroup)?;
    if !image_sub.is_normal() {
        return Err(GroupError::ImageNotNormalSubgroup);
    }
    let target = Arc::new(quotient(h, &image_sub)?);
    let mut map = Vec::with_capacity(coarse_q.len());
    for (i, c) in coarse_q.cosets().iter().enumerate() {
        let img = phi.image_set(&c.elements);
        map.push(target.find_coset(&img).ok_or(GroupError::ImageNotCoset(i))?);
    }
    quotient_iso(&coarse_q, &target, map)
}

/// Inner automorphism `D -> c^-1 * D * c` of `q`, as a coset-index map.
pub fn inner_automorphism(q: &QuotientGroup, c: &Coset) -> Result<Vec<usize>, GroupError> {
    let ci = q.find_coset(&c.elements).ok_or(GroupError::NotACoset)?;
    Ok((0..q.len()).map(|d| q.mul(q.mul(q.inv(ci), d), ci)).collect())
}

/// Does `c` commute with every coset of `q`?
pub fn center_contains(q: &QuotientGroup, c: &Coset) -> bool {
    match q.find_coset(&c.elements) {
        Some(ci) => (0..q.len()).all(|d| q.mul(ci, d) == q.mul(d, ci)),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_cubed() -> Arc<FiniteGroup> {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        Arc::new(FiniteGroup::direct_product(&FiniteGroup::direct_product(&z2, &z2), &z2))
    }

    /// Id of the tuple `(a, b, c)` in `(Z2 x Z2) x Z2`.
    fn t(a: usize, b: usize, c: usize) -> Elem {
        (a * 2 + b) * 2 + c
    }

    fn s3() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::symmetric(3).unwrap())
    }

    #[test]
    fn subgroup_lattices() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(FiniteGroup::direct_product(&z2, &z2).subgroups().len(), 5);
        assert_eq!(z2_cubed().subgroups().len(), 16);
        assert_eq!(FiniteGroup::cyclic(8).unwrap().subgroups().len(), 4);
        let s = s3();
        let subs = s.subgroups();
        assert_eq!(subs.len(), 6);
        let normal = subs.iter().filter(|h| Subgroup::new(&s, h).unwrap().is_normal()).count();
        assert_eq!(normal, 3);
        assert_eq!(s.generated(&[]), vec![0]);
    }

    #[test]
    fn cyclic_groups() {
        assert_eq!(FiniteGroup::cyclic(0), Err(GroupError::ZeroOrder));
        assert_eq!(FiniteGroup::cyclic(1).unwrap().order(), 1);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(z2.op(1, 1), 0);
        assert_eq!(FiniteGroup::cyclic(4).unwrap().inv(3), 1);
    }

    #[test]
    fn products() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v4 = FiniteGroup::direct_product(&z2, &z2);
        assert_eq!(v4.order(), 4);
        assert!(v4.elements().all(|a| v4.inv(a) == a));
        let g = z2_cubed();
        assert_eq!(g.order(), 8);
        assert!(g.elements().all(|a| g.op(a, a) == 0));
        let z1 = FiniteGroup::cyclic(1).unwrap();
        let s = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(FiniteGroup::direct_product(&z1, &s), s);
        // Tables produced by the constructors pass the full validator.
        assert_eq!(FiniteGroup::from_table(g.rows()).unwrap(), *g);
    }

    #[test]
    fn table_validation_rejects_bad_tables() {
        assert!(matches!(FiniteGroup::from_table(vec![vec![0, 1], vec![1]]), Err(GroupError::RaggedTable { .. })));
        assert_eq!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]), Err(GroupError::IdentityNotZero(0)));
        // Identity ok, but 1*1 = 1 leaves 1 without an inverse.
        assert_eq!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]), Err(GroupError::NoInverse(1)));
        // A commutative loop of order 5 that is not associative.
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(loop5), Err(GroupError::NotAssociative(..))));
    }

    #[test]
    fn complex_products_of_order_two_subgroups() {
        let g = z2_cubed();
        let l0 = [t(0, 0, 0), t(1, 0, 0)];
        let l1 = normalize_set(vec![t(0, 0, 0), t(0, 1, 0)]);
        let l3 = [t(0, 0, 0), t(1, 1, 1)];
        let c0_c3 = normalize_set(vec![t(0, 0, 0), t(1, 0, 0), t(0, 1, 1), t(1, 1, 1)]);
        assert_eq!(complex_product(&l0, &l3, &g).unwrap(), c0_c3);
        let c0_c1 = normalize_set(vec![t(0, 0, 0), t(1, 0, 0), t(0, 1, 0), t(1, 1, 0)]);
        assert_eq!(complex_product(&l0, &l1, &g).unwrap(), c0_c1);
        let s = vec![1, 3, 6];
        assert_eq!(complex_product(&[0], &s, &g).unwrap(), s);
        assert!(complex_product(&[8], &s, &g).is_err());
    }

    #[test]
    fn subgroup_validation() {
        let g = z2_cubed();
        let l0 = Subgroup::new(&g, &[t(0, 0, 0), t(1, 0, 0)]).unwrap();
        assert_eq!(l0.order(), 2);
        assert!(Subgroup::new(&g, &[t(0, 0, 0), t(1, 1, 1)]).is_ok());
        assert_eq!(
            Subgroup::new(&g, &[t(0, 0, 0), t(1, 0, 0), t(0, 1, 0)]),
            Err(GroupError::NotClosed(t(0, 1, 0), t(1, 0, 0), t(1, 1, 0)))
        );
        assert_eq!(Subgroup::new(&g, &[t(1, 0, 0)]), Err(GroupError::MissingIdentity));
        let z4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
        assert_eq!(Subgroup::new(&z4, &[0, 1]), Err(GroupError::MissingInverse(1, 3)));
    }

    #[test]
    fn normality() {
        let g = z2_cubed();
        for s in [vec![0, 1], vec![0, 7], vec![0, 2, 4, 6]] {
            assert!(Subgroup::new(&g, &s).unwrap().is_normal());
        }
        assert!(Subgroup::whole(&g).is_normal());
        let s3 = s3();
        // Brute-force: find the order-2 subgroups and check conjugation by hand.
        let transpositions: Vec<Elem> = s3.elements().filter(|&a| a != 0 && s3.op(a, a) == 0).collect();
        assert_eq!(transpositions.len(), 3);
        for &tr in &transpositions {
            let h = Subgroup::new(&s3, &[0, tr]).unwrap();
            let brute = s3.elements().all(|x| {
                let conj = s3.op(s3.op(x, tr), s3.inv(x));
                conj == tr
            });
            assert!(!brute);
            assert_eq!(h.is_normal(), brute);
        }
    }

    #[test]
    fn quotients_follow_canonical_order() {
        let g = z2_cubed();
        let l0 = Subgroup::new(&g, &[t(0, 0, 0), t(1, 0, 0)]).unwrap();
        let q = quotient(&g, &l0).unwrap();
        assert_eq!(q.len(), 4);
        // Coset 0 is L0; the others ascend by minimal element: (0,0,1), (0,1,0), (0,1,1).
        assert_eq!(q.coset(0).elements, vec![t(0, 0, 0), t(1, 0, 0)]);
        assert_eq!(q.coset(1).elements, vec![t(0, 0, 1), t(1, 0, 1)]);
        assert_eq!(q.coset(2).elements, vec![t(0, 1, 0), t(1, 1, 0)]);
        assert_eq!(q.coset(3).elements, vec![t(0, 1, 1), t(1, 1, 1)]);
        for e in g.elements() {
            assert!(q.coset(q.index_of(e)).elements.contains(&e));
        }
        let triv = quotient(&g, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(triv.len(), 8);
        assert_eq!(quotient(&g, &Subgroup::whole(&g)).unwrap().len(), 1);
        let s3 = s3();
        let tr = s3.elements().find(|&a| a != 0 && s3.op(a, a) == 0).unwrap();
        let h = Subgroup::new(&s3, &[0, tr]).unwrap();
        assert!(matches!(quotient(&s3, &h), Err(GroupError::NotNormal { .. })));
    }

    #[test]
    fn quotient_isomorphisms() {
        let g = z2_cubed();
        let triv = Arc::new(quotient(&g, &Subgroup::trivial(&g)).unwrap());
        assert!(quotient_iso(&triv, &triv, (0..8).collect()).is_ok());

        let l0 = Subgroup::new(&g, &[t(0, 0, 0), t(1, 0, 0)]).unwrap();
        let q = Arc::new(quotient(&g, &l0).unwrap());
        // Named cosets: C1 = (0,1,0)L0 is index 2, C2 = (0,0,1)L0 is index 1.
        // C0->C0, C1->C3, C2->C2, C3->C1.
        let phi = quotient_iso(&q, &q, vec![0, 1, 3, 2]).unwrap();
        assert_eq!(phi.inverse().map(), &[0, 1, 3, 2]);
        assert_eq!(quotient_iso(&q, &q, vec![1, 0, 2, 3]), Err(GroupError::IdentityNotFixed(1)));
        assert_eq!(quotient_iso(&q, &q, vec![0, 1, 1, 3]), Err(GroupError::NotBijective(1)));
        let z4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let qz4 = Arc::new(quotient(&z4, &Subgroup::trivial(&z4)).unwrap());
        assert!(matches!(quotient_iso(&qz4, &qz4, vec![0, 2, 1, 3]), Err(GroupError::NotHomomorphism(..))));
        assert_eq!(q.isomorphisms_to(&q).len(), 6);
        assert_eq!(qz4.isomorphisms_to(&qz4), vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]);
    }

    #[test]
    fn induced_maps() {
        let g = z2_cubed();
        let triv = Arc::new(quotient(&g, &Subgroup::trivial(&g)).unwrap());
        // Swap the second and third coordinates: (a,b,c) -> (a,c,b).
        let swap: Vec<usize> = (0..8)
            .map(|e| {
                let (a, b, c) = (e >> 2, (e >> 1) & 1, e & 1);
                t(a, c, b)
            })
            .collect();
        let phi = quotient_iso(&triv, &triv, swap.clone()).unwrap();
        let h = Subgroup::new(&g, &[t(0, 0, 0), t(0, 1, 0)]).unwrap();
        let coarse = induced_iso(&phi, &h).unwrap();
        assert_eq!(coarse.domain().len(), 4);
        for (i, c) in coarse.domain().cosets().iter().enumerate() {
            let img: Vec<Elem> = normalize_set(c.elements.iter().map(|&e| swap[e]).collect());
            assert_eq!(coarse.codomain().coset(coarse.apply(i)).elements, img);
        }
        let whole = induced_iso(&phi, &Subgroup::whole(&g)).unwrap();
        assert_eq!(whole.map(), &[0]);
        let l0 = Subgroup::new(&g, &[0, 4]).unwrap();
        let q = Arc::new(quotient(&g, &l0).unwrap());
        let psi = quotient_iso(&q, &q, vec![0, 1, 3, 2]).unwrap();
        assert_eq!(induced_iso(&psi, &h), Err(GroupError::NotCoarser));
    }

    #[test]
    fn inner_automorphisms_and_center() {
        let g = z2_cubed();
        let l0 = Subgroup::new(&g, &[0, 4]).unwrap();
        let q = quotient(&g, &l0).unwrap();
        for c in q.cosets() {
            assert_eq!(inner_automorphism(&q, c).unwrap(), vec![0, 1, 2, 3]);
            assert!(center_contains(&q, c));
        }
        let s3 = s3();
        let q = quotient(&s3, &Subgroup::trivial(&s3)).unwrap();
        assert_eq!(inner_automorphism(&q, q.coset(0)).unwrap(), (0..6).collect::<Vec<_>>());
        let tr = s3.elements().find(|&a| a != 0 && s3.op(a, a) == 0).unwrap();
        let c = q.coset(tr).clone();
        let tau = inner_automorphism(&q, &c).unwrap();
        // Brute force: tr^-1 * d * tr.
        let brute: Vec<usize> = (0..6).map(|d| s3.op(s3.op(s3.inv(tr), d), tr)).collect();
        assert_eq!(tau, brute);
        assert_ne!(tau, (0..6).collect::<Vec<_>>());
        assert!(!center_contains(&q, &c));
        assert!(center_contains(&q, q.coset(0)));
        let bogus = Coset { representative: 0, elements: vec![0, 1] };
        assert_eq!(inner_automorphism(&q, &bogus), Err(GroupError::NotACoset));
    }
}
