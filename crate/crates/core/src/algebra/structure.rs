use serde::Serialize;

use super::{AlgebraError, CosetRelationAlgebra};
use crate::frame::components;

/// Partition check for one block `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    pub x: String,
    pub y: String,
    pub atoms: usize,
    /// Pair count of each atom.
    pub sizes: Vec<usize>,
    pub nonempty: bool,
    pub disjoint: bool,
    pub covers_block: bool,
}

impl BlockPartition {
    pub fn ok(&self) -> bool {
        self.nonempty && self.disjoint && self.covers_block
    }
}

/// The atoms of each block are nonempty, pairwise disjoint and cover `G_x x G_y`.
pub fn verify_partition(alg: &CosetRelationAlgebra) -> Vec<BlockPartition> {
    let t = alg.triple();
    alg.blocks()
        .map(|(x, y)| {
            let range = alg.block_atoms(x, y);
            let rels: Vec<_> = range.clone().map(|i| alg.atom_relation(i)).collect();
            let sizes: Vec<usize> = rels.iter().map(|r| r.count()).collect();
            let disjoint = (0..rels.len()).all(|i| (0..i).all(|j| rels[i].is_disjoint(rels[j])));
            let total: usize = sizes.iter().sum();
            BlockPartition {
                x: t.name(x).to_string(),
                y: t.name(y).to_string(),
                atoms: rels.len(),
                nonempty: sizes.iter().all(|&s| s > 0),
                disjoint,
                covers_block: disjoint && total == t.group(x).order() * t.group(y).order(),
                sizes,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureEntry {
    pub index: String,
    pub group_order: usize,
    /// Number of atoms in the square `1'_x ; 1 ; 1'_x`.
    pub measure: usize,
    /// Concrete square equals `G_x x G_x`.
    pub square_is_full: bool,
    /// Atoms of the square are pairwise disjoint.
    pub disjoint: bool,
    /// Every atom of the square is a bijection as a set of pairs.
    pub bijective: bool,
    /// Every atom `a` of the square satisfies `a^ ; a <= 1'`.
    pub functional: bool,
}

impl MeasureEntry {
    pub fn ok(&self) -> bool {
        self.square_is_full && self.disjoint && self.bijective && self.functional && self.measure == self.group_order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurabilityReport {
    pub entries: Vec<MeasureEntry>,
}

impl MeasurabilityReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok())
    }
}

/// Squares of the subidentity atoms and their decomposition into functional atoms.
pub fn measurability_report(alg: &CosetRelationAlgebra) -> MeasurabilityReport {
    let t = alg.triple();
    let unit = alg.unit();
    let identity = alg.identity();
    let entries = (0..t.len())
        .map(|x| {
            let id_x = alg.atom_element(alg.block_atoms(x, x).start);
            let square = alg.otimes_unchecked(&alg.otimes_unchecked(&id_x, &unit), &id_x);
            let concrete = alg.concrete(&square).expect("same algebra");
            let n = t.group(x).order();
            let square_is_full = concrete.count() == n * n && concrete.blocks().all(|(&(a, b), _)| a == x && b == x);
            let atoms: Vec<usize> = square.atoms().collect();
            let disjoint = (0..atoms.len())
                .all(|i| (0..i).all(|j| alg.atom_relation(atoms[i]).is_disjoint(alg.atom_relation(atoms[j]))));
            let bijective = atoms.iter().all(|&a| alg.atom_relation(a).is_bijection());
            let functional = atoms.iter().all(|&a| {
                let e = alg.atom_element(a);
                alg.otimes_unchecked(&alg.converse_unchecked(&e), &e).is_subset(&identity)
            });
            MeasureEntry {
                index: t.name(x).to_string(),
                group_order: n,
                measure: atoms.len(),
                square_is_full,
                disjoint,
                bijective,
                functional,
            }
        })
        .collect();
    MeasurabilityReport { entries }
}

/// `1 ; r ; 1 = 1` for every subidentity atom `r`; false for empty `I`.
pub fn is_simple(alg: &CosetRelationAlgebra) -> bool {
    let t = alg.triple();
    if t.is_empty() {
        return false;
    }
    let unit = alg.unit();
    (0..t.len()).all(|x| {
        let r = alg.atom_element(alg.block_atoms(x, x).start);
        alg.otimes_unchecked(&alg.otimes_unchecked(&unit, &r), &unit) == unit
    })
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub factors: Vec<CosetRelationAlgebra>,
    /// Failed correspondence checks; empty when the product correspondence holds.
    pub mismatches: Vec<String>,
}

impl Decomposition {
    pub fn verified(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Factor algebras on the frame components, with an atom-by-atom check that
/// the algebra is their direct product.
pub fn decompose(alg: &CosetRelationAlgebra) -> Result<Decomposition, AlgebraError> {
    let t = alg.triple();
    let parts = components(t);
    let mut factors = Vec::with_capacity(parts.len());
    let mut mismatches = Vec::new();
    // Global atom index of every factor atom.
    let mut embed: Vec<Vec<usize>> = Vec::new();
    for part in &parts {
        let f = CosetRelationAlgebra::build(part)?;
        let global: Vec<usize> = part.system().names().iter().map(|n| t.index_of(n).unwrap()).collect();
        let mut map = Vec::with_capacity(f.atom_count());
        for (i, a) in f.atoms().iter().enumerate() {
            let g = alg.atom_index(global[a.x], global[a.y], a.alpha)?;
            if f.atom_relation(i) != alg.atom_relation(g) {
                mismatches.push(format!("relation of {} differs", f.atom_label(i)));
            }
            map.push(g);
        }
        for i in 0..f.atom_count() {
            if map[f.atom_converse(i)] != alg.atom_converse(map[i]) {
                mismatches.push(format!("converse of {} differs", f.atom_label(i)));
            }
            for j in 0..f.atom_count() {
                let local: Vec<usize> = f.atom_otimes(i, j).ones().map(|k| map[k]).collect();
                let glob: Vec<usize> = alg.atom_otimes(map[i], map[j]).ones().collect();
                let mut local_sorted = local;
                local_sorted.sort_unstable();
                if local_sorted != glob {
                    mismatches.push(format!("product {} ; {} differs", f.atom_label(i), f.atom_label(j)));
                }
            }
        }
        embed.push(map);
        factors.push(f);
    }
    let covered: usize = embed.iter().map(|m| m.len()).sum();
    if covered != alg.atom_count() {
        mismatches.push(format!("factors cover {covered} of {} atoms", alg.atom_count()));
    }
    for (p, mp) in embed.iter().enumerate() {
        for (q, mq) in embed.iter().enumerate() {
            if p == q {
                continue;
            }
            for &i in mp {
                for &j in mq {
                    if !alg.atom_otimes(i, j).is_clear() {
                        mismatches.push(format!(
                            "product across components {} ; {} is not zero",
                            alg.atom_label(i),
                            alg.atom_label(j)
                        ));
                    }
                }
            }
        }
    }
    Ok(Decomposition { factors, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::fixtures::{single, v4_frame};
    use crate::frame::{reassemble, GroupPair, GroupSystem, GroupTriple, IsoSystem};
    use crate::group::FiniteGroup;

    #[test]
    fn partition_and_measure_on_fixture() {
        let alg = CosetRelationAlgebra::build(&v4_frame(3, true)).unwrap();
        let parts = verify_partition(&alg);
        assert_eq!(parts.len(), 9);
        assert!(parts.iter().all(|b| b.ok()));
        let m = measurability_report(&alg);
        assert!(m.passed());
        assert!(m.entries.iter().all(|e| e.measure == 4));
        assert!(is_simple(&alg));
    }

    #[test]
    fn trivial_group_measure() {
        let alg = CosetRelationAlgebra::build(&single(FiniteGroup::cyclic(1).unwrap())).unwrap();
        let m = measurability_report(&alg);
        assert_eq!(m.entries[0].measure, 1);
        assert!(m.passed());
        assert_eq!(verify_partition(&alg)[0].sizes, vec![1]);
    }

    #[test]
    fn two_components() {
        let a = v4_frame(3, true);
        let b = reassemble(&[single(FiniteGroup::cyclic(3).unwrap())], &["x".into()]).unwrap();
        let names: Vec<String> = ["a", "b", "c", "x"].iter().map(|s| s.to_string()).collect();
        let u = reassemble(&[a, b], &names).unwrap();
        let alg = CosetRelationAlgebra::build(&u).unwrap();
        assert!(!is_simple(&alg));
        let d = decompose(&alg).unwrap();
        assert!(d.verified(), "{:?}", d.mismatches);
        assert_eq!(d.factors.len(), 2);
        assert_eq!(d.factors.iter().map(|f| f.atom_count()).sum::<usize>(), alg.atom_count());
        assert!(is_simple(&d.factors[0]) && is_simple(&d.factors[1]));
    }

    #[test]
    fn empty_frame_is_not_simple() {
        let system = GroupSystem::new(vec![]).unwrap();
        let isos = IsoSystem::new(&system, vec![]).unwrap();
        let t = GroupTriple::identity_cosets(GroupPair::new(system, isos).unwrap());
        let alg = CosetRelationAlgebra::build(&t).unwrap();
        assert_eq!(alg.atom_count(), 0);
        assert_eq!(alg.zero(), alg.unit());
        assert!(!is_simple(&alg));
        assert!(decompose(&alg).unwrap().factors.is_empty());
    }
}
