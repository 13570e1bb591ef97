//! Atom-level verification of the relation-algebra axioms.
//!
//! R4, R5, R7 and R11 are positive regular laws, so checking them on atoms is
//! exhaustive. The remaining laws hold by construction and are checked on a
//! seeded sample of elements.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{AlgebraElement, CosetRelationAlgebra};

pub const DEFAULT_SAMPLE_SEED: u64 = 0x5e_ed0f_a70c;
const SAMPLE_ELEMENTS: usize = 48;
const MAX_RECORDED: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R11,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    /// Atom labels (atomic checks) or sample indices (sampled checks).
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    /// Number of instances examined.
    pub checked: usize,
    /// Number of failing instances.
    pub failed: usize,
    /// The first few failures in instance order.
    pub failures: Vec<AxiomFailure>,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub sample_seed: u64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed())
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes.iter().find(|o| o.axiom == axiom).expect("every axiom is reported")
    }

    pub fn failed_axioms(&self) -> Vec<Axiom> {
        self.outcomes.iter().filter(|o| !o.passed()).map(|o| o.axiom).collect()
    }
}

fn outcome(axiom: Axiom, checked: usize, failures: Vec<AxiomFailure>) -> AxiomOutcome {
    let failed = failures.len();
    let failures = failures.into_iter().take(MAX_RECORDED).collect();
    AxiomOutcome { axiom, checked, failed, failures }
}

/// Checks every axiom; parallel over the first atom, merged in atom order.
pub fn check_axioms(alg: &CosetRelationAlgebra, seed: u64) -> AxiomReport {
    let outcomes = vec![r5(alg), r7(alg), r4(alg), r11(alg)];
    let mut sampled = sampled_laws(alg, seed);
    let mut all = outcomes;
    all.append(&mut sampled);
    all.sort_by_key(|o| o.axiom);
    AxiomReport { sample_seed: seed, outcomes: all }
}

fn labels(alg: &CosetRelationAlgebra, atoms: &[usize]) -> Vec<String> {
    atoms.iter().map(|&i| alg.atom_label(i)).collect()
}

/// `a ; 1' = a` for every atom.
fn r5(alg: &CosetRelationAlgebra) -> AxiomOutcome {
    let id = alg.identity();
    let failures: Vec<AxiomFailure> = (0..alg.atom_count())
        .into_par_iter()
        .filter_map(|i| {
            let a = alg.atom_element(i);
            let got = alg.otimes_unchecked(&a, &id);
            (got != a)
                .then(|| AxiomFailure { witness: labels(alg, &[i]), detail: format!("a;1' = {:?}", alg.labels(&got)) })
        })
        .collect();
    outcome(Axiom::R5, alg.atom_count(), failures)
}

/// `(a;b)^ = b^;a^` for every pair of atoms.
fn r7(alg: &CosetRelationAlgebra) -> AxiomOutcome {
    let n = alg.atom_count();
    let failures: Vec<AxiomFailure> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = alg.atom_element(i);
            let ca = alg.converse_unchecked(&a);
            (0..n).filter_map(move |j| {
                let b = alg.atom_element(j);
                let lhs = alg.converse_unchecked(&alg.otimes_unchecked(&a, &b));
                let rhs = alg.otimes_unchecked(&alg.converse_unchecked(&b), &ca);
                (lhs != rhs).then(|| AxiomFailure {
                    witness: labels(alg, &[i, j]),
                    detail: format!("(a;b)^ = {:?}, b^;a^ = {:?}", alg.labels(&lhs), alg.labels(&rhs)),
                })
            })
        })
        .collect();
    outcome(Axiom::R7, n * n, failures)
}

/// `(a;b);c = a;(b;c)` on block-compatible atom triples, plus one emptiness
/// check per pair of blocks with mismatched middle indices.
fn r4(alg: &CosetRelationAlgebra) -> AxiomOutcome {
    let n = alg.atom_count();
    let atoms = alg.atoms();
    let starting_at = |y: usize| -> Vec<usize> { (0..n).filter(|&j| atoms[j].x == y).collect() };
    let by_start: Vec<Vec<usize>> = (0..alg.triple().len()).map(starting_at).collect();
    let mut failures: Vec<AxiomFailure> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = alg.atom_element(i);
            let mut out = Vec::new();
            for &j in &by_start[atoms[i].y] {
                let b = alg.atom_element(j);
                let ab = alg.otimes_unchecked(&a, &b);
                for &k in &by_start[atoms[j].y] {
                    let c = alg.atom_element(k);
                    let lhs = alg.otimes_unchecked(&ab, &c);
                    let rhs = alg.otimes_unchecked(&a, &alg.otimes_unchecked(&b, &c));
                    if lhs != rhs {
                        out.push(AxiomFailure {
                            witness: labels(alg, &[i, j, k]),
                            detail: format!("(a;b);c = {:?}, a;(b;c) = {:?}", alg.labels(&lhs), alg.labels(&rhs)),
                        });
                    }
                }
            }
            out
        })
        .collect();
    let checked_triples: usize =
        (0..n).map(|i| by_start[atoms[i].y].iter().map(|&j| by_start[atoms[j].y].len()).sum::<usize>()).sum();
    let mut shapes = 0;
    let blocks: Vec<(usize, usize)> = alg.blocks().collect();
    for &(x, y) in &blocks {
        for &(w, z) in &blocks {
            if y != w {
                shapes += 1;
                let a = alg.block_atoms(x, y).start;
                let b = alg.block_atoms(w, z).start;
                if !alg.atom_otimes(a, b).is_clear() {
                    failures.push(AxiomFailure {
                        witness: labels(alg, &[a, b]),
                        detail: "product with mismatched middle indices is not empty".into(),
                    });
                }
            }
        }
    }
    outcome(Axiom::R4, checked_triples + shapes, failures)
}

/// Atomic cycle law: `s <= r^;t` implies `t <= r;s`, for `r` in block
/// `(x, y)`, `s` in `(y, z)`, `t` in `(x, z)`.
fn r11(alg: &CosetRelationAlgebra) -> AxiomOutcome {
    let n = alg.atom_count();
    let atoms = alg.atoms();
    let results: Vec<(usize, Vec<AxiomFailure>)> = (0..n)
        .into_par_iter()
        .map(|r| {
            let (x, y) = (atoms[r].x, atoms[r].y);
            let rc = alg.atom_converse(r);
            let mut checked = 0;
            let mut out = Vec::new();
            for (bx, z) in alg.blocks().filter(|&(bx, _)| bx == y) {
                for s in alg.block_atoms(bx, z) {
                    for t in alg.block_atoms(x, z) {
                        checked += 1;
                        let premise = alg.atom_otimes(rc, t).contains(s);
                        let conclusion = alg.atom_otimes(r, s).contains(t);
                        if premise && !conclusion {
                            out.push(AxiomFailure {
                                witness: labels(alg, &[r, s, t]),
                                detail: "s <= r^;t but not t <= r;s".into(),
                            });
                        }
                    }
                }
            }
            (checked, out)
        })
        .collect();
    let checked = results.iter().map(|(c, _)| c).sum();
    let failures = results.into_iter().flat_map(|(_, f)| f).collect();
    outcome(Axiom::R11, checked, failures)
}

fn sample(alg: &CosetRelationAlgebra, seed: u64) -> Vec<AlgebraElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = alg.atom_count();
    let mut out = vec![alg.zero(), alg.unit(), alg.identity()];
    while out.len() < SAMPLE_ELEMENTS {
        // Alternate dense and sparse elements.
        let p = if out.len() % 2 == 0 { 0.5 } else { 3.0 / (n.max(1) as f64) };
        out.push(alg.element_from_atoms((0..n).filter(|_| rng.gen_bool(p.min(1.0)))));
    }
    out
}

fn sampled_laws(alg: &CosetRelationAlgebra, seed: u64) -> Vec<AxiomOutcome> {
    let els = sample(alg, seed);
    let m = els.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let triples: Vec<[usize; 3]> =
        (0..4 * m).map(|_| [rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m)]).collect();

    let add = |a: &AlgebraElement, b: &AlgebraElement| alg.union(a, b).unwrap();
    let neg = |a: &AlgebraElement| alg.complement(a).unwrap();
    let mul = |a: &AlgebraElement, b: &AlgebraElement| alg.otimes_unchecked(a, b);
    let conv = |a: &AlgebraElement| alg.converse_unchecked(a);
    let fail = |idx: &[usize], what: &str| AxiomFailure {
        witness: idx.iter().map(|i| format!("sample#{i}")).collect(),
        detail: what.to_string(),
    };

    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    let mut r3 = Vec::new();
    let mut r6 = Vec::new();
    let mut r8 = Vec::new();
    let mut r9 = Vec::new();
    for (i, e) in els.iter().enumerate().take(m) {
        if conv(&conv(e)) != *e {
            r6.push(fail(&[i], "r^^ != r"));
        }
    }
    for &[i, j, k] in &triples {
        let (r, s, t) = (&els[i], &els[j], &els[k]);
        if add(r, s) != add(s, r) {
            r1.push(fail(&[i, j], "r+s != s+r"));
        }
        if add(r, &add(s, t)) != add(&add(r, s), t) {
            r2.push(fail(&[i, j, k], "r+(s+t) != (r+s)+t"));
        }
        if add(&neg(&add(&neg(r), s)), &neg(&add(&neg(r), &neg(s)))) != *r {
            r3.push(fail(&[i, j], "-(-r+s) + -(-r+-s) != r"));
        }
        if mul(&add(r, s), t) != add(&mul(r, t), &mul(s, t)) {
            r8.push(fail(&[i, j, k], "(r+s);t != r;t + s;t"));
        }
        if conv(&add(r, s)) != add(&conv(r), &conv(s)) {
            r9.push(fail(&[i, j], "(r+s)^ != r^ + s^"));
        }
    }
    let t = triples.len();
    vec![
        outcome(Axiom::R1, t, r1),
        outcome(Axiom::R2, t, r2),
        outcome(Axiom::R3, t, r3),
        outcome(Axiom::R6, m, r6),
        outcome(Axiom::R8, t, r8),
        outcome(Axiom::R9, t, r9),
    ]
}
