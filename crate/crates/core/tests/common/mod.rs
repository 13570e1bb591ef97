//! Shared generators for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use coset_ra::frame::{make_iso, quotient_by, GroupPair, GroupSystem, GroupTriple, IsoSystem};
use coset_ra::group::{Elem, FiniteGroup, Subgroup};
use coset_ra::nonrep::{build_pentagon, PentagonBuild};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PENTAGON_SPEC: &str = include_str!("../../data/pentagon.json");
pub const TWO_COMPONENT_SPEC: &str = include_str!("../../data/two_component.json");

pub fn pentagon() -> &'static PentagonBuild {
    static P: std::sync::OnceLock<PentagonBuild> = std::sync::OnceLock::new();
    P.get_or_init(|| build_pentagon().unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Groups of order at most 8.
pub fn small_groups() -> Vec<Arc<FiniteGroup>> {
    let z = |n| FiniteGroup::cyclic(n).unwrap();
    let mut out: Vec<FiniteGroup> = (1..=8).map(z).collect();
    out.push(FiniteGroup::direct_product(&z(2), &z(2)));
    out.push(FiniteGroup::direct_product(&z(2), &z(4)));
    out.push(FiniteGroup::direct_product(&FiniteGroup::direct_product(&z(2), &z(2)), &z(2)));
    out.push(FiniteGroup::symmetric(3).unwrap());
    out.into_iter().map(Arc::new).collect()
}

pub fn normal_subgroups(g: &Arc<FiniteGroup>) -> Vec<Vec<Elem>> {
    g.subgroups().into_iter().filter(|h| Subgroup::new(g, h).unwrap().is_normal()).collect()
}

/// All isomorphisms `G_x/h -> G_y/k` as coset-index maps.
pub fn quotient_isos(gx: &Arc<FiniteGroup>, h: &[Elem], gy: &Arc<FiniteGroup>, k: &[Elem]) -> Vec<Vec<usize>> {
    let dom = quotient_by(gx, h).unwrap();
    let cod = quotient_by(gy, k).unwrap();
    dom.isomorphisms_to(&cod)
}

fn names(n: usize) -> Vec<String> {
    ["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect()
}

/// A frame drawn from one of two valid families, before mutation:
/// every class either shares one group `G` with `H_xy = N` off the diagonal
/// and identity maps (optionally twisted by one coset of `N` on distinct
/// triples), or has `H_xy = G_x` off the diagonal over arbitrary groups.
pub fn random_frame(rng: &mut ChaCha8Rng) -> GroupTriple {
    let pool = small_groups();
    let n = rng.gen_range(1..=4);
    let classes: Vec<Vec<usize>> = if rng.gen_bool(0.7) {
        vec![(0..n).collect()]
    } else {
        let mut cls: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
        for x in 0..n {
            cls[rng.gen_range(0..2)].push(x);
        }
        cls.into_iter().filter(|c| !c.is_empty()).collect()
    };
    let mut groups: Vec<Option<Arc<FiniteGroup>>> = vec![None; n];
    let mut plan = Vec::new();
    for class in &classes {
        let uniform = rng.gen_bool(0.6);
        let shared = pool.choose(rng).unwrap().clone();
        for &x in class {
            groups[x] = Some(if uniform { shared.clone() } else { pool.choose(rng).unwrap().clone() });
        }
        let normal = if uniform { Some(normal_subgroups(&shared).choose(rng).unwrap().clone()) } else { None };
        let twist = uniform && rng.gen_bool(0.5);
        plan.push((class.clone(), normal, twist));
    }
    let groups: Vec<Arc<FiniteGroup>> = groups.into_iter().map(Option::unwrap).collect();
    let system = GroupSystem::new(names(n).into_iter().zip(groups.iter().cloned()).collect()).unwrap();
    let mut isos = IsoSystem::new(&system, classes.clone()).unwrap();
    for (class, normal, _) in &plan {
        for &x in class {
            for &y in class.iter().filter(|&&y| y >= x) {
                let (gx, gy) = (&groups[x], &groups[y]);
                let iso = if x == y {
                    make_iso(gx, &[0], gx, &[0], (0..gx.order()).collect()).unwrap()
                } else if let Some(nn) = normal {
                    let len = gx.order() / nn.len();
                    make_iso(gx, nn, gy, nn, (0..len).collect()).unwrap()
                } else {
                    make_iso(gx, &gx.all(), gy, &gy.all(), vec![0]).unwrap()
                };
                isos.set_pair(x, y, iso);
            }
        }
    }
    let pair = GroupPair::new(system, isos).unwrap();
    let mut reps = BTreeMap::new();
    for (class, _, twist) in &plan {
        if *twist {
            let c = rng.gen_range(0..groups[class[0]].order());
            for (x, y, z) in pair.isos().e3() {
                if class.contains(&x) && x != y && y != z && x != z {
                    reps.insert((x, y, z), c);
                }
            }
        }
    }
    GroupTriple::new(pair, &reps).unwrap()
}

/// One random change to cosets, quotient maps or quotient subgroups.
pub fn mutate(t: &GroupTriple, rng: &mut ChaCha8Rng) -> GroupTriple {
    let e2 = t.isos().e2();
    let e3 = t.isos().e3();
    match rng.gen_range(0..5) {
        0 => {
            let &(x, y, z) = e3.choose(rng).unwrap();
            let rep = rng.gen_range(0..t.group(x).order());
            t.with_coset(x, y, z, rep).unwrap()
        }
        1 | 2 => {
            // Another isomorphism between the same quotients; kind 2 changes one direction only.
            let &(x, y) = e2.choose(rng).unwrap();
            let d = t.data(x, y);
            let (gx, gy) = (t.group(x), t.group(y));
            let maps = quotient_isos(gx, &d.h, gy, &d.k);
            let map = maps.choose(rng).unwrap().clone();
            let iso = make_iso(gx, &d.h, gy, &d.k, map).unwrap();
            let pair = if rng.gen_bool(0.5) || x == y {
                t.pair().with_pair_iso(x.min(y), y.max(x), if x <= y { iso } else { iso.inverse() })
            } else {
                t.pair().with_directed_iso(x, y, iso)
            };
            t.with_pair(pair.unwrap()).unwrap()
        }
        3 => {
            // New quotient subgroups with isomorphic quotients, if any exist.
            let &(x, y) = e2.choose(rng).unwrap();
            let (x, y) = (x.min(y), x.max(y));
            let (gx, gy) = (t.group(x), t.group(y));
            let mut options = Vec::new();
            for h in normal_subgroups(gx) {
                for k in normal_subgroups(gy) {
                    if h.len() * gy.order() == k.len() * gx.order() {
                        let maps = quotient_isos(gx, &h, gy, &k);
                        if !maps.is_empty() {
                            options.push((h.clone(), k, maps));
                        }
                    }
                }
            }
            let (h, k, maps) = options.choose(rng).unwrap().clone();
            let map = maps.choose(rng).unwrap().clone();
            let iso = make_iso(gx, &h, gy, &k, map).unwrap();
            t.with_pair(t.pair().with_pair_iso(x, y, iso).unwrap()).unwrap()
        }
        _ => {
            // Swap two coset representatives.
            let &(x, y, z) = e3.choose(rng).unwrap();
            let other = e3.iter().copied().filter(|&(a, _, _)| a == x).collect::<Vec<_>>();
            let &(a, b, c) = other.choose(rng).unwrap();
            let r1 = t.representative(x, y, z);
            let r2 = t.representative(a, b, c);
            t.with_coset(x, y, z, r2).unwrap().with_coset(a, b, c, r1).unwrap()
        }
    }
}

/// A random frame followed by up to `max_mutations` random mutations.
pub fn random_triple(seed: u64, max_mutations: usize) -> GroupTriple {
    let mut rng = rng(seed);
    let mut t = random_frame(&mut rng);
    for _ in 0..rng.gen_range(0..=max_mutations) {
        t = mutate(&t, &mut rng);
    }
    t
}
