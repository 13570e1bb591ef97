use std::collections::BTreeMap;
use std::sync::Arc;

use super::checks::check_group_frame;
use super::{FrameError, GroupPair, GroupSystem, GroupTriple, IsoSystem};

/// A frame is simple when `I` is nonempty and `E` is universal.
pub fn is_simple_frame(t: &GroupTriple) -> bool {
    !t.is_empty() && t.isos().classes().len() == 1
}

/// Restrictions of `t` to its `E`-classes, ordered by least member.
pub fn components(t: &GroupTriple) -> Vec<GroupTriple> {
    t.isos().classes().iter().map(|class| restrict(t, class)).collect()
}

fn restrict(t: &GroupTriple, class: &[usize]) -> GroupTriple {
    let local = |x: usize| class.iter().position(|&c| c == x).unwrap();
    let system = GroupSystem::new(class.iter().map(|&x| (t.name(x).to_string(), Arc::clone(t.group(x)))).collect())
        .expect("names are unique in the parent");
    let mut isos = IsoSystem::new(&system, vec![(0..class.len()).collect()]).expect("single class");
    for &x in class {
        for &y in class {
            isos.set_directed(local(x), local(y), t.pair().iso(x, y).clone());
        }
    }
    let pair = GroupPair::new(system, isos).expect("restriction of a valid pair");
    let reps: BTreeMap<_, _> = t
        .representatives()
        .iter()
        .filter(|((x, _, _), _)| class.contains(x))
        .map(|(&(x, y, z), &r)| ((local(x), local(y), local(z)), r))
        .collect();
    GroupTriple::new(pair, &reps).expect("restriction of a valid triple")
}

/// Disjoint union of triples, with indices arranged in the order `names`.
pub fn reassemble(parts: &[GroupTriple], names: &[String]) -> Result<GroupTriple, FrameError> {
    // (part, local index) for every global position.
    let mut locate = Vec::with_capacity(names.len());
    for name in names {
        let found = parts
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.index_of(name).ok().map(|x| (i, x)))
            .ok_or_else(|| FrameError::UnknownName(name.clone()))?;
        locate.push(found);
    }
    let total: usize = parts.iter().map(|p| p.len()).sum();
    if total != names.len() {
        let missing = parts
            .iter()
            .flat_map(|p| p.system().names().iter())
            .find(|n| !names.contains(n))
            .cloned()
            .unwrap_or_default();
        return Err(FrameError::NotAPartition(missing, 0));
    }
    let global = |part: usize, x: usize| locate.iter().position(|&l| l == (part, x)).unwrap();
    let system = GroupSystem::new(
        locate.iter().map(|&(i, x)| (parts[i].name(x).to_string(), Arc::clone(parts[i].group(x)))).collect(),
    )?;
    let mut classes = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for class in p.isos().classes() {
            classes.push(class.iter().map(|&x| global(i, x)).collect());
        }
    }
    let mut isos = IsoSystem::new(&system, classes)?;
    let mut reps = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        for (x, y) in p.isos().e2() {
            isos.set_directed(global(i, x), global(i, y), p.pair().iso(x, y).clone());
        }
        for (&(x, y, z), &r) in p.representatives() {
            reps.insert((global(i, x), global(i, y), global(i, z)), r);
        }
    }
    GroupTriple::new(GroupPair::new(system, isos)?, &reps)
}

/// The identity-coset triple on a group frame.
pub fn from_group_pair(pair: &GroupPair) -> Result<GroupTriple, FrameError> {
    let report = check_group_frame(pair);
    if let Some(e) = report.failures().next() {
        let detail = e.witness.as_ref().map(|w| w.note.as_str()).unwrap_or("");
        return Err(FrameError::NotAFrame(format!("{} at {:?}: {detail}", e.condition, e.instance)));
    }
    Ok(GroupTriple::identity_cosets(pair.clone()))
}
