use crate::group::{induced_iso, inner_automorphism, is_subset, Coset, Elem, Subgroup};

use super::report::{Condition, ValidationReport, Witness};
use super::{FrameError, GroupPair, GroupTriple};

type Check = Result<(), Witness>;

fn equal(note: &str, lhs: Vec<Elem>, rhs: Vec<Elem>) -> Check {
    if lhs == rhs {
        Ok(())
    } else {
        Err(Witness::new(note, lhs, rhs))
    }
}

/// Condition (i): `phi_xx` is the identity automorphism of `G_x/{e}`.
fn phi_xx_identity(p: &GroupPair, x: usize) -> Check {
    let d = p.pair(x, x);
    if d.h != [0] || d.k != [0] {
        return Err(Witness::new("H_xx and K_xx must be trivial", d.h.clone(), d.k.clone()));
    }
    let iso = p.iso(x, x);
    match (0..iso.map().len()).find(|&g| iso.apply(g) != g) {
        None => Ok(()),
        Some(g) => Err(Witness::new(
            "phi_xx moves a coset",
            iso.codomain().coset(iso.apply(g)).elements.clone(),
            iso.domain().coset(g).elements.clone(),
        )),
    }
}

/// Condition (ii): `phi_yx = phi_xy^-1`.
fn phi_inverse(p: &GroupPair, x: usize, y: usize) -> Check {
    let xy = p.pair(x, y);
    let yx = p.pair(y, x);
    if xy.k != yx.h {
        return Err(Witness::new("K_xy differs from H_yx", xy.k.clone(), yx.h.clone()));
    }
    if xy.h != yx.k {
        return Err(Witness::new("H_xy differs from K_yx", xy.h.clone(), yx.k.clone()));
    }
    for d in &xy.h_cosets {
        let back = yx.image(&xy.image(d));
        if &back != d {
            return Err(Witness::new("phi_yx[phi_xy[D]] differs from D", back, d.clone()));
        }
    }
    Ok(())
}

/// First half of condition (iii): `phi_xy[H_xy H_xz] = K_xy H_yz`.
fn image_of_hh(p: &GroupPair, x: usize, y: usize, z: usize) -> Check {
    let lhs = p.pair(x, y).image(&p.hh(x, y, z));
    let rhs = p.group(y).product_set(p.k(x, y), p.h(y, z));
    equal("phi_xy[H_xy H_xz] vs K_xy H_yz", lhs, rhs)
}

/// Second half of condition (iii): `phi_yz[K_xy H_yz] = K_xz K_yz`.
fn image_of_kh(p: &GroupPair, x: usize, y: usize, z: usize) -> Check {
    let kh = p.group(y).product_set(p.k(x, y), p.h(y, z));
    let lhs = p.pair(y, z).image(&kh);
    let rhs = p.group(z).product_set(p.k(x, z), p.k(y, z));
    equal("phi_yz[K_xy H_yz] vs K_xz K_yz", lhs, rhs)
}

/// `hat phi_xy ; hat phi_yz = tau ; hat phi_xz` on `G_x/N`.
///
/// With `coset = None` this is the group-frame form: `N` is
/// `phi_xy^-1[K_xy H_yz]`, which must contain `H_xz`, and `tau` is the
/// identity. Otherwise `N = H_xy H_xz` and `tau(D) = C^-1 D C`.
fn twisted_composition(p: &GroupPair, x: usize, y: usize, z: usize, coset: Option<&[Elem]>) -> Check {
    let gx = p.group(x);
    let n_set = match coset {
        Some(_) => p.hh(x, y, z),
        None => {
            let kh = p.group(y).product_set(p.k(x, y), p.h(y, z));
            let m = p.pair(x, y).preimage(&kh);
            if !is_subset(p.h(x, z), &m) {
                return Err(Witness::new("H_xz is not inside phi_xy^-1[K_xy H_yz]", p.h(x, z).to_vec(), m));
            }
            m
        }
    };
    let fail = |what: &str, e: &dyn std::fmt::Display| Witness::new(format!("{what}: {e}"), n_set.clone(), vec![]);
    let n = Subgroup::new(gx, &n_set).map_err(|e| fail("N is not a subgroup", &e))?;
    let hat_xy = induced_iso(p.iso(x, y), &n).map_err(|e| fail("induced phi_xy", &e))?;
    let m = Subgroup::new(p.group(y), hat_xy.codomain().normal().elements()).map_err(|e| fail("image of N", &e))?;
    let hat_yz = induced_iso(p.iso(y, z), &m).map_err(|e| fail("induced phi_yz", &e))?;
    let hat_xz = induced_iso(p.iso(x, z), &n).map_err(|e| fail("induced phi_xz", &e))?;
    let quot = hat_xy.domain();
    let tau: Vec<usize> = match coset {
        Some(c) => {
            let c = Coset { representative: c[0], elements: c.to_vec() };
            inner_automorphism(quot, &c).map_err(|e| fail("tau", &e))?
        }
        None => (0..quot.len()).collect(),
    };
    for (d, &td) in tau.iter().enumerate() {
        let mid = &hat_xy.codomain().coset(hat_xy.apply(d)).elements;
        let Some(mid_idx) = hat_yz.domain().find_coset(mid) else {
            return Err(Witness::new("phi_xy[D] is not a coset of K_xy H_yz", mid.clone(), vec![]));
        };
        let lhs = hat_yz.codomain().coset(hat_yz.apply(mid_idx)).elements.clone();
        let rhs = hat_xz.codomain().coset(hat_xz.apply(td)).elements.clone();
        if lhs != rhs {
            let note = format!("D = {:?}: phi_yz[phi_xy[D]] vs phi_xz[tau(D)]", quot.coset(d).elements);
            return Err(Witness::new(note, lhs, rhs));
        }
    }
    Ok(())
}

/// Group frame conditions (i)-(iv) on a group pair.
pub fn check_group_frame(p: &GroupPair) -> ValidationReport {
    let mut r = ValidationReport::new();
    for x in 0..p.len() {
        r.push(Condition::Frame(1), p.names_of(&[x]), phi_xx_identity(p, x));
    }
    for (x, y) in p.isos().e2() {
        r.push(Condition::Frame(2), p.names_of(&[x, y]), phi_inverse(p, x, y));
    }
    let e3 = p.isos().e3();
    for &(x, y, z) in &e3 {
        let res = image_of_hh(p, x, y, z).and_then(|_| image_of_kh(p, x, y, z));
        r.push(Condition::Frame(3), p.names_of(&[x, y, z]), res);
    }
    for &(x, y, z) in &e3 {
        r.push(Condition::Frame(4), p.names_of(&[x, y, z]), twisted_composition(p, x, y, z, None));
    }
    r
}

/// Pre-semi-frame conditions (i)-(iii).
pub fn check_pre_semi_frame(t: &GroupTriple) -> ValidationReport {
    let p = t.pair();
    let mut r = ValidationReport::new();
    for x in 0..p.len() {
        r.push(Condition::SemiFrame(1), p.names_of(&[x]), phi_xx_identity(p, x));
    }
    for (x, y) in p.isos().e2() {
        r.push(Condition::SemiFrame(2), p.names_of(&[x, y]), phi_inverse(p, x, y));
    }
    for (x, y, z) in p.isos().e3() {
        r.push(Condition::SemiFrame(3), p.names_of(&[x, y, z]), image_of_hh(p, x, y, z));
    }
    r
}

/// Semi-frame conditions (i)-(iv).
pub fn check_semi_frame(t: &GroupTriple) -> ValidationReport {
    let mut r = check_pre_semi_frame(t);
    let p = t.pair();
    for (x, y, z) in p.isos().e3() {
        let res = twisted_composition(p, x, y, z, Some(t.coset(x, y, z)));
        r.push(Condition::SemiFrame(4), p.names_of(&[x, y, z]), res);
    }
    r
}

fn coset_identity_law(t: &GroupTriple, x: usize, y: usize) -> Check {
    equal("C_xyy vs H_xy", t.coset(x, y, y).to_vec(), t.data(x, y).h.clone())
}

fn coset_involution_law(t: &GroupTriple, x: usize, y: usize, z: usize) -> Check {
    let lhs = t.data(x, z).image(t.coset(x, y, z));
    let rhs = t.group(z).inverse_set(t.coset(z, y, x));
    equal("phi_xz[C_xyz] vs C_zyx^-1", lhs, rhs)
}

fn coset_cycle_law(t: &GroupTriple, x: usize, y: usize, z: usize) -> Check {
    let lhs = t.data(x, y).image(t.coset(x, y, z));
    let rhs = t.group(y).inverse_set(t.coset(y, x, z));
    equal("phi_xy[C_xyz] vs C_yxz^-1", lhs, rhs)
}

fn coset_associative_law(t: &GroupTriple, x: usize, y: usize, z: usize, w: usize) -> Check {
    let gx = t.group(x);
    let lhs = gx.product_set(t.coset(x, y, z), t.coset(x, z, w));
    let inner = t.group(y).product_set(t.coset(y, z, w), t.data(y, x).h.as_slice());
    let rhs = gx.product_set(&t.data(y, x).image(&inner), t.coset(x, y, w));
    equal("C_xyz C_xzw vs phi_yx[C_yzw H_yx] C_xyw", lhs, rhs)
}

/// Coset conditions (i)-(iv). The semi-frame precondition is checked and
/// recorded in the report; the coset checks run regardless.
pub fn check_coset_conditions(t: &GroupTriple) -> ValidationReport {
    let mut r = ValidationReport::new();
    let sf = check_semi_frame(t);
    if !sf.passed() {
        let n = sf.failures().count();
        r.precondition = Some(format!("triple is not a semi-frame ({n} failing instances)"));
    }
    let p = t.pair();
    for (x, y) in p.isos().e2() {
        r.push(Condition::Coset(1), p.names_of(&[x, y]), coset_identity_law(t, x, y));
    }
    let e3 = p.isos().e3();
    for &(x, y, z) in &e3 {
        r.push(Condition::Coset(2), p.names_of(&[x, y, z]), coset_involution_law(t, x, y, z));
    }
    for &(x, y, z) in &e3 {
        r.push(Condition::Coset(3), p.names_of(&[x, y, z]), coset_cycle_law(t, x, y, z));
    }
    for (x, y, z, w) in p.isos().e4() {
        r.push(Condition::Coset(4), p.names_of(&[x, y, z, w]), coset_associative_law(t, x, y, z, w));
    }
    r
}

/// The ordered conditions (i)-(ix). Indices are compared by their position in `I`.
pub fn check_simplified(t: &GroupTriple) -> ValidationReport {
    let p = t.pair();
    let mut r = ValidationReport::new();
    let e2 = p.isos().e2();
    let e3 = p.isos().e3();
    let increasing: Vec<_> = e3.iter().copied().filter(|&(x, y, z)| x < y && y < z).collect();
    for x in 0..p.len() {
        r.push(Condition::Simplified(1), p.names_of(&[x]), phi_xx_identity(p, x));
    }
    for &(x, y) in e2.iter().filter(|(x, y)| x < y) {
        r.push(Condition::Simplified(2), p.names_of(&[x, y]), phi_inverse(p, x, y));
    }
    for &(x, y, z) in &increasing {
        let res = image_of_hh(p, x, y, z).and_then(|_| image_of_kh(p, x, y, z));
        r.push(Condition::Simplified(3), p.names_of(&[x, y, z]), res);
    }
    for &(x, y, z) in &increasing {
        let res = twisted_composition(p, x, y, z, Some(t.coset(x, y, z)));
        r.push(Condition::Simplified(4), p.names_of(&[x, y, z]), res);
    }
    for &(x, y) in &e2 {
        let h = t.data(x, y).h.clone();
        let res = equal("C_xxy vs H_xy", t.coset(x, x, y).to_vec(), h.clone())
            .and_then(|_| equal("C_xyx vs H_xy", t.coset(x, y, x).to_vec(), h.clone()))
            .and_then(|_| equal("C_xyy vs H_xy", t.coset(x, y, y).to_vec(), h));
        r.push(Condition::Simplified(5), p.names_of(&[x, y]), res);
    }
    for &(x, y, z) in e3.iter().filter(|&&(x, y, z)| x != y && y != z && x != z) {
        let lhs = t.group(x).inverse_set(t.coset(x, y, z));
        r.push(
            Condition::Simplified(6),
            p.names_of(&[x, y, z]),
            equal("C_xyz^-1 vs C_xzy", lhs, t.coset(x, z, y).to_vec()),
        );
    }
    for &(x, y, z) in &increasing {
        let lhs = t.data(x, y).image(t.coset(x, y, z));
        r.push(
            Condition::Simplified(7),
            p.names_of(&[x, y, z]),
            equal("phi_xy[C_xyz] vs C_yzx", lhs, t.coset(y, z, x).to_vec()),
        );
    }
    for &(x, y, z) in &increasing {
        let lhs = t.data(x, z).image(t.coset(x, y, z));
        r.push(
            Condition::Simplified(8),
            p.names_of(&[x, y, z]),
            equal("phi_xz[C_xyz] vs C_zxy", lhs, t.coset(z, x, y).to_vec()),
        );
    }
    for (x, y, z, w) in p.isos().e4() {
        if x < y && y < z && z < w {
            r.push(Condition::Simplified(9), p.names_of(&[x, y, z, w]), coset_associative_law(t, x, y, z, w));
        }
    }
    r
}

/// First quadruple of mutually distinct indices with `H_xy H_xz H_xw != G_x`.
pub fn tripsub_witness(t: &GroupTriple) -> Option<(usize, usize, usize, usize)> {
    t.isos().e4().into_iter().find(|&(x, y, z, w)| {
        let distinct = x != y && x != z && x != w && y != z && y != w && z != w;
        distinct && {
            let g = t.group(x);
            g.product_set(&t.pair().hh(x, y, z), t.data(x, w).h.as_slice()).len() != g.order()
        }
    })
}

/// Does `H_xy H_xz H_xw = G_x` hold for every quadruple of distinct indices in `E4`?
pub fn check_tripsub(t: &GroupTriple) -> bool {
    tripsub_witness(t).is_none()
}

/// Conditions of the single-coset corollary for `p < q < r`, together with
/// its hypothesis.
pub fn check_trithm(t: &GroupTriple, p: usize, q: usize, r: usize) -> Result<ValidationReport, FrameError> {
    let n = t.len();
    for i in [p, q, r] {
        if i >= n {
            return Err(FrameError::IndexOutOfRange(i));
        }
    }
    if !(p < q && q < r) || !t.isos().related(p, q) || !t.isos().related(q, r) {
        return Err(FrameError::NotOrdered(t.name(p).into(), t.name(q).into(), t.name(r).into()));
    }
    let pair = t.pair();
    let mut rep = ValidationReport::new();
    let assoc = |x: usize, y: usize, z: usize| {
        let mut s = [x, y, z];
        s.sort_unstable();
        s == [p, q, r]
    };
    let strays: Vec<_> =
        t.isos().e3().into_iter().filter(|&(x, y, z)| !assoc(x, y, z) && !t.is_identity_coset(x, y, z)).collect();
    let hyp = match strays.first() {
        None => Ok(()),
        Some(&(x, y, z)) => Err(Witness::new(
            format!("C at {:?} is not an identity coset", pair.names_of(&[x, y, z])),
            t.coset(x, y, z).to_vec(),
            pair.hh(x, y, z),
        )),
    };
    rep.push(Condition::SingleCosetHypothesis, pair.names_of(&[p, q, r]), hyp);

    let inv_eq = |x: usize, y: usize, z: usize| {
        let lhs = t.group(x).inverse_set(t.coset(x, y, z));
        equal("C_xyz^-1 vs C_xzy", lhs, t.coset(x, z, y).to_vec())
    };
    let res = inv_eq(p, q, r).and_then(|_| inv_eq(q, r, p)).and_then(|_| inv_eq(r, p, q));
    rep.push(Condition::SingleCoset(1), pair.names_of(&[p, q, r]), res);
    let lhs = t.data(p, q).image(t.coset(p, q, r));
    rep.push(
        Condition::SingleCoset(2),
        pair.names_of(&[p, q, r]),
        equal("phi_pq[C_pqr] vs C_qrp", lhs, t.coset(q, r, p).to_vec()),
    );
    let lhs = t.data(p, r).image(t.coset(p, q, r));
    rep.push(
        Condition::SingleCoset(3),
        pair.names_of(&[p, q, r]),
        equal("phi_pr[C_pqr] vs C_rpq", lhs, t.coset(r, p, q).to_vec()),
    );
    let gp = t.group(p);
    let mut bound = gp.all();
    for s in (0..n).filter(|&s| s != p && s != q && s != r && t.isos().related(p, s)) {
        let triple = gp.product_set(&pair.hh(p, q, r), t.data(p, s).h.as_slice());
        bound.retain(|e| triple.binary_search(e).is_ok());
    }
    let c = t.coset(p, q, r).to_vec();
    let res = if is_subset(&c, &bound) {
        Ok(())
    } else {
        Err(Witness::new("C_pqr is not inside the intersection of triple products", c, bound))
    };
    rep.push(Condition::SingleCoset(4), pair.names_of(&[p, q, r]), res);
    Ok(rep)
}

/// Enumerates every union of cosets from `cosets` (all `2^k` subsets).
fn coset_unions(cosets: &[Vec<Elem>]) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let k = cosets.len();
    assert!(k < 20, "too many cosets to enumerate unions");
    (0u32..(1 << k)).map(move |mask| {
        let mut s: Vec<Elem> =
            (0..k).filter(|i| mask & (1 << i) != 0).flat_map(|i| cosets[i].iter().copied()).collect();
        s.sort_unstable();
        s
    })
}

fn cosets_of(g: &crate::group::FiniteGroup, n: &[Elem]) -> Vec<Vec<Elem>> {
    let mut seen = vec![false; g.order()];
    let mut out = Vec::new();
    for a in g.elements() {
        if !seen[a] {
            let c = g.translate(a, n);
            for &e in &c {
                seen[e] = true;
            }
            out.push(c);
        }
    }
    out
}

/// The three set-level formulations of the twisted composition law for
/// `(x, y, z)`, each checked over every union of cosets of its subgroup.
pub fn image_lemma_forms(t: &GroupTriple, x: usize, y: usize, z: usize) -> [bool; 3] {
    let (gx, gy, gz) = (t.group(x), t.group(y), t.group(z));
    let (xy, yz, xz) = (t.data(x, y), t.data(y, z), t.data(x, z));
    let c = t.coset(x, y, z);
    let c_inv = gx.inverse_set(c);
    let conj = |q: &[Elem]| gx.product_set(&gx.product_set(&c_inv, q), c);

    let form1 =
        coset_unions(&cosets_of(gx, &t.pair().hh(x, y, z))).all(|q| yz.image(&xy.image(&q)) == xz.image(&conj(&q)));
    let form2 = coset_unions(&cosets_of(gy, &gy.product_set(&xy.k, &yz.h)))
        .all(|q| xz.preimage(&yz.image(&q)) == conj(&xy.preimage(&q)));
    let form3 = coset_unions(&cosets_of(gz, &gz.product_set(&xz.k, &yz.k)))
        .all(|q| gx.product_set(c, &xz.preimage(&q)) == gx.product_set(&xy.preimage(&yz.preimage(&q)), c));
    [form1, form2, form3]
}

fn permutations3(u: usize, v: usize, w: usize) -> [(usize, usize, usize); 6] {
    [(u, v, w), (u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)]
}

/// Conditions (i)-(v) of the permutation lemma for the triple `(u, v, w)`,
/// each quantified over all permutations of the triple.
pub fn permutation_conditions(t: &GroupTriple, u: usize, v: usize, w: usize) -> [bool; 5] {
    let perms = permutations3(u, v, w);
    let all = |f: &dyn Fn(usize, usize, usize) -> bool| perms.iter().all(|&(x, y, z)| f(x, y, z));
    let inv = |x: usize, s: &[Elem]| t.group(x).inverse_set(s);
    [
        all(&|x, y, z| inv(x, t.coset(x, y, z)) == t.coset(x, z, y)),
        all(&|x, y, z| t.data(x, z).image(t.coset(x, y, z)) == inv(z, t.coset(z, y, x))),
        all(&|x, y, z| t.data(x, z).image(t.coset(x, y, z)) == t.coset(z, x, y)),
        all(&|x, y, z| t.data(x, y).image(t.coset(x, y, z)) == inv(y, t.coset(y, x, z))),
        all(&|x, y, z| t.data(x, y).image(t.coset(x, y, z)) == t.coset(y, z, x)),
    ]
}
