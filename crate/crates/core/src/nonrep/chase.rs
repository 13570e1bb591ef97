use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scaffold::{composition_matrix, edge_intersection, product_matrix};
use super::{
    enumerate_relaxed_scaffolds, enumerate_scaffolds, scaffold_violations, verify_scaffold_properties, AtomRef,
    NonrepError, Scaffold, VERTICES,
};
use crate::algebra::CosetRelationAlgebra;
use crate::frame::GroupTriple;
use crate::group::Elem;

/// The five indices playing `p, q, r, s, t` in the chase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseRoles {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl ChaseRoles {
    /// Indices named `p..t` when all five exist, otherwise the first five indices.
    pub fn resolve(t: &GroupTriple) -> Result<Self, NonrepError> {
        if t.len() < 5 {
            return Err(NonrepError::TooFewIndices(t.len()));
        }
        let by_name: Option<Vec<usize>> = VERTICES.iter().map(|v| t.index_of(v).ok()).collect();
        let v = by_name.unwrap_or_else(|| (0..5).collect());
        Ok(Self { p: v[0], q: v[1], r: v[2], s: v[3], t: v[4] })
    }

    fn special(&self) -> [usize; 3] {
        [self.p, self.q, self.r]
    }
}

/// An element of one of the groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub index: String,
    pub element: Elem,
}

/// `(from, to)` lies in `atom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub from: Point,
    pub to: Point,
    pub atom: AtomRef,
}

/// `(from, to)` lies in `left ; right`, witnessed by `via`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionFact {
    pub from: Point,
    pub via: Point,
    pub to: Point,
    pub left: AtomRef,
    pub right: AtomRef,
}

/// The atoms of `(a_xs (x) a_sy) & (a_xt (x) a_ty)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIntersection {
    pub x: String,
    pub y: String,
    pub atoms: Vec<AtomRef>,
}

/// A scaffold and the point chase run on it.
///
/// The chase places `(u_p, u_q)` inside both `a_pq` and `a_pr ; a_rq`. When
/// `a_pr (x) a_rq` is disjoint from `a_pr ; a_rq`, the atom `a_pq` cannot lie
/// below `a_pr (x) a_rq`, so no scaffold obtained from a representation can
/// agree with this one on the pairs it constrains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationCertificate {
    /// `[p, q, r, s, t]`.
    pub roles: Vec<String>,
    /// `a_xy` for `x < y`; the diagonal and converses are implied.
    pub scaffold: Vec<AtomRef>,
    /// Index set on which the product condition was not imposed.
    pub relaxed: Vec<String>,
    pub u_s: Point,
    pub u_t: Point,
    pub u_p: Point,
    pub u_q: Point,
    pub u_r: Point,
    /// Memberships found by the chase, then those derived from the edge intersections.
    pub memberships: Vec<Membership>,
    pub compositions: Vec<CompositionFact>,
    pub edge_intersections: Vec<EdgeIntersection>,
    /// Atoms of `a_pr (x) a_rq`.
    pub product: Vec<AtomRef>,
    /// Pairs shared by `a_pr (x) a_rq` and `a_pr ; a_rq`.
    pub product_composition_overlap: usize,
    /// Pairs shared by `a_pq` and `a_pr ; a_rq`.
    pub atom_composition_overlap: usize,
    /// Whether `a_pq <= a_pr (x) a_rq`.
    pub product_condition_holds: bool,
    pub refuted: bool,
}

struct Ctx<'a> {
    alg: &'a CosetRelationAlgebra,
    s: &'a Scaffold,
}

impl Ctx<'_> {
    fn point(&self, x: usize, g: Elem) -> Point {
        Point { index: self.alg.triple().name(x).to_string(), element: g }
    }

    fn atom(&self, x: usize, y: usize) -> AtomRef {
        AtomRef::of(self.alg, self.s.atom(x, y))
    }

    fn has(&self, x: usize, g: Elem, y: usize, h: Elem) -> bool {
        self.alg.atom_relation(self.s.atom(x, y)).get(g, h)
    }

    fn membership(&self, x: usize, g: Elem, y: usize, h: Elem) -> Membership {
        Membership { from: self.point(x, g), to: self.point(y, h), atom: self.atom(x, y) }
    }
}

/// Runs the chase on `s`, choosing the least element at every step.
pub fn chase_refute(
    alg: &CosetRelationAlgebra,
    s: &Scaffold,
    roles: &ChaseRoles,
) -> Result<RefutationCertificate, NonrepError> {
    let c = Ctx { alg, s };
    let t = alg.triple();
    let ChaseRoles { p, q, r, s: vs, t: vt } = *roles;
    let (us, ut) = alg
        .atom_relation(s.atom(vs, vt))
        .pairs()
        .next()
        .ok_or_else(|| NonrepError::ChaseFailed("a_st is empty".into()))?;
    let mut u = [0; 3];
    let mut memberships = vec![c.membership(vs, us, vt, ut)];
    for (slot, x) in [p, q, r].into_iter().enumerate() {
        let g = t
            .group(x)
            .elements()
            .find(|&g| c.has(vs, us, x, g) && c.has(x, g, vt, ut))
            .ok_or_else(|| NonrepError::ChaseFailed(format!("no u_{} between u_s and u_t", t.name(x))))?;
        memberships.push(c.membership(vs, us, x, g));
        memberships.push(c.membership(x, g, vt, ut));
        u[slot] = g;
    }
    let pos = |x: usize| {
        if x == p {
            u[0]
        } else if x == q {
            u[1]
        } else {
            u[2]
        }
    };

    let mut compositions = Vec::new();
    let mut edge_intersections = Vec::new();
    for (x, y) in [(p, q), (p, r), (r, q)] {
        for (v, uv) in [(vs, us), (vt, ut)] {
            if !(c.has(x, pos(x), v, uv) && c.has(v, uv, y, pos(y))) {
                return Err(NonrepError::ChaseFailed(format!("converse step fails through {}", t.name(v))));
            }
            compositions.push(CompositionFact {
                from: c.point(x, pos(x)),
                via: c.point(v, uv),
                to: c.point(y, pos(y)),
                left: c.atom(x, v),
                right: c.atom(v, y),
            });
        }
        let atoms = edge_intersection(alg, s, roles, x, y);
        if atoms != [s.atom(x, y)] {
            return Err(NonrepError::ChaseFailed(format!(
                "edge intersection for ({}, {}) is not the single atom a_xy",
                t.name(x),
                t.name(y)
            )));
        }
        edge_intersections.push(EdgeIntersection {
            x: t.name(x).into(),
            y: t.name(y).into(),
            atoms: atoms.into_iter().map(|i| AtomRef::of(alg, i)).collect(),
        });
    }
    for (x, y) in [(p, q), (p, r), (r, q)] {
        if !c.has(x, pos(x), y, pos(y)) {
            return Err(NonrepError::ChaseFailed(format!("derived pair misses a_{}{}", t.name(x), t.name(y))));
        }
        memberships.push(c.membership(x, pos(x), y, pos(y)));
    }
    compositions.push(CompositionFact {
        from: c.point(p, u[0]),
        via: c.point(r, u[2]),
        to: c.point(q, u[1]),
        left: c.atom(p, r),
        right: c.atom(r, q),
    });

    let overlaps = final_overlaps(alg, s, roles);
    let product: Vec<AtomRef> =
        alg.atom_otimes(s.atom(p, r), s.atom(r, q)).ones().map(|i| AtomRef::of(alg, i)).collect();
    let product_condition_holds = alg.atom_otimes(s.atom(p, r), s.atom(r, q)).contains(s.atom(p, q));
    let refuted = overlaps.0 == 0;
    if refuted && product_condition_holds {
        return Err(NonrepError::ChaseFailed("a_pq meets a_pr ; a_rq yet lies below the disjoint product".into()));
    }
    Ok(RefutationCertificate {
        roles: [p, q, r, vs, vt].iter().map(|&i| t.name(i).to_string()).collect(),
        scaffold: s.upper().into_iter().map(|(_, a)| AtomRef::of(alg, a)).collect(),
        relaxed: s.relaxed().map(|r| r.iter().map(|&i| t.name(i).to_string()).collect()).unwrap_or_default(),
        u_s: c.point(vs, us),
        u_t: c.point(vt, ut),
        u_p: c.point(p, u[0]),
        u_q: c.point(q, u[1]),
        u_r: c.point(r, u[2]),
        memberships,
        compositions,
        edge_intersections,
        product,
        product_composition_overlap: overlaps.0,
        atom_composition_overlap: overlaps.1,
        product_condition_holds,
        refuted,
    })
}

/// `(|(a_pr (x) a_rq) & (a_pr ; a_rq)|, |a_pq & (a_pr ; a_rq)|)`.
fn final_overlaps(alg: &CosetRelationAlgebra, s: &Scaffold, roles: &ChaseRoles) -> (usize, usize) {
    let (p, q, r) = (roles.p, roles.q, roles.r);
    let composition = composition_matrix(alg, s.atom(p, r), s.atom(r, q));
    let mut product = product_matrix(alg, s.atom(p, r), s.atom(r, q));
    product.intersect_with(&composition);
    let mut atom = alg.atom_relation(s.atom(p, q)).clone();
    atom.intersect_with(&composition);
    (product.count(), atom.count())
}

fn invalid(msg: impl Into<String>) -> NonrepError {
    NonrepError::CertificateInvalid(msg.into())
}

impl RefutationCertificate {
    /// Replays every recorded fact against the concrete relations of `alg`.
    pub fn revalidate(&self, alg: &CosetRelationAlgebra) -> Result<(), NonrepError> {
        let t = alg.triple();
        let idx = |name: &str| t.index_of(name).map_err(NonrepError::from);
        if self.roles.len() != 5 {
            return Err(invalid("five roles expected"));
        }
        let v: Vec<usize> = self.roles.iter().map(|n| idx(n)).collect::<Result<_, _>>()?;
        let roles = ChaseRoles { p: v[0], q: v[1], r: v[2], s: v[3], t: v[4] };
        let relaxed = match self.relaxed.len() {
            0 => None,
            3 => Some([idx(&self.relaxed[0])?, idx(&self.relaxed[1])?, idx(&self.relaxed[2])?]),
            _ => return Err(invalid("relaxed set must have three indices")),
        };
        let upper: Vec<((usize, usize), usize)> = self
            .scaffold
            .iter()
            .map(|a| Ok(((idx(&a.x)?, idx(&a.y)?), a.resolve(alg)?)))
            .collect::<Result<_, NonrepError>>()?;
        let s = Scaffold::from_upper(alg, &upper, relaxed)?;
        if s.upper() != upper {
            return Err(invalid("scaffold atoms are not listed in pair order"));
        }
        if let Some((x, y, z)) = scaffold_violations(alg, &s).first() {
            return Err(invalid(format!(
                "product condition fails at ({}, {}, {})",
                t.name(*x),
                t.name(*y),
                t.name(*z)
            )));
        }

        let point = |pt: &Point| -> Result<(usize, Elem), NonrepError> {
            let x = idx(&pt.index)?;
            if pt.element >= t.group(x).order() {
                return Err(invalid(format!("element {} out of range for {}", pt.element, pt.index)));
            }
            Ok((x, pt.element))
        };
        let in_atom = |a: &AtomRef, from: &Point, to: &Point| -> Result<bool, NonrepError> {
            let i = a.resolve(alg)?;
            let (x, g) = point(from)?;
            let (y, h) = point(to)?;
            let atom = alg.atoms()[i];
            Ok(atom.x == x && atom.y == y && alg.atom_relation(i).get(g, h))
        };
        let expect_atom = |a: &AtomRef, x: usize, y: usize| -> Result<(), NonrepError> {
            if a.resolve(alg)? == s.atom(x, y) {
                Ok(())
            } else {
                Err(invalid(format!("{a:?} is not a_{}{}", t.name(x), t.name(y))))
            }
        };
        for (pt, x) in [
            (&self.u_s, roles.s),
            (&self.u_t, roles.t),
            (&self.u_p, roles.p),
            (&self.u_q, roles.q),
            (&self.u_r, roles.r),
        ] {
            if point(pt)?.0 != x {
                return Err(invalid(format!("point {pt:?} is in the wrong group")));
            }
        }
        for m in &self.memberships {
            let (x, _) = point(&m.from)?;
            let (y, _) = point(&m.to)?;
            expect_atom(&m.atom, x, y)?;
            if !in_atom(&m.atom, &m.from, &m.to)? {
                return Err(invalid(format!("membership {m:?} fails")));
            }
        }
        for f in &self.compositions {
            let (x, _) = point(&f.from)?;
            let (v, _) = point(&f.via)?;
            let (y, _) = point(&f.to)?;
            expect_atom(&f.left, x, v)?;
            expect_atom(&f.right, v, y)?;
            if !in_atom(&f.left, &f.from, &f.via)? || !in_atom(&f.right, &f.via, &f.to)? {
                return Err(invalid(format!("composition {f:?} fails")));
            }
        }
        for e in &self.edge_intersections {
            let (x, y) = (idx(&e.x)?, idx(&e.y)?);
            let actual: Vec<AtomRef> =
                edge_intersection(alg, &s, &roles, x, y).into_iter().map(|i| AtomRef::of(alg, i)).collect();
            if actual != e.atoms {
                return Err(invalid(format!("edge intersection for ({}, {}) differs", e.x, e.y)));
            }
        }
        let (p, q, r) = (roles.p, roles.q, roles.r);
        let has_membership = |x: usize, y: usize, from: &Point, to: &Point| {
            self.memberships.iter().any(|m| &m.from == from && &m.to == to && m.atom == AtomRef::of(alg, s.atom(x, y)))
        };
        if !has_membership(p, q, &self.u_p, &self.u_q) {
            return Err(invalid("(u_p, u_q) in a_pq is not recorded"));
        }
        let closing = self.compositions.iter().any(|f| f.from == self.u_p && f.via == self.u_r && f.to == self.u_q);
        if !closing {
            return Err(invalid("(u_p, u_q) in a_pr ; a_rq is not recorded"));
        }
        let product: Vec<AtomRef> =
            alg.atom_otimes(s.atom(p, r), s.atom(r, q)).ones().map(|i| AtomRef::of(alg, i)).collect();
        if product != self.product {
            return Err(invalid("product a_pr (x) a_rq differs"));
        }
        let overlaps = final_overlaps(alg, &s, &roles);
        if overlaps != (self.product_composition_overlap, self.atom_composition_overlap) {
            return Err(invalid("overlap counts differ"));
        }
        let holds = alg.atom_otimes(s.atom(p, r), s.atom(r, q)).contains(s.atom(p, q));
        if holds != self.product_condition_holds || self.refuted != (overlaps.0 == 0) {
            return Err(invalid("verdict differs"));
        }
        if self.refuted && (holds || overlaps.1 == 0) {
            return Err(invalid("refutation is not contradictory"));
        }
        Ok(())
    }
}

/// Scaffold enumeration and chase over the whole algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationSummary {
    pub roles: Vec<String>,
    /// Scaffolds satisfying the product condition everywhere.
    pub full_scaffolds: usize,
    /// Scaffolds with the condition dropped on `{p, q, r}`; the chase runs on these.
    pub chase_scaffolds: usize,
    /// Chase scaffolds whose converse, composition, complement and edge properties all hold.
    pub properties_hold: usize,
    pub refuted: usize,
    pub all_refuted: bool,
    pub certificates: Vec<RefutationCertificate>,
}

/// Enumerates scaffolds and chases every one of them.
///
/// Every full scaffold is also a chase scaffold, so `all_refuted` covers the
/// full ones. A refuted chase scaffold violates the product condition at
/// `(p, r, q)`; all chase scaffolds refuted means no full scaffold exists,
/// and hence no representation.
pub fn refute(alg: &CosetRelationAlgebra) -> Result<RefutationSummary, NonrepError> {
    let roles = ChaseRoles::resolve(alg.triple())?;
    let full = enumerate_scaffolds(alg)?;
    let relaxed = enumerate_relaxed_scaffolds(alg, roles.special())?;
    let results: Vec<(bool, RefutationCertificate)> = relaxed
        .par_iter()
        .map(|s| {
            let props = verify_scaffold_properties(alg, s, &roles).passed();
            chase_refute(alg, s, &roles).map(|c| (props, c))
        })
        .collect::<Result<_, _>>()?;
    let refuted = results.iter().filter(|(_, c)| c.refuted).count();
    let t = alg.triple();
    Ok(RefutationSummary {
        roles: [roles.p, roles.q, roles.r, roles.s, roles.t].iter().map(|&i| t.name(i).to_string()).collect(),
        full_scaffolds: full.len(),
        chase_scaffolds: relaxed.len(),
        properties_hold: results.iter().filter(|(p, _)| *p).count(),
        refuted,
        all_refuted: !relaxed.is_empty() && refuted == relaxed.len(),
        certificates: results.into_iter().map(|(_, c)| c).collect(),
    })
}
