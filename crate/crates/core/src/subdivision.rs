//! Stellar and derived subdivisions of geometric complexes, and the loop
//! that derives one triangulation until it refines another.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::complex::{permutations, Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{facets_refine, same_support, BBox, GeometricComplex};
use crate::linalg::{self, Point, Rat};
use crate::lp;
use crate::par;

/// One stellar subdivision: face `tau` was coned from new vertex `nu`
/// placed at `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StellarStep {
    pub tau: Face,
    pub nu: Vertex,
    pub point: Point,
}

/// An ordered sequence of stellar steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StellarHistory {
    pub steps: Vec<StellarStep>,
}

impl StellarHistory {
    pub fn new() -> StellarHistory {
        StellarHistory::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: StellarStep) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: StellarHistory) {
        self.steps.extend(other.steps);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StellarStep> {
        self.steps.iter()
    }

    /// Re-applies every step to `base`, checking that each face exists,
    /// each new vertex is fresh, and each point is in the face's relative
    /// interior.
    pub fn replay(&self, base: &GeometricComplex) -> Result<GeometricComplex> {
        let mut cur = base.clone();
        for (i, s) in self.steps.iter().enumerate() {
            if cur.coords().contains_key(&s.nu) {
                return Err(Error::InconsistentHistory(format!(
                    "step {i}: vertex {} already exists",
                    s.nu
                )));
            }
            cur = stellar_with_vertex(&cur, &s.tau, &s.point, s.nu)
                .map_err(|e| Error::InconsistentHistory(format!("step {i}: {e}")))?;
        }
        Ok(cur)
    }
}

impl<'a> IntoIterator for &'a StellarHistory {
    type Item = &'a StellarStep;
    type IntoIter = std::slice::Iter<'a, StellarStep>;
    fn into_iter(self) -> Self::IntoIter {
        self.steps.iter()
    }
}

fn next_vertex(g: &GeometricComplex) -> Vertex {
    g.complex().max_vertex().map_or(0, |m| m + 1)
}

fn stellar_with_vertex(
    g: &GeometricComplex,
    tau: &Face,
    point: &Point,
    nu: Vertex,
) -> Result<GeometricComplex> {
    if !g.complex().has_face(tau) || tau.is_empty() {
        return Err(Error::NotAFace(tau.to_vec()));
    }
    if tau.dim() < 1 {
        return Err(Error::StellarAtVertex);
    }
    if point.len() != g.ambient_dim() || !g.in_relative_interior(tau, point) {
        return Err(Error::NotInRelativeInterior(tau.to_vec()));
    }
    let complex = g.complex().stellar(tau, nu)?;
    let mut coords = g.coords().clone();
    coords.insert(nu, point.clone());
    Ok(GeometricComplex::from_parts(complex, g.ambient_dim(), coords))
}

/// Stellar subdivision at `tau`, placing the new vertex at `point`
/// (default: the barycenter of `tau`).
pub fn stellar(
    g: &GeometricComplex,
    tau: &Face,
    point: Option<&Point>,
) -> Result<(GeometricComplex, StellarStep)> {
    if !g.complex().has_face(tau) || tau.is_empty() {
        return Err(Error::NotAFace(tau.to_vec()));
    }
    let point = match point {
        Some(p) => p.clone(),
        None => g.barycenter(tau),
    };
    let nu = next_vertex(g);
    let out = stellar_with_vertex(g, tau, &point, nu)?;
    Ok((
        out,
        StellarStep {
            tau: tau.clone(),
            nu,
            point,
        },
    ))
}

/// Faces of dimension at least one, by decreasing dimension and then
/// lexicographically: the order used by [`derived`].
pub fn derived_order(g: &GeometricComplex) -> Vec<Face> {
    let mut faces: Vec<Face> = g
        .complex()
        .faces()
        .into_iter()
        .filter(|f| f.dim() >= 1)
        .collect();
    faces.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    faces
}

/// Applies stellar subdivisions at `faces` in the given order, choosing each
/// point with `rule` (which sees the complex current at that step).
pub fn stellar_sequence<R>(
    g: &GeometricComplex,
    faces: &[Face],
    mut rule: R,
) -> Result<(GeometricComplex, StellarHistory)>
where
    R: FnMut(&GeometricComplex, &Face) -> Point,
{
    let mut cur = g.clone();
    let mut history = StellarHistory::new();
    for tau in faces {
        let p = rule(&cur, tau);
        let (next, step) = stellar(&cur, tau, Some(&p))?;
        cur = next;
        history.push(step);
    }
    Ok((cur, history))
}

/// Barycentric subdivision.
pub fn derived(g: &GeometricComplex) -> (GeometricComplex, StellarHistory) {
    derived_with(g, |c, tau| c.barycenter(tau)).expect("barycenters are interior")
}

/// Derived subdivision with a caller-chosen interior point for every face of
/// dimension at least one. The rule is evaluated on `g` itself; the result
/// equals the stellar sequence over [`derived_order`] and is built directly
/// as the complex of flags of faces.
pub fn derived_with<R>(g: &GeometricComplex, rule: R) -> Result<(GeometricComplex, StellarHistory)>
where
    R: Fn(&GeometricComplex, &Face) -> Point + Sync + Send,
{
    let order = derived_order(g);
    let points = par::map(&order, |tau| rule(g, tau));
    let first = next_vertex(g);
    let mut history = StellarHistory::new();
    let mut ids: HashMap<&Face, Vertex> = HashMap::with_capacity(order.len());
    let mut coords = g.coords().clone();
    for ((tau, point), nu) in order.iter().zip(points).zip(first..) {
        if !g.in_relative_interior(tau, &point) {
            return Err(Error::NotInRelativeInterior(tau.to_vec()));
        }
        ids.insert(tau, nu);
        coords.insert(nu, point.clone());
        history.push(StellarStep {
            tau: tau.clone(),
            nu,
            point,
        });
    }
    let chains = par::map(g.facets(), |f| {
        let mut out = Vec::new();
        let mut perm = f.to_vec();
        permutations(&mut perm, 0, &mut |p| {
            let mut chain: Vec<Vertex> = Vec::with_capacity(p.len());
            for k in 1..=p.len() {
                if k == 1 {
                    chain.push(p[0]);
                } else {
                    let mut s = p[..k].to_vec();
                    s.sort_unstable();
                    chain.push(ids[&Face::from_sorted(s)]);
                }
            }
            chain.sort_unstable();
            out.push(Face::from_sorted(chain));
        });
        out
    });
    let complex = Complex::from_facets_unchecked(chains.into_iter().flatten().collect());
    Ok((
        GeometricComplex::from_parts(complex, g.ambient_dim(), coords),
        history,
    ))
}

/// `k`-fold barycentric subdivision.
pub fn sd_k(g: &GeometricComplex, k: usize) -> GeometricComplex {
    sd_k_with_history(g, k).0
}

pub fn sd_k_with_history(g: &GeometricComplex, k: usize) -> (GeometricComplex, StellarHistory) {
    let mut cur = g.clone();
    let mut history = StellarHistory::new();
    for _ in 0..k {
        let (next, h) = derived(&cur);
        cur = next;
        history.extend(h);
    }
    (cur, history)
}

/// Outcome of [`refine_until`].
#[derive(Clone, Debug)]
pub struct Refinement {
    /// Number of derived subdivisions applied.
    pub k: usize,
    pub complex: GeometricComplex,
    pub history: StellarHistory,
    /// `|f|` of the target, the admissible maximum for `k`.
    pub bound: usize,
}

/// Derives `g1` with points adapted to `g2` until the result refines `g2`.
/// The number of rounds may not exceed the total face count of `g2`.
pub fn refine_until(g1: &GeometricComplex, g2: &GeometricComplex) -> Result<Refinement> {
    if !same_support(g1, g2)? {
        return Err(Error::SupportMismatch);
    }
    let bound = g2.complex().total_faces();
    let target = Target::new(g2);
    let mut cur = g1.clone();
    let mut history = StellarHistory::new();
    let mut k = 0;
    while !facets_refine(&cur, g2) {
        if k == bound {
            return Err(Error::RefinementBoundExceeded { k: k + 1, bound });
        }
        let (next, h) = derived_with(&cur, |c, tau| target.adapted_point(c, tau))?;
        cur = next;
        history.extend(h);
        k += 1;
    }
    Ok(Refinement {
        k,
        complex: cur,
        history,
        bound,
    })
}

/// Refines `g1` toward `g2` by rounds of partial derived subdivision: each
/// round subdivides, in derived order and at adapted points, only the faces
/// that lie in no face of `g2`, until every facet does. Faces already inside
/// `g2` are left alone, so the result stays much coarser than
/// [`refine_until`]'s. Returns the refined complex and its stellar history.
pub fn refine_toward(
    g1: &GeometricComplex,
    g2: &GeometricComplex,
) -> Result<(GeometricComplex, StellarHistory)> {
    if !same_support(g1, g2)? {
        return Err(Error::SupportMismatch);
    }
    let bound = g2.complex().total_faces();
    let target = Target::new(g2);
    let mut cur = g1.clone();
    let mut history = StellarHistory::new();
    let mut rounds = 0;
    loop {
        let offending = offending_faces(&cur, g2);
        if offending.is_empty() {
            return Ok((cur, history));
        }
        if rounds == bound {
            return Err(Error::RefinementBoundExceeded {
                k: rounds + 1,
                bound,
            });
        }
        let points = par::map(&offending, |tau| target.adapted_point(&cur, tau));
        let mut next = cur.clone();
        for (tau, p) in offending.iter().zip(&points) {
            let (g, step) = stellar(&next, tau, Some(p))?;
            next = g;
            history.push(step);
        }
        cur = next;
        rounds += 1;
    }
}

fn lies_in(coarse: &GeometricComplex, fine: &GeometricComplex, tau: &Face) -> bool {
    coarse
        .carrier(&fine.barycenter(tau))
        .is_some_and(|c| {
            tau.iter().all(|v| {
                coarse
                    .barycentric(&c, fine.coord(*v))
                    .is_some_and(|x| x.iter().all(|y| !y.is_negative()))
            })
        })
}

/// Faces of dimension at least one lying in no face of `g2`, in derived
/// order.
fn offending_faces(cur: &GeometricComplex, g2: &GeometricComplex) -> Vec<Face> {
    let bad = par::map(cur.facets(), |f| {
        if lies_in(g2, cur, f) {
            return Vec::new();
        }
        f.subfaces()
            .filter(|t| t.dim() >= 1 && !lies_in(g2, cur, t))
            .collect()
    });
    let mut faces: Vec<Face> = bad.into_iter().flatten().collect();
    faces.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    faces.dedup();
    faces
}

/// A target complex for adapted-point queries.
struct Target<'a> {
    g: &'a GeometricComplex,
}

impl<'a> Target<'a> {
    fn new(g: &'a GeometricComplex) -> Target<'a> {
        Target { g }
    }

    /// A point of `relint tau` inside the relative interior of the
    /// lowest-dimensional (then lexicographically least) target face that
    /// meets `relint tau`: the average of the vertices of the intersection
    /// of the two simplices.
    fn adapted_point(&self, cur: &GeometricComplex, tau: &Face) -> Point {
        let tpts = cur.points(tau);
        let tbox = BBox::of(tpts.iter().copied());
        let limit = self
            .g
            .carrier(&cur.barycenter(tau))
            .map_or(i64::MAX, |c| c.dim());
        let mut candidates: Vec<Face> = self
            .g
            .facets_near(&tbox)
            .into_iter()
            .flat_map(|i| self.g.facets()[i].subfaces().collect::<Vec<_>>())
            .filter(|f| f.dim() <= limit)
            .collect();
        candidates.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        candidates.dedup();
        for f in &candidates {
            if !BBox::of(self.g.points(f)).meets(&tbox) {
                continue;
            }
            if let Some(p) = relint_meeting_point(&tpts, &self.g.points(f)) {
                return p;
            }
        }
        cur.barycenter(tau)
    }
}

/// Average of the vertices of `conv t ∩ conv f`, if that average lies in the
/// relative interior of `conv t`.
fn relint_meeting_point(t: &[&Point], f: &[&Point]) -> Option<Point> {
    let n = t[0].len();
    let (nt, nf) = (t.len(), f.len());
    let mut rows = Vec::with_capacity(n + 2);
    for k in 0..n {
        let mut row: Vec<Rat> = t.iter().map(|p| p[k].clone()).collect();
        row.extend(f.iter().map(|p| -p[k].clone()));
        rows.push(row);
    }
    let mut ones_t = vec![linalg::int(1); nt];
    ones_t.extend(vec![Rat::zero(); nf]);
    let mut ones_f = vec![Rat::zero(); nt];
    ones_f.extend(vec![linalg::int(1); nf]);
    rows.push(ones_t);
    rows.push(ones_f);
    let mut rhs = vec![Rat::zero(); n];
    rhs.push(linalg::int(1));
    rhs.push(linalg::int(1));
    let verts = lp::vertices(&rows, &rhs);
    if verts.is_empty() {
        return None;
    }
    let count = linalg::int(verts.len() as i64);
    let lambda: Vec<Rat> = (0..nt)
        .map(|i| verts.iter().map(|x| x[i].clone()).sum::<Rat>() / &count)
        .collect();
    if !lambda.iter().all(Signed::is_positive) {
        return None;
    }
    let mut p = vec![Rat::zero(); n];
    for (l, q) in lambda.iter().zip(t) {
        for (a, x) in p.iter_mut().zip(q.iter()) {
            *a += l * x;
        }
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::refines;
    use crate::iso::isomorphic;
    use crate::linalg::{point, rat};

    #[test]
    fn stellar_at_triangle() {
        let g = fixtures::filled_triangle();
        let (s, step) = stellar(&g, &g.facets()[0].clone(), None).unwrap();
        assert_eq!(s.facets().len(), 3);
        assert_eq!(step.nu, 3);
        assert_eq!(step.point, vec![rat(1, 3), rat(1, 3)]);
        assert!(refines(&s, &g));
    }

    #[test]
    fn stellar_errors() {
        let g = fixtures::filled_triangle();
        let edge = Face::new([0, 1]).unwrap();
        assert_eq!(
            stellar(&g, &edge, Some(&point(&[0, 0]))).unwrap_err(),
            Error::NotInRelativeInterior(vec![0, 1])
        );
        assert_eq!(stellar(&g, &Face::vertex(0), None).unwrap_err(), Error::StellarAtVertex);
        assert_eq!(
            stellar(&g, &Face::new([0, 7]).unwrap(), None).unwrap_err(),
            Error::NotAFace(vec![0, 7])
        );
    }

    #[test]
    fn derived_small_cases() {
        let (s, h) = derived(&fixtures::segment(&[0, 2]));
        assert_eq!(s.facets().len(), 2);
        assert_eq!(s.coord(2), &point(&[1]));
        assert_eq!(h.len(), 1);

        let (t, _) = derived(&fixtures::filled_triangle());
        assert_eq!(t.facets().len(), 6);
        assert_eq!(sd_k(&fixtures::segment(&[0, 2]), 2).facets().len(), 4);
        assert_eq!(sd_k(&t, 0), t);
    }

    #[test]
    fn derived_triangle_boundary_is_hexagon() {
        let tri = fixtures::filled_triangle();
        let boundary = crate::geometry::realize(
            crate::Complex::simplex_boundary([0, 1, 2]).unwrap(),
            tri.coords().clone(),
        )
        .unwrap();
        let (s, _) = derived(&boundary);
        let hex = crate::Complex::new((0..6).map(|i| [i, (i + 1) % 6])).unwrap();
        assert!(isomorphic(s.complex(), &hex).is_some());
    }

    #[test]
    fn flag_construction_matches_stellar_sequence() {
        for g in [
            fixtures::filled_triangle(),
            fixtures::tetra_centered(),
            fixtures::spiral6(),
            fixtures::segment(&[0, 1, 3]),
        ] {
            let fast = derived(&g);
            let slow = stellar_sequence(&g, &derived_order(&g), |c, t| c.barycenter(t)).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn history_replays() {
        let g = fixtures::tetra_centered();
        let (s, h) = derived(&g);
        assert_eq!(h.replay(&g).unwrap(), s);
        let mut bad = h.clone();
        bad.steps[3].point = point(&[9, 9, 9]);
        assert!(matches!(bad.replay(&g), Err(Error::InconsistentHistory(_))));
    }

    #[test]
    fn refine_segment() {
        let r = refine_until(&fixtures::segment(&[0, 2]), &fixtures::segment_split()).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.history.steps[0].point, point(&[1]));
        let same = refine_until(&fixtures::segment_split(), &fixtures::segment_split()).unwrap();
        assert_eq!(same.k, 0);
    }

    #[test]
    fn refine_square_diagonals() {
        let (a, b) = fixtures::square_triangulations();
        let r = refine_until(&a, &b).unwrap();
        assert_eq!(r.bound, 11);
        assert!(r.k >= 1 && r.k <= 11);
        assert!(refines(&r.complex, &b));
        // the crossing point of the diagonals is used
        assert!(r.history.iter().any(|s| s.point == vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn refine_toward_square_diagonals() {
        let (a, b) = fixtures::square_triangulations();
        let (g, h) = refine_toward(&a, &b).unwrap();
        assert!(refines(&g, &b));
        assert_eq!(h.replay(&a).unwrap(), g);
        // both triangles and the diagonal, nothing else
        assert_eq!(h.len(), 3);
        assert_eq!(h.steps[2].point, vec![rat(1, 2), rat(1, 2)]);
        let (same, none) = refine_toward(&b, &b).unwrap();
        assert_eq!((same, none.len()), (b, 0));
    }

    #[test]
    fn refine_toward_spiral_stays_coarse() {
        let t = fixtures::spiral6();
        let start = crate::regularity::lower_envelope(
            t.coords(),
            &crate::regularity::PLFunction::new((0..6).map(|v| (v, rat(v as i64 % 2, 1))).collect()),
        )
        .unwrap();
        let (g, _) = refine_toward(&start, &t).unwrap();
        assert!(refines(&g, &t));
        assert!(g.facets().len() < 100);
    }

    #[test]
    fn refine_support_mismatch() {
        let r = refine_until(&fixtures::segment(&[0, 2]), &fixtures::segment(&[0, 1]));
        assert_eq!(r.unwrap_err(), Error::SupportMismatch);
    }

    #[test]
    fn meeting_point_of_crossing_diagonals() {
        let (a, b) = (point(&[0, 0]), point(&[1, 1]));
        let (c, d) = (point(&[1, 0]), point(&[0, 1]));
        let p = relint_meeting_point(&[&a, &b], &[&c, &d]).unwrap();
        assert_eq!(p, vec![rat(1, 2), rat(1, 2)]);
        let far = point(&[5, 5]);
        assert!(relint_meeting_point(&[&a, &b], &[&far]).is_none());
    }
}
