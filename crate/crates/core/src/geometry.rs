//! Geometric realizations with exact rational coordinates: validation,
//! point location, support comparison, refinement, and complete simplicial
//! fans modelled as star-shaped spheres around the origin.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{self, affine_coords, centroid, det, Point, Rat};
use crate::lp::{self, LpOutcome, StandardLp};
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BBox {
    lo: Point,
    hi: Point,
}

impl BBox {
    pub(crate) fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> BBox {
        let mut it = points.into_iter();
        let first = it.next().expect("nonempty face");
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in it {
            for (i, x) in p.iter().enumerate() {
                if *x < lo[i] {
                    lo[i] = x.clone();
                }
                if *x > hi[i] {
                    hi[i] = x.clone();
                }
            }
        }
        BBox { lo, hi }
    }

    pub(crate) fn contains(&self, p: &[Rat]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub(crate) fn meets(&self, o: &BBox) -> bool {
        (0..self.lo.len()).all(|i| self.lo[i] <= o.hi[i] && o.lo[i] <= self.hi[i])
    }
}

/// Uniform grid over the bounding box of a complex, bucketing facets by the
/// cells their boxes cover.
#[derive(Clone, Debug)]
struct Grid {
    lo: Point,
    span: Point,
    res: usize,
    cells: Vec<Vec<usize>>,
}

impl Grid {
    fn build(boxes: &[BBox], ambient: usize) -> Grid {
        let all = BBox::of(boxes.iter().flat_map(|b| [&b.lo, &b.hi]));
        let span: Point = all
            .hi
            .iter()
            .zip(&all.lo)
            .map(|(h, l)| if h > l { h - l } else { Rat::one() })
            .collect();
        let res = ((boxes.len() as f64).powf(1.0 / ambient.max(1) as f64).ceil() as usize).clamp(1, 64);
        let mut g = Grid {
            lo: all.lo,
            span,
            res,
            cells: vec![Vec::new(); res.pow(ambient as u32)],
        };
        for (i, b) in boxes.iter().enumerate() {
            for c in g.cells_of(b) {
                g.cells[c].push(i);
            }
        }
        g
    }

    fn axis_cell(&self, axis: usize, x: &Rat) -> usize {
        let t = (x - &self.lo[axis]) * Rat::from_integer(BigInt::from(self.res)) / &self.span[axis];
        let c = t.floor().to_integer().to_i64().unwrap_or(i64::MAX);
        c.clamp(0, self.res as i64 - 1) as usize
    }

    fn cells_of(&self, b: &BBox) -> Vec<usize> {
        let mut out = vec![0usize];
        for axis in 0..self.lo.len() {
            let lo = self.axis_cell(axis, &b.lo[axis]);
            let hi = self.axis_cell(axis, &b.hi[axis]);
            out = out
                .iter()
                .flat_map(|base| (lo..=hi).map(move |c| base * self.res + c))
                .collect();
        }
        out
    }

    fn point_cell(&self, p: &[Rat]) -> Option<usize> {
        let mut idx = 0;
        for (axis, x) in p.iter().enumerate() {
            idx = idx * self.res + self.axis_cell(axis, x);
        }
        Some(idx)
    }
}

/// Validation switches for [`realize_with`].
#[derive(Clone, Copy, Debug)]
pub struct RealizeOptions {
    /// Pairwise facet-intersection check, quadratic in the facet count.
    pub check_intersections: bool,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            check_intersections: true,
        }
    }
}

/// A simplicial complex with exact coordinates for every vertex.
#[derive(Clone, Debug)]
pub struct GeometricComplex {
    complex: Complex,
    ambient_dim: usize,
    coords: BTreeMap<Vertex, Point>,
    boxes: Vec<BBox>,
    grid: OnceLock<Grid>,
}

impl PartialEq for GeometricComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.complex == other.complex
            && self.coords == other.coords
    }
}

impl Eq for GeometricComplex {}

pub fn realize(complex: Complex, coords: BTreeMap<Vertex, Point>) -> Result<GeometricComplex> {
    realize_with(complex, coords, RealizeOptions::default())
}

pub fn realize_with(
    complex: Complex,
    mut coords: BTreeMap<Vertex, Point>,
    opts: RealizeOptions,
) -> Result<GeometricComplex> {
    let ambient = match complex.vertices().iter().next() {
        Some(v) => coords.get(v).ok_or(Error::MissingCoordinates(*v))?.len(),
        None => 0,
    };
    for &v in complex.vertices() {
        let p = coords.get(&v).ok_or(Error::MissingCoordinates(v))?;
        if p.len() != ambient {
            return Err(Error::CoordinateLength {
                vertex: v,
                expected: ambient,
                found: p.len(),
            });
        }
    }
    coords.retain(|v, _| complex.vertices().contains(v));
    let g = GeometricComplex::from_parts(complex, ambient, coords);
    for f in g.complex.facets() {
        if !linalg::affinely_independent(&g.points(f)) {
            return Err(Error::DegenerateFacet(f.to_vec()));
        }
    }
    if opts.check_intersections {
        g.check_intersections()?;
    }
    Ok(g)
}

impl GeometricComplex {
    /// Assembles without validation; for results of operations that preserve
    /// embeddings.
    pub(crate) fn from_parts(
        complex: Complex,
        ambient_dim: usize,
        coords: BTreeMap<Vertex, Point>,
    ) -> GeometricComplex {
        let boxes = complex
            .facets()
            .iter()
            .map(|f| BBox::of(f.iter().map(|v| &coords[v])))
            .collect();
        GeometricComplex {
            complex,
            ambient_dim,
            coords,
            boxes,
            grid: OnceLock::new(),
        }
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> i64 {
        self.complex.dim()
    }

    pub fn coords(&self) -> &BTreeMap<Vertex, Point> {
        &self.coords
    }

    pub fn coord(&self, v: Vertex) -> &Point {
        &self.coords[&v]
    }

    pub fn facets(&self) -> &[Face] {
        self.complex.facets()
    }

    pub fn points(&self, f: &Face) -> Vec<&Point> {
        f.iter().map(|v| &self.coords[v]).collect()
    }

    pub fn barycenter(&self, f: &Face) -> Point {
        centroid(self.points(f))
    }

    /// Exact affine coordinates of `p` relative to the vertices of `f`.
    pub fn barycentric(&self, f: &Face, p: &[Rat]) -> Option<Vec<Rat>> {
        affine_coords(&self.points(f), p)
    }

    /// Whether `p` lies in the relative interior of `f`.
    pub fn in_relative_interior(&self, f: &Face, p: &[Rat]) -> bool {
        self.barycentric(f, p)
            .is_some_and(|c| c.iter().all(Signed::is_positive))
    }

    fn grid(&self) -> &Grid {
        self.grid.get_or_init(|| Grid::build(&self.boxes, self.ambient_dim))
    }

    /// Indices of facets whose bounding boxes meet `b`, ascending.
    pub(crate) fn facets_near(&self, b: &BBox) -> Vec<usize> {
        let grid = self.grid();
        let mut out: Vec<usize> = grid
            .cells_of(b)
            .into_iter()
            .flat_map(|c| grid.cells[c].iter().copied())
            .filter(|&i| self.boxes[i].meets(b))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The inclusion-minimal face whose convex hull contains `p`.
    pub fn carrier(&self, p: &[Rat]) -> Option<Face> {
        if p.len() != self.ambient_dim || self.facets().is_empty() {
            return None;
        }
        let grid = self.grid();
        let cell = grid.point_cell(p)?;
        grid.cells[cell].iter().find_map(|&i| {
            if !self.boxes[i].contains(p) {
                return None;
            }
            let f = &self.facets()[i];
            let c = self.barycentric(f, p)?;
            if c.iter().any(Signed::is_negative) {
                return None;
            }
            let verts = f
                .iter()
                .zip(&c)
                .filter(|(_, x)| x.is_positive())
                .map(|(v, _)| *v);
            Some(Face::from_sorted(verts.collect()))
        })
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        self.carrier(p).is_some()
    }

    /// Per-dimension sums of absolute projected volumes of the facets, one
    /// entry per coordinate subspace. Additive under subdivision, so equal
    /// supports give equal signatures.
    pub fn volume_signature(&self) -> BTreeMap<usize, Vec<Rat>> {
        let n = self.ambient_dim;
        let mut out: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
        for f in self.facets() {
            let k = f.len() - 1;
            let subsets = linalg::combinations(n, k);
            let entry = out
                .entry(k)
                .or_insert_with(|| vec![Rat::zero(); subsets.len()]);
            let pts = self.points(f);
            for (slot, s) in entry.iter_mut().zip(&subsets) {
                let rows: Vec<Vec<Rat>> = pts[1..]
                    .iter()
                    .map(|p| s.iter().map(|&i| &p[i] - &pts[0][i]).collect())
                    .collect();
                *slot += linalg::simplex_volume(&rows);
            }
        }
        out
    }

    /// Full-dimensional volume (only meaningful when `dim == ambient_dim`).
    pub fn volume(&self) -> Rat {
        self.volume_signature()
            .get(&self.ambient_dim)
            .map(|v| v[0].clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn translate(&self, offset: &[Rat]) -> GeometricComplex {
        let coords = self
            .coords
            .iter()
            .map(|(v, p)| (*v, linalg::add(p, offset)))
            .collect();
        GeometricComplex::from_parts(self.complex.clone(), self.ambient_dim, coords)
    }

    pub fn scale(&self, s: &Rat) -> GeometricComplex {
        let coords = self
            .coords
            .iter()
            .map(|(v, p)| (*v, linalg::scale(p, s)))
            .collect();
        GeometricComplex::from_parts(self.complex.clone(), self.ambient_dim, coords)
    }

    /// Checks that any two facets meet exactly in the hull of their common
    /// vertices.
    pub fn check_intersections(&self) -> Result<()> {
        let facets = self.facets();
        let mut pairs = Vec::new();
        for i in 0..facets.len() {
            for j in self.facets_near(&self.boxes[i]) {
                if j > i {
                    pairs.push((i, j));
                }
            }
        }
        let bad = par::find_first(&pairs, |&(i, j)| {
            (!self.properly_intersect(&facets[i], &facets[j])).then_some((i, j))
        });
        match bad {
            Some((i, j)) => Err(Error::OverlappingFaces(facets[i].to_vec(), facets[j].to_vec())),
            None => Ok(()),
        }
    }

    fn properly_intersect(&self, a: &Face, b: &Face) -> bool {
        let common = a.intersection(b);
        let full = self.ambient_dim as i64;
        if a.dim() == full && b.dim() == full && common.len() == a.len() - 1 {
            // two full simplices on a shared ridge: apexes on opposite sides
            let apex_a = a.difference(&common)[0];
            let apex_b = b.difference(&common)[0];
            let side = |apex: Vertex| {
                let base = &self.coords[&common[0]];
                let rows: Vec<Vec<Rat>> = common[1..]
                    .iter()
                    .chain(std::iter::once(&apex))
                    .map(|v| linalg::sub(&self.coords[v], base))
                    .collect();
                det(&rows)
            };
            let (sa, sb) = (side(apex_a), side(apex_b));
            return (sa.is_positive() && sb.is_negative()) || (sa.is_negative() && sb.is_positive());
        }
        // maximize the weight on non-shared vertices over common points
        let pa = self.points(a);
        let pb = self.points(b);
        let (na, nb) = (pa.len(), pb.len());
        let n = self.ambient_dim;
        let mut rows = Vec::with_capacity(n + 2);
        for k in 0..n {
            let mut row: Vec<Rat> = pa.iter().map(|p| p[k].clone()).collect();
            row.extend(pb.iter().map(|p| -p[k].clone()));
            rows.push(row);
        }
        let mut ra = vec![Rat::one(); na];
        ra.extend(vec![Rat::zero(); nb]);
        let mut rb = vec![Rat::zero(); na];
        rb.extend(vec![Rat::one(); nb]);
        rows.push(ra);
        rows.push(rb);
        let mut rhs = vec![Rat::zero(); n];
        rhs.push(Rat::one());
        rhs.push(Rat::one());
        let c: Vec<Rat> = a
            .iter()
            .chain(b.iter())
            .map(|v| {
                if common.contains(*v) {
                    Rat::zero()
                } else {
                    Rat::one()
                }
            })
            .collect();
        match lp::solve(&StandardLp { a: rows, b: rhs, c }) {
            LpOutcome::Optimal { value, .. } => value.is_zero(),
            LpOutcome::Infeasible { .. } => true, // disjoint
            LpOutcome::Unbounded { .. } => unreachable!("bounded by the simplex constraints"),
        }
    }
}

/// Equality of supports by vertex containment, facet-barycenter containment
/// and projected volume sums. Sound for complexes that are subdivisions of a
/// common support.
pub fn same_support(a: &GeometricComplex, b: &GeometricComplex) -> Result<bool> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::AmbientMismatch(a.ambient_dim, b.ambient_dim));
    }
    if a.volume_signature() != b.volume_signature() {
        return Ok(false);
    }
    let inside = |x: &GeometricComplex, y: &GeometricComplex| {
        let pts: Vec<&Point> = x.coords.values().collect();
        par::all(&pts, |p| y.contains_point(p))
            && par::all(x.facets(), |f| y.contains_point(&x.barycenter(f)))
    };
    Ok(inside(a, b) && inside(b, a))
}

/// `fine ≺ coarse`: same support, and every facet of `fine` lies in a face
/// of `coarse`.
pub fn refines(fine: &GeometricComplex, coarse: &GeometricComplex) -> bool {
    match same_support(fine, coarse) {
        Ok(true) => facets_refine(fine, coarse),
        _ => false,
    }
}

/// The facet-containment half of [`refines`], for callers that already know
/// the supports agree.
pub(crate) fn facets_refine(fine: &GeometricComplex, coarse: &GeometricComplex) -> bool {
    par::all(fine.facets(), |f| {
        let Some(carrier) = coarse.carrier(&fine.barycenter(f)) else {
            return false;
        };
        f.iter().all(|v| {
            coarse
                .barycentric(&carrier, fine.coord(*v))
                .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
        })
    })
}

/// A complete simplicial fan, stored as a star-shaped `d`-sphere in
/// `R^{d+1}` around the origin; its cones are the nonnegative spans of the
/// sphere's faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    sphere: GeometricComplex,
}

impl Fan {
    pub fn new(sphere: GeometricComplex) -> Result<Fan> {
        validate_star_shaped(&sphere)?;
        Ok(Fan { sphere })
    }

    pub fn sphere(&self) -> &GeometricComplex {
        &self.sphere
    }

    pub fn into_sphere(self) -> GeometricComplex {
        self.sphere
    }

    /// Dimension of the ambient space (one more than the sphere's).
    pub fn dim(&self) -> usize {
        self.sphere.ambient_dim
    }

    pub fn rays(&self) -> impl Iterator<Item = (Vertex, &Point)> {
        self.sphere.coords.iter().map(|(v, p)| (*v, p))
    }
}

/// Fan over a sphere, coned from `center` (default: the average of the
/// sphere's vertices). The sphere is translated so `center` becomes the
/// origin.
pub fn fan_from_sphere(g: &GeometricComplex, center: Option<&Point>) -> Result<Fan> {
    let c = match center {
        Some(c) => c.clone(),
        None => centroid(g.coords.values()),
    };
    let neg: Point = c.iter().map(|x| -x).collect();
    Fan::new(g.translate(&neg))
}

fn oriented_det(g: &GeometricComplex, verts: &[Vertex]) -> Rat {
    let rows: Vec<Vec<Rat>> = verts.iter().map(|v| g.coords[v].clone()).collect();
    det(&rows)
}

fn validate_star_shaped(g: &GeometricComplex) -> Result<()> {
    let n = g.ambient_dim;
    let fail = |m: String| Err(Error::NotStarShaped(m));
    if !g.complex.is_pure() || g.dim() + 1 != n as i64 || n == 0 {
        return fail(format!(
            "expected a pure {}-complex, found dimension {}",
            n as i64 - 1,
            g.dim()
        ));
    }
    for f in g.facets() {
        if oriented_det(g, f).is_zero() {
            return fail(format!("origin lies in the affine hull of {f}"));
        }
    }
    let ridges = g.complex.ridge_incidence()?;
    for (r, inc) in &ridges {
        if inc.len() != 2 {
            return Err(Error::NotPseudomanifold {
                ridge: r.to_vec(),
                count: inc.len(),
            });
        }
        let mut signs = Vec::with_capacity(2);
        for &i in inc {
            let apex = g.facets()[i].difference(r)[0];
            let mut verts = r.to_vec();
            verts.push(apex);
            signs.push(oriented_det(g, &verts).is_positive());
        }
        if signs[0] == signs[1] {
            return fail(format!("both cones at ridge {r} lie on the same side"));
        }
    }
    if !g.complex.is_connected() {
        return fail("sphere is disconnected".into());
    }
    // count sheets along one ray through an open cone
    let ray = g.barycenter(&g.facets()[0]);
    let mut hits: Vec<Rat> = Vec::new();
    for f in g.facets() {
        let cols: Vec<&[Rat]> = f.iter().map(|v| g.coords[v].as_slice()).collect();
        if let Some(a) = linalg::solve_columns(&cols, &ray) {
            if a.iter().all(|x| !x.is_negative()) {
                let s: Rat = a.iter().sum();
                if !hits.contains(&s) {
                    hits.push(s);
                }
            }
        }
    }
    if hits.len() != 1 {
        return fail(format!("a ray meets the sphere {} times", hits.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{int, point, rat};

    fn gc(facets: &[&[Vertex]], pts: &[(Vertex, &[i64])]) -> Result<GeometricComplex> {
        let c = Complex::new(facets.iter().map(|f| f.to_vec())).unwrap();
        let coords = pts.iter().map(|(v, p)| (*v, point(p))).collect();
        realize(c, coords)
    }

    #[test]
    fn triangle_boundary_in_plane() {
        let g = gc(&[&[1, 2], &[2, 3], &[3, 1]], &[(1, &[0, 0]), (2, &[1, 0]), (3, &[0, 1])]).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.ambient_dim(), 2);
    }

    #[test]
    fn overlapping_triangles_rejected() {
        // second triangle folds back over the first across edge {1,2}
        let r = gc(
            &[&[1, 2, 3], &[1, 2, 4]],
            &[(1, &[0, 0]), (2, &[2, 0]), (3, &[0, 2]), (4, &[1, 1])],
        );
        assert!(matches!(r, Err(Error::OverlappingFaces(..))));
        // crossing without sharing anything
        let r = gc(
            &[&[1, 2], &[3, 4]],
            &[(1, &[0, 0]), (2, &[2, 2]), (3, &[0, 2]), (4, &[2, 0])],
        );
        assert!(matches!(r, Err(Error::OverlappingFaces(..))));
        // touching at a vertex of one and the interior of the other
        let r = gc(
            &[&[1, 2], &[3, 4]],
            &[(1, &[0, 0]), (2, &[2, 0]), (3, &[1, 0]), (4, &[1, 1])],
        );
        assert!(matches!(r, Err(Error::OverlappingFaces(..))));
    }

    #[test]
    fn degenerate_facet_rejected() {
        let r = gc(&[&[1, 2, 3]], &[(1, &[0, 0]), (2, &[1, 1]), (3, &[2, 2])]);
        assert_eq!(r, Err(Error::DegenerateFacet(vec![1, 2, 3])));
    }

    #[test]
    fn deferred_validation_flag() {
        let c = Complex::new([[1, 2], [3, 4]]).unwrap();
        let coords = [(1, point(&[0, 0])), (2, point(&[2, 2])), (3, point(&[0, 2])), (4, point(&[2, 0]))]
            .into_iter()
            .collect();
        let opts = RealizeOptions {
            check_intersections: false,
        };
        assert!(realize_with(c, coords, opts).is_ok());
    }

    #[test]
    fn carriers() {
        let g = fixtures::filled_triangle();
        let f = g.facets()[0].clone();
        assert_eq!(g.carrier(&g.barycenter(&f)), Some(f));
        assert_eq!(g.carrier(&point(&[0, 0])), Some(Face::vertex(0)));
        assert_eq!(g.carrier(&[rat(1, 2), int(0)]), Some(Face::new([0, 1]).unwrap()));
        assert_eq!(g.carrier(&point(&[5, 5])), None);
    }

    #[test]
    fn supports() {
        let a = fixtures::segment(&[0, 2]);
        let b = fixtures::segment(&[0, 1]);
        assert!(!same_support(&a, &b).unwrap());
        let (s1, s2) = fixtures::square_triangulations();
        assert!(same_support(&s1, &s2).unwrap());
        assert_eq!(s1.volume(), int(1));
        let mixed = fixtures::filled_triangle();
        assert!(matches!(same_support(&a, &mixed), Err(Error::AmbientMismatch(1, 2))));
    }

    #[test]
    fn refinement_is_not_symmetric() {
        let (s1, s2) = fixtures::square_triangulations();
        assert!(refines(&s1, &s1));
        assert!(!refines(&s1, &s2));
        assert!(!refines(&s2, &s1));
        let split = fixtures::segment_split();
        let whole = fixtures::segment(&[0, 2]);
        assert!(refines(&split, &whole));
        assert!(!refines(&whole, &split));
    }

    #[test]
    fn tetra_fan() {
        let g = fixtures::tetra_boundary_geometric();
        let fan = fan_from_sphere(&g, None).unwrap();
        assert_eq!(fan.sphere().facets().len(), 4);
        assert_eq!(fan.sphere().complex(), g.complex());
    }

    #[test]
    fn octahedron_fan_at_origin() {
        let fan = fixtures::octahedron_fan();
        assert_eq!(fan.dim(), 3);
        assert_eq!(fan.sphere().facets().len(), 8);
    }

    #[test]
    fn fan_with_outside_center_rejected() {
        let g = fixtures::tetra_boundary_geometric();
        let far = point(&[10, 10, 10]);
        assert!(matches!(fan_from_sphere(&g, Some(&far)), Err(Error::NotStarShaped(_))));
    }

    #[test]
    fn doubly_wound_cycle_rejected() {
        // a 6-cycle winding twice around a triangle's worth of directions
        let c = Complex::new((0..6u32).map(|i| [i, (i + 1) % 6])).unwrap();
        let dirs = [[2, 0], [-1, 2], [-1, -2]];
        let coords = (0..6u32)
            .map(|i| (i, point(&dirs[(i % 3) as usize].map(|x| x * (1 + (i / 3) as i64)))))
            .collect();
        let g = realize_with(c, coords, RealizeOptions { check_intersections: false }).unwrap();
        assert!(matches!(Fan::new(g), Err(Error::NotStarShaped(_))));
    }
}
