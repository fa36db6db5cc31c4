//! Piecewise-linear functions, wall convexity, and exact regularity
//! decisions for triangulations and complete fans.
//!
//! Both settings share one model. A triangulation lifts each point `p` to
//! `(p, 1)`; a fan uses its sphere's vertices as they are. A wall is a ridge
//! `R` with facets `R ∪ {a}` and `R ∪ {b}`, where `R ∪ {a}` is the
//! lexicographically smaller facet. Writing the lift of `b` in the basis of
//! lifts of `R ∪ {a}` as `β_a a + Σ β_u u`, the margin of a height function
//! `h` is `h(b) - β_a h(a) - Σ β_u h(u)`: the height of `b` above the linear
//! extension of `h` from the first facet. Positive means strictly convex,
//! zero flat, negative concave.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{realize, Fan, GeometricComplex};
use crate::linalg::{self, affine_coords, dot, homogenize, Point, Rat};
use crate::lp;
use crate::par;
use crate::subdivision::{StellarHistory, StellarStep};

/// Whether the vertices of a complex are points of a triangulation or ray
/// representatives of a fan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Triangulation,
    Fan,
}

/// A complex together with the reading of its wall conditions.
#[derive(Clone, Copy, Debug)]
pub struct Domain<'a> {
    pub g: &'a GeometricComplex,
    pub kind: Kind,
}

impl<'a> Domain<'a> {
    pub fn triangulation(g: &'a GeometricComplex) -> Domain<'a> {
        Domain {
            g,
            kind: Kind::Triangulation,
        }
    }

    pub fn fan(f: &'a Fan) -> Domain<'a> {
        Domain {
            g: f.sphere(),
            kind: Kind::Fan,
        }
    }

    /// A sphere already known to be star-shaped around the origin, such as
    /// a subdivision of a fan's sphere.
    pub fn fan_sphere(g: &'a GeometricComplex) -> Domain<'a> {
        Domain { g, kind: Kind::Fan }
    }

    pub fn new(g: &'a GeometricComplex, kind: Kind) -> Domain<'a> {
        Domain { g, kind }
    }

    /// The vector used for linear algebra on walls.
    pub fn lift(&self, p: &[Rat]) -> Point {
        lift(self.kind, p)
    }
}

impl<'a> From<&'a GeometricComplex> for Domain<'a> {
    fn from(g: &'a GeometricComplex) -> Self {
        Domain::triangulation(g)
    }
}

impl<'a> From<&'a Fan> for Domain<'a> {
    fn from(f: &'a Fan) -> Self {
        Domain::fan(f)
    }
}

fn lift(kind: Kind, p: &[Rat]) -> Point {
    match kind {
        Kind::Triangulation => homogenize(p),
        Kind::Fan => p.to_vec(),
    }
}

/// Heights on vertices, extended affinely over faces (for fans: linearly
/// over cones).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PLFunction {
    pub heights: BTreeMap<Vertex, Rat>,
}

impl PLFunction {
    pub fn new(heights: BTreeMap<Vertex, Rat>) -> PLFunction {
        PLFunction { heights }
    }

    pub fn zero<'a>(vertices: impl IntoIterator<Item = &'a Vertex>) -> PLFunction {
        PLFunction {
            heights: vertices.into_iter().map(|v| (*v, Rat::zero())).collect(),
        }
    }

    pub fn get(&self, v: Vertex) -> Result<&Rat> {
        self.heights.get(&v).ok_or(Error::MissingHeight(v))
    }

    pub fn scaled(&self, s: &Rat) -> PLFunction {
        PLFunction {
            heights: self.heights.iter().map(|(v, h)| (*v, h * s)).collect(),
        }
    }

    /// Adds the globally linear function `x -> c . lift(x)`.
    pub fn plus_linear(&self, dom: Domain, c: &[Rat]) -> PLFunction {
        PLFunction {
            heights: self
                .heights
                .iter()
                .map(|(v, h)| (*v, h + dot(c, &dom.lift(dom.g.coord(*v)))))
                .collect(),
        }
    }

    /// Value at `p` by interpolation on `face`, which must contain `p`.
    pub fn value_on(&self, g: &GeometricComplex, face: &Face, p: &[Rat]) -> Result<Rat> {
        let lambda = g
            .barycentric(face, p)
            .ok_or_else(|| Error::NotInRelativeInterior(face.to_vec()))?;
        let mut acc = Rat::zero();
        for (v, l) in face.iter().zip(&lambda) {
            acc += l * self.get(*v)?;
        }
        Ok(acc)
    }

    /// Value at `p` through its carrier in `g`.
    pub fn value_at(&self, g: &GeometricComplex, p: &[Rat]) -> Option<Rat> {
        let c = g.carrier(p)?;
        self.value_on(g, &c, p).ok()
    }
}

/// An interior ridge with its two apexes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    pub ridge: Face,
    pub a: Vertex,
    pub b: Vertex,
}

impl Wall {
    fn from_facets(ridge: Face, f1: &Face, f2: &Face) -> Wall {
        let (f1, f2) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        Wall {
            a: f1.difference(&ridge)[0],
            b: f2.difference(&ridge)[0],
            ridge,
        }
    }

    pub fn sigma1(&self) -> Face {
        self.ridge.with(self.a)
    }

    pub fn sigma2(&self) -> Face {
        self.ridge.with(self.b)
    }
}

/// A wall's margin as a linear form in the heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallForm {
    pub wall: Wall,
    pub coeffs: Vec<(Vertex, Rat)>,
}

impl WallForm {
    pub fn eval(&self, h: &PLFunction) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (v, c) in &self.coeffs {
            acc += c * h.get(*v)?;
        }
        Ok(acc)
    }

    fn eval_map(&self, h: &HashMap<Vertex, Rat>) -> Rat {
        self.coeffs.iter().map(|(v, c)| c * &h[v]).sum()
    }

    fn coeff(&self, v: Vertex) -> Rat {
        self.coeffs
            .iter()
            .find(|(u, _)| *u == v)
            .map_or_else(Rat::zero, |(_, c)| c.clone())
    }
}

fn form_from<F>(kind: Kind, wall: Wall, coord: F) -> WallForm
where
    F: Fn(Vertex) -> Point,
{
    let s1 = wall.sigma1();
    let lifts: Vec<Point> = s1.iter().map(|v| lift(kind, &coord(*v))).collect();
    let cols: Vec<&[Rat]> = lifts.iter().map(Vec::as_slice).collect();
    let beta = linalg::solve_columns(&cols, &lift(kind, &coord(wall.b)))
        .expect("facet lifts form a basis");
    let mut coeffs = vec![(wall.b, Rat::one())];
    coeffs.extend(s1.iter().zip(beta).map(|(v, x)| (*v, -x)));
    WallForm { wall, coeffs }
}

pub fn wall_form(dom: Domain, wall: &Wall) -> WallForm {
    form_from(dom.kind, wall.clone(), |v| dom.g.coord(v).clone())
}

/// All interior walls, sorted by ridge.
pub fn walls(dom: Domain) -> Result<Vec<Wall>> {
    let g = dom.g;
    if dom.kind == Kind::Triangulation && g.dim() != g.ambient_dim() as i64 {
        return Err(Error::NotFullDimensional {
            dim: g.dim(),
            ambient: g.ambient_dim(),
        });
    }
    let inc = g.complex().ridge_incidence()?;
    let mut out = Vec::new();
    for (r, fs) in inc {
        match fs.len() {
            1 if dom.kind == Kind::Triangulation => {}
            2 => out.push(Wall::from_facets(r, &g.facets()[fs[0]], &g.facets()[fs[1]])),
            n => {
                return Err(Error::NotPseudomanifold {
                    ridge: r.to_vec(),
                    count: n,
                })
            }
        }
    }
    Ok(out)
}

pub fn wall_forms(dom: Domain) -> Result<Vec<WallForm>> {
    let ws = walls(dom)?;
    Ok(par::map(&ws, |w| wall_form(dom, w)))
}

/// The interior wall at `ridge`.
pub fn wall_at(dom: Domain, ridge: &Face) -> Result<Wall> {
    let fs: Vec<&Face> = dom.g.complex().facets_containing(ridge).collect();
    let codim_one = fs.iter().all(|f| f.len() == ridge.len() + 1);
    match fs.len() {
        0 => Err(Error::NotAFace(ridge.to_vec())),
        2 if codim_one => Ok(Wall::from_facets(ridge.clone(), fs[0], fs[1])),
        _ => Err(Error::BoundaryWall(ridge.to_vec())),
    }
}

/// The convexity margin of `h` across `wall`.
pub fn wall_convexity(dom: Domain, h: &PLFunction, wall: &Wall) -> Result<Rat> {
    let genuine = wall_at(dom, &wall.ridge)?;
    if (genuine.a, genuine.b) != (wall.a, wall.b) && (genuine.a, genuine.b) != (wall.b, wall.a) {
        return Err(Error::BoundaryWall(wall.ridge.to_vec()));
    }
    wall_form(dom, &genuine).eval(h)
}

/// Heights with their exact margin at every wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityCertificate {
    pub heights: PLFunction,
    pub margins: BTreeMap<Face, Rat>,
}

/// Nonnegative wall multipliers whose combination of margin forms vanishes
/// identically: with every margin positive the combination would be
/// positive, so no strictly convex heights exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularityWitness {
    pub multipliers: BTreeMap<Face, Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular(RegularityCertificate),
    Irregular(IrregularityWitness),
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular(_))
    }
}

/// Margins of `h` at every wall, whatever their signs.
pub fn certificate_for(dom: Domain, h: &PLFunction) -> Result<RegularityCertificate> {
    let forms = wall_forms(dom)?;
    let mut margins = BTreeMap::new();
    for f in &forms {
        margins.insert(f.wall.ridge.clone(), f.eval(h)?);
    }
    Ok(RegularityCertificate {
        heights: h.clone(),
        margins,
    })
}

/// Decides regularity exactly.
///
/// Strictly convex heights exist iff the margin system `C h >= 1` is
/// feasible. By Farkas' lemma that fails iff some `y >= 0` with
/// `sum y = 1` has `y^T C = 0`. The latter system is solved with the exact
/// simplex method: a solution is the irregularity witness, and an
/// infeasibility vector `(z, z0)` with `C z >= -z0 > 0` yields the heights
/// `z / -z0`. The heights are then normalized to vanish on the first facet.
pub fn is_regular(dom: Domain) -> Result<Regularity> {
    let forms = wall_forms(dom)?;
    let verts: Vec<Vertex> = dom.g.complex().vertices().iter().copied().collect();
    if forms.is_empty() {
        return Ok(Regularity::Regular(RegularityCertificate {
            heights: PLFunction::zero(&verts),
            margins: BTreeMap::new(),
        }));
    }
    let index: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let (nv, nw) = (verts.len(), forms.len());
    let mut a = vec![vec![Rat::zero(); nw]; nv + 1];
    for (j, f) in forms.iter().enumerate() {
        for (v, c) in &f.coeffs {
            a[index[v]][j] += c;
        }
        a[nv][j] = Rat::one();
    }
    let mut b = vec![Rat::zero(); nv + 1];
    b[nv] = Rat::one();
    match lp::feasible_point(&a, &b) {
        Ok(y) => Ok(Regularity::Irregular(IrregularityWitness {
            multipliers: forms
                .iter()
                .zip(y)
                .filter(|(_, y)| !y.is_zero())
                .map(|(f, y)| (f.wall.ridge.clone(), y))
                .collect(),
        })),
        Err(z) => {
            let scale = -z[nv].clone();
            debug_assert!(scale.is_positive());
            let heights: BTreeMap<Vertex, Rat> =
                verts.iter().zip(&z).map(|(v, x)| (*v, x / &scale)).collect();
            let h = pin_first_facet(dom, &PLFunction::new(heights));
            let cert = certificate_for(dom, &h)?;
            debug_assert!(cert.margins.values().all(|m| m >= &Rat::one()));
            Ok(Regularity::Regular(cert))
        }
    }
}

/// Subtracts the linear function that agrees with `h` on the first facet.
fn pin_first_facet(dom: Domain, h: &PLFunction) -> PLFunction {
    let f = &dom.g.facets()[0];
    let rows: Vec<Point> = f.iter().map(|v| dom.lift(dom.g.coord(*v))).collect();
    let rhs: Vec<Rat> = f.iter().map(|v| h.heights[v].clone()).collect();
    match linalg::solve(&rows, &rhs) {
        Some(c) => h.plus_linear(dom, &c.iter().map(|x| -x).collect::<Vec<_>>()),
        None => h.clone(),
    }
}

/// Recomputes every margin from the heights. True iff the stored margins
/// cover exactly the walls, agree with the recomputation, and are positive.
pub fn verify_certificate(dom: Domain, cert: &RegularityCertificate) -> Result<bool> {
    for v in dom.g.complex().vertices() {
        cert.heights.get(*v)?;
    }
    let forms = wall_forms(dom)?;
    if forms.len() != cert.margins.len() {
        return Ok(false);
    }
    for f in &forms {
        let m = f.eval(&cert.heights)?;
        if !m.is_positive() || cert.margins.get(&f.wall.ridge) != Some(&m) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks an irregularity witness without the solver: multipliers are
/// nonnegative with positive sum, name walls, and combine the margin forms
/// to the zero form.
pub fn replay_witness(dom: Domain, w: &IrregularityWitness) -> Result<bool> {
    let mut total = Rat::zero();
    let mut combo: BTreeMap<Vertex, Rat> = BTreeMap::new();
    for (ridge, y) in &w.multipliers {
        if y.is_negative() {
            return Ok(false);
        }
        let wall = match wall_at(dom, ridge) {
            Ok(w) => w,
            Err(_) => return Ok(false),
        };
        total += y;
        for (v, c) in wall_form(dom, &wall).coeffs {
            *combo.entry(v).or_insert_with(Rat::zero) += y * c;
        }
    }
    Ok(total.is_positive() && combo.values().all(Zero::is_zero))
}

/// The function equal to `<ν, ν>` at `nu` and zero at every other vertex,
/// with `ν` the lift of the vertex (the vertex itself for fans).
///
/// Under the margin convention of this module it is strictly convex on the
/// walls of the link of `nu` (those whose facets are `R ∪ {nu}` and `R ∪ {b}`),
/// flat on every wall outside the closed star, and on walls through `nu` its
/// sign depends on the geometry. Its negative is the increment used after a
/// stellar step, where it is strictly convex on the new walls through `nu`.
pub fn nu_star(dom: Domain, nu: Vertex) -> Result<PLFunction> {
    let Some(p) = dom.g.coords().get(&nu) else {
        return Err(Error::NotARay(nu));
    };
    let l = dom.lift(p);
    let mut h = PLFunction::zero(dom.g.complex().vertices());
    h.heights.insert(nu, dot(&l, &l));
    Ok(h)
}

/// The triangulation read off the lower hull of the lifted points
/// `(p, h(p))`. Every simplex of the output has all other lifted points
/// strictly above its hyperplane; a point on such a hyperplane means the
/// heights are not generic.
pub fn lower_envelope(coords: &BTreeMap<Vertex, Point>, h: &PLFunction) -> Result<GeometricComplex> {
    let ids: Vec<Vertex> = coords.keys().copied().collect();
    let pts: Vec<&Point> = coords.values().collect();
    let d = pts.first().map_or(0, |p| p.len());
    let lifts: Vec<Point> = pts.iter().map(|p| homogenize(p)).collect();
    if linalg::rank(&lifts) != d + 1 {
        return Err(Error::DegeneratePointSet);
    }
    let hs: Vec<Rat> = ids
        .iter()
        .map(|v| h.get(*v).cloned())
        .collect::<Result<_>>()?;
    let subsets = linalg::combinations(ids.len(), d + 1);
    let found = par::map(&subsets, |s| -> std::result::Result<Option<Face>, Vec<Vertex>> {
        let rows: Vec<Point> = s.iter().map(|&i| lifts[i].clone()).collect();
        let rhs: Vec<Rat> = s.iter().map(|&i| hs[i].clone()).collect();
        let Some(c) = linalg::solve(&rows, &rhs) else {
            return Ok(None);
        };
        let mut touching = Vec::new();
        for q in 0..ids.len() {
            if s.contains(&q) {
                continue;
            }
            let r = &hs[q] - dot(&c, &lifts[q]);
            if r.is_negative() {
                return Ok(None);
            }
            if r.is_zero() {
                touching.push(q);
            }
        }
        if !touching.is_empty() {
            let mut face: Vec<Vertex> = s.iter().chain(&touching).map(|&i| ids[i]).collect();
            face.sort_unstable();
            return Err(face);
        }
        Ok(Some(Face::new(s.iter().map(|&i| ids[i])).expect("distinct")))
    });
    let mut facets = Vec::new();
    for r in found {
        match r {
            Ok(Some(f)) => facets.push(f.into_vec()),
            Ok(None) => {}
            Err(face) => return Err(Error::NonGenericHeights(face)),
        }
    }
    let complex = Complex::new(facets)?;
    let used: BTreeMap<Vertex, Point> = complex
        .vertices()
        .iter()
        .map(|v| (*v, coords[v].clone()))
        .collect();
    realize(complex, used)
}

/// [`lower_envelope`] for points numbered `0..n`.
pub fn lower_envelope_points(points: &[Point], heights: &[Rat]) -> Result<GeometricComplex> {
    let coords = points.iter().cloned().zip(0..).map(|(p, i)| (i, p)).collect();
    let h = PLFunction::new(heights.iter().cloned().zip(0..).map(|(x, i)| (i, x)).collect());
    lower_envelope(&coords, &h)
}

/// Half the supremum of `ε > 0` keeping `base + ε·slope > 0` on every
/// constraint with positive base; `1` when nothing bounds `ε`.
fn half_supremum<'a>(pairs: impl IntoIterator<Item = (&'a Rat, &'a Rat)>) -> Rat {
    let mut sup: Option<Rat> = None;
    for (base, slope) in pairs {
        if base.is_positive() && slope.is_negative() {
            let bound = base / -slope;
            if sup.as_ref().is_none_or(|s| &bound < s) {
                sup = Some(bound);
            }
        }
    }
    match sup {
        Some(s) => s / linalg::int(2),
        None => Rat::one(),
    }
}

/// Incrementally maintained complex and heights for replaying stellar
/// steps while touching only the star of each new vertex.
struct Tracker {
    kind: Kind,
    ambient: usize,
    coords: BTreeMap<Vertex, Point>,
    facets: Vec<Option<Face>>,
    by_vertex: HashMap<Vertex, Vec<usize>>,
    heights: HashMap<Vertex, Rat>,
}

impl Tracker {
    fn new(dom: Domain, h: &PLFunction) -> Result<Tracker> {
        let mut t = Tracker {
            kind: dom.kind,
            ambient: dom.g.ambient_dim(),
            coords: dom.g.coords().clone(),
            facets: Vec::new(),
            by_vertex: HashMap::new(),
            heights: HashMap::new(),
        };
        for v in dom.g.complex().vertices() {
            t.heights.insert(*v, h.get(*v)?.clone());
        }
        for f in dom.g.facets() {
            t.add(f.clone());
        }
        Ok(t)
    }

    fn add(&mut self, f: Face) {
        let id = self.facets.len();
        for v in f.iter() {
            self.by_vertex.entry(*v).or_default().push(id);
        }
        self.facets.push(Some(f));
    }

    fn remove(&mut self, id: usize) {
        if let Some(f) = self.facets[id].take() {
            for v in f.iter() {
                if let Some(list) = self.by_vertex.get_mut(v) {
                    list.retain(|&x| x != id);
                }
            }
        }
    }

    fn containing(&self, face: &Face) -> Vec<usize> {
        let Some(shortest) = face
            .iter()
            .filter_map(|v| self.by_vertex.get(v))
            .min_by_key(|l| l.len())
        else {
            return Vec::new();
        };
        shortest
            .iter()
            .copied()
            .filter(|&i| self.facets[i].as_ref().is_some_and(|f| face.is_subset(f)))
            .collect()
    }

    /// Applies the step and returns the interpolated height at its point.
    fn stellar(&mut self, step: &StellarStep) -> std::result::Result<Rat, String> {
        let StellarStep { tau, nu, point } = step;
        if self.coords.contains_key(nu) {
            return Err(format!("vertex {nu} already exists"));
        }
        if tau.dim() < 1 {
            return Err(format!("{tau} is not a face of dimension >= 1"));
        }
        let star = self.containing(tau);
        if star.is_empty() {
            return Err(format!("{tau} is not a face"));
        }
        let pts: Vec<&Point> = tau.iter().map(|v| &self.coords[v]).collect();
        let lambda = match affine_coords(&pts, point) {
            Some(l) if l.iter().all(Signed::is_positive) => l,
            _ => return Err(format!("point is not interior to {tau}")),
        };
        let interp: Rat = tau
            .iter()
            .zip(&lambda)
            .map(|(v, l)| l * &self.heights[v])
            .sum();
        for id in star {
            let f = self.facets[id].clone().expect("live facet");
            self.remove(id);
            for t in tau.iter() {
                self.add(f.without(*t).with(*nu));
            }
        }
        self.coords.insert(*nu, point.clone());
        self.heights.insert(*nu, interp.clone());
        Ok(interp)
    }

    /// Interior walls with a facet through `nu`.
    fn walls_at(&self, nu: Vertex) -> Vec<Wall> {
        let mut out: BTreeMap<Face, Wall> = BTreeMap::new();
        for &id in &self.by_vertex[&nu] {
            let f = self.facets[id].as_ref().expect("live facet");
            for r in f.boundary() {
                if out.contains_key(&r) {
                    continue;
                }
                let others: Vec<usize> = self.containing(&r).into_iter().filter(|&j| j != id).collect();
                if let [j] = others[..] {
                    let g = self.facets[j].as_ref().expect("live facet");
                    out.insert(r.clone(), Wall::from_facets(r, f, g));
                }
            }
        }
        out.into_values().collect()
    }

    fn form(&self, wall: &Wall) -> WallForm {
        form_from(self.kind, wall.clone(), |v| self.coords[&v].clone())
    }

    /// Sets `h(nu) = interp - ε·unit` with `ε` half the largest value that
    /// keeps every positive margin through the star positive. With `strict`,
    /// every wall must end up strictly convex.
    fn descend(&mut self, nu: Vertex, unit: &Rat, strict: bool) -> std::result::Result<Rat, Error> {
        let forms: Vec<WallForm> = self.walls_at(nu).iter().map(|w| self.form(w)).collect();
        let pairs: Vec<(Rat, Rat)> = forms
            .iter()
            .map(|f| (f.eval_map(&self.heights), -f.coeff(nu) * unit))
            .collect();
        if strict {
            for (f, (base, slope)) in forms.iter().zip(&pairs) {
                if base.is_negative() || (base.is_zero() && !slope.is_positive()) {
                    return Err(Error::InvalidCertificate(format!(
                        "wall {} cannot be made strictly convex",
                        f.wall.ridge
                    )));
                }
            }
        }
        let eps = half_supremum(pairs.iter().map(|(b, s)| (b, s)));
        let h = self.heights.get_mut(&nu).expect("height set by stellar");
        *h -= &eps * unit;
        Ok(eps)
    }

    fn finish(self) -> (GeometricComplex, PLFunction) {
        let facets: Vec<Vec<Vertex>> = self.facets.into_iter().flatten().map(Face::into_vec).collect();
        let complex = Complex::new(facets).expect("stellar steps keep a valid complex");
        let coords: BTreeMap<Vertex, Point> = complex
            .vertices()
            .iter()
            .map(|v| (*v, self.coords[v].clone()))
            .collect();
        let heights = complex
            .vertices()
            .iter()
            .map(|v| (*v, self.heights[v].clone()))
            .collect();
        (
            GeometricComplex::from_parts(complex, self.ambient, coords),
            PLFunction::new(heights),
        )
    }
}

/// A certificate carried through stellar subdivisions.
#[derive(Clone, Debug)]
pub struct Transported {
    pub complex: GeometricComplex,
    pub certificate: RegularityCertificate,
    /// The amount each new vertex was pushed below the interpolated height.
    pub epsilons: Vec<Rat>,
}

/// Stellar subdivision at `tau` (point default: barycenter) with the
/// certificate extended by `h(ν) = interpolation − ε`.
pub fn transport_certificate_stellar(
    dom: Domain,
    cert: &RegularityCertificate,
    tau: &Face,
    point: Option<&Point>,
) -> Result<Transported> {
    let (_, step) = crate::subdivision::stellar(dom.g, tau, point)?;
    transport_along(dom, cert, &StellarHistory { steps: vec![step] })
}

/// Carries a valid certificate along every step of `history`.
pub fn transport_along(
    dom: Domain,
    cert: &RegularityCertificate,
    history: &StellarHistory,
) -> Result<Transported> {
    if !verify_certificate(dom, cert)? {
        return Err(Error::InvalidCertificate("margins do not verify".into()));
    }
    let mut t = Tracker::new(dom, &cert.heights)?;
    let mut epsilons = Vec::with_capacity(history.len());
    for (i, step) in history.iter().enumerate() {
        t.stellar(step)
            .map_err(|m| Error::InconsistentHistory(format!("step {i}: {m}")))?;
        epsilons.push(t.descend(step.nu, &Rat::one(), true)?);
    }
    let (complex, h) = t.finish();
    let out = Domain {
        g: &complex,
        kind: dom.kind,
    };
    let certificate = certificate_for(out, &h)?;
    if !verify_certificate(out, &certificate)? {
        return Err(Error::InvalidCertificate("transported margins do not verify".into()));
    }
    Ok(Transported {
        complex,
        certificate,
        epsilons,
    })
}

/// Output of [`build_h_claim3`].
#[derive(Clone, Debug)]
pub struct Claim3 {
    pub complex: GeometricComplex,
    pub h: PLFunction,
    /// The multiplier of `-[ν_i]*` at each step.
    pub epsilons: Vec<Rat>,
}

/// Starting from the zero function on `base`, replays `history` and after
/// each step subtracts `ε_i [ν_i]*`, with `ε_i` half the largest value that
/// keeps every strictly convex wall strictly convex. The result is strictly
/// convex on every wall not contained in a ridge of `base`.
pub fn build_h_claim3(base: Domain, history: &StellarHistory) -> Result<Claim3> {
    let zero = PLFunction::zero(base.g.complex().vertices());
    let mut t = Tracker::new(base, &zero)?;
    let mut epsilons = Vec::with_capacity(history.len());
    for (i, step) in history.iter().enumerate() {
        t.stellar(step)
            .map_err(|m| Error::InconsistentHistory(format!("step {i}: {m}")))?;
        let l = lift(t.kind, &step.point);
        epsilons.push(t.descend(step.nu, &dot(&l, &l), false)?);
    }
    let (complex, h) = t.finish();
    Ok(Claim3 {
        complex,
        h,
        epsilons,
    })
}

/// Whether a wall of `fine` lies inside a ridge of `base` (which `fine`
/// refines).
pub fn wall_in_skeleton(base: &GeometricComplex, fine: &GeometricComplex, wall: &Wall) -> bool {
    base.carrier(&fine.barycenter(&wall.ridge))
        .is_some_and(|c| c.dim() < base.dim())
}

/// `ε·h + h′` with `ε` half the largest value keeping every wall strictly
/// convex. Needs `h′` convex everywhere and strictly convex wherever `h` is
/// not.
pub fn combine(dom: Domain, h: &PLFunction, h_prime: &PLFunction) -> Result<(RegularityCertificate, Rat)> {
    let forms = wall_forms(dom)?;
    let mut pairs = Vec::with_capacity(forms.len());
    for f in &forms {
        let base = f.eval(h_prime)?;
        let slope = f.eval(h)?;
        if base.is_negative() {
            return Err(Error::NotConvex(f.wall.ridge.to_vec()));
        }
        if base.is_zero() && !slope.is_positive() {
            return Err(Error::FlatForBoth(f.wall.ridge.to_vec()));
        }
        pairs.push((base, slope));
    }
    let eps = half_supremum(pairs.iter().map(|(b, s)| (b, s)));
    let mut heights = BTreeMap::new();
    for v in dom.g.complex().vertices() {
        heights.insert(*v, &eps * h.get(*v)? + h_prime.get(*v)?);
    }
    let heights = PLFunction::new(heights);
    let margins = forms
        .iter()
        .zip(&pairs)
        .map(|(f, (b, s))| (f.wall.ridge.clone(), b + &eps * s))
        .collect();
    Ok((RegularityCertificate { heights, margins }, eps))
}

/// Interpolates `h`, given on `coarse`, at every vertex of `fine`.
pub fn interpolate_onto(coarse: &GeometricComplex, h: &PLFunction, fine: &GeometricComplex) -> Result<PLFunction> {
    let verts: Vec<(&Vertex, &Point)> = fine.coords().iter().collect();
    let vals = par::map(&verts, |(v, p)| {
        let c = coarse.carrier(p).ok_or(Error::SupportMismatch)?;
        Ok((**v, h.value_on(coarse, &c, p)?))
    });
    Ok(PLFunction::new(vals.into_iter().collect::<Result<_>>()?))
}
