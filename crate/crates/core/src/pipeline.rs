//! End-to-end constructions: making a complete fan or a triangulation of a
//! polytope regular by derived subdivision, with a certificate assembled
//! from a regular common refinement; and the dimension-two polytopality
//! shortcut.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{same_support, Fan, GeometricComplex};
use crate::linalg::{self, centroid, Point, Rat};
use crate::lp;
use crate::regularity::{
    build_h_claim3, certificate_for, combine, interpolate_onto, is_regular, lower_envelope,
    transport_along, verify_certificate, Domain, Kind, PLFunction, Regularity, RegularityCertificate,
};
use crate::subdivision::{refine_toward, refine_until, StellarHistory};

/// Every choice made by a pipeline run, enough to replay and audit it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    /// Subdivision of the regular starting complex toward the input.
    pub refine_regular: StellarHistory,
    /// Amount each new vertex was pushed down while carrying the
    /// certificate through `refine_regular`.
    pub transport_epsilons: Vec<Rat>,
    /// Derived subdivisions of the input refining the regular complex.
    pub refine_input: StellarHistory,
    /// Multipliers of the negated star functions along `refine_input`.
    pub claim3_epsilons: Vec<Rat>,
    /// Weight of the accumulated function in the final sum.
    pub combine_epsilon: Rat,
}

impl Trace {
    fn regular_input() -> Trace {
        Trace {
            combine_epsilon: Rat::zero(),
            ..Trace::default()
        }
    }

    /// Every epsilon chosen during the run.
    pub fn epsilons(&self) -> impl Iterator<Item = &Rat> {
        self.transport_epsilons
            .iter()
            .chain(&self.claim3_epsilons)
            .chain(std::iter::once(&self.combine_epsilon))
    }
}

/// Result of [`make_fan_regular`].
#[derive(Clone, Debug)]
pub struct FanOutcome {
    /// Number of derived subdivisions applied to the input.
    pub m: usize,
    pub fan: Fan,
    pub certificate: RegularityCertificate,
    /// The point of the input moved to the origin.
    pub center: Point,
    pub trace: Trace,
}

/// Result of [`make_regular_triangulation`].
#[derive(Clone, Debug)]
pub struct TriangulationOutcome {
    pub k: usize,
    pub complex: GeometricComplex,
    pub certificate: RegularityCertificate,
    /// Heights of the lower envelope used as the regular starting point
    /// (empty when the input was already regular).
    pub start_heights: PLFunction,
    pub trace: Trace,
}

/// Vertices of `g` that are not convex combinations of the others.
fn extreme_vertices(g: &GeometricComplex) -> Vec<Vertex> {
    let verts: Vec<(&Vertex, &Point)> = g.coords().iter().collect();
    let n = g.ambient_dim();
    verts
        .iter()
        .filter(|(v, p)| {
            let others: Vec<&Point> = verts.iter().filter(|(u, _)| u != v).map(|(_, q)| *q).collect();
            let mut rows: Vec<Vec<Rat>> = (0..n)
                .map(|k| others.iter().map(|q| q[k].clone()).collect())
                .collect();
            rows.push(vec![Rat::one(); others.len()]);
            let mut rhs = p.to_vec();
            rhs.push(Rat::one());
            others.is_empty() || lp::feasible_point(&rows, &rhs).is_err()
        })
        .map(|(v, _)| **v)
        .collect()
}

/// Makes the fan over a subdivided simplex boundary regular.
///
/// `sigma` must be a geometric subdivision of the boundary of a
/// `(d+1)`-simplex in `R^{d+1}`. The simplex is recovered from the extreme
/// vertices and its vertex average becomes the origin. A subdivision of
/// the simplex boundary refining `sigma`, built by adapted stellar steps,
/// inherits the all-ones certificate of the simplex fan; derived
/// subdivisions of `sigma` then refine it, and the accumulated star
/// functions plus the interpolated refinement certificate give the result.
pub fn make_fan_regular(sigma: &GeometricComplex) -> Result<FanOutcome> {
    let n = sigma.ambient_dim();
    let bad = |m: &str| Error::NotSimplexBoundarySubdivision(m.to_string());
    if sigma.dim() + 1 != n as i64 || !sigma.complex().is_pure() {
        return Err(bad("expected a pure complex of codimension one"));
    }
    let corners = extreme_vertices(sigma);
    let corner_pts: Vec<&Point> = corners.iter().map(|v| sigma.coord(*v)).collect();
    if corners.len() != n + 1 || !linalg::affinely_independent(&corner_pts) {
        return Err(bad("extreme vertices do not form a full simplex"));
    }
    let reference = GeometricComplex::from_parts(
        Complex::simplex_boundary(corners.iter().copied())?,
        n,
        corners.iter().map(|v| (*v, sigma.coord(*v).clone())).collect(),
    );
    if !same_support(sigma, &reference)? {
        return Err(bad("support differs from the simplex boundary"));
    }
    let center = centroid(corner_pts.iter().copied());
    let shift: Point = center.iter().map(|x| -x).collect();
    let sigma0 = sigma.translate(&shift);
    let reference = reference.translate(&shift);
    let input_fan = Fan::new(sigma0.clone())?;
    let ref_dom = Domain::fan_sphere(&reference);

    let ones = PLFunction::new(corners.iter().map(|v| (*v, Rat::one())).collect());
    let base_cert = certificate_for(ref_dom, &ones)?;
    let (m, complex, certificate, trace) = assemble(input_fan.sphere(), &reference, base_cert, Kind::Fan)?;
    let fan = Fan::new(complex)?;
    Ok(FanOutcome {
        m,
        fan,
        certificate,
        center,
        trace,
    })
}

/// Shared tail of both pipelines. `start` is regular with `start_cert`,
/// shares the support of `input`, and is subdivided toward `input`.
fn assemble(
    input: &GeometricComplex,
    start: &GeometricComplex,
    start_cert: RegularityCertificate,
    kind: Kind,
) -> Result<(usize, GeometricComplex, RegularityCertificate, Trace)> {
    let start_dom = Domain::new(start, kind);
    // a regular subdivision of the start that refines the input
    let (_, toward) = refine_toward(start, input)?;
    let carried = transport_along(start_dom, &start_cert, &toward)?;
    let refined = carried.complex;
    // derived subdivisions of the input refining that
    let back = refine_until(input, &refined)?;
    if back.k > back.bound {
        return Err(Error::RefinementBoundExceeded {
            k: back.k,
            bound: back.bound,
        });
    }
    let claim3 = build_h_claim3(Domain::new(input, kind), &back.history)?;
    if claim3.complex != back.complex {
        return Err(Error::InconsistentHistory("replayed complex differs".into()));
    }
    let final_complex = back.complex;
    let h_prime = interpolate_onto(&refined, &carried.certificate.heights, &final_complex)?;
    let dom = Domain::new(&final_complex, kind);
    let (cert, eps) = combine(dom, &claim3.h, &h_prime)?;
    if !verify_certificate(dom, &cert)? {
        return Err(Error::InvalidCertificate("assembled certificate does not verify".into()));
    }
    let trace = Trace {
        refine_regular: toward,
        transport_epsilons: carried.epsilons,
        refine_input: back.history,
        claim3_epsilons: claim3.epsilons,
        combine_epsilon: eps,
    };
    Ok((back.k, final_complex, cert, trace))
}

/// Bounded-denominator rational heights from a seeded ChaCha stream.
fn random_heights(rng: &mut ChaCha8Rng, vertices: &[Vertex]) -> PLFunction {
    const DEN: i64 = 64;
    const RANGE: i64 = 1 << 20;
    PLFunction::new(
        vertices
            .iter()
            .map(|v| {
                let num = rng.gen_range(-RANGE..=RANGE);
                (*v, Rat::new(BigInt::from(num), BigInt::from(DEN)))
            })
            .collect(),
    )
}

/// Attempts at drawing generic heights before giving up.
pub const GENERIC_RETRIES: usize = 16;

/// Makes a triangulation of a convex polytope regular by derived
/// subdivision. Already regular inputs return `k = 0` unchanged, with the
/// certificate from the exact decision.
pub fn make_regular_triangulation(t: &GeometricComplex, seed: u64) -> Result<TriangulationOutcome> {
    let dom = Domain::triangulation(t);
    if let Regularity::Regular(certificate) = is_regular(dom)? {
        return Ok(TriangulationOutcome {
            k: 0,
            complex: t.clone(),
            certificate,
            start_heights: PLFunction::default(),
            trace: Trace::regular_input(),
        });
    }
    let verts: Vec<Vertex> = t.complex().vertices().iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for _ in 0..GENERIC_RETRIES {
        let h = random_heights(&mut rng, &verts);
        match lower_envelope(t.coords(), &h) {
            Ok(g) => {
                found = Some((g, h));
                break;
            }
            Err(Error::NonGenericHeights(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (start, heights) = found.ok_or(Error::GenericityRetriesExhausted(GENERIC_RETRIES))?;
    if start.volume() != t.volume() {
        return Err(Error::NonConvexSupport);
    }
    let used: BTreeMap<Vertex, Rat> = start
        .complex()
        .vertices()
        .iter()
        .map(|v| (*v, heights.heights[v].clone()))
        .collect();
    let start_cert = certificate_for(Domain::triangulation(&start), &PLFunction::new(used))?;
    let (k, complex, certificate, trace) = assemble(t, &start, start_cert, Kind::Triangulation)?;
    Ok(TriangulationOutcome {
        k,
        complex,
        certificate,
        start_heights: heights,
        trace,
    })
}

/// Returns 0 for a simplicial 2-sphere: such a complex is the boundary of a
/// 3-polytope, so no subdivision is needed to realize it regularly.
pub fn polytopality_dim2(c: &Complex) -> Result<usize> {
    let fail = |m: String| Err(Error::NotTwoSphere(m));
    if c.dim() != 2 {
        return fail(format!("dimension is {}", c.dim()));
    }
    if !c.is_pure() {
        return fail("not pure".into());
    }
    for (edge, fs) in c.ridge_incidence()? {
        if fs.len() != 2 {
            return fail(format!("edge {edge} lies in {} triangles", fs.len()));
        }
    }
    for &v in c.vertices() {
        let link = c.link(&Face::vertex(v))?;
        let mut degree: BTreeMap<Vertex, usize> = BTreeMap::new();
        for e in link.facets() {
            for u in e.iter() {
                *degree.entry(*u).or_default() += 1;
            }
        }
        if link.dim() != 1 || degree.values().any(|&d| d != 2) || !link.is_connected() {
            return fail(format!("link of vertex {v} is not a single cycle"));
        }
    }
    let chi = c.euler_characteristic();
    if chi != 2 {
        return fail(format!("Euler characteristic is {chi}, not 2"));
    }
    if !c.is_connected() {
        return fail("not connected".into());
    }
    Ok(0)
}
