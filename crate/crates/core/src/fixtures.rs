//! Small named complexes used by tests, benches, and the command-line
//! samples.

use std::collections::BTreeMap;

use crate::complex::{Complex, Vertex};
use crate::geometry::{realize, Fan, GeometricComplex};
use crate::linalg::{point, Point};

fn build(facets: &[&[Vertex]], pts: &[&[i64]]) -> GeometricComplex {
    let c = Complex::new(facets.iter().map(|f| f.to_vec())).expect("valid facets");
    let coords: BTreeMap<Vertex, Point> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (i as Vertex, point(p)))
        .collect();
    realize(c, coords).expect("valid embedding")
}

/// A path on the real line through the given increasing coordinates, with
/// vertex `i` at `xs[i]`.
pub fn segment(xs: &[i64]) -> GeometricComplex {
    let facets: Vec<Vec<Vertex>> = (1..xs.len() as Vertex).map(|i| vec![i - 1, i]).collect();
    let refs: Vec<&[Vertex]> = facets.iter().map(|f| f.as_slice()).collect();
    let pts: Vec<[i64; 1]> = xs.iter().map(|&x| [x]).collect();
    let prefs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
    build(&refs, &prefs)
}

/// `[0,2]` split at 1.
pub fn segment_split() -> GeometricComplex {
    segment(&[0, 1, 2])
}

/// The triangle `(0,0), (1,0), (0,1)`.
pub fn filled_triangle() -> GeometricComplex {
    build(&[&[0, 1, 2]], &[&[0, 0], &[1, 0], &[0, 1]])
}

/// The two triangulations of the unit square with corners
/// `0:(0,0), 1:(1,0), 2:(0,1), 3:(1,1)`: diagonal `{0,3}`, then `{1,2}`.
pub fn square_triangulations() -> (GeometricComplex, GeometricComplex) {
    let pts: [&[i64]; 4] = [&[0, 0], &[1, 0], &[0, 1], &[1, 1]];
    (
        build(&[&[0, 1, 3], &[0, 2, 3]], &pts),
        build(&[&[0, 1, 2], &[1, 2, 3]], &pts),
    )
}

/// Boundary of the standard tetrahedron `0, e1, e2, e3`.
pub fn tetra_boundary_geometric() -> GeometricComplex {
    build(
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
    )
}

/// Boundary of a regular tetrahedron centred at the origin.
pub fn tetra_centered() -> GeometricComplex {
    build(
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        &[&[1, 1, 1], &[1, -1, -1], &[-1, 1, -1], &[-1, -1, 1]],
    )
}

pub fn tetra_fan() -> Fan {
    Fan::new(tetra_centered()).expect("centred tetrahedron")
}

/// Octahedron with `0:e1, 1:-e1, 2:e2, 3:-e2, 4:e3, 5:-e3`.
pub fn octahedron() -> GeometricComplex {
    let mut facets = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                facets.push([a, b, c]);
            }
        }
    }
    let refs: Vec<&[Vertex]> = facets.iter().map(|f| f.as_slice()).collect();
    build(
        &refs,
        &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]],
    )
}

/// The fan of coordinate orthants.
pub fn octahedron_fan() -> Fan {
    Fan::new(octahedron()).expect("octahedron is star-shaped")
}

/// A non-regular triangulation of the triangle `(0,0), (4,0), (0,4)` with
/// inner points `(1,1), (2,1), (1,2)`: each outer vertex is joined to a
/// rotated pair of inner ones.
pub fn spiral6() -> GeometricComplex {
    build(
        &[&[3, 4, 5], &[0, 1, 4], &[1, 2, 5], &[0, 2, 3], &[0, 3, 4], &[1, 4, 5], &[2, 3, 5]],
        &[&[0, 0], &[4, 0], &[0, 4], &[1, 1], &[2, 1], &[1, 2]],
    )
}

/// The same six points triangulated by the mirror-image spiral, also
/// non-regular.
pub fn spiral6_mirror() -> GeometricComplex {
    build(
        &[&[3, 4, 5], &[0, 1, 3], &[1, 2, 4], &[0, 2, 5], &[1, 3, 4], &[2, 4, 5], &[0, 3, 5]],
        &[&[0, 0], &[4, 0], &[0, 4], &[1, 1], &[2, 1], &[1, 2]],
    )
}

/// The complete fan in the plane over an affinely regular hexagon.
pub fn hexagon_fan() -> Fan {
    let facets: Vec<[Vertex; 2]> = (0..6).map(|i| [i, (i + 1) % 6]).collect();
    let refs: Vec<&[Vertex]> = facets.iter().map(|f| f.as_slice()).collect();
    Fan::new(build(
        &refs,
        &[&[1, 0], &[1, 1], &[0, 1], &[-1, 0], &[-1, -1], &[0, -1]],
    ))
    .expect("hexagon is star-shaped")
}

/// Seven-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn torus7() -> Complex {
    let mut facets = Vec::new();
    for i in 0..7u32 {
        facets.push([i, (i + 1) % 7, (i + 3) % 7]);
        facets.push([i, (i + 2) % 7, (i + 3) % 7]);
    }
    Complex::new(facets).expect("valid facets")
}

/// The boundary of the bipyramid over an `n`-gon; apexes are `n` and `n+1`.
pub fn bipyramid(n: Vertex) -> Complex {
    let mut facets = Vec::new();
    for i in 0..n {
        for apex in [n, n + 1] {
            facets.push([i, (i + 1) % n, apex]);
        }
    }
    Complex::new(facets).expect("valid facets")
}
