use thiserror::Error;

use crate::complex::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a complex needs at least one facet")]
    NoFacets,
    #[error("empty facet")]
    EmptyFacet,
    #[error("facet {facet:?} repeats vertex {vertex}")]
    RepeatedVertex { facet: Vec<Vertex>, vertex: Vertex },
    #[error("{0:?} is not a face of the complex")]
    NotAFace(Vec<Vertex>),
    #[error("complex is not pure")]
    NotPure,
    #[error("ridge {ridge:?} lies in {count} facets")]
    NotPseudomanifold { ridge: Vec<Vertex>, count: usize },

    #[error("no coordinates for vertex {0}")]
    MissingCoordinates(Vertex),
    #[error("vertex {vertex} has {found} coordinates, expected {expected}")]
    CoordinateLength {
        vertex: Vertex,
        expected: usize,
        found: usize,
    },
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("facet {0:?} is affinely dependent")]
    DegenerateFacet(Vec<Vertex>),
    #[error("faces {0:?} and {1:?} overlap")]
    OverlappingFaces(Vec<Vertex>, Vec<Vertex>),
    #[error("not a star-shaped sphere around the origin: {0}")]
    NotStarShaped(String),

    #[error("stellar subdivision at a vertex is the identity; pass a face of dimension >= 1")]
    StellarAtVertex,
    #[error("point is not in the relative interior of {0:?}")]
    NotInRelativeInterior(Vec<Vertex>),
    #[error("complexes have different supports")]
    SupportMismatch,
    #[error("refinement needed k = {k} rounds, above the bound |f| = {bound}")]
    RefinementBoundExceeded { k: usize, bound: usize },

    #[error("complex of dimension {dim} in R^{ambient} is not full-dimensional")]
    NotFullDimensional { dim: i64, ambient: usize },
    #[error("wall {0:?} is a boundary ridge")]
    BoundaryWall(Vec<Vertex>),
    #[error("no height for vertex {0}")]
    MissingHeight(Vertex),
    #[error("certificate rejected: {0}")]
    InvalidCertificate(String),
    #[error("lifted points have a non-simplicial lower facet {0:?}; re-randomize the heights")]
    NonGenericHeights(Vec<Vertex>),
    #[error("points do not affinely span their ambient space")]
    DegeneratePointSet,
    #[error("vertex {0} is not a ray of the fan")]
    NotARay(Vertex),
    #[error("history does not replay on the base complex: {0}")]
    InconsistentHistory(String),
    #[error("wall {0:?} is flat for both functions")]
    FlatForBoth(Vec<Vertex>),
    #[error("second function is concave across wall {0:?}")]
    NotConvex(Vec<Vertex>),

    #[error("support is not convex")]
    NonConvexSupport,
    #[error("input is not a subdivision of a simplex boundary: {0}")]
    NotSimplexBoundarySubdivision(String),
    #[error("no generic heights found after {0} attempts")]
    GenericityRetriesExhausted(usize),
    #[error("not a 2-sphere: {0}")]
    NotTwoSphere(String),
    #[error("vertex {0} has different coordinates in the two configurations")]
    ConfigurationMismatch(Vertex),
    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),
}
