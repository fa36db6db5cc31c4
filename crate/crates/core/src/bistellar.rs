//! Bistellar (Pachner) moves on pure complexes, verification of move
//! sequences, and a breadth-first flip search over a fixed point
//! configuration.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::geometry::GeometricComplex;
use crate::iso;
use crate::linalg::{self, Point};

/// Replaces `A * ∂B` by `∂A * B`. For a `d`-complex `|A| + |B| = d + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub a: Face,
    pub b: Face,
}

impl Move {
    pub fn new(a: Face, b: Face) -> Move {
        Move { a, b }
    }

    /// The move undoing this one.
    pub fn inverse(&self) -> Move {
        Move {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// `(|A|, |B|)`, e.g. `(2, 2)` for an edge flip in the plane.
    pub fn kind(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.a, self.b)
    }
}

/// Applies `m` to `c`: the facets containing `A` must be exactly
/// `A ∪ (B \ b)` for `b ∈ B`, and `B` must not already be a face.
pub fn apply_move(c: &Complex, m: &Move) -> Result<Complex> {
    let fail = |s: String| Err(Error::MoveNotApplicable(s));
    if !c.is_pure() {
        return fail("complex is not pure".into());
    }
    let d = c.dim();
    if m.a.is_empty() || m.b.is_empty() {
        return fail("both sides of a move must be nonempty".into());
    }
    if (m.a.len() + m.b.len()) as i64 != d + 2 {
        return fail(format!(
            "|A| + |B| = {} but the complex has dimension {d}",
            m.a.len() + m.b.len()
        ));
    }
    if !m.a.intersection(&m.b).is_empty() {
        return fail("A and B share vertices".into());
    }
    if !c.has_face(&m.a) {
        return fail(format!("A = {} is not a face", m.a));
    }
    if c.has_face(&m.b) {
        return fail(format!("B = {} is already a face", m.b));
    }
    let star: Vec<Face> = c.facets_containing(&m.a).cloned().collect();
    let mut expected: Vec<Face> = m.b.iter().map(|&v| m.a.union(&m.b.without(v))).collect();
    expected.sort();
    let mut found = star.clone();
    found.sort();
    if found != expected {
        return fail(format!("the star of A = {} is not A * ∂B", m.a));
    }
    let mut facets: Vec<Face> = c
        .facets()
        .iter()
        .filter(|f| !m.a.is_subset(f))
        .cloned()
        .collect();
    facets.extend(m.a.iter().map(|&v| m.a.without(v).union(&m.b)));
    Complex::new(facets.into_iter().map(Face::into_vec))
}

/// Outcome of [`verify_sequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceCheck {
    /// Every move applied and the result is isomorphic to the target.
    Connects,
    /// Move `index` could not be applied.
    MoveFailed { index: usize, reason: String },
    /// All moves applied but the result is not isomorphic to the target.
    WrongEnd,
}

impl SequenceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, SequenceCheck::Connects)
    }
}

/// Folds `moves` over `t0` and compares the result with `t1` up to
/// isomorphism.
pub fn verify_sequence(t0: &Complex, t1: &Complex, moves: &[Move]) -> SequenceCheck {
    let mut cur = t0.clone();
    for (index, m) in moves.iter().enumerate() {
        match apply_move(&cur, m) {
            Ok(next) => cur = next,
            Err(e) => {
                return SequenceCheck::MoveFailed {
                    index,
                    reason: e.to_string(),
                }
            }
        }
    }
    if iso::isomorphic(&cur, t1).is_some() {
        SequenceCheck::Connects
    } else {
        SequenceCheck::WrongEnd
    }
}

/// Whether `m` is realized on `coords`: the points of `A ∪ B` form a
/// circuit whose unique affine dependence is positive on one side and
/// negative on the other, so both `A * ∂B` and `∂A * B` triangulate the
/// same polytope.
pub fn is_geometric(coords: &BTreeMap<Vertex, Point>, m: &Move) -> bool {
    let z: Vec<Vertex> = m.a.iter().chain(m.b.iter()).copied().collect();
    let Some(first) = z.first().and_then(|v| coords.get(v)) else {
        return false;
    };
    let n = first.len();
    if z.len() != n + 2 || z.iter().any(|v| !coords.contains_key(v)) {
        return false;
    }
    let cols: Vec<Point> = z.iter().map(|v| linalg::homogenize(&coords[v])).collect();
    let rows: Vec<Vec<_>> = (0..=n)
        .map(|k| cols.iter().map(|c| c[k].clone()).collect())
        .collect();
    let Some(lambda) = linalg::kernel_line(&rows) else {
        return false;
    };
    if lambda.iter().any(Zero::is_zero) {
        return false;
    }
    let (la, lb) = lambda.split_at(m.a.len());
    let sa = la[0].is_positive();
    la.iter().all(|x| x.is_positive() == sa) && lb.iter().all(|x| x.is_positive() != sa)
}

/// Limits for [`connect_bruteforce`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Distinct triangulations the search may visit.
    pub states: usize,
    /// Upper bound on the vertex count of any intermediate triangulation.
    pub max_vertices: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            states: 10_000,
            max_vertices: usize::MAX,
        }
    }
}

/// Counters reported by [`connect_bruteforce`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub visited: usize,
    pub max_frontier: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    /// A shortest move sequence, or `None` if the budget ran out first.
    pub moves: Option<Vec<Move>>,
    pub stats: SearchStats,
}

/// Breadth-first search from `t0` to `t1` over geometric bistellar moves on
/// the union of their vertex coordinates: flips, insertions of unused
/// configuration points interior to a facet, and removals. Moves are
/// expanded in a fixed order, so the result is deterministic.
pub fn connect_bruteforce(
    t0: &GeometricComplex,
    t1: &GeometricComplex,
    budget: Budget,
) -> Result<Connection> {
    if t0.ambient_dim() != t1.ambient_dim() {
        return Err(Error::AmbientMismatch(t0.ambient_dim(), t1.ambient_dim()));
    }
    let mut coords = t0.coords().clone();
    for (v, p) in t1.coords() {
        match coords.get(v) {
            Some(q) if q != p => return Err(Error::ConfigurationMismatch(*v)),
            Some(_) => {}
            None => {
                coords.insert(*v, p.clone());
            }
        }
    }
    for g in [t0, t1] {
        if g.dim() != g.ambient_dim() as i64 {
            return Err(Error::NotFullDimensional {
                dim: g.dim(),
                ambient: g.ambient_dim(),
            });
        }
    }
    let target = t1.complex().facets().to_vec();
    let start = t0.complex().clone();
    let mut stats = SearchStats::default();
    let mut parent: HashMap<Vec<Face>, Option<(Vec<Face>, Move)>> = HashMap::new();
    parent.insert(start.facets().to_vec(), None);
    let mut queue = VecDeque::from([start]);
    stats.visited = 1;
    while let Some(cur) = queue.pop_front() {
        if cur.facets() == target.as_slice() {
            return Ok(Connection {
                moves: Some(path_to(&parent, target)),
                stats,
            });
        }
        for m in geometric_moves(&cur, &coords) {
            let next = apply_move(&cur, &m)?;
            if next.vertices().len() > budget.max_vertices {
                continue;
            }
            let key = next.facets().to_vec();
            if parent.contains_key(&key) {
                continue;
            }
            if stats.visited == budget.states {
                return Ok(Connection { moves: None, stats });
            }
            parent.insert(key, Some((cur.facets().to_vec(), m)));
            stats.visited += 1;
            queue.push_back(next);
        }
        stats.max_frontier = stats.max_frontier.max(queue.len());
    }
    Ok(Connection { moves: None, stats })
}

fn path_to(parent: &HashMap<Vec<Face>, Option<(Vec<Face>, Move)>>, end: Vec<Face>) -> Vec<Move> {
    let mut moves = Vec::new();
    let mut key = end;
    while let Some(Some((prev, m))) = parent.get(&key) {
        moves.push(m.clone());
        key = prev.clone();
    }
    moves.reverse();
    moves
}

/// Every geometric move applicable to `c` on `coords`, in a fixed order:
/// flips and removals by face, then insertions by vertex id.
pub fn geometric_moves(c: &Complex, coords: &BTreeMap<Vertex, Point>) -> Vec<Move> {
    let d = c.dim();
    let mut moves = Vec::new();
    for a in c.faces() {
        if a.dim() >= d {
            continue;
        }
        let star: Vec<&Face> = c.facets_containing(&a).collect();
        let b = star
            .iter()
            .fold(Face::empty(), |acc, f| acc.union(&f.difference(&a)));
        if (a.len() + b.len()) as i64 != d + 2 || star.len() != b.len() || c.has_face(&b) {
            continue;
        }
        let m = Move::new(a, b);
        if is_geometric(coords, &m) {
            moves.push(m);
        }
    }
    let Some(ambient) = coords.values().next().map(Vec::len) else {
        return moves;
    };
    let used = c
        .vertices()
        .iter()
        .filter_map(|v| Some((*v, coords.get(v)?.clone())))
        .collect();
    let g = GeometricComplex::from_parts(c.clone(), ambient, used);
    for (v, p) in coords {
        if c.vertices().contains(v) {
            continue;
        }
        if let Some(f) = g.carrier(p).filter(|f| f.dim() == d) {
            moves.push(Move::new(f, Face::vertex(*v)));
        }
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::point;

    fn square() -> (Complex, Complex) {
        let (a, b) = fixtures::square_triangulations();
        (a.complex().clone(), b.complex().clone())
    }

    fn face(v: &[Vertex]) -> Face {
        Face::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn one_to_three_is_stellar() {
        let t = Complex::new([vec![0, 1, 2]]).unwrap();
        let m = Move::new(face(&[0, 1, 2]), face(&[3]));
        let r = apply_move(&t, &m).unwrap();
        assert_eq!(r.facets().len(), 3);
        assert_eq!(r, t.stellar(&face(&[0, 1, 2]), 3).unwrap());
        assert_eq!(apply_move(&r, &m.inverse()).unwrap(), t);
    }

    #[test]
    fn diagonal_flip() {
        let (s1, s2) = square();
        let m = Move::new(face(&[0, 3]), face(&[1, 2]));
        assert_eq!(apply_move(&s1, &m).unwrap(), s2);
        assert_eq!(apply_move(&s2, &m.inverse()).unwrap(), s1);
        // B is already an edge of s2
        let e = apply_move(&s2, &m).unwrap_err();
        assert!(matches!(e, Error::MoveNotApplicable(_)));
    }

    #[test]
    fn applicability_conditions() {
        let (s1, _) = square();
        for m in [
            Move::new(face(&[0, 1]), face(&[2, 3])),
            Move::new(face(&[0, 3]), face(&[1])),
            Move::new(face(&[5, 6]), face(&[1, 2])),
        ] {
            assert!(apply_move(&s1, &m).is_err(), "{m}");
        }
    }

    #[test]
    fn sequence_verification() {
        let (s1, s2) = square();
        let flip = Move::new(face(&[0, 3]), face(&[1, 2]));
        assert!(verify_sequence(&s1, &s1, &[]).holds());
        assert!(verify_sequence(&s1, &s2, std::slice::from_ref(&flip)).holds());
        let bad = [flip.clone(), flip.clone(), flip.inverse()];
        assert!(matches!(
            verify_sequence(&s1, &s2, &bad),
            SequenceCheck::MoveFailed { index: 1, .. }
        ));
        let fan = Complex::new([vec![0, 1, 4], vec![1, 3, 4], vec![0, 3, 4]]).unwrap();
        assert_eq!(verify_sequence(&s1, &fan, &[]), SequenceCheck::WrongEnd);
    }

    #[test]
    fn circuit_signs() {
        let (g, _) = fixtures::square_triangulations();
        let flip = Move::new(face(&[0, 3]), face(&[1, 2]));
        assert!(is_geometric(g.coords(), &flip));
        // edge {0,1} and {2,3} do not cross
        assert!(!is_geometric(g.coords(), &Move::new(face(&[0, 1]), face(&[2, 3]))));
        let mut coords = g.coords().clone();
        coords.insert(4, point(&[2, 1]).into_iter().map(|x| x / linalg::int(3)).collect());
        assert!(is_geometric(&coords, &Move::new(face(&[0, 1, 3]), face(&[4]))));
        assert!(!is_geometric(&coords, &Move::new(face(&[0, 2, 3]), face(&[4]))));
    }

    #[test]
    fn square_connects_in_one_flip() {
        let (a, b) = fixtures::square_triangulations();
        let r = connect_bruteforce(&a, &b, Budget::default()).unwrap();
        assert_eq!(r.moves, Some(vec![Move::new(face(&[0, 3]), face(&[1, 2]))]));
        let same = connect_bruteforce(&a, &a, Budget::default()).unwrap();
        assert_eq!(same.moves, Some(vec![]));
    }

    #[test]
    fn budget_exhaustion_reports_stats() {
        let (a, b) = fixtures::square_triangulations();
        let r = connect_bruteforce(&a, &b, Budget { states: 1, max_vertices: 4 }).unwrap();
        assert_eq!(r.moves, None);
        assert_eq!(r.stats.visited, 1);
    }
}
