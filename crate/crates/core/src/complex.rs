//! Abstract simplicial complexes stored by their facets.
//!
//! Only inclusion-maximal faces are kept; every other face is enumerated on
//! demand. Vertex IDs are opaque `u32`s.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// A simplex as a sorted set of vertex IDs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face(Vec<Vertex>);

impl Face {
    /// Sorts the vertices; fails on repeats.
    pub fn new<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Face> {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedVertex {
                facet: v.clone(),
                vertex: w[0],
            });
        }
        Ok(Face(v))
    }

    pub(crate) fn from_sorted(v: Vec<Vertex>) -> Face {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Face(v)
    }

    pub fn empty() -> Face {
        Face(Vec::new())
    }

    pub fn vertex(v: Vertex) -> Face {
        Face(vec![v])
    }

    pub fn dim(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn union(&self, other: &Face) -> Face {
        let mut v: Vec<Vertex> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Face(v)
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn difference(&self, other: &Face) -> Face {
        Face(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn without(&self, v: Vertex) -> Face {
        Face(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    pub fn with(&self, v: Vertex) -> Face {
        let mut out = self.0.clone();
        if let Err(pos) = out.binary_search(&v) {
            out.insert(pos, v);
        }
        Face(out)
    }

    /// All nonempty subsets, including the face itself.
    pub fn subfaces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.0.len();
        assert!(n < 32, "face too large for subset enumeration");
        (1u32..(1u32 << n)).map(move |mask| {
            Face(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }

    /// Codimension-one subfaces (empty for a vertex).
    pub fn boundary(&self) -> impl Iterator<Item = Face> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Face(v)
        })
    }
}

impl Deref for Face {
    type Target = [Vertex];
    fn deref(&self) -> &[Vertex] {
        &self.0
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Face counts `f_0..f_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FVector(pub Vec<u64>);

impl FVector {
    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// `f_{-1} = 1` prepended.
    pub fn with_empty(&self) -> Vec<u64> {
        std::iter::once(1).chain(self.0.iter().copied()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// `|f|`, the number of nonempty faces.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    facets: Vec<Face>,
    vertices: BTreeSet<Vertex>,
}

/// Result of [`Complex::join`]: the right operand's vertices may have been
/// renamed to keep the two vertex sets disjoint.
#[derive(Clone, Debug)]
pub struct Join {
    pub complex: Complex,
    pub right_relabel: BTreeMap<Vertex, Vertex>,
}

impl Complex {
    /// Validates and builds a complex from a facet list. Duplicates and
    /// non-maximal entries are dropped.
    pub fn new<I, F>(facets: I) -> Result<Complex>
    where
        I: IntoIterator<Item = F>,
        F: IntoIterator<Item = Vertex>,
    {
        let mut list = Vec::new();
        for f in facets {
            let face = Face::new(f)?;
            if face.is_empty() {
                return Err(Error::EmptyFacet);
            }
            list.push(face);
        }
        if list.is_empty() {
            return Err(Error::NoFacets);
        }
        Ok(Complex::from_faces(list))
    }

    /// The complex whose only face is the empty face (the (-1)-sphere).
    pub fn empty_face() -> Complex {
        Complex {
            facets: vec![Face::empty()],
            vertices: BTreeSet::new(),
        }
    }

    /// A single simplex with all its faces.
    pub fn simplex<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Complex> {
        Complex::new([vertices])
    }

    /// Boundary of the simplex on `n` given vertices.
    pub fn simplex_boundary<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Complex> {
        let face = Face::new(vertices)?;
        if face.len() < 2 {
            return Ok(Complex::empty_face());
        }
        Ok(Complex::from_facets_unchecked(face.boundary().collect()))
    }

    /// Keeps only inclusion-maximal faces. Empty faces are dropped unless
    /// nothing else remains.
    pub(crate) fn from_faces(list: Vec<Face>) -> Complex {
        let mut uniq: Vec<Face> = list
            .into_iter()
            .filter(|f| !f.is_empty())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if uniq.is_empty() {
            return Complex::empty_face();
        }
        let sizes: BTreeSet<usize> = uniq.iter().map(|f| f.len()).collect();
        if sizes.len() > 1 {
            let mut by_vertex: HashMap<Vertex, Vec<usize>> = HashMap::new();
            for (i, f) in uniq.iter().enumerate() {
                for &v in f.iter() {
                    by_vertex.entry(v).or_default().push(i);
                }
            }
            let keep: Vec<bool> = uniq
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    !by_vertex[&f[0]]
                        .iter()
                        .any(|&j| j != i && uniq[j].len() > f.len() && f.is_subset(&uniq[j]))
                })
                .collect();
            let mut k = keep.into_iter();
            uniq.retain(|_| k.next().unwrap());
        }
        Complex::from_facets_unchecked(uniq)
    }

    /// Caller guarantees the list is an antichain of nonempty faces.
    pub(crate) fn from_facets_unchecked(mut facets: Vec<Face>) -> Complex {
        facets.sort();
        facets.dedup();
        let vertices = facets.iter().flat_map(|f| f.iter().copied()).collect();
        Complex { facets, vertices }
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.vertices.iter().next_back().copied()
    }

    pub fn dim(&self) -> i64 {
        self.facets.iter().map(Face::dim).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.facets.iter().all(|f| f.dim() == d)
    }

    pub fn is_empty_face_only(&self) -> bool {
        self.facets.len() == 1 && self.facets[0].is_empty()
    }

    pub fn has_face(&self, face: &Face) -> bool {
        self.facets.iter().any(|f| face.is_subset(f))
    }

    /// Every nonempty face.
    pub fn faces(&self) -> BTreeSet<Face> {
        let mut seen = HashSet::new();
        for f in &self.facets {
            for s in f.subfaces() {
                seen.insert(s);
            }
        }
        seen.into_iter().collect()
    }

    pub fn faces_of_dim(&self, k: usize) -> BTreeSet<Face> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            if f.len() > k {
                for s in f.subfaces().filter(|s| s.len() == k + 1) {
                    out.insert(s);
                }
            }
        }
        out
    }

    pub fn f_vector(&self) -> FVector {
        let d = self.dim();
        if d < 0 {
            return FVector(Vec::new());
        }
        let mut counts = vec![0u64; d as usize + 1];
        for f in self.faces() {
            counts[f.len() - 1] += 1;
        }
        FVector(counts)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().euler_characteristic()
    }

    /// `|f|`: the total number of nonempty faces.
    pub fn total_faces(&self) -> usize {
        self.f_vector().total() as usize
    }

    /// Facets containing `face`.
    pub fn facets_containing<'a>(&'a self, face: &'a Face) -> impl Iterator<Item = &'a Face> + 'a {
        self.facets.iter().filter(move |f| face.is_subset(f))
    }

    pub fn link(&self, face: &Face) -> Result<Complex> {
        let parts: Vec<Face> = self
            .facets_containing(face)
            .map(|f| f.difference(face))
            .collect();
        if parts.is_empty() {
            return Err(Error::NotAFace(face.to_vec()));
        }
        if parts.iter().all(|p| p.is_empty()) {
            return Ok(Complex::empty_face());
        }
        Ok(Complex::from_facets_unchecked(parts))
    }

    /// Closed star: all facets containing `face`.
    pub fn star(&self, face: &Face) -> Result<Complex> {
        let parts: Vec<Face> = self.facets_containing(face).cloned().collect();
        if parts.is_empty() {
            return Err(Error::NotAFace(face.to_vec()));
        }
        Ok(Complex::from_facets_unchecked(parts))
    }

    /// Maximal subcomplex avoiding `face`. A non-face leaves the complex
    /// unchanged.
    pub fn deletion(&self, face: &Face) -> Complex {
        if !self.has_face(face) {
            return self.clone();
        }
        let mut out = Vec::new();
        for f in &self.facets {
            if face.is_subset(f) {
                for &t in face.iter() {
                    out.push(f.without(t));
                }
            } else {
                out.push(f.clone());
            }
        }
        Complex::from_faces(out)
    }

    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Complex {
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let mut v: Vec<Vertex> = f.iter().map(|x| *map.get(x).unwrap_or(x)).collect();
                v.sort_unstable();
                Face(v)
            })
            .collect();
        Complex::from_facets_unchecked(facets)
    }

    /// Facets are unions of one facet from each side. The right side is
    /// shifted above the left's largest ID when the vertex sets meet.
    pub fn join(&self, other: &Complex) -> Join {
        let overlap = other.vertices.iter().any(|v| self.vertices.contains(v));
        let right_relabel: BTreeMap<Vertex, Vertex> = if overlap {
            let base = self.max_vertex().map_or(0, |m| m + 1);
            let lo = other.vertices.iter().next().copied().unwrap_or(0);
            other.vertices.iter().map(|&v| (v, v - lo + base)).collect()
        } else {
            BTreeMap::new()
        };
        let right = other.relabel(&right_relabel);
        let mut facets = Vec::with_capacity(self.facets.len() * right.facets.len());
        for a in &self.facets {
            for b in &right.facets {
                facets.push(a.union(b));
            }
        }
        let complex = if facets.iter().all(|f| f.is_empty()) {
            Complex::empty_face()
        } else {
            Complex::from_facets_unchecked(facets)
        };
        Join {
            complex,
            right_relabel,
        }
    }

    /// Combinatorial stellar subdivision at `tau` with new vertex `nu`:
    /// `(Δ − τ) ∪ ν ∗ (St(τ) − τ)`.
    pub fn stellar(&self, tau: &Face, nu: Vertex) -> Result<Complex> {
        if self.vertices.contains(&nu) {
            return Err(Error::RepeatedVertex {
                facet: tau.to_vec(),
                vertex: nu,
            });
        }
        if tau.is_empty() || !self.has_face(tau) {
            return Err(Error::NotAFace(tau.to_vec()));
        }
        let mut out = Vec::with_capacity(self.facets.len() + tau.len());
        for f in &self.facets {
            if tau.is_subset(f) {
                for &t in tau.iter() {
                    out.push(f.without(t).with(nu));
                }
            } else {
                out.push(f.clone());
            }
        }
        Ok(Complex::from_facets_unchecked(out))
    }

    /// Barycentric subdivision as the order complex of the face poset. The
    /// map sends each nonempty face to its new vertex; new IDs are assigned
    /// in the sorted order of faces, starting at `first_id`.
    pub fn barycentric(&self, first_id: Vertex) -> (Complex, BTreeMap<Face, Vertex>) {
        let faces = self.faces();
        let ids: BTreeMap<Face, Vertex> = faces
            .iter()
            .cloned()
            .zip(first_id..)
            .collect();
        if faces.is_empty() {
            return (Complex::empty_face(), ids);
        }
        let mut out = Vec::new();
        for f in &self.facets {
            // maximal chains of f: orderings of its vertices
            let mut perm: Vec<Vertex> = f.to_vec();
            permutations(&mut perm, 0, &mut |p| {
                let chain: Vec<Vertex> = (1..=p.len())
                    .map(|k| {
                        let mut s = p[..k].to_vec();
                        s.sort_unstable();
                        ids[&Face(s)]
                    })
                    .collect();
                out.push(Face::new(chain).expect("chain vertices are distinct"));
            });
        }
        (Complex::from_facets_unchecked(out), ids)
    }

    /// Ridges (faces of dimension `dim - 1`) mapped to the facets containing
    /// them. Requires a pure complex.
    pub fn ridge_incidence(&self) -> Result<BTreeMap<Face, Vec<usize>>> {
        if !self.is_pure() {
            return Err(Error::NotPure);
        }
        let mut map: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
        for (i, f) in self.facets.iter().enumerate() {
            for r in f.boundary() {
                map.entry(r).or_default().push(i);
            }
        }
        Ok(map)
    }

    /// Whether the 1-skeleton is connected.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        for f in &self.facets {
            for &a in f.iter() {
                adj.entry(a).or_default().extend(f.iter().copied());
            }
        }
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

pub(crate) fn permutations(v: &mut [Vertex], k: usize, visit: &mut impl FnMut(&[Vertex])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.facets.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face(v: &[Vertex]) -> Face {
        Face::new(v.iter().copied()).unwrap()
    }

    fn tetra_boundary() -> Complex {
        Complex::simplex_boundary([1, 2, 3, 4]).unwrap()
    }

    #[test]
    fn triangle_boundary() {
        let c = Complex::new([[1, 2], [2, 3], [3, 1]]).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.f_vector(), FVector(vec![3, 3]));
    }

    #[test]
    fn boundary_of_three_simplex() {
        let c = Complex::new([[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap();
        assert_eq!(c, tetra_boundary());
        assert_eq!(c.f_vector(), FVector(vec![4, 6, 4]));
        assert_eq!(c.euler_characteristic(), 2);
    }

    #[test]
    fn malformed_facets() {
        assert!(matches!(
            Complex::new([[1, 2, 2]]),
            Err(Error::RepeatedVertex { vertex: 2, .. })
        ));
        assert_eq!(Complex::new([Vec::<Vertex>::new()]), Err(Error::EmptyFacet));
        assert_eq!(Complex::new(Vec::<Vec<Vertex>>::new()), Err(Error::NoFacets));
    }

    #[test]
    fn non_maximal_and_duplicate_facets_dropped() {
        let c = Complex::new(vec![vec![1, 2, 3], vec![1, 2], vec![3, 2, 1], vec![4]]).unwrap();
        assert_eq!(c.facets(), &[face(&[1, 2, 3]), face(&[4])]);
        assert!(!c.is_pure());
    }

    #[test]
    fn sphere_euler_characteristics() {
        for d in 1..=5u32 {
            let c = Complex::simplex_boundary(0..d + 2).unwrap();
            let f = c.f_vector();
            for i in 0..=d as usize {
                assert_eq!(f.get(i), binomial(d as u64 + 2, i as u64 + 1));
            }
            let expected = 1 + if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(c.euler_characteristic(), expected);
        }
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn six_cycle() {
        let c = Complex::new((0..6).map(|i| [i, (i + 1) % 6])).unwrap();
        assert_eq!(c.f_vector(), FVector(vec![6, 6]));
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn links_in_tetra_boundary() {
        let c = tetra_boundary();
        let lk = c.link(&face(&[1])).unwrap();
        assert_eq!(lk, Complex::simplex_boundary([2, 3, 4]).unwrap());
        let lk = c.link(&face(&[1, 2])).unwrap();
        assert_eq!(lk, Complex::new([[3], [4]]).unwrap());
        assert!(c.link(&face(&[1, 2, 3])).unwrap().is_empty_face_only());
        assert_eq!(c.link(&face(&[1, 5])), Err(Error::NotAFace(vec![1, 5])));
    }

    #[test]
    fn deletion_of_edge() {
        let c = tetra_boundary();
        let del = c.deletion(&face(&[1, 2]));
        let faces = del.faces();
        let all = c.faces();
        let removed: Vec<Face> = all.difference(&faces).cloned().collect();
        assert_eq!(removed, vec![face(&[1, 2]), face(&[1, 2, 3]), face(&[1, 2, 4])]);
        assert_eq!(c.deletion(&face(&[7])), c);
    }

    #[test]
    fn joins() {
        let s0 = Complex::new([[1], [2]]).unwrap();
        let j = s0.join(&s0);
        assert_eq!(j.complex.f_vector(), FVector(vec![4, 4]));
        assert_eq!(j.complex.euler_characteristic(), 0);
        assert_eq!(j.right_relabel.len(), 2);

        let c = tetra_boundary();
        assert_eq!(c.join(&Complex::empty_face()).complex, c);

        let cone = Complex::new([[9]])
            .unwrap()
            .join(&Complex::simplex_boundary([1, 2, 3]).unwrap());
        assert_eq!(cone.complex.facets().len(), 3);
        assert!(cone.right_relabel.is_empty());
    }

    #[test]
    fn join_f_vector_convolution() {
        let a = Complex::simplex_boundary([0, 1, 2]).unwrap();
        let b = Complex::new([vec![0, 1], vec![1, 2], vec![3]]).unwrap();
        let j = a.join(&b).complex;
        let fa = a.f_vector().with_empty();
        let fb = b.f_vector().with_empty();
        let fj = j.f_vector().with_empty();
        for (k, &count) in fj.iter().enumerate() {
            let conv: u64 = (0..=k)
                .map(|i| fa.get(i).copied().unwrap_or(0) * fb.get(k - i).copied().unwrap_or(0))
                .sum();
            assert_eq!(count, conv, "k = {}", k as i64 - 1);
        }
    }

    #[test]
    fn combinatorial_stellar_at_edge() {
        let c = tetra_boundary();
        let s = c.stellar(&face(&[1, 2]), 5).unwrap();
        assert_eq!(s.facets().len(), 6);
        assert_eq!(s.euler_characteristic(), 2);
    }

    #[test]
    fn barycentric_counts() {
        let (sd, ids) = Complex::simplex([0, 1, 2]).unwrap().barycentric(10);
        assert_eq!(sd.facets().len(), 6);
        assert_eq!(ids.len(), 7);
        let (sd, _) = Complex::simplex_boundary([0, 1, 2]).unwrap().barycentric(0);
        assert_eq!(sd.f_vector(), FVector(vec![6, 6]));
    }
}
