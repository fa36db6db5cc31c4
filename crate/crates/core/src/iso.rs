//! Isomorphism of simplicial complexes by colour refinement and backtracking.
//!
//! Vertices are first partitioned by an iterated invariant (facet incidences
//! and the colours of their co-facet vertices), computed jointly for both
//! complexes so colours are comparable. The search then only pairs vertices
//! of equal colour and checks edges and facets incrementally. Intended for
//! desk-scale complexes.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::complex::{Complex, Face, Vertex};

pub type VertexMap = BTreeMap<Vertex, Vertex>;

/// Returned when the backtracking search exceeds its node budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimitReached;

/// A face-preserving vertex bijection `a -> b`, or `None` if the complexes
/// are not isomorphic.
pub fn isomorphic(a: &Complex, b: &Complex) -> Option<VertexMap> {
    isomorphic_bounded(a, b, u64::MAX).expect("unbounded search")
}

pub fn isomorphic_bounded(
    a: &Complex,
    b: &Complex,
    node_limit: u64,
) -> Result<Option<VertexMap>, SearchLimitReached> {
    if a.vertices().len() != b.vertices().len()
        || a.facets().len() != b.facets().len()
        || a.f_vector() != b.f_vector()
    {
        return Ok(None);
    }
    let mut sizes_a: Vec<usize> = a.facets().iter().map(|f| f.len()).collect();
    let mut sizes_b: Vec<usize> = b.facets().iter().map(|f| f.len()).collect();
    sizes_a.sort_unstable();
    sizes_b.sort_unstable();
    if sizes_a != sizes_b {
        return Ok(None);
    }
    if a.vertices().is_empty() {
        return Ok(Some(VertexMap::new()));
    }

    let ga = Indexed::new(a);
    let gb = Indexed::new(b);
    let (ca, cb) = refine_colours(&ga, &gb);
    let mut hist_a: HashMap<usize, usize> = HashMap::new();
    let mut hist_b: HashMap<usize, usize> = HashMap::new();
    for &c in &ca {
        *hist_a.entry(c).or_default() += 1;
    }
    for &c in &cb {
        *hist_b.entry(c).or_default() += 1;
    }
    if hist_a != hist_b {
        return Ok(None);
    }

    let order = search_order(&ga, &ca, &hist_a);
    let mut search = Search {
        ga: &ga,
        gb: &gb,
        ca: &ca,
        cb: &cb,
        order,
        map: vec![usize::MAX; ga.n],
        used: vec![false; gb.n],
        nodes: 0,
        limit: node_limit,
    };
    match search.extend(0) {
        Ok(true) => Ok(Some(
            (0..ga.n)
                .map(|i| (ga.ids[i], gb.ids[search.map[i]]))
                .collect(),
        )),
        Ok(false) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Dense relabelling of a complex.
struct Indexed {
    n: usize,
    ids: Vec<Vertex>,
    facets: Vec<Vec<usize>>,
    facet_set: HashSet<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    adj: Vec<HashSet<usize>>,
}

impl Indexed {
    fn new(c: &Complex) -> Indexed {
        let ids: Vec<Vertex> = c.vertices().iter().copied().collect();
        let pos: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let facets: Vec<Vec<usize>> = c
            .facets()
            .iter()
            .map(|f| f.iter().map(|v| pos[v]).collect())
            .collect();
        let mut incident = vec![Vec::new(); n];
        let mut adj = vec![HashSet::new(); n];
        for (fi, f) in facets.iter().enumerate() {
            for &u in f {
                incident[u].push(fi);
                for &w in f {
                    if w != u {
                        adj[u].insert(w);
                    }
                }
            }
        }
        let facet_set = facets.iter().cloned().collect();
        Indexed {
            n,
            ids,
            facets,
            facet_set,
            incident,
            adj,
        }
    }
}

/// Joint colour refinement; returns per-vertex colours for both sides.
fn refine_colours(ga: &Indexed, gb: &Indexed) -> (Vec<usize>, Vec<usize>) {
    let mut ca = vec![0usize; ga.n];
    let mut cb = vec![0usize; gb.n];
    let mut classes = 1;
    loop {
        let sig = |g: &Indexed, col: &[usize]| -> Vec<(usize, Vec<Vec<usize>>)> {
            (0..g.n)
                .map(|v| {
                    let mut around: Vec<Vec<usize>> = g.incident[v]
                        .iter()
                        .map(|&fi| {
                            let mut cs: Vec<usize> = g.facets[fi]
                                .iter()
                                .filter(|&&w| w != v)
                                .map(|&w| col[w])
                                .collect();
                            cs.sort_unstable();
                            cs
                        })
                        .collect();
                    around.sort();
                    (col[v], around)
                })
                .collect()
        };
        let sa = sig(ga, &ca);
        let sb = sig(gb, &cb);
        let mut table: BTreeMap<&(usize, Vec<Vec<usize>>), usize> = BTreeMap::new();
        for s in sa.iter().chain(&sb) {
            let next = table.len();
            table.entry(s).or_insert(next);
        }
        // renumber in sorted order so both sides agree
        let renum: BTreeMap<&(usize, Vec<Vec<usize>>), usize> =
            table.keys().enumerate().map(|(i, k)| (*k, i)).collect();
        let na: Vec<usize> = sa.iter().map(|s| renum[s]).collect();
        let nb: Vec<usize> = sb.iter().map(|s| renum[s]).collect();
        let count = renum.len();
        ca = na;
        cb = nb;
        if count == classes {
            return (ca, cb);
        }
        classes = count;
    }
}

fn search_order(g: &Indexed, colours: &[usize], hist: &HashMap<usize, usize>) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n);
    let mut placed = vec![false; g.n];
    while order.len() < g.n {
        // prefer vertices adjacent to placed ones, then rare colours
        let next = (0..g.n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| {
                let touching = g.adj[v].iter().filter(|&&w| placed[w]).count();
                (
                    if order.is_empty() || touching > 0 { 0 } else { 1 },
                    hist[&colours[v]],
                    usize::MAX - touching,
                    v,
                )
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    ga: &'a Indexed,
    gb: &'a Indexed,
    ca: &'a [usize],
    cb: &'a [usize],
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    limit: u64,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> Result<bool, SearchLimitReached> {
        if depth == self.order.len() {
            return Ok(self.ga.facets.iter().all(|f| {
                let mut img: Vec<usize> = f.iter().map(|&v| self.map[v]).collect();
                img.sort_unstable();
                self.gb.facet_set.contains(&img)
            }));
        }
        let v = self.order[depth];
        for w in 0..self.gb.n {
            if self.used[w] || self.cb[w] != self.ca[v] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(SearchLimitReached);
            }
            if !self.consistent(v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.extend(depth + 1)? {
                return Ok(true);
            }
            self.map[v] = usize::MAX;
            self.used[w] = false;
        }
        Ok(false)
    }

    fn consistent(&self, v: usize, w: usize) -> bool {
        for &u in &self.order {
            let mu = self.map[u];
            if mu == usize::MAX {
                continue;
            }
            if self.ga.adj[v].contains(&u) != self.gb.adj[w].contains(&mu) {
                return false;
            }
        }
        // facets through v that are now fully mapped must land on facets
        for &fi in &self.ga.incident[v] {
            let f = &self.ga.facets[fi];
            if f.iter().all(|&x| x == v || self.map[x] != usize::MAX) {
                let mut img: Vec<usize> = f
                    .iter()
                    .map(|&x| if x == v { w } else { self.map[x] })
                    .collect();
                img.sort_unstable();
                if !self.gb.facet_set.contains(&img) {
                    return false;
                }
            }
        }
        true
    }
}

/// Applies a vertex map to a face.
pub fn map_face(map: &VertexMap, f: &Face) -> Face {
    Face::new(f.iter().map(|v| map[v])).expect("bijection keeps faces simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32, offset: u32) -> Complex {
        Complex::new((0..n).map(|i| [offset + i, offset + (i + 1) % n])).unwrap()
    }

    fn octahedron() -> Complex {
        // antipodal pairs (0,1), (2,3), (4,5)
        let mut f = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    f.push([a, b, c]);
                }
            }
        }
        Complex::new(f).unwrap()
    }

    #[test]
    fn relabelled_triangle() {
        let a = Complex::simplex([1, 2, 3]).unwrap();
        let b = Complex::simplex([7, 9, 8]).unwrap();
        let m = isomorphic(&a, &b).unwrap();
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn tetra_vs_octahedron() {
        let t = Complex::simplex_boundary([0, 1, 2, 3]).unwrap();
        assert!(isomorphic(&t, &octahedron()).is_none());
    }

    #[test]
    fn derived_triangle_boundary_is_six_cycle() {
        let (sd, _) = Complex::simplex_boundary([0, 1, 2]).unwrap().barycentric(100);
        let m = isomorphic(&sd, &cycle(6, 0)).unwrap();
        for f in sd.facets() {
            assert!(cycle(6, 0).facets().contains(&map_face(&m, f)));
        }
    }

    #[test]
    fn six_cycle_vs_two_triangles() {
        let two = Complex::new([[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]]).unwrap();
        assert!(isomorphic(&cycle(6, 0), &two).is_none());
    }

    #[test]
    fn octahedron_relabelled() {
        let o = octahedron();
        let map: BTreeMap<Vertex, Vertex> = (0..6).map(|v| (v, 10 + (v * 5) % 6)).collect();
        let r = o.relabel(&map);
        assert!(isomorphic(&o, &r).is_some());
        assert!(isomorphic(&r, &o).is_some());
    }

    #[test]
    fn search_budget_is_reported() {
        let o = octahedron();
        assert_eq!(isomorphic_bounded(&o, &o, 1), Err(SearchLimitReached));
    }

    #[test]
    fn empty_face_complexes() {
        assert!(isomorphic(&Complex::empty_face(), &Complex::empty_face()).is_some());
    }
}
