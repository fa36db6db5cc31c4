//! Independent oracles for the integration tests. Nothing here calls the
//! library's solvers: wall margins come from Cramer's rule, feasibility from
//! Fourier–Motzkin elimination, triangulations from brute-force search.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regsub::{Face, Point, Rat, Vertex};

pub fn r(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn pt(xs: &[i64]) -> Point {
    xs.iter().map(|&x| r(x)).collect()
}

pub fn det3(m: [&[Rat]; 3]) -> Rat {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Coefficients of `t` in the basis `cols` of R^3, by Cramer's rule.
pub fn cramer3(cols: [&[Rat]; 3], t: &[Rat]) -> [Rat; 3] {
    let d = det3(cols);
    assert!(!d.is_zero(), "columns are not a basis");
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut c = cols;
        c[i] = t;
        *slot = det3(c) / &d;
    }
    out
}

/// Lifts a planar point to `(x, y, 1)`; points of R^3 (fan rays) are kept.
pub fn lift3(p: &[Rat]) -> Point {
    match p.len() {
        2 => vec![p[0].clone(), p[1].clone(), Rat::one()],
        3 => p.to_vec(),
        n => panic!("oracle handles planar triangulations and fans in R^3, got R^{n}"),
    }
}

/// Interior edges (ridges in two facets) with their two opposite vertices,
/// the lexicographically smaller facet first.
pub fn interior_walls(facets: &[Face]) -> Vec<(Face, Vertex, Vertex)> {
    let mut by_ridge: BTreeMap<Face, Vec<&Face>> = BTreeMap::new();
    for f in facets {
        for v in f.iter() {
            by_ridge.entry(f.without(*v)).or_default().push(f);
        }
    }
    by_ridge
        .into_iter()
        .filter(|(_, fs)| fs.len() == 2)
        .map(|(ridge, mut fs)| {
            fs.sort();
            let a = fs[0].difference(&ridge)[0];
            let b = fs[1].difference(&ridge)[0];
            (ridge, a, b)
        })
        .collect()
}

/// Margin form of one wall: `h(b) - sum_u beta_u h(u)` over the vertices `u`
/// of `ridge ∪ {a}`, where `lift(b) = sum beta_u lift(u)`.
pub fn wall_coeffs(
    coords: &BTreeMap<Vertex, Point>,
    ridge: &Face,
    a: Vertex,
    b: Vertex,
) -> Vec<(Vertex, Rat)> {
    let s1 = ridge.with(a);
    let lifts: Vec<Point> = s1.iter().map(|v| lift3(&coords[v])).collect();
    let beta = cramer3(
        [&lifts[0], &lifts[1], &lifts[2]],
        &lift3(&coords[&b]),
    );
    let mut out = vec![(b, Rat::one())];
    out.extend(s1.iter().zip(beta).map(|(v, x)| (*v, -x)));
    out
}

/// Margins of `h` at all interior walls.
pub fn margins(
    facets: &[Face],
    coords: &BTreeMap<Vertex, Point>,
    h: &BTreeMap<Vertex, Rat>,
) -> BTreeMap<Face, Rat> {
    interior_walls(facets)
        .into_iter()
        .map(|(ridge, a, b)| {
            let m = wall_coeffs(coords, &ridge, a, b)
                .into_iter()
                .map(|(v, c)| c * &h[&v])
                .sum();
            (ridge, m)
        })
        .collect()
}

/// Whether `h` is strictly convex at every interior wall.
pub fn strictly_convex(
    facets: &[Face],
    coords: &BTreeMap<Vertex, Point>,
    h: &BTreeMap<Vertex, Rat>,
) -> bool {
    margins(facets, coords, h).values().all(Signed::is_positive)
}

/// Fourier–Motzkin: is `{x : a_i . x >= b_i}` nonempty?
pub fn fm_feasible(mut rows: Vec<(Vec<Rat>, Rat)>, nvars: usize) -> bool {
    for var in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            if row.0[var].is_positive() {
                pos.push(row);
            } else if row.0[var].is_negative() {
                neg.push(row);
            } else {
                rest.push(row);
            }
        }
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                let (sp, sn) = (-&na[var], pa[var].clone());
                let a: Vec<Rat> = pa.iter().zip(na).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = pb * &sp + nb * &sn;
                rest.push((a, b));
            }
        }
        rows = normalize(rest);
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

fn normalize(rows: Vec<(Vec<Rat>, Rat)>) -> Vec<(Vec<Rat>, Rat)> {
    let mut out: Vec<(Vec<Rat>, Rat)> = rows
        .into_iter()
        .map(|(a, b)| {
            let s = a
                .iter()
                .chain(std::iter::once(&b))
                .map(Signed::abs)
                .max()
                .unwrap_or_else(Rat::one);
            if s.is_zero() {
                (a, b)
            } else {
                (a.iter().map(|x| x / &s).collect(), b / &s)
            }
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Oracle verdict: do heights with every interior margin `>= 1` exist?
/// Three vertices of one facet are pinned to zero (adding an affine
/// function changes no margin).
pub fn fm_regular(facets: &[Face], coords: &BTreeMap<Vertex, Point>) -> bool {
    let verts: Vec<Vertex> = {
        let mut v: Vec<Vertex> = facets.iter().flat_map(|f| f.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let pinned = &facets[0];
    let free: Vec<Vertex> = verts.iter().copied().filter(|v| !pinned.contains(*v)).collect();
    let idx: BTreeMap<Vertex, usize> = free.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let rows = interior_walls(facets)
        .into_iter()
        .map(|(ridge, a, b)| {
            let mut row = vec![Rat::zero(); free.len()];
            for (v, c) in wall_coeffs(coords, &ridge, a, b) {
                if let Some(&i) = idx.get(&v) {
                    row[i] += c;
                }
            }
            (row, Rat::one())
        })
        .collect();
    fm_feasible(rows, free.len())
}

fn orient(a: &Point, b: &Point, c: &Point) -> Rat {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// No three points collinear.
pub fn general_position(pts: &[Point]) -> bool {
    let n = pts.len();
    (0..n).all(|i| {
        (i + 1..n).all(|j| (j + 1..n).all(|k| !orient(&pts[i], &pts[j], &pts[k]).is_zero()))
    })
}

fn strictly_inside(t: [usize; 3], p: usize, pts: &[Point]) -> bool {
    let s = orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]).signum();
    (0..3).all(|i| orient(&pts[t[i]], &pts[t[(i + 1) % 3]], &pts[p]).signum() == s)
}

fn segments_cross(a: usize, b: usize, c: usize, d: usize, pts: &[Point]) -> bool {
    if [a, b].iter().any(|x| *x == c || *x == d) {
        return false;
    }
    let o1 = orient(&pts[a], &pts[b], &pts[c]).signum();
    let o2 = orient(&pts[a], &pts[b], &pts[d]).signum();
    let o3 = orient(&pts[c], &pts[d], &pts[a]).signum();
    let o4 = orient(&pts[c], &pts[d], &pts[b]).signum();
    o1 != o2 && o3 != o4
}

fn compatible(s: [usize; 3], t: [usize; 3], pts: &[Point]) -> bool {
    for p in t {
        if !s.contains(&p) && strictly_inside(s, p, pts) {
            return false;
        }
    }
    for p in s {
        if !t.contains(&p) && strictly_inside(t, p, pts) {
            return false;
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = (s[i], s[(i + 1) % 3]);
            let (c, d) = (t[j], t[(j + 1) % 3]);
            if segments_cross(a, b, c, d, pts) {
                return false;
            }
        }
    }
    true
}

fn area2(t: [usize; 3], pts: &[Point]) -> Rat {
    orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]).abs()
}

fn hull_area2(pts: &[Point]) -> Rat {
    // fan triangulation of the hull from its lowest point, by angle
    let n = pts.len();
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let left = (0..n)
                .filter(|&k| k != i && k != j)
                .all(|k| orient(&pts[i], &pts[j], &pts[k]).is_positive());
            if left {
                hull.push(i);
            }
        }
    }
    hull.sort_unstable();
    hull.dedup();
    let o = hull[0];
    let mut rest: Vec<usize> = hull[1..].to_vec();
    rest.sort_by(|&a, &b| {
        if orient(&pts[o], &pts[a], &pts[b]).is_positive() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    rest.windows(2)
        .map(|w| area2([o, w[0], w[1]], pts))
        .sum()
}

/// All triangulations of the convex hull of `pts` (general position) whose
/// vertices are among `pts`, each as a sorted facet list.
pub fn all_triangulations(pts: &[Point]) -> Vec<Vec<Face>> {
    assert!(general_position(pts));
    let n = pts.len();
    let mut tris = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                tris.push([i, j, k]);
            }
        }
    }
    let target = hull_area2(pts);
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    search(&tris, 0, &mut chosen, Rat::zero(), &target, pts, &mut out);
    out
}

fn search(
    tris: &[[usize; 3]],
    from: usize,
    chosen: &mut Vec<[usize; 3]>,
    area: Rat,
    target: &Rat,
    pts: &[Point],
    out: &mut Vec<Vec<Face>>,
) {
    if &area == target {
        let mut fs: Vec<Face> = chosen
            .iter()
            .map(|t| Face::new(t.iter().map(|&x| x as Vertex)).unwrap())
            .collect();
        fs.sort();
        out.push(fs);
        return;
    }
    for i in from..tris.len() {
        let t = tris[i];
        let a = &area + area2(t, pts);
        if &a > target || !chosen.iter().all(|s| compatible(*s, t, pts)) {
            continue;
        }
        chosen.push(t);
        search(tris, i + 1, chosen, a, target, pts, out);
        chosen.pop();
    }
}

/// Seeded generator for test inputs.
pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    /// Positive weights summing to one.
    pub fn weights(&mut self, n: usize) -> Vec<Rat> {
        let raw: Vec<i64> = (0..n).map(|_| self.0.gen_range(1..10)).collect();
        let s: i64 = raw.iter().sum();
        raw.into_iter().map(|x| q(x, s)).collect()
    }
}

/// The point with barycentric `weights` on `pts`.
pub fn combo(pts: &[&Point], weights: &[Rat]) -> Point {
    let mut p = vec![Rat::zero(); pts[0].len()];
    for (q, w) in pts.iter().zip(weights) {
        for (x, y) in p.iter_mut().zip(q.iter()) {
            *x += y * w;
        }
    }
    p
}
