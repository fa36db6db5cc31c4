//! Exact rational linear algebra over [`Rat`].
//!
//! Everything here is dense Gaussian elimination on small matrices; the
//! geometric predicates in this crate never see more than a few dozen rows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// reduced).
pub type Rat = BigRational;

/// A point (or vector) with exact coordinates.
pub type Point = Vec<Rat>;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn point(coords: &[i64]) -> Point {
    coords.iter().map(|&c| int(c)).collect()
}

/// Parses `p/q` or a bare integer `p`. Decimals are rejected.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// Canonical `p/q` rendering, always with an explicit denominator.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// Average of a nonempty list of points.
pub fn centroid<'a, I>(points: I) -> Point
where
    I: IntoIterator<Item = &'a Point>,
{
    let mut iter = points.into_iter();
    let first = iter.next().expect("centroid of an empty point set");
    let mut acc = first.clone();
    let mut n = 1i64;
    for p in iter {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
        n += 1;
    }
    let inv = rat(1, n);
    acc.iter().map(|a| a * &inv).collect()
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// nonzero row, in order.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut().skip(c) {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Solves `A x = b` where `A` is given by rows. Returns the solution when it
/// exists and is unique.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&n) {
        return None; // inconsistent
    }
    if pivots.len() != n {
        return None; // underdetermined
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Solves `sum_j x_j * cols[j] = target` for column vectors `cols`.
pub fn solve_columns(cols: &[&[Rat]], target: &[Rat]) -> Option<Vec<Rat>> {
    let dim = target.len();
    let a: Vec<Vec<Rat>> = (0..dim)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    solve(&a, target)
}

pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &a[c][j] * &f;
                a[i][j] -= t;
            }
        }
    }
    d
}

/// A nonzero vector spanning the kernel of the matrix given by rows, if the
/// kernel is exactly one-dimensional.
pub fn kernel_line(rows: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() + 1 != n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rat::zero(); n];
    v[free] = Rat::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[r][free].clone();
    }
    Some(v)
}

/// Appends a trailing `1` (affine to linear coordinates).
pub fn homogenize(p: &[Rat]) -> Point {
    let mut v = p.to_vec();
    v.push(Rat::one());
    v
}

/// Affine coordinates of `p` with respect to affinely independent points,
/// or `None` if `p` is outside their affine hull.
pub fn affine_coords(points: &[&Point], p: &[Rat]) -> Option<Vec<Rat>> {
    let cols: Vec<Point> = points.iter().map(|q| homogenize(q)).collect();
    let refs: Vec<&[Rat]> = cols.iter().map(Vec::as_slice).collect();
    solve_columns(&refs, &homogenize(p))
}

pub fn affinely_independent(points: &[&Point]) -> bool {
    let rows: Vec<Point> = points.iter().map(|q| homogenize(q)).collect();
    rank(&rows) == points.len()
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Factorial as an exact integer count.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Absolute value of `det` divided by `k!`, i.e. the `k`-volume of a
/// `k`-simplex in `R^k` given edge vectors as rows.
pub fn simplex_volume(edge_rows: &[Vec<Rat>]) -> Rat {
    let k = edge_rows.len();
    det(edge_rows).abs() / int(factorial(k) as i64)
}
