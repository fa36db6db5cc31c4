//! Dense two-phase primal simplex over exact rationals.
//!
//! Problems are in standard form `max c.x  s.t.  A x = b, x >= 0`. Pivoting
//! uses Bland's rule, so the method terminates on degenerate problems. The
//! artificial columns from phase one are kept for the whole solve: they hold
//! the current basis inverse, which is where duals and Farkas vectors are
//! read from.

use num_traits::{One, Signed, Zero};

use crate::linalg::{combinations, dot, rref, Rat};

#[derive(Clone, Debug)]
pub struct StandardLp {
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
    pub c: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// Primal optimum `x`, dual optimum `y` with `A^T y >= c` and
    /// `b.y == c.x == value`.
    Optimal { x: Vec<Rat>, y: Vec<Rat>, value: Rat },
    /// `A^T y >= 0` and `b.y < 0`: no nonnegative `x` solves `A x = b`.
    Infeasible { farkas: Vec<Rat> },
    /// A feasible point and a ray `d >= 0` with `A d = 0`, `c.d > 0`.
    Unbounded { x: Vec<Rat>, ray: Vec<Rat> },
}

struct Tableau {
    m: usize,
    n: usize,
    rows: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n + self.m
    }

    fn rhs(&self) -> usize {
        self.n + self.m
    }

    /// Rebuilds the reduced-cost row for the given column costs.
    fn load_objective(&mut self, costs: &[Rat]) {
        let w = self.width();
        let mut obj: Vec<Rat> = costs.to_vec();
        obj.push(Rat::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    obj[j] -= cb * &row[j];
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width();
        let inv = self.rows[p][q].recip();
        for x in self.rows[p].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let support: Vec<usize> = (0..=w).filter(|&j| !self.rows[p][j].is_zero()).collect();
        let pivot_row = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &support {
                row[j] -= &pivot_row[j] * &f;
            }
        }
        if !self.obj[q].is_zero() {
            let f = self.obj[q].clone();
            for &j in &support {
                self.obj[j] -= &pivot_row[j] * &f;
            }
        }
        self.basis[p] = q;
    }

    /// Runs Bland's rule over columns `< limit`. Returns the entering column
    /// of an unbounded direction if one is found.
    fn optimize(&mut self, limit: usize) -> Option<usize> {
        let rhs = self.rhs();
        loop {
            let q = (0..limit).find(|&j| self.obj[j].is_positive())?;
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((p, _)) => self.pivot(p, q),
                None => return Some(q),
            }
        }
    }

    fn primal(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.n];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.n {
                x[bv] = self.rows[i][self.rhs()].clone();
            }
        }
        x
    }

    /// `c_B^T B^{-1}`, read off the artificial columns.
    fn duals(&self, costs: &[Rat]) -> Vec<Rat> {
        (0..self.m)
            .map(|k| {
                (0..self.m)
                    .map(|i| &costs[self.basis[i]] * &self.rows[i][self.n + k])
                    .sum()
            })
            .collect()
    }
}

pub fn solve(lp: &StandardLp) -> LpOutcome {
    let m = lp.a.len();
    let n = lp.c.len();
    let signs: Vec<bool> = lp.b.iter().map(|v| v.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(n + m + 1);
        for j in 0..n {
            let v = lp.a[i][j].clone();
            row.push(if signs[i] { -v } else { v });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(lp.b[i].abs());
        rows.push(row);
    }
    let mut t = Tableau {
        m,
        n,
        rows,
        obj: Vec::new(),
        basis: (n..n + m).collect(),
    };
    let unflip = |y: Vec<Rat>| -> Vec<Rat> {
        y.into_iter()
            .zip(&signs)
            .map(|(v, &s)| if s { -v } else { v })
            .collect()
    };

    // Phase one: maximize minus the sum of artificials.
    let mut phase1 = vec![Rat::zero(); n];
    phase1.extend((0..m).map(|_| -Rat::one()));
    t.load_objective(&phase1);
    let unbounded = t.optimize(n + m);
    debug_assert!(unbounded.is_none(), "phase one is bounded by zero");
    let infeas = t.obj[t.rhs()].clone(); // minus the phase-one value
    if infeas.is_positive() {
        return LpOutcome::Infeasible {
            farkas: unflip(t.duals(&phase1)),
        };
    }

    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(q) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, q);
            }
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.extend((0..m).map(|_| Rat::zero()));
    t.load_objective(&phase2);
    if let Some(q) = t.optimize(n) {
        let x = t.primal();
        let mut ray = vec![Rat::zero(); n];
        ray[q] = Rat::one();
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < n {
                ray[bv] = -t.rows[i][q].clone();
            }
        }
        return LpOutcome::Unbounded { x, ray };
    }
    let x = t.primal();
    let value = dot(&lp.c, &x);
    LpOutcome::Optimal {
        x,
        y: unflip(t.duals(&phase2)),
        value,
    }
}

/// Either a nonnegative solution of `A x = b` or a Farkas vector.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Result<Vec<Rat>, Vec<Rat>> {
    let n = a.first().map_or(0, Vec::len);
    let lp = StandardLp {
        a: a.to_vec(),
        b: b.to_vec(),
        c: vec![Rat::zero(); n],
    };
    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => Ok(x),
        LpOutcome::Infeasible { farkas } => Err(farkas),
        LpOutcome::Unbounded { .. } => unreachable!("zero objective is bounded"),
    }
}

/// Every vertex of `{x >= 0 : A x = b}`, by enumerating bases. Exponential
/// in general; meant for systems with a handful of columns.
pub fn vertices(a: &[Vec<Rat>], b: &[Rat]) -> Vec<Vec<Rat>> {
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return Vec::new();
    }
    let r = pivots.len();
    let rows: Vec<Vec<Rat>> = aug[..r].iter().map(|row| row[..n].to_vec()).collect();
    let rhs: Vec<Rat> = aug[..r].iter().map(|row| row[n].clone()).collect();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for basis in combinations(n, r) {
        let sub: Vec<Vec<Rat>> = rows
            .iter()
            .map(|row| basis.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let Some(xb) = crate::linalg::solve(&sub, &rhs) else {
            continue;
        };
        if xb.iter().any(Signed::is_negative) {
            continue;
        }
        let mut x = vec![Rat::zero(); n];
        for (&j, v) in basis.iter().zip(xb) {
            x[j] = v;
        }
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, point, rat};

    fn at_y(a: &[Vec<Rat>], y: &[Rat]) -> Vec<Rat> {
        let n = a[0].len();
        (0..n)
            .map(|j| a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum())
            .collect()
    }

    #[test]
    fn textbook_optimum_with_duals() {
        // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 (slacks s1..s3)
        let lp = StandardLp {
            a: vec![
                point(&[1, 0, 1, 0, 0]),
                point(&[0, 2, 0, 1, 0]),
                point(&[3, 2, 0, 0, 1]),
            ],
            b: point(&[4, 12, 18]),
            c: point(&[3, 5, 0, 0, 0]),
        };
        let LpOutcome::Optimal { x, y, value } = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(value, int(36));
        assert_eq!(&x[..2], &[int(2), int(6)]);
        assert_eq!(dot(&lp.b, &y), value);
        for (lhs, c) in at_y(&lp.a, &y).iter().zip(&lp.c) {
            assert!(lhs >= c);
        }
    }

    #[test]
    fn infeasible_system_yields_farkas_vector() {
        // x1 + x2 = 1 and x1 + x2 = 2
        let a = vec![point(&[1, 1]), point(&[1, 1])];
        let b = point(&[1, 2]);
        let y = feasible_point(&a, &b).unwrap_err();
        assert!(at_y(&a, &y).iter().all(|v| !v.is_negative()));
        assert!(dot(&b, &y).is_negative());
    }

    #[test]
    fn negative_rhs_rows_are_handled() {
        // -x1 = -3/2
        let x = feasible_point(&[vec![int(-1)]], &[rat(-3, 2)]).unwrap();
        assert_eq!(x, vec![rat(3, 2)]);
    }

    #[test]
    fn unbounded_problem_reports_ray() {
        // max x1 s.t. x1 - x2 = 0
        let lp = StandardLp {
            a: vec![point(&[1, -1])],
            b: point(&[0]),
            c: point(&[1, 0]),
        };
        let LpOutcome::Unbounded { ray, .. } = solve(&lp) else {
            panic!("expected unbounded");
        };
        assert!(ray.iter().all(|v| !v.is_negative()));
        assert!(dot(&lp.c, &ray).is_positive());
    }

    #[test]
    fn redundant_rows_survive_phase_two() {
        // x1 + x2 = 2 twice, maximize x1
        let lp = StandardLp {
            a: vec![point(&[1, 1]), point(&[1, 1])],
            b: point(&[2, 2]),
            c: point(&[1, 0]),
        };
        let LpOutcome::Optimal { x, y, value } = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(x, point(&[2, 0]));
        assert_eq!(dot(&lp.b, &y), value);
    }

    #[test]
    fn vertex_enumeration() {
        // x + y + z = 1 with a redundant copy: the three unit vectors
        let a = vec![point(&[1, 1, 1]), point(&[2, 2, 2])];
        let v = vertices(&a, &[int(1), int(2)]);
        assert_eq!(v.len(), 3);
        assert!(v.contains(&point(&[0, 1, 0])));
        assert!(vertices(&a, &[int(1), int(3)]).is_empty());
    }
}
