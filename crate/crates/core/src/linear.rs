//! Exact rational linear algebra: Gaussian solves and feasibility (phase one of the simplex
//! method, Bland's rule).

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Finds `x >= 0` with `a·x = b`, or `None` when the system is infeasible.
pub fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r: Vec<Rational> = vec![Rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v.clone() } else { v.clone() };
        }
        r[n + i] = Rational::one();
        r[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost: Vec<Rational> = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..n {
            cost[j] -= &r[j];
        }
        cost[rhs] -= &r[rhs];
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(p) = leave else { break };
        pivot(&mut t, &mut cost, p, enter);
        basis[p] = enter;
    }
    if !cost[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], p: usize, q: usize) {
    let inv = Rational::one() / &t[p][q];
    for v in t[p].iter_mut() {
        *v *= &inv;
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != p && !row[q].is_zero() {
            let f = row[q].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    if !cost[q].is_zero() {
        let f = cost[q].clone();
        for (v, pv) in cost.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

/// Whether `p` is a convex combination of `points` (all vectors of equal length).
///
/// With a positive `tol` the combination only has to land within `tol` of `p` in every coordinate.
pub fn in_convex_hull(points: &[Vec<Rational>], p: &[Rational], tol: &Rational) -> bool {
    if points.is_empty() {
        return false;
    }
    if points.iter().any(|q| q.as_slice() == p) {
        return true;
    }
    let k = points.len();
    let dim = p.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    if tol.is_zero() {
        for c in 0..dim {
            a.push(points.iter().map(|q| q[c].clone()).collect());
            b.push(p[c].clone());
        }
        a.push(vec![Rational::one(); k]);
        b.push(Rational::one());
        return feasible(&a, &b).is_some();
    }
    // variables: λ (k), slack up (dim), slack down (dim)
    let width = k + 2 * dim;
    for c in 0..dim {
        let mut up = vec![Rational::zero(); width];
        let mut down = vec![Rational::zero(); width];
        for (j, q) in points.iter().enumerate() {
            up[j] = q[c].clone();
            down[j] = q[c].clone();
        }
        up[k + c] = Rational::one();
        down[k + dim + c] = -Rational::one();
        a.push(up);
        b.push(&p[c] + tol);
        a.push(down);
        b.push(&p[c] - tol);
    }
    let mut sum = vec![Rational::zero(); width];
    for v in sum.iter_mut().take(k) {
        *v = Rational::one();
    }
    a.push(sum);
    b.push(Rational::one());
    feasible(&a, &b).is_some()
}

/// Solves the square system `a·x = b` by Gauss-Jordan elimination; `None` when singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let d = &f * &m[col][c];
                    m[r][c] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().expect("augmented column")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn solves_small_systems() {
        // x + y = 1, x - y = 0
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let x = feasible(&a, &[int(1), int(0)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
        // x + y = 1, x + y = 2 is infeasible
        let a = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        assert!(feasible(&a, &[int(1), int(2)]).is_none());
        // x = -1 has no non-negative solution
        assert!(feasible(&[vec![int(1)]], &[int(-1)]).is_none());
    }

    #[test]
    fn gaussian_solve() {
        // 2x + y = 3, x + 3y = 4
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(solve(&a, &[int(3), int(4)]).unwrap(), vec![int(1), int(1)]);
        let a = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(solve(&a, &[rat(1, 2), int(2)]).unwrap(), vec![int(2), rat(1, 2)]);
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve(&singular, &[int(1), int(1)]).is_none());
    }

    #[test]
    fn hull_membership() {
        let pts = vec![v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)])];
        assert!(in_convex_hull(&pts, &v(&[(1, 2), (1, 2)]), &int(0)));
        assert!(!in_convex_hull(&pts, &v(&[(1, 2), (1, 3)]), &int(0)));
        assert!(in_convex_hull(&pts, &v(&[(1, 2), (1, 3)]), &rat(1, 5)));
        let tri = vec![v(&[(0, 1), (0, 1)]), v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)])];
        assert!(in_convex_hull(&tri, &v(&[(1, 4), (1, 4)]), &int(0)));
        assert!(!in_convex_hull(&tri, &v(&[(3, 4), (1, 2)]), &int(0)));
    }
}
