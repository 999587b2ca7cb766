//! Exact integer linear algebra: column Hermite form with a unimodular
//! transform, used to solve `A x = b` over ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Matrix = Vec<Vec<BigInt>>;

/// `A · U = H` with `U` unimodular and `H` in column echelon form.
#[derive(Clone, Debug)]
pub struct ColumnHermite {
    pub h: Matrix,
    pub u: Matrix,
    /// Row index of the pivot of each of the first `rank` columns.
    pub pivots: Vec<usize>,
}

impl ColumnHermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns of `U` spanning the integer kernel of `A`.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let cols = self.u.first().map_or(0, Vec::len);
        (self.rank()..cols).map(|j| self.u.iter().map(|row| row[j].clone()).collect()).collect()
    }
}

fn column_op(m: &mut Matrix, i: usize, j: usize, coeffs: [&BigInt; 4]) {
    // (col_i, col_j) ← (a·col_i + b·col_j, c·col_i + d·col_j)
    let [a, b, c, d] = coeffs;
    for row in m.iter_mut() {
        let (x, y) = (row[i].clone(), row[j].clone());
        row[i] = a * &x + b * &y;
        row[j] = c * &x + d * &y;
    }
}

fn swap_columns(m: &mut Matrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

pub fn column_hermite(a: &[Vec<i64>], cols: usize) -> ColumnHermite {
    let mut h: Matrix = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut u: Matrix = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..h.len() {
        if c == cols {
            break;
        }
        for j in c + 1..cols {
            if h[r][j].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                swap_columns(&mut h, c, j);
                swap_columns(&mut u, c, j);
                continue;
            }
            // Extended gcd: g = s·x + t·y; the 2×2 block [[s, -y/g], [t, x/g]]
            // has determinant 1.
            let (x, y) = (h[r][c].clone(), h[r][j].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let ny = -(&y / &g);
            let nx = &x / &g;
            column_op(&mut h, c, j, [&s, &t, &ny, &nx]);
            column_op(&mut u, c, j, [&s, &t, &ny, &nx]);
        }
        if !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                for row in h.iter_mut().chain(u.iter_mut()) {
                    row[c] = -&row[c];
                }
            }
            pivots.push(r);
            c += 1;
        }
    }
    ColumnHermite { h, u, pivots }
}

/// Why `A x = b` has no integer solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// `b − A·x` for the best partial solution: non-zero entries mark the
    /// equations that cannot be met.
    pub residual: Vec<i64>,
    /// `true` when even a rational solution fails to exist.
    pub rational: bool,
}

/// Some integer solution of `A x = b` (free coordinates set to 0).
pub fn solve_integer(a: &[Vec<i64>], b: &[i64], cols: usize) -> Result<(Vec<BigInt>, ColumnHermite), Obstruction> {
    let hnf = column_hermite(a, cols);
    let mut y: Vec<BigInt> = vec![BigInt::zero(); cols];
    let mut divisibility_failure = false;
    let mut residual = vec![0i64; b.len()];
    let mut next = 0;
    for (r, row) in hnf.h.iter().enumerate() {
        let partial: BigInt = (0..next).map(|j| &row[j] * &y[j]).sum();
        let rhs = BigInt::from(b[r]) - partial;
        if next < hnf.rank() && hnf.pivots[next] == r {
            let (q, rem) = rhs.div_rem(&row[next]);
            if !rem.is_zero() {
                divisibility_failure = true;
                residual[r] = rem.to_i64().unwrap_or(i64::MAX);
            }
            y[next] = q;
            next += 1;
        } else if !rhs.is_zero() {
            residual[r] = rhs.to_i64().unwrap_or(i64::MAX);
            return Err(Obstruction { residual, rational: true });
        }
    }
    if divisibility_failure {
        return Err(Obstruction { residual, rational: false });
    }
    let x = hnf
        .u
        .iter()
        .map(|row| row.iter().zip(&y).map(|(u, v)| u * v).sum())
        .collect();
    Ok((x, hnf))
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rounded_quotient(n: &BigInt, d: &BigInt) -> BigInt {
    // Nearest integer to n/d for d > 0.
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

/// Shortens `x` by subtracting integer combinations of kernel vectors,
/// greedily, until no single subtraction helps.
pub fn size_reduce(mut x: Vec<BigInt>, kernel: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut basis: Vec<Vec<BigInt>> = kernel.to_vec();
    // Pairwise-reduce the basis first so it is reasonably short.
    for _ in 0..50 {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj = dot(&basis[j], &basis[j]);
                if nj.is_zero() {
                    continue;
                }
                let t = rounded_quotient(&dot(&basis[i], &basis[j]), &nj);
                if !t.is_zero() {
                    let bj = basis[j].clone();
                    for (a, b) in basis[i].iter_mut().zip(&bj) {
                        *a -= &t * b;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for _ in 0..200 {
        let mut changed = false;
        for k in &basis {
            let nk = dot(k, k);
            if nk.is_zero() {
                continue;
            }
            let t = rounded_quotient(&dot(&x, k), &nk);
            if !t.is_zero() {
                let before = dot(&x, &x);
                let trial: Vec<BigInt> = x.iter().zip(k).map(|(a, b)| a - &t * b).collect();
                if dot(&trial, &trial) < before {
                    x = trial;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    x
}
