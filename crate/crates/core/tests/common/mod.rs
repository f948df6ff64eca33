//! Independent oracles shared by the integration tests.

#![allow(dead_code, clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Solves `a x = b` exactly; `None` if `a` is singular.
pub fn solve_linear(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// `(x, v)` with `mᵀx = v·1` and `Σx = 1`, when unique.
fn equalizer(m: &[Vec<BigRational>]) -> Option<(Vec<BigRational>, BigRational)> {
    let k = m.len();
    let mut a = vec![vec![BigRational::zero(); k + 1]; k + 1];
    let mut b = vec![BigRational::zero(); k + 1];
    for j in 0..k {
        for i in 0..k {
            a[j][i] = m[i][j].clone();
        }
        a[j][k] = -BigRational::one();
    }
    for i in 0..k {
        a[k][i] = BigRational::one();
    }
    b[k] = BigRational::one();
    let mut s = solve_linear(a, b)?;
    let v = s.pop()?;
    Some((s, v))
}

/// Exact value of a zero-sum matrix game by enumerating square kernels.
///
/// After shifting all payoffs to be positive, some nonsingular square
/// submatrix carries an optimal pair of equalizing strategies; each candidate
/// is checked against every pure reply of the full game.
pub fn brute_force_value(pay: &[Vec<i64>]) -> BigRational {
    let rows = pay.len();
    let cols = pay[0].len();
    let shift = 1 - pay.iter().flatten().min().copied().unwrap();
    let b: Vec<Vec<BigRational>> = pay
        .iter()
        .map(|r| r.iter().map(|&x| q(x + shift)).collect())
        .collect();
    for k in 1..=rows.min(cols) {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let m: Vec<Vec<BigRational>> = rs.iter().map(|&i| cs.iter().map(|&j| b[i][j].clone()).collect()).collect();
                let Some((x, v)) = equalizer(&m) else { continue };
                if x.iter().any(|p| p.is_negative()) {
                    continue;
                }
                let mt: Vec<Vec<BigRational>> = (0..k).map(|j| (0..k).map(|i| m[i][j].clone()).collect()).collect();
                let Some((y, w)) = equalizer(&mt) else { continue };
                if y.iter().any(|p| p.is_negative()) || w != v {
                    continue;
                }
                let row_ok = (0..cols).all(|j| {
                    let s: BigRational = rs.iter().zip(&x).map(|(&i, p)| p * &b[i][j]).sum();
                    s >= v
                });
                let col_ok = (0..rows).all(|i| {
                    let s: BigRational = cs.iter().zip(&y).map(|(&j, p)| p * &b[i][j]).sum();
                    s <= v
                });
                if row_ok && col_ok {
                    return v - q(shift);
                }
            }
        }
    }
    panic!("no equalizing kernel found");
}
