//! Exact dense linear algebra over the integers and rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Determinant by fraction-free (Bareiss) elimination.
pub(crate) fn determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn to_rational(matrix: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    matrix
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Inverse over the rationals by Gauss-Jordan elimination, `None` when
/// singular.
pub(crate) fn inverse(matrix: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let n = matrix.len();
    let mut a = to_rational(matrix);
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let (aj, ij) = (a[col][j].clone(), inv[col][j].clone());
                a[i][j] -= &f * aj;
                inv[i][j] -= &f * ij;
            }
        }
    }
    Some(inv)
}

/// Some rational solution `x` of `sum_k x_k columns[k] = target`, or `None`
/// when `target` is outside the column span. Free variables are set to 0.
pub(crate) fn solve_in_span(columns: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let cols = columns.len();
    // Augmented matrix: rows x (cols + 1).
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            columns
                .iter()
                .map(|c| BigRational::from_integer(c[i].clone()))
                .chain(std::iter::once(BigRational::from_integer(target[i].clone())))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for x in a[row].iter_mut() {
            *x /= &pv;
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, v) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &f * v;
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if a[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Leibniz expansion, for cross-checking on small matrices.
    fn leibniz(a: &[Vec<BigInt>]) -> BigInt {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        perms(a.len())
            .into_iter()
            .map(|p| {
                let inversions = (0..p.len())
                    .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod: BigInt = p.iter().enumerate().map(|(i, &j)| a[i][j].clone()).product();
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .sum()
    }

    #[test]
    fn determinant_matches_leibniz() {
        let cases = [
            m(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 3, 0], &[1, 0, 0, 0]]),
            m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]),
            m(&[&[1, 2], &[2, 4]]),
            m(&[&[0, 5, 1], &[3, 0, 7], &[2, 9, 0]]),
        ];
        for a in &cases {
            assert_eq!(determinant(a), leibniz(a));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: BigRational = (0..3)
                    .map(|k| BigRational::from_integer(a[i][k].clone()) * &inv[k][j])
                    .sum();
                assert_eq!(
                    s,
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                );
            }
        }
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn span_membership() {
        // columns (1,1,0) and (0,2,2)
        let cols = m(&[&[1, 1, 0], &[0, 2, 2]]);
        let x = solve_in_span(&cols, &m(&[&[3, 4, 1]])[0]).unwrap();
        assert_eq!(x[0], BigRational::from_integer(3.into()));
        assert_eq!(x[1], BigRational::new(1.into(), 2.into()));
        assert!(solve_in_span(&cols, &m(&[&[1, 0, 0]])[0]).is_none());
    }
}
