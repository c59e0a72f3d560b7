//! Exact ranks over the rationals by fraction-free (Bareiss) elimination
//! on arbitrary-precision integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Sparse row: `(column, coefficient)` pairs.
pub type SparseRow = Vec<(usize, i64)>;

/// Rank of a dense integer matrix.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            v.resize(cols, BigInt::zero());
            v
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    bareiss_rank(&mut m, cols)
}

/// Rank of a matrix given by sparse rows over `cols` columns.
pub fn rank_sparse(rows: &[SparseRow], cols: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|&(_, x)| x != 0))
        .map(|r| {
            let mut v = vec![BigInt::zero(); cols];
            for &(j, x) in r {
                v[j] += x;
            }
            v
        })
        .collect();
    bareiss_rank(&mut m, cols)
}

fn bareiss_rank(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}
