//! Exact integer lattice arithmetic: Smith normal form with transforms,
//! kernels, and sublattice quotients. All arithmetic is checked; overflow
//! surfaces as [`Error::Overflow`].

use crate::error::{Error, Result};

pub type IMat = Vec<Vec<i64>>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat, inner: usize, cols: usize) -> Result<IMat> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = 0i64;
                    for k in 0..inner {
                        s = add(s, mul(row[k], b[k][j])?)?;
                    }
                    Ok(s)
                })
                .collect()
        })
        .collect()
}

pub fn vec_mat(v: &[i64], m: &IMat, cols: usize) -> Result<Vec<i64>> {
    (0..cols)
        .map(|j| {
            let mut s = 0i64;
            for (k, &x) in v.iter().enumerate() {
                if x != 0 {
                    s = add(s, mul(x, m[k][j])?)?;
                }
            }
            Ok(s)
        })
        .collect()
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal,
/// `d[0] | d[1] | ...`, all positive. `v_inv` is the inverse of `v`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IMat,
    pub v: IMat,
    pub v_inv: IMat,
    pub diag: Vec<i64>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Columns of `v` past the rank: a basis of the integer kernel
    /// (`a x = 0`), returned as rows.
    pub fn kernel(&self) -> IMat {
        (self.rank()..self.cols)
            .map(|j| (0..self.cols).map(|i| self.v[i][j]).collect())
            .collect()
    }
}

struct Work {
    m: IMat,
    u: IMat,
    v: IMat,
    v_inv: IMat,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.m.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.m.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for mat in [&mut self.m, &mut self.u] {
            let src = mat[j].clone();
            for (x, s) in mat[i].iter_mut().zip(src) {
                *x = add(*x, mul(q, s)?)?;
            }
        }
        Ok(())
    }

    /// col_i += q * col_j, with the inverse row operation on `v_inv`.
    fn add_col(&mut self, i: usize, j: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for row in self.m.iter_mut().chain(self.v.iter_mut()) {
            row[i] = add(row[i], mul(q, row[j])?)?;
        }
        let src = self.v_inv[i].clone();
        for (x, s) in self.v_inv[j].iter_mut().zip(src) {
            *x = add(*x, mul(-q, s)?)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.m[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -*x;
        }
    }
}

/// Smith normal form of an `rows x cols` matrix.
pub fn smith(a: &IMat, rows: usize, cols: usize) -> Result<Snf> {
    let mut w = Work {
        m: a.clone(),
        u: identity(rows),
        v: identity(cols),
        v_inv: identity(cols),
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = w.m[i][j];
                if x != 0
                    && best.is_none_or(|(bi, bj)| x.unsigned_abs() < w.m[bi][bj].unsigned_abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            let p = w.m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = w.m[i][t].div_euclid(p);
                w.add_row(i, t, -q)?;
                if w.m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = w.m[t][j].div_euclid(p);
                w.add_col(j, t, -q)?;
                if w.m[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                let mut best = (t, t);
                for i in t..rows {
                    let x = w.m[i][t];
                    if x != 0 && x.unsigned_abs() < w.m[best.0][best.1].unsigned_abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    let x = w.m[t][j];
                    if x != 0 && x.unsigned_abs() < w.m[best.0][best.1].unsigned_abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // divisibility of the remaining block
            let mut fix = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if w.m[i][j] % p != 0 {
                        fix = Some(i);
                        break 'scan;
                    }
                }
            }
            match fix {
                Some(i) => w.add_row(t, i, 1)?,
                None => break,
            }
        }
        if w.m[t][t] < 0 {
            w.negate_row(t);
        }
        diag.push(w.m[t][t]);
        t += 1;
    }
    Ok(Snf {
        u: w.u,
        v: w.v,
        v_inv: w.v_inv,
        diag,
        rows,
        cols,
    })
}

/// Rank over the rationals.
pub fn rank(a: &IMat, cols: usize) -> Result<usize> {
    Ok(smith(a, a.len(), cols)?.rank())
}

/// Basis (as rows) of `{x in Z^cols : a x = 0}`; saturated by construction.
pub fn kernel(a: &IMat, cols: usize) -> Result<IMat> {
    Ok(smith(a, a.len(), cols)?.kernel())
}

/// Basis of the row lattice spanned by `gens`.
pub fn row_basis(gens: &IMat, cols: usize) -> Result<IMat> {
    let s = smith(gens, gens.len(), cols)?;
    // rows of d * v_inv span the same lattice as gens
    (0..s.rank())
        .map(|k| s.v_inv[k].iter().map(|&x| mul(x, s.diag[k])).collect())
        .collect()
}

/// Quotient of the lattice with basis `basis` (rows, independent) by the
/// sublattice spanned by `sub` (each row must lie in the lattice).
#[derive(Debug, Clone)]
pub struct Quotient {
    /// Rows completing an adapted basis: their images generate the quotient.
    pub free_basis: IMat,
    /// Invariant factors greater than one (torsion of the quotient).
    pub torsion: Vec<i64>,
    pub sub_rank: usize,
}

/// Coordinates of `x` in the row basis `basis`, if `x` lies in its span.
pub fn coordinates(basis: &IMat, x: &[i64], cols: usize) -> Result<Option<Vec<i64>>> {
    let k = basis.len();
    let s = smith(basis, k, cols)?;
    // x = c * basis  <=>  x v = (c u^-1) d
    let xv = vec_mat(x, &s.v, cols)?;
    let mut y = vec![0i64; k];
    for j in 0..cols {
        if j < s.rank() {
            if xv[j] % s.diag[j] != 0 {
                return Ok(None);
            }
            y[j] = xv[j] / s.diag[j];
        } else if xv[j] != 0 {
            return Ok(None);
        }
    }
    // c = y u
    Ok(Some(vec_mat(&y, &s.u, k)?))
}

pub fn quotient(basis: &IMat, sub: &IMat, cols: usize) -> Result<Quotient> {
    let k = basis.len();
    let mut coords = Vec::with_capacity(sub.len());
    for row in sub {
        coords.push(
            coordinates(basis, row, cols)?.ok_or_else(|| {
                Error::Invariant("sublattice generator outside the lattice".into())
            })?,
        );
    }
    let s = smith(&coords, coords.len(), k)?;
    // new basis rows: v_inv * basis; the sublattice is spanned by d_t times the first rows
    let adapted = mat_mul(&s.v_inv, basis, k, cols)?;
    let torsion = s.diag.iter().copied().filter(|&d| d > 1).collect();
    Ok(Quotient {
        free_basis: adapted[s.rank()..].to_vec(),
        torsion,
        sub_rank: s.rank(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IMat, rows: usize, cols: usize) {
        let s = smith(a, rows, cols).unwrap();
        let ua = mat_mul(&s.u, a, rows, cols).unwrap();
        let uav = mat_mul(&ua, &s.v, cols, cols).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                let expect = if i == j && i < s.rank() { s.diag[i] } else { 0 };
                assert_eq!(uav[i][j], expect);
            }
        }
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        let vv = mat_mul(&s.v, &s.v_inv, cols, cols).unwrap();
        assert_eq!(vv, identity(cols));
    }

    #[test]
    fn small_examples() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        check(&a, 3, 3);
        assert_eq!(smith(&a, 3, 3).unwrap().diag, vec![2, 6, 12]);
        let z = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(smith(&z, 2, 2).unwrap().rank(), 0);
    }

    #[test]
    fn kernel_and_quotient() {
        // x + y + z = 0 in Z^3
        let k = kernel(&vec![vec![1, 1, 1]], 3).unwrap();
        assert_eq!(k.len(), 2);
        for row in &k {
            assert_eq!(row.iter().sum::<i64>(), 0);
        }
        let q = quotient(&identity(2), &vec![vec![2, 0]], 2).unwrap();
        assert_eq!(q.free_basis.len(), 1);
        assert_eq!(q.torsion, vec![2]);
    }

    proptest! {
        #[test]
        fn snf_reconstructs(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-6i64..7, 25)) {
            let a: IMat = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            check(&a, rows, cols);
            let s = smith(&a, rows, cols).unwrap();
            for row in s.kernel() {
                for arow in &a {
                    prop_assert_eq!(arow.iter().zip(&row).map(|(x, y)| x * y).sum::<i64>(), 0);
                }
            }
        }
    }
}
