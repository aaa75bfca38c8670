//! Integer matrices and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has the wrong length");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Appends the rows of `other`, which must have the same width.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "column counts differ");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += k·row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(j, c)] * k;
            self[(i, c)] += v;
        }
    }

    /// col_i += k·col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, j)] * k;
            self[(r, i)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `D = U·M·V` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries, each dividing the next.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the remaining block becomes the pivot.
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&p| !d[p].is_zero())
            .min_by(|&a, &b| d[a].abs().cmp(&d[b].abs()));
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &-&q);
                u.add_row(i, t, &-&q);
                if !d[(i, t)].is_zero() {
                    // The remainder is smaller than the pivot: swap it in.
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &-&q);
                v.add_col(j, t, &-&q);
                if !d[(t, j)].is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&p| !d[p].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows.first().map_or(0, Vec::len), rows)
    }

    fn check(a: &IntMatrix) -> Vec<BigInt> {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(
                w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && w[1].is_multiple_of(&w[0])
            );
        }
        diag
    }

    #[test]
    fn examples() {
        assert_eq!(
            check(&m(&[vec![2, 0], vec![0, 3]])),
            vec![1.into(), 6.into()]
        );
        assert_eq!(
            check(&IntMatrix::zeros(2, 3)),
            vec![BigInt::zero(), BigInt::zero()]
        );
        assert_eq!(check(&IntMatrix::identity(3)), vec![BigInt::one(); 3]);
        assert_eq!(
            check(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]])),
            vec![2.into(), 6.into(), 12.into()]
        );
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[vec![1, 2], vec![3, 4]]).determinant(), BigInt::from(-2));
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(m(&[vec![2, 4], vec![1, 2]]).determinant(), BigInt::zero());
    }
}
