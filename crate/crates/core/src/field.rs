//! Prime fields `F_p` and dense matrices over them.

use crate::error::{Error, Result};

/// Coefficient field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self { p: 2 }
    }
}

impl FieldSpec {
    /// Accepts primes below 2^16 so products fit comfortably in `u64`.
    pub fn new(p: u32) -> Result<Self> {
        if !(2..1 << 16).contains(&p) || !(2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }

    fn pow(&self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `+1` or `-1` as a field element.
    pub fn sign(&self, odd: bool) -> u32 {
        if odd {
            self.p - 1
        } else {
            1
        }
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<u32>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Matrix {}x{} over F_{} ", self.rows, self.cols, self.field.p)?;
        f.debug_list().entries((0..self.rows).map(|r| &self.data[r * self.cols..(r + 1) * self.cols])).finish()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Self { rows, cols, field, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize, field: FieldSpec) -> Self {
        let mut m = Self::zeros(rows.len(), cols, field);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v % field.p);
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

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        assert_eq!(self.field, rhs.field, "field mismatch in product");
        let f = self.field;
        let mut out = Matrix::zeros(self.rows, rhs.cols, f);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b != 0 {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.clone().column_basis().cols
    }

    /// A matrix whose columns form a basis of this matrix's column space.
    pub fn column_basis(mut self) -> Matrix {
        // eliminate on the transpose's rows, i.e. our columns
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivot_col = 0;
        for r in 0..rows {
            if pivot_col == cols {
                break;
            }
            let Some(found) = (pivot_col..cols).find(|&c| self.get(r, c) != 0) else { continue };
            if found != pivot_col {
                for i in 0..rows {
                    self.data.swap(i * cols + found, i * cols + pivot_col);
                }
            }
            let inv = f.inv(self.get(r, pivot_col));
            for i in 0..rows {
                let v = self.get(i, pivot_col);
                self.set(i, pivot_col, f.mul(v, inv));
            }
            for c in 0..cols {
                if c == pivot_col {
                    continue;
                }
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                for i in 0..rows {
                    let v = f.sub(self.get(i, c), f.mul(factor, self.get(i, pivot_col)));
                    self.set(i, c, v);
                }
            }
            pivot_col += 1;
        }
        let mut out = Matrix::zeros(rows, pivot_col, f);
        for i in 0..rows {
            for c in 0..pivot_col {
                out.set(i, c, self.get(i, c));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primes() {
        for p in [0, 1, 4, 9, 15, 1 << 16] {
            assert!(FieldSpec::new(p).is_err(), "{p}");
        }
        for p in [2, 3, 5, 7, 65521] {
            assert!(FieldSpec::new(p).is_ok(), "{p}");
        }
    }

    #[test]
    fn inverses() {
        let f = FieldSpec::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.sub(f.add(a, 3), 3), a);
        }
    }

    #[test]
    fn rank_and_product() {
        let f = FieldSpec::new(2).unwrap();
        let m = Matrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3, f);
        assert_eq!(m.rank(), 2);
        let f3 = FieldSpec::new(3).unwrap();
        let m3 = Matrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3, f3);
        assert_eq!(m3.rank(), 3);
        let id = Matrix::identity(3, f3);
        assert_eq!(m3.mul(&id), m3);
        assert!(id.is_identity());
        assert_eq!(Matrix::zeros(0, 4, f).rank(), 0);
    }
}
