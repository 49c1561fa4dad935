//! Dense matrices and row-reduced subspaces over F_p.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Matrix unit `E_{ij}` (0-based indices).
    pub fn unit(field: &PrimeField, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        m.set(i, j, 1);
        m
    }

    /// Builds a matrix from integer rows, reducing entries mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: &PrimeField, rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(field, nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {} (expected {ncols})",
                    r.len()
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, field.reduce(v));
            }
        }
        Ok(m)
    }

    pub fn from_fn(
        field: &PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % field.p();
            }
        }
        m
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let f = &self.field;
        let p = f.p() as u64;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = self.field.add(*o, b);
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: Scalar) -> Matrix {
        let mut out = self.clone();
        for o in &mut out.data {
            *o = self.field.mul(*o, c);
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64 % p)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn hstack(blocks: &[Matrix]) -> Option<Matrix> {
        let first = blocks.first()?;
        let rows = first.rows;
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(&first.field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, off + j, b.get(i, j));
                }
            }
            off += b.cols;
        }
        Some(out)
    }

    pub fn vstack(field: &PrimeField, cols: usize, blocks: &[Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            out.data[off * cols..(off + b.rows) * cols].copy_from_slice(&b.data);
            off += b.rows;
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Self::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.cols];
                v[free] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, free));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(&[self.clone(), Matrix::identity(&self.field, n)])?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(&self.field, n, n, |i, j| r.get(i, n + j)))
    }

    /// Whether `self^p == 0`.
    pub fn is_p_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.field.p() as u64).is_zero()
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i + 1)).all(|j| self.get(i, j) == 0))
    }
}

/// A subspace of F_p^n stored as the nonzero rows of its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient_dim(), self.basis.to_rows())
    }
}

impl Subspace {
    pub fn span<V: AsRef<[Scalar]>>(field: &PrimeField, ambient_dim: usize, vectors: &[V]) -> Self {
        let mut m = Matrix::zeros(field, vectors.len(), ambient_dim);
        for (i, v) in vectors.iter().enumerate() {
            let v = v.as_ref();
            assert_eq!(v.len(), ambient_dim, "vector length differs from ambient dimension");
            for (j, &x) in v.iter().enumerate() {
                m.set(i, j, x % field.p());
            }
        }
        Self::row_space(&m)
    }

    pub fn row_space(m: &Matrix) -> Self {
        let (basis, pivots) = m.rref();
        Subspace { basis, pivots }
    }

    pub fn zero(field: &PrimeField, ambient_dim: usize) -> Self {
        Self::row_space(&Matrix::zeros(field, 0, ambient_dim))
    }

    pub fn full(field: &PrimeField, ambient_dim: usize) -> Self {
        Self::row_space(&Matrix::identity(field, ambient_dim))
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(field: &PrimeField, ambient_dim: usize, indices: &[usize]) -> Self {
        let vecs: Vec<Vec<Scalar>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![0; ambient_dim];
                v[i] = 1;
                v
            })
            .collect();
        Self::span(field, ambient_dim, &vecs)
    }

    /// Joint kernel of a matrix (vectors `x` with `m * x = 0`).
    pub fn kernel(m: &Matrix) -> Self {
        let ns = m.nullspace();
        Self::span(m.field(), m.cols(), &ns)
    }

    pub fn field(&self) -> &PrimeField {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.to_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let f = self.field();
        let coeffs: Vec<Scalar> = self.pivots.iter().map(|&c| v[c]).collect();
        let mut recon = vec![0; self.ambient_dim()];
        for (r, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, x) in recon.iter_mut().enumerate() {
                *x = f.add(*x, f.mul(c, self.basis.get(r, j)));
            }
        }
        (recon == v).then_some(coeffs)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        (0..self.dim()).all(|r| other.contains(self.basis.row(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let m = Matrix::vstack(self.field(), self.ambient_dim(), &[self.basis.clone(), other.basis.clone()]);
        Self::row_space(&m)
    }

    /// Functionals vanishing on the subspace, as rows of a matrix.
    pub fn annihilator(&self) -> Matrix {
        let ns = self.basis.nullspace();
        let mut m = Matrix::zeros(self.field(), ns.len(), self.ambient_dim());
        for (i, v) in ns.iter().enumerate() {
            for (j, &x) in v.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let m = Matrix::vstack(
            self.field(),
            self.ambient_dim(),
            &[self.annihilator(), other.annihilator()],
        );
        Self::kernel(&m)
    }

    /// Whether `op * v` stays inside the subspace for every basis vector `v`.
    pub fn is_invariant_under(&self, op: &Matrix) -> bool {
        (0..self.dim()).all(|r| self.contains(&op.apply(self.basis.row(r))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let field = f(5);
        let m = Matrix::from_rows(&field, &[[1, 2, 3], [2, 4, 6], [0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.apply(&ns[0]).iter().all(|&x| x == 0));
    }

    #[test]
    fn inverse_roundtrip() {
        let field = f(7);
        let m = Matrix::from_rows(&field, &[[1, 2], [3, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&field, 2));
        let sing = Matrix::from_rows(&field, &[[1, 2], [2, 4]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn subspace_ops() {
        let field = f(3);
        let a = Subspace::coordinate(&field, 3, &[0, 1]);
        let b = Subspace::coordinate(&field, 3, &[1, 2]);
        assert_eq!(a.intersection(&b), Subspace::coordinate(&field, 3, &[1]));
        assert!(a.sum(&b).is_full());
        assert!(Subspace::zero(&field, 3).is_subspace_of(&a));
        assert_eq!(a.coordinates(&[2, 1, 0]), Some(vec![2, 1]));
        assert_eq!(a.coordinates(&[2, 1, 1]), None);
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in proptest::collection::vec(proptest::collection::vec(0i64..5, 4), 1..6)) {
            let field = f(5);
            let m = Matrix::from_rows(&field, &rows).unwrap();
            prop_assert_eq!(m.rank() + m.nullspace().len(), 4);
            let s = Subspace::row_space(&m);
            let ann = s.annihilator();
            prop_assert_eq!(ann.rows() + s.dim(), 4);
            for v in s.basis_vectors() {
                prop_assert!(ann.apply(&v).iter().all(|&x| x == 0));
            }
        }
    }
}
