//! Dense matrices over `GF(q)` and the normalized rank metric.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use rand_core::RngCore;

use crate::gf::Field;
use crate::{Error, Rational, Result};

mod kassabov;
mod subspace;

pub use kassabov::{kassabov_generators, matrix_units, relation_unit, relations_hold};
pub(crate) use kassabov::units_unchecked;
pub use subspace::Subspace;

/// A dense row-major matrix of canonical field encodings.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    field: Field,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over GF({})", self.rows, self.cols, self.field.order())?;
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols], field: field.clone() }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(field: &Field, n: usize, value: u32) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        m
    }

    /// Matrix from row-major encodings; every entry must be below `q`.
    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count differs from rows * cols"));
        }
        if data.iter().any(|&v| v >= field.order()) {
            return Err(Error::InvalidArgument("entry is not a field encoding"));
        }
        Ok(Matrix { rows, cols, data, field: field.clone() })
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows"));
        }
        Matrix::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<u32>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    /// Permutation matrix sending `e_j` to `e_{perm[j]}`.
    pub fn permutation(field: &Field, perm: &[usize]) -> Matrix {
        let n = perm.len();
        let mut m = Matrix::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.data[i * n + j] = 1;
        }
        m
    }

    /// Uniformly random entries.
    pub fn random<R: RngCore + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let q = field.order();
        let data = (0..rows * cols).map(|_| rng.next_u32() % q).collect();
        Matrix { rows, cols, data, field: field.clone() }
    }

    /// Uniformly random invertible `n x n` matrix (rejection sampling).
    pub fn random_unit<R: RngCore + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    fn same_field(&self, other: &Matrix) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum"));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix difference"));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product"));
        }
        let f = &self.field;
        let n = other.cols;
        let mut out = vec![0u32; self.rows * n];
        for i in 0..self.rows {
            let acc = &mut out[i * n..(i + 1) * n];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[l * n..(l + 1) * n];
                if a == 1 {
                    for (dst, &b) in acc.iter_mut().zip(brow) {
                        *dst = f.add(*dst, b);
                    }
                } else {
                    for (dst, &b) in acc.iter_mut().zip(brow) {
                        *dst = f.add(*dst, f.mul(a, b));
                    }
                }
            }
        }
        Ok(Matrix { rows: self.rows, cols: n, data: out, field: f.clone() })
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let f = &self.field;
        Matrix { data: self.data.iter().map(|&a| f.mul(c, a)).collect(), ..self.clone() }
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Matrix::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(&self.field, rows, cols);
        for r in 0..rows {
            let src = (r0 + r) * self.cols + c0;
            m.data[r * cols..(r + 1) * cols].copy_from_slice(&self.data[src..src + cols]);
        }
        m
    }

    /// Reduced row echelon form and its pivot columns (Gauss-Jordan, first
    /// nonzero pivot in each column).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            if inv != 1 {
                for j in c..cols {
                    self.data[r * cols + j] = f.mul(inv, self.data[r * cols + j]);
                }
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for j in c..cols {
                    let pivot_entry = self.data[r * cols + j];
                    if pivot_entry != 0 {
                        let cur = self.data[i * cols + j];
                        self.data[i * cols + j] = f.add(cur, f.mul(neg, pivot_entry));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.field.order() == 2 {
            rank_gf2(self)
        } else {
            self.rank_generic()
        }
    }

    /// Rank through the generic elimination path regardless of field.
    pub fn rank_generic(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Matrix::identity(&self.field, n));
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(aug.submatrix(0, n, n, n))
    }

    /// `{ v : self * v = 0 }`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..self.cols).filter(|&c| !is_pivot[c]).map(|free| {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(row, free));
            }
            v
        });
        Subspace::span(f, self.cols, vectors)
    }

    /// Column span.
    pub fn image(&self) -> Subspace {
        Subspace::span(&self.field, self.rows, (0..self.cols).map(|c| self.column(c)))
    }

    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        let f = &self.field;
        let (r2, c2) = (other.rows, other.cols);
        let mut out = Matrix::zeros(f, self.rows * r2, self.cols * c2);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        out.set(i * r2 + k, j * c2 + l, f.mul(a, other.get(k, l)));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Block-diagonal matrix `blocks[0] (+) ... (+) 0_pad`.
pub fn direct_sum(field: &Field, blocks: &[Matrix], pad_zeros: usize) -> Result<Matrix> {
    if blocks.iter().any(|b| &b.field != field) {
        return Err(Error::SpecMismatch);
    }
    if blocks.iter().any(|b| !b.is_square()) {
        return Err(Error::DimensionMismatch("direct sum of non-square blocks"));
    }
    let n = blocks.iter().map(Matrix::rows).sum::<usize>() + pad_zeros;
    let mut out = Matrix::zeros(field, n, n);
    let mut at = 0;
    for b in blocks {
        out.set_block(at, at, b);
        at += b.rows;
    }
    Ok(out)
}

/// `x^{(+)k} (+) 0_pad`, the block layout of a block embedding.
pub fn block_repeat(x: &Matrix, copies: usize, pad_zeros: usize) -> Matrix {
    let m = x.rows;
    let mut out = Matrix::zeros(&x.field, m * copies + pad_zeros, m * copies + pad_zeros);
    for c in 0..copies {
        out.set_block(c * m, c * m, x);
    }
    out
}

/// Rank over GF(2) with rows packed into 64-bit words.
fn rank_gf2(m: &Matrix) -> usize {
    let words = m.cols.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|r| {
            let mut w = vec![0u64; words];
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0 {
                    w[c / 64] |= 1 << (c % 64);
                }
            }
            w
        })
        .collect();
    let mut rank = 0;
    for c in 0..m.cols {
        let (word, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][word] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[word] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.checked_add(rhs).expect("matrix sum")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.checked_sub(rhs).expect("matrix difference")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        let f = &self.field;
        Matrix { data: self.data.iter().map(|&a| f.neg(a)).collect(), ..self.clone() }
    }
}

/// Normalized rank distance `rank / dim`, kept as an exact fraction.
#[derive(Clone, Copy, Debug)]
pub struct RankDistance {
    pub rank: usize,
    pub dim: usize,
}

impl RankDistance {
    pub fn new(rank: usize, dim: usize) -> RankDistance {
        assert!(dim > 0 && rank <= dim, "rank distance {rank}/{dim}");
        RankDistance { rank, dim }
    }

    pub fn zero(dim: usize) -> RankDistance {
        RankDistance::new(0, dim)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(self.rank as i64, self.dim as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.rank as f64 / self.dim as f64
    }
}

impl PartialEq for RankDistance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RankDistance {}

impl PartialOrd for RankDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RankDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rank as u128 * other.dim as u128).cmp(&(other.rank as u128 * self.dim as u128))
    }
}

impl fmt::Display for RankDistance {
    /// Unreduced `rank/dim`, so the ambient dimension stays visible.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.rank, self.dim)
    }
}

impl From<RankDistance> for Rational {
    fn from(d: RankDistance) -> Rational {
        d.to_rational()
    }
}

/// `d(x, y) = rank(x - y) / n` on `M_n(F_q)`.
pub fn rank_distance(x: &Matrix, y: &Matrix) -> Result<RankDistance> {
    x.same_field(y)?;
    if !x.is_square() || !y.is_square() || x.rows != y.rows {
        return Err(Error::DimensionMismatch("rank distance needs equal square matrices"));
    }
    if x.rows == 0 {
        return Err(Error::DimensionMismatch("empty matrix"));
    }
    Ok(RankDistance::new(x.checked_sub(y)?.rank(), x.rows))
}

/// Normalized rank of a single square matrix, `d(x, 0)`.
pub fn normalized_rank(x: &Matrix) -> RankDistance {
    RankDistance::new(x.rank(), x.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn gf(q: u64) -> Field {
        Field::builtin(q).unwrap()
    }

    fn unit(f: &Field, i: usize, j: usize, n: usize) -> Matrix {
        let mut m = Matrix::zeros(f, n, n);
        m.set(i, j, 1);
        m
    }

    #[test]
    fn rank_examples() {
        let f2 = gf(2);
        assert_eq!(Matrix::identity(&f2, 4).rank(), 4);
        assert_eq!(Matrix::zeros(&f2, 3, 3).rank(), 0);
        let (a, _) = kassabov_generators(3, &f2);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn rank_distance_examples() {
        let f2 = gf(2);
        let i2 = Matrix::identity(&f2, 2);
        let z2 = Matrix::zeros(&f2, 2, 2);
        assert_eq!(rank_distance(&i2, &i2).unwrap(), RankDistance::zero(2));
        assert_eq!(rank_distance(&i2, &z2).unwrap().to_rational(), Rational::from(1));
        let d = rank_distance(&unit(&f2, 0, 0, 2), &z2).unwrap();
        assert_eq!(d.to_rational(), Rational::new(1, 2));
        assert_eq!(alloc::format!("{d}"), "1/2");
    }

    #[test]
    fn rank_distance_errors() {
        let f2 = gf(2);
        let f3 = gf(3);
        let a = Matrix::identity(&f2, 2);
        assert_eq!(
            rank_distance(&a, &Matrix::identity(&f2, 3)).unwrap_err().name(),
            "DimensionMismatch"
        );
        assert_eq!(
            rank_distance(&a, &Matrix::identity(&f3, 2)).unwrap_err().name(),
            "SpecMismatch"
        );
    }

    #[test]
    fn rank_distance_orders_by_value() {
        assert_eq!(RankDistance::new(1, 2), RankDistance::new(3, 6));
        assert!(RankDistance::new(1, 3) < RankDistance::new(1, 2));
    }

    #[test]
    fn kron_examples() {
        let f2 = gf(2);
        let mut rng = StdRng::seed_from_u64(7);
        let x = Matrix::random(&f2, 3, 3, &mut rng);
        assert_eq!(x.kron(&Matrix::identity(&f2, 1)).unwrap(), x);

        let e = unit(&f2, 0, 1, 2);
        assert_eq!(e.kron(&Matrix::identity(&f2, 3)).unwrap().rank(), 3);

        let lhs = x
            .kron(&Matrix::identity(&f2, 2))
            .unwrap()
            .kron(&Matrix::identity(&f2, 3))
            .unwrap();
        assert_eq!(lhs, x.kron(&Matrix::identity(&f2, 6)).unwrap());
    }

    #[test]
    fn kron_rank_is_multiplicative() {
        let f3 = gf(3);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let x = Matrix::random(&f3, 3, 3, &mut rng);
            let y = Matrix::random(&f3, 2, 2, &mut rng);
            assert_eq!(x.kron(&y).unwrap().rank(), x.rank() * y.rank());
        }
    }

    #[test]
    fn direct_sum_examples() {
        let f2 = gf(2);
        let mut rng = StdRng::seed_from_u64(3);
        let x = Matrix::random(&f2, 3, 3, &mut rng);
        assert_eq!(direct_sum(&f2, core::slice::from_ref(&x), 0).unwrap(), x);

        let one = Matrix::identity(&f2, 1);
        let d = direct_sum(&f2, &[one.clone(), one], 1).unwrap();
        assert_eq!(d.data(), &[1, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(d.rank(), 2);

        let (a, _) = kassabov_generators(2, &f2);
        let d = direct_sum(&f2, &[a.clone(), a.clone()], 1).unwrap();
        assert_eq!((d.rows(), d.rank()), (5, 2));
        assert_eq!(d, block_repeat(&a, 2, 1));
    }

    #[test]
    fn direct_sum_rejects_mixed_fields() {
        let err = direct_sum(&gf(2), &[Matrix::identity(&gf(3), 1)], 0).unwrap_err();
        assert_eq!(err, Error::SpecMismatch);
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let f5 = gf(5);
        let mut rng = StdRng::seed_from_u64(1);
        for n in 1..6 {
            let u = Matrix::random_unit(&f5, n, &mut rng);
            let inv = u.inverse().unwrap();
            assert_eq!(&u * &inv, Matrix::identity(&f5, n));
        }
        let s = Matrix::from_rows(&f5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.inverse().unwrap_err(), Error::Singular);
    }

    #[test]
    fn gf2_packed_rank_matches_generic() {
        let f2 = gf(2);
        let mut rng = StdRng::seed_from_u64(99);
        for &(r, c) in &[(1, 1), (5, 7), (7, 5), (64, 64), (70, 130), (130, 70)] {
            for _ in 0..5 {
                let m = Matrix::random(&f2, r, c, &mut rng);
                assert_eq!(m.rank(), m.rank_generic());
            }
            // low-rank products exercise dependent rows
            let a = Matrix::random(&f2, r, 3, &mut rng);
            let b = Matrix::random(&f2, 3, c, &mut rng);
            let p = &a * &b;
            assert_eq!(p.rank(), p.rank_generic());
        }
    }

    #[test]
    fn rank_nullity() {
        let mut rng = StdRng::seed_from_u64(5);
        for q in [2, 3, 4] {
            let f = gf(q);
            for _ in 0..20 {
                let m = Matrix::random(&f, 4, 6, &mut rng);
                let k = m.kernel();
                assert_eq!(k.dim() + m.rank(), 6);
                for v in k.basis() {
                    assert!(m.mul_vec(v).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn permutation_matrix_moves_basis_vectors() {
        let f2 = gf(2);
        let p = Matrix::permutation(&f2, &[2, 0, 1]);
        assert_eq!(p.mul_vec(&[1, 0, 0]), vec![0, 0, 1]);
        assert_eq!(&p * &p.transpose(), Matrix::identity(&f2, 3));
    }
}
