use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::Matrix;
use crate::gf::Field;
use crate::{Error, Result};

/// A linear subspace of `F_q^n` held in canonical form: the basis vectors are
/// the nonzero rows of the reduced row echelon form of any spanning set, so
/// two subspaces are equal exactly when their bases are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient, &self.basis).cmp(&(other.ambient, &other.basis))
    }
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace { field: field.clone(), ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        Subspace::span(field, ambient, (0..ambient).map(|i| standard_vector(ambient, i)))
    }

    /// Canonical subspace spanned by `vectors` (each of length `ambient`).
    pub fn span<I>(field: &Field, ambient: usize, vectors: I) -> Subspace
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut data = Vec::new();
        let mut rows = 0;
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length");
            data.extend_from_slice(&v);
            rows += 1;
        }
        if rows == 0 || ambient == 0 {
            return Subspace::zero(field, ambient);
        }
        let m = Matrix { rows, cols: ambient, data, field: field.clone() };
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { field: field.clone(), ambient, basis, pivots }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical basis, pivot positions strictly increasing.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `ambient x dim` matrix whose columns are the canonical basis.
    pub fn to_columns(&self) -> Matrix {
        Matrix::from_columns(&self.field, self.ambient, &self.basis)
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::SpecMismatch);
        }
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch("subspaces of different ambient spaces"));
        }
        Ok(())
    }

    /// Reduces `v` against the canonical basis; zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                let neg = f.neg(c);
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(neg, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        Ok(Subspace::span(
            &self.field,
            self.ambient,
            self.basis.iter().chain(&other.basis).cloned(),
        ))
    }

    /// Vectors orthogonal to the subspace under the standard bilinear form.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(&self.field, self.ambient);
        }
        let m = Matrix::from_rows(&self.field, &self.basis).expect("basis rows");
        m.kernel()
    }

    /// Intersection as the kernel of the stacked annihilator constraints.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let constraints: Vec<Vec<u32>> = self
            .annihilator()
            .basis
            .into_iter()
            .chain(other.annihilator().basis)
            .collect();
        if constraints.is_empty() {
            return Ok(Subspace::full(&self.field, self.ambient));
        }
        Ok(Matrix::from_rows(&self.field, &constraints)?.kernel())
    }

    /// Image `m(S)`.
    pub fn apply(&self, m: &Matrix) -> Result<Subspace> {
        if m.field != self.field {
            return Err(Error::SpecMismatch);
        }
        if m.cols != self.ambient {
            return Err(Error::DimensionMismatch("matrix does not act on this space"));
        }
        Ok(Subspace::span(&self.field, m.rows, self.basis.iter().map(|b| m.mul_vec(b))))
    }

    /// Standard vectors `e_i`, taken greedily in index order, that extend the
    /// subspace to the whole space.
    pub fn complement_basis(&self) -> Vec<Vec<u32>> {
        let mut current = self.clone();
        let mut out = Vec::new();
        for i in 0..self.ambient {
            if current.dim() == self.ambient {
                break;
            }
            let e = standard_vector(self.ambient, i);
            if !current.contains(&e) {
                current = Subspace::span(
                    &self.field,
                    self.ambient,
                    current.basis.iter().cloned().chain(core::iter::once(e.clone())),
                );
                out.push(e);
            }
        }
        out
    }
}

pub(crate) fn standard_vector(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

impl Matrix {
    /// `m(S)` for a subspace `S`.
    pub fn apply(&self, s: &Subspace) -> Result<Subspace> {
        s.apply(self)
    }
}
