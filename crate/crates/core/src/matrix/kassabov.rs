//! The two shift matrices generating `M_n(F_p)` as a ring, with relations
//! `a^n = b^n = 0` and `ba + (p+1) a^{n-1} b^{n-1} = 1`.

use alloc::vec::Vec;

use super::Matrix;
use crate::gf::Field;
use crate::{Error, Result};

/// `a` is the lower shift (`a e_i = e_{i+1}`), `b` the upper shift
/// (`b e_{i+1} = e_i`).
pub fn kassabov_generators(n: usize, field: &Field) -> (Matrix, Matrix) {
    let mut a = Matrix::zeros(field, n, n);
    let mut b = Matrix::zeros(field, n, n);
    for i in 0..n.saturating_sub(1) {
        a.set(i + 1, i, 1);
        b.set(i, i + 1, 1);
    }
    (a, b)
}

/// `ba + (p+1) a^{n-1} b^{n-1}`. For an exact generator pair this is the unit
/// of the algebra they generate. The coefficient `p + 1` is reduced in the
/// field, where it equals 1.
pub fn relation_unit(a: &Matrix, b: &Matrix, n: usize) -> Matrix {
    assert!(n >= 1, "model dimension must be positive");
    let f = a.field();
    let coeff = f.from_int(f.characteristic() as i64 + 1);
    let top = &a.pow(n as u32 - 1) * &b.pow(n as u32 - 1);
    &(b * a) + &top.scale(coeff)
}

/// Whether `(a, b)` satisfy the relations of `M_n` inside the corner algebra
/// `e M e`, where `e` is their [`relation_unit`]. Returns that unit.
pub fn relations_hold(a: &Matrix, b: &Matrix, n: usize) -> Result<Matrix> {
    if a.field() != b.field() {
        return Err(Error::SpecMismatch);
    }
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("generators must be equal square matrices"));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("model dimension must be positive"));
    }
    if !a.pow(n as u32).is_zero() || !b.pow(n as u32).is_zero() {
        return Err(Error::RelationsNotSatisfied);
    }
    let e = relation_unit(a, b, n);
    let idempotent = &e * &e == e;
    let absorbs = &e * a == *a && &(a * &e) == a && &e * b == *b && &(b * &e) == b;
    if idempotent && absorbs {
        Ok(e)
    } else {
        Err(Error::RelationsNotSatisfied)
    }
}

/// Matrix units `E_{ij} = b^{n-i} (a^{n-1} b^{n-1}) a^{n-j}` (1-based) of the
/// copy of `M_n` generated by an exact pair. `result[i][j]` is `E_{i+1,j+1}`.
pub fn matrix_units(a: &Matrix, b: &Matrix, n: usize) -> Result<Vec<Vec<Matrix>>> {
    relations_hold(a, b, n)?;
    Ok(units_unchecked(a, b, n))
}

pub(crate) fn units_unchecked(a: &Matrix, b: &Matrix, n: usize) -> Vec<Vec<Matrix>> {
    let a_pows: Vec<Matrix> = (0..n).map(|e| a.pow(e as u32)).collect();
    let b_pows: Vec<Matrix> = (0..n).map(|e| b.pow(e as u32)).collect();
    let corner = &a_pows[n - 1] * &b_pows[n - 1];
    // left[i] = b^{n-1-i} E_nn, right[j] = a^{n-1-j} (0-based)
    let left: Vec<Matrix> = (0..n).map(|i| &b_pows[n - 1 - i] * &corner).collect();
    (0..n)
        .map(|i| (0..n).map(|j| &left[i] * &a_pows[n - 1 - j]).collect())
        .collect()
}
