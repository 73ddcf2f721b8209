//! Maps between matrix algebras.
//!
//! A [`DeltaEmbedding`] is a (possibly non-unital) homomorphism
//! `M_m -> M_n` of the form `x -> Y (x^{(+)k} (+) 0_{n-mk}) Y^{-1}`, stored with
//! its conjugator `Y`. Its defect `(n - mk)/n` measures how far it is from
//! being unital; defect 0 means a genuine embedding. The inclusions
//! `iota_{n,m}(x) = x (x) 1_{n/m}` are the defect-0 case with a fixed shuffle
//! permutation as conjugator.
//!
//! A [`Homomorphism`] is the same kind of map described only by where it sends
//! the two shift generators of `M_m`; the images are validated against the
//! defining relations on construction.

use alloc::vec::Vec;

use crate::gf::Field;
use crate::matrix::{self, block_repeat, kassabov_generators, Matrix, RankDistance, Subspace};
use crate::{Error, Result};

/// Permutation `P` with `P (1_t (x) x) P^{-1} = x (x) 1_t` for `x` in `M_m`,
/// given as `perm[j]` = image of `e_j`.
pub fn shuffle_permutation(m: usize, t: usize) -> Vec<usize> {
    let mut perm = alloc::vec![0; m * t];
    for s in 0..t {
        for i in 0..m {
            perm[s * m + i] = i * t + s;
        }
    }
    perm
}

/// Permutation sending the layout `x^{(+)rs} (+) 0` (blocks of size `m`) onto
/// the nested layout `(x^{(+)r} (+) 0_{n-rm})^{(+)s} (+) 0` in dimension `big`:
/// block `t` of copy `c` sits at `c*n + t*m`.
pub(crate) fn gather_permutation(m: usize, n: usize, r: usize, s: usize, big: usize) -> Vec<usize> {
    let mut perm = alloc::vec![usize::MAX; big];
    let mut used = alloc::vec![false; big];
    for c in 0..s {
        for t in 0..r {
            let b = c * r + t;
            for i in 0..m {
                let target = c * n + t * m + i;
                perm[b * m + i] = target;
                used[target] = true;
            }
        }
    }
    let mut free = (0..big).filter(|&i| !used[i]);
    for slot in perm.iter_mut().skip(r * s * m) {
        *slot = free.next().expect("free slot");
    }
    perm
}

/// `iota_{n,m}(x) = x (x) 1_{n/m}`.
pub fn iota(n: usize, m: usize, x: &Matrix) -> Result<Matrix> {
    if m == 0 || n % m != 0 {
        return Err(Error::NotDivisor { m, n });
    }
    if !x.is_square() || x.rows() != m {
        return Err(Error::DimensionMismatch("iota argument must lie in M_m"));
    }
    x.kron(&Matrix::identity(x.field(), n / m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEmbedding {
    m: usize,
    n: usize,
    mult: usize,
    conjugator: Matrix,
    conjugator_inv: Matrix,
}

impl DeltaEmbedding {
    /// `x -> Y (x^{(+)mult} (+) 0) Y^{-1}` with `Y = conjugator` in `M_n`.
    pub fn new(m: usize, mult: usize, conjugator: Matrix) -> Result<DeltaEmbedding> {
        let conjugator_inv = conjugator.inverse()?;
        DeltaEmbedding::with_inverse(m, mult, conjugator, conjugator_inv)
    }

    fn with_inverse(
        m: usize,
        mult: usize,
        conjugator: Matrix,
        conjugator_inv: Matrix,
    ) -> Result<DeltaEmbedding> {
        let n = conjugator.rows();
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch("empty matrix algebra"));
        }
        if m * mult > n {
            return Err(Error::DimensionMismatch("m * mult exceeds target dimension"));
        }
        Ok(DeltaEmbedding { m, n, mult, conjugator, conjugator_inv })
    }

    /// The plain block map with identity conjugator.
    pub fn standard(field: &Field, m: usize, n: usize, mult: usize) -> Result<DeltaEmbedding> {
        let id = Matrix::identity(field, n);
        DeltaEmbedding::with_inverse(m, mult, id.clone(), id)
    }

    /// Block map with the largest multiplicity `floor(n/m)`.
    pub fn maximal(field: &Field, m: usize, n: usize) -> Result<DeltaEmbedding> {
        if m == 0 {
            return Err(Error::DimensionMismatch("empty matrix algebra"));
        }
        DeltaEmbedding::standard(field, m, n, n / m)
    }

    /// `iota_{n,m}` written as a block map; applies exactly like [`iota`].
    pub fn iota(field: &Field, n: usize, m: usize) -> Result<DeltaEmbedding> {
        if m == 0 || n % m != 0 {
            return Err(Error::NotDivisor { m, n });
        }
        let p = Matrix::permutation(field, &shuffle_permutation(m, n / m));
        let p_inv = p.transpose();
        DeltaEmbedding::with_inverse(m, n / m, p, p_inv)
    }

    pub fn source_dim(&self) -> usize {
        self.m
    }

    pub fn target_dim(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self) -> usize {
        self.mult
    }

    pub fn conjugator(&self) -> &Matrix {
        &self.conjugator
    }

    pub fn conjugator_inverse(&self) -> &Matrix {
        &self.conjugator_inv
    }

    pub fn field(&self) -> &Field {
        self.conjugator.field()
    }

    /// `(n - m * mult) / n`.
    pub fn delta(&self) -> RankDistance {
        RankDistance::new(self.n - self.m * self.mult, self.n)
    }

    pub fn is_unital(&self) -> bool {
        self.m * self.mult == self.n
    }

    pub fn padding(&self) -> usize {
        self.n - self.m * self.mult
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.field() != self.field() {
            return Err(Error::SpecMismatch);
        }
        if !x.is_square() || x.rows() != self.m {
            return Err(Error::DimensionMismatch("argument must lie in the source algebra"));
        }
        let blocks = block_repeat(x, self.mult, self.padding());
        Ok(&(&self.conjugator * &blocks) * &self.conjugator_inv)
    }

    /// `self . inner` as a single block map: the multiplicities multiply and
    /// the conjugator absorbs both conjugators plus a block-gathering
    /// permutation.
    pub fn compose(&self, inner: &DeltaEmbedding) -> Result<DeltaEmbedding> {
        if inner.n != self.m {
            return Err(Error::DimensionMismatch("inner target differs from outer source"));
        }
        if inner.field() != self.field() {
            return Err(Error::SpecMismatch);
        }
        let f = self.field();
        let (m, n, big) = (inner.m, inner.n, self.n);
        let (r, s) = (inner.mult, self.mult);

        // conj(inner)^{(+)s} (+) 1
        let mut lift = Matrix::identity(f, big);
        let mut lift_inv = Matrix::identity(f, big);
        for c in 0..s {
            lift.set_block(c * n, c * n, &inner.conjugator);
            lift_inv.set_block(c * n, c * n, &inner.conjugator_inv);
        }

        let perm = gather_permutation(m, n, r, s, big);
        let gather = Matrix::permutation(f, &perm);
        let gather_inv = gather.transpose();

        let conj = &(&self.conjugator * &lift) * &gather;
        let conj_inv = &(&gather_inv * &lift_inv) * &self.conjugator_inv;
        DeltaEmbedding::with_inverse(m, r * s, conj, conj_inv)
    }

    /// The same map conjugated once more: `x -> u phi(x) u^{-1}`.
    pub fn conjugated(&self, u: &Matrix) -> Result<DeltaEmbedding> {
        let u_inv = u.inverse()?;
        DeltaEmbedding::with_inverse(
            self.m,
            self.mult,
            u.checked_mul(&self.conjugator)?,
            self.conjugator_inv.checked_mul(&u_inv)?,
        )
    }

    /// Images of the two shift generators of `M_m`.
    pub fn generator_images(&self) -> (Matrix, Matrix) {
        let (a, b) = kassabov_generators(self.m, self.field());
        (self.apply(&a).expect("generator"), self.apply(&b).expect("generator"))
    }

    pub fn to_homomorphism(&self) -> Homomorphism {
        let (a, b) = self.generator_images();
        let unit = self.apply(&Matrix::identity(self.field(), self.m)).expect("unit");
        Homomorphism { m: self.m, n: self.n, a_img: a, b_img: b, unit }
    }
}

/// A homomorphism `M_m -> M_n` given by the images of the shift generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    m: usize,
    n: usize,
    a_img: Matrix,
    b_img: Matrix,
    unit: Matrix,
}

impl Homomorphism {
    /// Validates that the images satisfy the relations of `M_m` inside their
    /// corner algebra; the unit is read off from the relations. For `m = 1`
    /// the generators vanish and the map is taken to be unital.
    pub fn new(m: usize, a_img: Matrix, b_img: Matrix) -> Result<Homomorphism> {
        let unit = matrix::relations_hold(&a_img, &b_img, m)?;
        Ok(Homomorphism { m, n: a_img.rows(), a_img, b_img, unit })
    }

    /// `iota_{n,m}` by generator images.
    pub fn iota(field: &Field, n: usize, m: usize) -> Result<Homomorphism> {
        let (a, b) = kassabov_generators(m, field);
        Homomorphism::new(m, iota(n, m, &a)?, iota(n, m, &b)?)
    }

    pub fn source_dim(&self) -> usize {
        self.m
    }

    pub fn target_dim(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> (&Matrix, &Matrix) {
        (&self.a_img, &self.b_img)
    }

    pub fn unit_image(&self) -> &Matrix {
        &self.unit
    }

    pub fn field(&self) -> &Field {
        self.a_img.field()
    }

    pub fn is_unital(&self) -> bool {
        self.unit == Matrix::identity(self.field(), self.n)
    }

    /// Images of the matrix units `E_ij` of `M_m`.
    pub fn unit_images(&self) -> Vec<Vec<Matrix>> {
        let mut units = matrix::units_unchecked(&self.a_img, &self.b_img, self.m);
        if self.m == 1 {
            units[0][0] = self.unit.clone();
        }
        units
    }

    /// `phi(x) = sum x_ij phi(E_ij)`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.field() != self.field() {
            return Err(Error::SpecMismatch);
        }
        if !x.is_square() || x.rows() != self.m {
            return Err(Error::DimensionMismatch("argument must lie in the source algebra"));
        }
        let units = self.unit_images();
        let mut out = Matrix::zeros(self.field(), self.n, self.n);
        for (i, row) in units.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let c = x.get(i, j);
                if c != 0 {
                    out = &out + &e.scale(c);
                }
            }
        }
        Ok(out)
    }

    /// `x -> u phi(x) u^{-1}`.
    pub fn conjugated(&self, u: &Matrix) -> Result<Homomorphism> {
        let u_inv = u.inverse()?;
        let c = |x: &Matrix| -> Result<Matrix> { u.checked_mul(x)?.checked_mul(&u_inv) };
        Ok(Homomorphism {
            m: self.m,
            n: self.n,
            a_img: c(&self.a_img)?,
            b_img: c(&self.b_img)?,
            unit: c(&self.unit)?,
        })
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism> {
        if inner.n != self.m {
            return Err(Error::DimensionMismatch("inner target differs from outer source"));
        }
        Ok(Homomorphism {
            m: inner.m,
            n: self.n,
            a_img: self.apply(&inner.a_img)?,
            b_img: self.apply(&inner.b_img)?,
            unit: self.apply(&inner.unit)?,
        })
    }
}

/// Common target for `M_a` and `M_b`: `c = a * b` with both inclusions.
#[derive(Clone, Debug)]
pub struct JointEmbedding {
    pub c: usize,
    pub left: Homomorphism,
    pub right: Homomorphism,
}

pub fn joint_embed(field: &Field, a_dim: usize, b_dim: usize) -> Result<JointEmbedding> {
    let c = a_dim * b_dim;
    Ok(JointEmbedding {
        c,
        left: Homomorphism::iota(field, c, a_dim)?,
        right: Homomorphism::iota(field, c, b_dim)?,
    })
}

/// Basis `E_{i1} w_s` adapted to a unital copy of `M_m` in `M_n`: in this basis
/// the copy acts as `1_{n/m} (x) x`.
fn module_basis(phi: &Homomorphism) -> Result<Matrix> {
    let units = phi.unit_images();
    let column_space: Subspace = units[0][0].image();
    let t = column_space.dim();
    if t * phi.m != phi.n {
        return Err(Error::RelationsNotSatisfied);
    }
    let mut columns = Vec::with_capacity(phi.n);
    for w in column_space.basis() {
        for row in units.iter() {
            columns.push(row[0].mul_vec(w));
        }
    }
    Ok(Matrix::from_columns(phi.field(), phi.n, &columns))
}

/// A unit `u` with `u phi0(x) u^{-1} = phi1(x)` for all `x` in `M_a`.
pub fn skolem_noether_conjugator(phi0: &Homomorphism, phi1: &Homomorphism) -> Result<Matrix> {
    if phi0.field() != phi1.field() {
        return Err(Error::SpecMismatch);
    }
    if phi0.m != phi1.m || phi0.n != phi1.n {
        return Err(Error::DimensionMismatch("homomorphisms between different algebras"));
    }
    if !phi0.is_unital() || !phi1.is_unital() {
        return Err(Error::NotUnital);
    }
    let u0 = module_basis(phi0)?;
    let u1 = module_basis(phi1)?;
    u1.checked_mul(&u0.inverse()?)
}

/// Amalgam of two unital maps out of the same `M_a`.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub c: usize,
    pub psi0: Homomorphism,
    pub psi1: Homomorphism,
    /// `u_i` with `u_i phi_i u_i^{-1} = iota_{b_i, a}`.
    pub corrections: (Matrix, Matrix),
}

/// `psi_i = iota_{c,b_i} . conj(u_i)` with `c = b0 * b1`, so that
/// `psi0 . phi0 = psi1 . phi1 = iota_{c,a}` exactly.
pub fn amalgamate(phi0: &Homomorphism, phi1: &Homomorphism) -> Result<Amalgam> {
    if phi0.m != phi1.m {
        return Err(Error::DimensionMismatch("maps out of different algebras"));
    }
    if phi0.field() != phi1.field() {
        return Err(Error::SpecMismatch);
    }
    let f = phi0.field();
    let a = phi0.m;
    let c = phi0.n * phi1.n;
    let build = |phi: &Homomorphism| -> Result<(Homomorphism, Matrix)> {
        let b = phi.n;
        let standard = Homomorphism::iota(f, b, a)?;
        let u = skolem_noether_conjugator(phi, &standard)?;
        let correction = Homomorphism::iota(f, b, b)?.conjugated(&u)?;
        let psi = Homomorphism::iota(f, c, b)?.compose(&correction)?;
        Ok((psi, u))
    };
    let (psi0, u0) = build(phi0)?;
    let (psi1, u1) = build(phi1)?;
    Ok(Amalgam { c, psi0, psi1, corrections: (u0, u1) })
}
