//! Finite fields `GF(p^k)` in polynomial basis.
//!
//! An element is a polynomial of degree `< k` over `GF(p)` reduced modulo a
//! monic irreducible `f` of degree `k`. Its canonical encoding is the integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` in `[0, q)`; matrices store these raw
//! encodings and call back into the [`Field`] for arithmetic.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_ORDER: u32 = 256;

/// Built-in moduli for the non-prime orders up to 64: for each `(p, k)` the
/// monic irreducible with the smallest encoding, constant term first.
const BUILTIN_MODULI: &[(u32, usize, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 0, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (7, 2, &[1, 0, 1]),
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

// Dense polynomials over GF(p), constant term first, no trailing zeros.

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] as u64 * lead_inv % p as u64;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = c * mi as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    out.into_iter().map(|c| c as u32).collect()
}

/// Monic polynomial of degree `d` whose lower coefficients are the base-`p`
/// digits of `index`.
fn monic_from_index(index: u64, d: usize, p: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(d + 1);
    let mut rest = index;
    for _ in 0..d {
        c.push((rest % p as u64) as u32);
        rest /= p as u64;
    }
    c.push(1);
    c
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, d, p);
            if poly_rem(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

struct FieldInner {
    p: u32,
    k: usize,
    q: u32,
    modulus: Vec<u32>,
    // q x q tables when q <= TABLE_ORDER
    add: Vec<u32>,
    mul: Vec<u32>,
    // exp[i] = g^i for a primitive g, log[exp[i]] = i; log[0] unused
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// A validated finite field `GF(p^k)`. Cheap to clone; clones share tables.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.0.p, self.0.k, self.0.modulus)
    }
}

impl fmt::Display for Field {
    /// `p k c0 c1 ... ck`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.0.p, self.0.k)?;
        for c in &self.0.modulus {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl Field {
    /// Builds `GF(p^k)`. Without a modulus, prime fields use `x` and the
    /// orders up to 64 use the built-in table.
    pub fn new(p: u64, k: usize, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("field degree must be at least 1"));
        }
        let q = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if q > MAX_ORDER as u128 {
            return Err(Error::FieldTooLarge(q.min(u64::MAX as u128) as u64));
        }
        let p32 = p as u32;
        let modulus: Vec<u32> = match modulus {
            Some(m) => m.to_vec(),
            None if k == 1 => vec![0, 1],
            None => BUILTIN_MODULI
                .iter()
                .find(|(bp, bk, _)| *bp == p32 && *bk == k)
                .map(|(_, _, m)| m.to_vec())
                .ok_or(Error::NoBuiltinModulus { p, k })?,
        };
        let valid_shape = modulus.len() == k + 1
            && modulus[k] == 1
            && modulus.iter().all(|&c| c < p32);
        if !valid_shape || !is_irreducible(&modulus, p32) {
            return Err(Error::ReducibleModulus { p, degree: k });
        }
        Ok(Field(Arc::new(FieldInner::build(p32, k, q as u32, modulus))))
    }

    /// The built-in field of order `q` (used by the matrix text format).
    pub fn builtin(q: u64) -> Result<Field> {
        let (p, k) = prime_power(q).ok_or(Error::NonPrime(q))?;
        Field::new(p, k, None)
    }

    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first (length `k + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            a ^ b
        } else if !f.add.is_empty() {
            f.add[(a * f.q + b) as usize]
        } else {
            f.digit_add(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.q == 2 {
            a & b
        } else if !f.mul.is_empty() {
            f.mul[(a * f.q + b) as usize]
        } else if a == 0 || b == 0 {
            0
        } else {
            let e = (f.log[a as usize] + f.log[b as usize]) % (f.q - 1);
            f.exp[e as usize]
        }
    }

    /// Inverse of a nonzero encoding; returns 0 for 0.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.0.inv[a as usize]
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.0.p as i64) as u32
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.0.q {
            return Err(Error::InvalidArgument("encoding out of range"));
        }
        Ok(FieldElement { field: self.clone(), value })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 1 }
    }

    /// All `q` elements in encoding order, zero first.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.0.q)
            .map(|value| FieldElement { field: self.clone(), value })
            .collect()
    }

    /// Base-`p` digits of an encoding (polynomial coefficients, length `k`).
    pub fn coeffs(&self, value: u32) -> Vec<u32> {
        self.0.digits(value)
    }
}

impl FieldInner {
    fn build(p: u32, k: usize, q: u32, modulus: Vec<u32>) -> FieldInner {
        let mut inner = FieldInner {
            p,
            k,
            q,
            modulus,
            add: Vec::new(),
            mul: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
        };
        inner.neg = (0..q)
            .map(|a| inner.encode(&inner.digits(a).iter().map(|&c| (p - c) % p).collect::<Vec<_>>()))
            .collect();
        inner.build_log_tables();
        if q <= TABLE_ORDER {
            let mut add = vec![0; (q * q) as usize];
            let mut mul = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = inner.digit_add(a, b);
                    mul[(a * q + b) as usize] = inner.slow_mul(a, b);
                }
            }
            inner.add = add;
            inner.mul = mul;
        }
        inner
    }

    fn digits(&self, mut value: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k);
        for _ in 0..self.k {
            out.push(value % self.p);
            value /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn digit_add(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mul(&self.digits(a), &self.digits(b), self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k, 0);
        self.encode(&r)
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let mut exp = vec![0; order as usize];
        let mut log = vec![0; q as usize];
        'candidates: for g in 1..q {
            let mut x = 1;
            for i in 0..order {
                if x == 1 && i > 0 {
                    continue 'candidates;
                }
                exp[i as usize] = x;
                x = self.slow_mul(x, g);
            }
            // x == g^order == 1 always; order is exactly q - 1 here
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            break;
        }
        let mut inv = vec![0; q as usize];
        for a in 1..q {
            let l = log[a as usize];
            inv[a as usize] = exp[((order - l) % order) as usize];
        }
        self.exp = exp;
        self.log = log;
        self.inv = inv;
    }
}

/// A field element bound to its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
    Pow(u64),
}

/// Applies `op` to one (`Inv`, `Neg`, `Pow`) or two (`Add`, `Sub`, `Mul`) operands.
pub fn field_arith(op: FieldOp, operands: &[FieldElement]) -> Result<FieldElement> {
    let arity = match op {
        FieldOp::Add | FieldOp::Sub | FieldOp::Mul => 2,
        _ => 1,
    };
    if operands.len() != arity {
        return Err(Error::InvalidArgument("wrong number of operands"));
    }
    let a = &operands[0];
    match op {
        FieldOp::Add => a.add(&operands[1]),
        FieldOp::Sub => a.sub(&operands[1]),
        FieldOp::Mul => a.mul(&operands[1]),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(a.neg()),
        FieldOp::Pow(e) => Ok(a.pow(e)),
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Canonical integer encoding in `[0, q)`.
    pub fn value(&self) -> u32 {
        self.value
    }

    /// Polynomial-basis coefficients, constant term first.
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    fn with(&self, value: u32) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.with(self.field.inv(self.value)))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.field.pow(self.value, e))
    }
}
