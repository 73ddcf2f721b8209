//! Copies of `M_a` inside `M_b`, the explicit Ramsey dimension bound, and
//! exhaustive oscillation experiments at sizes small enough to enumerate.
//!
//! A copy is identified by its fingerprint: the canonical echelon basis of its
//! linear span inside `M_c`, flattened row-major into `F_q^{c^2}`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Signed;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::gf::Field;
use crate::matrix::{rank_distance, relations_hold, units_unchecked, Matrix, Subspace};
use crate::{format_rational, Error, Rational, Result};

/// Largest number of matrices any enumeration here will walk through.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// `prod_{i<n} (q^n - q^i)`.
pub fn gl_order(n: usize, q: u64) -> Result<u128> {
    if n == 0 || q < 2 {
        return Err(Error::InvalidArgument("gl_order needs n >= 1 and q >= 2"));
    }
    let q = q as u128;
    let too_large = Error::TooLarge("group order exceeds 128 bits");
    let qn = q.checked_pow(n as u32).ok_or(too_large.clone())?;
    let mut order = 1u128;
    let mut qi = 1u128;
    for _ in 0..n {
        order = order.checked_mul(qn - qi).ok_or(too_large.clone())?;
        qi *= q;
    }
    Ok(order)
}

/// `|SL_n(F_q)| = |GL_n(F_q)| / (q - 1)`, which is also `|Aut(M_n(F_q))|`.
pub fn sl_order(n: usize, q: u64) -> Result<u128> {
    Ok(gl_order(n, q)? / (q as u128 - 1))
}

fn enumeration_size(q: u32, entries: usize) -> Result<u64> {
    let size = (q as u64).checked_pow(entries as u32).filter(|&s| s <= ENUMERATION_LIMIT);
    size.ok_or(Error::TooLarge("enumeration exceeds the limit"))
}

/// Every `n x n` matrix over the field, in order of the base-`q` integer
/// whose least significant digit is entry `(0, 0)`.
pub fn all_matrices(field: &Field, n: usize) -> Result<impl Iterator<Item = Matrix> + '_> {
    let q = field.order();
    let total = enumeration_size(q, n * n)?;
    Ok((0..total).map(move |mut idx| {
        let mut data = alloc::vec![0u32; n * n];
        for slot in data.iter_mut() {
            *slot = (idx % q as u64) as u32;
            idx /= q as u64;
        }
        Matrix::from_vec(field, n, n, data).expect("square shape")
    }))
}

/// The invertible matrices of [`all_matrices`], in the same order.
pub fn general_linear(field: &Field, n: usize) -> Result<Vec<Matrix>> {
    Ok(all_matrices(field, n)?.filter(Matrix::is_invertible).collect())
}

fn flatten_span(field: &Field, c: usize, mats: &[Matrix]) -> Subspace {
    Subspace::span(field, c * c, mats.iter().map(|m| m.data().to_vec()))
}

/// `E_ij (x) 1_{c/a}` for all `i, j`.
fn standard_units(field: &Field, a: usize, c: usize) -> Vec<Matrix> {
    let id = Matrix::identity(field, c / a);
    let mut out = Vec::with_capacity(a * a);
    for i in 0..a {
        for j in 0..a {
            let mut e = Matrix::zeros(field, a, a);
            e.set(i, j, 1);
            out.push(e.kron(&id).expect("kron"));
        }
    }
    out
}

/// Fingerprint of `g (M_a (x) 1) g^{-1}` inside `M_c`, `c = g.rows()`.
pub fn conjugate_copy(g: &Matrix, a: usize) -> Result<Subspace> {
    let c = g.rows();
    if a == 0 || c % a != 0 {
        return Err(Error::NotDivisor { m: a, n: c });
    }
    let f = g.field();
    let g_inv = g.inverse()?;
    let conj: Vec<Matrix> = standard_units(f, a, c).iter().map(|e| &(g * e) * &g_inv).collect();
    Ok(flatten_span(f, c, &conj))
}

/// The set `binom(C, A)` of copies of `M_a` inside `M_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopySet {
    pub a_dim: usize,
    pub c_dim: usize,
    pub copies: Vec<Subspace>,
}

impl CopySet {
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    /// Each copy is closed under multiplication and contains the identity of
    /// `M_c`.
    pub fn copies_are_unital_subalgebras(&self) -> bool {
        let c = self.c_dim;
        self.copies.iter().all(|s| {
            let f = s.field();
            let mats: Vec<Matrix> = s
                .basis()
                .iter()
                .map(|v| Matrix::from_vec(f, c, c, v.clone()).expect("flattened"))
                .collect();
            s.contains(Matrix::identity(f, c).data())
                && mats.iter().all(|x| mats.iter().all(|y| s.contains((x * y).data())))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    /// `|Aut(B)| / |Stab(A (x) 1)|` with the stabilizer enumerated.
    OrbitStabilizer,
    /// Distinct fingerprints of all conjugates of `A (x) 1`.
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyCount {
    pub k: u128,
    pub method: CountMethod,
    /// The enumerated copies (brute force only).
    pub copies: Option<CopySet>,
    /// `|Stab_{GL}(A (x) 1)|` (orbit-stabilizer only).
    pub stabilizer: Option<u128>,
}

fn check_divides(a: usize, b: usize) -> Result<()> {
    if a == 0 || b == 0 || b % a != 0 {
        return Err(Error::NotDivisor { m: a, n: b });
    }
    Ok(())
}

/// `k = |binom(M_b, M_a)|`.
pub fn count_copies(a: usize, b: usize, field: &Field, method: CountMethod) -> Result<CopyCount> {
    check_divides(a, b)?;
    match method {
        CountMethod::BruteForce => {
            let copies = copy_census(a, b, field)?;
            Ok(CopyCount { k: copies.len() as u128, method, copies: Some(copies), stabilizer: None })
        }
        CountMethod::OrbitStabilizer => {
            let q = field.order() as u64;
            let base = conjugate_copy(&Matrix::identity(field, b), a)?;
            let mut stab = 0u128;
            for g in general_linear(field, b)? {
                if conjugate_copy(&g, a)? == base {
                    stab += 1;
                }
            }
            let aut = sl_order(b, q)?;
            let stab_aut = stab / (q as u128 - 1);
            assert_eq!(aut % stab_aut, 0, "stabilizer order must divide |Aut(B)|");
            Ok(CopyCount { k: aut / stab_aut, method, copies: None, stabilizer: Some(stab) })
        }
    }
}

/// All conjugates `g (M_a (x) 1) g^{-1}`, `g` in `GL_b`, deduplicated and
/// sorted by fingerprint.
pub fn copy_census(a: usize, b: usize, field: &Field) -> Result<CopySet> {
    check_divides(a, b)?;
    let mut seen = BTreeSet::new();
    for g in general_linear(field, b)? {
        seen.insert(conjugate_copy(&g, a)?);
    }
    Ok(CopySet { a_dim: a, c_dim: b, copies: seen.into_iter().collect() })
}

/// Unital copies of `M_a` in `M_b` found without conjugating anything: for
/// `a = 2`, every pair `x, y` with `x^2 = y^2 = 0` and `yx + xy = 1`, where
/// `y` is obtained by solving the linear equation for each square-zero `x`.
/// For `a = 1` the only copy is the scalars.
pub fn copies_from_relations(a: usize, b: usize, field: &Field) -> Result<CopySet> {
    check_divides(a, b)?;
    let mut seen = BTreeSet::new();
    match a {
        1 => {
            seen.insert(flatten_span(field, b, &[Matrix::identity(field, b)]));
        }
        2 => {
            let n2 = b * b;
            let one = Matrix::identity(field, b);
            for x in all_matrices(field, b)? {
                if !(&x * &x).is_zero() || x.rank() * 2 != b {
                    continue;
                }
                // columns: images of the unit matrices y = E_rc under y -> yx + xy
                let mut cols = Vec::with_capacity(n2);
                for idx in 0..n2 {
                    let mut e = Matrix::zeros(field, b, b);
                    e.set(idx / b, idx % b, 1);
                    cols.push((&(&e * &x) + &(&x * &e)).data().to_vec());
                }
                let lin = Matrix::from_columns(field, n2, &cols);
                let Some(y0) = solve(&lin, one.data()) else { continue };
                let kernel = lin.kernel();
                for y in affine_points(field, &y0, &kernel)? {
                    let y = Matrix::from_vec(field, b, b, y)?;
                    if relations_hold(&x, &y, 2).is_ok_and(|e| e == one) {
                        let units: Vec<Matrix> = units_unchecked(&x, &y, 2).into_iter().flatten().collect();
                        seen.insert(flatten_span(field, b, &units));
                    }
                }
            }
        }
        _ if a == b => {
            seen.insert(Subspace::full(field, b * b));
        }
        _ => return Err(Error::InvalidArgument("independent census needs a in {1, 2, b}")),
    }
    Ok(CopySet { a_dim: a, c_dim: b, copies: seen.into_iter().collect() })
}

/// A particular solution of `m v = rhs`, if any.
fn solve(m: &Matrix, rhs: &[u32]) -> Option<Vec<u32>> {
    let f = m.field();
    let mut aug = Matrix::zeros(f, m.rows(), m.cols() + 1);
    aug.set_block(0, 0, m);
    for (r, &v) in rhs.iter().enumerate() {
        aug.set(r, m.cols(), v);
    }
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut sol = alloc::vec![0; m.cols()];
    for (row, &p) in pivots.iter().enumerate() {
        sol[p] = red.get(row, m.cols());
    }
    Some(sol)
}

fn affine_points(field: &Field, base: &[u32], dir: &Subspace) -> Result<Vec<Vec<u32>>> {
    let q = field.order();
    let total = enumeration_size(q, dir.dim())?;
    let mut out = Vec::with_capacity(total as usize);
    for mut idx in 0..total {
        let mut v = base.to_vec();
        for b in dir.basis() {
            let c = (idx % q as u64) as u32;
            idx /= q as u64;
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(c, y));
                }
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Which `k` enters the Ramsey bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KMode {
    /// The exact count when enumeration is feasible, else the envelope.
    Auto,
    /// `k = q^{b^2}`.
    Envelope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RamseyBound {
    /// `None` in envelope mode, where `k = q^{b^2}` may not fit any integer.
    pub k: Option<u128>,
    pub envelope: bool,
    /// `64 / eps^2`
    pub coefficient: Rational,
    /// Winning argument of the maximum, rendered (`12`, `2*2^4`).
    pub log_argument: String,
    pub bound: f64,
    pub c: usize,
}

impl RamseyBound {
    /// `coefficient*ln(argument)`.
    pub fn expression(&self) -> String {
        let coef = if *self.coefficient.denom() == 1 {
            alloc::format!("{}", self.coefficient.numer())
        } else {
            format_rational(&self.coefficient)
        };
        alloc::format!("{}*ln({})", coef, self.log_argument)
    }
}

/// Smallest multiple `c` of `b` with
/// `c > 64 eps^{-2} max{ln(2k), ln(6 ceil(1/eps))}`, natural logarithm.
pub fn ramsey_dimension(a: usize, b: usize, field: &Field, eps: Rational, mode: KMode) -> Result<RamseyBound> {
    check_divides(a, b)?;
    if eps <= Rational::from_integer(0) || eps > Rational::from_integer(1) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1]"));
    }
    let q = field.order() as u64;
    let exact = match mode {
        KMode::Envelope => None,
        KMode::Auto => {
            if a == b || a == 1 {
                Some(1)
            } else {
                match count_copies(a, b, field, CountMethod::OrbitStabilizer) {
                    Ok(c) => Some(c.k),
                    Err(Error::TooLarge(_)) => None,
                    Err(e) => return Err(e),
                }
            }
        }
    };
    let (ln_2k, arg_2k) = match exact {
        Some(k) => (libm::log(2.0 * k as f64), alloc::format!("{}", 2 * k)),
        None => (
            core::f64::consts::LN_2 + (b * b) as f64 * libm::log(q as f64),
            alloc::format!("2*{}^{}", q, b * b),
        ),
    };
    let inv = eps.recip();
    let ceil_inv = inv.ceil().to_integer();
    let six = ceil_inv.checked_mul(6).ok_or(Error::TooLarge("1/eps"))?;
    let ln_6 = libm::log(six as f64);
    let sq = inv.numer().checked_mul(*inv.numer()).ok_or(Error::TooLarge("eps^-2"))?;
    let sq_den = inv.denom().checked_mul(*inv.denom()).ok_or(Error::TooLarge("eps^-2"))?;
    let coefficient = Rational::new(sq.checked_mul(64).ok_or(Error::TooLarge("eps^-2"))?, sq_den);
    let (ln_max, log_argument) = if ln_2k >= ln_6 { (ln_2k, arg_2k) } else { (ln_6, alloc::format!("{six}")) };
    let bound = (*coefficient.numer() as f64 / *coefficient.denom() as f64) * ln_max;
    let blocks = libm::floor(bound / b as f64) as usize + 1;
    let c = blocks.checked_mul(b).ok_or(Error::TooLarge("Ramsey dimension"))?;
    Ok(RamseyBound { k: exact, envelope: exact.is_none(), coefficient, log_argument, bound, c })
}

fn elements_of(s: &Subspace) -> Result<Vec<Matrix>> {
    let f = s.field();
    let c = isqrt(s.ambient_dim()).ok_or(Error::DimensionMismatch("fingerprint ambient is not a square"))?;
    let zero = alloc::vec![0u32; s.ambient_dim()];
    affine_points(f, &zero, s)?
        .into_iter()
        .map(|v| Matrix::from_vec(f, c, c, v))
        .collect()
}

fn isqrt(n: usize) -> Option<usize> {
    let r = libm::sqrt(n as f64) as usize;
    (r.saturating_sub(1)..=r + 1).find(|&x| x * x == n)
}

/// Hausdorff distance between two copies as finite sets of matrices under
/// the rank metric.
pub fn copy_distance(s: &Subspace, t: &Subspace) -> Result<Rational> {
    if s.field() != t.field() {
        return Err(Error::SpecMismatch);
    }
    if s.ambient_dim() != t.ambient_dim() {
        return Err(Error::DimensionMismatch("copies in different algebras"));
    }
    if s == t {
        return Ok(Rational::from_integer(0));
    }
    let xs = elements_of(s)?;
    let ys = elements_of(t)?;
    if (xs.len() as u64) * (ys.len() as u64) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge("copy distance"));
    }
    let mut table = alloc::vec![alloc::vec![Rational::from_integer(0); ys.len()]; xs.len()];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            table[i][j] = rank_distance(x, y)?.to_rational();
        }
    }
    let one_way = table.iter().map(|row| *row.iter().min().expect("nonempty")).max().expect("nonempty");
    let other_way = (0..ys.len())
        .map(|j| table.iter().map(|row| row[j]).min().expect("nonempty"))
        .max()
        .expect("nonempty");
    Ok(one_way.max(other_way))
}

/// Built-in colorings of `binom(C, A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coloring {
    Constant(Rational),
    /// `min(1, scale * copy_distance(s, target))`; 1-Lipschitz when
    /// `scale <= 1`.
    DistanceToCopy { target: Subspace, scale: Rational },
}

impl Coloring {
    pub fn evaluate(&self, s: &Subspace) -> Result<Rational> {
        let one = Rational::from_integer(1);
        match self {
            Coloring::Constant(v) => {
                if *v < Rational::from_integer(0) || *v > one {
                    return Err(Error::InvalidArgument("colorings take values in [0, 1]"));
                }
                Ok(*v)
            }
            Coloring::DistanceToCopy { target, scale } => {
                if *scale < Rational::from_integer(0) {
                    return Err(Error::InvalidArgument("scale must be non-negative"));
                }
                Ok((*scale * copy_distance(s, target)?).min(one))
            }
        }
    }
}

/// `max - min` of `gamma` over `copies`, after checking
/// `|gamma(s) - gamma(t)| <= copy_distance(s, t)` on every pair.
pub fn oscillation(gamma: &Coloring, copies: &[Subspace]) -> Result<Rational> {
    let values: Vec<Rational> = copies.iter().map(|s| gamma.evaluate(s)).collect::<Result<_>>()?;
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            let gap = (values[i] - values[j]).abs();
            if gap > Rational::from_integer(0) && gap > copy_distance(&copies[i], &copies[j])? {
                return Err(Error::NotLipschitz);
            }
        }
    }
    let max = values.iter().max();
    let min = values.iter().min();
    Ok(match (max, min) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => Rational::from_integer(0),
    })
}

/// Copies of `M_a` inside `g (M_b (x) 1) g^{-1}` in `M_c`, given the copies
/// of `M_a` in `M_b` as conjugators `h`.
fn copies_inside(g: &Matrix, a: usize, b: usize, inner: &[Matrix]) -> Result<Vec<Subspace>> {
    let c = g.rows();
    let id = Matrix::identity(g.field(), c / b);
    let mut seen = BTreeSet::new();
    for h in inner {
        let lifted = g.checked_mul(&h.kron(&id)?)?;
        seen.insert(conjugate_copy(&lifted, a)?);
    }
    Ok(seen.into_iter().collect())
}

/// One representative `h` per copy of `M_a` in `M_b`.
fn copy_representatives(a: usize, b: usize, field: &Field) -> Result<Vec<Matrix>> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for h in general_linear(field, b)? {
        if seen.insert(conjugate_copy(&h, a)?) {
            reps.push(h);
        }
    }
    Ok(reps)
}

/// Oscillation of `gamma` over the copies of `M_a` inside every copy `B'` of
/// `M_b` in `M_c`, in fingerprint order of `B'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscillationReport {
    pub entries: Vec<(Subspace, Rational)>,
    pub min_oscillation: Rational,
    pub max_oscillation: Rational,
}

pub fn oscillation_report(
    a: usize,
    b: usize,
    c: usize,
    field: &Field,
    gamma: &Coloring,
) -> Result<OscillationReport> {
    check_divides(a, b)?;
    check_divides(b, c)?;
    let inner = copy_representatives(a, b, field)?;
    let mut reps = alloc::collections::BTreeMap::new();
    for g in general_linear(field, c)? {
        reps.entry(conjugate_copy(&g, b)?).or_insert(g);
    }
    let mut entries = Vec::with_capacity(reps.len());
    for (copy, g) in reps {
        let osc = oscillation(gamma, &copies_inside(&g, a, b, &inner)?)?;
        entries.push((copy, osc));
    }
    let min_oscillation = entries.iter().map(|e| e.1).min().expect("at least one copy");
    let max_oscillation = entries.iter().map(|e| e.1).max().expect("at least one copy");
    Ok(OscillationReport { entries, min_oscillation, max_oscillation })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every copy of `B` in fingerprint order.
    Exhaustive,
    /// Conjugators drawn from a seeded ChaCha8 stream.
    Random { seed: u64, trials: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { copy: Subspace, oscillation: Rational, examined: usize },
    Exhausted { min_oscillation: Rational, best: Option<Subspace>, examined: usize },
}

/// Looks for a copy `B'` of `M_b` in `M_c` on whose copies of `M_a` the
/// coloring oscillates by at most `eps`.
pub fn monochromatic_search(
    a: usize,
    b: usize,
    c: usize,
    field: &Field,
    gamma: &Coloring,
    eps: Rational,
    strategy: Strategy,
) -> Result<SearchOutcome> {
    check_divides(a, b)?;
    check_divides(b, c)?;
    let inner = copy_representatives(a, b, field)?;
    let mut best: Option<(Rational, Subspace)> = None;
    let mut examined = 0usize;
    let mut consider = |g: &Matrix, examined: &mut usize| -> Result<Option<SearchOutcome>> {
        let copy = conjugate_copy(g, b)?;
        let osc = oscillation(gamma, &copies_inside(g, a, b, &inner)?)?;
        *examined += 1;
        if osc <= eps {
            return Ok(Some(SearchOutcome::Found { copy, oscillation: osc, examined: *examined }));
        }
        if best.as_ref().map_or(true, |(o, _)| osc < *o) {
            best = Some((osc, copy));
        }
        Ok(None)
    };
    match strategy {
        Strategy::Exhaustive => {
            let mut reps = alloc::collections::BTreeMap::new();
            for g in general_linear(field, c)? {
                reps.entry(conjugate_copy(&g, b)?).or_insert(g);
            }
            for g in reps.values() {
                if let Some(found) = consider(g, &mut examined)? {
                    return Ok(found);
                }
            }
        }
        Strategy::Random { seed, trials } => {
            if c * c > 4096 {
                return Err(Error::TooLarge("random search dimension"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let g = Matrix::random_unit(field, c, &mut rng);
                if let Some(found) = consider(&g, &mut examined)? {
                    return Ok(found);
                }
            }
        }
    }
    let (min_oscillation, best) = match best {
        Some((o, s)) => (o, Some(s)),
        None => (Rational::from_integer(0), None),
    };
    Ok(SearchOutcome::Exhausted { min_oscillation, best, examined })
}
