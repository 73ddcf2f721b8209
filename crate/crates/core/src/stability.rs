//! Repairing approximate generator pairs.
//!
//! Given `x, y` in `M_{n_K}` that nearly satisfy the relations of the shift
//! generators of `M_n`, [`repair`] finds a subspace `V` on which they satisfy
//! them exactly and returns a block embedding `psi: M_n -> M_{n_K}` whose
//! generator images agree with `x`, `y` on `V`.

use alloc::vec::Vec;
use core::fmt;

use crate::embeddings::DeltaEmbedding;
use crate::matrix::{normalized_rank, rank_distance, relation_unit, Matrix, RankDistance, Subspace};
use crate::{format_rational, Error, Rational, Result};

/// How far `(x, y)` is from an exact copy of the generators of `M_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationDefect {
    pub n: usize,
    pub ambient: usize,
    pub d_xn: RankDistance,
    pub d_yn: RankDistance,
    pub d_rel: RankDistance,
    /// `|d(x, 0) - (n-1)/n|`
    pub d_rx: Rational,
    /// `|d(y, 0) - (n-1)/n|`
    pub d_ry: Rational,
    pub delta: Rational,
}

impl fmt::Display for RelationDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {} ambient {}", self.n, self.ambient)?;
        writeln!(f, "d_xn {}", self.d_xn)?;
        writeln!(f, "d_yn {}", self.d_yn)?;
        writeln!(f, "d_rel {}", self.d_rel)?;
        writeln!(f, "d_rx {}", format_rational(&self.d_rx))?;
        writeln!(f, "d_ry {}", format_rational(&self.d_ry))?;
        writeln!(f, "delta {}", format_rational(&self.delta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairCertificate {
    pub dim_v: usize,
    pub dims_w: Vec<usize>,
    pub d_x: RankDistance,
    pub d_y: RankDistance,
    pub delta: Rational,
    /// `(4 + n) n delta`
    pub bound: Rational,
    /// `(n_K - dim V) / n_K`
    pub residual_rank_bound: RankDistance,
}

impl RepairCertificate {
    /// Whether `delta < 1/((4+n)n)`, the range in which `bound` dominates
    /// `residual_rank_bound`.
    pub fn bound_applies(&self, n: usize) -> bool {
        self.delta * Rational::from_integer(((4 + n) * n) as i64) < Rational::from_integer(1)
    }
}

impl fmt::Display for RepairCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim_V {}", self.dim_v)?;
        write!(f, "dims_W")?;
        for d in &self.dims_w {
            write!(f, " {d}")?;
        }
        writeln!(f)?;
        writeln!(f, "d_x {} d_y {}", self.d_x, self.d_y)?;
        writeln!(f, "delta {}", format_rational(&self.delta))?;
        writeln!(f, "bound {}", format_rational(&self.bound))?;
        writeln!(f, "residual_rank_bound {}", self.residual_rank_bound)
    }
}

/// Output of [`repair`]: the block embedding, its change of basis `B` and
/// the certificate.
#[derive(Clone, Debug)]
pub struct Repair {
    pub psi: DeltaEmbedding,
    pub unit: Matrix,
    pub certificate: RepairCertificate,
}

impl Repair {
    /// `psi(a)`, `psi(b)`.
    pub fn repaired_pair(&self) -> (Matrix, Matrix) {
        self.psi.generator_images()
    }
}

fn check_pair(x: &Matrix, y: &Matrix, n: usize) -> Result<usize> {
    if x.field() != y.field() {
        return Err(Error::SpecMismatch);
    }
    if !x.is_square() || !y.is_square() || x.rows() != y.rows() {
        return Err(Error::DimensionMismatch("x and y must be equal square matrices"));
    }
    if n == 0 || x.rows() < n {
        return Err(Error::DimensionMismatch("ambient dimension must be at least n >= 1"));
    }
    Ok(x.rows())
}

/// `yx + x^{n-1} y^{n-1} - 1`.
fn relation_residual(x: &Matrix, y: &Matrix, n: usize) -> Matrix {
    &relation_unit(x, y, n) - &Matrix::identity(x.field(), x.rows())
}

fn rank_deviation(x: &Matrix, n: usize) -> Rational {
    let nk = x.rows() as i64;
    let n = n as i64;
    let num = (n * x.rank() as i64 - (n - 1) * nk).abs();
    Rational::new(num, n * nk)
}

pub fn relation_defect(x: &Matrix, y: &Matrix, n: usize) -> Result<RelationDefect> {
    let nk = check_pair(x, y, n)?;
    let d_xn = normalized_rank(&x.pow(n as u32));
    let d_yn = normalized_rank(&y.pow(n as u32));
    let d_rel = normalized_rank(&relation_residual(x, y, n));
    let d_rx = rank_deviation(x, n);
    let d_ry = rank_deviation(y, n);
    let delta = [d_xn.to_rational(), d_yn.to_rational(), d_rel.to_rational(), d_rx, d_ry]
        .into_iter()
        .max()
        .expect("five components");
    Ok(RelationDefect { n, ambient: nk, d_xn, d_yn, d_rel, d_rx, d_ry, delta })
}

/// `W_0 = ker y ∩ ker x^n ∩ ker R` and `W_k = x W_{k-1} ∩ ker R` for
/// `k < n`, where `R = yx + x^{n-1} y^{n-1} - 1`.
pub fn w_chain(x: &Matrix, y: &Matrix, n: usize) -> Result<Vec<Subspace>> {
    let nk = check_pair(x, y, n)?;
    let r = relation_residual(x, y, n);
    let mut stacked = Vec::with_capacity(3 * nk * nk);
    stacked.extend_from_slice(y.data());
    stacked.extend_from_slice(x.pow(n as u32).data());
    stacked.extend_from_slice(r.data());
    let w0 = Matrix::from_vec(x.field(), 3 * nk, nk, stacked)?.kernel();
    let ker_r = r.kernel();
    let mut chain = Vec::with_capacity(n);
    chain.push(w0);
    for k in 1..n {
        let next = chain[k - 1].apply(x)?.intersect(&ker_r)?;
        chain.push(next);
    }
    Ok(chain)
}

/// `V = W + yW + ... + y^{n-1} W`.
pub fn v_space(x: &Matrix, y: &Matrix, n: usize, w: &Subspace) -> Result<Subspace> {
    let nk = check_pair(x, y, n)?;
    if w.ambient_dim() != nk {
        return Err(Error::DimensionMismatch("W must live in the ambient space of x, y"));
    }
    let mut vectors = Vec::with_capacity(n * w.dim());
    for b in w.basis() {
        let mut v = b.clone();
        for _ in 0..n {
            let next = y.mul_vec(&v);
            vectors.push(v);
            v = next;
        }
    }
    Ok(Subspace::span(x.field(), nk, vectors))
}

/// Replaces `(x, y)` by the images `psi(a)`, `psi(b)` of an exact block
/// embedding of multiplicity `floor(n_K / n)` that agrees with `(x, y)` on
/// `V`.
///
/// The columns of `B` are `y^{n-1} w, ..., y w, w` for each canonical basis
/// vector `w` of `W_{n-1}`, followed by standard vectors completing `V` to
/// the whole space; the first of those fill the remaining exact blocks and
/// the last `n_K mod n` are padding.
pub fn repair(x: &Matrix, y: &Matrix, n: usize) -> Result<Repair> {
    let nk = check_pair(x, y, n)?;
    let f = x.field();
    let defect = relation_defect(x, y, n)?;
    let chain = w_chain(x, y, n)?;
    let w = chain.last().expect("chain has n >= 1 entries");
    if w.is_zero() {
        return Err(Error::NotRepairable);
    }
    let v = v_space(x, y, n, w)?;
    assert_eq!(v.dim(), n * w.dim(), "the spaces y^s W_{{n-1}} must be independent");

    let mut columns = Vec::with_capacity(nk);
    for b in w.basis() {
        let mut block = Vec::with_capacity(n);
        let mut u = b.clone();
        for _ in 0..n {
            let next = y.mul_vec(&u);
            block.push(u);
            u = next;
        }
        columns.extend(block.into_iter().rev());
    }
    columns.extend(v.complement_basis());
    let unit = Matrix::from_columns(f, nk, &columns);
    let psi = DeltaEmbedding::new(n, nk / n, unit.clone())?;
    let (xp, yp) = psi.generator_images();

    let d_x = rank_distance(x, &xp)?;
    let d_y = rank_distance(y, &yp)?;
    let residual_rank_bound = RankDistance::new(nk - v.dim(), nk);
    assert!(d_x <= residual_rank_bound && d_y <= residual_rank_bound, "repair moved V");
    let certificate = RepairCertificate {
        dim_v: v.dim(),
        dims_w: chain.iter().map(Subspace::dim).collect(),
        d_x,
        d_y,
        delta: defect.delta,
        bound: defect.delta * Rational::from_integer(((4 + n) * n) as i64),
        residual_rank_bound,
    };
    Ok(Repair { psi, unit, certificate })
}

/// Largest defect `delta = eps / ((4+n)n + 1)` for which a repair followed
/// by one more `delta` of slack stays within `eps`.
pub fn delta_for_tolerance(eps: Rational, n: usize) -> Rational {
    eps / Rational::from_integer(((4 + n) * n + 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::matrix::{block_repeat, kassabov_generators};
    use crate::ratio;

    fn exact_model(f: &Field, n: usize, m: usize) -> (Matrix, Matrix) {
        let (a, b) = kassabov_generators(n, f);
        let i = Matrix::identity(f, m);
        (a.kron(&i).unwrap(), b.kron(&i).unwrap())
    }

    fn flip(x: &Matrix, r: usize, c: usize) -> Matrix {
        let mut out = x.clone();
        let f = x.field().clone();
        out.set(r, c, f.add(x.get(r, c), 1));
        out
    }

    #[test]
    fn defect_of_exact_model_is_zero() {
        for q in [2, 3, 4] {
            let f = Field::builtin(q).unwrap();
            for n in 1..=4 {
                let (x, y) = exact_model(&f, n, 3);
                let d = relation_defect(&x, &y, n).unwrap();
                assert_eq!(d.delta, ratio(0, 1));
                assert_eq!(d.ambient, 3 * n);
            }
        }
    }

    #[test]
    fn defect_of_zero_pair() {
        let f2 = Field::builtin(2).unwrap();
        let z = Matrix::zeros(&f2, 4, 4);
        let d = relation_defect(&z, &z, 2).unwrap();
        assert_eq!(d.d_rel, RankDistance::new(4, 4));
        assert_eq!(d.d_rx, ratio(1, 2));
        assert_eq!(d.delta, ratio(1, 1));
    }

    #[test]
    fn defect_after_rank_one_perturbation() {
        let f2 = Field::builtin(2).unwrap();
        let (x, y) = exact_model(&f2, 2, 6);
        let xp = flip(&x, 0, 0);
        let d = relation_defect(&xp, &y, 2).unwrap();
        // brute force residual ranks
        let rel = &(&(&y * &xp) + &(&xp * &y)) - &Matrix::identity(&f2, 12);
        assert_eq!(d.d_rel.rank, rel.rank());
        assert_eq!(d.d_xn.rank, (&xp * &xp).rank());
        assert_eq!(d.d_yn.rank, 0);
        let all = [
            d.d_xn.to_rational(),
            d.d_yn.to_rational(),
            d.d_rel.to_rational(),
            d.d_rx,
            d.d_ry,
        ];
        assert_eq!(d.delta, *all.iter().max().unwrap());
        assert!(d.delta > ratio(0, 1) && d.delta <= ratio(2, 12));
    }

    #[test]
    fn defect_rejects_mismatched_shapes() {
        let f2 = Field::builtin(2).unwrap();
        let x = Matrix::zeros(&f2, 4, 4);
        let y = Matrix::zeros(&f2, 5, 5);
        assert_eq!(relation_defect(&x, &y, 2).unwrap_err().name(), "DimensionMismatch");
        assert_eq!(relation_defect(&x, &x, 5).unwrap_err().name(), "DimensionMismatch");
    }

    #[test]
    fn chain_on_exact_model() {
        let f3 = Field::builtin(3).unwrap();
        for n in 1..=4 {
            let (x, y) = exact_model(&f3, n, 5);
            let chain = w_chain(&x, &y, n).unwrap();
            assert_eq!(chain.len(), n);
            assert!(chain.iter().all(|w| w.dim() == 5));
            let v = v_space(&x, &y, n, &chain[n - 1]).unwrap();
            assert_eq!(v.dim(), 5 * n);
        }
    }

    #[test]
    fn chain_of_zero_pair_is_trivial() {
        let f2 = Field::builtin(2).unwrap();
        let z = Matrix::zeros(&f2, 4, 4);
        let chain = w_chain(&z, &z, 2).unwrap();
        assert!(chain.iter().all(Subspace::is_zero));
        assert!(v_space(&z, &z, 2, &chain[1]).unwrap().is_zero());
        assert_eq!(repair(&z, &z, 2).unwrap_err(), Error::NotRepairable);
    }

    #[test]
    fn chain_members_satisfy_the_inductive_hypothesis() {
        let f2 = Field::builtin(2).unwrap();
        let (x, y) = exact_model(&f2, 3, 4);
        let x = flip(&flip(&x, 1, 0), 5, 7);
        let chain = w_chain(&x, &y, 3).unwrap();
        let id = Matrix::identity(&f2, 12);
        let yx_minus_1 = &(&y * &x) - &id;
        for (k, w) in chain.iter().enumerate() {
            let yk = y.pow(k as u32 + 1);
            for v in w.basis() {
                assert!(yk.mul_vec(v).iter().all(|&c| c == 0));
                if k + 1 < chain.len() {
                    assert!(yx_minus_1.mul_vec(v).iter().all(|&c| c == 0));
                }
            }
        }
    }

    #[test]
    fn repair_of_exact_model_is_lossless() {
        for q in [2, 3] {
            let f = Field::builtin(q).unwrap();
            for n in 1..=3 {
                let (x, y) = exact_model(&f, n, 4);
                let rep = repair(&x, &y, n).unwrap();
                let c = &rep.certificate;
                assert!(c.d_x.is_zero() && c.d_y.is_zero());
                assert_eq!(c.dim_v, 4 * n);
                assert!(rep.psi.is_unital());
                assert_eq!(rep.repaired_pair(), (x, y));
            }
        }
    }

    #[test]
    fn padded_input_gives_padded_embedding() {
        let f2 = Field::builtin(2).unwrap();
        let (a, b) = kassabov_generators(2, &f2);
        let x = block_repeat(&a, 6, 1);
        let y = block_repeat(&b, 6, 1);
        let rep = repair(&x, &y, 2).unwrap();
        assert_eq!(rep.psi.delta(), RankDistance::new(1, 13));
        assert_eq!(rep.certificate.dim_v, 12);
        assert_eq!(rep.repaired_pair(), (x, y));
    }

    #[test]
    fn repair_of_perturbed_model() {
        let f2 = Field::builtin(2).unwrap();
        let (x0, y) = exact_model(&f2, 2, 6);
        let x = flip(&x0, 3, 8);
        let rep = repair(&x, &y, 2).unwrap();
        let c = &rep.certificate;
        let (xp, yp) = rep.repaired_pair();
        // relations by direct multiplication
        let id = Matrix::identity(&f2, 12);
        assert!((&xp * &xp).is_zero() && (&yp * &yp).is_zero());
        assert_eq!(&(&yp * &xp) + &(&xp * &yp), id);
        assert_eq!(c.dim_v % 2, 0);
        assert_eq!(c.dim_v, 2 * c.dims_w[1]);
        assert!(c.d_x <= c.residual_rank_bound);
        if c.bound_applies(2) {
            assert!(c.residual_rank_bound.to_rational() <= c.bound);
        }
        assert_eq!(relation_defect(&xp, &yp, 2).unwrap().delta, ratio(0, 1));
        let again = repair(&xp, &yp, 2).unwrap();
        assert!(again.certificate.d_x.is_zero() && again.certificate.d_y.is_zero());
    }

    #[test]
    fn repaired_pair_agrees_on_v() {
        let f3 = Field::builtin(3).unwrap();
        let (x0, y0) = exact_model(&f3, 3, 5);
        let x = flip(&x0, 2, 9);
        let y = flip(&y0, 11, 4);
        let rep = repair(&x, &y, 3).unwrap();
        let chain = w_chain(&x, &y, 3).unwrap();
        let v = v_space(&x, &y, 3, &chain[2]).unwrap();
        let (xp, yp) = rep.repaired_pair();
        let dx = &x - &xp;
        let dy = &y - &yp;
        for b in v.basis() {
            assert!(dx.mul_vec(b).iter().all(|&c| c == 0));
            assert!(dy.mul_vec(b).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn certificate_renders_every_field() {
        let f2 = Field::builtin(2).unwrap();
        let (x, y) = exact_model(&f2, 2, 6);
        let text = alloc::format!("{}", repair(&x, &y, 2).unwrap().certificate);
        assert!(text.contains("d_x 0/12 d_y 0/12"));
        assert!(text.contains("dims_W 6 6"));
        assert!(text.contains("bound 0/1"));
    }

    #[test]
    fn tolerance_rule() {
        assert_eq!(delta_for_tolerance(ratio(1, 2), 2), ratio(1, 26));
    }
}
