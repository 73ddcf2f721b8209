//! Towers `M_{n_0} -> M_{n_1} -> ...` and the finite-stage constructions
//! behind approximate homogeneity, the approximate extension property, the
//! back-and-forth isomorphism between two towers and the approximation of
//! automorphisms by inner ones.
//!
//! The limit algebra is never built. Every statement about it is checked at a
//! concrete stage, on concrete probe elements, with exact rational errors.

use alloc::vec::Vec;
use core::fmt;

use crate::embeddings::{gather_permutation, shuffle_permutation, DeltaEmbedding};
use crate::gf::Field;
use crate::matrix::{kassabov_generators, rank_distance, relations_hold, units_unchecked, Matrix};
use crate::stability::{repair, RepairCertificate};
use crate::{format_rational, Error, Rational, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerRule {
    /// `n_i = i!`
    Factorial,
    /// `n_i = 2^i`
    PowersOfTwo,
    /// A given list; the prefix length is ignored.
    Explicit(Vec<usize>),
}

/// A finite prefix of a factor sequence together with the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    field: Field,
    dims: Vec<usize>,
}

impl Tower {
    pub fn new(field: &Field, dims: Vec<usize>) -> Result<Tower> {
        let valid = !dims.is_empty()
            && dims[0] > 0
            && dims.windows(2).all(|w| w[1] % w[0] == 0);
        if !valid {
            return Err(Error::NotFactorSequence(dims));
        }
        Ok(Tower { field: field.clone(), dims })
    }

    pub fn make(field: &Field, rule: TowerRule, prefix_len: usize) -> Result<Tower> {
        let dims = match rule {
            TowerRule::Explicit(dims) => dims,
            TowerRule::Factorial => {
                let mut dims = Vec::with_capacity(prefix_len);
                let mut cur = 1usize;
                for i in 0..prefix_len {
                    if i > 0 {
                        cur = cur.checked_mul(i).ok_or(Error::TooLarge("factorial tower"))?;
                    }
                    dims.push(cur);
                }
                dims
            }
            TowerRule::PowersOfTwo => (0..prefix_len)
                .map(|i| 1usize.checked_shl(i as u32).filter(|&d| d > 0))
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::TooLarge("power of two tower"))?,
        };
        Tower::new(field, dims)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, stage: usize) -> usize {
        self.dims[stage]
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn max_stage(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn element(&self, stage: usize, value: Matrix) -> Result<TowerElement> {
        if stage >= self.dims.len() {
            return Err(Error::TowerPrefixTooShort("stage beyond the realized prefix"));
        }
        if value.field() != &self.field {
            return Err(Error::SpecMismatch);
        }
        if !value.is_square() || value.rows() != self.dims[stage] {
            return Err(Error::DimensionMismatch("element does not live at this stage"));
        }
        Ok(TowerElement { stage, value })
    }

    /// The composite inclusion of `e` into `stage`.
    pub fn include_to(&self, e: &TowerElement, stage: usize) -> Result<TowerElement> {
        if stage < e.stage {
            return Err(Error::StageOrder { from: e.stage, to: stage });
        }
        if stage >= self.dims.len() {
            return Err(Error::TowerPrefixTooShort("stage beyond the realized prefix"));
        }
        let value = if stage == e.stage {
            e.value.clone()
        } else {
            crate::embeddings::iota(self.dims[stage], self.dims[e.stage], &e.value)?
        };
        Ok(TowerElement { stage, value })
    }

    /// The inclusion `M_{n_from} -> M_{n_to}` as a block map.
    pub fn inclusion(&self, from: usize, to: usize) -> Result<DeltaEmbedding> {
        if to < from {
            return Err(Error::StageOrder { from, to });
        }
        if to >= self.dims.len() {
            return Err(Error::TowerPrefixTooShort("stage beyond the realized prefix"));
        }
        DeltaEmbedding::iota(&self.field, self.dims[to], self.dims[from])
    }

    /// Whether two elements agree once included into the last stage.
    pub fn identifies(&self, s: &TowerElement, t: &TowerElement) -> Result<bool> {
        let top = self.max_stage();
        Ok(self.include_to(s, top)?.value == self.include_to(t, top)?.value)
    }

    /// Distance in the limit, evaluated at the higher of the two stages.
    pub fn distance(&self, s: &TowerElement, t: &TowerElement) -> Result<Rational> {
        let stage = s.stage.max(t.stage);
        let d = rank_distance(&self.include_to(s, stage)?.value, &self.include_to(t, stage)?.value)?;
        Ok(d.to_rational())
    }

    /// The shift generators of `M_{n_stage}`.
    pub fn generators(&self, stage: usize) -> Result<(TowerElement, TowerElement)> {
        let n = *self.dims.get(stage).ok_or(Error::TowerPrefixTooShort("stage beyond the realized prefix"))?;
        let (a, b) = kassabov_generators(n, &self.field);
        Ok((TowerElement { stage, value: a }, TowerElement { stage, value: b }))
    }
}

/// An element of the direct limit, represented at a particular stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerElement {
    pub stage: usize,
    pub value: Matrix,
}

/// Conjugating unit carrying `phi` onto `psi`: `beta = B_psi B_phi^{-1}`.
/// The residual is exact and zero at this level.
pub fn approximate_homogeneity(
    phi: &DeltaEmbedding,
    psi: &DeltaEmbedding,
) -> Result<(Matrix, Rational)> {
    if phi.field() != psi.field() {
        return Err(Error::SpecMismatch);
    }
    if phi.source_dim() != psi.source_dim() || phi.target_dim() != psi.target_dim() {
        return Err(Error::DimensionMismatch("embeddings between different algebras"));
    }
    if phi.multiplicity() != psi.multiplicity() {
        return Err(Error::MultiplicityMismatch(phi.multiplicity(), psi.multiplicity()));
    }
    let beta = psi.conjugator().checked_mul(phi.conjugator_inverse())?;
    Ok((beta, Rational::from_integer(0)))
}

/// Bound on `d(beta phi'(g), psi'(g))` for a generator `g` when `phi'` and
/// `psi'` are repairs: the sum of the two certified generator distances.
pub fn homogeneity_bound(c_phi: &RepairCertificate, c_psi: &RepairCertificate) -> Rational {
    let dx = c_phi.d_x.to_rational() + c_psi.d_x.to_rational();
    let dy = c_phi.d_y.to_rational() + c_psi.d_y.to_rational();
    dx.max(dy)
}

/// Output of [`approximate_extension`].
#[derive(Clone, Debug)]
pub struct Extension {
    pub stage: usize,
    pub psi: DeltaEmbedding,
    /// `1 - r s m_k / m_{k'}`
    pub commute_error: Rational,
}

/// Given a `delta`-embedding `phi: M_{m_k} -> M_n`, finds the first stage
/// `k' >= k` with `delta' m_{k'} > n` and a `delta'`-embedding
/// `psi: M_n -> M_{m_{k'}}` with `psi(phi(a)) = a^{(+)rs} (+) 0` up to the
/// inclusion's own conjugation.
pub fn approximate_extension(
    phi: &DeltaEmbedding,
    tower: &Tower,
    k: usize,
    delta_prime: Rational,
) -> Result<Extension> {
    if delta_prime <= Rational::from_integer(0) {
        return Err(Error::InvalidArgument("delta' must be positive"));
    }
    if phi.field() != tower.field() {
        return Err(Error::SpecMismatch);
    }
    if k >= tower.len() {
        return Err(Error::TowerPrefixTooShort("stage beyond the realized prefix"));
    }
    let m_k = tower.dim(k);
    if phi.source_dim() != m_k {
        return Err(Error::DimensionMismatch("phi must start at the given stage"));
    }
    let n = phi.target_dim();
    let stage = (k..tower.len())
        .find(|&j| delta_prime * Rational::from_integer(tower.dim(j) as i64) > Rational::from_integer(n as i64))
        .ok_or(Error::TowerPrefixTooShort("no realized stage satisfies delta' m > n"))?;
    let big = tower.dim(stage);
    let f = tower.field();
    let r = phi.multiplicity();
    let s = big / n;

    // psi = Z ((y^{-1} . y)^{(+)s} (+) 0) Z^{-1} with Z = P G^{-1}
    let mut lift = Matrix::identity(f, big);
    for c in 0..s {
        lift.set_block(c * n, c * n, phi.conjugator_inverse());
    }
    let gather = Matrix::permutation(f, &gather_permutation(m_k, n, r, s, big));
    let shuffle = Matrix::permutation(f, &shuffle_permutation(m_k, big / m_k));
    let z = &shuffle * &gather.transpose();
    let conj = &z * &lift;
    let psi = DeltaEmbedding::new(n, s, conj)?;

    let commute_error = Rational::from_integer(1) - Rational::new((r * s * m_k) as i64, big as i64);
    Ok(Extension { stage, psi, commute_error })
}

/// `d(psi(phi(1)), iota(1))`, the commute error measured on matrices.
pub fn measured_commute_error(
    phi: &DeltaEmbedding,
    ext: &Extension,
    tower: &Tower,
    k: usize,
) -> Result<Rational> {
    let one = Matrix::identity(tower.field(), tower.dim(k));
    let round = ext.psi.apply(&phi.apply(&one)?)?;
    let incl = tower.include_to(&TowerElement { stage: k, value: one }, ext.stage)?;
    Ok(rank_distance(&round, &incl.value)?.to_rational())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The first tower; `phi_i` start here.
    X,
    /// The second tower; `psi_i` start here.
    Y,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// A probe element on one side of the back-and-forth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub side: Side,
    pub element: TowerElement,
}

/// One constructed map. Map `t` is `phi_{t/2}` for even `t`, going from
/// `X_{j_t}` to `Y_{k_t}`, and `psi_{(t-1)/2}` for odd `t`, going from `Y_{k_t}`
/// to `X_{j_t}`. Its defect must not exceed `2^{-t}`.
#[derive(Clone, Debug)]
pub struct BackForthMap {
    pub index: usize,
    pub source: Side,
    pub source_stage: usize,
    pub target_stage: usize,
    pub embedding: DeltaEmbedding,
    pub delta: Rational,
    pub budget: Rational,
}

/// `d(map_t(incl(map_{t-1}(x))), incl(x))` for a probe `x` on the source side
/// of map `t - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrip {
    pub map: usize,
    pub probe: usize,
    pub error: Rational,
    /// `2^{-(t-1)} + 2^{-t}`
    pub bound: Rational,
}

/// `d(map_{t-2}(x), map_t(x))` for a probe on the source side of both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyStep {
    pub map: usize,
    pub probe: usize,
    pub distance: Rational,
    /// `2^{-(t-2)+1}`
    pub bound: Rational,
}

/// The last round trip of a probe against the telescoped `2^{-2i+3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalError {
    pub probe: usize,
    pub map: usize,
    pub error: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug)]
pub struct BackForthCertificate {
    /// `(j_t, k_t)` for every map.
    pub stage_pairs: Vec<(usize, usize)>,
    pub maps: Vec<BackForthMap>,
    pub round_trips: Vec<RoundTrip>,
    pub cauchy: Vec<CauchyStep>,
    pub final_errors: Vec<FinalError>,
}

fn pow2_inv(e: usize) -> Rational {
    Rational::new(1, 1i64 << e)
}

/// `2^{-e}` for a possibly negative exponent.
fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(1i64 << e)
    } else {
        Rational::new(1, 1i64 << (-e))
    }
}

fn tower_of<'a>(side: Side, x: &'a Tower, y: &'a Tower) -> &'a Tower {
    match side {
        Side::X => x,
        Side::Y => y,
    }
}

fn stage_of(side: Side, pair: (usize, usize)) -> usize {
    match side {
        Side::X => pair.0,
        Side::Y => pair.1,
    }
}

/// Builds `maps` alternating maps `phi_0, psi_0, phi_1, ...` between the two
/// towers as in the uniqueness proof: `j_0 = k_0 = 0`, `phi_0` the maximal
/// block map, `k_{2i+1} = k_{2i} + 1`, `j_{2i+2} = j_{2i+1} + 1`, and every
/// other stage chosen by [`approximate_extension`] with `delta' = 2^{-t}`.
pub fn back_and_forth(
    tower_x: &Tower,
    tower_y: &Tower,
    maps: usize,
    probes: &[Probe],
) -> Result<BackForthCertificate> {
    if tower_x.field() != tower_y.field() {
        return Err(Error::SpecMismatch);
    }
    if maps == 0 {
        return Err(Error::InvalidArgument("at least one map is required"));
    }
    if maps > 60 {
        return Err(Error::TooLarge("map count"));
    }
    for p in probes {
        let t = tower_of(p.side, tower_x, tower_y);
        t.element(p.element.stage, p.element.value.clone())?;
    }
    let f = tower_x.field();
    let phi0 = DeltaEmbedding::maximal(f, tower_x.dim(0), tower_y.dim(0))?;
    let mut built = Vec::with_capacity(maps);
    let mut pairs = alloc::vec![(0usize, 0usize)];
    built.push(BackForthMap {
        index: 0,
        source: Side::X,
        source_stage: 0,
        target_stage: 0,
        delta: phi0.delta().to_rational(),
        budget: Rational::from_integer(1),
        embedding: phi0,
    });
    for t in 1..maps {
        let prev = &built[t - 1];
        let source = prev.source.other();
        // the previous map's target tower is this map's source tower
        let src_tower = tower_of(source, tower_x, tower_y);
        let dst_tower = tower_of(source.other(), tower_x, tower_y);
        let src_stage = prev.target_stage + 1;
        if src_stage >= src_tower.len() {
            return Err(Error::TowerPrefixTooShort("source tower ran out of stages"));
        }
        let lifted = src_tower.inclusion(prev.target_stage, src_stage)?.compose(&prev.embedding)?;
        let ext = approximate_extension(&lifted, dst_tower, prev.source_stage, pow2_inv(t))?;
        let pair = match source {
            Side::Y => (ext.stage, src_stage),
            Side::X => (src_stage, ext.stage),
        };
        pairs.push(pair);
        built.push(BackForthMap {
            index: t,
            source,
            source_stage: src_stage,
            target_stage: ext.stage,
            delta: ext.psi.delta().to_rational(),
            budget: pow2_inv(t),
            embedding: ext.psi,
        });
    }
    let mut cert = BackForthCertificate {
        stage_pairs: pairs,
        maps: built,
        round_trips: Vec::new(),
        cauchy: Vec::new(),
        final_errors: Vec::new(),
    };
    cert.evaluate(tower_x, tower_y, probes)?;
    Ok(cert)
}

impl BackForthCertificate {
    fn tower_for<'a>(&self, side: Side, x: &'a Tower, y: &'a Tower) -> &'a Tower {
        tower_of(side, x, y)
    }

    /// `incl(map(incl(x)))` landing at the map's target stage, or `None` when
    /// the probe lives above the map's source stage.
    fn push(
        &self,
        t: usize,
        x: &TowerElement,
        tower_x: &Tower,
        tower_y: &Tower,
    ) -> Result<Option<TowerElement>> {
        let m = &self.maps[t];
        if x.stage > m.source_stage {
            return Ok(None);
        }
        let src = self.tower_for(m.source, tower_x, tower_y);
        let v = src.include_to(x, m.source_stage)?;
        Ok(Some(TowerElement { stage: m.target_stage, value: m.embedding.apply(&v.value)? }))
    }

    fn records(
        &self,
        tower_x: &Tower,
        tower_y: &Tower,
        probes: &[Probe],
    ) -> Result<(Vec<RoundTrip>, Vec<CauchyStep>, Vec<FinalError>)> {
        let mut round_trips = Vec::new();
        let mut cauchy = Vec::new();
        let mut finals: Vec<Option<FinalError>> = alloc::vec![None; probes.len()];
        for t in 1..self.maps.len() {
            let side = self.maps[t - 1].source;
            let home = self.tower_for(side, tower_x, tower_y);
            for (pi, p) in probes.iter().enumerate() {
                if p.side != side {
                    continue;
                }
                let Some(there) = self.push(t - 1, &p.element, tower_x, tower_y)? else {
                    continue;
                };
                let Some(back) = self.push(t, &there, tower_x, tower_y)? else {
                    continue;
                };
                let error = home.distance(&back, &p.element)?;
                let bound = pow2_inv(t - 1) + pow2_inv(t);
                round_trips.push(RoundTrip { map: t, probe: pi, error, bound });
                finals[pi] = Some(FinalError { probe: pi, map: t, error, bound: pow2(4 - t as i64) });
            }
        }
        for t in 2..self.maps.len() {
            let side = self.maps[t].source;
            let far = self.tower_for(side.other(), tower_x, tower_y);
            for (pi, p) in probes.iter().enumerate() {
                if p.side != side {
                    continue;
                }
                let Some(early) = self.push(t - 2, &p.element, tower_x, tower_y)? else {
                    continue;
                };
                let Some(late) = self.push(t, &p.element, tower_x, tower_y)? else {
                    continue;
                };
                let distance = far.distance(&early, &late)?;
                cauchy.push(CauchyStep { map: t, probe: pi, distance, bound: pow2(3 - t as i64) });
            }
        }
        Ok((round_trips, cauchy, finals.into_iter().flatten().collect()))
    }

    fn evaluate(&mut self, tower_x: &Tower, tower_y: &Tower, probes: &[Probe]) -> Result<()> {
        let (r, c, f) = self.records(tower_x, tower_y, probes)?;
        self.round_trips = r;
        self.cauchy = c;
        self.final_errors = f;
        Ok(())
    }

    /// Whether every recorded error is within its bound and every map within
    /// its defect budget.
    pub fn within_bounds(&self) -> bool {
        self.maps.iter().all(|m| m.delta <= m.budget)
            && self.round_trips.iter().all(|r| r.error <= r.bound)
            && self.cauchy.iter().all(|c| c.distance < c.bound)
            && self.final_errors.iter().all(|f| f.error < f.bound)
    }

    /// Recomputes every numeric field from the stored maps by direct rank
    /// evaluation and compares exactly. Also checks that each map is a
    /// homomorphism with `d(map(1), 1)` equal to its recorded defect and that
    /// it neither expands distances nor shrinks them by more than `1 - delta`
    /// on pairs of probes.
    pub fn verify(&self, tower_x: &Tower, tower_y: &Tower, probes: &[Probe]) -> Result<bool> {
        let mut ok = true;
        for (t, m) in self.maps.iter().enumerate() {
            let src = self.tower_for(m.source, tower_x, tower_y);
            let dst = self.tower_for(m.source.other(), tower_x, tower_y);
            let e = &m.embedding;
            ok &= e.source_dim() == src.dim(m.source_stage) && e.target_dim() == dst.dim(m.target_stage);
            ok &= stage_of(m.source, self.stage_pairs[t]) == m.source_stage;
            ok &= stage_of(m.source.other(), self.stage_pairs[t]) == m.target_stage;
            let f = src.field();
            let (a, b) = e.generator_images();
            let unit = relations_hold(&a, &b, e.source_dim())?;
            let one = Matrix::identity(f, e.target_dim());
            ok &= unit == e.apply(&Matrix::identity(f, e.source_dim()))?;
            ok &= rank_distance(&unit, &one)?.to_rational() == m.delta;
            ok &= m.delta <= m.budget && m.budget == pow2_inv(t);
            let here: Vec<&Probe> = probes.iter().filter(|p| p.side == m.source).collect();
            for (i, p) in here.iter().enumerate() {
                for q in &here[i + 1..] {
                    let (Some(u), Some(v)) = (
                        self.push(t, &p.element, tower_x, tower_y)?,
                        self.push(t, &q.element, tower_x, tower_y)?,
                    ) else {
                        continue;
                    };
                    let before = src.distance(&p.element, &q.element)?;
                    let after = rank_distance(&u.value, &v.value)?.to_rational();
                    ok &= after <= before;
                    ok &= (Rational::from_integer(1) - m.delta) * before <= after;
                }
            }
        }
        let (r, c, f) = self.records(tower_x, tower_y, probes)?;
        ok &= r == self.round_trips && c == self.cauchy && f == self.final_errors;
        Ok(ok)
    }
}

impl fmt::Display for BackForthCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.maps {
            let name = if m.source == Side::X { "phi" } else { "psi" };
            writeln!(
                f,
                "map {} {}_{} stages {}->{} dims {}->{} delta {} budget {}",
                m.index,
                name,
                m.index / 2,
                m.source_stage,
                m.target_stage,
                m.embedding.source_dim(),
                m.embedding.target_dim(),
                format_rational(&m.delta),
                format_rational(&m.budget),
            )?;
        }
        for r in &self.round_trips {
            writeln!(
                f,
                "round_trip map {} probe {} error {} bound {}",
                r.map,
                r.probe,
                format_rational(&r.error),
                format_rational(&r.bound)
            )?;
        }
        for c in &self.cauchy {
            writeln!(
                f,
                "cauchy map {} probe {} distance {} bound {}",
                c.map,
                c.probe,
                format_rational(&c.distance),
                format_rational(&c.bound)
            )?;
        }
        for e in &self.final_errors {
            writeln!(
                f,
                "final probe {} map {} error {} bound {}",
                e.probe,
                e.map,
                format_rational(&e.error),
                format_rational(&e.bound)
            )?;
        }
        Ok(())
    }
}

/// Output of [`inner_approximate`].
#[derive(Clone, Debug)]
pub struct InnerApproximation {
    /// Stage of the conjugating unit.
    pub stage: usize,
    pub unit: Matrix,
    /// `d(unit y unit^{-1}, image)` per target pair.
    pub residuals: Vec<Rational>,
    pub within_eps: bool,
    pub repair: RepairCertificate,
}

/// Finds a unit whose conjugation moves each `y` close to its prescribed
/// image.
///
/// The target must prescribe images for the two shift generators of the
/// highest source stage `s`; they determine the homomorphism. When those
/// images satisfy the relations exactly, every other pair must agree with the
/// homomorphism they generate. The images are repaired at their common stage
/// `K` and the repaired map is carried onto the inclusion `M_{n_s} -> M_{n_K}`.
pub fn inner_approximate(
    tower: &Tower,
    target: &[(TowerElement, TowerElement)],
    eps: Rational,
) -> Result<InnerApproximation> {
    if eps <= Rational::from_integer(0) {
        return Err(Error::InvalidArgument("eps must be positive"));
    }
    if target.is_empty() {
        return Err(Error::InconsistentTarget("empty target"));
    }
    for (y, img) in target {
        tower.element(y.stage, y.value.clone())?;
        tower.element(img.stage, img.value.clone())?;
    }
    let s = target.iter().map(|(y, _)| y.stage).max().expect("nonempty");
    let top = target.iter().map(|(_, i)| i.stage).max().expect("nonempty").max(s);
    let n = tower.dim(s);

    let lifted: Vec<(Matrix, Matrix)> = target
        .iter()
        .map(|(y, i)| Ok((tower.include_to(y, s)?.value, tower.include_to(i, top)?.value)))
        .collect::<Result<_>>()?;
    for (i, (y, img)) in lifted.iter().enumerate() {
        for (z, other) in &lifted[i + 1..] {
            if y == z && img != other {
                return Err(Error::InconsistentTarget("one element with two images"));
            }
        }
    }
    let (a, b) = kassabov_generators(n, tower.field());
    let image_of = |g: &Matrix| lifted.iter().find(|(y, _)| y == g).map(|(_, i)| i.clone());
    let (xa, xb) = match (image_of(&a), image_of(&b)) {
        (Some(xa), Some(xb)) => (xa, xb),
        _ => return Err(Error::InconsistentTarget("images of the stage generators are missing")),
    };
    if relations_hold(&xa, &xb, n).is_ok() {
        let units = units_unchecked(&xa, &xb, n);
        let f = tower.field();
        for (y, img) in &lifted {
            let mut expected = Matrix::zeros(f, img.rows(), img.cols());
            for (i, row) in units.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let c = y.get(i, j);
                    if c != 0 {
                        expected = &expected + &e.scale(c);
                    }
                }
            }
            if &expected != img {
                return Err(Error::InconsistentTarget("pair disagrees with the generated homomorphism"));
            }
        }
    }

    let rep = repair(&xa, &xb, n)?;
    let incl = tower.inclusion(s, top)?;
    if rep.psi.multiplicity() != incl.multiplicity() {
        return Err(Error::NotRepairable);
    }
    let (unit, _) = approximate_homogeneity(&incl, &rep.psi)?;
    let unit_inv = incl.conjugator().checked_mul(rep.psi.conjugator_inverse())?;
    let residuals: Vec<Rational> = lifted
        .iter()
        .map(|(y, img)| {
            let moved = &(&unit * &crate::embeddings::iota(tower.dim(top), n, y)?) * &unit_inv;
            Ok(rank_distance(&moved, img)?.to_rational())
        })
        .collect::<Result<_>>()?;
    let within_eps = residuals.iter().all(|r| *r < eps);
    Ok(InnerApproximation { stage: top, unit, residuals, within_eps, repair: rep.certificate })
}

/// Triangle-inequality assembly for an automorphism target: with `x` within
/// `approx` of a tower element `y` and the inner approximation of `y` within
/// `residual`, the approximation of `x` is within `2 approx + residual`.
/// Returns that value and whether it is below `eps`.
pub fn assemble_third(approx: Rational, residual: Rational, eps: Rational) -> (Rational, bool) {
    let total = approx * Rational::from_integer(2) + residual;
    (total, total < eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::iota;
    use crate::matrix::RankDistance;
    use crate::ratio;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn gf(q: u64) -> Field {
        Field::builtin(q).unwrap()
    }

    #[test]
    fn tower_rules() {
        let f = gf(2);
        assert_eq!(Tower::make(&f, TowerRule::Factorial, 5).unwrap().dims(), &[1, 1, 2, 6, 24]);
        assert_eq!(Tower::make(&f, TowerRule::PowersOfTwo, 4).unwrap().dims(), &[1, 2, 4, 8]);
        let err = Tower::make(&f, TowerRule::Explicit(alloc::vec![2, 3, 6]), 0).unwrap_err();
        assert_eq!(err, Error::NotFactorSequence(alloc::vec![2, 3, 6]));
        assert!(Tower::new(&f, alloc::vec![]).is_err());
        assert!(Tower::make(&f, TowerRule::Factorial, 40).is_err());
    }

    #[test]
    fn inclusion_is_functorial() {
        let f = gf(3);
        let t = Tower::make(&f, TowerRule::Factorial, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let x = t.element(2, Matrix::random(&f, 2, 2, &mut rng)).unwrap();
        assert_eq!(t.include_to(&x, 2).unwrap(), x);
        let one = t.include_to(&x, 4).unwrap();
        let two = t.include_to(&t.include_to(&x, 3).unwrap(), 4).unwrap();
        assert_eq!(one, two);
        assert_eq!(t.include_to(&x, 3).unwrap().value, x.value.kron(&Matrix::identity(&f, 3)).unwrap());
        assert_eq!(t.include_to(&one, 2).unwrap_err(), Error::StageOrder { from: 4, to: 2 });
        assert!(t.identifies(&x, &one).unwrap());
    }

    #[test]
    fn homogeneity_of_conjugate_inclusions() {
        let f = gf(2);
        let mut rng = StdRng::seed_from_u64(6);
        let base = DeltaEmbedding::iota(&f, 12, 2).unwrap();
        let phi = base.conjugated(&Matrix::random_unit(&f, 12, &mut rng)).unwrap();
        let psi = base.conjugated(&Matrix::random_unit(&f, 12, &mut rng)).unwrap();
        let (beta, res) = approximate_homogeneity(&phi, &psi).unwrap();
        assert_eq!(res, ratio(0, 1));
        let beta_inv = beta.inverse().unwrap();
        let (a, b) = kassabov_generators(2, &f);
        for g in [a, b] {
            assert_eq!(&(&beta * &phi.apply(&g).unwrap()) * &beta_inv, psi.apply(&g).unwrap());
        }
        let (same, _) = approximate_homogeneity(&phi, &phi).unwrap();
        assert_eq!(same, Matrix::identity(&f, 12));
        let other = DeltaEmbedding::maximal(&f, 2, 12).unwrap();
        let thinner = DeltaEmbedding::standard(&f, 2, 12, 5).unwrap();
        assert_eq!(approximate_homogeneity(&other, &thinner).unwrap_err().name(), "MultiplicityMismatch");
    }

    #[test]
    fn homogeneity_between_repairs() {
        let f = gf(2);
        let (a, b) = kassabov_generators(2, &f);
        let i6 = Matrix::identity(&f, 6);
        let (x, y) = (a.kron(&i6).unwrap(), b.kron(&i6).unwrap());
        let mut x1 = x.clone();
        x1.set(4, 1, 1 ^ x1.get(4, 1));
        let mut y2 = y.clone();
        y2.set(7, 10, 1 ^ y2.get(7, 10));
        let r1 = repair(&x1, &y, 2).unwrap();
        let r2 = repair(&x, &y2, 2).unwrap();
        let (beta, _) = approximate_homogeneity(&r1.psi, &r2.psi).unwrap();
        let beta_inv = beta.inverse().unwrap();
        let bound = homogeneity_bound(&r1.certificate, &r2.certificate);
        let dx = rank_distance(&(&(&beta * &x1) * &beta_inv), &r2.repaired_pair().0).unwrap();
        // beta carries the repair of x1 onto the repair of x; the original
        // perturbation is what remains
        assert!(dx.to_rational() <= r1.certificate.d_x.to_rational());
        assert!(dx.to_rational() <= bound);
    }

    fn random_delta(f: &Field, m: usize, n: usize, r: usize, rng: &mut StdRng) -> DeltaEmbedding {
        DeltaEmbedding::new(m, r, Matrix::random_unit(f, n, rng)).unwrap()
    }

    #[test]
    fn extension_divisible_case_is_exact() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::PowersOfTwo, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let phi = random_delta(&f, 2, 4, 2, &mut rng);
        let ext = approximate_extension(&phi, &t, 1, ratio(1, 4)).unwrap();
        assert_eq!(t.dim(ext.stage), 32);
        assert_eq!(ext.commute_error, ratio(0, 1));
        assert_eq!(measured_commute_error(&phi, &ext, &t, 1).unwrap(), ratio(0, 1));
        let x = Matrix::random(&f, 2, 2, &mut rng);
        let round = ext.psi.apply(&phi.apply(&x).unwrap()).unwrap();
        assert_eq!(round, iota(32, 2, &x).unwrap());
    }

    #[test]
    fn extension_with_padding() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::Factorial, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(8);
        let phi = random_delta(&f, 2, 5, 2, &mut rng);
        assert_eq!(phi.delta(), RankDistance::new(1, 5));
        let ext = approximate_extension(&phi, &t, 2, ratio(1, 4)).unwrap();
        assert_eq!(t.dim(ext.stage), 24);
        assert_eq!(ext.psi.multiplicity(), 4);
        assert_eq!(ext.commute_error, ratio(1, 3));
        assert_eq!(measured_commute_error(&phi, &ext, &t, 2).unwrap(), ratio(1, 3));
        assert!(ext.commute_error <= ratio(1, 5) + ratio(1, 4));
        assert!(ext.psi.delta().to_rational() <= ratio(1, 4));
        // no stage in reach
        assert_eq!(
            approximate_extension(&phi, &t, 2, ratio(1, 10)).unwrap_err().name(),
            "TowerPrefixTooShort"
        );
    }

    #[test]
    fn extension_never_increases_distance_to_inclusion_beyond_formula() {
        let f = gf(3);
        let t = Tower::make(&f, TowerRule::Factorial, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        let phi = random_delta(&f, 2, 7, 3, &mut rng);
        let ext = approximate_extension(&phi, &t, 2, ratio(1, 3)).unwrap();
        for _ in 0..10 {
            let x = Matrix::random(&f, 2, 2, &mut rng);
            let round = ext.psi.apply(&phi.apply(&x).unwrap()).unwrap();
            let d = rank_distance(&round, &iota(t.dim(ext.stage), 2, &x).unwrap()).unwrap();
            assert!(d.to_rational() <= ext.commute_error);
        }
    }

    fn gens_probe(t: &Tower, side: Side, stage: usize) -> Vec<Probe> {
        let (a, b) = t.generators(stage).unwrap();
        alloc::vec![Probe { side, element: a }, Probe { side, element: b }]
    }

    #[test]
    fn back_and_forth_same_tower() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::PowersOfTwo, 9).unwrap();
        let mut probes = gens_probe(&t, Side::X, 0);
        probes.extend(gens_probe(&t, Side::Y, 1));
        let cert = back_and_forth(&t, &t, 3, &probes).unwrap();
        assert_eq!(cert.maps.len(), 3);
        assert!(cert.within_bounds());
        assert!(cert.round_trips.iter().all(|r| r.error == ratio(0, 1)));
        assert!(!cert.round_trips.is_empty());
        assert!(cert.verify(&t, &t, &probes).unwrap());
    }

    #[test]
    fn back_and_forth_factorial_against_powers() {
        let f = gf(2);
        let x = Tower::make(&f, TowerRule::Factorial, 6).unwrap();
        let y = Tower::make(&f, TowerRule::PowersOfTwo, 9).unwrap();
        let mut probes = gens_probe(&x, Side::X, 0);
        probes.extend(gens_probe(&y, Side::Y, 1));
        let cert = back_and_forth(&x, &y, 3, &probes).unwrap();
        assert_eq!(cert.stage_pairs, alloc::vec![(0, 0), (3, 1), (4, 7)]);
        assert!(cert.within_bounds());
        assert!(cert.verify(&x, &y, &probes).unwrap());
        assert_eq!(back_and_forth(&x, &y, 4, &probes).unwrap_err().name(), "TowerPrefixTooShort");

        let mut tampered = cert.clone();
        tampered.round_trips[0].error = ratio(1, 7);
        assert!(!tampered.verify(&x, &y, &probes).unwrap());
    }

    #[test]
    fn inner_approximation_of_identity_and_conjugation() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::PowersOfTwo, 4).unwrap();
        let (a, b) = t.generators(2).unwrap();
        let mut rng = StdRng::seed_from_u64(10);
        let z = t.element(1, Matrix::random(&f, 2, 2, &mut rng)).unwrap();
        let target = alloc::vec![(a.clone(), a.clone()), (b.clone(), b.clone()), (z.clone(), z.clone())];
        let res = inner_approximate(&t, &target, ratio(1, 100)).unwrap();
        assert_eq!(res.unit, Matrix::identity(&f, 4));
        assert!(res.residuals.iter().all(|r| *r == ratio(0, 1)));
        assert!(res.within_eps);

        let g = Matrix::random_unit(&f, 8, &mut rng);
        let g_inv = g.inverse().unwrap();
        let conj = |e: &TowerElement| {
            let v = t.include_to(e, 3).unwrap().value;
            t.element(3, &(&g * &v) * &g_inv).unwrap()
        };
        let target = alloc::vec![(a.clone(), conj(&a)), (b.clone(), conj(&b)), (z.clone(), conj(&z))];
        let res = inner_approximate(&t, &target, ratio(1, 100)).unwrap();
        assert_eq!(res.stage, 3);
        assert!(res.residuals.iter().all(|r| *r == ratio(0, 1)));
    }

    #[test]
    fn inner_approximation_of_perturbed_target() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::PowersOfTwo, 5).unwrap();
        let (a, b) = t.generators(1).unwrap();
        let mut xa = t.include_to(&a, 4).unwrap();
        xa.value.set(3, 12, 1 ^ xa.value.get(3, 12));
        let xb = t.include_to(&b, 4).unwrap();
        let target = alloc::vec![(a, xa), (b, xb)];
        let res = inner_approximate(&t, &target, ratio(1, 4)).unwrap();
        assert!(res.residuals[0] <= res.repair.d_x.to_rational());
        assert!(res.residuals[1] <= res.repair.d_y.to_rational());
        assert!(res.within_eps);
    }

    #[test]
    fn inner_approximation_rejects_inconsistent_targets() {
        let f = gf(2);
        let t = Tower::make(&f, TowerRule::PowersOfTwo, 4).unwrap();
        let (a, b) = t.generators(1).unwrap();
        let one = t.element(1, Matrix::identity(&f, 2)).unwrap();
        let zero = t.element(1, Matrix::zeros(&f, 2, 2)).unwrap();
        let missing = alloc::vec![(a.clone(), a.clone())];
        assert_eq!(inner_approximate(&t, &missing, ratio(1, 2)).unwrap_err().name(), "InconsistentTarget");
        let wrong = alloc::vec![(a.clone(), a.clone()), (b.clone(), b.clone()), (one.clone(), zero)];
        assert_eq!(inner_approximate(&t, &wrong, ratio(1, 2)).unwrap_err().name(), "InconsistentTarget");
        let twice = alloc::vec![(a.clone(), a.clone()), (b.clone(), b), (a.clone(), one)];
        assert_eq!(inner_approximate(&t, &twice, ratio(1, 2)).unwrap_err().name(), "InconsistentTarget");
    }

    #[test]
    fn third_assembly() {
        let eps = ratio(1, 2);
        let third = eps / Rational::from_integer(3);
        let (total, ok) = assemble_third(third - ratio(1, 100), third - ratio(1, 100), eps);
        assert!(ok && total < eps);
        assert!(!assemble_third(ratio(1, 4), ratio(0, 1), eps).1);
    }
}
