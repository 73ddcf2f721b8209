use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the algebra can report. [`Error::name`] gives the stable
/// variant name the command line prints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus is not a monic irreducible polynomial of degree {degree} over GF({p})")]
    ReducibleModulus { p: u64, degree: usize },
    #[error("no built-in modulus for GF({p}^{k})")]
    NoBuiltinModulus { p: u64, k: usize },
    #[error("field of order {0} is too large for table arithmetic")]
    FieldTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands live over different fields")]
    SpecMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("generator images do not satisfy the defining relations")]
    RelationsNotSatisfied,
    #[error("{m} does not divide {n}")]
    NotDivisor { m: usize, n: usize },
    #[error("homomorphism is not unital")]
    NotUnital,
    #[error("relation defect too large: W_(n-1) is trivial")]
    NotRepairable,
    #[error("dimensions {0:?} are not a factor sequence")]
    NotFactorSequence(alloc::vec::Vec<usize>),
    #[error("cannot include stage {from} into earlier stage {to}")]
    StageOrder { from: usize, to: usize },
    #[error("multiplicities differ ({0} vs {1})")]
    MultiplicityMismatch(usize, usize),
    #[error("realized tower prefix is too short: {0}")]
    TowerPrefixTooShort(&'static str),
    #[error("target pairs are not consistent with a homomorphism: {0}")]
    InconsistentTarget(&'static str),
    #[error("instance too large: {0}")]
    TooLarge(&'static str),
    #[error("coloring is not 1-Lipschitz on an evaluated pair")]
    NotLipschitz,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::ReducibleModulus { .. } => "ReducibleModulus",
            Error::NoBuiltinModulus { .. } => "NoBuiltinModulus",
            Error::FieldTooLarge(_) => "FieldTooLarge",
            Error::ZeroInverse => "ZeroInverse",
            Error::SpecMismatch => "SpecMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::Singular => "Singular",
            Error::RelationsNotSatisfied => "RelationsNotSatisfied",
            Error::NotDivisor { .. } => "NotDivisor",
            Error::NotUnital => "NotUnital",
            Error::NotRepairable => "NotRepairable",
            Error::NotFactorSequence(_) => "NotFactorSequence",
            Error::StageOrder { .. } => "StageOrder",
            Error::MultiplicityMismatch(..) => "MultiplicityMismatch",
            Error::TowerPrefixTooShort(_) => "TowerPrefixTooShort",
            Error::InconsistentTarget(_) => "InconsistentTarget",
            Error::TooLarge(_) => "TooLarge",
            Error::NotLipschitz => "NotLipschitz",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Outcomes that are reported rather than treated as bad input
    /// (the instance is valid but cannot be handled at this size or defect).
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::TooLarge(_)
                | Error::NotRepairable
                | Error::TowerPrefixTooShort(_)
                | Error::FieldTooLarge(_)
        )
    }
}
