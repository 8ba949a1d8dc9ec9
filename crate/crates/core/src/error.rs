use thiserror::Error;

/// Every failure the library can report.
///
/// Variants map one-to-one onto the error conditions of the public
/// operations; `InvariantViolation` is reserved for internal checks that
/// should never fire on a correct build.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    CompositeP(u64),
    #[error("characteristic {0} is not supported (need p >= 5)")]
    UnsupportedChar(u64),
    #[error("field of size {p}^{n} exceeds the supported bound")]
    FieldTooLarge { p: u64, n: usize },
    #[error("the zero polynomial has no factorization")]
    ZeroPoly,
    #[error("cannot embed GF({p}^{from}) into GF({p}^{to})")]
    IncompatibleFields { p: u64, from: usize, to: usize },
    #[error("curve is singular (4a^3 + 27b^2 = 0)")]
    SingularCurve,
    #[error("n = {n} is divisible by the characteristic {p}")]
    CharDividesN { n: u64, p: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("trace {t} is supersingular over a field of characteristic {p}")]
    SupersingularTrace { t: i64, p: u64 },
    #[error("trace {t} violates the Hasse bound for q = {q}")]
    TraceOutOfRange { t: i64, q: u64 },
    #[error("curve is supersingular: Sha(E/k(F)) is then a p-group, which this tool does not compute")]
    SupersingularCurve,
    #[error("isogeny degree {0} equals the characteristic")]
    CharEqualsL(u64),
    #[error("isogeny degree {0} is not a supported prime (need prime <= 13)")]
    UnsupportedDegree(u64),
    #[error("polynomial is not a valid kernel polynomial")]
    InvalidKernel,
    #[error("edge joins heights {from} and {to}")]
    InconsistentHeights { from: u32, to: u32 },
    #[error("{0} is not a discriminant (must be negative and 0 or 1 mod 4)")]
    NotADiscriminant(i128),
    #[error("curves lie in different isogeny classes")]
    DifferentIsogenyClass,
    #[error("curves are not isogenous")]
    NotIsogenous,
    #[error("curves are isogenous; use the isogenous Sha computation")]
    IsogenousPair,
    #[error("curves lie in different components of the isogeny graph")]
    DifferentComponent,
    #[error("isogeny degree {0} is not prime")]
    NonPrimeDegree(u64),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("curves are defined over different fields")]
    FieldMismatch,
    #[error("torsion search failed: {0}")]
    TorsionSearchFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
