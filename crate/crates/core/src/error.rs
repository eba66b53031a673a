use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("division by zero")]
    DivByZero,
    #[error("operands belong to different fields")]
    CtxMismatch,
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("reduction modulo a constant polynomial")]
    ModByConstant,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("polynomial is constant")]
    ConstantInput,
    #[error("polynomial is reducible")]
    Reducible,
    #[error("the polynomial x has no exponent")]
    XInput,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("gcd(M, q) = {0} is not 1")]
    PCharConflict(u64),
    #[error("degree {deg} does not divide {n}")]
    DegreeMismatch { deg: usize, n: u64 },
    #[error("polynomial is already an M-power")]
    AlreadyMPower,
    #[error("no irreducible polynomial of degree {n} and exponent {e}")]
    NoRepresentative { n: u64, e: u64 },
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),
    #[error("series constant term is not invertible")]
    NonUnitConstant,
    #[error("orthogonal groups require odd q")]
    OddCharRequired,
    #[error("invalid class datum: {0}")]
    InvalidDatum(String),
    #[error("matrix is not in the group")]
    NotInGroup,
    #[error("generator closure reached {got} elements, expected {expected}")]
    ClosureIncomplete { got: usize, expected: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
