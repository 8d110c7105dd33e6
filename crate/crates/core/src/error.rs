use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(
        "characteristic 2 is not supported: the lattice construction needs an odd prime; \
         for p = 2 the truncation basis only guarantees that 2M' has integral coefficients"
    )]
    EvenCharacteristic,
    #[error("no irreducible polynomial of degree {degree} over F_{p} found")]
    NoIrreducibleFound { p: u64, degree: usize },
    #[error("p^N does not fit in 63 bits (p = {p}, N = {precision})")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("operands belong to different coefficient rings")]
    ContextMismatch,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not divisible by p^{0} at the working precision")]
    NotDivisible(u32),
    #[error("leading coefficient of the divisor is not a unit")]
    NonUnitLeadingCoeff,
    #[error("polynomials are not coprime modulo p")]
    NotCoprime,
    #[error("constant term of the series is not a unit")]
    NonUnitConstantTerm,
    #[error("truncation leaves no valid coefficients")]
    EmptyWindow,
    #[error("Q is not monic")]
    NotMonic,
    #[error("Q must have degree {expected}, got {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("Q has a repeated root modulo p")]
    SingularReduction,
    #[error("basis index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("field with {0} elements is too large to enumerate")]
    TooLarge(u128),
    #[error("insufficient p-adic precision: have {have}, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("pivot of the truncation map is not a unit (lambda = {0})")]
    PivotNotUnit(usize),
    #[error("basis vector {0} is not in the kernel of the truncation map")]
    NotInKernel(usize),
    #[error("entry ({row}, {col}) of the Frobenius matrix has valuation {valuation} below -{bound}")]
    DenominatorBoundViolation { row: usize, col: usize, valuation: i64, bound: u32 },
    #[error("entry ({row}, {col}) of the transformed matrix is not integral")]
    IntegralityViolation { row: usize, col: usize },
    #[error("coefficient a_{index} = {value} violates the Weil bound")]
    WeilBoundViolation { index: usize, value: i128 },
    #[error("functional equation fails at a_{0}")]
    FunctionalEquationViolation(usize),
    #[error("characteristic polynomial has a coefficient outside Z_p")]
    NonRationalCoefficient,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that signal a broken internal invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::PivotNotUnit(_)
                | Error::NotInKernel(_)
                | Error::DenominatorBoundViolation { .. }
                | Error::IntegralityViolation { .. }
                | Error::WeilBoundViolation { .. }
                | Error::FunctionalEquationViolation(_)
                | Error::NonRationalCoefficient
        )
    }
}
