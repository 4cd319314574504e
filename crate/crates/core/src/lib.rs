//! Exact-arithmetic verification of quadratic-residue identities.
//!
//! Everything here is computed over the integers (or exact extensions of
//! them): Legendre/Jacobi characters, pair-counting statistics and
//! permutation parities, the ring `Z[zeta_p]` of cyclotomic integers,
//! quadratic orders `Z[(1+sqrt(p))/2]`, fundamental units via continued
//! fractions, and class numbers via Dirichlet's formula and reduced-form
//! enumeration. The `verify` module evaluates both sides of each identity
//! through independent code paths and reports the evidence; the `sweep`
//! module drives parallel range sweeps for the CLI.
//!
//! No floating point is used anywhere in the verification paths.

pub mod counting;
pub mod cyclo;
pub mod modint;
pub mod quadfield;
pub mod sweep;
pub mod verify;

pub use counting::pan_sign;
pub use cyclo::CycloElem;
pub use modint::ResidueTable;
pub use quadfield::{ClassData, QuadElem};
pub use verify::{Claim, VerifyReport};

use thiserror::Error;

/// Domain and arithmetic errors surfaced by the library.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("{a} is divisible by the modulus {p}")]
    DivisibleByModulus { a: i64, p: u64 },
    #[error("{a} is not a quadratic residue modulo {p}")]
    NonResidue { a: i64, p: u64 },
    #[error("gcd({c}, {n}) != 1")]
    NotCoprime { c: i64, n: u64 },
    #[error("prime {p} fails the required congruence {p} = {want} (mod {modulus})")]
    WrongResidueClass { p: u64, want: u64, modulus: u64 },
    #[error("parameter {name}={value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("mixed discriminants {0} and {1}")]
    MixedDiscriminants(u64, u64),
    #[error("negative power of a non-unit (|norm| != 1)")]
    NonUnitPower,
    #[error("element does not lie in the quadratic subfield")]
    NotInQuadraticSubfield,
    #[error("p = {0}: claim requires p > 3")]
    PrimeTooSmall(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
