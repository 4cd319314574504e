//! Exact arithmetic in `Z[zeta_p]` for odd prime `p`: dense big-integer
//! coefficients on the basis `zeta^0 .. zeta^{p-2}`, quadratic Gauss sums,
//! balanced-tree evaluation of the pair products, and descent of
//! Galois-fixed elements to the quadratic subfield `Q(sqrt(p))`.
//!
//! The canonical form drops `zeta^{p-1}` via
//! `zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2})`; two elements are equal
//! iff their coefficient vectors are equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::modint::{is_prime, lnr, mul_mod};
use crate::{Error, Result};

/// Element of `Z[zeta_p]` in canonical form: `sum coeffs[k] * zeta^k`,
/// `k = 0 .. p-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloElem {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl CycloElem {
    pub fn zero(p: u64) -> Self {
        Self {
            p,
            coeffs: vec![BigInt::zero(); (p - 1) as usize],
        }
    }

    pub fn from_int(p: u64, n: impl Into<BigInt>) -> Self {
        let mut e = Self::zero(p);
        e.coeffs[0] = n.into();
        e
    }

    /// Canonical form of `zeta^e` (exponent reduced mod `p`).
    pub fn root_power(p: u64, e: i64) -> Self {
        let e = lnr(e, p) as usize;
        let mut elem = Self::zero(p);
        if e == (p - 1) as usize {
            for c in elem.coeffs.iter_mut() {
                *c = BigInt::from(-1);
            }
        } else {
            elem.coeffs[e] = BigInt::one();
        }
        elem
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_same_p(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MixedDiscriminants(self.p, other.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_p(other)?;
        Ok(Self {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Ring product: convolution of exponents mod `p`, then reduction of
    /// the `zeta^{p-1}` bucket back onto the basis.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_p(other)?;
        let p = self.p as usize;
        let mut buckets = vec![BigInt::zero(); p];
        for (i, ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in other.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let mut e = i + j;
                if e >= p {
                    e -= p;
                }
                buckets[e] += ci * cj;
            }
        }
        Ok(Self::from_buckets(self.p, buckets))
    }

    /// Collapses a length-`p` exponent vector to canonical form using
    /// `zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2})`.
    fn from_buckets(p: u64, mut buckets: Vec<BigInt>) -> Self {
        let top = buckets.pop().expect("bucket vector of length p");
        for c in buckets.iter_mut() {
            *c -= &top;
        }
        Self { p, coeffs: buckets }
    }

    /// Galois conjugation `zeta -> zeta^a` for `p` coprime `a`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        let r = lnr(a, self.p);
        if r == 0 {
            return Err(Error::DivisibleByModulus { a, p: self.p });
        }
        let p = self.p;
        let mut buckets = vec![BigInt::zero(); p as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            buckets[mul_mod(r, k as u64, p) as usize] += c;
        }
        Ok(Self::from_buckets(p, buckets))
    }

    /// Field trace to `Q`: `(p-1) c_0 - sum_{k>=1} c_k`.
    pub fn trace(&self) -> BigInt {
        let tail: BigInt = self.coeffs[1..].iter().sum();
        BigInt::from(self.p - 1) * &self.coeffs[0] - tail
    }

    /// Writes an element of the quadratic subfield as `a + b sqrt(p)`
    /// (`p = 1 (mod 4)`), exactly:
    /// `a = trace(x)/(p-1)`, `b = trace(x G)/(p(p-1))` with `G` the Gauss
    /// sum, then verifies by reconstructing `a + b G` coefficientwise.
    /// Denominators of the result must lie in `{1, 2}`.
    pub fn to_quadratic(&self) -> Result<(BigRational, BigRational)> {
        let p = self.p;
        if p % 4 != 1 {
            return Err(Error::WrongResidueClass {
                p,
                want: 1,
                modulus: 4,
            });
        }
        let g = gauss_sum(p);
        let a = BigRational::new(self.trace(), BigInt::from(p - 1));
        let b = BigRational::new(
            self.mul(&g)?.trace(),
            BigInt::from(p) * BigInt::from(p - 1),
        );
        // Reconstruct L*x = L*a + (L*b) G with denominators cleared.
        let l = a.denom().lcm(b.denom());
        let lr = BigRational::from_integer(l.clone());
        let la = (&a * &lr).to_integer();
        let lb = (&b * &lr).to_integer();
        for (k, c) in self.coeffs.iter().enumerate() {
            let mut want = &lb * &g.coeffs[k];
            if k == 0 {
                want += &la;
            }
            if &l * c != want {
                return Err(Error::NotInQuadraticSubfield);
            }
        }
        for half in [&a, &b] {
            let d = half.denom();
            if !d.is_one() && *d != BigInt::from(2) {
                return Err(Error::NotInQuadraticSubfield);
            }
        }
        Ok((a, b))
    }
}

/// Quadratic Gauss sum `G = sum_{x=0}^{p-1} zeta^{x^2}` in canonical form.
/// Satisfies `G^2 = (-1)^{(p-1)/2} p` as a ring identity.
pub fn gauss_sum(p: u64) -> CycloElem {
    let mut buckets = vec![BigInt::zero(); p as usize];
    for x in 0..p {
        buckets[mul_mod(x, x, p) as usize] += 1;
    }
    CycloElem::from_buckets(p, buckets)
}

fn plus_factors(p: u64, a: i64) -> Result<Vec<CycloElem>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let r = lnr(a, p);
    if r == 0 {
        return Err(Error::DivisibleByModulus { a, p });
    }
    let half = (p - 1) / 2;
    let squares: Vec<u64> = (1..=half).map(|j| mul_mod(r, mul_mod(j, j, p), p)).collect();
    let mut factors = Vec::with_capacity(((p - 1) * (p - 3) / 8) as usize);
    for j in 0..squares.len() {
        for k in j + 1..squares.len() {
            factors.push(
                CycloElem::root_power(p, squares[j] as i64)
                    .add(&CycloElem::root_power(p, squares[k] as i64))?,
            );
        }
    }
    Ok(factors)
}

/// `prod_{1 <= j < k <= (p-1)/2} (zeta^{aj^2} + zeta^{ak^2})`, evaluated
/// with a balanced product tree (pairwise halving keeps coefficient growth
/// logarithmic in depth; subtree products run in parallel and the result
/// is independent of evaluation order).
pub fn plus_product(p: u64, a: i64) -> Result<CycloElem> {
    let mut level = plus_factors(p, a)?;
    while level.len() > 1 {
        level = level
            .par_chunks(2)
            .map(|pair| match pair {
                [x, y] => x.mul(y),
                [x] => Ok(x.clone()),
                _ => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(level.pop().expect("p >= 5 gives at least one factor"))
}

/// Sequential left-fold evaluation of the same product; slow oracle for
/// [`plus_product`].
pub fn plus_product_fold(p: u64, a: i64) -> Result<CycloElem> {
    let factors = plus_factors(p, a)?;
    let mut acc = CycloElem::from_int(p, 1);
    for f in &factors {
        acc = acc.mul(f)?;
    }
    Ok(acc)
}
