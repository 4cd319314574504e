//! Exact arithmetic in quadratic orders: elements `(a + b sqrt(D))/2`,
//! the fundamental unit of `Q(sqrt(p))` from the continued fraction of
//! `sqrt(p)`, the real class number from cycles of reduced indefinite
//! forms, and the imaginary class number from Dirichlet's formula with a
//! reduced-forms enumeration as independent oracle.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::modint::{is_prime, ResidueTable};
use crate::{Error, Result};

/// Element `(a + b sqrt(d))/2` of the quadratic order of discriminant `d`
/// (here always `d = p = 1 (mod 4)`, so `a = b (mod 2)` is membership in
/// the ring of integers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElem {
    d: u64,
    a: BigInt,
    b: BigInt,
}

impl QuadElem {
    pub fn new(d: u64, a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        let (a, b) = (a.into(), b.into());
        debug_assert!(
            d % 4 != 1 || (&a - &b).is_even(),
            "(a + b sqrt d)/2 with a != b (mod 2) is not an algebraic integer"
        );
        Self { d, a, b }
    }

    pub fn one(d: u64) -> Self {
        Self::new(d, 2, 0)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Numerator pair `(a, b)` of `(a + b sqrt d)/2`.
    pub fn parts(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    pub fn conj(&self) -> Self {
        Self {
            d: self.d,
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// `(a^2 - d b^2) / 4`, always an integer for ring elements.
    pub fn norm(&self) -> BigInt {
        let num = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        let (q, r) = num.div_rem(&BigInt::from(4));
        debug_assert!(r.is_zero(), "norm of a non-integral element");
        q
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::MixedDiscriminants(self.d, other.d));
        }
        let d = BigInt::from(self.d);
        let a = (&self.a * &other.a + &d * &self.b * &other.b) / 2;
        let b = (&self.a * &other.b + &self.b * &other.a) / 2;
        Ok(Self { d: self.d, a, b })
    }

    /// `x^e` by binary powering; negative exponents require `|norm| = 1`
    /// (inverse taken through the conjugate).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 {
            let n = self.norm();
            if !n.magnitude().is_one() {
                return Err(Error::NonUnitPower);
            }
            // x^{-1} = conj(x)/norm(x), norm = +/-1
            let c = self.conj();
            if n.is_negative() {
                Self {
                    d: c.d,
                    a: -c.a,
                    b: -c.b,
                }
            } else {
                c
            }
        } else {
            self.clone()
        };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.d);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    pub fn is_one(&self) -> bool {
        self.a == BigInt::from(2) && self.b.is_zero()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}*sqrt({}))/2", self.a, self.b, self.d)
    }
}

fn require(p: u64, class: u64) -> Result<()> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if p % 4 != class {
        return Err(Error::WrongResidueClass {
            p,
            want: class,
            modulus: 4,
        });
    }
    Ok(())
}

/// Fundamental unit `eps_p > 1` of the ring of integers of `Q(sqrt(p))`,
/// `p = 1 (mod 4)`, normalized to positive `a, b`. Its norm is -1 for
/// every such prime.
///
/// The continued fraction of `sqrt(p)` gives the minimal solution of
/// `x^2 - p y^2 = -1`, i.e. the fundamental unit `u` of the suborder
/// `Z[sqrt(p)]`. The unit index `[O_K^* : Z[sqrt(p)]^*]` is 1 or 3, so
/// `eps_p` is either `u` or its exact cube root, recovered from the trace
/// equation `a^3 + 3a = 2x` (norm -1 case).
pub fn fundamental_unit(p: u64) -> Result<QuadElem> {
    require(p, 1)?;
    let (x, y) = pell_minus_one(p);
    let trace = BigInt::from(2) * &x;
    // Candidate cube root: a^3 - 3 n a = 2x with n = norm in {-1, +1}.
    let approx = trace.cbrt();
    for a in [&approx - 1, approx.clone(), &approx + 1, &approx + 2] {
        if !a.is_positive() {
            continue;
        }
        for n in [BigInt::from(-1), BigInt::one()] {
            if &a * &a * &a - BigInt::from(3) * &n * &a != trace {
                continue;
            }
            let num = &a * &a - BigInt::from(4) * &n;
            let (q, r) = num.div_rem(&BigInt::from(p));
            if !r.is_zero() {
                continue;
            }
            let b = q.sqrt();
            if &b * &b == q {
                return Ok(QuadElem::new(p, a, b));
            }
        }
    }
    Ok(QuadElem::new(p, x * 2, y * 2))
}

/// Minimal `(x, y)` with `x^2 - p y^2 = -1`, from the continued fraction
/// of `sqrt(p)`. The period is odd exactly when `-1` is represented, which
/// holds for every prime `p = 1 (mod 4)`.
fn pell_minus_one(p: u64) -> (BigInt, BigInt) {
    let a0 = p.isqrt();
    assert!(a0 * a0 != p, "p must not be a square");
    // (P + sqrt(p))/Q state; convergents carried as big integers.
    let (mut pp, mut q) = (0u64, 1u64);
    let mut a = a0;
    let (mut num_prev, mut num) = (BigInt::one(), BigInt::from(a0));
    let (mut den_prev, mut den) = (BigInt::zero(), BigInt::one());
    let mut parity = 1i32; // (-1)^k for A_{k-1}^2 - p B_{k-1}^2 = (-1)^k Q_k
    loop {
        pp = a * q - pp;
        q = (p - pp * pp) / q;
        parity = -parity;
        if q == 1 && parity == -1 {
            // A^2 - p B^2 = -1 at this point
            debug_assert_eq!(&num * &num - BigInt::from(p) * &den * &den, BigInt::from(-1));
            return (num, den);
        }
        a = (a0 + pp) / q;
        let next_num = BigInt::from(a) * &num + &num_prev;
        let next_den = BigInt::from(a) * &den + &den_prev;
        num_prev = std::mem::replace(&mut num, next_num);
        den_prev = std::mem::replace(&mut den, next_den);
    }
}

/// Brute-force oracle for [`fundamental_unit`]: smallest `b >= 1` with
/// `p b^2 +/- 4` a perfect square. Exponential in the answer size; tests
/// only.
pub fn fundamental_unit_naive(p: u64) -> Result<QuadElem> {
    require(p, 1)?;
    let pb = BigInt::from(p);
    let mut b = BigInt::one();
    loop {
        for n in [BigInt::from(-4), BigInt::from(4)] {
            let a2 = &pb * &b * &b + &n;
            let a = a2.sqrt();
            if &a * &a == a2 {
                return Ok(QuadElem::new(p, a, b));
            }
        }
        b += 1;
    }
}

/// `h(-p)` by Dirichlet's class number formula:
/// `(2 - (2/p)) h(-p) = sum_{k=1}^{(p-1)/2} (k/p)`. The division must be
/// exact; anything else is an arithmetic bug.
pub fn class_number_imag(p: u64) -> Result<u64> {
    require(p, 3)?;
    if p == 3 {
        return Err(Error::PrimeTooSmall(3));
    }
    let t = ResidueTable::new(p)?;
    let sum: i64 = (1..=(p - 1) / 2).map(|k| t.chi(k as i64) as i64).sum();
    let factor = 2 - t.chi(2) as i64;
    assert!(
        sum > 0 && sum % factor == 0,
        "Dirichlet division not exact: p={p} sum={sum} factor={factor}"
    );
    Ok((sum / factor) as u64)
}

/// `h(-p)` by counting reduced positive-definite forms `(a, b, c)` of
/// discriminant `b^2 - 4ac = -p`: `|b| <= a <= c`, with `b >= 0` when
/// `|b| = a` or `a = c`. Independent oracle for [`class_number_imag`].
pub fn class_number_imag_forms(p: u64) -> Result<u64> {
    require(p, 3)?;
    let mut count = 0u64;
    let p = p as i64;
    let mut a = 1i64;
    while 3 * a * a <= p {
        for b in -a..=a {
            let num = b * b + p;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

/// A reduced indefinite form `(a, b, c)` of positive discriminant.
type Form = (i64, i64, i64);

/// `h(p)` for `p = 1 (mod 4)` as the number of cycles of reduced
/// indefinite forms of discriminant `p` under the neighboring step. This
/// is the narrow class number; it equals the wide one here because
/// `norm(eps_p) = -1`, which is asserted rather than assumed.
pub fn class_number_real(p: u64) -> Result<u64> {
    require(p, 1)?;
    assert_eq!(
        fundamental_unit(p)?.norm(),
        BigInt::from(-1),
        "norm(eps_p) = -1 must hold for prime p = 1 (mod 4)"
    );
    let forms = reduced_indefinite_forms(p);
    let sqrt_p = p.isqrt() as i64;
    let mut remaining: BTreeSet<Form> = forms.iter().copied().collect();
    let mut cycles = 0u64;
    while let Some(&start) = remaining.iter().next() {
        cycles += 1;
        let mut f = start;
        loop {
            remaining.remove(&f);
            f = rho(f, p as i64, sqrt_p);
            if f == start {
                break;
            }
        }
    }
    // h(p) is odd for prime p (genus theory); an even count is a bug.
    assert!(cycles % 2 == 1, "h({p}) = {cycles} should be odd");
    Ok(cycles)
}

/// All `(a, b, c)` with `b^2 - 4ac = D` and `|sqrt(D) - 2|a|| < b < sqrt(D)`.
fn reduced_indefinite_forms(d: u64) -> Vec<Form> {
    let sqrt_d = d.isqrt() as i64;
    let di = d as i64;
    let mut out = Vec::new();
    for b in (1..=sqrt_d).filter(|b| (b % 2) as u64 == d % 2) {
        let m = (di - b * b) / 4; // = -ac > 0
        for a in 1..=m {
            if m % a != 0 {
                continue;
            }
            // reduced iff sqrt(D) - b < 2a < sqrt(D) + b
            let ok = {
                let twice = 2 * a;
                (twice - b) * (twice - b) < di && (twice + b) * (twice + b) > di
            };
            if ok {
                out.push((a, b, -(m / a)));
                out.push((-a, b, m / a));
            }
        }
    }
    out
}

/// Neighboring (rho) step on reduced indefinite forms: `(a,b,c) ->
/// (c, b', (b'^2 - D)/(4c))` with `b' = -b (mod 2c)` chosen reduced.
fn rho(f: Form, d: i64, sqrt_d: i64) -> Form {
    let (_, b, c) = f;
    let two_c = (2 * c).abs();
    // unique b' = -b (mod 2|c|) with sqrt(D) - 2|c| < b' <= floor(sqrt(D))
    let bp = sqrt_d - (sqrt_d + b).rem_euclid(two_c);
    let cp = (bp * bp - d) / (4 * c);
    (c, bp, cp)
}

/// Provenance of a computed field in [`ClassData`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ContinuedFraction,
    FormCycles,
    Dirichlet,
    ReducedForms,
}

/// Per-prime bundle of unit and class number data.
#[derive(Debug, Clone)]
pub struct ClassData {
    pub p: u64,
    pub h_real: Option<(u64, Method)>,
    pub h_imag: Option<(u64, Method)>,
    pub eps: Option<(QuadElem, Method)>,
}

impl ClassData {
    pub fn for_prime(p: u64) -> Result<Self> {
        let mut data = ClassData {
            p,
            h_real: None,
            h_imag: None,
            eps: None,
        };
        if p % 4 == 1 {
            data.h_real = Some((class_number_real(p)?, Method::FormCycles));
            data.eps = Some((fundamental_unit(p)?, Method::ContinuedFraction));
        } else if p > 3 {
            data.h_imag = Some((class_number_imag(p)?, Method::Dirichlet));
        }
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modint::primes_in;

    fn q(d: u64, a: i64, b: i64) -> QuadElem {
        QuadElem::new(d, a, b)
    }

    #[test]
    fn quad_arithmetic_examples() {
        // (1 + sqrt 5)/2 has norm (1 - 5)/4 = -1
        assert_eq!(q(5, 1, 1).norm(), BigInt::from(-1));
        assert!(q(5, 1, 1).pow(0).unwrap().is_one());
        // ((1+sqrt5)/2)^2 = (3+sqrt5)/2
        assert_eq!(q(5, 1, 1).mul(&q(5, 1, 1)).unwrap(), q(5, 3, 1));
        assert!(q(5, 1, 1).mul(&q(13, 1, 1)).is_err());
        assert!(q(5, 4, 0).pow(-1).is_err());
    }

    #[test]
    fn quad_norm_multiplicative() {
        let x = q(13, 3, 1);
        let y = q(13, 11, 3);
        assert_eq!(
            x.mul(&y).unwrap().norm(),
            x.norm() * y.norm()
        );
    }

    #[test]
    fn fundamental_unit_examples() {
        assert_eq!(fundamental_unit(5).unwrap(), q(5, 1, 1));
        assert_eq!(fundamental_unit(13).unwrap(), q(13, 3, 1));
        // 4 + sqrt(17), norm 16 - 17 = -1
        assert_eq!(fundamental_unit(17).unwrap(), q(17, 8, 2));
        assert!(fundamental_unit(7).is_err());
    }

    #[test]
    fn fundamental_unit_matches_oracle() {
        for p in primes_in(5, 500, Some((1, 4))) {
            let cf = fundamental_unit(p).unwrap();
            // The fundamental unit grows exponentially in sqrt(p); the brute
            // scan (and the minimality sweep below) are only feasible when its
            // b coordinate is modest. Larger primes are still covered by the
            // structural norm/oddness checks elsewhere.
            let (_, b) = cf.parts();
            let Ok(b) = u64::try_from(b) else { continue };
            if b > 100_000 {
                continue;
            }
            let brute = fundamental_unit_naive(p).unwrap();
            assert_eq!(cf, brute, "p={p}");
            // Minimality: no smaller b yields |a^2 - p b^2| = 4.
            let pb = BigInt::from(p);
            for smaller in 1..b {
                let bb = BigInt::from(smaller);
                for n in [BigInt::from(-4), BigInt::from(4)] {
                    let a2 = &pb * &bb * &bb + &n;
                    let a = a2.sqrt();
                    assert!(&a * &a != a2, "p={p}: smaller unit at b={smaller}");
                }
            }
        }
    }

    #[test]
    fn unit_norm_is_minus_one() {
        for p in primes_in(5, 10_000, Some((1, 4))) {
            let eps = fundamental_unit(p).unwrap();
            assert_eq!(eps.norm(), BigInt::from(-1), "p={p}");
            let (a, b) = eps.parts();
            assert!(a.is_positive() && b.is_positive());
        }
    }

    #[test]
    fn class_number_imag_examples() {
        assert_eq!(class_number_imag(7).unwrap(), 1);
        assert_eq!(class_number_imag(11).unwrap(), 1);
        assert_eq!(class_number_imag(23).unwrap(), 3);
        assert!(class_number_imag(3).is_err());
        assert!(class_number_imag(13).is_err());
    }

    #[test]
    fn class_number_imag_forms_examples() {
        assert_eq!(class_number_imag_forms(7).unwrap(), 1);
        assert_eq!(class_number_imag_forms(23).unwrap(), 3);
        assert_eq!(class_number_imag_forms(3).unwrap(), 1);
    }

    #[test]
    fn imag_class_number_routes_agree() {
        for p in primes_in(7, 1000, Some((3, 4))) {
            assert_eq!(
                class_number_imag(p).unwrap(),
                class_number_imag_forms(p).unwrap(),
                "p={p}"
            );
        }
    }

    #[test]
    fn class_number_real_examples() {
        assert_eq!(class_number_real(5).unwrap(), 1);
        assert_eq!(class_number_real(13).unwrap(), 1);
        assert_eq!(class_number_real(229).unwrap(), 3);
        // further known values: h(401) = 5, h(577) = 7
        assert_eq!(class_number_real(401).unwrap(), 5);
        assert_eq!(class_number_real(577).unwrap(), 7);
    }

    #[test]
    fn unit_power_inverse_cancels() {
        for p in primes_in(5, 300, Some((1, 4))) {
            let eps = fundamental_unit(p).unwrap();
            let h = class_number_real(p).unwrap() as i64;
            let prod = eps.pow(h).unwrap().mul(&eps.pow(-h).unwrap()).unwrap();
            assert!(prod.is_one(), "p={p}");
        }
    }

    #[test]
    fn berndt_chowla_zero_sums() {
        for p in primes_in(7, 5000, Some((3, 4))) {
            let t = ResidueTable::new(p).unwrap();
            if p % 8 == 3 {
                let s: i64 = (1..p)
                    .take_while(|&k| 4 * k < p)
                    .map(|k| t.chi(k as i64) as i64)
                    .sum();
                assert_eq!(s, 0, "p={p}");
            } else {
                let s: i64 = (1..p)
                    .filter(|&k| 4 * k > p && 2 * k < p)
                    .map(|k| t.chi(k as i64) as i64)
                    .sum();
                assert_eq!(s, 0, "p={p}");
            }
        }
    }

    #[test]
    fn class_data_bundles_by_residue_class() {
        let d = ClassData::for_prime(13).unwrap();
        assert!(d.h_real.is_some() && d.eps.is_some() && d.h_imag.is_none());
        let d = ClassData::for_prime(23).unwrap();
        assert_eq!(d.h_imag, Some((3, Method::Dirichlet)));
        assert!(d.h_real.is_none());
    }
}
