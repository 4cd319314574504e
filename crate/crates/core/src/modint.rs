//! Modular arithmetic primitives: characters, square roots, two-squares
//! decomposition, factorials and prime enumeration.
//!
//! All moduli are machine integers (`p < 2^31`); intermediates are widened
//! to `u128` where products could overflow.

use crate::{Error, Result};

/// Threshold below which a [`ResidueTable`] stores the full character table.
const DENSE_CHI_LIMIT: u64 = 1 << 20;

/// Deterministic primality test for `n < 2^64` (Miller-Rabin with a fixed
/// base set known to be exact in this range).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Binary modular exponentiation.
pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Least nonnegative residue of `x` modulo `p`; total for negative `x`.
#[inline]
pub fn lnr(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// Legendre symbol `(a/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i32> {
    check_odd_prime(p)?;
    let r = lnr(a, p);
    if r == 0 {
        return Ok(0);
    }
    let e = mod_pow(r, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`, by quadratic reciprocity.
pub fn jacobi(a: i64, n: u64) -> Result<i32> {
    if n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    let mut a = lnr(a, n);
    let mut n = n;
    let mut sign = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Smallest quadratic non-residue modulo `p`.
fn smallest_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&q| mod_pow(q, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue")
}

/// Deterministic square root modulo an odd prime (Tonelli-Shanks with the
/// smallest non-residue as auxiliary). Returns the smaller of the two roots.
pub fn sqrt_mod(a: i64, p: u64) -> Result<u64> {
    check_odd_prime(p)?;
    let a = lnr(a, p);
    if a == 0 {
        return Err(Error::NonResidue { a: 0, p });
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return Err(Error::NonResidue { a: a as i64, p });
    }
    let r = if p % 4 == 3 {
        mod_pow(a, (p + 1) / 4, p)
    } else {
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let z = smallest_non_residue(p);
        let mut m = s;
        let mut c = mod_pow(z, q, p);
        let mut t = mod_pow(a, q, p);
        let mut r = mod_pow(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, p);
                i += 1;
            }
            let b = mod_pow(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Ok(r.min(p - r))
}

/// `k! mod p` by a direct product loop.
pub fn factorial_mod(k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    for i in 2..=k {
        acc = mul_mod(acc, i % p, p);
    }
    acc
}

/// Writes `p = x^2 + y^2` for a prime `p = 1 (mod 4)`, normalized so that
/// `x = 1 (mod 4)` and `y = ((p-1)/2)! * x (mod p)`. The pair is unique
/// under these constraints; either coordinate may be negative.
pub fn two_squares(p: u64) -> Result<(i64, i64)> {
    check_odd_prime(p)?;
    if p % 4 != 1 {
        return Err(Error::WrongResidueClass {
            p,
            want: 1,
            modulus: 4,
        });
    }
    // Descending Euclidean reduction from a square root of -1: the first
    // remainder below sqrt(p) is one leg of the decomposition.
    let r = sqrt_mod(-1, p)?;
    let bound = p.isqrt();
    let (mut u, mut v) = (p, r);
    while v > bound {
        let w = u % v;
        u = v;
        v = w;
    }
    let x2 = p - v * v;
    let w = x2.isqrt();
    debug_assert_eq!(w * w, x2);
    normalize_two_squares(p, v as i64, w as i64)
}

/// Brute-force oracle: scan all `x^2 + y^2 = p` and apply the same
/// normalization. Used by tests against [`two_squares`].
pub fn two_squares_naive(p: u64) -> Result<(i64, i64)> {
    if p % 4 != 1 {
        return Err(Error::WrongResidueClass {
            p,
            want: 1,
            modulus: 4,
        });
    }
    let bound = p.isqrt();
    for x in 1..=bound {
        let rest = p - x * x;
        let y = rest.isqrt();
        if y * y == rest {
            return normalize_two_squares(p, x as i64, y as i64);
        }
    }
    unreachable!("every prime p = 1 (mod 4) is a sum of two squares")
}

/// Applies the sign constraints `x = 1 (mod 4)`, `y = ((p-1)/2)! x (mod p)`
/// to an unsigned decomposition.
fn normalize_two_squares(p: u64, u: i64, v: i64) -> Result<(i64, i64)> {
    // Exactly one of the legs is odd; that one is x.
    let (mut x, y_abs) = if u % 2 != 0 { (u, v) } else { (v, u) };
    if x.rem_euclid(4) != 1 {
        x = -x;
    }
    let f = factorial_mod((p - 1) / 2, p);
    let want = mul_mod(f, lnr(x, p), p);
    for y in [y_abs, -y_abs] {
        if lnr(y, p) == want {
            return Ok((x, y));
        }
    }
    unreachable!("one of +/-y satisfies the factorial congruence")
}

/// Primes in `[lo, hi]`, optionally restricted to `p = r (mod m)`,
/// ascending. Primality is deterministic for the whole supported range.
pub fn primes_in(lo: u64, hi: u64, residue_filter: Option<(u64, u64)>) -> Vec<u64> {
    let mut out = Vec::new();
    for n in lo.max(2)..=hi {
        if let Some((r, m)) = residue_filter {
            if n % m != r % m {
                continue;
            }
        }
        if is_prime(n) {
            out.push(n);
        }
    }
    out
}

enum ChiStorage {
    Dense(Vec<i8>),
    OnDemand,
}

/// Per-prime precomputed Legendre character data.
///
/// For `p < 2^20` the full length-`p` table is stored; above that the
/// character is evaluated on demand via Euler's criterion to bound memory.
pub struct ResidueTable {
    p: u64,
    half: u64,
    storage: ChiStorage,
}

impl ResidueTable {
    pub fn new(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        let storage = if p < DENSE_CHI_LIMIT {
            let mut chi = vec![-1i8; p as usize];
            chi[0] = 0;
            for k in 1..=(p - 1) / 2 {
                chi[mul_mod(k, k, p) as usize] = 1;
            }
            ChiStorage::Dense(chi)
        } else {
            ChiStorage::OnDemand
        };
        Ok(Self {
            p,
            half: (p - 1) / 2,
            storage,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn half(&self) -> u64 {
        self.half
    }

    /// `chi(k)` = Legendre symbol `(k/p)`, total over the integers.
    #[inline]
    pub fn chi(&self, k: i64) -> i32 {
        let r = lnr(k, self.p);
        match &self.storage {
            ChiStorage::Dense(chi) => chi[r as usize] as i32,
            ChiStorage::OnDemand => {
                if r == 0 {
                    0
                } else if mod_pow(r, self.half, self.p) == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}
