//! Pair-counting statistics and permutation parities over residue
//! sequences: descent counts of `{a j^2}_p`, wide-gap counts, triangular
//! number inversions, shifted counts and the half-range permutation sign.
//!
//! Every count has an O(p^2) nested-loop reference implementation in
//! [`reference`]; the production path switches to an O(p log p) merge-sort
//! inversion counter above [`MERGE_THRESHOLD`]. Counts are exact u64
//! values, not just parities, so reports stay auditable.

use crate::modint::{lnr, mul_mod, ResidueTable};
use crate::{Error, Result};

/// Above this prime the merge-sort inversion counter is used.
pub const MERGE_THRESHOLD: u64 = 512;

fn check_coprime(p: u64, a: i64) -> Result<u64> {
    let r = lnr(a, p);
    if r == 0 {
        return Err(Error::DivisibleByModulus { a, p });
    }
    Ok(r)
}

/// `{a j^2}_p` for `j = 1..=(p-1)/2`.
fn square_seq(p: u64, a: u64) -> Vec<u64> {
    (1..=(p - 1) / 2)
        .map(|j| mul_mod(a, mul_mod(j, j, p), p))
        .collect()
}

/// Counts inversions of `v` by merge sort; `v` is consumed as scratch.
fn merge_count(v: &mut [u64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut buf = v.to_vec();
    let (left, right) = buf.split_at_mut(n / 2);
    let mut inv = merge_count(left) + merge_count(right);
    let (mut i, mut j) = (0, 0);
    for slot in v.iter_mut() {
        if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
            *slot = left[i];
            i += 1;
        } else {
            *slot = right[j];
            j += 1;
            inv += (left.len() - i) as u64;
        }
    }
    inv
}

fn inversions(p: u64, mut v: Vec<u64>) -> u64 {
    if p > MERGE_THRESHOLD {
        merge_count(&mut v)
    } else {
        reference::inversions_naive(&v)
    }
}

/// `|{1 <= k < p/4 : (k/p) = sign * (a/p)}|`.
pub fn count_below_quarter(p: u64, a: i64, sign: i32) -> Result<u64> {
    check_coprime(p, a)?;
    let t = ResidueTable::new(p)?;
    let target = sign * t.chi(a);
    Ok((1..p)
        .take_while(|&k| 4 * k < p)
        .filter(|&k| t.chi(k as i64) == target)
        .count() as u64)
}

/// `|{(j,k) : 1 <= j < k <= (p-1)/2, {aj^2}_p > {ak^2}_p}|`.
pub fn s_count(p: u64, a: i64) -> Result<u64> {
    let a = check_coprime(p, a)?;
    Ok(inversions(p, square_seq(p, a)))
}

/// `|{(j,k) : 1 <= j < k <= (p-1)/2, {ak^2 - aj^2}_p > p/2}|`.
pub fn t_count(p: u64, a: i64) -> Result<u64> {
    let a = check_coprime(p, a)?;
    let v = square_seq(p, a);
    let mut count = 0u64;
    for j in 0..v.len() {
        for k in j + 1..v.len() {
            // {ak^2 - aj^2}_p computed from the reduced residues
            let d = (v[k] + p - v[j]) % p;
            if 2 * d > p {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `|{(j,k) : 1 <= j < k <= (p-1)/2, |{aj^2}_p - {ak^2}_p| > p/2}|`.
pub fn wide_gap_count(p: u64, a: i64) -> Result<u64> {
    let a = check_coprime(p, a)?;
    let v = square_seq(p, a);
    let mut count = 0u64;
    for j in 0..v.len() {
        for k in j + 1..v.len() {
            let gap = v[j].abs_diff(v[k]);
            if 2 * gap > p {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Inversions of the triangular-number residues `{delta * T_j}_p`,
/// `T_m = m(m+1)/2`, over `j = 1..=(p-1)/2`. Requires `p = 3 (mod 4)`.
pub fn tri_inversions(p: u64, delta: u64) -> Result<u64> {
    if p % 4 != 3 {
        return Err(Error::WrongResidueClass {
            p,
            want: 3,
            modulus: 4,
        });
    }
    if delta != 1 && delta != 2 {
        return Err(Error::ParamOutOfRange {
            name: "delta",
            value: delta as i64,
            lo: 1,
            hi: 2,
        });
    }
    check_coprime(p, delta as i64)?;
    Ok(inversions(p, tri_seq(p, delta)))
}

fn tri_seq(p: u64, delta: u64) -> Vec<u64> {
    // delta * T_j mod p with T_j = j(j+1)/2; for delta = 2 this is j(j+1).
    let inv2 = (p + 1) / 2; // 2^{-1} mod p
    (1..=(p - 1) / 2)
        .map(|j| {
            let t = mul_mod(mul_mod(j, j + 1, p), inv2, p);
            mul_mod(delta, t, p)
        })
        .collect()
}

/// `|{(s,t) : 0 <= t < s <= n, {as^2 - b}_p > {at^2 - b}_p}|` with
/// `n = (p-1)/2`. Note the index range starts at 0 and the count is of
/// *ascents* of the later index over the earlier one.
pub fn shifted_count(p: u64, a: u64, b: u64) -> Result<u64> {
    if p % 4 != 3 {
        return Err(Error::WrongResidueClass {
            p,
            want: 3,
            modulus: 4,
        });
    }
    for (name, value) in [("a", a), ("b", b)] {
        if value < 1 || value > p - 1 {
            return Err(Error::ParamOutOfRange {
                name,
                value: value as i64,
                lo: 1,
                hi: (p - 1) as i64,
            });
        }
    }
    let n = (p - 1) / 2;
    let v: Vec<u64> = (0..=n)
        .map(|s| (mul_mod(a, mul_mod(s, s, p), p) + p - b) % p)
        .collect();
    // The n+1 values are pairwise distinct, so ascents = total - inversions.
    let total = (n + 1) * n / 2;
    Ok(total - inversions(p, v))
}

/// `|{0 < r < b : (r/p) = (a/p)}|`.
pub fn count_below_b(p: u64, a: i64, b: u64) -> Result<u64> {
    check_coprime(p, a)?;
    if b < 1 || b > p - 1 {
        return Err(Error::ParamOutOfRange {
            name: "b",
            value: b as i64,
            lo: 1,
            hi: (p - 1) as i64,
        });
    }
    let t = ResidueTable::new(p)?;
    let target = t.chi(a);
    Ok((1..b).filter(|&r| t.chi(r as i64) == target).count() as u64)
}

/// Sign of the permutation `pi_c` of `{1,...,(n-1)/2}` sending `j` to the
/// unique `r` with `cj = +/-r (mod n)`, computed structurally from its
/// inversion parity (never via the Jacobi-symbol formula it is tested
/// against).
pub fn pan_sign(n: u64, c: i64) -> Result<i32> {
    if n % 2 == 0 || n <= 1 {
        return Err(Error::EvenModulus(n));
    }
    let r = lnr(c, n);
    if gcd(r, n) != 1 {
        return Err(Error::NotCoprime { c, n });
    }
    let half = (n - 1) / 2;
    let perm: Vec<u64> = (1..=half)
        .map(|j| {
            let v = mul_mod(r, j, n);
            if v > half {
                n - v
            } else {
                v
            }
        })
        .collect();
    let inv = if n > MERGE_THRESHOLD {
        merge_count(&mut perm.clone())
    } else {
        reference::inversions_naive(&perm)
    };
    Ok(if inv % 2 == 0 { 1 } else { -1 })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Nested-loop reference implementations, kept permanently as oracles for
/// the merge-sort production paths.
pub mod reference {
    use super::*;

    /// O(n^2) inversion count.
    pub fn inversions_naive(v: &[u64]) -> u64 {
        let mut count = 0u64;
        for j in 0..v.len() {
            for k in j + 1..v.len() {
                if v[j] > v[k] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn s_count_naive(p: u64, a: i64) -> Result<u64> {
        let a = check_coprime(p, a)?;
        Ok(inversions_naive(&square_seq(p, a)))
    }

    pub fn tri_inversions_naive(p: u64, delta: u64) -> Result<u64> {
        super::tri_inversions(p, delta)?; // domain checks
        Ok(inversions_naive(&tri_seq(p, delta)))
    }

    pub fn shifted_count_naive(p: u64, a: u64, b: u64) -> Result<u64> {
        super::shifted_count(p, a, b)?; // domain checks
        let n = (p - 1) / 2;
        let v: Vec<u64> = (0..=n)
            .map(|s| (mul_mod(a, mul_mod(s, s, p), p) + p - b) % p)
            .collect();
        let mut count = 0u64;
        for t in 0..v.len() {
            for s in t + 1..v.len() {
                if v[s] > v[t] {
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modint::{jacobi, legendre, primes_in};

    #[test]
    fn count_below_quarter_examples() {
        assert_eq!(count_below_quarter(5, 1, -1).unwrap(), 0);
        assert_eq!(count_below_quarter(13, 1, -1).unwrap(), 1);
        assert_eq!(count_below_quarter(17, 1, -1).unwrap(), 1);
        assert!(count_below_quarter(7, 7, -1).is_err());
    }

    #[test]
    fn s_count_examples() {
        // {j^2}_7 = (1,4,2): single descent (4,2)
        assert_eq!(s_count(7, 1).unwrap(), 1);
        assert_eq!(s_count(5, 1).unwrap(), 0);
        // {j^2}_11 = (1,4,9,5,3): inversions (4,3),(9,5),(9,3),(5,3)
        assert_eq!(s_count(11, 1).unwrap(), 4);
        assert_eq!(s_count(13, 1).unwrap(), 3);
    }

    #[test]
    fn t_count_examples() {
        assert_eq!(t_count(5, 1).unwrap(), 1);
        assert_eq!(t_count(7, 1).unwrap(), 1);
        assert_eq!(t_count(13, 1).unwrap(), 9);
    }

    #[test]
    fn wide_gap_examples() {
        assert_eq!(wide_gap_count(5, 1).unwrap(), 1);
        assert_eq!(wide_gap_count(7, 1).unwrap(), 0);
        assert_eq!(wide_gap_count(13, 1).unwrap(), 6);
    }

    #[test]
    fn tri_inversion_examples() {
        assert_eq!(tri_inversions(7, 1).unwrap(), 0);
        assert_eq!(tri_inversions(7, 2).unwrap(), 1);
        // {T_j}_11 = (1,3,6,10,4)
        assert_eq!(tri_inversions(11, 1).unwrap(), 2);
        assert!(tri_inversions(13, 1).is_err());
        assert!(tri_inversions(7, 3).is_err());
    }

    #[test]
    fn shifted_count_examples() {
        // {s^2 - 1}_7 for s = 0..3 is (6,0,3,1): ascents (2,1),(3,1)
        assert_eq!(shifted_count(7, 1, 1).unwrap(), 2);
        assert_eq!(shifted_count(7, 1, 6).unwrap(), 5);
        assert_eq!(shifted_count(11, 1, 1).unwrap(), 6);
        assert!(shifted_count(7, 0, 1).is_err());
        assert!(shifted_count(7, 1, 7).is_err());
    }

    #[test]
    fn count_below_b_examples() {
        assert_eq!(count_below_b(7, 1, 1).unwrap(), 0);
        assert_eq!(count_below_b(7, 1, 4).unwrap(), 2);
        assert_eq!(count_below_b(7, 3, 4).unwrap(), 1);
    }

    #[test]
    fn pan_sign_examples() {
        assert_eq!(pan_sign(7, 1).unwrap(), 1);
        assert_eq!(pan_sign(7, 2).unwrap(), 1);
        assert_eq!(pan_sign(9, 2).unwrap(), 1);
        assert!(pan_sign(9, 3).is_err());
        assert!(pan_sign(8, 3).is_err());
    }

    #[test]
    fn pan_sign_matches_jacobi_formula() {
        for n in (3..=101u64).step_by(2) {
            for c in 1..n {
                if gcd(c, n) != 1 {
                    continue;
                }
                let want_base = jacobi(c as i64, n).unwrap();
                let want = if (n + 1) / 2 % 2 == 0 { 1 } else { want_base };
                assert_eq!(pan_sign(n, c as i64).unwrap(), want, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn counts_invariant_under_shift_by_p() {
        for p in [13u64, 17, 29] {
            for a in 1..p as i64 {
                assert_eq!(s_count(p, a).unwrap(), s_count(p, a + p as i64).unwrap());
                assert_eq!(t_count(p, a).unwrap(), t_count(p, a - p as i64).unwrap());
                assert_eq!(
                    wide_gap_count(p, a).unwrap(),
                    wide_gap_count(p, a + p as i64).unwrap()
                );
            }
        }
    }

    #[test]
    fn merge_path_matches_reference() {
        // Cross the MERGE_THRESHOLD so both code paths are exercised.
        for p in primes_in(500, 560, None) {
            for a in [1i64, 2, 3, 5] {
                assert_eq!(
                    s_count(p, a).unwrap(),
                    reference::s_count_naive(p, a).unwrap(),
                    "p={p} a={a}"
                );
            }
            if p % 4 == 3 {
                for delta in [1, 2] {
                    assert_eq!(
                        tri_inversions(p, delta).unwrap(),
                        reference::tri_inversions_naive(p, delta).unwrap()
                    );
                }
                assert_eq!(
                    shifted_count(p, 3, 10).unwrap(),
                    reference::shifted_count_naive(p, 3, 10).unwrap()
                );
            }
        }
    }

    #[test]
    fn lemma_parity_congruences() {
        // s + t = wide_gap (mod 2), and wide_gap = |{k < p/4 : (ak/p)=1}|
        // (mod 2), for p = 1 (mod 4).
        for p in primes_in(5, 500, Some((1, 4))) {
            for a in [1i64, 2, 3, 7, (p as i64) - 1] {
                let s = s_count(p, a).unwrap();
                let t = t_count(p, a).unwrap();
                let w = wide_gap_count(p, a).unwrap();
                assert_eq!((s + t) % 2, w % 2, "p={p} a={a}");
                let rhs = (1..p)
                    .take_while(|&k| 4 * k < p)
                    .filter(|&k| legendre(a * k as i64, p).unwrap() == 1)
                    .count() as u64;
                assert_eq!(w % 2, rhs % 2, "p={p} a={a}");
            }
        }
    }
}
