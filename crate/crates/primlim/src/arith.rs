//! Number-theoretic primitives: prime bases, smooth/rough factorization,
//! smooth-number enumeration and exact coprime counting.

use crate::{Error, Result};
use num_bigint::BigUint;

/// The first 64 primes; 64 is the supported basis-size cap.
const SMALL_PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

/// Hard cap on how many smooth numbers a single enumeration may produce.
const SMOOTH_ENUMERATION_CAP: usize = 1 << 24;

/// Largest supported basis size.
pub const MAX_BASIS: usize = SMALL_PRIMES.len();

/// Returns the first `k` primes in ascending order.
pub fn first_primes(k: usize) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::parameter("basis size must be at least 1"));
    }
    if k > MAX_BASIS {
        return Err(Error::parameter(format!(
            "basis size {k} exceeds the cap of {MAX_BASIS}"
        )));
    }
    Ok(SMALL_PRIMES[..k].to_vec())
}

/// The first `k` primes together with their product `D` and `phi(D)`.
///
/// This is the shared context for every operation parameterized by a basis
/// size: "smooth" always means "all prime factors in this basis". `D`
/// overflows 64 bits from `k = 16` on, so both `D` and `phi(D)` are kept as
/// big integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBasis {
    primes: Vec<u64>,
    primorial: BigUint,
    totient: BigUint,
}

impl PrimeBasis {
    pub fn new(k: usize) -> Result<Self> {
        let primes = first_primes(k)?;
        let mut primorial = BigUint::from(1u8);
        let mut totient = BigUint::from(1u8);
        for &p in &primes {
            primorial *= p;
            totient *= p - 1;
        }
        Ok(PrimeBasis {
            primes,
            primorial,
            totient,
        })
    }

    pub fn k(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn largest_prime(&self) -> u64 {
        *self.primes.last().expect("basis is never empty")
    }

    /// Product of the basis primes.
    pub fn primorial(&self) -> &BigUint {
        &self.primorial
    }

    /// Euler totient of the primorial, i.e. the product of `p - 1`.
    pub fn totient(&self) -> &BigUint {
        &self.totient
    }

    /// Rigorous two-sided `f64` bounds on `phi(D)/D`.
    ///
    /// Computed from the exact 60-fractional-bit truncation of the quotient,
    /// so the interval is valid for any basis size.
    pub fn totient_ratio_bounds(&self) -> (f64, f64) {
        let shifted = (&self.totient << 60u32) / &self.primorial;
        let q: u64 = u64::try_from(&shifted).expect("ratio < 1 so the shift fits 64 bits");
        let scale = 2.0f64.powi(-60);
        let lo = ((q as f64) * scale).next_down();
        let hi = (((q + 1) as f64) * scale).next_up();
        (lo, hi)
    }

    /// True iff every prime factor of `m` lies in the basis. `is_smooth(1)` holds.
    pub fn is_smooth(&self, mut m: u64) -> bool {
        debug_assert!(m >= 1);
        for &p in &self.primes {
            while m % p == 0 {
                m /= p;
            }
        }
        m == 1
    }

    /// Exact count of integers in `[lo, hi]` coprime to the basis primorial.
    pub fn coprime_in_range(&self, lo: u64, hi: u64) -> Result<u64> {
        check_range(lo, hi)?;
        Ok(inclusion_exclusion(lo, hi, &self.primes))
    }
}

/// The unique factorization `m = a * R` with `a` basis-smooth and
/// `gcd(R, D) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmoothDecomposition {
    pub value: u64,
    pub smooth_part: u64,
    pub rough_part: u64,
}

/// Splits `m` into its basis-smooth and basis-rough parts.
pub fn smooth_rough_split(m: u64, basis: &PrimeBasis) -> Result<SmoothDecomposition> {
    if m == 0 {
        return Err(Error::parameter("smooth/rough split requires m >= 1"));
    }
    let mut rough = m;
    let mut smooth = 1u64;
    for &p in basis.primes() {
        while rough % p == 0 {
            rough /= p;
            smooth *= p;
        }
    }
    Ok(SmoothDecomposition {
        value: m,
        smooth_part: smooth,
        rough_part: rough,
    })
}

/// All integers `<= x` whose prime factors lie in the basis, ascending.
///
/// Generates products of bounded prime powers directly rather than filtering
/// `1..=x`, so large `x` stays cheap as long as the result itself is small.
/// Enumerations that would exceed an internal cap of 2^24 values are refused
/// with a resource-limit error.
pub fn enumerate_smooth(x: u64, basis: &PrimeBasis) -> Result<Vec<u64>> {
    if x == 0 {
        return Err(Error::parameter("smooth enumeration requires x >= 1"));
    }
    let mut out = Vec::new();
    push_smooth(basis.primes(), 0, 1, x, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

fn push_smooth(primes: &[u64], idx: usize, cur: u64, x: u64, out: &mut Vec<u64>) -> Result<()> {
    if idx == primes.len() {
        if out.len() >= SMOOTH_ENUMERATION_CAP {
            return Err(Error::resource(format!(
                "smooth enumeration exceeds {SMOOTH_ENUMERATION_CAP} values"
            )));
        }
        out.push(cur);
        return Ok(());
    }
    let p = primes[idx];
    let mut v = cur;
    loop {
        push_smooth(primes, idx + 1, v, x, out)?;
        if v > x / p {
            return Ok(());
        }
        v *= p;
    }
}

/// Exact count of integers in `[lo, hi]` coprime to `d`, by
/// inclusion-exclusion over the squarefree divisors of `d`.
pub fn coprime_count(lo: u64, hi: u64, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::parameter("modulus must be >= 1"));
    }
    check_range(lo, hi)?;
    let primes = distinct_prime_factors(d);
    Ok(inclusion_exclusion(lo, hi, &primes))
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 {
        return Err(Error::parameter("range must start at 1 or above"));
    }
    if lo > hi {
        return Err(Error::parameter(format!("empty range: {lo} > {hi}")));
    }
    Ok(())
}

fn distinct_prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d % p == 0 {
            out.push(p);
            while d % p == 0 {
                d /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Signed divisor sweep; `primes` must be distinct and ascending.
fn inclusion_exclusion(lo: u64, hi: u64, primes: &[u64]) -> u64 {
    fn multiples(hi: u64, lo_m1: u64, d: u64) -> u64 {
        hi / d - lo_m1 / d
    }
    // acc collects the signed correction; divisors above hi contribute nothing
    // and are pruned (primes ascending, so the first overflow ends the level).
    fn walk(idx: usize, prod: u64, sign: i64, lo_m1: u64, hi: u64, primes: &[u64], acc: &mut i64) {
        for i in idx..primes.len() {
            if prod > hi / primes[i] {
                break;
            }
            let d = prod * primes[i];
            *acc += sign * multiples(hi, lo_m1, d) as i64;
            walk(i + 1, d, -sign, lo_m1, hi, primes, acc);
        }
    }
    let lo_m1 = lo - 1;
    let mut acc = (hi - lo_m1) as i64;
    walk(0, 1, -1, lo_m1, hi, primes, &mut acc);
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    #[test]
    fn first_primes_examples() {
        assert_eq!(first_primes(1).unwrap(), vec![2]);
        assert_eq!(first_primes(3).unwrap(), vec![2, 3, 5]);
        assert_eq!(first_primes(5).unwrap(), vec![2, 3, 5, 7, 11]);
        assert!(matches!(first_primes(0), Err(Error::Parameter(_))));
        assert!(matches!(first_primes(65), Err(Error::Parameter(_))));
    }

    #[test]
    fn prime_table_is_actually_prime() {
        let is_prime = |n: u64| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        let primes = first_primes(64).unwrap();
        assert_eq!(primes[0], 2);
        for w in primes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for &p in &primes {
            assert!(is_prime(p), "{p} is not prime");
        }
    }

    #[test]
    fn basis_products() {
        let b = PrimeBasis::new(3).unwrap();
        assert_eq!(b.primorial(), &BigUint::from(30u8));
        assert_eq!(b.totient(), &BigUint::from(8u8));
        // D overflows u64 only at k >= 16; still exact here.
        let big = PrimeBasis::new(20).unwrap();
        assert!(big.primorial().bits() > 64);
    }

    #[test]
    fn totient_ratio_bounds_bracket_truth() {
        for k in 1..=8 {
            let b = PrimeBasis::new(k).unwrap();
            let mut truth = 1.0f64;
            for &p in b.primes() {
                truth *= (p - 1) as f64 / p as f64;
            }
            let (lo, hi) = b.totient_ratio_bounds();
            assert!(lo <= truth && truth <= hi, "k={k}: [{lo}, {hi}] vs {truth}");
            assert!(hi - lo < 1e-12);
        }
    }

    #[test]
    fn split_examples() {
        let b1 = PrimeBasis::new(1).unwrap();
        let s = smooth_rough_split(12, &b1).unwrap();
        assert_eq!((s.smooth_part, s.rough_part), (4, 3));

        let s = smooth_rough_split(1, &b1).unwrap();
        assert_eq!((s.smooth_part, s.rough_part), (1, 1));

        let b2 = PrimeBasis::new(2).unwrap();
        let s = smooth_rough_split(45, &b2).unwrap();
        assert_eq!((s.smooth_part, s.rough_part), (9, 5));

        assert!(matches!(
            smooth_rough_split(0, &b1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn split_recombines_and_is_valid() {
        for k in 1..=4 {
            let basis = PrimeBasis::new(k).unwrap();
            let d: u64 = basis.primes().iter().product();
            for m in 1..=100_000u64 {
                let s = smooth_rough_split(m, &basis).unwrap();
                assert_eq!(s.smooth_part * s.rough_part, m);
                assert!(basis.is_smooth(s.smooth_part));
                assert_eq!(gcd(s.rough_part, d), 1);
            }
        }
    }

    #[test]
    fn split_is_unique_by_divisor_scan() {
        let basis = PrimeBasis::new(2).unwrap();
        let d: u64 = basis.primes().iter().product();
        for m in 1..=1000u64 {
            let mut found = Vec::new();
            for a in 1..=m {
                if m % a == 0 && basis.is_smooth(a) && gcd(m / a, d) == 1 {
                    found.push((a, m / a));
                }
            }
            let s = smooth_rough_split(m, &basis).unwrap();
            assert_eq!(found, vec![(s.smooth_part, s.rough_part)], "m={m}");
        }
    }

    #[test]
    fn distinct_rough_parts_forbid_smooth_ratios() {
        // If rough(m1) != rough(m2) then m1/m2, when an integer, is not smooth.
        for k in 1..=3 {
            let basis = PrimeBasis::new(k).unwrap();
            let rough: Vec<u64> = (1..=1000u64)
                .map(|m| smooth_rough_split(m, &basis).unwrap().rough_part)
                .collect();
            for m2 in 1..=1000u64 {
                for m1 in (m2..=1000).step_by(m2 as usize) {
                    if rough[(m1 - 1) as usize] != rough[(m2 - 1) as usize] {
                        assert!(
                            !basis.is_smooth(m1 / m2),
                            "k={k}: {m1}/{m2} is smooth but rough parts differ"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn smooth_enumeration_examples() {
        let b1 = PrimeBasis::new(1).unwrap();
        assert_eq!(enumerate_smooth(1, &b1).unwrap(), vec![1]);
        assert_eq!(enumerate_smooth(20, &b1).unwrap(), vec![1, 2, 4, 8, 16]);
        let b2 = PrimeBasis::new(2).unwrap();
        assert_eq!(
            enumerate_smooth(10, &b2).unwrap(),
            vec![1, 2, 3, 4, 6, 8, 9]
        );
    }

    #[test]
    fn smooth_enumeration_matches_trial_division() {
        // one trial-division pass per basis, then every x <= 10^4 compares
        // against the prefix of that list
        for k in 1..=4 {
            let basis = PrimeBasis::new(k).unwrap();
            let filtered: Vec<u64> = (1..=10_000u64).filter(|&m| basis.is_smooth(m)).collect();
            for x in 1..=10_000u64 {
                let fast = enumerate_smooth(x, &basis).unwrap();
                let cut = filtered.partition_point(|&m| m <= x);
                assert_eq!(fast, filtered[..cut], "k={k} x={x}");
            }
        }
    }

    #[test]
    fn smooth_count_respects_tuple_bound() {
        // |smooth <= x| <= (1 + log2 x)^k
        for k in 1..=4 {
            let basis = PrimeBasis::new(k).unwrap();
            for x in [1u64, 10, 100, 1000, 10_000, 1_000_000] {
                let n = enumerate_smooth(x, &basis).unwrap().len() as f64;
                let bound = (1.0 + (x as f64).log2()).powi(k as i32);
                assert!(n <= bound + 1e-9, "k={k} x={x}: {n} > {bound}");
            }
        }
    }

    #[test]
    fn smooth_enumeration_large_x_is_feasible() {
        let b2 = PrimeBasis::new(2).unwrap();
        let v = enumerate_smooth(1_000_000_000, &b2).unwrap();
        assert!(v.len() > 300 && v.len() < 1000);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coprime_count_examples() {
        assert_eq!(coprime_count(1, 10, 6).unwrap(), 3);
        assert_eq!(coprime_count(1, 57, 1).unwrap(), 57);
        assert_eq!(coprime_count(1, 30, 30).unwrap(), 8);
        assert!(matches!(coprime_count(5, 4, 6), Err(Error::Parameter(_))));
        assert!(matches!(coprime_count(1, 10, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn coprime_count_matches_gcd_scan() {
        let scan = |lo: u64, hi: u64, d: u64| (lo..=hi).filter(|&r| gcd(r, d) == 1).count() as u64;
        // deterministic spread of intervals inside [1, 10^4]
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &d in &[2u64, 6, 30, 210] {
            assert_eq!(coprime_count(1, 10_000, d).unwrap(), scan(1, 10_000, d));
            for _ in 0..200 {
                let a = next() % 10_000 + 1;
                let b = next() % 10_000 + 1;
                let (lo, hi) = (a.min(b), a.max(b));
                assert_eq!(
                    coprime_count(lo, hi, d).unwrap(),
                    scan(lo, hi, d),
                    "range [{lo},{hi}] d={d}"
                );
            }
        }
    }

    #[test]
    fn coprime_count_via_basis_matches_plain() {
        let b = PrimeBasis::new(4).unwrap();
        assert_eq!(
            b.coprime_in_range(1, 10_000).unwrap(),
            coprime_count(1, 10_000, 210).unwrap()
        );
    }
}
