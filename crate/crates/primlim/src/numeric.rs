//! Shared numeric helpers: rigorous base-2 logarithms of big integers.

use num_bigint::BigUint;

/// Number of fractional log2 bits extracted by [`log2_bracket`].
const FRAC_BITS: u32 = 60;

/// Guard precision for the mantissa during the shift-and-square recursion.
const MANTISSA_BITS: u64 = 96;

/// Returns `(lo, hi)` with `lo <= log2(v) <= hi`.
///
/// The integer part comes from the bit length (`bitlen - 1 <= log2 v < bitlen`);
/// the fractional part is refined by the classic shift-and-square recursion on a
/// 96-bit mantissa, extracting 60 fractional bits. Mantissa truncation only ever
/// drives the computed value down, so the computed fraction is a lower bound;
/// the upper bound adds one ulp of the extraction (2^-59 covers the undetermined
/// bits plus the accumulated truncation drift).
///
/// Panics if `v == 0` (counts in this crate are always >= 1).
pub(crate) fn log2_bracket(v: &BigUint) -> (f64, f64) {
    assert!(v.bits() > 0, "log2 of zero");
    let bits = v.bits();
    let int_part = bits - 1;
    if v.trailing_zeros() == Some(int_part) {
        // exact power of two
        let x = int_part as f64;
        return (x, x);
    }

    // Normalize to a mantissa in [2^(MANTISSA_BITS-1), 2^MANTISSA_BITS).
    let mut m = if bits >= MANTISSA_BITS {
        v >> (bits - MANTISSA_BITS)
    } else {
        v << (MANTISSA_BITS - bits)
    };

    let one_shifted = BigUint::from(1u8) << (2 * MANTISSA_BITS - 1);
    let mut frac: u64 = 0;
    for _ in 0..FRAC_BITS {
        m = &m * &m;
        frac <<= 1;
        if m >= one_shifted {
            frac |= 1;
            m >>= MANTISSA_BITS;
        } else {
            m >>= MANTISSA_BITS - 1;
        }
    }

    let frac_lo = frac as f64 / (1u64 << FRAC_BITS) as f64;
    // 2^-59 = one extraction ulp; dominates truncation drift (< 2^-85) and the
    // initial mantissa truncation (< 2^-94).
    let lo = ((int_part as f64) + frac_lo).next_down();
    let hi = ((int_part as f64) + frac_lo + 2.0f64.powi(-(FRAC_BITS as i32) + 1)).next_up();
    (lo, hi)
}
