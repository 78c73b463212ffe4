//! Exact counting of primitive subsets: sets of positive integers in which
//! no element properly divides another (antichains of the divisibility
//! order), together with the k-core variant where divisibility is replaced
//! by "quotient smooth over the first k primes".

mod branch;
mod grid;
mod memo;

use crate::arith::{enumerate_smooth, PrimeBasis};
use crate::numeric::log2_bracket;
use crate::{Error, Result};
use num_bigint::BigUint;
use std::fmt;

pub(crate) use branch::{count_independent_sets, for_each_independent_set, full_mask};
pub(crate) use grid::smooth_primitive_family;

/// Cap for the exhaustive-enumeration oracle.
pub const ORACLE_CAP: usize = 25;

/// Cap for the branching counter (vertex masks are 64-bit words).
pub const BRANCHING_CAP: usize = 64;

/// Tuning knobs shared by the counting engines.
#[derive(Clone, Debug)]
pub struct CountConfig {
    /// Approximate byte budget for memo tables and sweep states.
    pub memo_budget_bytes: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            memo_budget_bytes: 256 << 20,
        }
    }
}

/// An exact nonnegative count of arbitrary size.
///
/// Counting operations on well-formed inputs always yield at least 1, since
/// the empty set is primitive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    /// Rigorous `(lo, hi)` bounds on the base-2 logarithm of the count.
    pub fn log2_bracket(&self) -> (f64, f64) {
        log2_bracket(&self.0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A finite set of positive integers with its proper-divisibility relation.
#[derive(Clone, Debug)]
pub struct PosetInstance {
    elements: Vec<u64>,
    /// Bit `j` of `divisor_masks[i]` is set iff `elements[j]` properly
    /// divides `elements[i]` (only `j < i` is possible: elements are sorted).
    divisor_masks: Vec<u64>,
}

impl PosetInstance {
    /// Builds the instance from any collection of positive integers; the
    /// input is treated as a set (sorted, duplicates dropped).
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        if elements.iter().any(|&e| e == 0) {
            return Err(Error::parameter("elements must be positive"));
        }
        elements.sort_unstable();
        elements.dedup();
        if elements.len() > BRANCHING_CAP {
            return Err(Error::resource(format!(
                "{} elements exceed the {BRANCHING_CAP}-element cap",
                elements.len()
            )));
        }
        let divisor_masks = elements
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut mask = 0u64;
                for (j, &d) in elements[..i].iter().enumerate() {
                    if e % d == 0 {
                        mask |= 1 << j;
                    }
                }
                mask
            })
            .collect();
        Ok(PosetInstance {
            elements,
            divisor_masks,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// True iff `elements[i]` properly divides `elements[j]`.
    pub fn divides(&self, i: usize, j: usize) -> bool {
        self.divisor_masks[j] >> i & 1 == 1
    }

    /// Undirected comparability graph as adjacency masks.
    pub fn comparability_masks(&self) -> Vec<u64> {
        let mut adj = self.divisor_masks.clone();
        for i in 0..self.len() {
            let mut m = self.divisor_masks[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                adj[j] |= 1 << i;
            }
        }
        adj
    }
}

/// Exhaustive oracle: counts primitive subsets by sweeping all `2^n`
/// subsets. Kept deliberately naive; the optimized counters are checked
/// against it.
pub fn count_primitive_subsets_oracle(elements: &[u64]) -> Result<BigCount> {
    let poset = PosetInstance::new(elements.iter().copied())?;
    if poset.len() > ORACLE_CAP {
        return Err(Error::resource(format!(
            "{} elements exceed the oracle cap of {ORACLE_CAP}",
            poset.len()
        )));
    }
    let n = poset.len();
    let mut count = 0u64;
    'subset: for s in 0..(1u64 << n) {
        let mut m = s;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            if poset.divisor_masks[i] & s != 0 {
                continue 'subset;
            }
        }
        count += 1;
    }
    Ok(BigCount::from(count))
}

/// Counts primitive subsets of an arbitrary element set, exactly.
pub fn count_antichains(elements: &[u64]) -> Result<BigCount> {
    count_antichains_with(elements, &CountConfig::default())
}

pub fn count_antichains_with(elements: &[u64], cfg: &CountConfig) -> Result<BigCount> {
    let poset = PosetInstance::new(elements.iter().copied())?;
    Ok(BigCount::from(count_poset(&poset, cfg)))
}

fn count_poset(poset: &PosetInstance, cfg: &CountConfig) -> BigUint {
    // 1 is comparable to everything: count(E) = count(E \ {1}) + 1.
    if poset.elements().first() == Some(&1) {
        let rest = PosetInstance::new(poset.elements()[1..].iter().copied())
            .expect("sub-instance of a valid instance");
        return count_poset(&rest, cfg) + 1u8;
    }
    count_independent_sets(&poset.comparability_masks(), cfg.memo_budget_bytes)
}

/// Adjacency masks of the k-core graph on `{1..n}`: an edge joins `a < b`
/// iff `b/a` is an integer whose prime factors all lie in the basis.
pub(crate) fn kcore_adjacency(n: u64, basis: &PrimeBasis) -> Vec<u64> {
    let n = n as usize;
    let mut adj = vec![0u64; n];
    for a in 1..=n {
        for b in (2 * a..=n).step_by(a) {
            if basis.is_smooth((b / a) as u64) {
                adj[a - 1] |= 1 << (b - 1);
                adj[b - 1] |= 1 << (a - 1);
            }
        }
    }
    adj
}

/// Adjacency masks of the divisibility comparability graph on `{1..n}`.
pub(crate) fn divisibility_adjacency(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut adj = vec![0u64; n];
    for a in 1..=n {
        for b in (2 * a..=n).step_by(a) {
            adj[a - 1] |= 1 << (b - 1);
            adj[b - 1] |= 1 << (a - 1);
        }
    }
    adj
}

/// Counts subsets of `{1..n}` in which no element divides another with a
/// basis-smooth quotient.
pub fn count_kcore_subsets(n: u64, basis: &PrimeBasis) -> Result<BigCount> {
    count_kcore_subsets_with(n, basis, &CountConfig::default())
}

pub fn count_kcore_subsets_with(n: u64, basis: &PrimeBasis, cfg: &CountConfig) -> Result<BigCount> {
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    if n > BRANCHING_CAP as u64 {
        return Err(Error::resource(format!(
            "n = {n} exceeds the {BRANCHING_CAP}-element cap of the direct engine"
        )));
    }
    let adj = kcore_adjacency(n, basis);
    Ok(BigCount::from(count_independent_sets(
        &adj,
        cfg.memo_budget_bytes,
    )))
}

/// Largest basis-smooth integer `<= x`.
pub(crate) fn largest_smooth_leq(x: u64, basis: &PrimeBasis) -> Result<u64> {
    if x == 0 {
        return Err(Error::parameter("x must be at least 1"));
    }
    if basis.k() == 1 {
        return Ok(1u64 << (63 - x.leading_zeros()));
    }
    Ok(*enumerate_smooth(x, basis)?
        .last()
        .expect("1 is always smooth"))
}

/// Counts primitive subsets of the basis-smooth numbers `<= x` (the
/// quantity written `P_k(x)` throughout this crate).
///
/// For a single prime the smooth numbers form a chain and the branching
/// counter is used directly; otherwise the exponent-grid sweep runs, falling
/// back to the branching counter for grids the packed encoding cannot hold.
pub fn count_smooth_primitive(x: u64, basis: &PrimeBasis) -> Result<BigCount> {
    count_smooth_primitive_with(x, basis, &CountConfig::default())
}

pub fn count_smooth_primitive_with(
    x: u64,
    basis: &PrimeBasis,
    cfg: &CountConfig,
) -> Result<BigCount> {
    if x == 0 {
        return Err(Error::parameter("x must be at least 1"));
    }
    let canonical = largest_smooth_leq(x, basis)?;
    if basis.k() == 1 {
        return count_antichains_with(&enumerate_smooth(canonical, basis)?, cfg);
    }
    let odd_part = canonical >> canonical.trailing_zeros();
    match smooth_primitive_family(
        basis,
        odd_part,
        canonical.trailing_zeros(),
        cfg.memo_budget_bytes,
    ) {
        Ok(family) => Ok(BigCount::from(
            family.last().cloned().expect("family is never empty"),
        )),
        Err(Error::ResourceLimit(msg)) => {
            let elements = enumerate_smooth(canonical, basis)?;
            if elements.len() <= BRANCHING_CAP {
                count_antichains_with(&elements, cfg)
            } else {
                Err(Error::ResourceLimit(msg))
            }
        }
        Err(e) => Err(e),
    }
}
