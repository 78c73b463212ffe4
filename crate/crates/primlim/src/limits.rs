//! Structural identities as computations: the product decomposition of the
//! k-core count over rough parts, rigorous enclosures of the growth
//! constants, and a verifier for the finitary inequalities the counts obey.

use crate::antichain::{
    count_antichains_with, count_kcore_subsets_with, divisibility_adjacency,
    for_each_independent_set, full_mask, kcore_adjacency, largest_smooth_leq,
    smooth_primitive_family, BigCount, CountConfig, BRANCHING_CAP,
};
use crate::arith::{enumerate_smooth, PrimeBasis};
use crate::numeric::log2_bracket;
use crate::{Error, Result};
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::HashMap;

/// Per-term slack folded into both enclosure bounds; generously dominates
/// every floating-point rounding the term accumulation can commit.
const TERM_SLACK: f64 = 1.0 / (1u64 << 45) as f64;

/// Caps f(n) computations delegated to the branching counter.
pub const FN_CAP: u64 = BRANCHING_CAP as u64;

/// Exact count of primitive subsets of `{1..n}`.
pub fn fn_exact(n: u64) -> Result<BigCount> {
    fn_exact_with(n, &CountConfig::default())
}

pub fn fn_exact_with(n: u64, cfg: &CountConfig) -> Result<BigCount> {
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    if n > FN_CAP {
        return Err(Error::resource(format!("n = {n} exceeds the cap of {FN_CAP}")));
    }
    let elements: Vec<u64> = (1..=n).collect();
    count_antichains_with(&elements, cfg)
}

/// Caches exact smooth-primitive counts `P_k` per canonical argument.
///
/// `P_k(x)` only depends on the largest basis-smooth integer `<= x`, so
/// arguments are canonicalized before lookup. Values sharing an odd part are
/// produced by one grid sweep.
pub struct PkEngine {
    basis: PrimeBasis,
    cfg: CountConfig,
    entries: HashMap<u64, (BigUint, f64, f64)>,
}

impl PkEngine {
    pub fn new(k: usize) -> Result<Self> {
        Ok(PkEngine::with_config(PrimeBasis::new(k)?, CountConfig::default()))
    }

    pub fn with_config(basis: PrimeBasis, cfg: CountConfig) -> Self {
        PkEngine {
            basis,
            cfg,
            entries: HashMap::new(),
        }
    }

    pub fn basis(&self) -> &PrimeBasis {
        &self.basis
    }

    fn insert(&mut self, canonical: u64, count: BigUint) {
        let (lo, hi) = log2_bracket(&count);
        self.entries.insert(canonical, (count, lo, hi));
    }

    fn compute_family(&self, odd_part: u64, emax: u32) -> Result<Vec<BigUint>> {
        if self.basis.k() == 1 {
            debug_assert_eq!(odd_part, 1);
            return (0..=emax)
                .map(|e| {
                    let chain = enumerate_smooth(1u64 << e, &self.basis)?;
                    Ok(count_antichains_with(&chain, &self.cfg)?.into_inner())
                })
                .collect();
        }
        match smooth_primitive_family(&self.basis, odd_part, emax, self.cfg.memo_budget_bytes) {
            Ok(family) => Ok(family),
            Err(Error::ResourceLimit(msg)) => {
                // small irregular grids fall back to the branching counter
                (0..=emax)
                    .map(|e| {
                        let elements = enumerate_smooth(odd_part << e, &self.basis)?;
                        if elements.len() > BRANCHING_CAP {
                            return Err(Error::resource(msg.clone()));
                        }
                        Ok(count_antichains_with(&elements, &self.cfg)?.into_inner())
                    })
                    .collect()
            }
            Err(e) => Err(e),
        }
    }

    /// Exact `P_k(x)`.
    pub fn count(&mut self, x: u64) -> Result<BigUint> {
        let canonical = largest_smooth_leq(x, &self.basis)?;
        if let Some((count, _, _)) = self.entries.get(&canonical) {
            return Ok(count.clone());
        }
        let odd_part = canonical >> canonical.trailing_zeros();
        let emax = canonical.trailing_zeros();
        let family = self.compute_family(odd_part, emax)?;
        for (e, count) in family.iter().enumerate() {
            self.insert(odd_part << e, count.clone());
        }
        Ok(family.last().cloned().expect("family is never empty"))
    }

    /// Rigorous `(lo, hi)` bounds on `log2 P_k(x)`.
    pub fn log2_bounds(&mut self, x: u64) -> Result<(f64, f64)> {
        let canonical = largest_smooth_leq(x, &self.basis)?;
        if let Some(&(_, lo, hi)) = self.entries.get(&canonical) {
            return Ok((lo, hi));
        }
        self.count(canonical)?;
        let &(_, lo, hi) = self.entries.get(&canonical).expect("just inserted");
        Ok((lo, hi))
    }

    /// Computes every canonical value `<= bound`, one grid sweep per odd
    /// part, sweeps running in parallel. Results are exact integers, so the
    /// cache contents do not depend on the schedule.
    pub fn precompute_up_to(&mut self, bound: u64) -> Result<()> {
        let smooth = enumerate_smooth(bound, &self.basis)?;
        let jobs: Vec<(u64, u32)> = smooth
            .iter()
            .filter(|&&v| v % 2 == 1)
            .map(|&u| (u, (bound / u).ilog2()))
            .filter(|&(u, emax)| !self.entries.contains_key(&(u << emax)))
            .collect();
        let families: Vec<Result<(u64, Vec<BigUint>)>> = jobs
            .par_iter()
            .map(|&(u, emax)| Ok((u, self.compute_family(u, emax)?)))
            .collect();
        for item in families {
            let (u, family) = item?;
            for (e, count) in family.into_iter().enumerate() {
                self.insert(u << e, count);
            }
        }
        Ok(())
    }
}

fn checked_pow_exponent(count: u64) -> Result<u32> {
    u32::try_from(count).map_err(|_| Error::resource("block exponent exceeds u32".to_string()))
}

fn product_tree(mut factors: Vec<BigUint>) -> BigUint {
    if factors.is_empty() {
        return BigUint::from(1u8);
    }
    while factors.len() > 1 {
        factors = factors
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    &pair[0] * &pair[1]
                } else {
                    pair[0].clone()
                }
            })
            .collect();
    }
    factors.pop().expect("nonempty")
}

/// Exact k-core count of `{1..n}` via the rough-part product
/// `prod over R coprime to D of P_k(floor(n/R))`.
///
/// Rough parts are grouped into the O(sqrt n) maximal blocks on which
/// `floor(n/R)` is constant; each block contributes `P_k(q)` raised to the
/// exact count of coprime integers in the block.
pub fn fnk_product(n: u64, basis: &PrimeBasis) -> Result<BigCount> {
    let mut engine = PkEngine::with_config(basis.clone(), CountConfig::default());
    fnk_product_with(n, &mut engine)
}

pub fn fnk_product_with(n: u64, engine: &mut PkEngine) -> Result<BigCount> {
    Ok(BigCount::from(product_tree(
        fnk_blocks(n, engine)?
            .par_iter()
            .map(|(p, cnt)| p.pow(*cnt))
            .collect(),
    )))
}

/// Distinct-quotient factors of the rough-part product: `(P_k(q), multiplicity)`.
fn fnk_blocks(n: u64, engine: &mut PkEngine) -> Result<Vec<(BigUint, u32)>> {
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    let mut factors = Vec::new();
    let mut r = 1u64;
    while r <= n {
        let q = n / r;
        let r_hi = n / q;
        let coprime = engine.basis().coprime_in_range(r, r_hi)?;
        if coprime > 0 {
            factors.push((engine.count(q)?, checked_pow_exponent(coprime)?));
        }
        r = r_hi + 1;
    }
    Ok(factors)
}

/// Rigorous `(lo, hi)` bounds on `log2 fnk_product(n, k)` without building
/// the full product.
pub fn fnk_log2_bounds(n: u64, engine: &mut PkEngine) -> Result<(f64, f64)> {
    let blocks = fnk_blocks(n, engine)?;
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    let mut slack = 0.0f64;
    for (p, cnt) in blocks {
        let (p_lo, p_hi) = log2_bracket(&p);
        lo += cnt as f64 * p_lo;
        hi += cnt as f64 * p_hi;
        slack += cnt as f64 * TERM_SLACK;
    }
    Ok(((lo - slack).next_down(), (hi + slack).next_up()))
}

/// Drops every element strictly below `n/k`; applied to a k-core set the
/// survivors form a primitive set.
pub fn removal_map(s: &[u64], n: u64, k: u32) -> Result<Vec<u64>> {
    if n == 0 || k == 0 {
        return Err(Error::parameter("removal threshold needs n >= 1 and k >= 1"));
    }
    Ok(s.iter()
        .copied()
        .filter(|&e| e.saturating_mul(k as u64) >= n)
        .collect())
}

/// Count of candidate elements a removal can delete: `|{i in [n] : i < n/k}|`.
pub fn removed_slot_count(n: u64, k: u32) -> u64 {
    (n - 1) / k as u64
}

/// Upward-rounded `(1 + log2 x)^k`, the tuple-count bound on `log2 P_k(x)`.
pub fn pk_upper_bound_log2(x: u64, k: usize) -> Result<f64> {
    if x == 0 || k == 0 {
        return Err(Error::parameter("bound needs x >= 1 and k >= 1"));
    }
    if x.is_power_of_two() {
        // (1 + log2 x) is a small integer; the power is exact while it fits.
        let base = 1 + x.trailing_zeros() as u128;
        if let Some(exact) = base.checked_pow(k as u32).filter(|&v| v < 1 << 53) {
            return Ok(exact as f64);
        }
    }
    let base = (1.0 + (x as f64).log2().next_up()).next_up();
    let raw = base.powi(k as i32);
    Ok((raw * (1.0 + (k as f64 + 2.0) * f64::EPSILON)).next_up())
}

fn power_of_two_exponent(l_trunc: u64) -> Result<u32> {
    if l_trunc < 2 || !l_trunc.is_power_of_two() {
        return Err(Error::parameter(format!(
            "truncation level must be a power of two >= 2, got {l_trunc}"
        )));
    }
    Ok(l_trunc.trailing_zeros())
}

/// Majorant term `phi_hi * (2+j)^k * 2^-(j+1)`, rounded up.
fn majorant_term(j: u32, k: usize, phi_hi: f64) -> f64 {
    let base = ((2 + j) as f64).powi(k as i32);
    let nudged = base * (1.0 + (k as f64 + 2.0) * f64::EPSILON);
    (phi_hi * nudged * 2.0f64.powi(-(j as i32) - 1)).next_up()
}

/// Ratio of consecutive majorant terms, rounded up; decreasing in `j`.
fn majorant_ratio(j: u32, k: usize) -> f64 {
    let r = ((3 + j) as f64 / (2 + j) as f64).powi(k as i32) / 2.0;
    (r * (1.0 + (k as f64 + 4.0) * f64::EPSILON)).next_up()
}

/// Geometric remainder bound on the majorant series from `j` on; requires
/// the term ratio at `j` to be below one.
fn majorant_remainder(j: u32, k: usize, phi_hi: f64) -> f64 {
    let r = majorant_ratio(j, k);
    debug_assert!(r < 1.0);
    (majorant_term(j, k, phi_hi) / (1.0 - r)).next_up()
}

/// First index at which both the ratio test and the truncation tolerance
/// admit cutting the majorant series; depends on `(k, tol)` only, so tails
/// computed for different truncation levels telescope exactly.
fn majorant_cutoff(k: usize, phi_hi: f64, tol: f64) -> u32 {
    let mut j = 0u32;
    loop {
        if majorant_ratio(j, k) < 0.75
            && majorant_remainder(j + 1, k, phi_hi) <= tol.max(f64::MIN_POSITIVE)
        {
            return j;
        }
        j += 1;
    }
}

/// Descending prefix sums of the majorant series: entry `j` bounds the whole
/// series from `j` on. Built from the cutoff down so `t[j] >= t[j+1]` holds
/// exactly in floating point.
fn majorant_tail_table(k: usize, phi_hi: f64, tol: f64) -> Vec<f64> {
    let cutoff = majorant_cutoff(k, phi_hi, tol);
    let mut table = vec![0.0f64; cutoff as usize + 1];
    table[cutoff as usize] =
        (majorant_term(cutoff, k, phi_hi) + majorant_remainder(cutoff + 1, k, phi_hi)).next_up();
    for j in (0..cutoff).rev() {
        table[j as usize] = (majorant_term(j, k, phi_hi) + table[j as usize + 1]).next_up();
    }
    table
}

fn tail_bound_from_table(table: &[f64], k: usize, phi_hi: f64, exponent: u32) -> f64 {
    match table.get(exponent as usize) {
        Some(&t) => t,
        None => majorant_remainder(exponent, k, phi_hi),
    }
}

/// Rigorous upper bound, in log2, on the tail `sum over l >= L` of
/// `phi(D)/D * log2(P_k(l)) / (l (l+1))`.
///
/// Uses the blockwise majorant: on `[2^j, 2^(j+1))` the summand's log factor
/// is at most `(2+j)^k` while the weights add up to exactly `2^-(j+1)`.
pub fn tail_bound_log2(basis: &PrimeBasis, l_trunc: u64) -> Result<f64> {
    let exponent = power_of_two_exponent(l_trunc)?;
    let k = basis.k();
    let (_, phi_hi) = basis.totient_ratio_bounds();
    let table = majorant_tail_table(k, phi_hi, DEFAULT_TAIL_TOL);
    Ok(tail_bound_from_table(&table, k, phi_hi, exponent))
}

const DEFAULT_TAIL_TOL: f64 = 1e-18;

/// Two-sided rigorous bounds on `log2 alpha_k`, where `alpha_k` is the
/// growth constant of the k-core counts, equal to the convergent product
/// `prod over l of P_k(l) ^ ((1/l - 1/(l+1)) phi(D)/D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEnclosure {
    k: usize,
    l_trunc: u64,
    lower_log2: f64,
    upper_log2: f64,
    error_budget: f64,
}

impl AlphaEnclosure {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Truncation level: the partial product covered `l < l_trunc` exactly.
    pub fn l_trunc(&self) -> u64 {
        self.l_trunc
    }

    pub fn lower_log2(&self) -> f64 {
        self.lower_log2
    }

    pub fn upper_log2(&self) -> f64 {
        self.upper_log2
    }

    /// Total rounding slack already folded into both bounds.
    pub fn error_budget(&self) -> f64 {
        self.error_budget
    }

    pub fn width_log2(&self) -> f64 {
        self.upper_log2 - self.lower_log2
    }

    pub fn midpoint_log2(&self) -> f64 {
        0.5 * (self.lower_log2 + self.upper_log2)
    }

    /// Lower bound as a plain value; two ulps absorb libm's exp2 rounding.
    pub fn lower_value(&self) -> f64 {
        self.lower_log2.exp2().next_down().next_down()
    }

    pub fn upper_value(&self) -> f64 {
        self.upper_log2.exp2().next_up().next_up()
    }

    pub fn width_value(&self) -> f64 {
        self.upper_value() - self.lower_value()
    }

    /// True iff `inner` lies within `self`.
    pub fn contains(&self, inner: &AlphaEnclosure) -> bool {
        self.lower_log2 <= inner.lower_log2 && inner.upper_log2 <= self.upper_log2
    }
}

/// Encloses `log2 alpha_k` by the partial sum over `l < l_trunc` plus the
/// blockwise tail majorant. `tol` caps the extra slack the tail-series
/// truncation may add beyond the structural bound.
pub fn alpha_k_enclosure(k: usize, l_trunc: u64, tol: f64) -> Result<AlphaEnclosure> {
    let mut engine = PkEngine::new(k)?;
    alpha_k_enclosure_with(&mut engine, l_trunc, tol)
}

pub fn alpha_k_enclosure_with(
    engine: &mut PkEngine,
    l_trunc: u64,
    tol: f64,
) -> Result<AlphaEnclosure> {
    let exponent = power_of_two_exponent(l_trunc)?;
    if !(tol > 0.0) {
        return Err(Error::parameter("tolerance must be positive"));
    }
    let k = engine.basis().k();
    let (phi_lo, phi_hi) = engine.basis().totient_ratio_bounds();

    engine.precompute_up_to(l_trunc - 1)?;
    let smooth = enumerate_smooth(l_trunc - 1, engine.basis())?;

    // Partial sum of log2(P_k(l)) / (l (l+1)) for l < l_trunc, accumulated
    // in ascending l with the bracket side matching the bound being built.
    let mut sum_lo = 0.0f64;
    let mut sum_hi = 0.0f64;
    for (i, &s) in smooth.iter().enumerate() {
        let (p_lo, p_hi) = engine.log2_bounds(s)?;
        let until = smooth
            .get(i + 1)
            .map(|&nxt| nxt - 1)
            .unwrap_or(l_trunc - 1)
            .min(l_trunc - 1);
        for l in s..=until {
            let weight = 1.0 / (l * (l + 1)) as f64;
            sum_lo += p_lo * weight;
            sum_hi += p_hi * weight;
        }
    }

    // TERM_SLACK covers each term's rounding only while the running sums
    // stay far below 2^8; log2 P_k(l) <= #smooth(l) <= l keeps them under
    // ln(l_trunc) + 1.
    debug_assert!(sum_hi < 256.0);
    let terms = (l_trunc - 1) as f64;
    let budget = (terms + 1.0) * TERM_SLACK;
    let tail_table = majorant_tail_table(k, phi_hi, tol.min(DEFAULT_TAIL_TOL));
    let tail = tail_bound_from_table(&tail_table, k, phi_hi, exponent);

    let lower_log2 = (sum_lo * phi_lo - budget).next_down();
    let upper_log2 = (sum_hi * phi_hi + budget + tail).next_up();
    debug_assert!(lower_log2 <= upper_log2);
    Ok(AlphaEnclosure {
        k,
        l_trunc,
        lower_log2,
        upper_log2,
        error_budget: budget,
    })
}

/// Distance between the finite-n growth rate `log2(f(n,k)) / n` and the
/// midpoint of an enclosure of `log2 alpha_k`. Diagnostic only.
pub fn finite_n_gap(n: u64, basis: &PrimeBasis, enclosure: &AlphaEnclosure) -> Result<f64> {
    let mut engine = PkEngine::with_config(basis.clone(), CountConfig::default());
    finite_n_gap_with(n, &mut engine, enclosure)
}

pub fn finite_n_gap_with(
    n: u64,
    engine: &mut PkEngine,
    enclosure: &AlphaEnclosure,
) -> Result<f64> {
    let count = fnk_product_with(n, engine)?;
    let (lo, hi) = count.log2_bracket();
    let rate = 0.5 * (lo + hi) / n as f64;
    Ok((rate - enclosure.midpoint_log2()).abs())
}

/// One verified identity or inequality instance.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub params: String,
    pub passed: bool,
    pub witness: String,
}

/// Pass/fail results for every identity and inequality over a range.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: &'static str, params: String, passed: bool, witness: String) {
        self.checks.push(Check {
            name,
            params,
            passed,
            witness,
        });
    }
}

/// Count provider for the verifier; swapped out in tests to prove the
/// harness catches corrupted values.
pub(crate) trait CountSource {
    fn primitive(&mut self, n: u64) -> Result<BigUint>;
    fn kcore(&mut self, n: u64, k: usize) -> Result<BigUint>;
    fn kcore_product(&mut self, n: u64, k: usize) -> Result<BigUint>;
}

pub(crate) struct ExactSource {
    cfg: CountConfig,
    f_cache: HashMap<u64, BigUint>,
    engines: HashMap<usize, PkEngine>,
}

impl ExactSource {
    pub(crate) fn new(cfg: CountConfig) -> Self {
        ExactSource {
            cfg,
            f_cache: HashMap::new(),
            engines: HashMap::new(),
        }
    }

    fn engine(&mut self, k: usize) -> Result<&mut PkEngine> {
        if !self.engines.contains_key(&k) {
            let engine = PkEngine::with_config(PrimeBasis::new(k)?, self.cfg.clone());
            self.engines.insert(k, engine);
        }
        Ok(self.engines.get_mut(&k).expect("just inserted"))
    }
}

impl CountSource for ExactSource {
    fn primitive(&mut self, n: u64) -> Result<BigUint> {
        if let Some(v) = self.f_cache.get(&n) {
            return Ok(v.clone());
        }
        let v = fn_exact_with(n, &self.cfg)?.into_inner();
        self.f_cache.insert(n, v.clone());
        Ok(v)
    }

    fn kcore(&mut self, n: u64, k: usize) -> Result<BigUint> {
        let cfg = self.cfg.clone();
        Ok(count_kcore_subsets_with(n, &PrimeBasis::new(k)?, &cfg)?.into_inner())
    }

    fn kcore_product(&mut self, n: u64, k: usize) -> Result<BigUint> {
        let engine = self.engine(k)?;
        Ok(fnk_product_with(n, engine)?.into_inner())
    }
}

/// Checks, for all `n <= n_max` and `k <= k_max`: the k-core chain
/// `f(n) <= f(n,k+1) <= f(n,k)`, the exact fiber bound
/// `f(n,k) <= 2^m f(n)`, the subset sandwich `2^ceil(n/2) <= f(n) <= 2^n`,
/// the rough-part product identity, and (for `n <= 20`, exhaustively over
/// k-core sets) soundness of the removal map and its fiber sizes.
pub fn verify_inequalities(n_max: u64, k_max: usize) -> Result<VerificationReport> {
    if n_max == 0 || n_max > 40 {
        return Err(Error::parameter("n_max must lie in 1..=40"));
    }
    if k_max == 0 || k_max > 3 {
        return Err(Error::parameter("k_max must lie in 1..=3"));
    }
    let mut source = ExactSource::new(CountConfig::default());
    verify_with_source(n_max, k_max, &mut source)
}

pub(crate) fn verify_with_source(
    n_max: u64,
    k_max: usize,
    source: &mut dyn CountSource,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    for n in 1..=n_max {
        let f_n = source.primitive(n)?;

        let lower = BigUint::from(1u8) << n.div_ceil(2);
        let upper = BigUint::from(1u8) << n;
        report.record(
            "sandwich",
            format!("n={n}"),
            lower <= f_n && f_n <= upper,
            format!("2^{} <= {f_n} <= 2^{n}", n.div_ceil(2)),
        );

        for k in 1..=k_max {
            let fnk = source.kcore(n, k)?;
            report.record(
                "primitive_below_kcore",
                format!("n={n} k={k}"),
                f_n <= fnk,
                format!("f={f_n} fnk={fnk}"),
            );

            let fnk_next = source.kcore(n, k + 1)?;
            report.record(
                "kcore_decreasing_in_k",
                format!("n={n} k={k}"),
                fnk_next <= fnk,
                format!("fnk(k+1)={fnk_next} fnk={fnk}"),
            );

            let m = removed_slot_count(n, k as u32);
            let fiber_bound = &f_n << m;
            report.record(
                "fiber_bound",
                format!("n={n} k={k}"),
                fnk <= fiber_bound,
                format!("fnk={fnk} 2^{m}*f={fiber_bound}"),
            );

            let product = source.kcore_product(n, k)?;
            report.record(
                "product_decomposition",
                format!("n={n} k={k}"),
                product == fnk,
                format!("product={product} direct={fnk}"),
            );
        }
    }

    for n in 1..=n_max.min(20) {
        for k in 1..=k_max {
            let (passed, witness) = removal_exhaustive(n, k)?;
            report.record("removal_soundness", format!("n={n} k={k}"), passed, witness);
        }
    }
    Ok(report)
}

/// Exhaustively maps every k-core subset of `{1..n}` through the removal
/// threshold; verifies each image is primitive and no image has more than
/// `2^m` preimages.
fn removal_exhaustive(n: u64, k: usize) -> Result<(bool, String)> {
    let basis = PrimeBasis::new(k)?;
    let kcore_adj = kcore_adjacency(n, &basis);
    let div_adj = divisibility_adjacency(n);
    // elements >= n/k survive removal: e*k >= n
    let mut keep_mask = 0u64;
    for e in 1..=n {
        if e * k as u64 >= n {
            keep_mask |= 1 << (e - 1);
        }
    }
    debug_assert_eq!(
        (full_mask(n as usize) & !keep_mask).count_ones() as u64,
        removed_slot_count(n, k as u32)
    );

    let mut fibers: HashMap<u64, u64> = HashMap::new();
    let mut non_primitive_image = None;
    let mut mask_mismatch = None;
    let mut visited = 0u64;
    for_each_independent_set(&kcore_adj, |set| {
        let image = set & keep_mask;
        // the bulk of the sweep uses the mask shortcut; every 64th set also
        // runs the public removal operation to pin the two together
        if visited % 64 == 0 {
            let elements: Vec<u64> = (1..=n).filter(|e| set >> (e - 1) & 1 == 1).collect();
            let through_op: u64 = removal_map(&elements, n, k as u32)
                .expect("valid parameters")
                .iter()
                .map(|e| 1u64 << (e - 1))
                .sum();
            if through_op != image {
                mask_mismatch = Some(set);
            }
        }
        visited += 1;
        if !fibers.contains_key(&image) {
            let mut m = image;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                if div_adj[v] & image != 0 {
                    non_primitive_image = Some(image);
                }
            }
        }
        *fibers.entry(image).or_insert(0) += 1;
    });

    if let Some(set) = mask_mismatch {
        return Ok((
            false,
            format!("mask shortcut disagrees with removal_map on set {set:#b}"),
        ));
    }

    if let Some(image) = non_primitive_image {
        return Ok((false, format!("image mask {image:#b} is not primitive")));
    }
    let m = removed_slot_count(n, k as u32);
    let bound = 1u64 << m;
    let (worst_image, worst) = fibers
        .iter()
        .max_by_key(|(_, &c)| c)
        .map(|(&i, &c)| (i, c))
        .expect("at least the empty set");
    if worst > bound {
        return Ok((
            false,
            format!("fiber of {worst_image:#b} has {worst} preimages > 2^{m}"),
        ));
    }
    Ok((
        true,
        format!("{} images, max fiber {worst} <= 2^{m}", fibers.len()),
    ))
}
