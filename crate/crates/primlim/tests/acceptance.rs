//! Acceptance suite: every release-gating check with its pinned tolerance
//! and time budget. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use primlim::antichain::{
    count_antichains, count_kcore_subsets, count_primitive_subsets_oracle, count_smooth_primitive,
};
use primlim::arith::PrimeBasis;
use primlim::limits::{
    alpha_k_enclosure_with, finite_n_gap_with, fnk_product_with, fn_exact, verify_inequalities,
    AlphaEnclosure, PkEngine,
};
use std::time::{Duration, Instant};

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }
}

/// Runs one criterion, prints its PASS/FAIL line, enforces the time budget.
fn criterion(name: &str, budget: Duration, body: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    match &outcome {
        Ok(detail) => println!("acceptance {name}: PASS ({detail}; {elapsed:.2?})"),
        Err(reason) => println!("acceptance {name}: FAIL ({reason}; {elapsed:.2?})"),
    }
    if let Err(reason) = outcome {
        panic!("criterion {name} failed: {reason}");
    }
    assert!(
        elapsed <= budget,
        "criterion {name} overran its {budget:?} budget: {elapsed:?}"
    );
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_01_oracle_equivalence() {
    criterion("1 oracle-equivalence", Duration::from_secs(60), || {
        for n in 0..=12u64 {
            let e: Vec<u64> = (1..=n).collect();
            let fast = count_antichains(&e).map_err(|e| e.to_string())?;
            let slow = count_primitive_subsets_oracle(&e).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("prefix n={n}: {fast} != {slow}"))?;
        }
        let mut rng = XorShift(0x5eed_cafe_f00d_1234);
        for trial in 0..200 {
            let size = (rng.next() % 18 + 1) as usize;
            let mut e: Vec<u64> = (0..size).map(|_| rng.next() % 1000 + 1).collect();
            e.sort_unstable();
            e.dedup();
            let fast = count_antichains(&e).map_err(|e| e.to_string())?;
            let slow = count_primitive_subsets_oracle(&e).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("trial {trial} {e:?}: {fast} != {slow}"))?;
        }
        Ok("12 prefixes + 200 random sets".into())
    });
}

#[test]
fn criterion_02_known_small_values() {
    criterion("2 known-small-values", Duration::from_secs(1), || {
        // f(1)..f(10), the head of OEIS A051026
        let expected: [u64; 10] = [2, 3, 5, 7, 13, 17, 33, 45, 73, 103];
        for (i, &want) in expected.iter().enumerate() {
            let n = i as u64 + 1;
            let got = fn_exact(n).map_err(|e| e.to_string())?;
            ensure(got.to_u64() == Some(want), || {
                format!("f({n}) = {got}, expected {want}")
            })?;
        }
        Ok("f(1..10) exact".into())
    });
}

#[test]
fn criterion_03_decomposition_identity() {
    criterion("3 decomposition-identity", Duration::from_secs(300), || {
        for k in 1..=3usize {
            let basis = PrimeBasis::new(k).map_err(|e| e.to_string())?;
            let mut engine = PkEngine::new(k).map_err(|e| e.to_string())?;
            for n in 1..=40u64 {
                let product = fnk_product_with(n, &mut engine).map_err(|e| e.to_string())?;
                let direct = count_kcore_subsets(n, &basis).map_err(|e| e.to_string())?;
                ensure(product == direct, || {
                    format!("n={n} k={k}: product {product} != direct {direct}")
                })?;
            }
        }
        Ok("n <= 40, k in {1,2,3}".into())
    });
}

#[test]
fn criterion_04_chain_closed_form() {
    criterion("4 chain-closed-form", Duration::from_secs(10), || {
        let basis = PrimeBasis::new(1).map_err(|e| e.to_string())?;
        let check = |x: u64| -> Result<(), String> {
            let got = count_smooth_primitive(x, &basis).map_err(|e| e.to_string())?;
            let want = x.ilog2() as u64 + 2;
            ensure(got.to_u64() == Some(want), || {
                format!("P_1({x}) = {got}, expected {want}")
            })
        };
        for x in 1..=1000u64 {
            check(x)?;
        }
        let mut rng = XorShift(0x0c4a_1e5c_0de0_51ab);
        for _ in 0..1000 {
            check(rng.next() % 1_000_000 + 1)?;
        }
        Ok("all x <= 10^3 plus 10^3 samples to 10^6".into())
    });
}

#[test]
fn criterion_05_inequality_suite() {
    criterion("5 inequality-suite", Duration::from_secs(300), || {
        let report = verify_inequalities(30, 3).map_err(|e| e.to_string())?;
        ensure(report.all_passed(), || {
            let failed: Vec<String> = report
                .failed()
                .map(|c| format!("{} [{}] {}", c.name, c.params, c.witness))
                .collect();
            failed.join("; ")
        })?;
        Ok(format!("{} checks over n <= 30, k <= 3", report.checks.len()))
    });
}

#[test]
fn criterion_06_alpha1_enclosure() {
    criterion("6 alpha1-enclosure", Duration::from_secs(30), || {
        let mut engine = PkEngine::new(1).map_err(|e| e.to_string())?;
        let enc = alpha_k_enclosure_with(&mut engine, 1 << 20, 1e-9).map_err(|e| e.to_string())?;
        let (lo, hi) = (enc.lower_value(), enc.upper_value());
        ensure(lo >= 1.6 && hi <= 1.7, || format!("[{lo}, {hi}] not in [1.6, 1.7]"))?;
        ensure(hi - lo <= 1e-3, || format!("width {} > 1e-3", hi - lo))?;
        Ok(format!("alpha_1 in [{lo:.7}, {hi:.7}], width {:.2e}", hi - lo))
    });
}

#[test]
fn criterion_07_enclosure_nesting() {
    criterion("7 enclosure-nesting", Duration::from_secs(120), || {
        for k in 1..=3usize {
            let mut engine = PkEngine::new(k).map_err(|e| e.to_string())?;
            // one sweep family per odd part at the top level serves every L
            engine.precompute_up_to((1u64 << 16) - 1).map_err(|e| e.to_string())?;
            let mut outer: Option<AlphaEnclosure> = None;
            for exp in 4..=16u32 {
                let inner = alpha_k_enclosure_with(&mut engine, 1u64 << exp, 1e-9)
                    .map_err(|e| e.to_string())?;
                if let Some(outer) = &outer {
                    ensure(outer.contains(&inner), || {
                        format!(
                            "k={k} L=2^{exp}: [{}, {}] escapes [{}, {}]",
                            inner.lower_log2(),
                            inner.upper_log2(),
                            outer.lower_log2(),
                            outer.upper_log2()
                        )
                    })?;
                }
                outer = Some(inner);
            }
        }
        Ok("k <= 3, L = 2^4..2^16, strict containment".into())
    });
}

#[test]
fn criterion_08_monotone_consistency() {
    criterion("8 monotone-consistency", Duration::from_secs(300), || {
        // enclosure per k; higher k gets a smaller truncation level since its
        // values are costlier and only the lower bound enters the comparison
        let levels: [(usize, u64); 4] = [(1, 1 << 16), (2, 1 << 14), (3, 1 << 12), (4, 1 << 10)];
        let mut enclosures: Vec<AlphaEnclosure> = Vec::new();
        for (k, l_trunc) in levels {
            let mut engine = PkEngine::new(k).map_err(|e| e.to_string())?;
            enclosures
                .push(alpha_k_enclosure_with(&mut engine, l_trunc, 1e-9).map_err(|e| e.to_string())?);
        }
        let mut verdicts = Vec::new();
        for pair in enclosures.windows(2) {
            let (low_k, high_k) = (&pair[0], &pair[1]);
            ensure(high_k.lower_log2() <= low_k.upper_log2(), || {
                format!(
                    "lower(alpha_{}) = {} exceeds upper(alpha_{}) = {}",
                    high_k.k(),
                    high_k.lower_log2(),
                    low_k.k(),
                    low_k.upper_log2()
                )
            })?;
            // strict decrease is certified only when the intervals separate
            let verdict = if high_k.upper_log2() < low_k.lower_log2() {
                "certified"
            } else {
                "inconclusive"
            };
            verdicts.push(format!("a{}>a{}: {verdict}", low_k.k(), high_k.k()));
        }
        Ok(verdicts.join(", "))
    });
}

#[test]
fn criterion_09_finite_n_gap() {
    criterion("9 finite-n-gap", Duration::from_secs(60), || {
        let mut engine = PkEngine::new(1).map_err(|e| e.to_string())?;
        let enc = alpha_k_enclosure_with(&mut engine, 1 << 20, 1e-9).map_err(|e| e.to_string())?;
        let gap = finite_n_gap_with(1_000_000, &mut engine, &enc).map_err(|e| e.to_string())?;
        ensure(gap <= 0.02, || format!("gap {gap} > 0.02"))?;
        Ok(format!("|log2 f(10^6,1)/10^6 - mid| = {gap:.2e}"))
    });
}

#[test]
fn criterion_10_prime_recurrence() {
    criterion("10 prime-recurrence", Duration::from_secs(10), || {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let f_p = fn_exact(p).map_err(|e| e.to_string())?;
            let f_prev = fn_exact(p - 1).map_err(|e| e.to_string())?;
            let doubled = f_prev.value() * 2u8 - 1u8;
            ensure(f_p.value() == &doubled, || {
                format!("f({p}) = {f_p} but 2 f({}) - 1 = {doubled}", p - 1)
            })?;
        }
        Ok("f(p) = 2 f(p-1) - 1 for all primes p <= 23".into())
    });
}
