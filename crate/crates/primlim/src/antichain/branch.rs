//! Exact independent-set counting on comparability graphs of at most 64
//! vertices: connected-component factorization plus pivot branching
//! (`count = count without pivot + count with pivot, excluding its
//! neighborhood`) over a memoized residual-mask table.

use super::memo::LruMemo;
use num_bigint::BigUint;

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

pub(crate) fn full_mask(n: usize) -> u64 {
    debug_assert!(n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Counts independent sets (the empty set included) of the graph given by
/// adjacency masks. `adj[v]` must not contain `v` itself.
pub(crate) fn count_independent_sets(adj: &[u64], memo_budget: usize) -> BigUint {
    let mut memo = LruMemo::new(memo_budget);
    count_rec(adj, full_mask(adj.len()), &mut memo)
}

fn count_rec(adj: &[u64], mask: u64, memo: &mut LruMemo) -> BigUint {
    match mask.count_ones() {
        0 => return BigUint::from(1u8),
        1 => return BigUint::from(2u8),
        _ => {}
    }
    if let Some(hit) = memo.get(mask) {
        return hit;
    }

    let comps = components(adj, mask);
    let result = if comps.len() > 1 {
        comps
            .into_iter()
            .fold(BigUint::from(1u8), |acc, c| acc * count_rec(adj, c, memo))
    } else {
        let v = pivot(adj, mask);
        let without = count_rec(adj, mask & !bit(v), memo);
        let with = count_rec(adj, mask & !(bit(v) | adj[v]), memo);
        without + with
    };
    memo.insert(mask, result.clone());
    result
}

/// Highest-degree vertex in the residual graph; shatters components fastest.
fn pivot(adj: &[u64], mask: u64) -> usize {
    let mut best = 0usize;
    let mut best_deg = 0u32;
    let mut rem = mask;
    while rem != 0 {
        let v = rem.trailing_zeros() as usize;
        rem &= rem - 1;
        let deg = (adj[v] & mask).count_ones();
        if deg >= best_deg {
            best_deg = deg;
            best = v;
        }
    }
    best
}

fn components(adj: &[u64], mask: u64) -> Vec<u64> {
    let mut comps = Vec::new();
    let mut rem = mask;
    while rem != 0 {
        let start = rem.trailing_zeros() as usize;
        let mut comp = bit(start);
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v] & mask;
            }
            next &= !comp;
            comp |= next;
            frontier = next;
        }
        comps.push(comp);
        rem &= !comp;
    }
    comps
}

/// Calls `visit` once per independent set of the graph, as a vertex mask.
/// The empty set is visited first.
pub(crate) fn for_each_independent_set(adj: &[u64], mut visit: impl FnMut(u64)) {
    fn rec(adj: &[u64], i: usize, chosen: u64, banned: u64, visit: &mut impl FnMut(u64)) {
        if i == adj.len() {
            visit(chosen);
            return;
        }
        rec(adj, i + 1, chosen, banned, visit);
        if banned & bit(i) == 0 {
            rec(adj, i + 1, chosen | bit(i), banned | adj[i], visit);
        }
    }
    rec(adj, 0, 0, 0, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(adj: &[u64]) -> u64 {
        u64::try_from(&count_independent_sets(adj, 1 << 20)).unwrap()
    }

    #[test]
    fn small_graphs() {
        assert_eq!(count(&[]), 1); // empty graph: just the empty set
        assert_eq!(count(&[0]), 2);
        assert_eq!(count(&[0, 0]), 4); // no edges
        assert_eq!(count(&[2, 1]), 3); // single edge
        // triangle: {}, three singletons
        assert_eq!(count(&[0b110, 0b101, 0b011]), 4);
        // path a-b-c: {}, a, b, c, {a,c}
        assert_eq!(count(&[0b010, 0b101, 0b010]), 5);
    }

    #[test]
    fn matches_subset_enumeration_on_random_graphs() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in 1..=14usize {
            for _ in 0..20 {
                let mut adj = vec![0u64; n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        if next() % 3 == 0 {
                            adj[i] |= bit(j);
                            adj[j] |= bit(i);
                        }
                    }
                }
                let brute = (0u64..(1 << n))
                    .filter(|&s| (0..n).all(|v| s & bit(v) == 0 || s & adj[v] == 0))
                    .count() as u64;
                assert_eq!(count(&adj), brute, "n={n} adj={adj:?}");
            }
        }
    }

    #[test]
    fn works_with_tiny_memo_budget() {
        let mut adj = vec![0u64; 30];
        for i in 0..30 {
            for j in (i + 1)..30 {
                if (i * 31 + j) % 5 == 0 {
                    adj[i] |= bit(j);
                    adj[j] |= bit(i);
                }
            }
        }
        let full = count_independent_sets(&adj, 64 << 20);
        let tiny = count_independent_sets(&adj, 256);
        assert_eq!(full, tiny);
    }

    #[test]
    fn enumeration_visits_each_set_once() {
        // path of 4 vertices: fibonacci(6) = 8 independent sets
        let adj = [0b0010u64, 0b0101, 0b1010, 0b0100];
        let mut seen = Vec::new();
        for_each_independent_set(&adj, |m| seen.push(m));
        assert_eq!(seen.len(), 8);
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 8);
        assert_eq!(
            BigUint::from(8u8),
            count_independent_sets(&adj, 1 << 16)
        );
    }
}
