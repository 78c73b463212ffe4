//! Profile dynamic programming over the exponent grid of smooth numbers.
//!
//! The basis-smooth numbers `<= x` form the staircase
//! `{(e_1,...,e_k) : p_1^{e_1} ... p_k^{e_k} <= x}` under componentwise
//! order, and antichains of a finite poset are in bijection with its order
//! ideals (take maximal elements). Order ideals are counted by sweeping the
//! exponent of 2 layer by layer, from the thinnest layer down to layer zero.
//! The sweep state is the ideal's slice in the current layer, stored as a
//! monotone array over the staircase of the middle primes `p_2..p_{k-1}`
//! whose entries count exponents of the largest prime. Slices only grow as
//! the sweep proceeds, and each layer transition is performed one cell at a
//! time so the working keys mix already-updated and not-yet-updated entries
//! of a single nibble-packed `u128`.
//!
//! Sweeping the exponent of 2 keeps the state on the short axes: the state
//! space is the set of order ideals of the staircase over the odd primes,
//! which stays small even when the power-of-2 axis is long.

use crate::arith::PrimeBasis;
use crate::{Error, Result};
use num_bigint::BigUint;
use std::collections::HashMap;

/// Nibble packing supports at most 32 cells of 4 bits each.
const MAX_CELLS: usize = 32;
const MAX_NIBBLE: u8 = 15;

#[inline]
fn nibble(key: u128, idx: usize) -> u8 {
    ((key >> (4 * idx)) & 0xF) as u8
}

#[inline]
fn with_nibble(key: u128, idx: usize, v: u8) -> u128 {
    (key & !(0xFu128 << (4 * idx))) | ((v as u128) << (4 * idx))
}

struct Cell {
    /// Product of the middle-prime powers for this cell.
    q: u64,
    /// Indices of the cells one exponent step down along each middle axis.
    parents: Vec<u16>,
}

/// Enumerates the middle-prime staircase `{Q <= x}` in lexicographic
/// exponent order, so every parent precedes its children.
fn middle_cells(middle: &[u64], x: u64) -> Vec<(Vec<u8>, u64)> {
    let mut cells = Vec::new();
    let mut exps = vec![0u8; middle.len()];
    fn rec(
        middle: &[u64],
        axis: usize,
        q: u64,
        x: u64,
        exps: &mut Vec<u8>,
        out: &mut Vec<(Vec<u8>, u64)>,
    ) {
        if axis == middle.len() {
            out.push((exps.clone(), q));
            return;
        }
        let p = middle[axis];
        let mut v = q;
        let mut e = 0u8;
        loop {
            exps[axis] = e;
            rec(middle, axis + 1, v, x, exps, out);
            if v > x / p {
                break;
            }
            v *= p;
            e += 1;
        }
        exps[axis] = 0;
    }
    rec(middle, 0, 1, x, &mut exps, &mut cells);
    cells.sort();
    cells
}

/// Count of exponents `e >= 0` with `q * p^e <= y`.
fn chain_len(q: u64, p: u64, y: u64) -> u8 {
    if q > y {
        return 0;
    }
    let mut c = 1u8;
    let mut v = q;
    while v <= y / p {
        v *= p;
        c += 1;
        if c == u8::MAX {
            break;
        }
    }
    c
}

/// Exact `P_k` along a doubling family: returns, for `e = 0..=emax`, the
/// number of antichains of the basis-smooth numbers `<= odd_part * 2^e`.
///
/// Requires `k >= 2` and `odd_part` odd and basis-smooth. One sweep serves
/// the whole family because the staircase for `odd_part * 2^e` is the upper
/// part of the staircase for `odd_part * 2^emax`, shifted along the 2-axis;
/// running totals at each layer completion are exactly the family values.
pub(crate) fn smooth_primitive_family(
    basis: &PrimeBasis,
    odd_part: u64,
    emax: u32,
    memo_budget: usize,
) -> Result<Vec<BigUint>> {
    let k = basis.k();
    assert!(k >= 2, "grid sweep requires at least two primes");
    debug_assert!(odd_part % 2 == 1 && basis.is_smooth(odd_part));

    let capacity = odd_part
        .checked_shl(emax)
        .filter(|c| c >> emax == odd_part)
        .ok_or_else(|| Error::parameter("capacity overflows u64"))?;
    let amax = 63 - capacity.leading_zeros();
    let middle = &basis.primes()[1..k - 1];
    let top_prime = basis.largest_prime();

    let raw = middle_cells(middle, capacity);
    if raw.len() > MAX_CELLS {
        return Err(Error::resource(format!(
            "grid state needs {} cells; the packed encoding holds {MAX_CELLS}",
            raw.len()
        )));
    }
    if chain_len(1, top_prime, capacity) > MAX_NIBBLE {
        return Err(Error::resource(
            "per-cell chain exceeds the packed encoding range".to_string(),
        ));
    }

    let index: HashMap<&[u8], u16> = raw
        .iter()
        .enumerate()
        .map(|(i, (e, _))| (e.as_slice(), i as u16))
        .collect();
    let cells: Vec<Cell> = raw
        .iter()
        .map(|(exps, q)| {
            let mut parents = Vec::new();
            for axis in 0..exps.len() {
                if exps[axis] > 0 {
                    let mut down = exps.clone();
                    down[axis] -= 1;
                    parents.push(index[down.as_slice()]);
                }
            }
            Cell { q: *q, parents }
        })
        .collect();

    // caps[a][cell]: height of the largest-prime chain above the cell in layer a.
    let caps: Vec<Vec<u8>> = (0..=amax)
        .map(|a| {
            let y = capacity >> a;
            cells.iter().map(|c| chain_len(c.q, top_prime, y)).collect()
        })
        .collect();

    let mut states: HashMap<u128, BigUint> = HashMap::new();
    states.insert(0, BigUint::from(1u8));
    let mut family = vec![BigUint::from(0u8); emax as usize + 1];

    for a in (0..=amax).rev() {
        let layer_caps = &caps[a as usize];
        for (cell_idx, cell) in cells.iter().enumerate() {
            let mut next: HashMap<u128, BigUint> = HashMap::with_capacity(states.len() * 2);
            for (&key, cnt) in &states {
                let old_v = nibble(key, cell_idx);
                let mut ub = layer_caps[cell_idx];
                for &p in &cell.parents {
                    ub = ub.min(nibble(key, p as usize));
                }
                debug_assert!(old_v <= ub);
                for v in old_v..=ub {
                    let nk = with_nibble(key, cell_idx, v);
                    match next.get_mut(&nk) {
                        Some(acc) => *acc += cnt,
                        None => {
                            next.insert(nk, cnt.clone());
                        }
                    }
                }
            }
            states = next;
            if states.len().saturating_mul(96) > memo_budget {
                return Err(Error::resource(format!(
                    "grid sweep holds {} states, over the memory budget",
                    states.len()
                )));
            }
        }
        if a <= emax {
            family[(emax - a) as usize] = states.values().sum();
        }
    }
    Ok(family)
}
