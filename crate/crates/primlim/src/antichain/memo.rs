//! Budgeted memo table for the branching counter.
//!
//! Keys are residual vertex masks, values exact counts. The table is capped
//! by an approximate byte budget and evicts least-recently-used entries;
//! correctness of the counters never depends on a hit.

use num_bigint::BigUint;
use std::collections::HashMap;

const NIL: usize = usize::MAX;

struct Node {
    key: u64,
    value: BigUint,
    prev: usize,
    next: usize,
}

pub(crate) struct LruMemo {
    map: HashMap<u64, usize>,
    nodes: Vec<Node>,
    free: Vec<usize>,
    head: usize,
    tail: usize,
    bytes: usize,
    budget: usize,
}

fn entry_bytes(value: &BigUint) -> usize {
    // key + links + map slot + the big integer's limbs
    64 + 8 * ((value.bits() as usize + 63) / 64)
}

impl LruMemo {
    pub fn new(budget_bytes: usize) -> Self {
        LruMemo {
            map: HashMap::new(),
            nodes: Vec::new(),
            free: Vec::new(),
            head: NIL,
            tail: NIL,
            bytes: 0,
            budget: budget_bytes,
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    fn unlink(&mut self, idx: usize) {
        let (prev, next) = (self.nodes[idx].prev, self.nodes[idx].next);
        if prev != NIL {
            self.nodes[prev].next = next;
        } else {
            self.head = next;
        }
        if next != NIL {
            self.nodes[next].prev = prev;
        } else {
            self.tail = prev;
        }
    }

    fn push_front(&mut self, idx: usize) {
        self.nodes[idx].prev = NIL;
        self.nodes[idx].next = self.head;
        if self.head != NIL {
            self.nodes[self.head].prev = idx;
        }
        self.head = idx;
        if self.tail == NIL {
            self.tail = idx;
        }
    }

    pub fn get(&mut self, key: u64) -> Option<BigUint> {
        let idx = *self.map.get(&key)?;
        if self.head != idx {
            self.unlink(idx);
            self.push_front(idx);
        }
        Some(self.nodes[idx].value.clone())
    }

    pub fn insert(&mut self, key: u64, value: BigUint) {
        if self.map.contains_key(&key) {
            return;
        }
        let cost = entry_bytes(&value);
        if cost > self.budget {
            return;
        }
        while self.bytes + cost > self.budget && self.tail != NIL {
            self.evict_tail();
        }
        let idx = match self.free.pop() {
            Some(i) => {
                self.nodes[i] = Node {
                    key,
                    value,
                    prev: NIL,
                    next: NIL,
                };
                i
            }
            None => {
                self.nodes.push(Node {
                    key,
                    value,
                    prev: NIL,
                    next: NIL,
                });
                self.nodes.len() - 1
            }
        };
        self.push_front(idx);
        self.map.insert(key, idx);
        self.bytes += cost;
    }

    fn evict_tail(&mut self) {
        let idx = self.tail;
        debug_assert!(idx != NIL);
        self.unlink(idx);
        self.map.remove(&self.nodes[idx].key);
        self.bytes -= entry_bytes(&self.nodes[idx].value);
        self.free.push(idx);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn stores_and_recalls() {
        let mut m = LruMemo::new(1 << 16);
        m.insert(7, val(42));
        assert_eq!(m.get(7), Some(val(42)));
        assert_eq!(m.get(8), None);
    }

    #[test]
    fn evicts_least_recently_used_first() {
        // each entry costs 72 bytes; budget fits two
        let mut m = LruMemo::new(150);
        m.insert(1, val(10));
        m.insert(2, val(20));
        assert_eq!(m.len(), 2);
        m.get(1); // refresh 1 so 2 becomes the victim
        m.insert(3, val(30));
        assert_eq!(m.get(2), None);
        assert_eq!(m.get(1), Some(val(10)));
        assert_eq!(m.get(3), Some(val(30)));
    }

    #[test]
    fn zero_budget_stores_nothing() {
        let mut m = LruMemo::new(0);
        m.insert(1, val(1));
        assert_eq!(m.len(), 0);
        assert_eq!(m.get(1), None);
    }

    #[test]
    fn reuses_freed_slots() {
        let mut m = LruMemo::new(150);
        for key in 0..100u64 {
            m.insert(key, val(key));
        }
        assert!(m.len() <= 2);
        assert!(m.nodes.len() <= 3);
    }
}
