//! Row echelon bases over `F_p` with an attached payload per row.
//!
//! Vectors are sparse, keyed by an ordered coordinate; the pivot of a row is
//! its least key. Payloads are combined alongside the vectors so callers can
//! track which elements produced a basis row.

use std::collections::BTreeMap;

/// Sparse vector over `F_p`: ordered coordinate to nonzero residue.
pub type SparseVec<K> = BTreeMap<K, u32>;

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut r, mut b, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// `a ← a + c·b`.
fn axpy<K: Ord + Clone>(a: &mut SparseVec<K>, c: u32, b: &SparseVec<K>, p: u32) {
    for (k, &v) in b {
        let slot = a.entry(k.clone()).or_insert(0);
        *slot = ((*slot as u64 + c as u64 * v as u64) % p as u64) as u32;
        if *slot == 0 {
            a.remove(k);
        }
    }
}

/// Fully reduced echelon basis.
pub struct FpBasis<K: Ord + Clone, T> {
    p: u32,
    // Pivot coordinate to (normalized row, payload).
    rows: BTreeMap<K, (SparseVec<K>, T)>,
}

impl<K: Ord + Clone, T: Clone> FpBasis<K, T> {
    pub fn new(p: u64) -> Self {
        Self {
            p: p as u32,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis and inserts it if it is independent.
    /// `combine(t, c, s)` must return `t + c·s` on payloads. When `v` is
    /// dependent, returns the payload of the vanishing combination.
    pub fn insert(
        &mut self,
        mut v: SparseVec<K>,
        mut t: T,
        combine: &impl Fn(&T, u32, &T) -> T,
    ) -> Option<T> {
        let p = self.p;
        for (piv, (row, payload)) in &self.rows {
            if let Some(&c) = v.get(piv) {
                let neg = p - c;
                axpy(&mut v, neg, row, p);
                t = combine(&t, neg, payload);
            }
        }
        let Some((piv, &lead)) = v.iter().next() else {
            return Some(t);
        };
        let piv = piv.clone();
        let inv = inv_mod(lead, p);
        let v: SparseVec<K> = v.into_iter().map(|(k, x)| (k, (x as u64 * inv as u64 % p as u64) as u32)).collect();
        // t + (p-1)t = 0, then 0 + inv·t.
        let t = combine(&combine(&t, p - 1, &t), inv, &t);
        // Keep the basis fully reduced.
        let keys: Vec<K> = self.rows.keys().cloned().collect();
        for k in keys {
            let (row, payload) = self.rows.get(&k).unwrap().clone();
            if let Some(&c) = row.get(&piv) {
                let mut row = row;
                axpy(&mut row, p - c, &v, p);
                let payload = combine(&payload, p - c, &t);
                self.rows.insert(k, (row, payload));
            }
        }
        self.rows.insert(piv, (v, t));
        None
    }

    /// Basis rows ordered by pivot.
    pub fn rows(&self) -> impl Iterator<Item = (&K, &SparseVec<K>, &T)> {
        self.rows.iter().map(|(k, (v, t))| (k, v, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(i32, u32)]) -> SparseVec<i32> {
        entries.iter().copied().collect()
    }

    #[test]
    fn rank_over_f3() {
        let mut b: FpBasis<i32, ()> = FpBasis::new(3);
        let c = |_: &(), _: u32, _: &()| ();
        assert!(b.insert(v(&[(0, 1), (1, 2)]), (), &c).is_none());
        assert!(b.insert(v(&[(0, 2), (1, 1)]), (), &c).is_some());
        assert!(b.insert(v(&[(1, 1)]), (), &c).is_none());
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn payload_tracks_combinations() {
        // Payload is the coefficient vector over the inserted generators.
        let mut b: FpBasis<i32, Vec<u32>> = FpBasis::new(5);
        let c = |t: &Vec<u32>, k: u32, s: &Vec<u32>| -> Vec<u32> {
            t.iter().zip(s).map(|(a, b)| (a + k * b) % 5).collect()
        };
        b.insert(v(&[(0, 1), (2, 3)]), vec![1, 0, 0], &c);
        b.insert(v(&[(0, 2), (1, 1)]), vec![0, 1, 0], &c);
        let rel = b.insert(v(&[(0, 4), (1, 1), (2, 1)]), vec![0, 0, 1], &c).unwrap();
        // g2 = 2·g0 + g1, so a relation must come back.
        let gens = [v(&[(0, 1), (2, 3)]), v(&[(0, 2), (1, 1)]), v(&[(0, 4), (1, 1), (2, 1)])];
        let mut acc: SparseVec<i32> = SparseVec::new();
        for (g, &k) in gens.iter().zip(&rel) {
            axpy(&mut acc, k, g, 5);
        }
        assert!(acc.is_empty());
        assert!(rel.iter().any(|&k| k != 0));
    }
}
