//! Small fixed-universe bitset over tree-edge ids.

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    universe: usize,
    bits: Vec<u64>,
}

impl EdgeSet {
    pub fn empty(universe: usize) -> Self {
        EdgeSet {
            universe,
            bits: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for e in 0..universe {
            s.insert(e);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, e: usize) {
        debug_assert!(e < self.universe);
        self.bits[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: usize) {
        self.bits[e / 64] &= !(1 << (e % 64));
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.universe && self.bits[e / 64] & (1 << (e % 64)) != 0
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= !b;
        }
    }

    pub fn intersect_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &EdgeSet) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&e| self.contains(e))
    }

    /// Single-word mask, when the universe fits in 64 bits.
    pub fn as_mask(&self) -> Option<u64> {
        if self.universe <= 64 {
            Some(self.bits.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn from_iter(universe: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for e in edges {
            s.insert(e);
        }
        s
    }
}

impl std::fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
