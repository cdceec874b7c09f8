//! Permutations of `{0..n}` stored as image arrays, plus a small union-find.

/// Returns true if `p` is a permutation of `0..p.len()`.
pub fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        match seen.get_mut(x as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

pub fn inverse(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

/// Advances `p` to the next permutation in lexicographic order.
/// Returns false (leaving `p` sorted descending) when `p` was the last one.
pub fn next_permutation<T: Ord>(p: &mut [T]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `0..n` in lexicographic order, flattened row-major.
pub fn all_permutations(n: usize) -> Vec<u8> {
    assert!(n <= u8::MAX as usize);
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::new();
    loop {
        out.extend_from_slice(&cur);
        if !next_permutation(&mut cur) {
            break;
        }
    }
    out
}

/// Cycle label of every point under `p`; labels are `0..cycles`.
pub fn cycle_labels(p: &[u8]) -> (Vec<u8>, usize) {
    let mut label = vec![u8::MAX; p.len()];
    let mut cycles = 0u8;
    for start in 0..p.len() {
        if label[start] != u8::MAX {
            continue;
        }
        let mut x = start;
        while label[x] == u8::MAX {
            label[x] = cycles;
            x = p[x] as usize;
        }
        cycles += 1;
    }
    (label, cycles as usize)
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_listing_has_factorial_length() {
        assert_eq!(all_permutations(4).len(), 24 * 4);
        assert_eq!(all_permutations(1), vec![0]);
        assert_eq!(&all_permutations(3)[..6], &[0, 1, 2, 0, 2, 1]);
    }

    #[test]
    fn inverse_and_validation() {
        let p = [2u32, 0, 1];
        assert!(is_permutation(&p));
        assert!(!is_permutation(&[0, 0, 1]));
        assert!(!is_permutation(&[0, 3, 1]));
        assert_eq!(inverse(&p), vec![1, 2, 0]);
    }

    #[test]
    fn cycles_of_permutation() {
        let (label, k) = cycle_labels(&[1, 0, 2, 4, 3]);
        assert_eq!(k, 3);
        assert_eq!(label, vec![0, 0, 1, 2, 2]);
    }

    #[test]
    fn union_find_counts_components() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.components(), 3);
        assert_eq!(uf.find(0), uf.find(1));
        assert_ne!(uf.find(0), uf.find(3));
    }
}
