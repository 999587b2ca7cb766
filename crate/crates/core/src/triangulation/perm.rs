//! Permutations of the four vertex labels of a tetrahedron and orderings of
//! those labels (the vertices of the polyhedron attached to a tetrahedron).

use std::fmt;

/// A bijection of `{0, 1, 2, 3}`; `self.0[i]` is the image of label `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Returns `None` unless `images` is a permutation of `0..4`.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &v in &images {
            if v > 3 || seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
        }
        Some(Perm4(images))
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }

    pub fn apply(&self, label: u8) -> u8 {
        self.0[label as usize]
    }

    pub fn inverse(&self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        Perm4(other.0.map(|v| self.0[v as usize]))
    }

    pub fn is_odd(&self) -> bool {
        inversions(&self.0) % 2 == 1
    }

    pub fn sign(&self) -> i32 {
        if self.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}{b}{c}{d}")
    }
}

fn inversions(seq: &[u8; 4]) -> usize {
    let mut n = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if seq[i] > seq[j] {
                n += 1;
            }
        }
    }
    n
}

/// Which adjacent positions an edge of the polyhedron transposes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum EdgeType {
    /// Swap of positions 0 and 1.
    E1,
    /// Swap of positions 1 and 2.
    E2,
    /// Swap of positions 2 and 3.
    E3,
}

impl EdgeType {
    pub const ALL: [EdgeType; 3] = [EdgeType::E1, EdgeType::E2, EdgeType::E3];

    pub fn position(self) -> usize {
        match self {
            EdgeType::E1 => 0,
            EdgeType::E2 => 1,
            EdgeType::E3 => 2,
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeType::E1 => "E1",
            EdgeType::E2 => "E2",
            EdgeType::E3 => "E3",
        };
        f.write_str(s)
    }
}

/// An ordering `xyzt` of the four labels of one tetrahedron.
///
/// Depending on context the entries are either file labels or ranks in the
/// branching order; [`crate::triangulation::Branching::to_ranks`] converts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Ordering(pub [u8; 4]);

impl Ordering {
    pub const CANONICAL: Ordering = Ordering([0, 1, 2, 3]);

    pub fn new(seq: [u8; 4]) -> Option<Self> {
        Perm4::new(seq).map(|_| Ordering(seq))
    }

    /// All 24 orderings in lexicographic order.
    pub fn all() -> impl Iterator<Item = Ordering> {
        (0..24).map(Ordering::from_index)
    }

    /// Position of this ordering in the lexicographic list of all 24.
    pub fn index(&self) -> usize {
        let mut idx = 0;
        let mut used = [false; 4];
        for (pos, &v) in self.0.iter().enumerate() {
            let smaller_unused = (0..v).filter(|&u| !used[u as usize]).count();
            idx += smaller_unused * factorial(3 - pos);
            used[v as usize] = true;
        }
        idx
    }

    pub fn from_index(mut idx: usize) -> Ordering {
        let mut pool: Vec<u8> = vec![0, 1, 2, 3];
        let mut out = [0u8; 4];
        for (pos, slot) in out.iter_mut().enumerate() {
            let f = factorial(3 - pos);
            *slot = pool.remove(idx / f);
            idx %= f;
        }
        Ordering(out)
    }

    pub fn swapped(&self, edge: EdgeType) -> Ordering {
        let mut s = self.0;
        let p = edge.position();
        s.swap(p, p + 1);
        Ordering(s)
    }

    /// Relabel through a map of labels (for example a face gluing).
    pub fn mapped(&self, perm: &Perm4) -> Ordering {
        Ordering(self.0.map(|v| perm.apply(v)))
    }

    /// Relabel through a lookup table (for example labels to ranks).
    pub fn relabeled(&self, table: &[u8; 4]) -> Ordering {
        Ordering(self.0.map(|v| table[v as usize]))
    }

    /// Sign of the ordering read as a permutation of `0..4`.
    pub fn sign(&self) -> i32 {
        if inversions(&self.0) % 2 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn first(&self) -> u8 {
        self.0[0]
    }

    pub fn last(&self) -> u8 {
        self.0[3]
    }

    /// Parse four label characters such as `"0132"`.
    pub fn parse(text: &str) -> Option<Ordering> {
        let bytes = text.as_bytes();
        if bytes.len() != 4 {
            return None;
        }
        let mut seq = [0u8; 4];
        for (slot, b) in seq.iter_mut().zip(bytes) {
            if !(b'0'..=b'3').contains(b) {
                return None;
            }
            *slot = b - b'0';
        }
        Ordering::new(seq)
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}{b}{c}{d}")
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}
