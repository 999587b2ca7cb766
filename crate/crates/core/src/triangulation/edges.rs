//! Edge classes of the singular complex and their stars.

use std::collections::HashMap;

use super::{Ordering, Triangulation, TriangulationError};

/// One corner of an edge star: tetrahedron `tet` seen through the ordering
/// `x y z_i z_{i+1}`, where `xy` is the (directed) edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct StarEntry {
    pub tet: usize,
    pub ordering: Ordering,
}

impl StarEntry {
    pub fn tail(&self) -> u8 {
        self.ordering.0[0]
    }

    pub fn head(&self) -> u8 {
        self.ordering.0[1]
    }
}

/// An edge of the singular complex together with its star.
///
/// Consecutive entries `x y z_i z_{i+1}` and `x' y' z'_{i+1} z'_{i+2}` are
/// related by the gluing of the face `{x, y, z_{i+1}}`, so the product of
/// cross-ratios along the star is a direct fold over `star`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeClass {
    pub id: usize,
    pub star: Vec<StarEntry>,
    /// `false` when the star is a path ending on unglued faces (lenient mode).
    pub closed: bool,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.star.len()
    }
}

/// All edge classes plus a lookup from tetrahedron edges to classes.
#[derive(Clone, Debug)]
pub struct EdgeClasses {
    classes: Vec<EdgeClass>,
    /// `(tet, a, b)` with `a < b` ↦ `(class, agrees)`, where `agrees` says the
    /// class direction runs from `a` to `b`.
    lookup: HashMap<(usize, u8, u8), (usize, bool)>,
}

impl EdgeClasses {
    pub fn classes(&self) -> &[EdgeClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class of the directed tetrahedron edge `a -> b`, and whether that
    /// direction agrees with the class's reference direction.
    pub fn class_of(&self, tet: usize, a: u8, b: u8) -> (usize, bool) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (class, agrees) = self.lookup[&(tet, lo, hi)];
        (class, agrees == (a < b))
    }
}

impl std::ops::Index<usize> for EdgeClasses {
    type Output = EdgeClass;

    fn index(&self, i: usize) -> &EdgeClass {
        &self.classes[i]
    }
}

fn step(tri: &Triangulation, entry: StarEntry, forward: bool) -> Option<StarEntry> {
    let [a, b, c, d] = entry.ordering.0;
    // Moving forward crosses the face opposite z_i, backward the face
    // opposite z_{i+1}; both relabel (x, y, z_{i+1}, z_i) through the gluing.
    let face = if forward { c } else { d };
    let g = tri.gluing(entry.tet, face)?;
    let next = Ordering([a, b, d, c]).mapped(&g.perm);
    Some(StarEntry {
        tet: g.tet,
        ordering: next,
    })
}

/// Partitions the tetrahedron edges into edge classes with cyclic stars.
///
/// Classes are numbered by first appearance scanning tetrahedra in order and
/// edges `01, 02, 03, 12, 13, 23`.
pub fn edge_classes(tri: &Triangulation) -> Result<EdgeClasses, TriangulationError> {
    let mut classes = Vec::new();
    let mut lookup = HashMap::new();
    for tet in 0..tri.num_tets() {
        for (a, b) in [(0u8, 1u8), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            if lookup.contains_key(&(tet, a, b)) {
                continue;
            }
            let rest: Vec<u8> = (0..4).filter(|v| *v != a && *v != b).collect();
            let start = StarEntry {
                tet,
                ordering: Ordering([a, b, rest[0], rest[1]]),
            };
            let (star, closed) = trace_star(tri, start)?;
            let id = classes.len();
            for entry in &star {
                let (x, y) = (entry.tail(), entry.head());
                let key = if x < y { (entry.tet, x, y) } else { (entry.tet, y, x) };
                if lookup.insert(key, (id, x < y)).is_some() {
                    // A tetrahedron edge met twice in one star with the two
                    // orientations folds the edge onto itself.
                    return Err(TriangulationError::StarNotClosed { tet, a, b });
                }
            }
            classes.push(EdgeClass { id, star, closed });
        }
    }
    Ok(EdgeClasses { classes, lookup })
}

fn same_edge(p: &StarEntry, q: &StarEntry) -> bool {
    p.tet == q.tet && {
        let (a, b) = (p.tail(), p.head());
        let (c, d) = (q.tail(), q.head());
        (a.min(b), a.max(b)) == (c.min(d), c.max(d))
    }
}

fn trace_star(tri: &Triangulation, start: StarEntry) -> Result<(Vec<StarEntry>, bool), TriangulationError> {
    let err = || TriangulationError::StarNotClosed {
        tet: start.tet,
        a: start.tail(),
        b: start.head(),
    };
    let limit = 6 * tri.num_tets() + 1;
    let mut star = vec![start];
    let mut cur = start;
    loop {
        match step(tri, cur, true) {
            Some(next) if next == start => return Ok((star, true)),
            Some(next) => {
                if star.iter().any(|e| same_edge(e, &next)) || star.len() > limit {
                    return Err(err());
                }
                star.push(next);
                cur = next;
            }
            None => break,
        }
    }
    // Hit a boundary face: extend backwards from the start to the other end.
    let mut prefix = Vec::new();
    let mut cur = start;
    while let Some(prev) = step(tri, cur, false) {
        if star.iter().chain(&prefix).any(|e| same_edge(e, &prev)) || prefix.len() > limit {
            return Err(err());
        }
        prefix.push(prev);
        cur = prev;
    }
    prefix.reverse();
    prefix.extend(star);
    Ok((prefix, false))
}
