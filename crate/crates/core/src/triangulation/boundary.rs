//! Cusp bookkeeping: the boundary surface of the truncated complex.
//!
//! Truncating every tetrahedron at its four vertices leaves one small
//! triangle per `(tet, vertex)`. Face gluings pair up the triangle edges, and
//! the resulting surface has one component per ideal vertex.

use super::Triangulation;

/// One connected component of the truncated boundary.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoundaryComponent {
    pub id: usize,
    pub triangles: usize,
    pub edges: usize,
    pub vertices: usize,
    pub euler_characteristic: i64,
}

impl BoundaryComponent {
    pub fn is_torus_or_klein(&self) -> bool {
        self.euler_characteristic == 0
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so labels follow first appearance.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Dense relabelling of roots in order of first appearance.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for i in 0..n {
            let r = self.find(i);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[i] = label[r];
        }
        (out, count)
    }
}

/// Ideal-vertex class of every tetrahedron corner, numbered by first
/// appearance in `(tet, label)` order.
pub fn vertex_classes(tri: &Triangulation) -> Vec<[usize; 4]> {
    let n = tri.num_tets();
    let mut uf = UnionFind::new(4 * n);
    for (tet, face, g) in tri.gluing_list() {
        for v in (0..4u8).filter(|&v| v != face) {
            uf.union(4 * tet + v as usize, 4 * g.tet + g.perm.apply(v) as usize);
        }
    }
    let (labels, _) = uf.classes();
    (0..n)
        .map(|t| [labels[4 * t], labels[4 * t + 1], labels[4 * t + 2], labels[4 * t + 3]])
        .collect()
}

/// Components of the truncated boundary with their Euler characteristics.
pub fn boundary_components(tri: &Triangulation) -> Vec<BoundaryComponent> {
    let n = tri.num_tets();
    let classes = vertex_classes(tri);
    let count = classes.iter().flatten().copied().max().map_or(0, |m| m + 1);

    // Corners of truncation triangles: (tet, v, w) is the corner of the
    // triangle at v lying on the tetrahedron edge vw.
    let corner = |t: usize, v: u8, w: u8| 16 * t + 4 * v as usize + w as usize;
    let mut uf = UnionFind::new(16 * n);
    let mut glued_sides = vec![0usize; count];
    let mut free_sides = vec![0usize; count];
    for tet in 0..n {
        for v in 0..4u8 {
            for face in (0..4u8).filter(|&f| f != v) {
                let class = classes[tet][v as usize];
                match tri.gluing(tet, face) {
                    Some(g) => {
                        glued_sides[class] += 1;
                        for w in (0..4u8).filter(|&w| w != v && w != face) {
                            uf.union(corner(tet, v, w), corner(g.tet, g.perm.apply(v), g.perm.apply(w)));
                        }
                    }
                    None => free_sides[class] += 1,
                }
            }
        }
    }

    let mut triangles = vec![0usize; count];
    let mut corner_roots: Vec<Vec<usize>> = vec![Vec::new(); count];
    for tet in 0..n {
        for v in 0..4u8 {
            let class = classes[tet][v as usize];
            triangles[class] += 1;
            for w in (0..4u8).filter(|&w| w != v) {
                corner_roots[class].push(uf.find(corner(tet, v, w)));
            }
        }
    }

    (0..count)
        .map(|id| {
            let mut roots = std::mem::take(&mut corner_roots[id]);
            roots.sort_unstable();
            roots.dedup();
            let edges = glued_sides[id] / 2 + free_sides[id];
            let vertices = roots.len();
            BoundaryComponent {
                id,
                triangles: triangles[id],
                edges,
                vertices,
                euler_characteristic: vertices as i64 - edges as i64 + triangles[id] as i64,
            }
        })
        .collect()
}
