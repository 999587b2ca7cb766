//! Branchings: edge-class orientations that induce a total order on the
//! vertices of every tetrahedron.

use std::fmt::Write as _;

use super::parse::{significant_lines, syntax};
use super::{edge_classes, vertex_classes, EdgeClasses, Ordering, Triangulation, TriangulationError};

/// A choice of direction for every edge class, with the induced orders.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Branching {
    /// `true` when the class points along its reference direction (the
    /// tail-to-head direction of the first star entry).
    directions: Vec<bool>,
    /// Per tetrahedron, the rank in the induced order of each label.
    ranks: Vec<[u8; 4]>,
}

impl Branching {
    /// Builds the branching from class directions, failing if some
    /// tetrahedron would receive a cyclic orientation.
    pub fn from_directions(
        tri: &Triangulation,
        edges: &EdgeClasses,
        directions: Vec<bool>,
    ) -> Result<Self, TriangulationError> {
        if directions.len() != edges.len() {
            return Err(TriangulationError::Branching(format!(
                "expected {} edge directions, found {}",
                edges.len(),
                directions.len()
            )));
        }
        let mut ranks = Vec::with_capacity(tri.num_tets());
        for tet in 0..tri.num_tets() {
            let mut indegree = [0u8; 4];
            for (a, b) in PAIRS {
                let (class, agrees) = edges.class_of(tet, a, b);
                let a_to_b = directions[class] == agrees;
                indegree[if a_to_b { b } else { a } as usize] += 1;
            }
            let mut sorted = indegree;
            sorted.sort_unstable();
            if sorted != [0, 1, 2, 3] {
                return Err(TriangulationError::Branching(format!(
                    "edge directions are cyclic on tetrahedron {tet}"
                )));
            }
            ranks.push(indegree);
        }
        Ok(Branching { directions, ranks })
    }

    pub fn directions(&self) -> &[bool] {
        &self.directions
    }

    /// Rank of every label of `tet` in the induced order.
    pub fn ranks(&self, tet: usize) -> [u8; 4] {
        self.ranks[tet]
    }

    /// Labels of `tet` listed from lowest to highest rank.
    pub fn order(&self, tet: usize) -> [u8; 4] {
        let mut out = [0u8; 4];
        for (label, &rank) in self.ranks[tet].iter().enumerate() {
            out[rank as usize] = label as u8;
        }
        out
    }

    /// Orientation sign: `+1` when the induced order agrees with the
    /// tetrahedron's orientation `0<1<2<3`.
    pub fn sign(&self, tet: usize) -> i32 {
        Ordering(self.order(tet)).sign()
    }

    /// Rewrites an ordering of labels as an ordering of ranks.
    pub fn to_ranks(&self, tet: usize, labels: Ordering) -> Ordering {
        labels.relabeled(&self.ranks[tet])
    }

    /// Rewrites an ordering of ranks as an ordering of labels.
    pub fn to_labels(&self, tet: usize, ranks: Ordering) -> Ordering {
        ranks.relabeled(&self.order(tet))
    }

    /// Serializes in the branching-file format over vertex classes.
    pub fn to_branch_string(&self, tri: &Triangulation, edges: &EdgeClasses) -> String {
        let cusps = vertex_classes(tri);
        let mut out = String::new();
        for (class, &forward) in self.directions.iter().enumerate() {
            let entry = edges[class].star[0];
            let (mut tail, mut head) = (entry.tail(), entry.head());
            if !forward {
                std::mem::swap(&mut tail, &mut head);
            }
            let (ct, ch) = (cusps[entry.tet][tail as usize], cusps[entry.tet][head as usize]);
            let _ = write!(out, "branch {class} {ct} {ch}");
            if ct == ch {
                let _ = write!(out, " {}", if forward { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }
}

const PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A triangulation together with its edge classes, cusps and a branching;
/// the common input of all later pipeline stages.
#[derive(Clone, Debug)]
pub struct BranchedTriangulation {
    pub tri: Triangulation,
    pub edges: EdgeClasses,
    pub branching: Branching,
    pub cusps: Vec<[usize; 4]>,
}

impl BranchedTriangulation {
    pub fn new(tri: Triangulation, branching: Branching) -> Result<Self, TriangulationError> {
        let edges = edge_classes(&tri)?;
        // Re-validate so a branching built for another triangulation is caught.
        let branching = Branching::from_directions(&tri, &edges, branching.directions)?;
        let cusps = vertex_classes(&tri);
        Ok(BranchedTriangulation {
            tri,
            edges,
            branching,
            cusps,
        })
    }

    /// Uses the first branching found by the exhaustive search.
    pub fn auto(tri: Triangulation) -> Result<Self, TriangulationError> {
        let found = find_branchings(&tri, 1)?;
        let branching = found
            .into_iter()
            .next()
            .ok_or_else(|| TriangulationError::Branching("no branching found".into()))?;
        Self::new(tri, branching)
    }

    pub fn num_tets(&self) -> usize {
        self.tri.num_tets()
    }

    pub fn sign(&self, tet: usize) -> i32 {
        self.branching.sign(tet)
    }

    /// Star entries of an edge class rewritten as rank orderings.
    pub fn rank_star(&self, class: usize) -> Vec<(usize, Ordering)> {
        self.edges[class]
            .star
            .iter()
            .map(|e| (e.tet, self.branching.to_ranks(e.tet, e.ordering)))
            .collect()
    }

    /// The vertex of a neighbouring polyhedron identified with the vertex
    /// `ranks` of `tet`, both given in rank coordinates.
    pub fn identified_vertex(&self, tet: usize, ranks: Ordering) -> Option<(usize, Ordering)> {
        let labels = self.branching.to_labels(tet, ranks);
        self.tri
            .identified_vertex(tet, labels)
            .map(|(t, o)| (t, self.branching.to_ranks(t, o)))
    }
}

/// Exhaustive search for branchings, at most `limit` of them.
///
/// Edge classes are assigned in increasing id, each trying its reference
/// direction first; partial assignments creating a directed 3-cycle on a face
/// are pruned.
pub fn find_branchings(tri: &Triangulation, limit: usize) -> Result<Vec<Branching>, TriangulationError> {
    let edges = edge_classes(tri)?;
    let mut found = Vec::new();
    if limit == 0 {
        return Ok(found);
    }
    let mut assignment: Vec<Option<bool>> = vec![None; edges.len()];
    search(tri, &edges, 0, &mut assignment, limit, &mut found);
    Ok(found)
}

fn search(
    tri: &Triangulation,
    edges: &EdgeClasses,
    class: usize,
    assignment: &mut Vec<Option<bool>>,
    limit: usize,
    found: &mut Vec<Branching>,
) {
    if found.len() >= limit {
        return;
    }
    if class == edges.len() {
        let directions = assignment.iter().map(|d| d.expect("all assigned")).collect();
        if let Ok(b) = Branching::from_directions(tri, edges, directions) {
            found.push(b);
        }
        return;
    }
    for forward in [true, false] {
        assignment[class] = Some(forward);
        if !has_cycle(edges, &edges[class].star, assignment) {
            search(tri, edges, class + 1, assignment, limit, found);
        }
        if found.len() >= limit {
            break;
        }
    }
    assignment[class] = None;
}

/// Whether some face touched by `star` carries a directed 3-cycle under the
/// partial assignment.
fn has_cycle(edges: &EdgeClasses, star: &[super::StarEntry], assignment: &[Option<bool>]) -> bool {
    let direction = |tet: usize, a: u8, b: u8| -> Option<bool> {
        let (class, agrees) = edges.class_of(tet, a, b);
        assignment[class].map(|d| d == agrees)
    };
    star.iter().any(|entry| {
        let [x, y, z, t] = entry.ordering.0;
        [[x, y, z], [x, y, t]].iter().any(|&[a, b, c]| {
            match (direction(entry.tet, a, b), direction(entry.tet, b, c), direction(entry.tet, c, a)) {
                (Some(p), Some(q), Some(r)) => p == q && q == r,
                _ => false,
            }
        })
    })
}

/// Parses a branching file: `branch <class> <tail-cusp> <head-cusp> [+|-]`.
///
/// When both ends of the class lie on the same cusp the cusp pair does not
/// determine the direction, and the trailing `+` (reference direction) or `-`
/// is required.
pub fn parse_branching(text: &str, tri: &Triangulation) -> Result<Branching, TriangulationError> {
    let edges = edge_classes(tri)?;
    let cusps = vertex_classes(tri);
    let mut directions: Vec<Option<bool>> = vec![None; edges.len()];
    for (line, tokens) in significant_lines(text) {
        let (col, keyword) = tokens[0];
        if keyword != "branch" {
            return Err(syntax(line, col, &format!("unknown directive `{keyword}`")));
        }
        if !(4..=5).contains(&tokens.len()) {
            return Err(syntax(line, col, "expected `branch <class> <tail> <head> [+|-]`"));
        }
        let mut nums = [0usize; 3];
        for (slot, &(col, tok)) in nums.iter_mut().zip(&tokens[1..4]) {
            *slot = tok
                .parse()
                .map_err(|_| syntax(line, col, &format!("expected a non-negative integer, found `{tok}`")))?;
        }
        let [class, tail, head] = nums;
        if class >= edges.len() {
            return Err(syntax(line, tokens[1].0, &format!("edge class {class} out of range")));
        }
        if directions[class].is_some() {
            return Err(syntax(line, tokens[1].0, &format!("edge class {class} given twice")));
        }
        let entry = edges[class].star[0];
        let ref_tail = cusps[entry.tet][entry.tail() as usize];
        let ref_head = cusps[entry.tet][entry.head() as usize];
        let sign = tokens.get(4).map(|&(col, tok)| match tok {
            "+" => Ok(true),
            "-" => Ok(false),
            _ => Err(syntax(line, col, "expected `+` or `-`")),
        });
        let sign = sign.transpose()?;
        let forward = if ref_tail == ref_head {
            if (tail, head) != (ref_tail, ref_tail) {
                return Err(syntax(line, tokens[2].0, "endpoints do not match the edge class"));
            }
            sign.ok_or_else(|| syntax(line, col, "both ends on one cusp: direction token `+` or `-` required"))?
        } else {
            let forward = match (tail, head) {
                (t, h) if (t, h) == (ref_tail, ref_head) => true,
                (t, h) if (t, h) == (ref_head, ref_tail) => false,
                _ => return Err(syntax(line, tokens[2].0, "endpoints do not match the edge class")),
            };
            if sign.is_some_and(|s| s != forward) {
                return Err(syntax(line, tokens[4].0, "direction token contradicts the endpoints"));
            }
            forward
        };
        directions[class] = Some(forward);
    }
    let directions = directions
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| TriangulationError::Branching(format!("edge class {i} has no direction"))))
        .collect::<Result<Vec<_>, _>>()?;
    Branching::from_directions(tri, &edges, directions)
}
