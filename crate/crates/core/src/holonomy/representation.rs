//! Generators of the holonomy representation after gauge fixing along a
//! spanning tree of the dual graph.

use std::collections::VecDeque;


use super::{identity, operator_norm, sl2_inverse, LiftedCocycle, Mat2, OrientedEdge};
use crate::triangulation::{EdgeType, Ordering};

/// The image of the loop that crosses one non-tree face.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub tet: usize,
    /// Rank of the vertex opposite the crossed face.
    pub face_rank: u8,
    pub matrix: Mat2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalRepresentation {
    pub base_tet: usize,
    pub generators: Vec<Generator>,
    /// Per closed edge class, `‖word − Id‖` for the relation read around
    /// the edge.
    pub relation_residuals: Vec<f64>,
}


impl FundamentalRepresentation {
    pub fn max_relation_residual(&self) -> f64 {
        self.relation_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Holonomy inside one polyhedron from `from` to `to`, along adjacent
/// transpositions.
fn within(c: &LiftedCocycle, tet: usize, from: Ordering, to: Ordering) -> Mat2 {
    let mut v = from;
    let mut hol = identity();
    // Bubble `v` into `to`, position by position.
    for target_pos in 0..4 {
        let want = to.0[target_pos];
        let mut at = v.0.iter().position(|&x| x == want).expect("orderings share labels");
        while at > target_pos {
            let kind = EdgeType::ALL[at - 1];
            hol = c.step(&OrientedEdge::from_vertex(tet, v, kind)) * hol;
            v = v.swapped(kind);
            at -= 1;
        }
    }
    hol
}

fn face_vertex(face_rank: u8) -> Ordering {
    let rest: Vec<u8> = (0..4).filter(|&v| v != face_rank).collect();
    Ordering([rest[0], rest[1], rest[2], face_rank])
}

/// Transport from the canonical vertex of `tet` to the canonical vertex of
/// the neighbour across the face opposite rank `face_rank`.
fn crossing(c: &LiftedCocycle, tet: usize, face_rank: u8) -> Option<(usize, Mat2)> {
    let u = face_vertex(face_rank);
    let (t2, u2) = c.bt.identified_vertex(tet, u)?;
    Some((t2, within(c, t2, u2, Ordering::CANONICAL) * within(c, tet, Ordering::CANONICAL, u)))
}

pub fn fundamental_representation(c: &LiftedCocycle, base_tet: usize) -> FundamentalRepresentation {
    let n = c.bt.num_tets();
    let mut frame: Vec<Option<Mat2>> = vec![None; n];
    let mut tree = vec![[false; 4]; n];
    if base_tet < n {
        frame[base_tet] = Some(identity());
        let mut queue = VecDeque::from([base_tet]);
        while let Some(t) = queue.pop_front() {
            for r in 0..4u8 {
                if let Some((t2, m)) = crossing(c, t, r) {
                    if frame[t2].is_none() {
                        frame[t2] = Some(m * frame[t].unwrap());
                        tree[t][r as usize] = true;
                        let back = c.bt.identified_vertex(t, face_vertex(r)).unwrap().1.last();
                        tree[t2][back as usize] = true;
                        queue.push_back(t2);
                    }
                }
            }
        }
    }
    // Gauge-fixed crossing: identity on the tree.
    let gauge = |t: usize, r: u8| -> Option<Mat2> {
        let (t2, m) = crossing(c, t, r)?;
        Some(sl2_inverse(&frame[t2]?) * m * frame[t]?)
    };
    let mut generators = Vec::new();
    for t in 0..n {
        for r in 0..4u8 {
            if tree[t][r as usize] || frame[t].is_none() {
                continue;
            }
            let Some((t2, u2)) = c.bt.identified_vertex(t, face_vertex(r)) else {
                continue;
            };
            // One generator per face pair.
            if (t2, u2.last()) < (t, r) {
                continue;
            }
            if let Some(matrix) = gauge(t, r) {
                generators.push(Generator { tet: t, face_rank: r, matrix });
            }
        }
    }
    let mut relation_residuals = Vec::new();
    for class in 0..c.bt.edges.len() {
        if !c.bt.edges[class].closed {
            continue;
        }
        let mut word = identity();
        let mut complete = true;
        for (tet, o) in c.bt.rank_star(class) {
            // Leave through the face opposite the last vertex after the E3 swap.
            match gauge(tet, o.swapped(EdgeType::E3).last()) {
                Some(m) => word = m * word,
                None => complete = false,
            }
        }
        if complete {
            relation_residuals.push(operator_norm(&(word - identity())));
        }
    }
    FundamentalRepresentation {
        base_tet,
        generators,
        relation_residuals,
    }
}
