//! The 2-cell relations of the lifted cocycle.

use rayon::prelude::*;
use serde::Serialize;

use super::{identity, operator_norm, LiftedCocycle, Mat2, OrientedEdge};
use crate::triangulation::{EdgeType, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    /// Squares `{xyzt, yxzt, xytz, yxtz}`.
    Edge,
    /// Hexagons with the last vertex fixed.
    Face,
    /// Hexagons with the first vertex fixed.
    Vertex,
    /// The loop around an edge of the triangulation.
    EdgeStar,
}

impl std::fmt::Display for CellKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CellKind::Edge => "type-edge",
            CellKind::Face => "type-face",
            CellKind::Vertex => "type-vertex",
            CellKind::EdgeStar => "edge-star",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResidual {
    pub kind: CellKind,
    /// Tetrahedron for cells of a polyhedron, edge class for edge stars.
    pub index: usize,
    /// Starting vertex of the boundary loop, rank coordinates.
    pub start: String,
    /// Operator norm of `holonomy − Id` around the cell.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CellReport {
    pub cells: Vec<CellResidual>,
}

impl CellReport {
    pub fn max_residual(&self, kind: CellKind) -> f64 {
        self.cells.iter().filter(|c| c.kind == kind).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn violations(&self, tol: f64) -> impl Iterator<Item = &CellResidual> {
        self.cells.iter().filter(move |c| !(c.residual <= tol))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.violations(tol).next().is_none()
    }
}

fn loop_holonomy(c: &LiftedCocycle, tet: usize, start: Ordering, kinds: &[EdgeType]) -> Mat2 {
    let mut v = start;
    let mut hol = identity();
    for &kind in kinds {
        let e = OrientedEdge::from_vertex(tet, v, kind);
        hol = c.step(&e) * hol;
        v = v.swapped(kind);
    }
    debug_assert_eq!(v, start, "cell boundary must close");
    hol
}

fn sorted_with(rest: &[u8], front: Option<u8>, back: Option<u8>) -> Ordering {
    let mut mid: Vec<u8> = rest.to_vec();
    mid.sort_unstable();
    let seq: Vec<u8> = front.into_iter().chain(mid).chain(back).collect();
    Ordering([seq[0], seq[1], seq[2], seq[3]])
}

fn tet_cells(c: &LiftedCocycle, tet: usize) -> Vec<CellResidual> {
    use EdgeType::*;
    let mut out = Vec::with_capacity(14);
    let mut push = |kind, start: Ordering, kinds: &[EdgeType]| {
        let h = loop_holonomy(c, tet, start, kinds);
        out.push(CellResidual {
            kind,
            index: tet,
            start: start.to_string(),
            residual: operator_norm(&(h - identity())),
        });
    };
    for a in 0..4u8 {
        for b in a + 1..4u8 {
            let rest: Vec<u8> = (0..4).filter(|&v| v != a && v != b).collect();
            push(CellKind::Edge, Ordering([a, b, rest[0], rest[1]]), &[E1, E3, E1, E3]);
        }
    }
    for d in 0..4u8 {
        let rest: Vec<u8> = (0..4).filter(|&v| v != d).collect();
        push(CellKind::Face, sorted_with(&rest, None, Some(d)), &[E1, E2, E1, E2, E1, E2]);
    }
    for a in 0..4u8 {
        let rest: Vec<u8> = (0..4).filter(|&v| v != a).collect();
        push(CellKind::Vertex, sorted_with(&rest, Some(a), None), &[E2, E3, E2, E3, E2, E3]);
    }
    out
}

/// Holonomy around the end of an edge class: E3 steps joined by face
/// identifications. `None` for an open star.
pub(crate) fn edge_star_holonomy(c: &LiftedCocycle, class: usize) -> Option<Mat2> {
    let star = c.bt.rank_star(class);
    let start = *star.first()?;
    let mut at = start;
    let mut hol = identity();
    for _ in 0..star.len() {
        let e = OrientedEdge::from_vertex(at.0, at.1, EdgeType::E3);
        hol = c.step(&e) * hol;
        let (tet, v) = e.target();
        at = c.bt.identified_vertex(tet, v)?;
        if at == start {
            return Some(hol);
        }
    }
    None
}

/// Every type-edge, type-face and type-vertex relation of every polyhedron
/// and the closure around every closed edge star, which must be `+Id`.
pub fn verify_cells(c: &LiftedCocycle) -> CellReport {
    let mut cells: Vec<CellResidual> = (0..c.bt.num_tets()).into_par_iter().flat_map(|t| tet_cells(c, t)).collect();
    for class in 0..c.bt.edges.len() {
        if let Some(h) = edge_star_holonomy(c, class) {
            cells.push(CellResidual {
                kind: CellKind::EdgeStar,
                index: class,
                start: c.bt.rank_star(class)[0].1.to_string(),
                residual: operator_norm(&(h - identity())),
            });
        }
    }
    CellReport { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossratio::ShapeAssignment;
    use crate::flattening::{solve_flattening, Flattening};
    use crate::holonomy::{build_lifted_cocycle, m1, m2};
    use crate::triangulation::{figure_eight, parse_triangulation_with, BranchedTriangulation, Mode};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn fig8() -> (BranchedTriangulation, Flattening) {
        let bt = BranchedTriangulation::auto(figure_eight()).unwrap();
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let shapes = ShapeAssignment::new(vec![w / (w - 1.0), 1.0 / (1.0 - w)]).unwrap();
        let f = solve_flattening(&bt, &shapes).unwrap();
        (bt, f)
    }

    #[test]
    fn braid_relation() {
        assert!(operator_norm(&(m1() * m2() * m1() - m2() * m1() * m2())) == 0.0);
    }

    #[test]
    fn census_of_cells() {
        let (bt, f) = fig8();
        let report = verify_cells(&build_lifted_cocycle(&bt, &f));
        let count = |k| report.cells.iter().filter(|c| c.kind == k).count();
        assert_eq!((count(CellKind::Edge), count(CellKind::Face), count(CellKind::Vertex)), (12, 8, 8));
        assert_eq!(count(CellKind::EdgeStar), 2);
    }

    #[test]
    fn solved_figure_eight_passes() {
        let (bt, f) = fig8();
        let report = verify_cells(&build_lifted_cocycle(&bt, &f));
        assert!(report.passes(1e-10), "{:?}", report.violations(1e-10).collect::<Vec<_>>());
    }

    #[test]
    fn real_branch_vertex_relation() {
        let tri = parse_triangulation_with("tri 1\ntets 1\n", Mode::Lenient).unwrap();
        let bt = BranchedTriangulation::auto(tri).unwrap();
        let shapes = ShapeAssignment::new(vec![Complex64::new(2.0, 0.0)]).unwrap();
        let f = Flattening::from_integers(&shapes, &[(0, 1)]);
        let report = verify_cells(&build_lifted_cocycle(&bt, &f));
        assert!(report.max_residual(CellKind::Vertex) < 1e-12);
        assert!(report.passes(1e-12));
    }

    #[test]
    fn forced_edge_sum_gives_minus_identity() {
        let (bt, f) = fig8();
        let mut lifts = f.lifts();
        lifts[0].1 += 1;
        let g = Flattening::from_integers(&f.shape_assignment(), &lifts);
        let c = build_lifted_cocycle(&bt, &g);
        let report = verify_cells(&c);
        assert!(report.max_residual(CellKind::Edge) < 1e-10);
        assert!(report.max_residual(CellKind::Vertex) < 1e-10);
        let mut flagged = 0;
        for class in 0..bt.edges.len() {
            let h = edge_star_holonomy(&c, class).unwrap();
            if operator_norm(&(h + identity())) < 1e-10 {
                flagged += 1;
            }
        }
        assert!(flagged > 0);
        assert!(report.violations(1e-10).all(|v| v.kind == CellKind::EdgeStar));
    }

    #[test]
    fn any_single_lift_change_breaks_a_closure() {
        let (bt, f) = fig8();
        for tet in 0..2 {
            for which in 0..2 {
                for delta in [-1, 1] {
                    let mut lifts = f.lifts();
                    if which == 0 {
                        lifts[tet].0 += delta;
                    } else {
                        lifts[tet].1 += delta;
                    }
                    let g = Flattening::from_integers(&f.shape_assignment(), &lifts);
                    let report = verify_cells(&build_lifted_cocycle(&bt, &g));
                    assert!(report.max_residual(CellKind::EdgeStar) > 1.0, "{tet} {which} {delta}");
                }
            }
        }
    }
}
