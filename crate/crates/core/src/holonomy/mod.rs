//! The SL(2,ℂ) cocycle on the polyhedral subdivision, its cell relations,
//! path holonomies and logarithmic peripheral holonomy.
//!
//! Vertices of the polyhedron of a tetrahedron are orderings in rank
//! coordinates. An edge transposes two adjacent positions and is oriented
//! from the lexicographically smaller ordering to the larger one.

mod cells;
mod peripheral;
mod representation;

pub use cells::{verify_cells, CellKind, CellReport, CellResidual};
pub use peripheral::{
    completeness_relation, cusp_basis, edge_forms, parse_paths, peripheral_form, peripheral_log_holonomy,
    to_paths_string, BoundaryPath, CuspBasis, LogForm,
};
pub use representation::{fundamental_representation, FundamentalRepresentation, Generator};

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::flattening::Flattening;
use crate::triangulation::{BranchedTriangulation, EdgeType, Ordering};

pub type Mat2 = Matrix2<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error("path is disconnected before step {step}")]
    Disconnected { step: usize },
    #[error("loop does not close")]
    NotClosed,
    #[error("step {step} leaves the boundary (E1 edge)")]
    LeavesBoundary { step: usize },
    #[error("tetrahedron {tet} out of range")]
    TetOutOfRange { tet: usize },
    #[error("path file line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Label of E1 edges.
pub fn m1() -> Mat2 {
    Mat2::new(ZERO, -I, -I, ZERO)
}

/// Label of E2 edges.
pub fn m2() -> Mat2 {
    Mat2::new(-I, I, ZERO, I)
}

/// Label of an E3 edge whose lower end carries the value `l`.
pub fn m3(l: Complex64) -> Mat2 {
    Mat2::new((-l / 2.0).exp(), ZERO, ZERO, (l / 2.0).exp())
}

/// Inverse of a determinant-one matrix via its adjugate.
pub fn sl2_inverse(m: &Mat2) -> Mat2 {
    Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
}

/// Largest singular value.
pub fn operator_norm(m: &Mat2) -> f64 {
    let g = m.adjoint() * m;
    let tr = (g[(0, 0)] + g[(1, 1)]).re;
    let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr + disc) / 2.0).max(0.0).sqrt()
}

/// An edge of one polyhedron traversed in a chosen direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub tet: usize,
    /// The lexicographically smaller end, in rank coordinates.
    pub lower: Ordering,
    pub kind: EdgeType,
    /// Traversed from `lower` to the other end.
    pub forward: bool,
}

impl OrientedEdge {
    /// The edge leaving `from` along `kind`.
    pub fn from_vertex(tet: usize, from: Ordering, kind: EdgeType) -> Self {
        let other = from.swapped(kind);
        if from < other {
            OrientedEdge { tet, lower: from, kind, forward: true }
        } else {
            OrientedEdge { tet, lower: other, kind, forward: false }
        }
    }

    pub fn upper(&self) -> Ordering {
        self.lower.swapped(self.kind)
    }

    pub fn source(&self) -> (usize, Ordering) {
        (self.tet, if self.forward { self.lower } else { self.upper() })
    }

    pub fn target(&self) -> (usize, Ordering) {
        (self.tet, if self.forward { self.upper() } else { self.lower })
    }

    pub fn reversed(&self) -> Self {
        OrientedEdge { forward: !self.forward, ..*self }
    }
}

/// Generator labels of every polyhedron for a flattening; gluing
/// identifications carry the identity.
#[derive(Clone, Debug)]
pub struct LiftedCocycle<'a> {
    pub bt: &'a BranchedTriangulation,
    values: Vec<[Complex64; 24]>,
}

pub fn build_lifted_cocycle<'a>(bt: &'a BranchedTriangulation, f: &Flattening) -> LiftedCocycle<'a> {
    let values = (0..bt.num_tets())
        .map(|tet| {
            let mut row = [ZERO; 24];
            for o in Ordering::all() {
                row[o.index()] = f.value(tet, o);
            }
            row
        })
        .collect();
    LiftedCocycle { bt, values }
}

impl<'a> LiftedCocycle<'a> {
    pub fn value(&self, tet: usize, ordering: Ordering) -> Complex64 {
        self.values[tet][ordering.index()]
    }

    /// Label of the edge oriented from `lower` along `kind`.
    pub fn label(&self, tet: usize, lower: Ordering, kind: EdgeType) -> Mat2 {
        match kind {
            EdgeType::E1 => m1(),
            EdgeType::E2 => m2(),
            EdgeType::E3 => m3(self.value(tet, lower)),
        }
    }

    /// Holonomy of one traversal.
    pub fn step(&self, e: &OrientedEdge) -> Mat2 {
        let m = self.label(e.tet, e.lower, e.kind);
        if e.forward {
            m
        } else {
            sl2_inverse(&m)
        }
    }

    /// Whether two polyhedron vertices are the same vertex of the complex.
    pub fn same_vertex(&self, a: (usize, Ordering), b: (usize, Ordering)) -> bool {
        a == b || self.bt.identified_vertex(a.0, a.1) == Some(b)
    }
}

fn check_tets(bt: &BranchedTriangulation, path: &[OrientedEdge]) -> Result<(), HolonomyError> {
    match path.iter().find(|e| e.tet >= bt.num_tets()) {
        Some(e) => Err(HolonomyError::TetOutOfRange { tet: e.tet }),
        None => Ok(()),
    }
}

/// Ordered product of the labels along a path; the later step multiplies on
/// the left.
pub fn path_holonomy(c: &LiftedCocycle, path: &[OrientedEdge]) -> Result<Mat2, HolonomyError> {
    check_tets(c.bt, path)?;
    let mut hol = identity();
    for (k, e) in path.iter().enumerate() {
        if k > 0 && !c.same_vertex(path[k - 1].target(), e.source()) {
            return Err(HolonomyError::Disconnected { step: k });
        }
        hol = c.step(e) * hol;
    }
    Ok(hol)
}
