//! Abstract triangulations: oriented tetrahedra with orientation-reversing
//! face pairings, their edge classes and stars, branchings, and the boundary
//! surface of the truncated complex.
//!
//! Every tetrahedron carries the vertex labels `0..4` and is oriented by the
//! identity numbering. Face `f` of a tetrahedron is the face opposite vertex
//! `f`. A gluing of face `f` of tetrahedron `t` is a tetrahedron `t'` and a
//! permutation `π` of the labels; the face lands on face `π(f)` of `t'`.

mod boundary;
mod branching;
mod edges;
pub(crate) mod parse;
mod perm;

pub use boundary::{boundary_components, vertex_classes, BoundaryComponent};
pub use branching::{find_branchings, parse_branching, BranchedTriangulation, Branching};
pub use edges::{edge_classes, EdgeClass, EdgeClasses, StarEntry};
pub use parse::{parse_triangulation, parse_triangulation_with};
pub use perm::{EdgeType, Ordering, Perm4};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("orientation violation at line {line}: gluing of face {face} of tet {tet} is an even permutation")]
    OrientationViolation { line: usize, tet: usize, face: u8 },
    #[error("dangling face / duplicate: face {face} of tet {tet} is glued more than once (line {line})")]
    DuplicateFace { line: usize, tet: usize, face: u8 },
    #[error("non-involutive gluing: face {face} of tet {tet} maps to face {target_face} of tet {target}, which is glued elsewhere")]
    NonInvolutive {
        tet: usize,
        face: u8,
        target: usize,
        target_face: u8,
    },
    #[error("dangling face: face {face} of tet {tet} is not glued")]
    DanglingFace { tet: usize, face: u8 },
    #[error("face {face} of tet {tet} is glued to itself")]
    SelfGluedFace { tet: usize, face: u8 },
    #[error("tetrahedron index {tet} out of range (tets {count})")]
    TetOutOfRange { tet: usize, count: usize },
    #[error("edge star through tet {tet} edge {a}{b} does not close into a consistently oriented cycle")]
    StarNotClosed { tet: usize, a: u8, b: u8 },
    #[error("branching file: {0}")]
    Branching(String),
}

/// How strictly to validate face pairings.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Mode {
    /// Every face must be glued.
    #[default]
    Strict,
    /// Unglued faces are allowed (boundary faces).
    Lenient,
}

/// Target of a face gluing.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

/// Oriented tetrahedra with a matching of faces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Triangulation {
    gluings: Vec<[Option<Gluing>; 4]>,
}

impl Triangulation {
    /// Builds a triangulation from explicit gluings, checking every invariant.
    ///
    /// Each entry is `(tet, face, target_tet, perm)`; both directions of a
    /// pairing may be given, but a missing reverse is filled in.
    pub fn from_gluings(
        num_tets: usize,
        gluings: &[(usize, u8, usize, Perm4)],
        mode: Mode,
    ) -> Result<Self, TriangulationError> {
        let mut raw: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; num_tets];
        for (idx, &(tet, face, target, perm)) in gluings.iter().enumerate() {
            insert_gluing(&mut raw, idx + 1, tet, face, target, perm)?;
        }
        let tri = Triangulation { gluings: raw };
        tri.close_and_validate(mode)
    }

    pub(crate) fn close_and_validate(mut self, mode: Mode) -> Result<Self, TriangulationError> {
        let n = self.gluings.len();
        // Fill missing reverse gluings and check involution.
        for tet in 0..n {
            for face in 0..4u8 {
                let Some(g) = self.gluings[tet][face as usize] else {
                    continue;
                };
                let target_face = g.perm.apply(face);
                let back = Gluing {
                    tet,
                    perm: g.perm.inverse(),
                };
                match self.gluings[g.tet][target_face as usize] {
                    None => self.gluings[g.tet][target_face as usize] = Some(back),
                    Some(existing) if existing == back => {}
                    Some(_) => {
                        return Err(TriangulationError::NonInvolutive {
                            tet,
                            face,
                            target: g.tet,
                            target_face,
                        })
                    }
                }
            }
        }
        if mode == Mode::Strict {
            for (tet, faces) in self.gluings.iter().enumerate() {
                for face in 0..4u8 {
                    if faces[face as usize].is_none() {
                        return Err(TriangulationError::DanglingFace { tet, face });
                    }
                }
            }
        }
        Ok(self)
    }

    /// Skips every check, for building invalid inputs in tests.
    #[cfg(test)]
    pub(crate) fn unchecked(gluings: Vec<[Option<Gluing>; 4]>) -> Self {
        Triangulation { gluings }
    }

    pub fn num_tets(&self) -> usize {
        self.gluings.len()
    }

    /// Gluing of face `face` (opposite vertex `face`) of `tet`, if any.
    pub fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        self.gluings[tet][face as usize]
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|faces| faces.iter().all(Option::is_some))
    }

    /// All gluings in `(tet, face)` order, each pairing listed from both sides.
    pub fn gluing_list(&self) -> Vec<(usize, u8, Gluing)> {
        let mut out = Vec::new();
        for (tet, faces) in self.gluings.iter().enumerate() {
            for face in 0..4u8 {
                if let Some(g) = faces[face as usize] {
                    out.push((tet, face, g));
                }
            }
        }
        out
    }

    /// Disjoint union with another triangulation; its tetrahedra are renumbered
    /// after this one's.
    pub fn disjoint_union(&self, other: &Triangulation) -> Triangulation {
        let offset = self.num_tets();
        let mut gluings = self.gluings.clone();
        gluings.extend(other.gluings.iter().map(|faces| {
            faces.map(|g| {
                g.map(|g| Gluing {
                    tet: g.tet + offset,
                    perm: g.perm,
                })
            })
        }));
        Triangulation { gluings }
    }

    /// The vertex of a neighbouring polyhedron identified with `(tet, ordering)`.
    ///
    /// The vertex `xyzt` lies on the face cell of the face opposite `t`; that
    /// cell is identified with the matching cell across the gluing.
    pub fn identified_vertex(&self, tet: usize, ordering: Ordering) -> Option<(usize, Ordering)> {
        self.gluing(tet, ordering.last())
            .map(|g| (g.tet, ordering.mapped(&g.perm)))
    }
}

fn insert_gluing(
    raw: &mut [[Option<Gluing>; 4]],
    line: usize,
    tet: usize,
    face: u8,
    target: usize,
    perm: Perm4,
) -> Result<(), TriangulationError> {
    let n = raw.len();
    for t in [tet, target] {
        if t >= n {
            return Err(TriangulationError::TetOutOfRange { tet: t, count: n });
        }
    }
    if face > 3 {
        return Err(TriangulationError::Syntax {
            line,
            column: 1,
            message: format!("face {face} out of range"),
        });
    }
    if !perm.is_odd() {
        return Err(TriangulationError::OrientationViolation { line, tet, face });
    }
    if tet == target && perm.apply(face) == face {
        return Err(TriangulationError::SelfGluedFace { tet, face });
    }
    if raw[tet][face as usize].is_some() {
        return Err(TriangulationError::DuplicateFace { line, tet, face });
    }
    raw[tet][face as usize] = Some(Gluing { tet: target, perm });
    Ok(())
}

/// Standard two-tetrahedron triangulation of the figure-eight knot complement.
///
/// In the conventional vertex names `x, y, z, t` the labels are `x=0, y=1,
/// t=2, z=3`; the arrow branching orders tet A as `x<t<z<y` and tet B as
/// `x<z<t<y`.
pub fn figure_eight() -> Triangulation {
    parse_triangulation(FIGURE_EIGHT_TRI).expect("built-in fixture is valid")
}

pub const FIGURE_EIGHT_TRI: &str = include_str!("../../fixtures/fig8.tri");
