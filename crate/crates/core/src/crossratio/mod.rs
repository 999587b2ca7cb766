//! Cross-ratio structures on a branched triangulation.
//!
//! Orderings here are always in rank coordinates: the entries are positions
//! in the branching order, so `0123` is the canonical vertex `xyzt` with
//! `x<y<z<t`. A tetrahedron is described by one complex number `z`, the
//! cross-ratio at `0123`, realized by the configuration `(∞, 0, 1, z)`.

mod gluing;
mod solver;

pub use gluing::{build_gluing_system, edge_residuals, Factor, GluingSystem, Relation};
pub use solver::{solve_gluing, Solution, SolveOutcome, SolverConfig};

use num_complex::Complex64;
use thiserror::Error;

use std::fmt::Write as _;

use crate::triangulation::parse::significant_lines;
use crate::triangulation::Ordering;

/// Shapes closer than this to 0, 1 or ∞ are treated as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrossRatioError {
    #[error("degenerate shape {z} on tetrahedron {tet}")]
    DegenerateShape { tet: usize, z: Complex64 },
    #[error("expected {expected} shapes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("solver did not converge after {starts} starts (best max residual {best_residual:e}; {degenerate_limits} starts ran into degenerate shapes)")]
    NonConvergence {
        starts: usize,
        best_residual: f64,
        degenerate_limits: usize,
    },
    #[error("Jacobian rank-deficient at iteration {iteration} (max residual {residual:e}) at {shapes:?}")]
    RankDeficient {
        iteration: usize,
        residual: f64,
        shapes: Vec<Complex64>,
    },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("shapes file line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

/// One shape parameter per tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeAssignment(pub(crate) Vec<Complex64>);

impl ShapeAssignment {
    pub fn new(shapes: Vec<Complex64>) -> Result<Self, CrossRatioError> {
        for (tet, &z) in shapes.iter().enumerate() {
            if is_degenerate(z) {
                return Err(CrossRatioError::DegenerateShape { tet, z });
            }
        }
        Ok(ShapeAssignment(shapes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, tet: usize) -> Complex64 {
        self.0[tet]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// Cross-ratio of `tet` at an ordering in rank coordinates.
    pub fn cross_ratio(&self, tet: usize, ordering: Ordering) -> Complex64 {
        expand_cross_ratio(self.0[tet], ordering)
    }

    /// `shape <tet> <re> <im>` lines, printed with 17 significant digits.
    pub fn to_shapes_string(&self) -> String {
        let mut out = String::new();
        for (tet, z) in self.0.iter().enumerate() {
            let _ = writeln!(out, "shape {tet} {:.16e} {:.16e}", z.re, z.im);
        }
        out
    }
}

pub fn parse_shapes_file(text: &str) -> Result<ShapeAssignment, CrossRatioError> {
    let syntax = |line, column, message: String| CrossRatioError::Syntax { line, column, message };
    let mut shapes: Vec<Option<Complex64>> = Vec::new();
    for (line, tokens) in significant_lines(text) {
        let (col, keyword) = tokens[0];
        if keyword != "shape" || tokens.len() != 4 {
            return Err(syntax(line, col, "expected `shape <tet> <re> <im>`".into()));
        }
        let tet: usize = tokens[1]
            .1
            .parse()
            .map_err(|_| syntax(line, tokens[1].0, "expected a tetrahedron index".into()))?;
        let mut parts = [0.0f64; 2];
        for (slot, &(c, tok)) in parts.iter_mut().zip(&tokens[2..]) {
            *slot = tok.parse().map_err(|_| syntax(line, c, format!("expected a number, found `{tok}`")))?;
        }
        if shapes.len() <= tet {
            shapes.resize(tet + 1, None);
        }
        if shapes[tet].is_some() {
            return Err(syntax(line, tokens[1].0, format!("tetrahedron {tet} given twice")));
        }
        shapes[tet] = Some(Complex64::new(parts[0], parts[1]));
    }
    let shapes = shapes
        .into_iter()
        .enumerate()
        .map(|(tet, z)| z.ok_or_else(|| syntax(0, 0, format!("tetrahedron {tet} missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    ShapeAssignment::new(shapes)
}

pub fn is_degenerate(z: Complex64) -> bool {
    !z.is_finite() || z.norm() < DEGENERACY_GUARD || (z - 1.0).norm() < DEGENERACY_GUARD || z.norm() > 1.0 / DEGENERACY_GUARD
}

/// Cross-ratio `X(abcd)` of the configuration `τ = (∞, 0, 1, z)` on ranks.
///
/// `X(xyzt) = (τt−τy)(τz−τx) / ((τz−τy)(τt−τx))`, with the two factors
/// containing `τ = ∞` cancelled against each other.
pub fn expand_cross_ratio(z: Complex64, ordering: Ordering) -> Complex64 {
    let tau = |r: u8| -> Complex64 {
        match r {
            1 => Complex64::new(0.0, 0.0),
            2 => Complex64::new(1.0, 0.0),
            3 => z,
            _ => unreachable!("rank 0 sits at infinity"),
        }
    };
    let [a, b, c, d] = ordering.0;
    let x = if a == 0 {
        (tau(d) - tau(b)) / (tau(c) - tau(b))
    } else if b == 0 {
        (tau(c) - tau(a)) / (tau(d) - tau(a))
    } else if c == 0 {
        (tau(d) - tau(b)) / (tau(d) - tau(a))
    } else {
        (tau(c) - tau(a)) / (tau(c) - tau(b))
    };
    debug_assert!(x.norm() > 0.0 && (x - 1.0).norm() > 0.0 && x.is_finite());
    x
}

/// Which of the three basic parameters an ordering reduces to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Param {
    /// `l₁ = L(xyzt)`, with `exp(l₁) = z`.
    L1,
    /// `l₂ = L(xzty)`, with `exp(l₂) = 1/(1−z)`.
    L2,
    /// `l₃ = L(xtyz)`, with `exp(l₃) = 1 − 1/z`.
    L3,
}

/// An ordering written as `sign · (l_j + 2πi·shift)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Expansion {
    pub param: Param,
    pub sign: i32,
    pub shift: i32,
}

/// Reduces an ordering (rank coordinates) to one of `±l₁, ±l₂, ±(l₂−2πi), ±l₃`.
///
/// Swapping the first pair or the last pair negates; the double transposition
/// `xyzt → ztxy` keeps the parameter except for `tyxz`, which is `l₂ − 2πi`.
pub fn classify(ordering: Ordering) -> Expansion {
    let [a, b, c, d] = ordering.0;
    let mut s = 1;
    if a > b {
        s = -s;
    }
    if c > d {
        s = -s;
    }
    match (a.min(b), a.max(b)) {
        (0, 1) | (2, 3) => Expansion {
            param: Param::L1,
            sign: s,
            shift: 0,
        },
        // xzyt = −xzty
        (0, 2) => Expansion {
            param: Param::L2,
            sign: -s,
            shift: 0,
        },
        // tyxz = l₂ − 2πi, reached from ytxz by one swap
        (1, 3) => Expansion {
            param: Param::L2,
            sign: -s,
            shift: -1,
        },
        (0, 3) | (1, 2) => Expansion {
            param: Param::L3,
            sign: s,
            shift: 0,
        },
        _ => unreachable!("first pair of distinct ranks"),
    }
}

impl Param {
    /// `exp(l_j)` as a function of the shape `z`.
    pub fn cross_ratio(self, z: Complex64) -> Complex64 {
        match self {
            Param::L1 => z,
            Param::L2 => 1.0 / (1.0 - z),
            Param::L3 => 1.0 - 1.0 / z,
        }
    }

    /// `d log(exp(l_j)) / dz`.
    pub fn log_derivative(self, z: Complex64) -> Complex64 {
        match self {
            Param::L1 => 1.0 / z,
            Param::L2 => 1.0 / (1.0 - z),
            Param::L3 => 1.0 / (z * (z - 1.0)),
        }
    }
}

/// Cross-ratio at `ordering` through the parameter table.
pub fn cross_ratio_by_class(z: Complex64, ordering: Ordering) -> Complex64 {
    let e = classify(ordering);
    let base = e.param.cross_ratio(z);
    if e.sign > 0 {
        base
    } else {
        1.0 / base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn ord(s: &str) -> Ordering {
        Ordering::parse(s).unwrap()
    }

    #[test]
    fn first_pair_swap_inverts() {
        let z = Complex64::new(0.3, 0.7);
        assert!(close(expand_cross_ratio(z, ord("1023")), 1.0 / z, 1e-15));
    }

    #[test]
    fn xzty_is_one_over_one_minus_z() {
        let z = Complex64::new(-1.2, 0.4);
        assert!(close(expand_cross_ratio(z, ord("0231")), 1.0 / (1.0 - z), 1e-15));
    }

    #[test]
    fn real_configuration_values() {
        // (∞, 0, u, 1) is (∞, 0, 1, 1/u) after scaling by 1/u.
        let u = 0.37;
        let z = Complex64::new(1.0 / u, 0.0);
        assert!(close(expand_cross_ratio(z, ord("0123")), Complex64::new(1.0 / u, 0.0), 1e-14));
        assert!(close(expand_cross_ratio(z, ord("0231")), Complex64::new(-u / (1.0 - u), 0.0), 1e-14));
        assert!(close(expand_cross_ratio(z, ord("0312")), Complex64::new(1.0 - u, 0.0), 1e-14));
    }

    #[test]
    fn every_class_occurs_four_times() {
        let mut counts = std::collections::HashMap::new();
        for o in Ordering::all() {
            let e = classify(o);
            *counts.entry((e.param as u8, e.sign, e.shift)).or_insert(0) += 1;
        }
        // Each parameter: 4 orderings with each sign; l₂ splits its 8 into
        // 4 unshifted and 4 shifted ones.
        assert_eq!(counts[&(Param::L1 as u8, 1, 0)], 4);
        assert_eq!(counts[&(Param::L1 as u8, -1, 0)], 4);
        assert_eq!(counts[&(Param::L2 as u8, 1, 0)] + counts[&(Param::L2 as u8, -1, 0)], 4);
        assert_eq!(counts[&(Param::L2 as u8, 1, -1)] + counts[&(Param::L2 as u8, -1, -1)], 4);
        assert_eq!(counts[&(Param::L3 as u8, 1, 0)], 4);
    }

    fn shape() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(re, im)| Complex64::new(re, im))
            .prop_filter("non-degenerate", |z| z.norm() > 1e-3 && (z - 1.0).norm() > 1e-3)
    }

    proptest! {
        #[test]
        fn symmetries_of_the_cross_ratio(z in shape(), idx in 0usize..24) {
            let o = Ordering::from_index(idx);
            let [x, y, zz, t] = o.0;
            let v = expand_cross_ratio(z, o);
            let at = |s: [u8; 4]| expand_cross_ratio(z, Ordering(s));
            prop_assert!(close(at([zz, t, x, y]), v, 1e-10));
            prop_assert!(close(at([y, x, zz, t]), 1.0 / v, 1e-10));
            prop_assert!(close(at([x, y, t, zz]), 1.0 / v, 1e-10));
            prop_assert!(close(at([x, zz, t, y]), 1.0 / (1.0 - v), 1e-10));
            prop_assert!(close(at([y, x, t, zz]), v, 1e-10));
        }

        #[test]
        fn table_agrees_with_configuration(z in shape(), idx in 0usize..24) {
            let o = Ordering::from_index(idx);
            prop_assert!(close(cross_ratio_by_class(z, o), expand_cross_ratio(z, o), 1e-12));
        }
    }

    #[test]
    fn shapes_file_roundtrip() {
        let shapes = ShapeAssignment::new(vec![Complex64::new(0.5, -0.8660254037844386), Complex64::new(-1e-3, 7.25)]).unwrap();
        assert_eq!(parse_shapes_file(&shapes.to_shapes_string()).unwrap(), shapes);
        let text = "# comment\nshape 1 2 3\nshape 0 0.5 0.5\n";
        assert_eq!(
            parse_shapes_file(text).unwrap().as_slice(),
            &[Complex64::new(0.5, 0.5), Complex64::new(2.0, 3.0)]
        );
    }

    #[test]
    fn shapes_file_errors() {
        assert!(matches!(
            parse_shapes_file("shape 0 1 x\n"),
            Err(CrossRatioError::Syntax { line: 1, column: 11, .. })
        ));
        assert!(matches!(parse_shapes_file("shape 1 2 3\n"), Err(CrossRatioError::Syntax { .. })));
        assert!(matches!(
            parse_shapes_file("shape 0 1 0\n"),
            Err(CrossRatioError::DegenerateShape { tet: 0, .. })
        ));
    }

    #[test]
    fn degenerate_shapes_rejected() {
        let err = ShapeAssignment::new(vec![Complex64::new(0.5, 0.5), Complex64::new(1.0, 1e-15)]).unwrap_err();
        assert!(matches!(err, CrossRatioError::DegenerateShape { tet: 1, .. }));
        assert!(ShapeAssignment::new(vec![Complex64::new(0.0, 0.0)]).is_err());
        assert!(ShapeAssignment::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    }
}
