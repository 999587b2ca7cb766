//! Edge-sum conditions and their exact integer solution.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::lattice::{size_reduce, solve_integer};
use super::{expand_flattening, Flattening, FlatteningError, TetFlattening};
use crate::crossratio::{classify, is_degenerate, Param, ShapeAssignment};
use crate::triangulation::BranchedTriangulation;

/// Distance from the lattice 2πi·ℤ beyond which an edge sum is rejected.
pub const GUARD_BAND: f64 = 1e-6;

/// Edge sums as affine functions of the lift integers:
/// `S_e = base_e + 2πi · Σ_j a[e][j] x_j` with `x = (p₀, q₀, p₁, q₁, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSystem {
    /// Edge classes with closed stars; open stars impose no condition.
    pub classes: Vec<usize>,
    pub a: Vec<Vec<i64>>,
    pub base: Vec<Complex64>,
}

/// Coefficients of `(p, q)` in one expanded value `sign · (l_j + 2πi·shift)`.
pub(crate) fn lift_coefficients(param: Param, sign: i32) -> (i64, i64) {
    let s = i64::from(sign);
    match param {
        Param::L1 => (s, 0),
        Param::L2 => (0, s),
        // l₃ = iπ − l₁ − l₂
        Param::L3 => (-s, -s),
    }
}

pub fn edge_system(bt: &BranchedTriangulation, shapes: &ShapeAssignment) -> EdgeSystem {
    let n = bt.num_tets();
    let principal: Vec<TetFlattening> = shapes.as_slice().iter().map(|&z| TetFlattening::new(z, 0, 0)).collect();
    let mut a = Vec::with_capacity(bt.edges.len());
    let mut base = Vec::with_capacity(bt.edges.len());
    let classes: Vec<usize> = (0..bt.edges.len()).filter(|&c| bt.edges[c].closed).collect();
    for &class in &classes {
        let mut row = vec![0i64; 2 * n];
        let mut sum = Complex64::new(0.0, 0.0);
        for (tet, ordering) in bt.rank_star(class) {
            let e = classify(ordering);
            let (cp, cq) = lift_coefficients(e.param, e.sign);
            row[2 * tet] += cp;
            row[2 * tet + 1] += cq;
            sum += expand_flattening(&principal[tet], ordering);
        }
        a.push(row);
        base.push(sum);
    }
    EdgeSystem { classes, a, base }
}

/// Per edge class, the sum of the flattening over the star.
pub fn edge_flattening_residuals(bt: &BranchedTriangulation, f: &Flattening) -> Vec<Complex64> {
    (0..bt.edges.len())
        .map(|class| bt.rank_star(class).into_iter().map(|(tet, o)| f.value(tet, o)).sum())
        .collect()
}

/// Finds lift integers making every edge sum vanish.
///
/// Principal logs give edge sums `2πi·m_e`; the integer system
/// `A x = −m` is solved exactly and the solution shortened by kernel vectors.
pub fn solve_flattening(bt: &BranchedTriangulation, shapes: &ShapeAssignment) -> Result<Flattening, FlatteningError> {
    for (tet, &z) in shapes.as_slice().iter().enumerate() {
        if is_degenerate(z) {
            return Err(FlatteningError::DegenerateShape { tet, z });
        }
    }
    let system = edge_system(bt, shapes);
    let mut rhs = Vec::with_capacity(system.base.len());
    for (edge, &value) in system.base.iter().enumerate() {
        let m = value.im / (2.0 * PI);
        let rounded = m.round();
        if value.re.abs() > GUARD_BAND || (m - rounded).abs() > GUARD_BAND {
            return Err(FlatteningError::RoundingAmbiguity {
                edge: system.classes[edge],
                value,
            });
        }
        rhs.push(-(rounded as i64));
    }
    let n = bt.num_tets();
    let (x, hnf) = solve_integer(&system.a, &rhs, 2 * n).map_err(|ob| FlatteningError::NoIntegerSolution {
        obstruction: ob.residual,
        rational: ob.rational,
    })?;
    let x = size_reduce(x, &hnf.kernel());
    let to_i64 = |v: &BigInt| v.to_i64().expect("lift integers fit in i64");
    let lifts: Vec<(i64, i64)> = (0..n).map(|t| (to_i64(&x[2 * t]), to_i64(&x[2 * t + 1]))).collect();
    Ok(Flattening::from_integers(shapes, &lifts))
}
