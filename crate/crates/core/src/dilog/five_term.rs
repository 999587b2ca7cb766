//! The five-term relation, both for `H` and for five points of ℂP¹.

use num_complex::Complex64;

use super::{cs_tet, h, CSValue, DilogError};
use crate::flattening::{principal_log, TetFlattening, I_PI};
use std::f64::consts::PI;

/// `H(u) − H(v) + H(v/u) − H((1−u⁻¹)/(1−v⁻¹)) + H((1−u)/(1−v))`.
pub fn five_term_residual(u: f64, v: f64) -> Result<f64, DilogError> {
    if !(0.0 < v && v < u && u < 1.0) {
        return Err(DilogError::Domain {
            function: "five-term relation (needs 0 < v < u < 1)",
            value: if 0.0 < v && v < 1.0 { u } else { v },
        });
    }
    Ok(h(u)? - h(v)? + h(v / u)? - h((1.0 - 1.0 / u) / (1.0 - 1.0 / v))? + h((1.0 - u) / (1.0 - v))?)
}

/// A point of ℂP¹.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

/// `λ(a, b) = Log(τ_a − τ_b)` for `a < b`, and `λ(b, a) − iπ` for `a > b`.
/// A point at infinity contributes `0` from the lower side.
fn lambda(points: &[Point; 5], a: usize, b: usize) -> Complex64 {
    if a > b {
        return lambda(points, b, a) - I_PI;
    }
    match (points[a], points[b]) {
        (Point::Finite(ta), Point::Finite(tb)) => principal_log(ta - tb),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// `L(xyzt) = λ(t,y) + λ(z,x) − λ(z,y) − λ(t,x)`.
fn log_cross_ratio(points: &[Point; 5], [x, y, z, t]: [usize; 4]) -> Complex64 {
    lambda(points, t, y) + lambda(points, z, x) - lambda(points, z, y) - lambda(points, t, x)
}

/// Flattenings of the five sub-tetrahedra `Δᵢ = X ∖ {xᵢ}` of a configuration
/// in the order of the points.
pub fn config_flattenings(points: &[Point; 5]) -> Result<[TetFlattening; 5], DilogError> {
    if points[1..].contains(&Point::Infinity) {
        return Err(DilogError::ConfigRejected("only the lowest point may be at infinity".into()));
    }
    for a in 0..5 {
        for b in a + 1..5 {
            if let (Point::Finite(ta), Point::Finite(tb)) = (points[a], points[b]) {
                if (ta - tb).norm() < 1e-12 {
                    return Err(DilogError::ConfigRejected(format!("points {a} and {b} coincide")));
                }
            }
        }
    }
    let mut out = [TetFlattening::new(Complex64::new(0.5, 0.0), 0, 0); 5];
    for (i, slot) in out.iter_mut().enumerate() {
        let v: Vec<usize> = (0..5).filter(|&j| j != i).collect();
        let l1 = log_cross_ratio(points, [v[0], v[1], v[2], v[3]]);
        let l2 = log_cross_ratio(points, [v[0], v[2], v[3], v[1]]);
        let l3 = log_cross_ratio(points, [v[0], v[3], v[1], v[2]]);
        if (l1 + l2 + l3 - I_PI).norm() > 1e-9 {
            return Err(DilogError::ConfigRejected(format!("iπ-sum fails on sub-tetrahedron {i}")));
        }
        let z = l1.exp();
        let p = ((l1 - principal_log(z)).im / (2.0 * PI)).round() as i64;
        let q = ((l2 + principal_log(1.0 - z)).im / (2.0 * PI)).round() as i64;
        let f = TetFlattening::new(z, p, q);
        if (f.l1() - l1).norm() > 1e-9 || (f.l2() - l2).norm() > 1e-9 {
            return Err(DilogError::ConfigRejected(format!("sub-tetrahedron {i} has no consistent lift")));
        }
        *slot = f;
    }
    Ok(out)
}

/// `Σ (−1)ⁱ cs(Δᵢ)` over the five sub-tetrahedra, expected to vanish mod ℤ.
pub fn five_term_config_residual(points: &[Point; 5]) -> Result<CSValue, DilogError> {
    let mut total = CSValue::zero();
    for (i, f) in config_flattenings(points)?.iter().enumerate() {
        let cs = cs_tet(f)?;
        total += if i % 2 == 0 { cs } else { -cs };
    }
    Ok(total)
}
