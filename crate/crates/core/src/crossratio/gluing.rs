//! Edge relations (and any extra multiplicative relations) as products of
//! cross-ratio factors.

use num_complex::Complex64;

use super::{classify, is_degenerate, CrossRatioError, ShapeAssignment};
use crate::triangulation::{BranchedTriangulation, Ordering};

/// `X_tet(ordering)^power`, ordering in rank coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Factor {
    pub tet: usize,
    pub ordering: Ordering,
    pub power: i32,
}

/// The relation `constant · ∏ factors = 1`, with `constant = ±1`.
#[derive(Clone, PartialEq, Debug)]
pub struct Relation {
    pub name: String,
    pub factors: Vec<Factor>,
    pub constant: f64,
}

impl Relation {
    pub fn product(&self, shapes: &[Complex64]) -> Complex64 {
        self.factors.iter().fold(Complex64::new(self.constant, 0.0), |acc, f| {
            let e = classify(f.ordering);
            acc * e.param.cross_ratio(shapes[f.tet]).powi(e.sign * f.power)
        })
    }

    pub fn residual(&self, shapes: &[Complex64]) -> Complex64 {
        self.product(shapes) - 1.0
    }

    /// Gradient of the residual with respect to every shape.
    fn gradient(&self, shapes: &[Complex64], out: &mut [Complex64]) {
        let product = self.product(shapes);
        for f in &self.factors {
            let e = classify(f.ordering);
            out[f.tet] += product * e.param.log_derivative(shapes[f.tet]) * f64::from(e.sign * f.power);
        }
    }
}

/// All relations a shape assignment must satisfy: one per edge class plus
/// optional extra relations (for example cusp completeness).
#[derive(Clone, PartialEq, Debug)]
pub struct GluingSystem {
    pub num_tets: usize,
    pub edges: Vec<Relation>,
    pub extra: Vec<Relation>,
}

/// One relation per edge class, factors in star order.
pub fn build_gluing_system(bt: &BranchedTriangulation) -> GluingSystem {
    let edges = (0..bt.edges.len())
        .map(|class| Relation {
            name: format!("edge {class}"),
            factors: bt
                .rank_star(class)
                .into_iter()
                .map(|(tet, ordering)| Factor { tet, ordering, power: 1 })
                .collect(),
            constant: 1.0,
        })
        .collect();
    GluingSystem {
        num_tets: bt.num_tets(),
        edges,
        extra: Vec::new(),
    }
}

impl GluingSystem {
    pub fn with_extra(mut self, extra: Vec<Relation>) -> Self {
        self.extra = extra;
        self
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.edges.iter().chain(&self.extra)
    }

    pub fn num_relations(&self) -> usize {
        self.edges.len() + self.extra.len()
    }

    /// Residuals of every relation, edges first.
    pub fn residuals(&self, shapes: &[Complex64]) -> Vec<Complex64> {
        self.relations().map(|r| r.residual(shapes)).collect()
    }

    /// Analytic Jacobian, row-major: `jac[row][tet]`.
    pub fn jacobian(&self, shapes: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.relations()
            .map(|r| {
                let mut row = vec![Complex64::new(0.0, 0.0); self.num_tets];
                r.gradient(shapes, &mut row);
                row
            })
            .collect()
    }

    pub fn check_shapes(&self, shapes: &[Complex64]) -> Result<(), CrossRatioError> {
        if shapes.len() != self.num_tets {
            return Err(CrossRatioError::LengthMismatch {
                expected: self.num_tets,
                found: shapes.len(),
            });
        }
        match shapes.iter().position(|&z| is_degenerate(z)) {
            Some(tet) => Err(CrossRatioError::DegenerateShape { tet, z: shapes[tet] }),
            None => Ok(()),
        }
    }
}

/// Per edge class, `∏ factors − 1`.
pub fn edge_residuals(system: &GluingSystem, shapes: &ShapeAssignment) -> Result<Vec<Complex64>, CrossRatioError> {
    system.check_shapes(shapes.as_slice())?;
    Ok(system.edges.iter().map(|r| r.residual(shapes.as_slice())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossratio::expand_cross_ratio;
    use crate::triangulation::{figure_eight, BranchedTriangulation};
    use std::f64::consts::PI;

    fn fig8() -> BranchedTriangulation {
        BranchedTriangulation::auto(figure_eight()).unwrap()
    }

    /// Shapes from the conventional coordinates `u = X_A(xyzt)`, `v = X_B(xyzt)`.
    fn from_uv(u: Complex64, v: Complex64) -> Vec<Complex64> {
        vec![u / (u - 1.0), 1.0 / (1.0 - v)]
    }

    #[test]
    fn uv_dictionary_matches_letters() {
        let bt = fig8();
        let (u, v) = (Complex64::new(0.3, 0.9), Complex64::new(-0.4, 0.2));
        let z = from_uv(u, v);
        // Letters x=0 y=1 z=3 t=2; xyzt in labels is 0 1 3 2.
        let xyzt = Ordering([0, 1, 3, 2]);
        for (tet, want) in [(0, u), (1, v)] {
            let ranks = bt.branching.to_ranks(tet, xyzt);
            assert!((expand_cross_ratio(z[tet], ranks) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn figure_eight_has_two_six_factor_relations() {
        let system = build_gluing_system(&fig8());
        assert_eq!(system.edges.len(), 2);
        assert!(system.edges.iter().all(|r| r.factors.len() == 6));
    }

    #[test]
    fn figure_eight_relations_reduce_to_the_uv_curve() {
        let system = build_gluing_system(&fig8());
        for (re_u, im_u, re_v, im_v) in [(0.3, 0.9, -0.4, 0.2), (2.0, -1.0, 0.5, 0.5), (-1.5, 0.1, 3.0, 2.0)] {
            let (u, v) = (Complex64::new(re_u, im_u), Complex64::new(re_v, im_v));
            let reduced = u * v / ((1.0 - u).powi(2) * (1.0 - v).powi(2));
            let shapes = from_uv(u, v);
            for r in &system.edges {
                let p = r.product(&shapes);
                let ok = (p - reduced).norm() < 1e-10 * reduced.norm() || (p * reduced - 1.0).norm() < 1e-10;
                assert!(ok, "edge product {p} vs {reduced}");
            }
        }
    }

    #[test]
    fn residuals_at_the_complete_structure_vanish() {
        let system = build_gluing_system(&fig8());
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let shapes = ShapeAssignment::new(from_uv(w, w)).unwrap();
        for r in edge_residuals(&system, &shapes).unwrap() {
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn residual_at_u_v_two_matches_reduced_relation() {
        // uv − (1−u)²(1−v)² = 4 − 1 = 3 at u = v = 2, so the edge products
        // are uv/((1−u)²(1−v)²) = 4 or its inverse.
        let system = build_gluing_system(&fig8());
        let two = Complex64::new(2.0, 0.0);
        let shapes = ShapeAssignment::new(from_uv(two, two)).unwrap();
        let res = edge_residuals(&system, &shapes).unwrap();
        for r in res {
            let p = r + 1.0;
            assert!((p - 4.0).norm() < 1e-12 || (p - 0.25).norm() < 1e-12, "{p}");
        }
    }

    #[test]
    fn inverse_pair_star_has_zero_residual() {
        let relation = Relation {
            name: "toy".into(),
            factors: vec![
                Factor { tet: 0, ordering: Ordering([0, 1, 2, 3]), power: 1 },
                Factor { tet: 0, ordering: Ordering([1, 0, 2, 3]), power: 1 },
            ],
            constant: 1.0,
        };
        for z in [Complex64::new(0.2, 0.3), Complex64::new(-4.0, 1.0)] {
            assert!(relation.residual(&[z]).norm() < 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let system = build_gluing_system(&fig8());
        let shapes = vec![Complex64::new(0.4, -0.7), Complex64::new(1.3, 0.6)];
        let jac = system.jacobian(&shapes);
        let h = 1e-6;
        for tet in 0..2 {
            let mut plus = shapes.clone();
            let mut minus = shapes.clone();
            plus[tet] += h;
            minus[tet] -= h;
            let (rp, rm) = (system.residuals(&plus), system.residuals(&minus));
            for row in 0..jac.len() {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!((fd - jac[row][tet]).norm() <= 1e-6 * jac[row][tet].norm().max(1.0));
            }
        }
    }
}
