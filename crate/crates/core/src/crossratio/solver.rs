//! Damped Gauss–Newton with seeded random restarts.
//!
//! Edge relations of a cusped triangulation are never independent, so the
//! Jacobian is rank-deficient even at regular points. Each step is the
//! minimum-norm least-squares solution from a singular value decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{is_degenerate, CrossRatioError, GluingSystem, ShapeAssignment};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Target for the largest residual modulus.
    pub tolerance: f64,
    /// Factor applied to the step on each halving.
    pub damping: f64,
    pub max_halvings: usize,
    /// Random starts tried after the given initial point.
    pub restarts: usize,
    pub seed: u64,
    /// A converged point closer than this to 0 or 1, or larger than its
    /// reciprocal, is a degenerate limit and counts as a failed start.
    pub degeneracy_margin: f64,
    /// Orientation sign of every tetrahedron; restarts first draw shapes
    /// with `sign · Im z < 0` and then the mirror half-plane.
    pub orientation: Vec<i32>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 100,
            tolerance: 1e-12,
            damping: 0.5,
            max_halvings: 30,
            restarts: 8,
            seed: 0,
            degeneracy_margin: 1e-6,
            orientation: Vec::new(),
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), CrossRatioError> {
        if !(self.tolerance > 0.0) {
            return Err(CrossRatioError::Config("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(CrossRatioError::Config("at least one iteration is required".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(CrossRatioError::Config("damping must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// A converged start.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub shapes: ShapeAssignment,
    pub max_residual: f64,
    pub iterations: usize,
    /// 0 for the supplied initial point, then restarts in order.
    pub start: usize,
    /// Every `sign · Im z` is non-zero with one common sign.
    pub consistent_sign: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    /// Distinct converged solutions in start order.
    pub solutions: Vec<Solution>,
    /// Index into `solutions` of the reported solution.
    pub primary: usize,
    pub starts: usize,
}

impl SolveOutcome {
    pub fn primary(&self) -> &Solution {
        &self.solutions[self.primary]
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn sum_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

enum StartResult {
    Converged(Solution),
    Failed { residual: f64 },
    Degenerate,
    RankDeficient(CrossRatioError),
}

fn newton(system: &GluingSystem, start: usize, initial: Vec<Complex64>, cfg: &SolverConfig) -> StartResult {
    let mut z = initial;
    let mut res = system.residuals(&z);
    let n = system.num_tets;
    let m = system.num_relations();
    for iteration in 0..=cfg.max_iterations {
        let current = max_norm(&res);
        if current < cfg.tolerance {
            if z.iter().any(|&zi| near_degenerate(zi, cfg.degeneracy_margin)) {
                return StartResult::Degenerate;
            }
            return StartResult::Converged(Solution {
                consistent_sign: consistent_sign(&z, &cfg.orientation),
                shapes: ShapeAssignment(z),
                max_residual: current,
                iterations: iteration,
                start,
            });
        }
        if iteration == cfg.max_iterations || m == 0 {
            break;
        }
        let jac = system.jacobian(&z);
        let a = DMatrix::from_fn(m, n, |i, j| jac[i][j]);
        let b = DVector::from_iterator(m, res.iter().map(|r| -r));
        let svd = a.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-12;
        let step = match svd.solve(&b, cutoff) {
            Ok(s) => s,
            Err(_) => return StartResult::Failed { residual: current },
        };
        if step.iter().all(|s| s.norm() == 0.0) || !step.iter().all(|s| s.is_finite()) {
            return StartResult::RankDeficient(CrossRatioError::RankDeficient {
                iteration,
                residual: current,
                shapes: z,
            });
        }
        let base = sum_sq(&res);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(zi, si)| zi + si * lambda).collect();
            if !trial.iter().any(|&t| is_degenerate(t)) {
                let trial_res = system.residuals(&trial);
                if sum_sq(&trial_res) < base {
                    accepted = Some((trial, trial_res));
                    break;
                }
            }
            lambda *= cfg.damping;
        }
        match accepted {
            Some((next, next_res)) => {
                z = next;
                res = next_res;
            }
            None => return StartResult::Failed { residual: current },
        }
    }
    StartResult::Failed { residual: max_norm(&res) }
}

fn near_degenerate(z: Complex64, margin: f64) -> bool {
    z.norm() < margin || (z - 1.0).norm() < margin || z.norm() > 1.0 / margin
}

fn consistent_sign(z: &[Complex64], orientation: &[i32]) -> bool {
    let signs: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(t, zt)| zt.im * f64::from(orientation.get(t).copied().unwrap_or(1)))
        .collect();
    signs.iter().all(|s| *s < -1e-9) || signs.iter().all(|s| *s > 1e-9)
}

/// Seeded starting points. Restart `k` lives in the half-plane with
/// `sign · Im z < 0` for even `k` and the mirror one for odd `k`.
fn restart_point(cfg: &SolverConfig, n: usize, k: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(k as u64);
    let mirror = if k % 2 == 0 { -1.0 } else { 1.0 };
    (0..n)
        .map(|t| {
            let sign = f64::from(cfg.orientation.get(t).copied().unwrap_or(1));
            let re = rng.gen_range(-1.0..2.0);
            let im = rng.gen_range(0.2..1.5);
            Complex64::new(re, mirror * sign * im)
        })
        .collect()
}

/// Solves the gluing system from `initial`, then from `cfg.restarts` seeded
/// random points.
///
/// The primary solution is the first (by start index) whose shapes all lie
/// in one orientation-adjusted half-plane; failing that, the one with the
/// smallest residual.
pub fn solve_gluing(
    system: &GluingSystem,
    initial: &ShapeAssignment,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, CrossRatioError> {
    cfg.validate()?;
    system.check_shapes(initial.as_slice())?;
    let n = system.num_tets;
    let starts: Vec<Vec<Complex64>> = std::iter::once(initial.as_slice().to_vec())
        .chain((0..cfg.restarts).map(|k| restart_point(cfg, n, k)))
        .collect();
    let results: Vec<StartResult> = starts
        .into_par_iter()
        .enumerate()
        .map(|(k, z0)| newton(system, k, z0, cfg))
        .collect();

    let mut solutions: Vec<Solution> = Vec::new();
    let mut best_failure = f64::INFINITY;
    let mut degenerate_limits = 0;
    let mut rank_error = None;
    for r in results {
        match r {
            StartResult::Converged(sol) => {
                let duplicate = solutions.iter().any(|s| {
                    s.shapes
                        .as_slice()
                        .iter()
                        .zip(sol.shapes.as_slice())
                        .all(|(a, b)| (a - b).norm() < 1e-8)
                });
                if !duplicate {
                    solutions.push(sol);
                }
            }
            StartResult::Failed { residual } => best_failure = best_failure.min(residual),
            StartResult::Degenerate => degenerate_limits += 1,
            StartResult::RankDeficient(e) => {
                if rank_error.is_none() {
                    rank_error = Some(e);
                }
            }
        }
    }
    if solutions.is_empty() {
        // A singular start is only reported when nothing else got close.
        if let Some(CrossRatioError::RankDeficient { residual, .. }) = &rank_error {
            if *residual <= best_failure {
                return Err(rank_error.unwrap());
            }
        }
        return Err(CrossRatioError::NonConvergence {
            starts: cfg.restarts + 1,
            best_residual: best_failure,
            degenerate_limits,
        });
    }
    let primary = solutions.iter().position(|s| s.consistent_sign).unwrap_or_else(|| {
        let mut best = 0;
        for (i, s) in solutions.iter().enumerate() {
            if s.max_residual < solutions[best].max_residual {
                best = i;
            }
        }
        best
    });
    Ok(SolveOutcome {
        solutions,
        primary,
        starts: cfg.restarts + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossratio::{Factor, Relation};
    use crate::triangulation::Ordering;

    fn toy_system(relation: Relation) -> GluingSystem {
        GluingSystem {
            num_tets: 1,
            edges: vec![relation],
            extra: Vec::new(),
        }
    }

    #[test]
    fn solves_a_one_variable_relation() {
        // z · (1 − 1/z) = z − 1 = 1 gives z = 2.
        let system = toy_system(Relation {
            name: "toy".into(),
            factors: vec![
                Factor { tet: 0, ordering: Ordering([0, 1, 2, 3]), power: 1 },
                Factor { tet: 0, ordering: Ordering([0, 3, 1, 2]), power: 1 },
            ],
            constant: 1.0,
        });
        let initial = ShapeAssignment::new(vec![Complex64::new(1.5, 0.3)]).unwrap();
        let out = solve_gluing(&system, &initial, &SolverConfig::default()).unwrap();
        assert!((out.primary().shapes.get(0) - 2.0).norm() < 1e-12);
    }

    #[test]
    fn fixed_point_needs_no_iterations() {
        let system = toy_system(Relation {
            name: "toy".into(),
            factors: vec![
                Factor { tet: 0, ordering: Ordering([0, 1, 2, 3]), power: 1 },
                Factor { tet: 0, ordering: Ordering([0, 3, 1, 2]), power: 1 },
            ],
            constant: 1.0,
        });
        let initial = ShapeAssignment::new(vec![Complex64::new(2.0, 0.0)]).unwrap();
        let cfg = SolverConfig { restarts: 0, ..Default::default() };
        let out = solve_gluing(&system, &initial, &cfg).unwrap();
        assert_eq!(out.primary().iterations, 0);
        assert_eq!(out.primary().shapes, initial);
    }

    #[test]
    fn impossible_relation_does_not_converge() {
        // X = z = 1 has no admissible solution.
        let system = toy_system(Relation {
            name: "toy".into(),
            factors: vec![Factor { tet: 0, ordering: Ordering([0, 1, 2, 3]), power: 1 }],
            constant: 1.0,
        });
        let initial = ShapeAssignment::new(vec![Complex64::new(0.3, 0.4)]).unwrap();
        assert!(solve_gluing(&system, &initial, &SolverConfig::default()).is_err());
    }

    #[test]
    fn escape_to_infinity_is_not_convergence() {
        // z/(z−1) = 1 is only met in the limit z → ∞.
        let system = toy_system(Relation {
            name: "toy".into(),
            factors: vec![
                Factor { tet: 0, ordering: Ordering([0, 1, 2, 3]), power: 1 },
                Factor { tet: 0, ordering: Ordering([0, 2, 3, 1]), power: 1 },
            ],
            constant: -1.0,
        });
        let initial = ShapeAssignment::new(vec![Complex64::new(0.3, 0.4)]).unwrap();
        let cfg = SolverConfig { restarts: 2, ..Default::default() };
        match solve_gluing(&system, &initial, &cfg) {
            Err(CrossRatioError::NonConvergence { degenerate_limits, .. }) => assert!(degenerate_limits > 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let system = toy_system(Relation { name: "t".into(), factors: vec![], constant: 1.0 });
        let initial = ShapeAssignment::new(vec![Complex64::new(0.3, 0.4)]).unwrap();
        let cfg = SolverConfig { tolerance: 0.0, ..Default::default() };
        assert!(matches!(solve_gluing(&system, &initial, &cfg), Err(CrossRatioError::Config(_))));
    }

    #[test]
    fn restarts_are_deterministic() {
        let cfg = SolverConfig { seed: 7, orientation: vec![1, -1], ..Default::default() };
        assert_eq!(restart_point(&cfg, 2, 3), restart_point(&cfg, 2, 3));
        assert_ne!(restart_point(&cfg, 2, 2), restart_point(&cfg, 2, 3));
    }
}
