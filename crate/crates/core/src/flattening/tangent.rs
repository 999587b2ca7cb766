//! Tangent vectors to the space of flattenings.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::solve::lift_coefficients;
use super::{Flattening, TetFlattening};
use crate::crossratio::{classify, Param};
use crate::triangulation::{BranchedTriangulation, Ordering};

/// `(δl₁, δl₂)` per tetrahedron; `δl₃ = −δl₁ − δl₂`.
#[derive(Clone, PartialEq, Debug)]
pub struct TangentFlattening {
    pub deltas: Vec<(Complex64, Complex64)>,
}

impl TangentFlattening {
    pub fn zero(num_tets: usize) -> Self {
        TangentFlattening {
            deltas: vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); num_tets],
        }
    }

    /// Tangent at the ordering: the sign of the expansion times `δl_j`, with
    /// no 2πi offsets.
    pub fn value(&self, tet: usize, ordering: Ordering) -> Complex64 {
        let e = classify(ordering);
        let (d1, d2) = self.deltas[tet];
        let d = match e.param {
            Param::L1 => d1,
            Param::L2 => d2,
            Param::L3 => -d1 - d2,
        };
        d * f64::from(e.sign)
    }

    /// The direction keeping `exp(l₂) = 1/(1 − exp(l₁))`: `δl₂ = z/(1−z)·δl₁`.
    pub fn along_shape(f: &TetFlattening, dl1: Complex64) -> (Complex64, Complex64) {
        (dl1, dl1 * f.z / (1.0 - f.z))
    }
}

/// Linearized edge sums in the per-tetrahedron coordinate `w_t = δl₁`:
/// row `e` is `Σ_t (a_p + a_q·z_t/(1−z_t)) w_t`.
pub fn tangent_edge_matrix(bt: &BranchedTriangulation, f: &Flattening) -> DMatrix<Complex64> {
    let classes: Vec<usize> = (0..bt.edges.len()).filter(|&c| bt.edges[c].closed).collect();
    let n = bt.num_tets();
    let mut m = DMatrix::from_element(classes.len(), n, Complex64::new(0.0, 0.0));
    for (row, &class) in classes.iter().enumerate() {
        for (tet, ordering) in bt.rank_star(class) {
            let e = classify(ordering);
            let (cp, cq) = lift_coefficients(e.param, e.sign);
            let z = f.tets[tet].z;
            m[(row, tet)] += Complex64::new(cp as f64, 0.0) + z / (1.0 - z) * cq as f64;
        }
    }
    m
}

/// A seeded random tangent satisfying every linearized edge sum.
///
/// The kernel of the linearized system is read off a singular value
/// decomposition; a zero tangent is returned when the kernel is trivial.
pub fn random_tangent(bt: &BranchedTriangulation, f: &Flattening, seed: u64) -> TangentFlattening {
    let n = bt.num_tets();
    if n == 0 {
        return TangentFlattening::zero(0);
    }
    let m = tangent_edge_matrix(bt, f);
    // Pad to a square matrix so the full right singular basis is available.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::from_element(rows, n, Complex64::new(0.0, 0.0));
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(&m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let scale = svd.singular_values.max().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-9 * scale {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for (t, wt) in w.iter_mut().enumerate() {
            // Rows of Vᴴ are conjugated kernel vectors.
            *wt += c * v_t[(k, t)].conj();
        }
    }
    TangentFlattening {
        deltas: f.tets.iter().zip(&w).map(|(tf, &wt)| TangentFlattening::along_shape(tf, wt)).collect(),
    }
}
