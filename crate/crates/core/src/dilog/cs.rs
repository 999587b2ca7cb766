//! Chern–Simons contribution of a flattened tetrahedron and of a whole
//! flattened triangulation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{li2, CSValue, DilogError};
use crate::crossratio::is_degenerate;
use crate::flattening::{principal_log, Flattening, TetFlattening, I_PI, TWO_PI_I};

/// `(l₂ δl₁ − l₁ δl₂ − iπ δl₁) / 8π²`.
pub fn cs_differential(f: &TetFlattening, dl1: Complex64, dl2: Complex64) -> Complex64 {
    (f.l2() * dl1 - f.l1() * dl2 - I_PI * dl1) / (8.0 * PI * PI)
}

/// The Chern–Simons value of one flattened tetrahedron, modulo ℤ.
///
/// With `l₁ = Log z + 2πi·p` and `l₂ = −Log(1−z) + 2πi·q`:
///
/// `cs = [Li₂(z) − ½ l₁ l₂ + 2πi·q·Log z − (iπ/2) l₁] / 4π² − 1/24`.
///
/// Its differential is [`cs_differential`], and on `z = 1/u`, `p = 0`,
/// `q = 1` with `u ∈ (0, 1)` it equals `H(u)`.
pub fn cs_tet(f: &TetFlattening) -> Result<CSValue, DilogError> {
    if is_degenerate(f.z) {
        return Err(DilogError::DegenerateShape { tet: 0, z: f.z });
    }
    let (l1, l2) = (f.l1(), f.l2());
    let q = f.q as f64;
    let value = li2(f.z) - 0.5 * l1 * l2 + TWO_PI_I * q * principal_log(f.z) - 0.5 * I_PI * l1;
    Ok(CSValue::new(value / (4.0 * PI * PI) - 1.0 / 24.0))
}

/// `Σ sign_t · cs_tet(f_t)`; gluing contributes no extra terms.
pub fn cs_total(f: &Flattening, signs: &[i32]) -> Result<CSValue, DilogError> {
    let mut total = CSValue::zero();
    for (tet, tf) in f.tets.iter().enumerate() {
        let value = cs_tet(tf).map_err(|_| DilogError::DegenerateShape { tet, z: tf.z })?;
        let sign = signs.get(tet).copied().unwrap_or(1);
        total += if sign < 0 { -value } else { value };
    }
    Ok(total)
}
