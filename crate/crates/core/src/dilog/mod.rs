//! The dilogarithm family and Chern–Simons values of flattened tetrahedra.

mod cs;
mod five_term;

pub use cs::{cs_differential, cs_tet, cs_total};
pub use five_term::{config_flattenings, five_term_config_residual, five_term_residual, Point};

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flattening::principal_log;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DilogError {
    #[error("{function} is defined on (0, 1), got {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("degenerate shape {z} on tetrahedron {tet}")]
    DegenerateShape { tet: usize, z: Complex64 },
    #[error("configuration rejected: {0}")]
    ConfigRejected(String),
}

/// `B₂ₖ / (2k+1)!` for `k = 1, 2, …`.
const BERNOULLI_SERIES: [f64; 18] = [
    0.027777777777777776,
    -0.0002777777777777778,
    4.72411186696901e-06,
    -9.185773074661964e-08,
    1.8978869988971e-09,
    -4.0647616451442256e-11,
    8.921691020456452e-13,
    -1.9939295860721074e-14,
    4.518980029619918e-16,
    -1.0356517612181247e-17,
    2.395218621026187e-19,
    -5.581785874325009e-21,
    1.3091507554183213e-22,
    -3.0874198024267403e-24,
    7.315975652702203e-26,
    -1.740845657234001e-27,
    4.1576356446139e-29,
    -9.962148488284622e-31,
];

const ZETA2: f64 = PI * PI / 6.0;

/// `Li₂(z) = Σ Bₙ wⁿ⁺¹/(n+1)!` with `w = −Log(1−z)`, for `|w| < 2π`.
fn li2_series(z: Complex64) -> Complex64 {
    let w = -principal_log(1.0 - z);
    let w2 = w * w;
    let mut term = w * w2;
    let mut sum = w - w2 * 0.25;
    for c in BERNOULLI_SERIES {
        let next = term * c;
        sum += next;
        if next.norm() < 1e-17 * sum.norm() {
            break;
        }
        term *= w2;
    }
    sum
}

/// The dilogarithm, principal branch.
///
/// On the cut `(1, ∞)` the value is the limit from below, so that
/// `Li₂(z) + Log z·Log(1−z)` stays continuous with principal logs.
pub fn li2(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(ZETA2, 0.0);
    }
    if z.norm_sqr() > 1.0 {
        // Inversion. For real z > 1 the log below reads −z as lying on the
        // upper side of the negative axis, which is the value from below.
        let l = principal_log(-z);
        return -li2(1.0 / z) - ZETA2 - 0.5 * l * l;
    }
    if z.re > 0.5 {
        // Reflection maps into |1 − z| < 1 with Re(1 − z) < 1/2.
        return ZETA2 - principal_log(z) * principal_log(1.0 - z) - li2_series(1.0 - z);
    }
    li2_series(z)
}

/// `R(z) = ½ Log z · Log(1−z) + Li₂(z)`, extended by its limits at 0 and 1.
pub fn rogers_r(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(ZETA2, 0.0);
    }
    0.5 * principal_log(z) * principal_log(1.0 - z) + li2(z)
}

/// `H(u) = (π²/6 − R(u)) / 4π²` for `u ∈ (0, 1)`.
pub fn h(u: f64) -> Result<f64, DilogError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(DilogError::Domain { function: "H", value: u });
    }
    Ok((ZETA2 - rogers_r(Complex64::new(u, 0.0)).re) / (4.0 * PI * PI))
}

/// A complex number modulo ℤ, stored with real part in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Complex64", from = "Complex64")]
pub struct CSValue(Complex64);

impl CSValue {
    pub fn new(value: Complex64) -> Self {
        let mut re = value.re - value.re.floor();
        if re >= 1.0 {
            re = 0.0;
        }
        CSValue(Complex64::new(re, value.im))
    }

    pub fn zero() -> Self {
        CSValue(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Distance in ℂ/ℤ: the real part is compared to the nearest integer.
    pub fn distance(self, other: CSValue) -> f64 {
        let d = self.0 - other.0;
        let re = d.re - d.re.round();
        re.hypot(d.im)
    }
}

impl From<Complex64> for CSValue {
    fn from(value: Complex64) -> Self {
        CSValue::new(value)
    }
}

impl From<CSValue> for Complex64 {
    fn from(value: CSValue) -> Self {
        value.0
    }
}

impl Add for CSValue {
    type Output = CSValue;
    fn add(self, rhs: CSValue) -> CSValue {
        CSValue::new(self.0 + rhs.0)
    }
}

impl AddAssign for CSValue {
    fn add_assign(&mut self, rhs: CSValue) {
        *self = *self + rhs;
    }
}

impl Sub for CSValue {
    type Output = CSValue;
    fn sub(self, rhs: CSValue) -> CSValue {
        CSValue::new(self.0 - rhs.0)
    }
}

impl Neg for CSValue {
    type Output = CSValue;
    fn neg(self) -> CSValue {
        CSValue::new(-self.0)
    }
}

impl std::iter::Sum for CSValue {
    fn sum<I: Iterator<Item = CSValue>>(iter: I) -> CSValue {
        iter.fold(CSValue::zero(), Add::add)
    }
}
