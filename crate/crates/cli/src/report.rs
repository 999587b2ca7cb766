//! The JSON run report.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

/// A float printed with 17 significant digits; non-finite values become
/// `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        let number: serde_json::Number = text.parse().map_err(serde::ser::Error::custom)?;
        number.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: Real,
    pub im: Real,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue {
            re: Real(z.re),
            im: Real(z.im),
        }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re.0, z.im.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cusp {
    pub euler_characteristic: i64,
    pub kind: String,
    pub triangles: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub tetrahedra: usize,
    pub edges: usize,
    pub boundary: Vec<Cusp>,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingInfo {
    pub source: String,
    /// Per edge class, whether it runs along its reference direction.
    pub directions: Vec<bool>,
    /// Per tetrahedron, the vertex labels in increasing branching order.
    pub orders: Vec<[u8; 4]>,
    pub signs: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub starts: usize,
    pub solutions_found: usize,
    pub primary_start: usize,
    pub iterations: usize,
    pub max_residual: Real,
    pub consistent_sign: bool,
    pub completeness_relations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetFlatteningEntry {
    pub tet: usize,
    pub p: i64,
    pub q: i64,
    pub sigma: u8,
    pub l1: ComplexValue,
    pub l2: ComplexValue,
    pub l3: ComplexValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetCs {
    pub tet: usize,
    pub sign: i32,
    pub value: ComplexValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsSummary {
    pub per_tet: Vec<TetCs>,
    /// Real part reduced into `[0, 1)`.
    pub total: ComplexValue,
    /// `4π²·|Im(total)|`, the hyperbolic volume at a geometric solution.
    pub volume: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeripheralEntry {
    pub name: String,
    pub steps: usize,
    pub log_holonomy: ComplexValue,
    pub form: String,
    pub trace: ComplexValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub relation: String,
    pub residual: Real,
    pub tolerance: Real,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub exit_code: i32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub input: InputDigest,
    pub seed: u64,
    pub census: Option<Census>,
    pub branching: Option<BranchingInfo>,
    pub solver: Option<SolverSummary>,
    pub shapes: Vec<ComplexValue>,
    pub flattening: Vec<TetFlatteningEntry>,
    pub cs: Option<CsSummary>,
    pub peripheral: Vec<PeripheralEntry>,
    pub verification: Vec<Check>,
    pub status: Status,
}

impl RunReport {
    pub fn new(command: &str, input: InputDigest, seed: u64) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            seed,
            census: None,
            branching: None,
            solver: None,
            shapes: Vec::new(),
            flattening: Vec::new(),
            cs: None,
            peripheral: Vec::new(),
            verification: Vec::new(),
            status: Status {
                exit_code: 0,
                message: "ok".into(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.verification.iter().find(|c| !c.passed)
    }
}
