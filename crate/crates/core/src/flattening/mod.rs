//! Flattenings: logarithms of the cross-ratios satisfying the sign, iπ-sum
//! and edge-sum conditions.
//!
//! Per tetrahedron a flattening is `(z, p, q)` with
//! `l₁ = Log z + 2πi·p`, `l₂ = −Log(1−z) + 2πi·q` and `l₃ = iπ − l₁ − l₂`.
//! Every other ordering is `±l₁`, `±l₂`, `±(l₂ − 2πi)` or `±l₃`.

pub mod lattice;
mod solve;
mod tangent;

pub use solve::{edge_flattening_residuals, edge_system, solve_flattening, EdgeSystem};
pub use tangent::{random_tangent, tangent_edge_matrix, TangentFlattening};

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::crossratio::{classify, is_degenerate, Param, ShapeAssignment};
use crate::triangulation::{parse::significant_lines, Ordering};

pub const I_PI: Complex64 = Complex64::new(0.0, PI);
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatteningError {
    #[error("no integer flattening exists; obstruction on edge equations {obstruction:?}")]
    NoIntegerSolution { obstruction: Vec<i64>, rational: bool },
    #[error("edge {edge}: log sum {value} is not within the guard band of 2πi·ℤ")]
    RoundingAmbiguity { edge: usize, value: Complex64 },
    #[error("degenerate shape {z} on tetrahedron {tet}")]
    DegenerateShape { tet: usize, z: Complex64 },
    #[error("flattening file line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("tetrahedron {tet}: {message}")]
    Inconsistent { tet: usize, message: String },
}

/// Principal logarithm with the cut on `(−∞, 0]` taken from above.
pub fn principal_log(z: Complex64) -> Complex64 {
    let mut w = z.ln();
    if w.im == -PI || (z.im == 0.0 && z.re < 0.0) {
        w.im = PI;
    }
    w
}

/// Flattening of one tetrahedron.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TetFlattening {
    pub z: Complex64,
    pub p: i64,
    pub q: i64,
}

impl TetFlattening {
    pub fn new(z: Complex64, p: i64, q: i64) -> Self {
        TetFlattening { z, p, q }
    }

    pub fn l1(&self) -> Complex64 {
        principal_log(self.z) + TWO_PI_I * self.p as f64
    }

    pub fn l2(&self) -> Complex64 {
        -principal_log(1.0 - self.z) + TWO_PI_I * self.q as f64
    }

    pub fn l3(&self) -> Complex64 {
        I_PI - self.l1() - self.l2()
    }

    pub fn param(&self, param: Param) -> Complex64 {
        match param {
            Param::L1 => self.l1(),
            Param::L2 => self.l2(),
            Param::L3 => self.l3(),
        }
    }

    /// Region bit of `z`: `0` when the principal logs of `z`, `1/(1−z)` and
    /// `1 − 1/z` already sum to `iπ`, `1` when they sum to `−iπ`.
    pub fn sigma(&self) -> u8 {
        let z = self.z;
        let sum = principal_log(z) - principal_log(1.0 - z) + principal_log((z - 1.0) / z);
        if sum.im > 0.0 {
            0
        } else {
            1
        }
    }

    /// The lift integer of `l₃` relative to its principal value.
    pub fn r(&self) -> i64 {
        let principal = principal_log((self.z - 1.0) / self.z);
        ((self.l3() - principal).im / (2.0 * PI)).round() as i64
    }
}

/// Value of the flattening at any of the 24 orderings (rank coordinates).
pub fn expand_flattening(f: &TetFlattening, ordering: Ordering) -> Complex64 {
    let e = classify(ordering);
    (f.param(e.param) + TWO_PI_I * f64::from(e.shift)) * f64::from(e.sign)
}

/// A flattening of every tetrahedron.
#[derive(Clone, PartialEq, Debug)]
pub struct Flattening {
    pub tets: Vec<TetFlattening>,
}

impl Flattening {
    pub fn from_integers(shapes: &ShapeAssignment, lifts: &[(i64, i64)]) -> Self {
        Flattening {
            tets: shapes
                .as_slice()
                .iter()
                .zip(lifts)
                .map(|(&z, &(p, q))| TetFlattening::new(z, p, q))
                .collect(),
        }
    }

    pub fn value(&self, tet: usize, ordering: Ordering) -> Complex64 {
        expand_flattening(&self.tets[tet], ordering)
    }

    pub fn shapes(&self) -> Vec<Complex64> {
        self.tets.iter().map(|t| t.z).collect()
    }

    pub fn shape_assignment(&self) -> ShapeAssignment {
        ShapeAssignment(self.shapes())
    }

    pub fn lifts(&self) -> Vec<(i64, i64)> {
        self.tets.iter().map(|t| (t.p, t.q)).collect()
    }

    /// Serializes as `flat <tet> <p> <q> <sigma>` lines.
    pub fn to_flat_string(&self, shapes_path: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(path) = shapes_path {
            let _ = writeln!(out, "shapes {path}");
        }
        for (tet, f) in self.tets.iter().enumerate() {
            let _ = writeln!(out, "flat {tet} {} {} {}", f.p, f.q, f.sigma());
        }
        out
    }
}

/// Lift integers read from a flattening file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatFile {
    /// `(p, q, sigma)` per tetrahedron.
    pub entries: Vec<(i64, i64, u8)>,
    pub shapes_path: Option<String>,
}

impl FlatFile {
    /// Attaches shapes, checking each recorded `sigma` against the region
    /// of the shape.
    pub fn flattening(&self, shapes: &ShapeAssignment) -> Result<Flattening, FlatteningError> {
        if shapes.len() != self.entries.len() {
            return Err(FlatteningError::Inconsistent {
                tet: shapes.len().min(self.entries.len()),
                message: format!("{} shapes for {} flattening entries", shapes.len(), self.entries.len()),
            });
        }
        let lifts: Vec<(i64, i64)> = self.entries.iter().map(|&(p, q, _)| (p, q)).collect();
        let f = Flattening::from_integers(shapes, &lifts);
        for (tet, (t, &(_, _, sigma))) in f.tets.iter().zip(&self.entries).enumerate() {
            if is_degenerate(t.z) {
                return Err(FlatteningError::DegenerateShape { tet, z: t.z });
            }
            if t.sigma() != sigma {
                return Err(FlatteningError::Inconsistent {
                    tet,
                    message: format!("sigma {sigma} does not match the region of z = {}", t.z),
                });
            }
        }
        Ok(f)
    }
}

pub fn parse_flat_file(text: &str) -> Result<FlatFile, FlatteningError> {
    let syntax = |line, column, message: &str| FlatteningError::Syntax {
        line,
        column,
        message: message.to_string(),
    };
    let mut entries: Vec<Option<(i64, i64, u8)>> = Vec::new();
    let mut shapes_path = None;
    for (line, tokens) in significant_lines(text) {
        let (col, keyword) = tokens[0];
        match keyword {
            "shapes" if tokens.len() == 2 => shapes_path = Some(tokens[1].1.to_string()),
            "flat" if tokens.len() == 5 => {
                let tet: usize = tokens[1]
                    .1
                    .parse()
                    .map_err(|_| syntax(line, tokens[1].0, "expected a tetrahedron index"))?;
                let mut ints = [0i64; 2];
                for (slot, &(c, tok)) in ints.iter_mut().zip(&tokens[2..4]) {
                    *slot = tok.parse().map_err(|_| syntax(line, c, &format!("expected an integer, found `{tok}`")))?;
                }
                let sigma = match tokens[4].1 {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(syntax(line, tokens[4].0, "sigma must be 0 or 1")),
                };
                if entries.len() <= tet {
                    entries.resize(tet + 1, None);
                }
                if entries[tet].is_some() {
                    return Err(syntax(line, tokens[1].0, &format!("tetrahedron {tet} given twice")));
                }
                entries[tet] = Some((ints[0], ints[1], sigma));
            }
            "shapes" | "flat" => return Err(syntax(line, col, "wrong number of fields")),
            _ => return Err(syntax(line, col, &format!("unknown directive `{keyword}`"))),
        }
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(tet, e)| e.ok_or_else(|| syntax(0, 0, &format!("tetrahedron {tet} missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlatFile { entries, shapes_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossratio::expand_cross_ratio;
    use proptest::prelude::*;

    fn ord(s: &str) -> Ordering {
        Ordering::parse(s).unwrap()
    }

    #[test]
    fn first_pair_swap_negates() {
        let f = TetFlattening::new(Complex64::new(0.4, 0.9), 1, -2);
        assert!((expand_flattening(&f, ord("1023")) + f.l1()).norm() < 1e-15);
    }

    #[test]
    fn tyxz_is_l2_minus_two_pi_i() {
        let f = TetFlattening::new(Complex64::new(-0.4, 0.9), 0, 1);
        assert!((expand_flattening(&f, ord("3102")) - (f.l2() - TWO_PI_I)).norm() < 1e-15);
    }

    #[test]
    fn real_branch_exponentiates_correctly() {
        // l₁ = −log u, l₂ = log u − log(1−u) + iπ, l₃ = log(1−u) at z = 1/u.
        let u: f64 = 0.3;
        let f = TetFlattening::new(Complex64::new(1.0 / u, 0.0), 0, 1);
        assert!((f.l1() - Complex64::new(-u.ln(), 0.0)).norm() < 1e-14);
        assert!((f.l2() - Complex64::new(u.ln() - (1.0 - u).ln(), PI)).norm() < 1e-14);
        assert!((f.l3() - Complex64::new((1.0 - u).ln(), 0.0)).norm() < 1e-14);
        for o in Ordering::all() {
            let x = expand_cross_ratio(f.z, o);
            assert!((expand_flattening(&f, o).exp() - x).norm() < 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn principal_log_cut_is_taken_from_above() {
        assert_eq!(principal_log(Complex64::new(-2.0, -0.0)).im, PI);
        assert_eq!(principal_log(Complex64::new(-2.0, 0.0)).im, PI);
    }

    #[test]
    fn sigma_tracks_the_region() {
        // Upper half plane: Log z − Log(1−z) + Log((z−1)/z) = iπ.
        assert_eq!(TetFlattening::new(Complex64::new(0.5, 0.5), 0, 0).sigma(), 0);
        assert_eq!(TetFlattening::new(Complex64::new(0.5, -0.5), 0, 0).sigma(), 1);
    }

    #[test]
    fn flat_file_roundtrip() {
        let shapes = ShapeAssignment::new(vec![Complex64::new(0.5, -0.8), Complex64::new(0.5, 0.8)]).unwrap();
        let f = Flattening::from_integers(&shapes, &[(1, -1), (0, 2)]);
        let text = f.to_flat_string(Some("fig8.shapes"));
        let parsed = parse_flat_file(&text).unwrap();
        assert_eq!(parsed.shapes_path.as_deref(), Some("fig8.shapes"));
        assert_eq!(parsed.flattening(&shapes).unwrap(), f);
        let bad = text.replace("flat 0 1 -1 1", "flat 0 1 -1 0");
        assert!(matches!(
            parse_flat_file(&bad).unwrap().flattening(&shapes),
            Err(FlatteningError::Inconsistent { tet: 0, .. })
        ));
        assert!(matches!(parse_flat_file("flat 0 x 0 0"), Err(FlatteningError::Syntax { line: 1, column: 8, .. })));
    }

    fn shape() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(re, im)| Complex64::new(re, im))
            .prop_filter("non-degenerate", |z| z.norm() > 1e-3 && (z - 1.0).norm() > 1e-3)
    }

    proptest! {
        #[test]
        fn expansion_exponentiates_to_cross_ratio(z in shape(), p in -3i64..=3, q in -3i64..=3, idx in 0usize..24) {
            let f = TetFlattening::new(z, p, q);
            let o = Ordering::from_index(idx);
            let x = expand_cross_ratio(z, o);
            prop_assert!((expand_flattening(&f, o).exp() - x).norm() < 1e-12 * (1.0 + x.norm()));
        }

        #[test]
        fn i_pi_sum_over_increasing_triples(z in shape(), p in -3i64..=3, q in -3i64..=3, x in 0u8..4) {
            let f = TetFlattening::new(z, p, q);
            let rest: Vec<u8> = (0..4).filter(|&v| v != x).collect();
            let (y, zz, t) = (rest[0], rest[1], rest[2]);
            let sum = expand_flattening(&f, Ordering([x, y, zz, t]))
                + expand_flattening(&f, Ordering([x, zz, t, y]))
                + expand_flattening(&f, Ordering([x, t, y, zz]));
            prop_assert!((sum - I_PI).norm() < 1e-12);
        }

        #[test]
        fn double_swap_offsets(z in shape(), p in -3i64..=3, q in -3i64..=3) {
            let f = TetFlattening::new(z, p, q);
            let v = |s: &str| expand_flattening(&f, ord(s));
            // k₁ = 0, k₂ = −1, k₃ = 0 exactly.
            prop_assert_eq!(v("2301"), f.l1());
            prop_assert_eq!(v("3102"), f.l2() - TWO_PI_I);
            prop_assert_eq!(v("1203"), f.l3());
            prop_assert_eq!(v("0123"), -v("1023"));
            prop_assert_eq!(v("0123"), -v("0132"));
        }
    }
}
