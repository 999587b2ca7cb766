//! The end-to-end run: parse, branch, solve, flatten, verify and sum.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use csvol_core::crossratio::{
    build_gluing_system, expand_cross_ratio, parse_shapes_file, solve_gluing, CrossRatioError, GluingSystem,
    ShapeAssignment, SolverConfig,
};
use csvol_core::dilog::{cs_differential, cs_tet, cs_total, five_term_residual};
use csvol_core::flattening::{
    edge_flattening_residuals, parse_flat_file, solve_flattening, Flattening, FlatteningError, TetFlattening,
};
use csvol_core::holonomy::{
    build_lifted_cocycle, completeness_relation, cusp_basis, fundamental_representation, parse_paths, path_holonomy,
    peripheral_form, peripheral_log_holonomy, verify_cells, BoundaryPath, CellKind, LiftedCocycle,
};
use csvol_core::triangulation::{
    boundary_components, edge_classes, parse_branching, parse_triangulation, BranchedTriangulation, Ordering,
    Triangulation,
};

use crate::report::{
    BranchingInfo, Census, Check, CsSummary, Cusp, InputDigest, PeripheralEntry, Real, RunReport, SolverSummary,
    Status, TetCs, TetFlatteningEntry,
};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_NO_INTEGER_SOLUTION: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

/// Tolerance for every relation checked after the solve.
pub const RELATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Info,
    Cs,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Cs => "cs",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Branching file; `None` searches for one.
    pub branching: Option<PathBuf>,
    pub seed: u64,
    /// Gluing solver tolerance.
    pub tol: f64,
    pub paths: Option<PathBuf>,
    /// Flattening file used instead of solving.
    pub flattening: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            branching: None,
            seed: 0,
            tol: 1e-12,
            paths: None,
            flattening: None,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    fail(EXIT_INPUT, format!("{}: {e}", path.display()))
}

/// Runs `command` on the triangulation file; failures are recorded in the
/// report's status.
pub fn run(command: Command, file: &Path, opts: &RunOptions) -> RunReport {
    let bytes = fs::read(file).unwrap_or_default();
    let digest = InputDigest {
        path: file.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    let mut report = RunReport::new(command.name(), digest, opts.seed);
    if let Err(f) = drive(command, file, opts, &mut report) {
        report.status = Status {
            exit_code: f.code,
            message: f.message,
        };
    }
    report
}

fn census(tri: &Triangulation) -> Result<Census, String> {
    let edges = edge_classes(tri).map_err(|e| e.to_string())?;
    let boundary: Vec<Cusp> = boundary_components(tri)
        .into_iter()
        .map(|b| Cusp {
            euler_characteristic: b.euler_characteristic,
            kind: match b.euler_characteristic {
                0 => "torus".into(),
                2 => "sphere".into(),
                chi => format!("genus {}", (2 - chi) / 2),
            },
            triangles: b.triangles,
        })
        .collect();
    let plural = |n: usize| if n == 1 { "" } else { "s" };
    let tori = boundary.iter().filter(|c| c.kind == "torus").count();
    let tets = if tri.num_tets() == 1 { "tetrahedron" } else { "tetrahedra" };
    let mut summary = format!(
        "{} {tets}, {} edge{}, {tori} torus cusp{}",
        tri.num_tets(),
        edges.len(),
        plural(edges.len()),
        plural(tori)
    );
    let others = boundary.len() - tori;
    if others > 0 {
        summary.push_str(&format!(", {others} other boundary component{}", plural(others)));
    }
    Ok(Census {
        tetrahedra: tri.num_tets(),
        edges: edges.len(),
        boundary,
        summary,
    })
}

fn drive(command: Command, file: &Path, opts: &RunOptions, report: &mut RunReport) -> Result<(), Failure> {
    let text = read(file)?;
    let tri = parse_triangulation(&text).map_err(|e| input_error(file, e))?;
    report.census = Some(census(&tri).map_err(|e| input_error(file, e))?);
    if command == Command::Info {
        return Ok(());
    }

    let (bt, source) = match &opts.branching {
        Some(path) => {
            let branching = parse_branching(&read(path)?, &tri).map_err(|e| input_error(path, e))?;
            let bt = BranchedTriangulation::new(tri, branching).map_err(|e| input_error(path, e))?;
            (bt, path.display().to_string())
        }
        None => (BranchedTriangulation::auto(tri).map_err(|e| input_error(file, e))?, "auto".into()),
    };
    let n = bt.num_tets();
    let signs: Vec<i32> = (0..n).map(|t| bt.sign(t)).collect();
    report.branching = Some(BranchingInfo {
        source,
        directions: bt.branching.directions().to_vec(),
        orders: (0..n).map(|t| bt.branching.order(t)).collect(),
        signs: signs.clone(),
    });

    let paths = match &opts.paths {
        Some(path) => parse_paths(&read(path)?, &bt).map_err(|e| input_error(path, e))?,
        None => cusp_basis(&bt)
            .map(|cusps| cusps.into_iter().flat_map(|c| c.loops).collect())
            .unwrap_or_default(),
    };

    let edges_only = build_gluing_system(&bt);
    let f = match &opts.flattening {
        Some(path) => load_flattening(path, n)?,
        None => solve(&bt, &paths, &signs, opts, report)?,
    };
    report.shapes = f.shapes().into_iter().map(Into::into).collect();
    report.flattening = f
        .tets
        .iter()
        .enumerate()
        .map(|(tet, t)| TetFlatteningEntry {
            tet,
            p: t.p,
            q: t.q,
            sigma: t.sigma(),
            l1: t.l1().into(),
            l2: t.l2().into(),
            l3: t.l3().into(),
        })
        .collect();

    let cocycle = build_lifted_cocycle(&bt, &f);
    let mut checks = relation_checks(&bt, &f, &edges_only, &cocycle);
    report.peripheral = peripheral(&bt, &f, &cocycle, &paths)?;

    let mut per_tet = Vec::with_capacity(n);
    for (tet, t) in f.tets.iter().enumerate() {
        let value = cs_tet(t).map_err(|e| fail(EXIT_VERIFICATION, e.to_string()))?;
        per_tet.push(TetCs {
            tet,
            sign: signs[tet],
            value: value.value().into(),
        });
    }
    let total = cs_total(&f, &signs).map_err(|e| fail(EXIT_VERIFICATION, e.to_string()))?;
    report.cs = Some(CsSummary {
        per_tet,
        total: total.value().into(),
        volume: Real(4.0 * PI * PI * total.value().im.abs()),
    });

    if command == Command::Verify {
        checks.extend(property_checks(&bt, &f, &cocycle, &paths, opts.seed));
    }
    report.verification = checks;
    if let Some(c) = report.first_failure() {
        return Err(fail(
            EXIT_VERIFICATION,
            format!("{} failed: residual {:e} above {:e}", c.relation, c.residual.0, c.tolerance.0),
        ));
    }
    Ok(())
}

fn load_flattening(path: &Path, n: usize) -> Result<Flattening, Failure> {
    let flat = parse_flat_file(&read(path)?).map_err(|e| input_error(path, e))?;
    let shapes_path = flat
        .shapes_path
        .as_ref()
        .map(|p| path.parent().unwrap_or(Path::new(".")).join(p))
        .ok_or_else(|| input_error(path, "no `shapes` line"))?;
    let shapes = parse_shapes_file(&read(&shapes_path)?).map_err(|e| input_error(&shapes_path, e))?;
    if shapes.len() != n {
        return Err(input_error(&shapes_path, format!("{} shapes for {n} tetrahedra", shapes.len())));
    }
    flat.flattening(&shapes).map_err(|e| input_error(path, e))
}

/// Starting shapes on the orientation-adjusted lower half-plane.
pub fn initial_shapes(signs: &[i32]) -> ShapeAssignment {
    ShapeAssignment::new(signs.iter().map(|&s| Complex64::new(0.5, -0.9 * f64::from(s))).collect())
        .expect("starting shapes are non-degenerate")
}

/// Gluing equations plus one completeness relation per boundary loop.
pub fn geometric_system(bt: &BranchedTriangulation, paths: &[BoundaryPath]) -> GluingSystem {
    build_gluing_system(bt).with_extra(paths.iter().map(completeness_relation).collect())
}

fn solve(
    bt: &BranchedTriangulation,
    paths: &[BoundaryPath],
    signs: &[i32],
    opts: &RunOptions,
    report: &mut RunReport,
) -> Result<Flattening, Failure> {
    let system = geometric_system(bt, paths);
    let cfg = SolverConfig {
        tolerance: opts.tol,
        seed: opts.seed,
        orientation: signs.to_vec(),
        ..SolverConfig::default()
    };
    let outcome = solve_gluing(&system, &initial_shapes(signs), &cfg).map_err(|e| match e {
        CrossRatioError::Config(_) => fail(EXIT_INPUT, e.to_string()),
        _ => fail(EXIT_SOLVER, e.to_string()),
    })?;
    let primary = outcome.primary();
    report.solver = Some(SolverSummary {
        starts: outcome.starts,
        solutions_found: outcome.solutions.len(),
        primary_start: primary.start,
        iterations: primary.iterations,
        max_residual: Real(primary.max_residual),
        consistent_sign: primary.consistent_sign,
        completeness_relations: paths.len(),
    });
    solve_flattening(bt, &primary.shapes).map_err(flattening_failure)
}

/// Shapes off the lattice by more than the guard band mean the gluing
/// solution itself is too inaccurate, a verification failure.
fn flattening_failure(e: FlatteningError) -> Failure {
    let code = match e {
        FlatteningError::NoIntegerSolution { .. } => EXIT_NO_INTEGER_SOLUTION,
        _ => EXIT_VERIFICATION,
    };
    fail(code, e.to_string())
}

fn check(relation: impl Into<String>, residual: f64, tolerance: f64) -> Check {
    Check {
        relation: relation.into(),
        residual: Real(residual),
        tolerance: Real(tolerance),
        passed: residual <= tolerance,
    }
}

fn max_norm(values: impl IntoIterator<Item = Complex64>) -> f64 {
    values.into_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Gluing equations, 2-cell relations and edge sums.
fn relation_checks(
    bt: &BranchedTriangulation,
    f: &Flattening,
    edges_only: &GluingSystem,
    cocycle: &LiftedCocycle,
) -> Vec<Check> {
    let mut checks = vec![check(
        "gluing equations",
        max_norm(edges_only.residuals(&f.shapes())),
        RELATION_TOLERANCE,
    )];
    let cells = verify_cells(cocycle);
    for (kind, name) in [
        (CellKind::Face, "face cell relations"),
        (CellKind::Edge, "edge cell relations"),
        (CellKind::Vertex, "vertex cell relations"),
    ] {
        checks.push(check(name, cells.max_residual(kind), RELATION_TOLERANCE));
    }
    for c in cells.cells.iter().filter(|c| c.kind == CellKind::EdgeStar) {
        checks.push(check(
            format!("edge-star closure, edge class {}", c.index),
            c.residual,
            RELATION_TOLERANCE,
        ));
    }
    for (class, s) in edge_flattening_residuals(bt, f).into_iter().enumerate() {
        if bt.edges[class].closed {
            checks.push(check(
                format!("flattening edge sum, edge class {class}"),
                s.norm(),
                RELATION_TOLERANCE,
            ));
        }
    }
    checks
}

fn peripheral(
    bt: &BranchedTriangulation,
    f: &Flattening,
    cocycle: &LiftedCocycle,
    paths: &[BoundaryPath],
) -> Result<Vec<PeripheralEntry>, Failure> {
    paths
        .iter()
        .map(|p| {
            let err = |e: csvol_core::holonomy::HolonomyError| fail(EXIT_INPUT, format!("path {}: {e}", p.name));
            Ok(PeripheralEntry {
                name: p.name.clone(),
                steps: p.steps.len(),
                log_holonomy: peripheral_log_holonomy(bt, f, p).map_err(err)?.into(),
                form: peripheral_form(bt, p).map_err(err)?.to_string(),
                trace: path_holonomy(cocycle, &p.steps).map_err(err)?.trace().into(),
            })
        })
        .collect()
}

/// The full property suite run by `verify`.
fn property_checks(
    bt: &BranchedTriangulation,
    f: &Flattening,
    cocycle: &LiftedCocycle,
    paths: &[BoundaryPath],
    seed: u64,
) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let expansion = f
        .tets
        .iter()
        .enumerate()
        .flat_map(|(tet, t)| {
            Ordering::all().map(move |o| {
                let x = expand_cross_ratio(t.z, o);
                (f.value(tet, o).exp() - x).norm() / (1.0 + x.norm())
            })
        })
        .fold(0.0, f64::max);
    checks.push(check("flattening expansion", expansion, 1e-12));

    let five_term = (0..20)
        .map(|_| {
            let u: f64 = rng.gen_range(0.01..0.99);
            let v: f64 = rng.gen_range(0.005..u);
            five_term_residual(u, v).map_or(f64::INFINITY, f64::abs)
        })
        .fold(0.0, f64::max);
    checks.push(check("five-term identity", five_term, RELATION_TOLERANCE));

    let derivative = f
        .tets
        .iter()
        .map(|t| {
            let dz = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            derivative_error(t, dz)
        })
        .fold(0.0, f64::max);
    checks.push(check("derivative law", derivative, 1e-5));

    let exponential = paths
        .iter()
        .filter_map(|p| {
            let log = peripheral_log_holonomy(bt, f, p).ok()?;
            let m = path_holonomy(cocycle, &p.steps).ok()?;
            Some((log.exp() - m[(0, 0)]).norm() / (1.0 + m[(0, 0)].norm()))
        })
        .fold(0.0, f64::max);
    checks.push(check("peripheral exponential", exponential, 1e-9));

    if bt.num_tets() > 0 {
        let rep = fundamental_representation(cocycle, 0);
        checks.push(check("fundamental group relations", rep.max_relation_residual(), RELATION_TOLERANCE));
    }
    checks
}

/// Relative error of a central difference of `cs_tet` along `z ↦ z + h·dz`
/// against the closed-form differential.
fn derivative_error(t: &TetFlattening, dz: Complex64) -> f64 {
    let h = 1e-5 * (1.0 + t.z.norm()).min(t.z.norm()).min((1.0 - t.z).norm());
    let at = |s: f64| cs_tet(&TetFlattening::new(t.z + dz * s, t.p, t.q)).map(|v| v.value());
    let (Ok(plus), Ok(minus)) = (at(h), at(-h)) else {
        return f64::INFINITY;
    };
    let mut diff = plus - minus;
    // Undo the mod-ℤ reduction of the real part.
    diff.re -= diff.re.round();
    let numeric = diff / (2.0 * h);
    let exact = cs_differential(t, dz / t.z, dz / (1.0 - t.z));
    (numeric - exact).norm() / exact.norm().max(1e-300)
}
