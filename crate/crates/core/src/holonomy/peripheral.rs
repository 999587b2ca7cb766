//! Boundary loops, their logarithmic holonomy and cusp bases.
//!
//! On the boundary the lift is upper triangular, so the upper-left entry of
//! a loop holonomy is the product of the upper-left entries of its steps: an
//! E3 step leaving `v` contributes `exp(−L(v)/2)`, an E2 step `−i` along the
//! branching and `i` against it. The logarithmic holonomy adds `−L(v)/2` and
//! `∓iπ/2` accordingly, which makes hexagons and end disks sum to zero.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use super::{HolonomyError, OrientedEdge};
use crate::crossratio::{classify, Factor, Param, Relation};
use crate::flattening::Flattening;
use crate::triangulation::parse::significant_lines;
use crate::triangulation::{BranchedTriangulation, EdgeType, Ordering};

/// A named loop on the boundary surface.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPath {
    pub name: String,
    pub steps: Vec<OrientedEdge>,
}

impl BoundaryPath {
    pub fn reversed(&self) -> Self {
        BoundaryPath {
            name: format!("{}^-1", self.name),
            steps: self.steps.iter().rev().map(OrientedEdge::reversed).collect(),
        }
    }
}

pub(crate) fn same_vertex(bt: &BranchedTriangulation, a: (usize, Ordering), b: (usize, Ordering)) -> bool {
    a == b || bt.identified_vertex(a.0, a.1) == Some(b)
}

fn check_loop(bt: &BranchedTriangulation, steps: &[OrientedEdge]) -> Result<(), HolonomyError> {
    for (k, e) in steps.iter().enumerate() {
        if e.tet >= bt.num_tets() {
            return Err(HolonomyError::TetOutOfRange { tet: e.tet });
        }
        if e.kind == EdgeType::E1 {
            return Err(HolonomyError::LeavesBoundary { step: k });
        }
        if k > 0 && !same_vertex(bt, steps[k - 1].target(), e.source()) {
            return Err(HolonomyError::Disconnected { step: k });
        }
    }
    if let (Some(first), Some(last)) = (steps.first(), steps.last()) {
        if !same_vertex(bt, last.target(), first.source()) {
            return Err(HolonomyError::NotClosed);
        }
    }
    Ok(())
}

/// `Σ −L(v)/2` over E3 steps plus `∓iπ/2` per E2 step.
pub fn peripheral_log_holonomy(
    bt: &BranchedTriangulation,
    f: &Flattening,
    path: &BoundaryPath,
) -> Result<Complex64, HolonomyError> {
    check_loop(bt, &path.steps)?;
    let half_i_pi = Complex64::new(0.0, PI / 2.0);
    Ok(path
        .steps
        .iter()
        .map(|e| match e.kind {
            EdgeType::E3 => {
                let (tet, v) = e.source();
                -f.value(tet, v) / 2.0
            }
            _ if e.forward => -half_i_pi,
            _ => half_i_pi,
        })
        .sum())
}

/// `(k·iπ + Σ c_{t,j}·l_j(t)) / 2` with integers `k`, `c`: a linear form in
/// the per-tetrahedron logarithms `l₁`, `l₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogForm {
    pub i_pi_halves: i64,
    pub half_coeffs: Vec<[i64; 2]>,
}

impl LogForm {
    pub fn zero(num_tets: usize) -> Self {
        LogForm {
            i_pi_halves: 0,
            half_coeffs: vec![[0, 0]; num_tets],
        }
    }

    /// The form of the single value `L(ordering)` on `tet`.
    pub fn of_value(num_tets: usize, tet: usize, ordering: Ordering) -> Self {
        let mut form = LogForm::zero(num_tets);
        form.add_value(tet, ordering, 2);
        form
    }

    /// Adds `(halves/2) · L(ordering)` where `L = sign·(l_param + 2πi·shift)`.
    fn add_value(&mut self, tet: usize, ordering: Ordering, halves: i64) {
        let e = classify(ordering);
        let s = i64::from(e.sign) * halves;
        // (s/2)·2πi·shift is 2·s·shift halves of iπ.
        self.i_pi_halves += 2 * s * i64::from(e.shift);
        match e.param {
            Param::L1 => self.half_coeffs[tet][0] += s,
            Param::L2 => self.half_coeffs[tet][1] += s,
            Param::L3 => {
                self.i_pi_halves += s;
                self.half_coeffs[tet][0] -= s;
                self.half_coeffs[tet][1] -= s;
            }
        }
    }

    pub fn evaluate(&self, f: &Flattening) -> Complex64 {
        let linear: Complex64 = f
            .tets
            .iter()
            .zip(&self.half_coeffs)
            .map(|(t, c)| t.l1() * c[0] as f64 + t.l2() * c[1] as f64)
            .sum();
        (Complex64::new(0.0, PI) * self.i_pi_halves as f64 + linear) / 2.0
    }

    pub fn scaled(&self, k: i64) -> Self {
        LogForm {
            i_pi_halves: self.i_pi_halves * k,
            half_coeffs: self.half_coeffs.iter().map(|c| [c[0] * k, c[1] * k]).collect(),
        }
    }

    pub fn plus(&self, other: &LogForm) -> Self {
        LogForm {
            i_pi_halves: self.i_pi_halves + other.i_pi_halves,
            half_coeffs: self
                .half_coeffs
                .iter()
                .zip(&other.half_coeffs)
                .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
                .collect(),
        }
    }
}

fn halves(f: &mut fmt::Formatter<'_>, first: &mut bool, k: i64, unit: &str) -> fmt::Result {
    if k == 0 {
        return Ok(());
    }
    let sign = if k < 0 { "-" } else { "+" };
    if *first {
        if k < 0 {
            f.write_str("-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    *first = false;
    let m = k.abs();
    let coeff = if m % 2 == 0 {
        if m == 2 { String::new() } else { (m / 2).to_string() }
    } else {
        format!("{m}/2·")
    };
    write!(f, "{coeff}{unit}")
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        halves(f, &mut first, self.i_pi_halves, "iπ")?;
        for (t, c) in self.half_coeffs.iter().enumerate() {
            halves(f, &mut first, c[0], &format!("l1[{t}]"))?;
            halves(f, &mut first, c[1], &format!("l2[{t}]"))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// The logarithmic holonomy of a loop as a linear form.
pub fn peripheral_form(bt: &BranchedTriangulation, path: &BoundaryPath) -> Result<LogForm, HolonomyError> {
    check_loop(bt, &path.steps)?;
    let mut form = LogForm::zero(bt.num_tets());
    for e in &path.steps {
        match e.kind {
            EdgeType::E3 => {
                let (tet, v) = e.source();
                form.add_value(tet, v, -1);
            }
            _ => form.i_pi_halves += if e.forward { -1 } else { 1 },
        }
    }
    Ok(form)
}

/// Edge sums `Σ L` over each closed star as linear forms; each vanishes on
/// every flattening.
pub fn edge_forms(bt: &BranchedTriangulation) -> Vec<LogForm> {
    (0..bt.edges.len())
        .filter(|&c| bt.edges[c].closed)
        .map(|class| {
            let mut form = LogForm::zero(bt.num_tets());
            for (tet, o) in bt.rank_star(class) {
                form.add_value(tet, o, 2);
            }
            form
        })
        .collect()
}

/// `(−1)^{#E2} · ∏_{E3} X(v)^{−1} = 1`: the square of the upper-left entry
/// of the loop holonomy is 1, as it is for a parabolic holonomy.
pub fn completeness_relation(path: &BoundaryPath) -> Relation {
    let e2 = path.steps.iter().filter(|e| e.kind == EdgeType::E2).count();
    Relation {
        name: format!("completeness {}", path.name),
        factors: path
            .steps
            .iter()
            .filter(|e| e.kind == EdgeType::E3)
            .map(|e| {
                let (tet, ordering) = e.source();
                Factor { tet, ordering, power: -1 }
            })
            .collect(),
        constant: if e2 % 2 == 0 { 1.0 } else { -1.0 },
    }
}

fn syntax(line: usize, column: usize, message: &str) -> HolonomyError {
    HolonomyError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

/// Parses `path <name>` headers followed by `step <tet> <ordering> <E2|E3>
/// <+|->` lines. The ordering, in file labels, is the lower end of the edge
/// and the sign says whether the step runs along the branching.
pub fn parse_paths(text: &str, bt: &BranchedTriangulation) -> Result<Vec<BoundaryPath>, HolonomyError> {
    let mut paths: Vec<BoundaryPath> = Vec::new();
    for (line, tokens) in significant_lines(text) {
        let (col, keyword) = tokens[0];
        match keyword {
            "path" if tokens.len() == 2 => paths.push(BoundaryPath {
                name: tokens[1].1.to_string(),
                steps: Vec::new(),
            }),
            "step" if tokens.len() == 5 => {
                let current = paths.last_mut().ok_or_else(|| syntax(line, col, "step before any `path` line"))?;
                let tet: usize = tokens[1]
                    .1
                    .parse()
                    .map_err(|_| syntax(line, tokens[1].0, "expected a tetrahedron index"))?;
                if tet >= bt.num_tets() {
                    return Err(syntax(line, tokens[1].0, &format!("tetrahedron {tet} out of range")));
                }
                let labels =
                    Ordering::parse(tokens[2].1).ok_or_else(|| syntax(line, tokens[2].0, "expected an ordering such as 0123"))?;
                let kind = match tokens[3].1 {
                    "E2" => EdgeType::E2,
                    "E3" => EdgeType::E3,
                    _ => return Err(syntax(line, tokens[3].0, "expected E2 or E3")),
                };
                let forward = match tokens[4].1 {
                    "+" => true,
                    "-" => false,
                    _ => return Err(syntax(line, tokens[4].0, "expected + or -")),
                };
                let lower = bt.branching.to_ranks(tet, labels);
                if lower > lower.swapped(kind) {
                    return Err(syntax(line, tokens[2].0, "ordering is not the lower end of its edge"));
                }
                current.steps.push(OrientedEdge { tet, lower, kind, forward });
            }
            _ => return Err(syntax(line, col, &format!("unexpected line starting with `{keyword}`"))),
        }
    }
    Ok(paths)
}

pub fn to_paths_string(paths: &[BoundaryPath], bt: &BranchedTriangulation) -> String {
    let mut out = String::new();
    for p in paths {
        let _ = writeln!(out, "path {}", p.name);
        for e in &p.steps {
            let labels = bt.branching.to_labels(e.tet, e.lower);
            let sign = if e.forward { '+' } else { '-' };
            let _ = writeln!(out, "step {} {} {} {}", e.tet, labels, e.kind, sign);
        }
    }
    out
}

/// Loops generating the first homology of one boundary component.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspBasis {
    pub component: usize,
    pub euler_characteristic: i64,
    pub loops: Vec<BoundaryPath>,
}

struct BoundaryComplex {
    /// Vertex class of every `(tet, ordering index)`.
    vertex: Vec<usize>,
    /// Representative oriented forward, and the two ends.
    edges: Vec<(OrientedEdge, usize, usize)>,
    /// Boundary cycles as edge ids.
    faces: Vec<Vec<usize>>,
}

fn slot(tet: usize, o: Ordering) -> usize {
    24 * tet + o.index()
}

fn boundary_complex(bt: &BranchedTriangulation) -> Option<BoundaryComplex> {
    let n = bt.num_tets();
    let mut vertex = vec![usize::MAX; 24 * n];
    let mut next = 0;
    for tet in 0..n {
        for o in Ordering::all() {
            if vertex[slot(tet, o)] != usize::MAX {
                continue;
            }
            vertex[slot(tet, o)] = next;
            if let Some((t2, o2)) = bt.identified_vertex(tet, o) {
                vertex[slot(t2, o2)] = next;
            }
            next += 1;
        }
    }
    let mut edges = Vec::new();
    let mut lookup: HashMap<(usize, Ordering, EdgeType), usize> = HashMap::new();
    for tet in 0..n {
        for lower in Ordering::all() {
            for kind in [EdgeType::E2, EdgeType::E3] {
                if lower > lower.swapped(kind) || lookup.contains_key(&(tet, lower, kind)) {
                    continue;
                }
                let e = OrientedEdge { tet, lower, kind, forward: true };
                let id = edges.len();
                edges.push((e, vertex[slot(tet, lower)], vertex[slot(tet, e.upper())]));
                lookup.insert((tet, lower, kind), id);
                if kind == EdgeType::E2 {
                    // E2 edges lie on face cells and are shared across gluings.
                    if let Some((t2, o2)) = bt.identified_vertex(tet, lower) {
                        lookup.insert((t2, o2, kind), id);
                    }
                }
            }
        }
    }
    let edge_id = |tet: usize, from: Ordering, kind: EdgeType| {
        let e = OrientedEdge::from_vertex(tet, from, kind);
        lookup[&(tet, e.lower, kind)]
    };
    let mut faces = Vec::new();
    for tet in 0..n {
        for a in 0..4u8 {
            let mut rest: Vec<u8> = (0..4).filter(|&v| v != a).collect();
            rest.sort_unstable();
            let mut v = Ordering([a, rest[0], rest[1], rest[2]]);
            let mut cycle = Vec::new();
            for kind in [EdgeType::E2, EdgeType::E3].repeat(3) {
                cycle.push(edge_id(tet, v, kind));
                v = v.swapped(kind);
            }
            faces.push(cycle);
        }
    }
    let mut seen = vec![false; edges.len()];
    for start in 0..edges.len() {
        if edges[start].0.kind != EdgeType::E3 || seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let (mut tet, mut v) = (edges[start].0.tet, edges[start].0.lower);
        loop {
            let id = edge_id(tet, v, EdgeType::E3);
            if seen[id] {
                break;
            }
            seen[id] = true;
            cycle.push(id);
            let w = v.swapped(EdgeType::E3);
            let (t2, o2) = bt.identified_vertex(tet, w)?;
            tet = t2;
            v = o2;
        }
        faces.push(cycle);
    }
    Some(BoundaryComplex { vertex, edges, faces })
}

/// Tree–cotree generators of the first homology of every boundary
/// component. Requires every face to be glued.
pub fn cusp_basis(bt: &BranchedTriangulation) -> Option<Vec<CuspBasis>> {
    let cx = boundary_complex(bt)?;
    let num_vertices = cx.vertex.iter().copied().max().map_or(0, |m| m + 1);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
    for (id, &(_, a, b)) in cx.edges.iter().enumerate() {
        incident[a].push(id);
        incident[b].push(id);
    }
    let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); cx.edges.len()];
    for (f, cycle) in cx.faces.iter().enumerate() {
        for &e in cycle {
            edge_faces[e].push(f);
        }
    }
    let mut component = vec![usize::MAX; num_vertices];
    let mut parent_edge = vec![usize::MAX; num_vertices];
    let mut out = Vec::new();
    for root in 0..num_vertices {
        if component[root] != usize::MAX {
            continue;
        }
        let comp = out.len();
        // Spanning tree of the 1-skeleton.
        let mut tree = vec![false; cx.edges.len()];
        let mut members = vec![root];
        component[root] = comp;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in &incident[v] {
                let (_, a, b) = cx.edges[e];
                let w = if a == v { b } else { a };
                if component[w] == usize::MAX {
                    component[w] = comp;
                    parent_edge[w] = e;
                    tree[e] = true;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        let comp_edges: Vec<usize> = (0..cx.edges.len()).filter(|&e| component[cx.edges[e].1] == comp).collect();
        let comp_faces: Vec<usize> =
            (0..cx.faces.len()).filter(|&f| component[cx.edges[cx.faces[f][0]].1] == comp).collect();
        // Spanning tree of the dual graph avoiding the primal tree.
        let mut cotree = vec![false; cx.edges.len()];
        let mut face_seen = vec![false; cx.faces.len()];
        if let Some(&f0) = comp_faces.first() {
            face_seen[f0] = true;
            let mut queue = VecDeque::from([f0]);
            while let Some(f) = queue.pop_front() {
                for &e in &cx.faces[f] {
                    if tree[e] || cotree[e] {
                        continue;
                    }
                    if let Some(&g) = edge_faces[e].iter().find(|&&g| !face_seen[g]) {
                        face_seen[g] = true;
                        cotree[e] = true;
                        queue.push_back(g);
                    }
                }
            }
        }
        let euler = members.len() as i64 - comp_edges.len() as i64 + comp_faces.len() as i64;
        // Tree path from the root to v as forward steps.
        let path_to = |mut v: usize| {
            let mut steps = Vec::new();
            while v != root {
                let e = parent_edge[v];
                let (rep, a, b) = cx.edges[e];
                // The step arrives at v.
                let (step, from) = if b == v { (rep, a) } else { (rep.reversed(), b) };
                steps.push(step);
                v = from;
            }
            steps.reverse();
            steps
        };
        let mut loops = Vec::new();
        for &e in &comp_edges {
            if tree[e] || cotree[e] {
                continue;
            }
            let (rep, a, b) = cx.edges[e];
            let mut steps = path_to(a);
            steps.push(rep);
            steps.extend(path_to(b).iter().rev().map(OrientedEdge::reversed));
            loops.push(BoundaryPath {
                name: format!("cusp{comp}_{}", loops.len()),
                steps,
            });
        }
        out.push(CuspBasis {
            component: comp,
            euler_characteristic: euler,
            loops,
        });
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossratio::ShapeAssignment;
    use crate::flattening::solve_flattening;
    use crate::holonomy::{build_lifted_cocycle, path_holonomy};
    use crate::triangulation::figure_eight;
    use proptest::prelude::*;

    fn fig8() -> BranchedTriangulation {
        BranchedTriangulation::auto(figure_eight()).unwrap()
    }

    fn complete(bt: &BranchedTriangulation) -> Flattening {
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let shapes = ShapeAssignment::new(vec![w / (w - 1.0), 1.0 / (1.0 - w)]).unwrap();
        solve_flattening(bt, &shapes).unwrap()
    }

    fn basis(bt: &BranchedTriangulation) -> Vec<BoundaryPath> {
        cusp_basis(bt).unwrap().remove(0).loops
    }

    fn hexagons(bt: &BranchedTriangulation) -> Vec<BoundaryPath> {
        let mut out = Vec::new();
        for tet in 0..bt.num_tets() {
            for a in 0..4u8 {
                let rest: Vec<u8> = (0..4).filter(|&v| v != a).collect();
                let mut v = Ordering([a, rest[0], rest[1], rest[2]]);
                let mut steps = Vec::new();
                for kind in [EdgeType::E2, EdgeType::E3].repeat(3) {
                    steps.push(OrientedEdge::from_vertex(tet, v, kind));
                    v = v.swapped(kind);
                }
                out.push(BoundaryPath {
                    name: format!("hex{tet}_{a}"),
                    steps,
                });
            }
        }
        out
    }

    fn end_disk(bt: &BranchedTriangulation, tet: usize, start: Ordering) -> BoundaryPath {
        let (mut t, mut v) = (tet, start);
        let mut steps = Vec::new();
        loop {
            let e = OrientedEdge::from_vertex(t, v, EdgeType::E3);
            steps.push(e);
            (t, v) = bt.identified_vertex(e.target().0, e.target().1).unwrap();
            if (t, v) == (tet, start) {
                break;
            }
        }
        BoundaryPath {
            name: "disk".into(),
            steps,
        }
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn figure_eight_has_one_torus_cusp() {
        let bt = fig8();
        let cusps = cusp_basis(&bt).unwrap();
        assert_eq!(cusps.len(), 1);
        assert_eq!(cusps[0].euler_characteristic, 0);
        assert_eq!(cusps[0].loops.len(), 2);
    }

    #[test]
    fn open_triangulation_has_no_cusp_basis() {
        let tri = crate::triangulation::parse_triangulation_with("tri 1\ntets 1\n", crate::triangulation::Mode::Lenient)
            .unwrap();
        assert!(cusp_basis(&BranchedTriangulation::auto(tri).unwrap()).is_none());
    }

    #[test]
    fn hexagons_and_end_disks_vanish() {
        let bt = fig8();
        let f = complete(&bt);
        for h in hexagons(&bt) {
            let form = peripheral_form(&bt, &h).unwrap();
            assert_eq!(form, LogForm::zero(2), "{}", h.name);
        }
        let mut disks = 0;
        for tet in 0..2 {
            for o in Ordering::all() {
                if o < o.swapped(EdgeType::E3) {
                    let d = end_disk(&bt, tet, o);
                    assert!(peripheral_log_holonomy(&bt, &f, &d).unwrap().norm() < 1e-10);
                    disks += 1;
                }
            }
        }
        assert!(disks > 0);
    }

    #[test]
    fn inserting_a_hexagon_leaves_the_value_unchanged() {
        let bt = fig8();
        let f = complete(&bt);
        for path in basis(&bt) {
            let base = peripheral_log_holonomy(&bt, &f, &path).unwrap();
            let (tet, v) = path.steps[0].source();
            // A hexagon through the start vertex, rotated to start there.
            let a = v.0[0];
            let rest: Vec<u8> = (0..4).filter(|&x| x != a).collect();
            let mut w = Ordering([a, rest[0], rest[1], rest[2]]);
            let mut cycle = Vec::new();
            for kind in [EdgeType::E2, EdgeType::E3].repeat(3) {
                cycle.push(OrientedEdge::from_vertex(tet, w, kind));
                w = w.swapped(kind);
            }
            let at = cycle.iter().position(|e| e.source() == (tet, v)).unwrap();
            cycle.rotate_left(at);
            let mut steps = cycle;
            steps.extend(path.steps.iter().copied());
            let detour = BoundaryPath {
                name: "detour".into(),
                steps,
            };
            assert!(close(peripheral_log_holonomy(&bt, &f, &detour).unwrap(), base));
        }
    }

    #[test]
    fn reversal_negates() {
        let bt = fig8();
        let f = complete(&bt);
        for path in basis(&bt) {
            let a = peripheral_log_holonomy(&bt, &f, &path).unwrap();
            let b = peripheral_log_holonomy(&bt, &f, &path.reversed()).unwrap();
            assert!(close(a, -b));
        }
    }

    #[test]
    fn complete_structure_is_parabolic() {
        let bt = fig8();
        let f = complete(&bt);
        let c = build_lifted_cocycle(&bt, &f);
        let shapes = f.shapes();
        for path in basis(&bt) {
            let m = path_holonomy(&c, &path.steps).unwrap();
            let tr = m.trace();
            assert!(close(tr, Complex64::new(2.0, 0.0)) || close(tr, Complex64::new(-2.0, 0.0)), "{tr}");
            assert!(m[(1, 0)].norm() < 1e-10);
            assert!(completeness_relation(&path).residual(&shapes).norm() < 1e-10);
        }
    }

    #[test]
    fn incomplete_structure_violates_completeness() {
        let bt = fig8();
        let shapes = [Complex64::new(0.4, 0.9), Complex64::new(0.6, 1.1)];
        assert!(basis(&bt).iter().any(|p| completeness_relation(p).residual(&shapes).norm() > 1e-3));
    }

    #[test]
    fn malformed_paths_are_rejected() {
        let bt = fig8();
        let e = OrientedEdge::from_vertex(0, Ordering([0, 1, 2, 3]), EdgeType::E1);
        let p = BoundaryPath {
            name: "bad".into(),
            steps: vec![e],
        };
        assert_eq!(peripheral_form(&bt, &p), Err(HolonomyError::LeavesBoundary { step: 0 }));
        let e = OrientedEdge::from_vertex(0, Ordering([0, 1, 2, 3]), EdgeType::E3);
        let p = BoundaryPath {
            name: "open".into(),
            steps: vec![e],
        };
        assert_eq!(peripheral_form(&bt, &p), Err(HolonomyError::NotClosed));
        let p = BoundaryPath {
            name: "far".into(),
            steps: vec![OrientedEdge { tet: 7, ..e }],
        };
        assert_eq!(peripheral_form(&bt, &p), Err(HolonomyError::TetOutOfRange { tet: 7 }));
    }

    #[test]
    fn paths_roundtrip_through_text() {
        let bt = fig8();
        let loops = basis(&bt);
        let text = to_paths_string(&loops, &bt);
        assert_eq!(parse_paths(&text, &bt).unwrap(), loops);
    }

    #[test]
    fn path_syntax_errors_carry_positions() {
        let bt = fig8();
        let cases = [
            ("step 0 0123 E3 +\n", 1, 1),
            ("path a\nstep 0 0123 E4 +\n", 2, 13),
            ("path a\nstep 9 0123 E3 +\n", 2, 6),
            ("path a\nstep 0 01x3 E3 +\n", 2, 8),
            ("path a\nstep 0 0123 E3 *\n", 2, 16),
            ("path a b\n", 1, 1),
        ];
        for (text, line, column) in cases {
            match parse_paths(text, &bt) {
                Err(HolonomyError::Syntax { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn upper_ordering_is_rejected() {
        let bt = fig8();
        let e = basis(&bt)[0].steps[0];
        let upper = bt.branching.to_labels(e.tet, e.upper());
        let text = format!("path a\nstep {} {} {} +\n", e.tet, upper, e.kind);
        assert!(matches!(parse_paths(&text, &bt), Err(HolonomyError::Syntax { .. })));
    }

    #[test]
    fn log_form_display() {
        let mut form = LogForm::zero(2);
        assert_eq!(form.to_string(), "0");
        form.i_pi_halves = 1;
        form.half_coeffs[0][0] = -2;
        form.half_coeffs[1][1] = 4;
        assert_eq!(form.to_string(), "1/2·iπ - l1[0] + 2l2[1]");
    }

    proptest! {
        #[test]
        fn single_values_evaluate_to_the_flattening(
            re in -2.0f64..2.0, im in 0.1f64..2.0, p in -2i64..3, q in -2i64..3, idx in 0usize..24,
        ) {
            let shapes = ShapeAssignment::new(vec![Complex64::new(0.4, -0.3), Complex64::new(re, im)]).unwrap();
            let f = Flattening::from_integers(&shapes, &[(1, 0), (p, q)]);
            let o = Ordering::from_index(idx);
            prop_assert!(close(LogForm::of_value(2, 1, o).evaluate(&f), f.value(1, o)));
        }

        #[test]
        fn log_holonomy_exponentiates_to_the_corner_entry(
            re0 in -2.0f64..2.0, im0 in 0.1f64..2.0, re1 in -2.0f64..2.0, im1 in -2.0f64..-0.1,
            p0 in -2i64..3, q0 in -2i64..3, p1 in -2i64..3, q1 in -2i64..3,
        ) {
            let bt = fig8();
            let shapes = ShapeAssignment::new(vec![Complex64::new(re0, im0), Complex64::new(re1, im1)]).unwrap();
            let f = Flattening::from_integers(&shapes, &[(p0, q0), (p1, q1)]);
            let c = build_lifted_cocycle(&bt, &f);
            for path in basis(&bt).into_iter().chain(hexagons(&bt)) {
                let log = peripheral_log_holonomy(&bt, &f, &path).unwrap();
                let form = peripheral_form(&bt, &path).unwrap();
                prop_assert!(close(form.evaluate(&f), log));
                let m = path_holonomy(&c, &path.steps).unwrap();
                prop_assert!((log.exp() - m[(0, 0)]).norm() < 1e-8 * (1.0 + m[(0, 0)].norm()));
            }
        }
    }
}
