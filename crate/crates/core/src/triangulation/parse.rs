use std::fmt::Write as _;

use super::{insert_gluing, Gluing, Mode, Perm4, Triangulation, TriangulationError};

/// Parses a `.tri` document in strict mode (every face glued).
pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriangulationError> {
    parse_triangulation_with(text, Mode::Strict)
}

pub fn parse_triangulation_with(text: &str, mode: Mode) -> Result<Triangulation, TriangulationError> {
    let mut lines = significant_lines(text);

    let (line_no, tokens) = lines.next().ok_or_else(|| syntax(1, 1, "missing `tri 1` header"))?;
    match tokens.as_slice() {
        [(_, "tri"), (_, "1")] => {}
        [(_, "tri"), (col, v)] => return Err(syntax(line_no, *col, &format!("unsupported version `{v}`"))),
        _ => return Err(syntax(line_no, 1, "expected `tri 1`")),
    }

    let (line_no, tokens) = lines.next().ok_or_else(|| syntax(line_no + 1, 1, "missing `tets N` line"))?;
    let num_tets = match tokens.as_slice() {
        [(_, "tets"), (col, n)] => parse_num(line_no, *col, n)?,
        _ => return Err(syntax(line_no, 1, "expected `tets N`")),
    };

    let mut raw: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; num_tets];
    for (line_no, tokens) in lines {
        let (col, keyword) = tokens[0];
        if keyword != "glue" {
            return Err(syntax(line_no, col, &format!("unknown directive `{keyword}`")));
        }
        if tokens.len() != 8 {
            let col = tokens.get(8).map_or(col + keyword.len(), |t| t.0);
            return Err(syntax(line_no, col, "expected `glue <t> <f> <t'> <p0> <p1> <p2> <p3>`"));
        }
        let mut nums = [0usize; 7];
        for (slot, &(col, tok)) in nums.iter_mut().zip(&tokens[1..]) {
            *slot = parse_num(line_no, col, tok)?;
        }
        let [tet, face, target, p0, p1, p2, p3] = nums;
        if face > 3 {
            return Err(syntax(line_no, tokens[2].0, "face must be in 0..=3"));
        }
        let images = [p0, p1, p2, p3];
        if images.iter().any(|&p| p > 3) {
            return Err(syntax(line_no, tokens[4].0, "permutation entries must be in 0..=3"));
        }
        let perm = Perm4::new(images.map(|p| p as u8))
            .ok_or_else(|| syntax(line_no, tokens[4].0, "not a permutation of 0..=3"))?;
        insert_gluing(&mut raw, line_no, tet, face as u8, target, perm)?;
    }

    Triangulation { gluings: raw }.close_and_validate(mode)
}

impl Triangulation {
    /// Serializes to the `.tri` format, one line per directed gluing.
    pub fn to_tri_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tri 1");
        let _ = writeln!(out, "tets {}", self.num_tets());
        for (tet, face, g) in self.gluing_list() {
            let [a, b, c, d] = g.perm.images();
            let _ = writeln!(out, "glue {tet} {face} {} {a} {b} {c} {d}", g.tet);
        }
        out
    }
}

type Tokens<'a> = Vec<(usize, &'a str)>;

/// Non-empty lines with comments stripped, tokenized with 1-based columns.
pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = (usize, Tokens<'_>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let content = line.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn tokenize(line: &str) -> Tokens<'_> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_num(line: usize, column: usize, tok: &str) -> Result<usize, TriangulationError> {
    tok.parse()
        .map_err(|_| syntax(line, column, &format!("expected a non-negative integer, found `{tok}`")))
}

pub(crate) fn syntax(line: usize, column: usize, message: &str) -> TriangulationError {
    TriangulationError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::FIGURE_EIGHT_TRI;

    #[test]
    fn figure_eight_parses() {
        let tri = parse_triangulation(FIGURE_EIGHT_TRI).unwrap();
        assert_eq!(tri.num_tets(), 2);
        assert!(tri.is_closed());
    }

    #[test]
    fn even_permutation_is_an_orientation_violation() {
        let text = "tri 1\ntets 1\nglue 0 0 0 1 2 0 3\n";
        let err = parse_triangulation_with(text, Mode::Lenient).unwrap_err();
        assert!(matches!(err, TriangulationError::OrientationViolation { line: 3, .. }));
        assert!(err.to_string().contains("orientation violation"));
    }

    #[test]
    fn duplicate_face_is_rejected() {
        let text = "tri 1\ntets 2\nglue 0 2 1 0 1 3 2\nglue 0 2 1 1 0 2 3\n";
        let err = parse_triangulation_with(text, Mode::Lenient).unwrap_err();
        assert!(matches!(err, TriangulationError::DuplicateFace { tet: 0, face: 2, line: 4 }));
        assert!(err.to_string().contains("dangling face / duplicate"));
    }

    #[test]
    fn non_involutive_gluing_is_rejected() {
        // Face 3 of tet 0 goes to face 3 of tet 1, but the reverse line
        // sends face 3 of tet 1 elsewhere.
        let text = "tri 1\ntets 2\nglue 0 3 1 1 0 2 3\nglue 1 3 0 0 2 1 3\n";
        let err = parse_triangulation_with(text, Mode::Lenient).unwrap_err();
        assert!(matches!(err, TriangulationError::NonInvolutive { .. }), "{err}");
    }

    #[test]
    fn strict_mode_requires_all_faces() {
        let text = "tri 1\ntets 2\nglue 0 3 1 1 0 2 3\n";
        let err = parse_triangulation(text).unwrap_err();
        assert!(matches!(err, TriangulationError::DanglingFace { .. }));
        assert!(parse_triangulation_with(text, Mode::Lenient).is_ok());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_triangulation("tri 1\ntets 1\nglue 0 x 0 1 0 2 3\n").unwrap_err();
        assert_eq!(
            err,
            TriangulationError::Syntax {
                line: 3,
                column: 8,
                message: "expected a non-negative integer, found `x`".into()
            }
        );
        let err = parse_triangulation("tri 2\n").unwrap_err();
        assert!(matches!(err, TriangulationError::Syntax { line: 1, column: 5, .. }));
        let err = parse_triangulation("# nothing\n").unwrap_err();
        assert!(matches!(err, TriangulationError::Syntax { .. }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\ntri 1 # version\n\ntets 0\n";
        let tri = parse_triangulation(text).unwrap();
        assert_eq!(tri.num_tets(), 0);
    }

    #[test]
    fn serialize_roundtrip() {
        let tri = parse_triangulation(FIGURE_EIGHT_TRI).unwrap();
        let again = parse_triangulation(&tri.to_tri_string()).unwrap();
        assert_eq!(tri, again);
    }
}
