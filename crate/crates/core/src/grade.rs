//! Solver-response parsing and exact-match scoring.
//!
//! A maze counts as solved only when reachability is correct, the claimed
//! shortest length is correct, and the returned path matches — either one of
//! the accepted annotations (`AnnotationMatch`, the default) or a successful
//! simulation at the optimal length (`Simulate`, which cannot be unfairly
//! strict when the 50-path cap truncated the annotation). For unreachable
//! ground truth, a correct unreachable claim with no path is solved and the
//! length/path conditions are vacuous. No partial credit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{MazeGrid, Move, MovePath};
use crate::pathfind::Annotation;

/// A parsed solver answer. `path_length`/`path` are kept as stated; a
/// mismatch between them is recorded by the verdict, never repaired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResponse {
    pub grid_size: Option<(usize, usize)>,
    pub start_found: bool,
    pub goal_found: bool,
    pub reachable: bool,
    pub path_length: Option<usize>,
    pub path: Option<MovePath>,
    pub raw_text: String,
}

/// How the path condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradeMode {
    AnnotationMatch,
    Simulate,
}

/// Scoring outcome for one response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub solved: bool,
    pub reach_correct: bool,
    pub length_correct: Option<bool>,
    pub path_valid: Option<bool>,
    pub mode: GradeMode,
    pub truncated_output: bool,
    /// Set when `path_length` was absent and the length was taken from the path.
    pub length_inferred_from_path: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseFailure {
    #[error("no JSON object found in response")]
    NoJson,
    #[error("response JSON has no usable `reachable` boolean")]
    MissingReachable,
    #[error("path contains token {0:?} outside U/D/L/R")]
    BadMoveToken(String),
    #[error("path field is neither an array of moves nor a letter string")]
    BadPathShape,
}

/// Extract and normalize the first JSON object in `raw`, tolerating
/// surrounding prose and code fences. Unknown fields are ignored.
pub fn parse_response(raw: &str) -> Result<SolverResponse, ParseFailure> {
    let value = first_json_object(raw).ok_or(ParseFailure::NoJson)?;

    let reachable = value
        .get("reachable")
        .and_then(as_bool)
        .ok_or(ParseFailure::MissingReachable)?;

    let grid_size = value.get("grid_size").and_then(|v| {
        let arr = v.as_array()?;
        if arr.len() != 2 {
            return None;
        }
        Some((as_usize(&arr[0])?, as_usize(&arr[1])?))
    });

    let start_found = value.get("start_found").and_then(as_bool).unwrap_or(false);
    let goal_found = value.get("goal_found").and_then(as_bool).unwrap_or(false);
    let path_length = value.get("path_length").and_then(as_usize);
    let path = match value.get("path") {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => Some(parse_path(v)?),
    };

    Ok(SolverResponse {
        grid_size,
        start_found,
        goal_found,
        reachable,
        path_length,
        path,
        raw_text: raw.to_string(),
    })
}

/// Score a parsed response against the ground truth.
pub fn grade(resp: &SolverResponse, annotation: &Annotation, grid: &MazeGrid, mode: GradeMode) -> Verdict {
    if !annotation.reachable {
        let reach_correct = !resp.reachable;
        let path_empty = resp.path.as_ref().is_none_or(MovePath::is_empty);
        return Verdict {
            solved: reach_correct && path_empty,
            reach_correct,
            length_correct: None,
            path_valid: None,
            mode,
            truncated_output: false,
            length_inferred_from_path: false,
        };
    }

    let shortest = annotation.shortest_len.expect("reachable annotation has a length");
    let reach_correct = resp.reachable;
    let (claimed_len, inferred) = match (resp.path_length, &resp.path) {
        (Some(len), _) => (Some(len), false),
        (None, Some(p)) => (Some(p.len()), true),
        (None, None) => (None, false),
    };
    let length_correct = claimed_len == Some(shortest);
    let path_valid = match (&resp.path, mode) {
        (None, _) => false,
        (Some(p), GradeMode::AnnotationMatch) => annotation.accepted_paths.contains(p),
        (Some(p), GradeMode::Simulate) => {
            let sim = grid.simulate_path(p);
            sim.reaches_goal && sim.steps_taken == shortest
        }
    };

    Verdict {
        solved: reach_correct && length_correct && path_valid,
        reach_correct,
        length_correct: Some(length_correct),
        path_valid: Some(path_valid),
        mode,
        truncated_output: false,
        length_inferred_from_path: inferred,
    }
}

/// Verdict for a response that never parsed (or parsed only a prefix after
/// hitting a token limit). Never solved; a parseable reachability claim is
/// still credited to `reach_correct`.
pub fn grade_unparsed(
    partial_reachable: Option<bool>,
    annotation: &Annotation,
    mode: GradeMode,
) -> Verdict {
    Verdict {
        solved: false,
        reach_correct: partial_reachable.map(|p| p == annotation.reachable).unwrap_or(false),
        length_correct: None,
        path_valid: None,
        mode,
        truncated_output: true,
        length_inferred_from_path: false,
    }
}

/// Best-effort scan for a `"reachable": true/false` claim in unparseable text.
pub fn extract_partial_reachable(raw: &str) -> Option<bool> {
    let key = "\"reachable\"";
    let at = raw.find(key)?;
    let rest = raw[at + key.len()..].trim_start();
    let rest = rest.strip_prefix(':')?.trim_start();
    if rest.starts_with("true") {
        Some(true)
    } else if rest.starts_with("false") {
        Some(false)
    } else {
        None
    }
}

/// First parseable JSON object in the text, scanning `{` starts.
fn first_json_object(raw: &str) -> Option<serde_json::Value> {
    for (ix, ch) in raw.char_indices() {
        if ch != '{' {
            continue;
        }
        let mut stream = serde_json::Deserializer::from_str(&raw[ix..]).into_iter::<serde_json::Value>();
        if let Some(Ok(v)) = stream.next() {
            if v.is_object() {
                return Some(v);
            }
        }
    }
    None
}

fn as_bool(v: &serde_json::Value) -> Option<bool> {
    match v {
        serde_json::Value::Bool(b) => Some(*b),
        serde_json::Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn as_usize(v: &serde_json::Value) -> Option<usize> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                return Some(u as usize);
            }
            let f = n.as_f64()?;
            (f >= 0.0 && f.fract() == 0.0).then_some(f as usize)
        }
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Accept either an array of move tokens or a single letter string, in any
/// case, with separators tolerated in the string form.
fn parse_path(v: &serde_json::Value) -> Result<MovePath, ParseFailure> {
    match v {
        serde_json::Value::Array(items) => {
            let mut moves = Vec::with_capacity(items.len());
            for item in items {
                let s = item.as_str().ok_or(ParseFailure::BadPathShape)?;
                let normalized = s.trim().to_ascii_uppercase();
                let mut chars = normalized.chars();
                let (first, rest) = (chars.next(), chars.next());
                match (first, rest) {
                    (Some(c), None) => {
                        moves.push(Move::from_letter(c).ok_or_else(|| {
                            ParseFailure::BadMoveToken(s.to_string())
                        })?);
                    }
                    _ => return Err(ParseFailure::BadMoveToken(s.to_string())),
                }
            }
            Ok(MovePath::new(moves))
        }
        serde_json::Value::String(s) => {
            let mut moves = Vec::new();
            for c in s.chars() {
                if c.is_whitespace() || c == ',' {
                    continue;
                }
                moves.push(
                    Move::from_letter(c.to_ascii_uppercase())
                        .ok_or_else(|| ParseFailure::BadMoveToken(c.to_string()))?,
                );
            }
            Ok(MovePath::new(moves))
        }
        _ => Err(ParseFailure::BadPathShape),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Position;
    use crate::pathfind::analyze;

    fn response(reachable: bool, len: Option<usize>, path: Option<&str>) -> SolverResponse {
        SolverResponse {
            grid_size: Some((5, 5)),
            start_found: true,
            goal_found: true,
            reachable,
            path_length: len,
            path: path.map(|p| MovePath::from_letters(p).unwrap()),
            raw_text: String::new(),
        }
    }

    #[test]
    fn parses_plain_json() {
        let raw = r#"{"grid_size":[5,5],"start_found":true,"goal_found":true,"reachable":true,"path_length":4,"path":["R","R","D","D"]}"#;
        let resp = parse_response(raw).unwrap();
        assert_eq!(resp.grid_size, Some((5, 5)));
        assert!(resp.reachable);
        assert_eq!(resp.path_length, Some(4));
        assert_eq!(resp.path, Some(MovePath::from_letters("RRDD").unwrap()));
    }

    #[test]
    fn parses_fenced_json_with_prose() {
        let raw = "Here is my answer:\n```json\n{\"reachable\": true, \"path_length\": 2, \"path\": [\"r\", \"r\"]}\n```\nDone!";
        let resp = parse_response(raw).unwrap();
        assert!(resp.reachable);
        assert_eq!(resp.path, Some(MovePath::from_letters("RR").unwrap()));
    }

    #[test]
    fn parses_concatenated_path_string() {
        let raw = r#"{"reachable": true, "path_length": 3, "path": "RDu"}"#;
        let resp = parse_response(raw).unwrap();
        assert_eq!(resp.path, Some(MovePath::from_letters("RDU").unwrap()));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_response("no json here"), Err(ParseFailure::NoJson));
        assert_eq!(
            parse_response(r#"{"reachable": true, "path": ["R", "X"]}"#),
            Err(ParseFailure::BadMoveToken("X".to_string()))
        );
        assert_eq!(
            parse_response(r#"{"path": ["R"]}"#),
            Err(ParseFailure::MissingReachable)
        );
        // Truncated JSON (token-limit cutoff) fails the balanced scan.
        assert!(parse_response(r#"{"reachable": true, "path": ["R","R""#).is_err());
    }

    #[test]
    fn skips_leading_non_object_braces() {
        let raw = "weights {not json} then {\"reachable\": false, \"path\": []}";
        let resp = parse_response(raw).unwrap();
        assert!(!resp.reachable);
    }

    /// 5x5 with a wall column forcing one detour; goal on the top-right.
    fn fixture() -> (MazeGrid, Annotation) {
        let grid = MazeGrid::parse_text_grid("S..#G\n...#.\n.....\n.....\n.....").unwrap();
        let ann = analyze(&grid);
        (grid, ann)
    }

    #[test]
    fn grades_reachable_cases() {
        let (grid, ann) = fixture();
        let len = ann.shortest_len.unwrap();
        let good = ann.accepted_paths[0].clone();

        for mode in [GradeMode::AnnotationMatch, GradeMode::Simulate] {
            let resp = SolverResponse {
                path_length: Some(len),
                path: Some(good.clone()),
                ..response(true, Some(len), None)
            };
            let v = grade(&resp, &ann, &grid, mode);
            assert!(v.solved);
            assert!(v.reach_correct);
            assert_eq!(v.length_correct, Some(true));
            assert_eq!(v.path_valid, Some(true));

            // Wrong length, valid-looking path.
            let resp = SolverResponse {
                path_length: Some(len + 2),
                path: Some(good.clone()),
                ..response(true, None, None)
            };
            let v = grade(&resp, &ann, &grid, mode);
            assert!(!v.solved);
            assert_eq!(v.length_correct, Some(false));

            // Claims unreachable on a reachable maze.
            let v = grade(&response(false, None, None), &ann, &grid, mode);
            assert!(!v.solved);
            assert!(!v.reach_correct);
        }
    }

    #[test]
    fn grades_unreachable_cases() {
        let grid = MazeGrid::parse_text_grid("S#G\n.#.\n.#.").unwrap();
        let ann = analyze(&grid);
        assert!(!ann.reachable);

        let solved = grade(&response(false, None, None), &ann, &grid, GradeMode::AnnotationMatch);
        assert!(solved.solved);
        assert_eq!(solved.length_correct, None);
        assert_eq!(solved.path_valid, None);

        let with_empty_path = grade(
            &response(false, None, Some("")),
            &ann,
            &grid,
            GradeMode::AnnotationMatch,
        );
        assert!(with_empty_path.solved);

        let with_path = grade(
            &response(false, None, Some("R")),
            &ann,
            &grid,
            GradeMode::AnnotationMatch,
        );
        assert!(!with_path.solved);

        let claims_reachable = grade(&response(true, Some(2), Some("RR")), &ann, &grid, GradeMode::Simulate);
        assert!(!claims_reachable.solved);
        assert!(!claims_reachable.reach_correct);
    }

    #[test]
    fn length_falls_back_to_path_and_is_flagged() {
        let (grid, ann) = fixture();
        let good = ann.accepted_paths[0].clone();
        let resp = SolverResponse { path: Some(good), ..response(true, None, None) };
        let v = grade(&resp, &ann, &grid, GradeMode::AnnotationMatch);
        assert!(v.solved);
        assert!(v.length_inferred_from_path);
    }

    #[test]
    fn stated_length_mismatch_is_not_repaired() {
        let (grid, ann) = fixture();
        let good = ann.accepted_paths[0].clone();
        let resp = SolverResponse {
            path_length: Some(good.len() + 1),
            path: Some(good),
            ..response(true, None, None)
        };
        let v = grade(&resp, &ann, &grid, GradeMode::AnnotationMatch);
        assert!(!v.solved);
        assert_eq!(v.length_correct, Some(false));
        assert_eq!(v.path_valid, Some(true));
    }

    #[test]
    fn simulate_mode_accepts_uncached_optimal_paths() {
        // 8x8 empty corner-to-corner truncates at 50 accepted paths; an
        // optimal path outside the cached set must still pass simulate mode.
        let grid = MazeGrid::open(8, 8, Position::new(0, 0), Position::new(7, 7)).unwrap();
        let ann = analyze(&grid);
        assert!(ann.optimal_count_truncated);
        // All-right-then-down is lexicographically late; with U,D,L,R order
        // the first 50 paths start with D, so this one is uncached.
        let late = MovePath::from_letters("RRRRRRRDDDDDDD").unwrap();
        assert!(!ann.accepted_paths.contains(&late));
        let resp = SolverResponse {
            path_length: Some(14),
            path: Some(late),
            ..response(true, None, None)
        };
        assert!(!grade(&resp, &ann, &grid, GradeMode::AnnotationMatch).solved);
        assert!(grade(&resp, &ann, &grid, GradeMode::Simulate).solved);
    }

    #[test]
    fn annotation_match_implies_simulate() {
        let (grid, ann) = fixture();
        for p in &ann.accepted_paths {
            let resp = SolverResponse {
                path_length: Some(p.len()),
                path: Some(p.clone()),
                ..response(true, None, None)
            };
            let am = grade(&resp, &ann, &grid, GradeMode::AnnotationMatch);
            let sim = grade(&resp, &ann, &grid, GradeMode::Simulate);
            assert!(am.solved && sim.solved);
        }
    }

    #[test]
    fn accepted_path_order_never_matters() {
        let (grid, ann) = fixture();
        let mut scrambled = ann.clone();
        scrambled.accepted_paths.reverse();
        let good = ann.accepted_paths[0].clone();
        let resp = SolverResponse {
            path_length: Some(good.len()),
            path: Some(good),
            ..response(true, None, None)
        };
        for mode in [GradeMode::AnnotationMatch, GradeMode::Simulate] {
            assert_eq!(grade(&resp, &ann, &grid, mode), grade(&resp, &scrambled, &grid, mode));
        }
    }

    #[test]
    fn unparsed_grading_records_partial_reachability() {
        let (_, ann) = fixture();
        let v = grade_unparsed(Some(true), &ann, GradeMode::AnnotationMatch);
        assert!(!v.solved);
        assert!(v.reach_correct);
        assert!(v.truncated_output);

        let v = grade_unparsed(None, &ann, GradeMode::AnnotationMatch);
        assert!(!v.reach_correct);

        assert_eq!(extract_partial_reachable("{\"reachable\": false, \"path"), Some(false));
        assert_eq!(extract_partial_reachable("\"reachable\":true,..."), Some(true));
        assert_eq!(extract_partial_reachable("nothing to see"), None);
    }
}
