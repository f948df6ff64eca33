//! Line-oriented text format for game graphs.
//!
//! ```text
//! # comment
//! vertex v0
//! leaf t1 1
//! leaf t2 0
//! edge v0 t1
//! root v0
//! ```

use thiserror::Error;

use crate::graph::{GameGraph, GraphError};
use crate::ratio::{format_rational, parse_rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid game: {0}")]
    Invalid(#[from] GraphError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

pub fn load_game(text: &str) -> Result<GameGraph, FormatError> {
    let mut b = GameGraph::builder();
    let mut root_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let at_line = |e: GraphError| parse_err(line, e.to_string());
        match fields.as_slice() {
            ["vertex", id] => {
                b.vertex(id).map_err(at_line)?;
            }
            ["leaf", id, weight] => {
                let w = parse_rational(weight)
                    .map_err(|e| parse_err(line, format!("bad leaf weight: {e}")))?;
                b.leaf(id, w).map_err(at_line)?;
            }
            ["edge", src, dst] => {
                let (s, d) = match (b.id(src), b.id(dst)) {
                    (Some(s), Some(d)) => (s, d),
                    (None, _) => return Err(parse_err(line, format!("unknown vertex `{src}`"))),
                    (_, None) => return Err(parse_err(line, format!("unknown vertex `{dst}`"))),
                };
                b.edge_ids(s, d);
            }
            ["root", id] => {
                if root_seen {
                    return Err(parse_err(line, "root declared twice"));
                }
                root_seen = true;
                b.root(id).map_err(at_line)?;
            }
            [keyword, ..] if ["vertex", "leaf", "edge", "root"].contains(keyword) => {
                return Err(parse_err(
                    line,
                    format!("wrong number of fields for `{keyword}`"),
                ));
            }
            [keyword, ..] => {
                return Err(parse_err(line, format!("unknown directive `{keyword}`")));
            }
            [] => unreachable!("blank lines are skipped"),
        }
    }
    Ok(b.build()?)
}

pub fn save_game(g: &GameGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        match g.weight(v) {
            None => out.push_str(&format!("vertex {}\n", g.name(v))),
            Some(w) => out.push_str(&format!("leaf {} {}\n", g.name(v), format_rational(w))),
        }
    }
    for v in g.vertices() {
        for &u in g.successors(v) {
            out.push_str(&format!("edge {} {}\n", g.name(v), g.name(u)));
        }
    }
    if let Some(r) = g.root() {
        out.push_str(&format!("root {}\n", g.name(r)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{race_game, tictactoe, Objective};

    const FIG1: &str = "\
# two wins in a row
vertex v0
vertex v1
leaf t1 1
leaf t2 0
edge v0 v1
edge v0 t2
edge v1 t1   # second win
edge v1 t2
root v0
";

    #[test]
    fn round_trip() {
        let g = load_game(FIG1).unwrap();
        let text = save_game(&g);
        assert_eq!(load_game(&text).unwrap(), g);
        for g in [race_game(3, 2).unwrap(), tictactoe(Objective::WinOnly)] {
            assert_eq!(load_game(&save_game(&g)).unwrap(), g);
        }
    }

    #[test]
    fn save_is_stable_text() {
        let g = load_game(FIG1).unwrap();
        let text = save_game(&g);
        assert_eq!(save_game(&load_game(&text).unwrap()), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = load_game("vertex a\nedge a b\n").unwrap_err();
        assert_eq!(
            e,
            FormatError::Parse {
                line: 2,
                message: "unknown vertex `b`".into()
            }
        );
        let e = load_game("vertex a\nleaf x 1/0\n").unwrap_err();
        assert!(matches!(e, FormatError::Parse { line: 2, .. }));
        let e = load_game("vertex a\nbogus\n").unwrap_err();
        assert!(matches!(e, FormatError::Parse { line: 2, .. }));
        let e = load_game("vertex a b\n").unwrap_err();
        assert!(matches!(e, FormatError::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_weight_is_a_validation_error() {
        let text = "vertex a\nleaf x 1\nleaf y 1\nedge a x\nedge a y\n";
        let e = load_game(text).unwrap_err();
        assert!(matches!(
            e,
            FormatError::Invalid(GraphError::DuplicateLeafWeight { .. })
        ));
        assert!(e.to_string().contains("duplicate leaf weight"));
    }

    #[test]
    fn fractional_weights() {
        let text = "vertex a\nleaf x 1/2\nleaf y -3/4\nedge a x\nedge a y\n";
        let g = load_game(text).unwrap();
        assert!(save_game(&g).contains("leaf y -3/4"));
    }
}
