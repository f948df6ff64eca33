//! Built-in game families: race games and all-pay tic-tac-toe.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{GameGraph, GameGraphBuilder, VertexId};
use crate::ratio::rat;

pub const TARGET1: &str = "t1";
pub const TARGET2: &str = "t2";
pub const ROOT: &str = "root";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("race game needs n >= 1 and m >= 1 (got n = {n}, m = {m})")]
    EmptyRace { n: usize, m: usize },
    #[error("invalid board `{0}`: expected 9 cells over `.`, `X`, `O`")]
    InvalidBoard(String),
    #[error("unknown objective `{0}` (expected win-only or win-or-draw)")]
    UnknownObjective(String),
}

/// Name of race-game state `(i, j)`: Player 1 still needs `i` wins, Player 2 needs `j`.
pub fn race_vertex_name(n: usize, m: usize, i: usize, j: usize) -> String {
    if i == 0 {
        TARGET1.to_string()
    } else if j == 0 {
        TARGET2.to_string()
    } else if (i, j) == (n, m) {
        ROOT.to_string()
    } else {
        format!("v{i}_{j}")
    }
}

/// The race game `G(n, m)`: Player 1 wins after `n` bidding wins, Player 2 after `m`.
pub fn race_game(n: usize, m: usize) -> Result<GameGraph, GeneratorError> {
    if n == 0 || m == 0 {
        return Err(GeneratorError::EmptyRace { n, m });
    }
    let mut b = GameGraph::builder();
    // States in decreasing i + j so that the root comes first.
    let mut states: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (1..=m).map(move |j| (i, j)))
        .collect();
    states.sort_by_key(|&(i, j)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i)));
    let mut ids = HashMap::new();
    for &(i, j) in &states {
        ids.insert((i, j), b.vertex(&race_vertex_name(n, m, i, j)).expect("unique names"));
    }
    let t1 = b.leaf(TARGET1, rat(1, 1)).expect("unique names");
    let t2 = b.leaf(TARGET2, rat(0, 1)).expect("unique names");
    let id = |i: usize, j: usize| -> VertexId {
        if i == 0 {
            t1
        } else if j == 0 {
            t2
        } else {
            ids[&(i, j)]
        }
    };
    for &(i, j) in &states {
        b.edge_ids(id(i, j), id(i - 1, j));
        b.edge_ids(id(i, j), id(i, j - 1));
    }
    b.root(ROOT).expect("root exists");
    Ok(b.build().expect("race games are valid"))
}

/// "Win n in a row": `G(n, 1)`.
pub fn win_n_in_a_row(n: usize) -> Result<GameGraph, GeneratorError> {
    race_game(n, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Draws count as Player 2 wins.
    WinOnly,
    /// Draws count as Player 1 wins.
    WinOrDraw,
}

impl FromStr for Objective {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "win-only" => Ok(Objective::WinOnly),
            "win-or-draw" => Ok(Objective::WinOrDraw),
            _ => Err(GeneratorError::UnknownObjective(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Blank,
    X,
    O,
}

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

/// A 3×3 board, cells in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Board(pub [Cell; 9]);

impl Board {
    pub fn empty() -> Self {
        Board([Cell::Blank; 9])
    }

    pub fn has_line(&self, mark: Cell) -> bool {
        LINES
            .iter()
            .any(|line| line.iter().all(|&c| self.0[c] == mark))
    }

    pub fn is_full(&self) -> bool {
        self.0.iter().all(|&c| c != Cell::Blank)
    }

    pub fn marks(&self) -> usize {
        self.0.iter().filter(|&&c| c != Cell::Blank).count()
    }

    /// `Some(true)` if the board is terminal and Player 1 wins, `Some(false)` if
    /// Player 2 wins, `None` if play continues.
    pub fn outcome(&self, objective: Objective) -> Option<bool> {
        if self.has_line(Cell::X) {
            Some(true)
        } else if self.has_line(Cell::O) {
            Some(false)
        } else if self.is_full() {
            Some(objective == Objective::WinOrDraw)
        } else {
            None
        }
    }

    /// Every board reachable by placing one X or one O on a blank cell.
    pub fn children(&self) -> impl Iterator<Item = Board> + '_ {
        (0..9)
            .filter(|&i| self.0[i] == Cell::Blank)
            .flat_map(move |i| {
                [Cell::X, Cell::O].into_iter().map(move |mark| {
                    let mut next = *self;
                    next.0[i] = mark;
                    next
                })
            })
    }

    /// Vertex id used in generated graphs: `root` for the empty board.
    pub fn vertex_name(&self) -> String {
        if *self == Board::empty() {
            ROOT.to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0 {
            let ch = match c {
                Cell::Blank => '.',
                Cell::X => 'X',
                Cell::O => 'O',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for Board {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cells: Vec<char> = s.chars().filter(|c| !matches!(c, '/' | '|')).collect();
        if cells.len() != 9 {
            return Err(GeneratorError::InvalidBoard(s.to_string()));
        }
        let mut board = Board::empty();
        for (i, ch) in cells.into_iter().enumerate() {
            board.0[i] = match ch {
                '.' | '_' | ' ' => Cell::Blank,
                'X' | 'x' => Cell::X,
                'O' | 'o' => Cell::O,
                _ => return Err(GeneratorError::InvalidBoard(s.to_string())),
            };
        }
        Ok(board)
    }
}

const REACH_T1: u8 = 1;
const REACH_T2: u8 = 2;

/// All-pay tic-tac-toe: the bidding winner places an X or an O on any blank cell.
/// Player 1 wants an X-line.
///
/// Terminal boards map to the leaves `t1` (weight 1) and `t2` (weight 0). A
/// non-terminal board from which only one of the two outcomes is reachable is
/// already decided and is merged into that leaf.
pub fn tictactoe(objective: Objective) -> GameGraph {
    // Breadth-first enumeration from the empty board; terminal boards are not expanded.
    let mut order = vec![Board::empty()];
    let mut seen: HashMap<Board, usize> = HashMap::from([(Board::empty(), 0)]);
    let mut head = 0;
    while head < order.len() {
        let board = order[head];
        head += 1;
        if board.outcome(objective).is_some() {
            continue;
        }
        for child in board.children() {
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(child) {
                e.insert(order.len());
                order.push(child);
            }
        }
    }

    // Which outcomes each board can still reach; children always carry more marks.
    let mut reach = vec![0u8; order.len()];
    let mut by_marks: Vec<usize> = (0..order.len()).collect();
    by_marks.sort_by_key(|&i| std::cmp::Reverse(order[i].marks()));
    for &i in &by_marks {
        reach[i] = match order[i].outcome(objective) {
            Some(true) => REACH_T1,
            Some(false) => REACH_T2,
            None => order[i]
                .children()
                .map(|c| reach[seen[&c]])
                .fold(0, |a, r| a | r),
        };
    }

    let mut b = GameGraphBuilder::default();
    let mut vertex_of: Vec<Option<VertexId>> = vec![None; order.len()];
    for (i, board) in order.iter().enumerate() {
        if board.outcome(objective).is_none() && reach[i] == REACH_T1 | REACH_T2 {
            vertex_of[i] = Some(b.vertex(&board.vertex_name()).expect("unique boards"));
        }
    }
    let t1 = b.leaf(TARGET1, rat(1, 1)).expect("unique names");
    let t2 = b.leaf(TARGET2, rat(0, 1)).expect("unique names");
    for (i, board) in order.iter().enumerate() {
        let Some(src) = vertex_of[i] else { continue };
        let mut targets: Vec<VertexId> = Vec::new();
        for child in board.children() {
            let j = seen[&child];
            let dst = vertex_of[j].unwrap_or(if reach[j] == REACH_T1 { t1 } else { t2 });
            if !targets.contains(&dst) {
                targets.push(dst);
            }
        }
        for dst in targets {
            b.edge_ids(src, dst);
        }
    }
    b.root(ROOT).expect("empty board is undecided");
    b.build().expect("generated tic-tac-toe graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_race() {
        let g = race_game(1, 1).unwrap();
        assert_eq!(g.len(), 3);
        let r = g.root().unwrap();
        assert_eq!(g.name(r), "root");
        assert_eq!(g.successors(r).len(), 2);
    }

    #[test]
    fn wnr2_is_the_four_vertex_chain() {
        let g = win_n_in_a_row(2).unwrap();
        assert_eq!(g.len(), 4);
        let names: Vec<Vec<&str>> = g
            .internal()
            .map(|v| g.successors(v).iter().map(|&u| g.name(u)).collect())
            .collect();
        assert_eq!(names, vec![vec!["v1_1", "t2"], vec!["t1", "t2"]]);
    }

    #[test]
    fn race_shape() {
        let g = race_game(3, 2).unwrap();
        assert_eq!(g.internal().count(), 6);
        assert_eq!(g.longest_path(), Some(4));
        assert!(race_game(0, 2).is_err());
        assert!(race_game(2, 0).is_err());
    }

    #[test]
    fn board_parsing() {
        let b: Board = "...O.....".parse().unwrap();
        assert_eq!(b.0[3], Cell::O);
        assert_eq!(b.to_string(), "...O.....");
        assert_eq!("XXX/.../OO.".parse::<Board>().unwrap().outcome(Objective::WinOnly), Some(true));
        assert!("XX".parse::<Board>().is_err());
    }

    #[test]
    fn tictactoe_never_contains_double_lines() {
        for objective in [Objective::WinOnly, Objective::WinOrDraw] {
            let g = tictactoe(objective);
            assert!(g.is_dag());
            assert!(g.len() <= 3usize.pow(9));
            for v in g.internal() {
                let name = g.name(v);
                if name == ROOT {
                    continue;
                }
                let b: Board = name.parse().unwrap();
                assert!(b.outcome(objective).is_none());
            }
        }
    }
}
