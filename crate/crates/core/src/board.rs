//! Game state on `Z^d`: a background occupancy plus a finite delta, and the
//! (m,k) jump rule.
//!
//! The last coordinate of a position is its row. With the half-space
//! background every cell with `row <= 0` starts with `m` checkers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameParams {
    /// Checkers per background cell.
    pub m: u64,
    /// Jump order: a move passes over `k - 1` cells.
    pub k: usize,
    /// Dimension of the board.
    pub d: usize,
}

impl GameParams {
    pub fn new(m: u64, k: usize, d: usize) -> Result<Self> {
        if m < 1 {
            return Err(invalid("m must be at least 1"));
        }
        if k < 2 {
            return Err(invalid("k must be at least 2"));
        }
        if d < 1 {
            return Err(invalid("d must be at least 1"));
        }
        Ok(Self { m, k, d })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<i64>);

impl Position {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    /// The cell `(0, ..., 0, row)`.
    pub fn on_column(d: usize, row: i64) -> Self {
        let mut c = vec![0; d];
        c[d - 1] = row;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn row(&self) -> i64 {
        *self.0.last().expect("zero-dimensional position")
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn shifted(&self, axis: usize, by: i64) -> Self {
        let mut c = self.0.clone();
        c[axis] += by;
        Self(c)
    }

    pub fn translated(&self, by: &[i64]) -> Self {
        Self(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }

    /// Taxicab distance.
    pub fn distance(&self, other: &Position) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A single jump: the checker at `from` moves `k` cells along `axis` in
/// direction `sign`, removing one checker from each of the `k - 1` cells
/// it passes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: Position,
    pub axis: usize,
    pub sign: i8,
}

impl Move {
    pub fn new(from: Position, axis: usize, sign: i8) -> Self {
        Self { from, axis, sign }
    }

    /// The upward move along the row axis.
    pub fn up(from: Position) -> Self {
        let axis = from.dim() - 1;
        Self::new(from, axis, 1)
    }

    /// `j`-th cell of the move line: 0 is the origin, `k` the landing cell.
    pub fn cell(&self, j: usize) -> Position {
        self.from.shifted(self.axis, self.sign as i64 * j as i64)
    }

    pub fn landing(&self, k: usize) -> Position {
        self.cell(k)
    }
}

/// Occupancy outside the finite delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    /// `m` checkers on every cell with `row <= 0`.
    HalfSpace,
    /// No checkers; only the delta is occupied.
    Empty,
}

/// Inclusive coordinate box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "window corners differ in dimension");
        Self { lo, hi }
    }

    /// 1-D window covering rows `low..=high`.
    pub fn rows(low: i64, high: i64) -> Self {
        Self::new(vec![low], vec![high])
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.dim() == self.lo.len()
            && p.0
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (l, h))| l <= c && c <= h)
    }

    /// All cells, in lexicographic order.
    pub fn cells(&self) -> Vec<Position> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (*l..=*h).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(Position).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoardState {
    params: GameParams,
    background: Background,
    delta: BTreeMap<Position, i64>,
}

impl BoardState {
    /// The starting position of the game.
    pub fn initial(params: GameParams) -> Self {
        Self {
            params,
            background: Background::HalfSpace,
            delta: BTreeMap::new(),
        }
    }

    /// An otherwise empty board holding the given counts.
    pub fn from_counts(
        params: GameParams,
        counts: impl IntoIterator<Item = (Position, i64)>,
    ) -> Result<Self> {
        let mut board = Self {
            params,
            background: Background::Empty,
            delta: BTreeMap::new(),
        };
        for (p, c) in counts {
            board.check_dim(&p)?;
            if c < 0 {
                return Err(invalid(format!("negative count {c} at {p}")));
            }
            board.adjust(&p, c);
        }
        Ok(board)
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    pub fn background(&self) -> Background {
        self.background
    }

    /// Non-zero delta entries, in position order.
    pub fn delta(&self) -> &BTreeMap<Position, i64> {
        &self.delta
    }

    pub fn background_at(&self, p: &Position) -> i64 {
        match self.background {
            Background::HalfSpace if p.row() <= 0 => self.params.m as i64,
            _ => 0,
        }
    }

    fn check_dim(&self, p: &Position) -> Result<()> {
        if p.dim() != self.params.d {
            return Err(Error::DimensionMismatch {
                expected: self.params.d,
                got: p.dim(),
            });
        }
        Ok(())
    }

    pub fn count_at(&self, p: &Position) -> Result<i64> {
        self.check_dim(p)?;
        Ok(self.count_unchecked(p))
    }

    fn count_unchecked(&self, p: &Position) -> i64 {
        self.background_at(p) + self.delta.get(p).copied().unwrap_or(0)
    }

    /// Difference from the background at `p`.
    pub fn added_at(&self, p: &Position) -> i64 {
        self.delta.get(p).copied().unwrap_or(0)
    }

    /// Sum of the delta: the checker count relative to the background.
    pub fn total_delta(&self) -> i64 {
        self.delta.values().sum()
    }

    /// Adds `by` checkers at `p` (negative removes). Counts stay non-negative.
    pub fn place(&mut self, p: &Position, by: i64) -> Result<()> {
        self.check_dim(p)?;
        if self.count_unchecked(p) + by < 0 {
            return Err(invalid(format!("count at {p} would become negative")));
        }
        self.adjust(p, by);
        Ok(())
    }

    fn adjust(&mut self, p: &Position, by: i64) {
        let entry = self.delta.entry(p.clone()).or_insert(0);
        *entry += by;
        if *entry == 0 {
            self.delta.remove(p);
        }
    }

    /// Highest row above 0 holding a checker; 0 when there is none.
    pub fn max_row_occupied(&self) -> i64 {
        self.delta
            .iter()
            .filter(|(p, _)| p.row() > 0)
            .filter(|(p, _)| self.count_unchecked(p) > 0)
            .map(|(p, _)| p.row())
            .max()
            .unwrap_or(0)
    }

    fn check_move(&self, mv: &Move) -> Result<()> {
        self.check_dim(&mv.from)?;
        if mv.axis >= self.params.d {
            return Err(invalid(format!("axis {} out of range", mv.axis)));
        }
        if mv.sign != 1 && mv.sign != -1 {
            return Err(invalid(format!("move sign must be +1 or -1, got {}", mv.sign)));
        }
        for j in 0..self.params.k {
            let cell = mv.cell(j);
            if self.count_unchecked(&cell) < 1 {
                return Err(Error::IllegalMove { cell });
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, mv: &Move) -> bool {
        self.check_move(mv).is_ok()
    }

    /// Applies a move in place. On error the board is unchanged.
    pub fn apply_move_mut(&mut self, mv: &Move) -> Result<()> {
        self.check_move(mv)?;
        let k = self.params.k;
        for j in 0..k {
            self.adjust(&mv.cell(j), -1);
        }
        self.adjust(&mv.landing(k), 1);
        Ok(())
    }

    pub fn apply_move(&self, mv: &Move) -> Result<Self> {
        let mut next = self.clone();
        next.apply_move_mut(mv)?;
        Ok(next)
    }

    /// Moves whose every cell lies in `window` and whose preconditions hold.
    pub fn legal_moves(&self, window: &Window) -> Vec<Move> {
        if window.is_empty() || window.lo.len() != self.params.d {
            return Vec::new();
        }
        let k = self.params.k;
        let mut out = Vec::new();
        for cell in window.cells() {
            if self.count_unchecked(&cell) < 1 {
                continue;
            }
            for axis in 0..self.params.d {
                for sign in [-1i8, 1] {
                    let mv = Move::new(cell.clone(), axis, sign);
                    if window.contains(&mv.landing(k)) && self.is_legal(&mv) {
                        out.push(mv);
                    }
                }
            }
        }
        out
    }

    /// Applies `moves` in order. Fails on the first illegal move, reporting
    /// its index; the original board is untouched.
    pub fn replay<'a>(&self, moves: impl IntoIterator<Item = &'a Move>) -> Result<Self> {
        let mut board = self.clone();
        for (index, mv) in moves.into_iter().enumerate() {
            board.apply_move_mut(mv).map_err(|e| match e {
                Error::IllegalMove { cell } => Error::ReplayFailed { index, cell },
                other => other,
            })?;
        }
        Ok(board)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(r: i64) -> Position {
        Position::new(vec![r])
    }

    fn params(m: u64, k: usize, d: usize) -> GameParams {
        GameParams::new(m, k, d).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(0, 2, 1).is_err());
        assert!(GameParams::new(1, 1, 1).is_err());
        assert!(GameParams::new(1, 2, 0).is_err());
    }

    #[test]
    fn counts_on_fresh_board() {
        let b = BoardState::initial(params(3, 2, 2));
        assert_eq!(b.count_at(&Position::new(vec![5, -2])).unwrap(), 3);
        assert_eq!(b.count_at(&Position::new(vec![0, 1])).unwrap(), 0);
        assert!(matches!(b.count_at(&p1(0)), Err(Error::DimensionMismatch { .. })));
        assert_eq!(b.max_row_occupied(), 0);
    }

    #[test]
    fn figure_one_move() {
        let pm = params(1, 3, 1);
        let b = BoardState::from_counts(pm, [(p1(0), 1), (p1(1), 1), (p1(2), 1)]).unwrap();
        let after = b.apply_move(&Move::up(p1(0))).unwrap();
        let counts: Vec<i64> = (0..4).map(|r| after.count_at(&p1(r)).unwrap()).collect();
        assert_eq!(counts, vec![0, 0, 0, 1]);
        assert_eq!(after.max_row_occupied(), 3);
    }

    #[test]
    fn simple_jumps_and_errors() {
        let pm = params(1, 2, 1);
        let b = BoardState::from_counts(pm, [(p1(0), 1), (p1(1), 1)]).unwrap();
        let after = b.apply_move(&Move::up(p1(0))).unwrap();
        assert_eq!(after.delta().iter().collect::<Vec<_>>(), vec![(&p1(2), &1)]);

        let b = BoardState::from_counts(pm, [(p1(0), 1)]).unwrap();
        match b.apply_move(&Move::up(p1(0))) {
            Err(Error::IllegalMove { cell }) => assert_eq!(cell, p1(1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(b.apply_move(&Move::new(p1(0), 1, 1)).is_err());
        assert!(b.apply_move(&Move::new(p1(0), 0, 2)).is_err());
    }

    #[test]
    fn legal_move_listing() {
        let b = BoardState::initial(params(1, 2, 1));
        let moves = b.legal_moves(&Window::rows(-3, 1));
        assert!(moves.contains(&Move::up(p1(-1))));
        assert!(b.legal_moves(&Window::rows(1, 0)).is_empty());
        assert!(b.legal_moves(&Window::rows(1, 5)).is_empty());
        for mv in &moves {
            assert!(b.is_legal(mv));
        }
    }

    #[test]
    fn replay_reports_index() {
        let pm = params(1, 2, 1);
        let start = BoardState::from_counts(pm, [(p1(0), 2), (p1(-1), 1)]).unwrap();
        let moves = vec![Move::up(p1(-1)), Move::up(p1(0))];
        let end = start.replay(&moves).unwrap();
        assert_eq!(end.count_at(&p1(2)).unwrap(), 1);
        assert_eq!(end.max_row_occupied(), 2);
        assert_eq!(start.replay(&[]).unwrap(), start);
        let bad = vec![Move::up(p1(-1)), Move::up(p1(-1))];
        match start.replay(&bad) {
            Err(Error::ReplayFailed { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn window_cells_are_lexicographic() {
        let w = Window::new(vec![0, -1], vec![1, 0]);
        let cells: Vec<Vec<i64>> = w.cells().into_iter().map(|p| p.0).collect();
        assert_eq!(cells, vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
        assert!(Window::rows(3, 2).cells().is_empty());
    }
}
