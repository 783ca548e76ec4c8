//! Exhaustive breadth-first search over a finite window of the board.
//!
//! Cells outside the window are frozen. Every move removes `k - 1` checkers,
//! so the reachable set is finite; `exhausted` reports whether all of it was
//! visited within the state budget.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::board::{BoardState, GameParams, Move, Position, Window};
use crate::error::{invalid, Result};
use crate::trace::{Claim, MoveTrace};

pub const DEFAULT_MAX_STATES: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MaxRow,
    MaxCountAt(Position),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub params: GameParams,
    pub window: Window,
    pub max_states: usize,
    pub objective: Objective,
    pub prune: bool,
    pub parallel: bool,
}

impl SearchConfig {
    /// Rows `[-depth, top]`; every other axis spans `[-radius, radius]`.
    pub fn new(params: GameParams, depth: i64, top: i64, radius: i64, objective: Objective) -> Result<Self> {
        if depth < 0 || top < 0 || radius < 0 {
            return Err(invalid("window extents must be non-negative"));
        }
        let d = params.d;
        let mut lo = vec![-radius; d];
        let mut hi = vec![radius; d];
        lo[d - 1] = -depth;
        hi[d - 1] = top;
        if let Objective::MaxCountAt(p) = &objective {
            if p.dim() != d {
                return Err(invalid("objective cell has the wrong dimension"));
            }
        }
        Ok(Self {
            params,
            window: Window::new(lo, hi),
            max_states: DEFAULT_MAX_STATES,
            objective,
            prune: true,
            parallel: true,
        })
    }

    pub fn with_max_states(mut self, n: usize) -> Self {
        self.max_states = n;
        self
    }

    pub fn with_prune(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: i64,
    pub witness: MoveTrace,
    pub exhausted: bool,
    pub states: usize,
}

/// Per-cell counts over the window cells, in window order.
pub type State = Box<[u16]>;

/// Drops every state that is pointwise at most another one; of equal states
/// the first is kept. Order is preserved.
pub fn dominance_prune(states: Vec<State>) -> Vec<State> {
    let dominated = |i: usize| {
        states.iter().enumerate().any(|(j, other)| {
            j != i
                && states[i].iter().zip(other.iter()).all(|(a, b)| a <= b)
                && (states[i] != *other || j < i)
        })
    };
    let keep: Vec<bool> = (0..states.len()).map(|i| !dominated(i)).collect();
    states
        .into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

struct Geometry {
    cells: Vec<Position>,
    rows: Vec<i64>,
    /// Cell indices of each move line: `k` jumped cells then the landing.
    lines: Vec<Vec<usize>>,
    moves: Vec<Move>,
}

impl Geometry {
    fn new(params: GameParams, window: &Window) -> Self {
        let cells = window.cells();
        let index: HashMap<&Position, usize> = cells.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let k = params.k;
        let mut lines = Vec::new();
        let mut moves = Vec::new();
        for p in &cells {
            for axis in 0..params.d {
                for sign in [1i8, -1] {
                    let mv = Move::new(p.clone(), axis, sign);
                    let line: Option<Vec<usize>> = (0..=k).map(|j| index.get(&mv.cell(j)).copied()).collect();
                    if let Some(line) = line {
                        lines.push(line);
                        moves.push(mv);
                    }
                }
            }
        }
        let rows = cells.iter().map(|p| p.row()).collect();
        Self {
            cells,
            rows,
            lines,
            moves,
        }
    }

    fn successors(&self, state: &State) -> Vec<(State, usize)> {
        let mut out = Vec::new();
        for (mi, line) in self.lines.iter().enumerate() {
            let (jumped, landing) = line.split_at(line.len() - 1);
            if jumped.iter().all(|&c| state[c] > 0) {
                let mut next = state.clone();
                for &c in jumped {
                    next[c] -= 1;
                }
                next[landing[0]] = next[landing[0]].saturating_add(1);
                out.push((next, mi));
            }
        }
        out
    }
}

fn value_of(objective: &Objective, geo: &Geometry, target: Option<usize>, state: &State) -> i64 {
    match objective {
        Objective::MaxRow => state
            .iter()
            .zip(&geo.rows)
            .filter(|(c, _)| **c > 0)
            .map(|(_, r)| *r)
            .max()
            .unwrap_or(i64::MIN),
        Objective::MaxCountAt(_) => target.map(|t| state[t] as i64).unwrap_or(0),
    }
}

/// States that add `k - 1` checkers to `state` in any cells.
fn one_layer_up(state: &State, extra: usize, from: usize, out: &mut Vec<State>) {
    if extra == 0 {
        out.push(state.clone());
        return;
    }
    for c in from..state.len() {
        let mut s = state.clone();
        s[c] = s[c].saturating_add(1);
        one_layer_up(&s, extra - 1, c, out);
    }
}

pub fn bfs_optimum(config: &SearchConfig) -> Result<SearchResult> {
    let params = config.params;
    if config.window.is_empty() || config.window.cells().first().map(|p| p.dim()) != Some(params.d) {
        return Err(invalid("search window is empty or has the wrong dimension"));
    }
    if config.max_states == 0 {
        return Err(invalid("state budget must be positive"));
    }
    let geo = Geometry::new(params, &config.window);
    let target = match &config.objective {
        Objective::MaxCountAt(p) => Some(
            geo.cells
                .iter()
                .position(|c| c == p)
                .ok_or_else(|| invalid(format!("objective cell {p} is outside the window")))?,
        ),
        Objective::MaxRow => None,
    };
    let start_board = BoardState::initial(params);
    let start: State = geo
        .cells
        .iter()
        .map(|p| start_board.background_at(p) as u16)
        .collect();

    let mut states: Vec<State> = vec![start.clone()];
    let mut parents: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(start.clone(), 0);
    let mut layer_start = 0;
    let mut best = (value_of(&config.objective, &geo, target, &start), 0);
    let mut exhausted = true;
    let mut previous_layer: Vec<usize> = Vec::new();

    'search: loop {
        let frontier: Vec<usize> = (layer_start..states.len()).collect();
        if frontier.is_empty() {
            break;
        }
        let expand = |&i: &usize| geo.successors(&states[i]).into_iter().map(move |(s, m)| (s, i, m)).collect::<Vec<_>>();
        let succ: Vec<Vec<(State, usize, usize)>> = if config.parallel {
            frontier.par_iter().map(expand).collect()
        } else {
            frontier.iter().map(expand).collect()
        };
        let next_start = states.len();
        for (s, parent, mv) in succ.into_iter().flatten() {
            if seen.contains_key(&s) {
                continue;
            }
            if config.prune && !previous_layer.is_empty() {
                // A state below one of the previous layer is redundant.
                let mut ups = Vec::new();
                one_layer_up(&s, params.k - 1, 0, &mut ups);
                if ups.iter().any(|u| seen.get(u).is_some_and(|&j| j < next_start)) {
                    continue;
                }
            }
            if states.len() >= config.max_states {
                exhausted = false;
                break 'search;
            }
            let v = value_of(&config.objective, &geo, target, &s);
            let idx = states.len();
            if v > best.0 {
                best = (v, idx);
            }
            seen.insert(s.clone(), idx);
            states.push(s);
            parents.push(Some((parent, mv)));
        }
        previous_layer = frontier;
        layer_start = next_start;
    }

    let mut path = Vec::new();
    let mut cur = best.1;
    while let Some((parent, mv)) = parents[cur] {
        path.push(geo.moves[mv].clone());
        cur = parent;
    }
    path.reverse();
    let claim = match &config.objective {
        Objective::MaxRow => Claim::Row(best.0),
        Objective::MaxCountAt(p) => Claim::Count {
            count: best.0,
            at: p.clone(),
        },
    };
    Ok(SearchResult {
        value: best.0,
        witness: MoveTrace::new(params, path, Some(claim)),
        exhausted,
        states: states.len(),
    })
}
