//! Constructive plans: k-nacci jumping, filling a column, amassing checkers
//! on one cell, and lifting one-dimensional plans into `Z^d`.
//!
//! One-dimensional plans live on the line `Z` with the board's row as the only
//! coordinate. Rows are topped up deepest first: `c` checkers are added to a
//! row by `c` jumps from `k` rows below it.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::FieldElement;
use crate::board::{BoardState, GameParams, Move, Position, Window};
use crate::bounds::{achieved_row, max_row_1d, projected_m, row1_cap};
use crate::error::{invalid, Error, Result};
use crate::pagoda::{EnergyAudit, EnergyChecker, WeightSpec};
use crate::sequences::{cumulative_a, knacci, partial_sum};
use crate::trace::{Claim, MoveTrace};

const SEARCH_LIMIT: usize = 100_000;

/// Jumps that turn a stack of `S_i(n)` counts into a checker on row `n`.
#[derive(Clone, Debug)]
pub struct KnacciPlan {
    pub k: usize,
    pub target_row: i64,
    /// Row `-i` holds `S_(k-1-i)(n)` for `i < k`; everything else is empty.
    pub start: BoardState,
    pub moves: Vec<Move>,
}

impl KnacciPlan {
    pub fn replay(&self) -> Result<BoardState> {
        self.start.replay(&self.moves)
    }
}

fn line(row: i64) -> Position {
    Position::new(vec![row])
}

fn to_u64(n: &BigInt) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| invalid(format!("move count {n} does not fit in 64 bits")))
}

fn knacci_moves(k: usize, n: i64) -> Result<Vec<Move>> {
    let kk = k as i64;
    let mut moves = Vec::new();
    for p in 0..n {
        let count = to_u64(&knacci(k, (n - p + kk - 2) as usize)?)?;
        let from = line(p - (kk - 1));
        moves.extend(std::iter::repeat_n(Move::up(from), count as usize));
    }
    Ok(moves)
}

/// Counts `S_(k-1)(n), ..., S_0(n)` for rows `0, -1, ..., -(k-1)`.
fn stack_counts(k: usize, n: i64) -> Result<Vec<BigInt>> {
    (0..k).map(|i| partial_sum(k, k - 1 - i, n)).collect()
}

pub fn knacci_jump_plan(k: usize, n: i64) -> Result<KnacciPlan> {
    if n < 1 {
        return Err(invalid("target row must be at least 1"));
    }
    let params = GameParams::new(1, k, 1)?;
    let counts = stack_counts(k, n)?
        .iter()
        .enumerate()
        .map(|(i, c)| Ok((line(-(i as i64)), to_u64(c)? as i64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(KnacciPlan {
        k,
        target_row: n,
        start: BoardState::from_counts(params, counts)?,
        moves: knacci_moves(k, n)?,
    })
}

/// A one-dimensional plan on the fresh line.
#[derive(Clone, Debug)]
pub struct ConstructionPlan {
    pub params: GameParams,
    pub target_row: i64,
    /// `r_i`: checkers row `-i` must receive, ignoring that surplus rows
    /// cannot give checkers back.
    pub requirements: Vec<BigInt>,
    /// First `i` starting `k` consecutive non-positive requirements.
    pub cutoff: usize,
    /// Highest row whose additions are scheduled.
    pub top: i64,
    /// Checkers actually added to row `top - j`.
    pub adds: Vec<u64>,
    pub trace: MoveTrace,
}

impl ConstructionPlan {
    /// Lowest row any move touches.
    pub fn lowest_row(&self) -> i64 {
        self.trace
            .moves
            .iter()
            .map(|mv| mv.from.row())
            .min()
            .unwrap_or(1)
    }

    /// Rows touched by any move, landing cells included.
    pub fn touched_rows(&self) -> BTreeSet<i64> {
        let k = self.params.k;
        let mut rows = BTreeSet::new();
        for mv in &self.trace.moves {
            for j in 0..=k {
                rows.insert(mv.cell(j).row());
            }
        }
        rows
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Infeasibility {
    /// Sign of the exact quantity whose negativity is needed.
    pub field_sign: i32,
    /// Start of `k` consecutive requirements `r` with `(k - 1) r >= m`, which
    /// keeps every later requirement at least as large.
    pub witness_depth: usize,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum ColumnFill {
    Feasible(Box<ConstructionPlan>),
    Infeasible(Infeasibility),
}

impl ColumnFill {
    pub fn plan(&self) -> Option<&ConstructionPlan> {
        match self {
            ColumnFill::Feasible(p) => Some(p),
            ColumnFill::Infeasible(_) => None,
        }
    }
}

enum Outcome {
    Cutoff(usize),
    Diverges(usize),
}

/// Scans `r(0), r(1), ...` until `k` consecutive values are `<= 0` or `k`
/// consecutive values satisfy `(k - 1) r >= m`.
fn classify(k: usize, m: u64, mut r: impl FnMut(usize) -> Result<BigInt>) -> Result<(Outcome, Vec<BigInt>)> {
    let m_big = BigInt::from(m);
    let km1 = BigInt::from(k as u64 - 1);
    let (mut low_run, mut high_run) = (0, 0);
    let mut table = Vec::new();
    for i in 0..SEARCH_LIMIT {
        let v = r(i)?;
        if !v.is_positive() {
            low_run += 1;
        } else {
            low_run = 0;
        }
        if &km1 * &v >= m_big {
            high_run += 1;
        } else {
            high_run = 0;
        }
        table.push(v);
        if low_run == k {
            return Ok((Outcome::Cutoff(i + 1 - k), table));
        }
        if high_run == k {
            return Ok((Outcome::Diverges(i + 1 - k), table));
        }
    }
    Err(Error::Inconsistent(format!(
        "requirements undecided after {SEARCH_LIMIT} rows"
    )))
}

/// Adds for rows `top, top-1, ...` so that each row ends with at least its
/// target after feeding the jumps above it.
fn clipped_schedule(m: u64, k: usize, top: i64, targets: &[BigInt], limit: usize) -> Result<Vec<u64>> {
    let mut adds: Vec<BigInt> = Vec::new();
    for j in 0..limit {
        let background = if top - (j as i64) <= 0 { m } else { 0 };
        let mut need = targets.get(j).cloned().unwrap_or_default() - BigInt::from(background);
        for l in 1..=k.min(j) {
            need += &adds[j - l];
        }
        adds.push(need.max(BigInt::zero()));
        if j + 1 >= targets.len() && j + 1 >= k && adds[j + 1 - k..].iter().all(|a| a.is_zero()) {
            while adds.last().is_some_and(|a| a.is_zero()) {
                adds.pop();
            }
            return adds.iter().map(to_u64).collect();
        }
    }
    Err(Error::Inconsistent(format!(
        "schedule for m={m}, k={k} does not settle within {limit} rows"
    )))
}

fn schedule_moves(k: usize, top: i64, adds: &[u64]) -> Vec<Move> {
    let mut moves = Vec::new();
    for j in (0..adds.len()).rev() {
        let from = line(top - j as i64 - k as i64);
        moves.extend(std::iter::repeat_n(Move::up(from), adds[j] as usize));
    }
    moves
}

/// Fill the column so that k-nacci jumping reaches row `n`.
///
/// Row `-i` needs `r_i = F_k(n+i+k-1) - a_i m` extra checkers. The plan
/// exists exactly when `phi_k^(n-1) (phi_k - 1) < m`; the integer scan of
/// `r_i` must agree.
pub fn column_fill_plan(m: u64, k: usize, n: i64) -> Result<ColumnFill> {
    if m <= 1 {
        return Err(invalid("column fill needs m > 1"));
    }
    if n < 1 {
        return Err(invalid("target row must be at least 1"));
    }
    let params = GameParams::new(m, k, 1)?;
    let one = FieldElement::one(k);
    let field_sign = (&(&FieldElement::phi_pow(k, n - 1) * &(&FieldElement::phi(k) - &one))
        - &FieldElement::from_integer(k, m))
        .sign();
    let mb = BigInt::from(m);
    let (outcome, table) = classify(k, m, |i| {
        Ok(knacci(k, (n + i as i64 + k as i64 - 1) as usize)? - cumulative_a(k, i)? * &mb)
    })?;
    match outcome {
        Outcome::Diverges(depth) => {
            if field_sign < 0 {
                return Err(Error::Inconsistent(format!(
                    "m={m} k={k} n={n}: field says feasible, requirements diverge"
                )));
            }
            Ok(ColumnFill::Infeasible(Infeasibility {
                field_sign,
                witness_depth: depth,
                witness: table[depth..].iter().map(|v| v.to_string()).collect(),
            }))
        }
        Outcome::Cutoff(cutoff) => {
            if field_sign >= 0 {
                return Err(Error::Inconsistent(format!(
                    "m={m} k={k} n={n}: requirements settle, field says infeasible"
                )));
            }
            let targets = stack_counts(k, n)?;
            let adds = clipped_schedule(m, k, 0, &targets, cutoff + SEARCH_LIMIT)?;
            let mut moves = schedule_moves(k, 0, &adds);
            moves.extend(knacci_moves(k, n)?);
            let trace = MoveTrace::new(params, moves, Some(Claim::Row(n)));
            Ok(ColumnFill::Feasible(Box::new(ConstructionPlan {
                params,
                target_row: n,
                requirements: table,
                cutoff,
                top: 0,
                adds,
                trace,
            })))
        }
    }
}

/// Amass `count` extra checkers on row 1 of the fresh line.
///
/// Row `-i` needs `F_k(k+i) count - a_i m`; possible exactly when
/// `count (phi_k - 1) < m`.
pub fn amass_plan(m: u64, k: usize, count: u64) -> Result<Option<ConstructionPlan>> {
    let params = GameParams::new(m, k, 1)?;
    let one = FieldElement::one(k);
    let field_sign = (&FieldElement::from_integer(k, count).checked_mul(&(&FieldElement::phi(k) - &one))?
        - &FieldElement::from_integer(k, m))
        .sign();
    let (mb, cb) = (BigInt::from(m), BigInt::from(count));
    let (outcome, table) = classify(k, m, |i| {
        Ok(knacci(k, k + i)? * &cb - cumulative_a(k, i)? * &mb)
    })?;
    let cutoff = match outcome {
        Outcome::Cutoff(c) if field_sign < 0 => c,
        Outcome::Diverges(_) if field_sign >= 0 => return Ok(None),
        _ => {
            return Err(Error::Inconsistent(format!(
                "amass m={m} k={k} count={count}: integer and field tests disagree"
            )))
        }
    };
    let adds = clipped_schedule(m, k, 1, &[cb], cutoff + SEARCH_LIMIT)?;
    let moves = schedule_moves(k, 1, &adds);
    let claim = Claim::Count {
        count: count as i64,
        at: line(1),
    };
    Ok(Some(ConstructionPlan {
        params,
        target_row: 1,
        requirements: table,
        cutoff,
        top: 1,
        adds,
        trace: MoveTrace::new(params, moves, Some(claim)),
    }))
}

/// Amass `row1_cap(m, k)` checkers on row 1.
pub fn row1_amass_plan(m: u64, k: usize) -> Result<ConstructionPlan> {
    let count = row1_cap(m, k)?;
    amass_plan(m, k, count)?.ok_or_else(|| {
        Error::Inconsistent(format!("row-1 cap {count} not attainable for m={m} k={k}"))
    })
}

/// Places a one-dimensional plan on a line of `Z^d`: coordinate `r` of the
/// line goes to `origin + orientation * r * e_axis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub origin: Position,
    pub axis: usize,
    pub orientation: i8,
}

impl Embedding {
    pub fn column(d: usize) -> Self {
        Self {
            origin: Position::new(vec![0; d]),
            axis: d - 1,
            orientation: 1,
        }
    }

    /// Line coordinate 1 lands on `center`, lower coordinates lie on the side
    /// `-orientation` of it.
    pub fn onto(center: &Position, axis: usize, orientation: i8) -> Self {
        Self {
            origin: center.shifted(axis, -(orientation as i64)),
            axis,
            orientation,
        }
    }

    pub fn position(&self, r: i64) -> Position {
        self.origin.shifted(self.axis, self.orientation as i64 * r)
    }

    pub fn map_move(&self, mv: &Move) -> Move {
        Move::new(
            self.position(mv.from.row()),
            self.axis,
            mv.sign * self.orientation,
        )
    }

    pub fn map_moves(&self, moves: &[Move]) -> Vec<Move> {
        moves.iter().map(|mv| self.map_move(mv)).collect()
    }
}

/// One projection step: every center gets `2 row1_cap(count)` more checkers
/// amassed along `axis`, one half from each side.
#[derive(Clone, Debug)]
pub struct ProjectionLevel {
    pub axis: usize,
    /// Checkers per cell before this step.
    pub count: u64,
    pub amass: ConstructionPlan,
    pub centers: Vec<Position>,
}

impl ProjectionLevel {
    pub fn fibers(&self, center: &Position) -> [Embedding; 2] {
        [
            Embedding::onto(center, self.axis, 1),
            Embedding::onto(center, self.axis, -1),
        ]
    }

    pub fn fiber_moves(&self, center: &Position) -> Vec<Move> {
        let mut out = Vec::new();
        for e in self.fibers(center) {
            out.extend(e.map_moves(&self.amass.trace.moves));
        }
        out
    }
}

/// A plan for `Z^d` in compositional form: projection levels in execution
/// order, then one-dimensional plans on the final column.
#[derive(Clone, Debug)]
pub struct ProjectionPlan {
    pub params: GameParams,
    pub levels: Vec<ProjectionLevel>,
    pub finale: Vec<(Embedding, ConstructionPlan)>,
    pub claim: Claim,
}

impl ProjectionPlan {
    /// All moves: levels in order, centers in lexicographic order, then the
    /// finale.
    pub fn flatten(&self) -> MoveTrace {
        let mut moves = Vec::new();
        for level in &self.levels {
            let chunks: Vec<Vec<Move>> = level
                .centers
                .par_iter()
                .map(|c| level.fiber_moves(c))
                .collect();
            moves.extend(chunks.into_iter().flatten());
        }
        for (e, plan) in &self.finale {
            moves.extend(e.map_moves(&plan.trace.moves));
        }
        MoveTrace::new(self.params, moves, Some(self.claim.clone()))
    }

    /// Moves of the fibers and finale pieces lying entirely inside `window`,
    /// in flattened order.
    pub fn instantiate(&self, window: &Window) -> Vec<Move> {
        let k = self.params.k;
        let inside = |moves: &[Move]| {
            moves
                .iter()
                .all(|mv| window.contains(&mv.from) && window.contains(&mv.landing(k)))
        };
        let mut out = Vec::new();
        for level in &self.levels {
            for c in &level.centers {
                let fiber = level.fiber_moves(c);
                if inside(&fiber) {
                    out.extend(fiber);
                }
            }
        }
        for (e, plan) in &self.finale {
            let piece = e.map_moves(&plan.trace.moves);
            if inside(&piece) {
                out.extend(piece);
            }
        }
        out
    }

    pub fn move_count(&self) -> usize {
        let levels: usize = self
            .levels
            .iter()
            .map(|l| 2 * l.amass.trace.len() * l.centers.len())
            .sum();
        levels + self.finale.iter().map(|(_, p)| p.trace.len()).sum::<usize>()
    }
}

/// Smallest box containing every cell touched by `moves`.
pub fn bounding_window(d: usize, k: usize, moves: &[Move]) -> Window {
    if moves.is_empty() {
        return Window::new(vec![0; d], vec![-1; d]);
    }
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for mv in moves {
        for p in [mv.from.clone(), mv.landing(k)] {
            for (a, &x) in p.coords().iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }
    }
    Window::new(lo, hi)
}

fn required_cells(k: usize, pieces: &[(Embedding, &ConstructionPlan)]) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    for (e, plan) in pieces {
        for mv in &plan.trace.moves {
            for j in 0..=k {
                let p = e.position(mv.cell(j).row());
                if p.row() <= 0 {
                    out.insert(p);
                }
            }
        }
    }
    out
}

fn with_levels(
    params: GameParams,
    finale: Vec<(Embedding, ConstructionPlan)>,
    claim: Claim,
) -> Result<ProjectionPlan> {
    let counts = projected_m(params)?;
    let k = params.k;
    let mut required = required_cells(
        k,
        &finale.iter().map(|(e, p)| (e.clone(), p)).collect::<Vec<_>>(),
    );
    let mut levels = Vec::new();
    for axis in (0..params.d - 1).rev() {
        let amass = row1_amass_plan(counts[axis], k)?;
        let level = ProjectionLevel {
            axis,
            count: counts[axis],
            amass,
            centers: required.iter().cloned().collect(),
        };
        let pieces: Vec<(Embedding, &ConstructionPlan)> = level
            .centers
            .iter()
            .flat_map(|c| level.fibers(c))
            .map(|e| (e, &level.amass))
            .collect();
        let mut next = required_cells(k, &pieces);
        next.extend(level.centers.iter().cloned());
        required = next;
        levels.push(level);
    }
    levels.reverse();
    Ok(ProjectionPlan {
        params,
        levels,
        finale,
        claim,
    })
}

/// Reach `achieved_row(params)` by projecting to the column and filling it.
pub fn projection_plan(params: GameParams) -> Result<ProjectionPlan> {
    let counts = projected_m(params)?;
    let last = *counts.last().unwrap();
    let n = achieved_row(params)?;
    let column = Embedding::column(params.d);
    let plan = if last == 1 {
        // only d = 1 with m = 1: a single checker on row 1
        row1_amass_plan(1, params.k)?
    } else {
        match column_fill_plan(last, params.k, n)? {
            ColumnFill::Feasible(p) => *p,
            ColumnFill::Infeasible(_) => {
                return Err(Error::Inconsistent(format!(
                    "column fill to row {n} infeasible for m={last}"
                )))
            }
        }
    };
    with_levels(params, vec![(column, plan)], Claim::Row(n))
}

/// Amass onto one cell deep enough that both sides of its column are full.
pub fn single_square_plan(params: GameParams) -> Result<ProjectionPlan> {
    let counts = projected_m(params)?;
    let last = *counts.last().unwrap();
    let amass = row1_amass_plan(last, params.k)?;
    let depth = 1 - amass.lowest_row();
    let center = Position::on_column(params.d, -depth);
    let axis = params.d - 1;
    let total = last + 2 * row1_cap(last, params.k)?;
    let claim = Claim::Count {
        count: total as i64,
        at: center.clone(),
    };
    let finale = vec![
        (Embedding::onto(&center, axis, 1), amass.clone()),
        (Embedding::onto(&center, axis, -1), amass),
    ];
    with_levels(params, finale, claim)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub moves: usize,
    pub claim_holds: Option<bool>,
    pub max_row: i64,
    pub target: Position,
    pub energy: Option<EnergyAudit>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.claim_holds != Some(false)
            && self.energy.as_ref().is_none_or(|a| a.increases == 0)
    }
}

/// Replays a trace on the fresh board and checks its claim. With
/// `energy_check`, every move's energy change is classified against the
/// claimed cell.
pub fn verify_trace(trace: &MoveTrace, energy_check: bool) -> Result<VerifyReport> {
    let params = trace.params;
    let start = BoardState::initial(params);
    let end = start.replay(&trace.moves)?;
    let target = match &trace.claim {
        Some(Claim::Count { at, .. }) => at.clone(),
        Some(Claim::Row(n)) => Position::on_column(params.d, *n),
        None => Position::on_column(params.d, end.max_row_occupied().max(1)),
    };
    let energy = if energy_check {
        let mut checker = EnergyChecker::new(WeightSpec::new(params.k, target.clone())?);
        Some(checker.audit(&start, &trace.moves)?)
    } else {
        None
    };
    let claim_holds = trace.claim.as_ref().map(|c| c.holds(&end)).transpose()?;
    Ok(VerifyReport {
        moves: trace.len(),
        claim_holds,
        max_row: end.max_row_occupied(),
        target,
        energy,
    })
}

/// `max_row_1d` and the column-fill planner agree on the highest row.
pub fn column_fill_matches_bound(m: u64, k: usize) -> Result<bool> {
    let n = max_row_1d(m, k)?;
    let at = column_fill_plan(m, k, n)?;
    let above = column_fill_plan(m, k, n + 1)?;
    Ok(at.plan().is_some() && above.plan().is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn knacci_jumping() {
        let p = knacci_jump_plan(2, 2).unwrap();
        assert_eq!(p.moves.len(), 2);
        assert_eq!(p.replay().unwrap().max_row_occupied(), 2);
        let p = knacci_jump_plan(3, 2).unwrap();
        let start: Vec<i64> = (0..3).map(|i| p.start.count_at(&line(-i)).unwrap()).collect();
        assert_eq!(start, vec![2, 2, 1]);
        assert_eq!(p.moves.len(), 2);
        assert_eq!(p.replay().unwrap().max_row_occupied(), 2);
        let p = knacci_jump_plan(2, 10).unwrap();
        assert_eq!(p.start.count_at(&line(0)).unwrap(), 89);
        assert_eq!(p.start.count_at(&line(-1)).unwrap(), 55);
        // F(2) + ... + F(11)
        assert_eq!(p.moves.len(), 143);
        assert_eq!(p.replay().unwrap().max_row_occupied(), 10);
        assert!(knacci_jump_plan(2, 0).is_err());
    }

    #[test]
    fn column_fill_examples() {
        let ColumnFill::Feasible(p) = column_fill_plan(3, 2, 4).unwrap() else {
            panic!("expected a plan")
        };
        assert_eq!(p.requirements[..5], big(&[2, 2, 1, 0, -2])[..]);
        assert_eq!(p.cutoff, 3);
        assert_eq!(p.trace.replay().unwrap().max_row_occupied(), 4);
        let ColumnFill::Feasible(p) = column_fill_plan(2, 2, 3).unwrap() else {
            panic!("expected a plan")
        };
        assert_eq!(p.requirements[..4], big(&[1, 1, 0, -1])[..]);
        assert_eq!(p.trace.replay().unwrap().max_row_occupied(), 3);
        let ColumnFill::Infeasible(cert) = column_fill_plan(2, 2, 4).unwrap() else {
            panic!("expected infeasible")
        };
        assert_eq!(cert.field_sign, 1);
        assert!(column_fill_plan(1, 2, 1).is_err());
    }

    #[test]
    fn amass_examples() {
        let p = row1_amass_plan(1, 2).unwrap();
        assert_eq!(p.trace.moves, vec![Move::up(line(-1))]);
        for (m, cap) in [(2, 3), (5, 8)] {
            let p = row1_amass_plan(m, 2).unwrap();
            let end = p.trace.replay().unwrap();
            assert_eq!(end.added_at(&line(1)), cap);
            assert_eq!(end.delta().keys().filter(|p| p.row() > 1).count(), 0);
        }
        assert!(amass_plan(2, 2, 4).unwrap().is_none());
    }

    #[test]
    fn embeddings() {
        let c = Position::new(vec![0, -3]);
        let e = Embedding::onto(&c, 0, -1);
        assert_eq!(e.position(1), c);
        assert_eq!(e.position(0), Position::new(vec![1, -3]));
        let mv = e.map_move(&Move::up(line(-1)));
        assert_eq!(mv, Move::new(Position::new(vec![2, -3]), 0, -1));
        assert_eq!(mv.landing(2), c);
    }

    #[test]
    fn projection_d2() {
        for (m, n, per_cell) in [(1, 4, 3), (3, 6, 11)] {
            let params = GameParams::new(m, 2, 2).unwrap();
            let plan = projection_plan(params).unwrap();
            let trace = plan.flatten();
            assert_eq!(trace.len(), plan.move_count());
            let report = verify_trace(&trace, true).unwrap();
            assert!(report.passed());
            assert_eq!(report.max_row, n);
            // counts on the column just before the finale
            let before = trace.moves.len() - plan.finale[0].1.trace.len();
            let mid = BoardState::initial(params).replay(&trace.moves[..before]).unwrap();
            for row in plan.finale[0].1.touched_rows().into_iter().filter(|&r| r <= 0) {
                assert_eq!(mid.count_at(&Position::on_column(2, row)).unwrap(), per_cell);
            }
            let window = bounding_window(2, 2, &trace.moves);
            assert_eq!(plan.instantiate(&window), trace.moves);
        }
    }

    #[test]
    fn projection_d1_is_column_fill() {
        let params = GameParams::new(3, 2, 1).unwrap();
        let plan = projection_plan(params).unwrap();
        assert!(plan.levels.is_empty());
        let ColumnFill::Feasible(direct) = column_fill_plan(3, 2, 4).unwrap() else {
            panic!()
        };
        assert_eq!(plan.flatten().moves, direct.trace.moves);
        let unit = projection_plan(GameParams::new(1, 2, 1).unwrap()).unwrap();
        assert_eq!(verify_trace(&unit.flatten(), true).unwrap().max_row, 1);
    }

    #[test]
    fn single_square_counts() {
        for (m, d, expect) in [(2, 1, 8), (1, 2, 11)] {
            let params = GameParams::new(m, 2, d).unwrap();
            let plan = single_square_plan(params).unwrap();
            let report = verify_trace(&plan.flatten(), true).unwrap();
            assert_eq!(report.claim_holds, Some(true));
            let Claim::Count { count, .. } = plan.claim else { panic!() };
            assert_eq!(count, expect);
        }
    }

    #[test]
    fn tampered_trace_fails() {
        let ColumnFill::Feasible(p) = column_fill_plan(3, 2, 4).unwrap() else {
            panic!()
        };
        let mut t = p.trace.clone();
        t.moves.remove(0);
        assert!(matches!(verify_trace(&t, false), Err(Error::ReplayFailed { .. })));
    }
}
