//! Pagoda weights `alpha^dist(p, T)` with `alpha = 1/phi_k`.
//!
//! Every energy here is an exact element of `Q(phi_k)`. A legal move never
//! raises the energy of a board, so a state whose energy exceeds the start
//! energy cannot be reached.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebraic::FieldElement;
use crate::board::{Background, BoardState, GameParams, Move, Position};
use crate::error::{invalid, Error, Result};

/// Weighting of the board around a target cell.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    target: Position,
    k: usize,
    alpha: FieldElement,
}

impl WeightSpec {
    pub fn new(k: usize, target: Position) -> Result<Self> {
        if k < 2 {
            return Err(invalid("k must be at least 2"));
        }
        if target.dim() == 0 {
            return Err(invalid("target needs at least one coordinate"));
        }
        Ok(Self {
            target,
            k,
            alpha: FieldElement::alpha(k),
        })
    }

    /// Target on the column axis at the given row.
    pub fn on_column(params: GameParams, row: i64) -> Result<Self> {
        Self::new(params.k, Position::on_column(params.d, row))
    }

    pub fn target(&self) -> &Position {
        &self.target
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    fn check_dim(&self, p: &Position) -> Result<()> {
        if p.dim() != self.target.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target.dim(),
                got: p.dim(),
            });
        }
        Ok(())
    }

    pub fn weight(&self, p: &Position) -> Result<FieldElement> {
        self.check_dim(p)?;
        Ok(self.weight_at_distance(p.distance(&self.target)))
    }

    pub fn weight_at_distance(&self, dist: u64) -> FieldElement {
        FieldElement::phi_pow(self.k, -(dist as i64))
    }

    /// Energy of the untouched half-space board for this target.
    pub fn background_energy(&self, params: GameParams) -> Result<FieldElement> {
        if params.k != self.k {
            return Err(Error::OrderMismatch(params.k, self.k));
        }
        if params.d != self.target.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target.dim(),
                got: params.d,
            });
        }
        let k = self.k;
        let one = FieldElement::one(k);
        let a = &self.alpha;
        let geometric = (&one - a).inverse()?;
        let row = self.target.row();
        // Column through the target: rows <= 0.
        let column = if row >= 1 {
            &a.pow(row)? * &geometric
        } else {
            let above = &(a * &(&one - &a.pow(-row)?)) * &geometric;
            &geometric + &above
        };
        // Each off-axis line contributes sum over x of alpha^|x|.
        let line = &(&one + a) * &geometric;
        let off_axis = line.pow(params.d as i64 - 1)?;
        Ok((&column * &off_axis).scale_int(params.m))
    }

    /// Background energy plus the weighted delta.
    pub fn board_energy(&self, board: &BoardState) -> Result<FieldElement> {
        let params = board.params();
        let mut total = match board.background() {
            Background::HalfSpace => self.background_energy(params)?,
            Background::Empty => FieldElement::zero(self.k),
        };
        for (p, &c) in board.delta() {
            total = &total + &self.weight(p)?.scale_int(c);
        }
        Ok(total)
    }

    /// Energy change of a legal move, from its `k + 1` cells.
    pub fn move_delta_energy(&self, board: &BoardState, mv: &Move) -> Result<FieldElement> {
        if board.params().k != self.k {
            return Err(Error::OrderMismatch(board.params().k, self.k));
        }
        if !board.is_legal(mv) {
            // reproduce the board's error
            return board.apply_move(mv).map(|_| FieldElement::zero(self.k));
        }
        self.move_delta(mv)
    }

    /// Energy change of `mv` assuming it is legal.
    pub fn move_delta(&self, mv: &Move) -> Result<FieldElement> {
        self.check_dim(&mv.from)?;
        let (jumped, landing) = self.move_distances(mv);
        Ok(self.delta_from_distances(&jumped, landing))
    }

    fn move_distances(&self, mv: &Move) -> (Vec<u64>, u64) {
        let jumped = (0..self.k)
            .map(|j| mv.cell(j).distance(&self.target))
            .collect();
        (jumped, mv.landing(self.k).distance(&self.target))
    }

    fn delta_from_distances(&self, jumped: &[u64], landing: u64) -> FieldElement {
        let mut delta = self.weight_at_distance(landing);
        for &dist in jumped {
            delta = &delta - &self.weight_at_distance(dist);
        }
        delta
    }
}

/// Energy of the fresh board for a target on the column axis at row `n`.
pub fn background_energy(params: GameParams, n: i64) -> Result<FieldElement> {
    WeightSpec::on_column(params, n)?.background_energy(params)
}

/// Signs of move energy changes, cached by the distances of the move's cells.
pub struct EnergyChecker {
    spec: WeightSpec,
    cache: HashMap<(Vec<u64>, u64), i32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnergyAudit {
    pub moves: usize,
    pub increases: usize,
    pub neutral: usize,
    pub decreases: usize,
    pub first_increase: Option<usize>,
}

impl EnergyChecker {
    pub fn new(spec: WeightSpec) -> Self {
        Self {
            spec,
            cache: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// Sign of the energy change of `mv` (legality is not checked).
    pub fn move_sign(&mut self, mv: &Move) -> Result<i32> {
        self.spec.check_dim(&mv.from)?;
        let (mut jumped, landing) = self.spec.move_distances(mv);
        jumped.sort_unstable();
        let key = (jumped, landing);
        if let Some(&s) = self.cache.get(&key) {
            return Ok(s);
        }
        let s = self.spec.delta_from_distances(&key.0, key.1).sign();
        self.cache.insert(key, s);
        Ok(s)
    }

    /// Replays `moves` from `start`, classifying every energy change.
    pub fn audit<'a>(
        &mut self,
        start: &BoardState,
        moves: impl IntoIterator<Item = &'a Move>,
    ) -> Result<EnergyAudit> {
        let mut board = start.clone();
        let mut audit = EnergyAudit::default();
        for (index, mv) in moves.into_iter().enumerate() {
            board.apply_move_mut(mv).map_err(|e| match e {
                Error::IllegalMove { cell } => Error::ReplayFailed { index, cell },
                other => other,
            })?;
            audit.moves += 1;
            match self.move_sign(mv)? {
                1 => {
                    audit.increases += 1;
                    audit.first_increase.get_or_insert(index);
                }
                0 => audit.neutral += 1,
                _ => audit.decreases += 1,
            }
        }
        Ok(audit)
    }
}

/// Position of a move's origin relative to the target along its own axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateClass {
    /// Every cell of the move line is behind or on the target.
    Toward,
    /// The move line passes the target.
    Crossing,
    /// The origin is on or beyond the target.
    Away,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoveTemplate {
    pub axis: usize,
    pub sign: i8,
    /// Offset of the origin from the target, measured along the move direction.
    pub start: i64,
    pub off_axis: u64,
    pub class: TemplateClass,
    pub delta_sign: i32,
}

/// One representative move per geometric class.
///
/// Along the move direction the cell offsets are `x0, x0+1, ..., x0+k`. For
/// `x0 <= -k` the change is `alpha^(-x0-k)` times the change at `x0 = -k`,
/// and for `x0 >= 0` it is `alpha^x0` times the change at `x0 = 0`; an
/// off-axis distance multiplies every weight by the same power of alpha. So
/// the offsets `-k..=0` with off-axis distance 0 or 1 cover every move.
pub fn pagoda_templates(k: usize, d: usize) -> Result<Vec<MoveTemplate>> {
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    let spec = WeightSpec::new(k, Position::new(vec![0; d]))?;
    let kk = k as i64;
    let offs: &[u64] = if d > 1 { &[0, 1] } else { &[0] };
    let mut out = Vec::new();
    for axis in 0..d {
        for sign in [1i8, -1] {
            for &off in offs {
                for x0 in -kk..=0 {
                    let mut from = Position::new(vec![0; d]);
                    from = from.shifted(axis, sign as i64 * x0);
                    if off > 0 {
                        from = from.shifted((axis + 1) % d, off as i64);
                    }
                    let mv = Move::new(from, axis, sign);
                    let class = if x0 <= -kk {
                        TemplateClass::Toward
                    } else if x0 < 0 {
                        TemplateClass::Crossing
                    } else {
                        TemplateClass::Away
                    };
                    out.push(MoveTemplate {
                        axis,
                        sign,
                        start: x0,
                        off_axis: off,
                        class,
                        delta_sign: spec.move_delta(&mv)?.sign(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// True when no move template raises the energy and the energy-neutral
/// templates are exactly the direct jumps toward the target.
pub fn verify_pagoda(k: usize, d: usize) -> Result<bool> {
    Ok(pagoda_templates(k, d)?.iter().all(|t| {
        t.delta_sign <= 0 && ((t.delta_sign == 0) == (t.class == TemplateClass::Toward))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The target state has more energy than the start.
    UnreachableEnergy,
    /// Reaching the target would change infinitely many cells.
    UnreachableInfinite,
    Inconclusive,
}

impl Verdict {
    pub fn is_unreachable(self) -> bool {
        self != Verdict::Inconclusive
    }
}

/// Compares two boards under the same weighting.
pub fn unreachability_check(
    initial: &BoardState,
    target: &BoardState,
    spec: &WeightSpec,
) -> Result<Verdict> {
    if initial.params() != target.params() {
        return Err(invalid("boards have different parameters"));
    }
    let e0 = spec.board_energy(initial)?;
    let e1 = spec.board_energy(target)?;
    if (&e1 - &e0).sign() > 0 {
        return Ok(Verdict::UnreachableEnergy);
    }
    if initial.background() != target.background() {
        return Ok(Verdict::UnreachableInfinite);
    }
    Ok(Verdict::Inconclusive)
}

#[derive(Clone, Debug)]
pub struct OccupancyReport {
    pub verdict: Verdict,
    pub target: Position,
    pub count: i64,
    /// Energy of the fresh board.
    pub start_energy: FieldElement,
    /// Sign of `count - start_energy`.
    pub comparison: i32,
}

/// Can `count` checkers ever sit on `target` starting from the fresh board?
///
/// Any such board has energy at least `count`. If `count` exceeds the start
/// energy it is unreachable outright; if the two are equal every other cell
/// would have to be empty, which no finite sequence of moves achieves.
pub fn occupancy_check(params: GameParams, target: Position, count: i64) -> Result<OccupancyReport> {
    let spec = WeightSpec::new(params.k, target.clone())?;
    let start_energy = spec.background_energy(params)?;
    let comparison = (&FieldElement::from_integer(params.k, count) - &start_energy).sign();
    let verdict = match comparison {
        1 => Verdict::UnreachableEnergy,
        0 => Verdict::UnreachableInfinite,
        _ => Verdict::Inconclusive,
    };
    Ok(OccupancyReport {
        verdict,
        target,
        count,
        start_energy,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: u64, k: usize, d: usize) -> GameParams {
        GameParams::new(m, k, d).unwrap()
    }

    fn fe(k: usize, c: &[i64]) -> FieldElement {
        FieldElement::from_int_coeffs(k, c).unwrap()
    }

    #[test]
    fn weights() {
        let spec = WeightSpec::new(2, Position::new(vec![1, 3])).unwrap();
        assert_eq!(spec.weight(&Position::new(vec![1, 3])).unwrap(), FieldElement::one(2));
        assert_eq!(spec.weight(&Position::new(vec![2, 4])).unwrap(), fe(2, &[2, -1]));
        assert_eq!(
            spec.weight(&Position::new(vec![3, 2])).unwrap(),
            spec.weight(&Position::new(vec![2, 1])).unwrap()
        );
        assert!(spec.weight(&Position::new(vec![0])).is_err());
    }

    #[test]
    fn background_energies() {
        assert_eq!(background_energy(params(1, 2, 2), 5).unwrap(), FieldElement::one(2));
        assert_eq!(background_energy(params(1, 2, 1), 2).unwrap(), FieldElement::one(2));
        assert_eq!(
            background_energy(params(1, 2, 2), 0).unwrap(),
            FieldElement::phi_pow(2, 5)
        );
    }

    // Sum of weights over the window |x| <= r, row in [-r, 0], done cell by cell.
    fn truncated(params: GameParams, target_row: i64, r: i64) -> FieldElement {
        let spec = WeightSpec::on_column(params, target_row).unwrap();
        let mut total = FieldElement::zero(params.k);
        for x in -r..=r {
            for y in -r..=0 {
                let p = Position::new(vec![x, y]);
                total = &total + &spec.weight(&p).unwrap();
            }
        }
        total.scale_int(params.m)
    }

    #[test]
    fn truncated_sums_increase_toward_closed_form() {
        for (pm, row) in [(params(1, 2, 2), 5), (params(2, 3, 2), 1), (params(1, 2, 2), -2)] {
            let full = background_energy(pm, row).unwrap();
            let mut last = FieldElement::zero(pm.k);
            for r in [4, 8, 16] {
                let t = truncated(pm, row, r);
                assert_eq!((&t - &last).sign(), 1);
                assert_eq!((&full - &t).sign(), 1);
                last = t;
            }
            assert!((&full - &last).to_f64() < 0.05, "{pm:?}");
        }
    }

    #[test]
    fn board_energy_tracks_moves() {
        let pm = params(2, 3, 2);
        let spec = WeightSpec::on_column(pm, 3).unwrap();
        let b = BoardState::initial(pm);
        assert_eq!(spec.board_energy(&b).unwrap(), spec.background_energy(pm).unwrap());
        let mv = Move::up(Position::new(vec![1, -2]));
        let after = b.apply_move(&mv).unwrap();
        let delta = spec.move_delta_energy(&b, &mv).unwrap();
        assert_eq!(&spec.board_energy(&after).unwrap() - &spec.board_energy(&b).unwrap(), delta);
        let t = BoardState::from_counts(pm, [(Position::new(vec![0, 3]), 1)]).unwrap();
        assert_eq!(spec.board_energy(&t).unwrap(), FieldElement::one(3));
        let bad = Move::up(Position::new(vec![0, 1]));
        assert!(spec.move_delta_energy(&b, &bad).is_err());
    }

    #[test]
    fn move_delta_signs() {
        let spec = WeightSpec::new(2, Position::new(vec![0, 5])).unwrap();
        // toward the target, landing short of it
        assert!(spec.move_delta(&Move::up(Position::new(vec![0, 1]))).unwrap().is_zero());
        // directly away
        let away = Move::new(Position::new(vec![0, 5]), 1, -1);
        assert_eq!(spec.move_delta(&away).unwrap().sign(), -1);
        // sideways at a fixed row
        for x in -3..=3 {
            for sign in [1, -1] {
                let mv = Move::new(Position::new(vec![x, 0]), 0, sign);
                assert!(spec.move_delta(&mv).unwrap().sign() <= 0);
            }
        }
    }

    #[test]
    fn pagoda_certified() {
        assert!(verify_pagoda(2, 2).unwrap());
        assert!(verify_pagoda(3, 1).unwrap());
        let templates = pagoda_templates(2, 2).unwrap();
        assert!(templates
            .iter()
            .filter(|t| t.class == TemplateClass::Toward)
            .all(|t| t.delta_sign == 0));
        // 2 axes * 2 signs * 2 offsets * (k+1) offsets along the axis
        assert_eq!(templates.len(), 24);
    }

    #[test]
    fn verdicts() {
        let pm = params(1, 2, 2);
        let spec = WeightSpec::on_column(pm, 5).unwrap();
        let start = BoardState::initial(pm);
        let lone = BoardState::from_counts(pm, [(Position::on_column(2, 5), 1)]).unwrap();
        assert_eq!(
            unreachability_check(&start, &lone, &spec).unwrap(),
            Verdict::UnreachableInfinite
        );
        assert_eq!(unreachability_check(&start, &start, &spec).unwrap(), Verdict::Inconclusive);
        let extra = start.apply_move(&Move::up(Position::new(vec![0, -1]))).unwrap();
        assert_eq!(unreachability_check(&start, &extra, &spec).unwrap(), Verdict::Inconclusive);
        let mut added = BoardState::initial(pm);
        added.place(&Position::on_column(2, 2), 1).unwrap();
        assert_eq!(
            unreachability_check(&start, &added, &spec).unwrap(),
            Verdict::UnreachableEnergy
        );

        let report = occupancy_check(pm, Position::on_column(2, 5), 1).unwrap();
        assert_eq!(report.verdict, Verdict::UnreachableInfinite);
        assert_eq!(report.start_energy, FieldElement::one(2));
        assert_eq!(occupancy_check(pm, Position::on_column(2, 5), 2).unwrap().verdict, Verdict::UnreachableEnergy);
        assert_eq!(occupancy_check(pm, Position::on_column(2, 4), 1).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn checker_caches_signs() {
        let pm = params(1, 2, 1);
        let mut checker = EnergyChecker::new(WeightSpec::on_column(pm, 1).unwrap());
        let start = BoardState::initial(pm);
        let audit = checker.audit(&start, &[Move::up(Position::new(vec![-1]))]).unwrap();
        assert_eq!(audit, EnergyAudit { moves: 1, neutral: 1, ..Default::default() });
        let err = checker.audit(&start, &[Move::up(Position::new(vec![0]))]).unwrap_err();
        assert!(matches!(err, Error::ReplayFailed { index: 0, .. }));
    }
}
