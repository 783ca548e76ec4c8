//! Random legal play on small boards.

use checkers_core::pagoda::WeightSpec;
use checkers_core::{BoardState, GameParams, Move, Position, Window};
use proptest::prelude::*;

fn random_game(params: GameParams, picks: &[usize]) -> Vec<Move> {
    let d = params.d;
    let mut lo = vec![-3; d];
    let mut hi = vec![3; d];
    lo[d - 1] = -6;
    hi[d - 1] = 4;
    let window = Window::new(lo, hi);
    let mut board = BoardState::initial(params);
    let mut moves = Vec::new();
    for &pick in picks {
        let legal = board.legal_moves(&window);
        if legal.is_empty() {
            break;
        }
        let mv = legal[pick % legal.len()].clone();
        board.apply_move_mut(&mv).unwrap();
        moves.push(mv);
    }
    moves
}

fn game() -> impl Strategy<Value = (GameParams, Vec<usize>)> {
    (1u64..=3, 2usize..=3, 1usize..=2, prop::collection::vec(any::<usize>(), 0..25))
        .prop_map(|(m, k, d, picks)| (GameParams::new(m, k, d).unwrap(), picks))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conservation_and_non_negativity((params, picks) in game()) {
        let moves = random_game(params, &picks);
        let mut board = BoardState::initial(params);
        for mv in &moves {
            let before = board.total_delta();
            board.apply_move_mut(mv).unwrap();
            prop_assert_eq!(board.total_delta(), before - (params.k as i64 - 1));
            for p in board.delta().keys() {
                prop_assert!(board.count_at(p).unwrap() >= 0);
            }
        }
    }

    #[test]
    fn translation_parallel_to_rows((params, picks) in game(), shift in -5i64..=5) {
        prop_assume!(params.d >= 2);
        let moves = random_game(params, &picks);
        let mut by = vec![0; params.d];
        by[0] = shift;
        let moved: Vec<Move> = moves
            .iter()
            .map(|mv| Move::new(mv.from.translated(&by), mv.axis, mv.sign))
            .collect();
        let a = BoardState::initial(params).replay(&moves).unwrap();
        let b = BoardState::initial(params).replay(&moved).unwrap();
        let shifted: Vec<(Position, i64)> = a.delta().iter().map(|(p, c)| (p.translated(&by), *c)).collect();
        let direct: Vec<(Position, i64)> = b.delta().iter().map(|(p, c)| (p.clone(), *c)).collect();
        let mut shifted = shifted;
        shifted.sort();
        prop_assert_eq!(shifted, direct);
    }

    #[test]
    fn energy_never_increases((params, picks) in game(), row in 1i64..=4, col in -2i64..=2) {
        let moves = random_game(params, &picks);
        let mut coords = vec![0; params.d];
        coords[params.d - 1] = row;
        if params.d >= 2 {
            coords[0] = col;
        }
        let spec = WeightSpec::new(params.k, Position::new(coords)).unwrap();
        let mut board = BoardState::initial(params);
        let mut energy = spec.board_energy(&board).unwrap();
        for mv in &moves {
            let delta = spec.move_delta_energy(&board, mv).unwrap();
            prop_assert!(delta.sign() <= 0);
            board.apply_move_mut(mv).unwrap();
            let next = spec.board_energy(&board).unwrap();
            prop_assert_eq!(&next - &energy, delta);
            energy = next;
        }
    }
}
