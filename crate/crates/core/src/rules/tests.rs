use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::source::{BitSource, CollapseBits, SourceError, StateParams};

fn pt(s: &str) -> Intersection {
    s.parse().unwrap()
}

fn place(a: &str, b: &str) -> Move {
    Move::place(pt(a), pt(b))
}

fn bits(s: &str) -> BitSource {
    BitSource::scripted(crate::source::parse_bit_script(s).unwrap())
}

fn game(size: usize) -> GameState {
    GameState::new(BoardConfig::new(size)).unwrap()
}

/// Plays `moves` with one script per move.
fn play_all(state: &mut GameState, moves: &[(Move, &str)]) -> Vec<MoveReport> {
    moves
        .iter()
        .map(|(mv, script)| {
            let mut src = bits(script);
            let r = state.play(*mv, &mut src).unwrap();
            assert_eq!(src.remaining_script(), Some(0), "move {} left bits unused", r.index);
            r
        })
        .collect()
}

/// Drops a stone straight onto the board, bypassing the rules.
fn put(state: &mut GameState, id: u32, p1: &str, p2: Option<&str>) -> StoneId {
    let id = StoneId(id);
    let color = id.color();
    let (a, b) = (pt(p1), p2.map(pt).unwrap_or(pt(p1)));
    let stone = QuantumStone {
        id,
        color,
        p1: a,
        p2: b,
        theta: std::f64::consts::FRAC_PI_4,
        phi: 0.0,
        phase: if p2.is_some() { Phase::Quantum } else { Phase::Classical(a) },
    };
    state.stones.insert(id, stone);
    if p2.is_some() {
        state.set_cell(a, Cell::Quantum(id));
        state.set_cell(b, Cell::Quantum(id));
    } else {
        state.set_cell(a, Cell::Classical(id));
    }
    state.move_count = state.move_count.max(id.0);
    state.to_move = Color::of_move(state.move_count + 1);
    id
}

pub(crate) fn fig4_moves() -> Vec<(Move, &'static str)> {
    vec![
        (place("F2", "F5"), ""),
        (place("B6", "B2"), ""),
        (place("D4", "D6"), ""),
        (place("G4", "A5"), ""),
        (place("D2", "B1"), "00"),
        (place("C7", "G1"), ""),
        (place("C3", "E4"), "00"),
        (place("E2", "G6"), "10"),
        (place("A3", "E6"), ""),
        (place("C5", "A4"), "000"),
        (place("E7", "A1"), ""),
        (place("G6", "D6"), ""),
        (place("D5", "F3"), "00"),
        (place("C6", "E3"), "10"),
        (place("A5", "A7"), ""),
        (place("B3", "G7"), "0"),
        (place("B2", "B4"), "1"),
        (place("E4", "B2"), "0"),
        (place("B2", "F4"), "0"),
    ]
}

#[test]
fn new_game_examples() {
    let g = game(19);
    assert_eq!(g.cells().filter(|(_, c)| *c == Cell::Empty).count(), 361);
    assert_eq!(g.to_move(), Color::Black);
    assert_eq!(g.consecutive_passes(), 0);
    assert_eq!(g.history(), &[g.digest()]);
    assert_eq!(game(7).empty_cells().len(), 49);
    assert!(GameState::new(BoardConfig::new(1)).is_err());
    assert!(GameState::new(BoardConfig::new(9).with_komi(-0.5)).is_err());
}

#[test]
fn legal_move_counts() {
    let g = game(3);
    assert_eq!(g.legal_placements().unwrap().len(), 36);
    let moves = g.legal_moves().unwrap();
    assert_eq!(moves.len(), 1 + 72);
    assert!(moves.contains(&Move::Pass));
    assert!(moves.contains(&place("A1", "C3")) && moves.contains(&place("C3", "A1")));

    let mut two = game(2);
    put(&mut two, 1, "A1", None);
    put(&mut two, 2, "B2", None);
    assert_eq!(two.legal_placements().unwrap(), vec![(pt("B1"), pt("A2"))]);

    let mut one = game(2);
    put(&mut one, 1, "A1", None);
    put(&mut one, 2, "B2", None);
    put(&mut one, 3, "A2", None);
    assert_eq!(one.legal_moves().unwrap(), vec![Move::Pass]);
}

#[test]
fn terminal_state_has_no_moves() {
    let mut g = game(5);
    play_all(&mut g, &[(Move::Pass, ""), (Move::Pass, "")]);
    assert!(g.is_terminal());
    assert_eq!(g.consecutive_passes(), 2);
    assert!(matches!(g.legal_moves(), Err(RulesError::Terminal)));
    assert!(matches!(g.play(Move::Pass, &mut bits("")), Err(RulesError::Terminal)));
}

#[test]
fn placement_legality() {
    let mut g = game(5);
    play_all(&mut g, &[(place("A1", "C3"), "")]);
    let check = |g: &GameState, a: &str, b: &str| g.check_placement(pt(a), pt(b));
    assert_eq!(check(&g, "A1", "E5"), Err(IllegalMove::Occupied(pt("A1"))));
    assert_eq!(check(&g, "B2", "B2"), Err(IllegalMove::SamePoint(pt("B2"))));
    assert_eq!(
        g.check_placement(pt("A2"), Intersection::new(5, 0)),
        Err(IllegalMove::OffBoard(Intersection::new(5, 0)))
    );
    // Own candidates may touch each other.
    assert_eq!(check(&g, "E4", "E5"), Ok(()));
    let before = g.clone();
    assert!(g.play(place("A1", "E5"), &mut bits("")).is_err());
    assert_eq!(g, before);
}

#[test]
fn involvement_orders_by_color_then_id() {
    let mut g = game(9);
    play_all(
        &mut g,
        &[
            (place("C3", "H8"), ""),
            (place("A9", "J1"), ""),
            (place("E3", "A6"), ""),
        ],
    );
    assert_eq!(g.involved_stones(pt("D3"), pt("J5")), vec![StoneId(1), StoneId(3), StoneId(4)]);
    assert!(g.involved_stones(pt("E7"), pt("G5")).is_empty());
    // Against a white stone too: white (the mover) comes first.
    assert_eq!(
        g.involved_stones(pt("B9"), pt("D3")),
        vec![StoneId(2), StoneId(1), StoneId(3), StoneId(4)]
    );
}

#[test]
fn fig4_move_five_measures_white_first() {
    let mut g = game(7);
    play_all(&mut g, &fig4_moves()[..4]);
    assert_eq!(g.involved_stones(pt("D2"), pt("B1")), vec![StoneId(2), StoneId(5)]);
    let r = g.play(place("D2", "B1"), &mut bits("00")).unwrap();
    let got: Vec<_> = r.collapses.iter().map(|c| (c.stone.0, c.bit, c.result.to_string())).collect();
    assert_eq!(
        got,
        vec![(2, Bit::Zero, "B6".to_string()), (5, Bit::Zero, "D2".to_string())]
    );
    assert_eq!(g.cell(pt("B2")), Cell::Empty);
    assert_eq!(g.cell(pt("B1")), Cell::Empty);
}

#[test]
fn classical_neighbour_triggers_without_listing() {
    let mut g = game(5);
    put(&mut g, 1, "C3", None);
    assert_eq!(g.involved_stones(pt("C4"), pt("A1")), vec![StoneId(2)]);
    let r = g.play(place("C4", "A1"), &mut bits("1")).unwrap();
    assert_eq!(r.collapses.len(), 1);
    assert_eq!(r.collapses[0].result, pt("A1"));
    assert_eq!(g.cell(pt("C4")), Cell::Empty);
}

#[test]
fn resolve_collapse_maps_bits() {
    let mut g = game(5);
    put(&mut g, 1, "A1", Some("E5"));
    let rec = g.resolve_collapse(&[StoneId(1)], &mut bits("1")).unwrap();
    assert_eq!(rec[0].result, pt("E5"));
    assert_eq!(g.cell(pt("A1")), Cell::Empty);
    assert_eq!(g.stone(StoneId(1)).unwrap().phase, Phase::Classical(pt("E5")));

    let mut h = game(5);
    put(&mut h, 1, "A1", Some("E5"));
    let before = h.clone();
    let err = h.resolve_collapse(&[StoneId(1)], &mut bits("")).unwrap_err();
    assert!(err.is_exhausted());
    assert_eq!(h, before);
}

#[test]
fn cascade_runs_wave_by_wave() {
    // A chain that could only exist by construction: 1 -> 2 -> 3.
    let mut g = game(5);
    put(&mut g, 1, "A2", Some("E5"));
    put(&mut g, 2, "A3", Some("C5"));
    put(&mut g, 3, "A4", Some("E1"));
    let r = g.play(place("A1", "C3"), &mut bits("0000")).unwrap();
    let order: Vec<u32> = r.collapses.iter().map(|c| c.stone.0).collect();
    assert_eq!(order, vec![1, 4, 2, 3]);
    assert_eq!(r.collapses.iter().map(|c| c.order_index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert!(g.quantum_stones().next().is_none());

    // Settling away from the chain stops it.
    let mut h = game(5);
    put(&mut h, 1, "A2", Some("E5"));
    put(&mut h, 2, "A3", Some("C5"));
    put(&mut h, 3, "A4", Some("E1"));
    let r = h.play(place("A1", "C3"), &mut bits("10")).unwrap();
    assert_eq!(r.collapses.len(), 2);
    assert_eq!(h.quantum_count(Color::White), 1);
}

#[test]
fn cascade_orders_by_settling_stone_color() {
    let mut g = game(5);
    put(&mut g, 1, "B3", Some("E5"));
    put(&mut g, 2, "C3", Some("E1"));
    put(&mut g, 3, "D3", Some("A1"));
    put(&mut g, 4, "C4", Some("A5"));
    // Black 5 touches only 3. Settled at D3, 3 triggers white 2 at C3,
    // which in turn triggers black 1 and white 4: white goes first.
    assert_eq!(g.involved_stones(pt("D2"), pt("B1")), vec![StoneId(3), StoneId(5)]);
    let r = g.play(place("D2", "B1"), &mut bits("00000")).unwrap();
    let order: Vec<u32> = r.collapses.iter().map(|c| c.stone.0).collect();
    assert_eq!(order, vec![3, 5, 2, 4, 1]);
}

struct Counting<'a> {
    inner: &'a mut dyn CollapseBits,
    used: usize,
}

impl CollapseBits for Counting<'_> {
    fn next_bit(&mut self) -> Result<Bit, SourceError> {
        self.used += 1;
        self.inner.next_bit()
    }
}

/// Stones that must be measured when `mv` is played, computed by naive
/// repeated scanning, given the bits the engine actually drew.
fn closure_oracle(before: &GameState, p1: Intersection, p2: Intersection, drawn: &BTreeMap<StoneId, Bit>) -> Option<BTreeSet<StoneId>> {
    let range = before.config().detect_range;
    let near = |a: Intersection, b: Intersection| a != b && a.is_within(b, range);
    let new_id = before.next_stone_id();
    let occupied: Vec<(Intersection, Cell)> = before.cells().filter(|(_, c)| *c != Cell::Empty).collect();
    if !occupied.iter().any(|(q, _)| near(*q, p1) || near(*q, p2)) {
        return Some(BTreeSet::new());
    }
    let mut stones: BTreeMap<StoneId, (Intersection, Intersection)> =
        before.quantum_stones().map(|s| (s.id, (s.p1, s.p2))).collect();
    stones.insert(new_id, (p1, p2));
    let mut measured = BTreeSet::from([new_id]);
    for (id, (a, b)) in &stones {
        if *id != new_id && [*a, *b].iter().any(|c| near(*c, p1) || near(*c, p2)) {
            measured.insert(*id);
        }
    }
    loop {
        let settled: Vec<Intersection> = measured
            .iter()
            .map(|id| {
                let (a, b) = stones[id];
                if drawn.get(id)? == &Bit::Zero {
                    Some(a)
                } else {
                    Some(b)
                }
            })
            .collect::<Option<_>>()?;
        let extra: Vec<StoneId> = stones
            .iter()
            .filter(|(id, (a, b))| !measured.contains(id) && settled.iter().any(|s| near(*s, *a) || near(*s, *b)))
            .map(|(id, _)| *id)
            .collect();
        if extra.is_empty() {
            return Some(measured);
        }
        measured.extend(extra);
    }
}

#[test]
fn cascade_matches_fixpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..3000 {
        let mut g = game(5);
        let mut free: Vec<Intersection> = g.empty_cells();
        let n = rng.random_range(1..=7u32);
        for id in 1..=n {
            if free.len() < 4 {
                break;
            }
            let a = free.swap_remove(rng.random_range(0..free.len()));
            if rng.random_bool(0.3) {
                put(&mut g, id, &a.to_string(), None);
            } else {
                let b = free.swap_remove(rng.random_range(0..free.len()));
                put(&mut g, id, &a.to_string(), Some(&b.to_string()));
            }
        }
        let a = free.swap_remove(rng.random_range(0..free.len()));
        let b = free.swap_remove(rng.random_range(0..free.len()));
        let mut src = BitSource::simulated(StateParams::default(), rng.random()).unwrap();
        let before = g.clone();
        let mut counting = Counting {
            inner: &mut src,
            used: 0,
        };
        let r = g.play(Move::place(a, b), &mut counting).unwrap();
        assert_eq!(counting.used, r.collapses.len());
        let drawn: BTreeMap<StoneId, Bit> = r.collapses.iter().map(|c| (c.stone, c.bit)).collect();
        assert_eq!(drawn.len(), r.collapses.len(), "a stone was measured twice");
        let expected = closure_oracle(&before, a, b, &drawn).expect("engine skipped a stone the oracle needs");
        assert_eq!(drawn.keys().copied().collect::<BTreeSet<_>>(), expected);
        for c in &r.collapses {
            let s = before.stone(c.stone).map(|s| (s.p1, s.p2)).unwrap_or((a, b));
            assert_eq!(c.result, if c.bit == Bit::Zero { s.0 } else { s.1 });
        }
        if r.collapses.len() > 2 {
            checked += 1;
        }
    }
    assert!(checked > 50, "too few cascades exercised: {checked}");
}

#[test]
fn liberty_examples() {
    let mut g = game(5);
    for (id, p) in [(1, "B3"), (3, "C3"), (5, "D3")] {
        put(&mut g, id, p, None);
    }
    for (id, p) in [(2, "B2"), (4, "C2"), (6, "D2"), (8, "B4"), (10, "C4"), (12, "D4")] {
        put(&mut g, id, p, None);
    }
    let (group, libs) = g.group_liberties(pt("C3")).unwrap();
    assert_eq!(group.len(), 3);
    assert_eq!(libs, 2);

    let mut lone = game(5);
    put(&mut lone, 1, "C3", None);
    assert_eq!(lone.group_liberties(pt("C3")).unwrap().1, 4);
    assert!(matches!(lone.group_liberties(pt("A1")), Err(RulesError::NotClassical(_))));

    let mut mixed = game(5);
    put(&mut mixed, 1, "C3", None);
    put(&mut mixed, 2, "B3", None);
    put(&mut mixed, 4, "D3", None);
    put(&mut mixed, 6, "C4", Some("E1"));
    assert_eq!(mixed.group_liberties(pt("C3")).unwrap().1, 2);
}

#[test]
fn classical_capture_after_collapse() {
    let mut g = game(19);
    let r = play_all(
        &mut g,
        &[
            (place("A2", "C5"), ""),
            (place("A1", "K10"), "00"),
            (place("B1", "B10"), "0"),
        ],
    );
    assert_eq!(r[1].collapses.iter().map(|c| c.result).collect::<Vec<_>>(), vec![pt("A2"), pt("A1")]);
    assert_eq!(
        r[2].captures,
        vec![Capture {
            stone: StoneId(2),
            at: pt("A1")
        }]
    );
    assert_eq!(g.cell(pt("A1")), Cell::Empty);
    assert!(g.stone(StoneId(2)).is_none());
}

#[test]
fn collapse_elsewhere_spares_group() {
    let mut g = game(19);
    play_all(&mut g, &[(place("A2", "C5"), ""), (place("A1", "K10"), "00")]);
    let r = g.play(place("B1", "B10"), &mut bits("1")).unwrap();
    assert!(r.captures.is_empty());
    assert_eq!(g.group_liberties(pt("A1")).unwrap().1, 1);
}

#[test]
fn fig4_white_sixteen_survives_then_falls() {
    let moves = fig4_moves();
    let mut g = game(7);
    let reports = play_all(&mut g, &moves[..17]);
    let r17 = &reports[16];
    assert_eq!(r17.collapses[0].result, pt("B4"));
    assert!(r17.captures.is_empty());
    assert_eq!(g.stone(StoneId(16)).unwrap().phase, Phase::Classical(pt("B3")));
    assert_eq!(g.group_liberties(pt("B3")).unwrap().1, 1);

    let reports = play_all(&mut g, &moves[17..]);
    let r19 = &reports[1];
    assert_eq!(r19.collapses.len(), 1);
    assert_eq!(r19.collapses[0].result, pt("B2"));
    assert_eq!(
        r19.captures,
        vec![Capture {
            stone: StoneId(16),
            at: pt("B3")
        }]
    );
    assert!(g.audit().is_empty());
}

#[test]
fn fig4_collapses_only_where_recorded() {
    let mut g = game(7);
    let reports = play_all(&mut g, &fig4_moves());
    let collapsed: Vec<u32> = reports.iter().filter(|r| !r.collapses.is_empty()).map(|r| r.index).collect();
    assert_eq!(collapsed, vec![5, 7, 8, 10, 13, 14, 16, 17, 18, 19]);
    let captured: Vec<u32> = reports.iter().filter(|r| !r.captures.is_empty()).map(|r| r.index).collect();
    assert_eq!(captured, vec![19]);
}

#[test]
fn own_group_removed_after_opponent() {
    // Black settles on A1 inside white's wall and captures nothing.
    let mut g = game(3);
    put(&mut g, 2, "A2", None);
    put(&mut g, 4, "B1", None);
    put(&mut g, 6, "C2", None);
    put(&mut g, 1, "B3", None);
    put(&mut g, 8, "B2", None);
    assert_eq!(g.to_move(), Color::Black);
    let r = g.play(place("A1", "C3"), &mut bits("0")).unwrap();
    assert_eq!(r.captures.iter().map(|c| c.stone.0).collect::<Vec<_>>(), vec![9]);
    assert_eq!(g.cell(pt("A1")), Cell::Empty);
}

#[test]
fn superko_blocks_repeated_pre_collapse_position() {
    let mut g = game(3);
    put(&mut g, 1, "A1", None);
    // Pretend the position after white's {B3, C3} has occurred before.
    let mut probe = g.clone();
    probe.play(place("C3", "B3"), &mut bits("")).unwrap();
    g.seen.insert(probe.digest());
    assert_eq!(g.check_placement(pt("C3"), pt("B3")), Err(IllegalMove::Superko));
    assert_eq!(g.check_placement(pt("B3"), pt("C3")), Err(IllegalMove::Superko));
    assert!(!g.legal_placements().unwrap().contains(&(pt("B3"), pt("C3"))));
}

#[test]
fn digest_ignores_designation() {
    let mut a = game(5);
    let mut b = game(5);
    a.play(place("A1", "E5"), &mut bits("")).unwrap();
    b.play(place("E5", "A1"), &mut bits("")).unwrap();
    assert_eq!(a.digest(), b.digest());
    assert_ne!(a.digest(), game(5).digest());
}

#[test]
fn scoring_examples() {
    let mut g = GameState::new(BoardConfig::new(9).with_komi(6.5)).unwrap();
    play_all(&mut g, &[(Move::Pass, ""), (Move::Pass, "")]);
    let s = g.score(&mut bits("")).unwrap();
    assert_eq!((s.black, s.white), (0, 0));
    assert_eq!(s.margin, -6.5);
    assert_eq!(s.winner, Winner::White);

    let mut h = game(3);
    play_all(&mut h, &[(place("B2", "A1"), ""), (Move::Pass, ""), (Move::Pass, "")]);
    let s = h.score(&mut bits("0")).unwrap();
    assert_eq!((s.black, s.white, s.neutral), (9, 0, 0));
    assert_eq!(s.winner, Winner::Black);
    assert_eq!(s.collapses.len(), 1);

    assert!(matches!(game(3).score(&mut bits("")), Err(RulesError::NotTerminal)));
}

#[test]
fn end_measurement_uses_last_stone_as_trigger() {
    let mut g = game(9);
    play_all(
        &mut g,
        &[
            (place("A1", "A9"), ""),
            (place("J1", "J9"), ""),
            (place("E5", "C5"), ""),
            (place("E1", "E9"), ""),
            (Move::Pass, ""),
            (Move::Pass, ""),
        ],
    );
    assert_eq!(g.end_measurement_order(), vec![StoneId(2), StoneId(1), StoneId(3), StoneId(4)]);
    let s = g.score(&mut bits("0000")).unwrap();
    assert_eq!(s.collapses.len(), 4);
    assert_eq!(s.black + s.white + s.neutral, 81);
    assert!(matches!(g.score(&mut bits("00")), Err(RulesError::Bits(_))));
}

/// Flood fill written without the engine's helpers.
fn area_oracle(state: &GameState) -> (u32, u32, u32) {
    let n = state.size();
    let owner = |c: Cell| match c {
        Cell::Classical(id) => Some(id.color()),
        _ => None,
    };
    let grid: Vec<Vec<Option<Color>>> = (0..n)
        .map(|r| (0..n).map(|c| owner(state.cell(Intersection::new(c as u8, r as u8)))).collect())
        .collect();
    let (mut b, mut w, mut neutral) = (0, 0, 0);
    let mut seen = vec![vec![false; n]; n];
    for r in 0..n {
        for c in 0..n {
            match grid[r][c] {
                Some(Color::Black) => b += 1,
                Some(Color::White) => w += 1,
                None if !seen[r][c] => {
                    let mut stack = vec![(r, c)];
                    seen[r][c] = true;
                    let mut size = 0;
                    let mut borders = BTreeSet::new();
                    while let Some((r, c)) = stack.pop() {
                        size += 1;
                        let mut nb = vec![];
                        if r > 0 {
                            nb.push((r - 1, c));
                        }
                        if c > 0 {
                            nb.push((r, c - 1));
                        }
                        if r + 1 < n {
                            nb.push((r + 1, c));
                        }
                        if c + 1 < n {
                            nb.push((r, c + 1));
                        }
                        for (rr, cc) in nb {
                            match grid[rr][cc] {
                                Some(col) => {
                                    borders.insert(col == Color::Black);
                                }
                                None if !seen[rr][cc] => {
                                    seen[rr][cc] = true;
                                    stack.push((rr, cc));
                                }
                                None => {}
                            }
                        }
                    }
                    match (borders.contains(&true), borders.contains(&false)) {
                        (true, false) => b += size,
                        (false, true) => w += size,
                        _ => neutral += size,
                    }
                }
                None => {}
            }
        }
    }
    (b, w, neutral)
}

fn random_game(size: usize, seed: u64, max_moves: usize) -> (GameState, Vec<(Move, Vec<Bit>)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = BoardConfig::new(size).with_theta(rng.random_range(0.0..std::f64::consts::FRAC_PI_2));
    let mut g = GameState::new(config).unwrap();
    let mut src = BitSource::simulated(StateParams::default(), seed ^ 0x5eed).unwrap();
    let mut log = Vec::new();
    for _ in 0..max_moves {
        if g.is_terminal() {
            break;
        }
        let pairs = g.legal_placements().unwrap();
        let mv = if pairs.is_empty() || rng.random_bool(0.05) {
            Move::Pass
        } else {
            let (a, b) = pairs[rng.random_range(0..pairs.len())];
            if rng.random() { Move::place(a, b) } else { Move::place(b, a) }
        };
        let before = g.clone();
        let mut counting = Counting {
            inner: &mut src,
            used: 0,
        };
        let r = g.play(mv, &mut counting).unwrap();
        assert_eq!(counting.used, r.collapses.len());
        for s in before.stones() {
            if !s.is_quantum() {
                if let Some(after) = g.stone(s.id) {
                    assert_eq!(after.phase, s.phase, "classical stone moved");
                }
            }
        }
        assert!(r.collapses.is_empty() || matches!(mv, Move::Place { .. }));
        let violations = g.audit();
        assert!(violations.is_empty(), "seed {seed} move {}: {violations:?}", r.index);
        log.push((mv, r.collapses.iter().map(|c| c.bit).collect()));
    }
    (g, log)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_games_keep_invariants(size in prop::sample::select(vec![3usize, 5, 9]), seed in any::<u64>()) {
        let (g, log) = random_game(size, seed, 400);
        let mut again = GameState::new(g.config().clone()).unwrap();
        for (mv, b) in &log {
            again.play(*mv, &mut BitSource::scripted(b.clone())).unwrap();
        }
        prop_assert_eq!(&again, &g);
        if g.is_terminal() {
            let s = g.score(&mut BitSource::simulated(StateParams::default(), seed).unwrap()).unwrap();
            prop_assert_eq!(s.black + s.white + s.neutral, (size * size) as u32);
            prop_assert_eq!(area_oracle(&s.final_state), (s.black, s.white, s.neutral));
            prop_assert!(s.final_state.quantum_stones().next().is_none());
            prop_assert!(s.final_state.audit().iter().all(|v| !matches!(v, Violation::Dead(_))));
        }
    }

    #[test]
    fn amplitudes_are_normalised(theta in 0.0f64..=std::f64::consts::FRAC_PI_2, phi in -10.0f64..10.0) {
        let mut config = BoardConfig::new(3);
        config.angles.white = StoneAngles { theta, phi };
        let mut g = GameState::new(config).unwrap();
        g.play(Move::Pass, &mut bits("")).unwrap();
        g.play(place("A1", "C3"), &mut bits("")).unwrap();
        let (a1, a2) = g.stone(StoneId(2)).unwrap().amplitudes();
        prop_assert!((a1.norm_sqr() + a2.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
