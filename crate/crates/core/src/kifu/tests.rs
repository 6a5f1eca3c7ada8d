use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::rules::{Bit, BoardConfig, Cell, GameState, Move, Phase, StoneId};
use crate::source::{BitSource, SourceSpec, StateParams};

const DEMO: &str = include_str!("../../data/demo-7x7.kifu");

fn random_kifu(size: usize, seed: u64) -> Kifu {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = BoardConfig::new(size).with_komi(rng.random_range(0..4) as f64 * 0.5);
    let spec = SourceSpec::Simulated {
        params: StateParams::with_theta(rng.random_range(0.0..1.5)),
        seed,
    };
    let mut bits = crate::source::open_bitsource(&spec).unwrap();
    let mut state = GameState::new(config.clone()).unwrap();
    let mut kifu = Kifu::new(KifuHeader::new(&config, spec));
    for _ in 0..300 {
        if state.is_terminal() {
            break;
        }
        let pairs = state.legal_placements().unwrap();
        let mv = if pairs.is_empty() || rng.random_bool(0.08) {
            Move::Pass
        } else {
            let (a, b) = pairs[rng.random_range(0..pairs.len())];
            Move::place(a, b)
        };
        kifu.record(&state.play(mv, &mut bits).unwrap());
    }
    if state.is_terminal() {
        kifu.finish(&state.score(&mut bits).unwrap());
    }
    kifu
}

#[test]
fn minimal_document() {
    let mut k = Kifu::new(KifuHeader::new(&BoardConfig::new(9), SourceSpec::default()));
    let mut state = GameState::new(BoardConfig::new(9)).unwrap();
    let mut bits = BitSource::scripted(vec![]);
    for _ in 0..2 {
        k.record(&state.play(Move::Pass, &mut bits).unwrap());
    }
    let text = serialize(&k);
    assert_eq!(text, "qgo-kifu v1\nsize 9\n1 B pass\n2 W pass\n");
    let back = parse(&text).unwrap();
    assert_eq!(back.moves.len(), 2);
    assert!(back.moves.iter().all(|m| m.mv == Move::Pass));
    assert_eq!(back, k);
}

#[test]
fn demo_prefix_lines() {
    let k = parse(DEMO).unwrap();
    let text = serialize(&k);
    let lines: Vec<&str> = text.lines().collect();
    let i = lines.iter().position(|l| *l == "5 B place D2 B1").unwrap();
    assert_eq!(lines[i + 1], "collapse 2 bit=0 -> B6");
    assert_eq!(lines[i + 2], "collapse 5 bit=0 -> D2");
    assert_eq!(serialize(&parse(&text).unwrap()), text);
}

#[test]
fn demo_replays() {
    let k = parse(DEMO).unwrap();
    assert_eq!(k.moves.len(), 19);
    let r = replay(&k).unwrap();
    let phase = |id| r.state.stone(StoneId(id)).map(|s| s.phase);
    assert_eq!(phase(2), Some(Phase::Classical("B6".parse().unwrap())));
    assert_eq!(phase(5), Some(Phase::Classical("D2".parse().unwrap())));
    assert_eq!(phase(17), Some(Phase::Classical("B4".parse().unwrap())));
    assert_eq!(phase(19), Some(Phase::Classical("B2".parse().unwrap())));
    assert_eq!(phase(16), None);
    assert!(r.score.is_none());
    let SourceSpec::Scripted(script) = &k.header.source else { panic!() };
    assert_eq!(script, &k.bits());
}

#[test]
fn tampered_collapse_diverges() {
    let tampered = DEMO.replace("collapse 17 bit=1 -> B4", "collapse 17 bit=1 -> B2");
    let err = replay(&parse(&tampered).unwrap()).unwrap_err();
    assert_eq!(err.divergent_move(), Some(17));

    let flipped = DEMO.replace("collapse 13 bit=0 -> D5", "collapse 13 bit=1 -> D5");
    let err = replay(&parse(&flipped).unwrap()).unwrap_err();
    assert_eq!(err.divergent_move(), Some(13));

    let dropped = DEMO.replace("capture 16 at B3\n", "");
    assert_eq!(replay(&parse(&dropped).unwrap()).unwrap_err().divergent_move(), Some(19));

    let missing = DEMO.replace("collapse 16 bit=0 -> B3\n", "");
    assert_eq!(replay(&parse(&missing).unwrap()).unwrap_err().divergent_move(), Some(16));

    let illegal = DEMO.replace("6 W place C7 G1", "6 W place C7 D2");
    assert_eq!(replay(&parse(&illegal).unwrap()).unwrap_err().divergent_move(), Some(6));
}

#[test]
fn parse_diagnostics() {
    let err = parse("qgo-kifu v1\nsize 9\n1 B pass\n2 B pass\n").unwrap_err();
    assert_eq!((err.line, err.column), (4, 3));
    assert!(matches!(err.kind, ParseErrorKind::Alternation { index: 2, .. }));
    assert!(err.to_string().contains("move 2"));

    let err = parse("qgo-kifu v2\nsize 9\n").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Version(_)));

    let err = parse("qgo-kifu v1\nsize 9\n1 B place A1 Z9\n").unwrap_err();
    assert_eq!((err.line, err.column), (3, 14));
    assert!(matches!(err.kind, ParseErrorKind::Coordinate(_)));

    let err = parse("qgo-kifu v1\nsize 5\n1 B place A1 F1\n").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Coordinate(_)));

    let err = parse("qgo-kifu v1\nsize 9\n1 B place A1 B1\ncollapse 2 bit=0 -> A1\n").unwrap_err();
    assert_eq!((err.line, err.column), (4, 10));
    assert!(matches!(err.kind, ParseErrorKind::UnknownStone(StoneId(2))));

    let err = parse("qgo-kifu v1\nsize 9\n1 B pass\n3 W pass\n").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::MoveNumber { expected: 2, found: 3 }));

    let err = parse("qgo-kifu v1\n1 B pass\n").unwrap_err();
    assert_eq!(err.line, 2);

    let err = parse("qgo-kifu v1\nsize 9\nsize 9\n").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::DuplicateHeader(_)));

    let err = parse("qgo-kifu v1\nsize 9\n1 B pass\n2 W pass\nresult B+1\n3 B pass\n").unwrap_err();
    assert_eq!(err.line, 6);
}

#[test]
fn comments_and_blank_lines() {
    let text = "# header\n\nqgo-kifu v1   # version\nsize 5 # board\n\n1 B pass\n2 W pass # done\nresult W+2.5\n";
    let k = parse(text).unwrap();
    assert_eq!(k.result.unwrap().margin, -2.5);
    assert_eq!(k.result.unwrap().winner(), crate::rules::Winner::White);
}

#[test]
fn headers_round_trip() {
    let mut config = BoardConfig::new(13).with_komi(6.5);
    config.detect_range = 2;
    config.measure_at_end = false;
    config.angles.white.theta = 0.3;
    config.angles.black.phi = 1.25;
    let spec = SourceSpec::Simulated {
        params: StateParams::with_theta(0.3),
        seed: 99,
    };
    let k = Kifu::new(KifuHeader::new(&config, spec));
    let text = serialize(&k);
    assert!(text.contains("komi 6.5\n"));
    assert!(text.contains("detect_range 2\n"));
    assert!(text.contains("measure_at_end false\n"));
    assert!(text.contains(&format!("theta {} 0.3\n", std::f64::consts::FRAC_PI_4)));
    assert!(text.contains("phi 1.25 0\n"));
    assert!(text.contains("source simulated theta=0.3"));
    let back = parse(&text).unwrap();
    assert_eq!(back.header.board_config(), config);
    assert_eq!(serialize(&back), text);
}

#[test]
fn draw_is_written_as_zero_margin() {
    let mut k = Kifu::new(KifuHeader::new(&BoardConfig::new(3), SourceSpec::default()));
    k.result = Some(GameResult { margin: 0.0 });
    let text = serialize(&k);
    assert!(text.ends_with("result B+0\n"));
    assert_eq!(parse(&text).unwrap().result.unwrap().winner(), crate::rules::Winner::Draw);
}

#[test]
fn final_measurement_follows_last_pass() {
    let text = "qgo-kifu v1\nsize 5\n1 B place A1 E5\n2 W pass\n3 B pass\ncollapse 1 bit=1 -> E5\nresult B+25\n";
    let k = parse(text).unwrap();
    assert_eq!(k.final_measurement.len(), 1);
    assert!(k.moves[2].collapses.is_empty());
    let r = replay(&k).unwrap();
    assert_eq!(r.score.unwrap().black, 25);
    assert_eq!(serialize(&k), text);

    let wrong = text.replace("B+25", "B+24");
    assert_eq!(replay(&parse(&wrong).unwrap()).unwrap_err().divergent_move(), Some(0));
    let short = text.replace("collapse 1 bit=1 -> E5\n", "");
    assert_eq!(replay(&parse(&short).unwrap()).unwrap_err().divergent_move(), Some(0));
    let early = "qgo-kifu v1\nsize 5\n1 B pass\nresult B+0\n";
    assert_eq!(replay(&parse(early).unwrap()).unwrap_err().divergent_move(), Some(0));
}

#[test]
fn render_examples() {
    let empty = GameState::new(BoardConfig::new(3)).unwrap();
    assert_eq!(
        render_board(&empty),
        "   A B C\n 3 . . . 3\n 2 . . . 2\n 1 . . . 1\n   A B C\n"
    );

    let mut g = GameState::new(BoardConfig::new(19)).unwrap();
    g.play(Move::place("D17".parse().unwrap(), "M17".parse().unwrap()), &mut BitSource::scripted(vec![]))
        .unwrap();
    let board = render_board(&g);
    let row17 = board.lines().find(|l| l.starts_with("17")).unwrap();
    let cells: Vec<&str> = row17.split_whitespace().collect();
    assert_eq!(cells[4], "X");
    assert_eq!(cells[12], "X");
    assert_eq!(board.lines().next().unwrap(), "   A B C D E F G H J K L M N O P Q R S T");

    let k = parse(DEMO).unwrap();
    let before = replay(&Kifu {
        moves: k.moves[..4].to_vec(),
        ..k.clone()
    })
    .unwrap();
    let after = replay(&Kifu {
        moves: k.moves[..5].to_vec(),
        ..k
    })
    .unwrap();
    let at = |s: &GameState, p: &str| {
        let b = render_board(s);
        let p: crate::rules::Intersection = p.parse().unwrap();
        let line = b.lines().nth(7 - p.row as usize).unwrap().to_string();
        line.split_whitespace().nth(1 + p.col as usize).unwrap().to_string()
    };
    assert_eq!(at(&before.state, "B6"), "O");
    assert_eq!(at(&before.state, "B2"), "O");
    assert_eq!(at(&after.state, "B6"), "o");
    assert_eq!(at(&after.state, "B2"), ".");
    assert_eq!(at(&after.state, "D2"), "x");
    assert_eq!(after.state.cell("B1".parse().unwrap()), Cell::Empty);
}

#[test]
fn random_games_round_trip_and_replay() {
    for seed in 0..40 {
        let size = [3, 5, 7, 9][seed as usize % 4];
        let k = random_kifu(size, seed);
        let text = serialize(&k);
        let back = parse(&text).unwrap();
        assert_eq!(back, k, "seed {seed}");
        let a = replay(&back).unwrap();
        let b = replay(&back).unwrap();
        assert_eq!(a.state.digest(), b.state.digest());
        assert_eq!(a.state, b.state);
        let recorded: usize = k.moves.iter().map(|m| m.collapses.len()).sum::<usize>() + k.final_measurement.len();
        assert_eq!(k.bits().len(), recorded);
        if let (Some(s), Some(r)) = (&a.score, k.result) {
            assert_eq!(s.margin, r.margin);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn mutated_documents_never_panic(seed in 0u64..20, cuts in prop::collection::vec((any::<usize>(), any::<u8>()), 1..6)) {
        let mut text = serialize(&random_kifu(5, seed)).into_bytes();
        for (pos, byte) in cuts {
            if text.is_empty() {
                break;
            }
            let i = pos % text.len();
            match byte % 3 {
                0 => text[i] = b" \n#01BWxA-=>+9"[byte as usize % 13],
                1 => {
                    text.remove(i);
                }
                _ => text.insert(i, b"0123456789 \n"[byte as usize % 12]),
            }
        }
        let text = String::from_utf8_lossy(&text).into_owned();
        if let Ok(k) = parse(&text) {
            let _ = replay(&k);
            let again = serialize(&k);
            prop_assert_eq!(parse(&again).map(|k| serialize(&k)).ok(), Some(again));
        }
    }

    #[test]
    fn bits_round_trip(seed in any::<u64>()) {
        let k = random_kifu(5, seed);
        let back = parse(&serialize(&k)).unwrap();
        prop_assert_eq!(back.bits(), k.bits());
        prop_assert!(back.bits().iter().all(|b| matches!(b, Bit::Zero | Bit::One)));
    }
}
