use std::io::Write;

use crate::kifu::{replay, Kifu};
use crate::rules::{Color, Move};

use super::AnalyticsError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AisRow {
    pub index: u32,
    pub color: Color,
    pub q: u32,
    pub q_avg: f64,
    /// Information-set size faced by the player making this move.
    pub s: f64,
}

/// Quantum-stone counts and running averages for a game. Index 0 in each
/// vector is the empty starting position.
#[derive(Clone, Debug, PartialEq)]
pub struct AisTrace {
    pub q: Vec<u32>,
    pub q_avg: Vec<f64>,
    /// `s[n]` for `n >= 1`; `s[0]` is unused and set to 1.
    pub s: Vec<f64>,
}

impl AisTrace {
    /// `q[i]` counts the quantum stones of the color that moved at `i`.
    pub fn from_counts(q: Vec<u32>) -> Self {
        assert_eq!(q.first(), Some(&0), "Q_0 is the empty board");
        let mut sums = [0.0f64; 2];
        let mut seen = [0u32; 2];
        let mut q_avg = Vec::with_capacity(q.len());
        for (i, &v) in q.iter().enumerate() {
            sums[i % 2] += v as f64;
            seen[i % 2] += 1;
            q_avg.push(sums[i % 2] / seen[i % 2] as f64);
        }
        let mut s = vec![1.0];
        s.extend(q_avg.iter().take(q.len() - 1).map(|a| a.exp2()));
        AisTrace { q, q_avg, s }
    }

    pub fn moves(&self) -> usize {
        self.q.len() - 1
    }

    pub fn rows(&self) -> impl Iterator<Item = AisRow> + '_ {
        (1..self.q.len()).map(|n| AisRow {
            index: n as u32,
            color: Color::of_move(n as u32),
            q: self.q[n],
            q_avg: self.q_avg[n],
            s: self.s[n],
        })
    }

    pub fn mean_s(&self, color: Option<Color>) -> Option<f64> {
        let vals: Vec<f64> = self
            .rows()
            .filter(|r| color.is_none_or(|c| r.color == c))
            .map(|r| r.s)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["move", "color", "Q_i", "Q_avg", "S"])?;
        for r in self.rows() {
            w.write_record([
                r.index.to_string(),
                r.color.letter().to_string(),
                r.q.to_string(),
                format!("{:.4}", r.q_avg),
                format!("{:.2}", r.s),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the trace from the collapse records of a verified kifu. The forced
/// measurement after the final pass is not a move and is left out.
pub fn ais_trace(kifu: &Kifu) -> Result<AisTrace, AnalyticsError> {
    replay(kifu)?;
    let mut live = [0i64; 2];
    let mut q = vec![0u32];
    let slot = |c: Color| c as usize;
    for m in &kifu.moves {
        if matches!(m.mv, Move::Place { .. }) {
            live[slot(m.color)] += 1;
        }
        for c in &m.collapses {
            live[slot(c.stone.color())] -= 1;
        }
        q.push(live[slot(m.color)] as u32);
    }
    Ok(AisTrace::from_counts(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kifu::{parse, Kifu, KifuHeader};
    use crate::rules::{BoardConfig, GameState, Intersection};
    use crate::source::BitSource;

    fn pt(s: &str) -> Intersection {
        s.parse().unwrap()
    }

    fn record(size: usize, moves: &[Move], bits: &str) -> Kifu {
        let config = BoardConfig::new(size);
        let mut state = GameState::new(config.clone()).unwrap();
        let mut src = BitSource::scripted(crate::source::parse_bit_script(bits).unwrap());
        let mut k = Kifu::new(KifuHeader::new(&config, Default::default()));
        for &mv in moves {
            k.record(&state.play(mv, &mut src).unwrap());
        }
        k
    }

    #[test]
    fn opening_walkthrough() {
        let moves = [
            Move::place(pt("D17"), pt("M17")),
            Move::place(pt("J10"), pt("J17")),
            Move::place(pt("C3"), pt("Q3")),
            Move::place(pt("D10"), pt("Q10")),
        ];
        let t = ais_trace(&record(19, &moves, "")).unwrap();
        assert_eq!(t.q, vec![0, 1, 1, 2, 2]);
        let expect = [1.0, 2.0, 1.4, 2.8];
        for (n, e) in expect.iter().enumerate() {
            assert!((t.s[n + 1] - e).abs() < 0.05, "S{} = {}", n + 1, t.s[n + 1]);
        }
        let next = AisTrace::from_counts(vec![0, 1, 1, 2, 2, 3]);
        assert!((next.s[5] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn white_average_after_collapse() {
        let t = AisTrace::from_counts(vec![0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 4]);
        assert!((t.q_avg[10] - 7.0 / 3.0).abs() < 1e-12);
        let s11 = t.q_avg[10].exp2();
        assert!((s11 - 5.04).abs() < 0.01);
    }

    #[test]
    fn all_pass_game() {
        let t = ais_trace(&record(5, &[Move::Pass, Move::Pass], "")).unwrap();
        assert_eq!(t.q, vec![0, 0, 0]);
        assert!(t.s.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn demo_game_counts_match_board() {
        let k = parse(include_str!("../../data/demo-7x7.kifu")).unwrap();
        let t = ais_trace(&k).unwrap();
        let mut state = GameState::new(k.header.board_config()).unwrap();
        for (i, m) in k.moves.iter().enumerate() {
            let mut bits = BitSource::scripted(m.collapses.iter().map(|c| c.bit).collect());
            state.play(m.mv, &mut bits).unwrap();
            assert_eq!(t.q[i + 1] as usize, state.quantum_count(m.color));
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 20);
        assert_eq!(text.lines().nth(1).unwrap(), "1,B,1,1.0000,1.00");
        assert_eq!(text.lines().nth(2).unwrap(), "2,W,1,0.5000,2.00");
    }

    #[test]
    fn mean_s_per_color() {
        let t = AisTrace::from_counts(vec![0, 1, 1, 2]);
        assert_eq!(t.mean_s(Some(Color::Black)), Some((1.0 + 0.5f64.exp2()) / 2.0));
        assert_eq!(t.mean_s(Some(Color::White)), Some(2.0));
        assert_eq!(AisTrace::from_counts(vec![0]).mean_s(None), None);
    }
}
