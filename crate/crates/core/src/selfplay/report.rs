use std::fmt::Write as _;
use std::io::Write;

use super::harness::{PlayedGame, SelfPlayConfig};
use crate::analytics::AisTrace;
use crate::kifu::Kifu;
use crate::rules::{Color, ScoreReport, Winner};

#[derive(Clone, Debug, PartialEq)]
pub struct GameSummary {
    pub index: usize,
    pub seed: u64,
    pub moves: usize,
    pub black_area: u32,
    pub white_area: u32,
    pub margin: f64,
    pub collapses: usize,
    /// Mean of S^N over all moves of the game.
    pub mean_ais: f64,
    pub ais_black: f64,
    pub ais_white: f64,
    pub truncated: bool,
}

impl GameSummary {
    pub fn new(index: usize, seed: u64, kifu: &Kifu, score: &ScoreReport, trace: &AisTrace, truncated: bool) -> Self {
        GameSummary {
            index,
            seed,
            moves: kifu.moves.len(),
            black_area: score.black,
            white_area: score.white,
            margin: score.margin,
            collapses: kifu.bits().len(),
            mean_ais: trace.mean_s(None).unwrap_or(1.0),
            ais_black: trace.mean_s(Some(Color::Black)).unwrap_or(1.0),
            ais_white: trace.mean_s(Some(Color::White)).unwrap_or(1.0),
            truncated,
        }
    }

    pub fn winner(&self) -> Winner {
        Winner::from_margin(self.margin)
    }

    /// The winner if the same board had been scored with another komi.
    pub fn winner_at(&self, komi: f64) -> Winner {
        Winner::from_margin(self.black_area as f64 - self.white_area as f64 - komi)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WinCounts {
    pub black: usize,
    pub white: usize,
    pub draws: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveStat {
    pub index: usize,
    /// Games that lasted at least this many moves.
    pub games: usize,
    pub q_mean: f64,
    pub q_std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfPlayReport {
    pub board_size: usize,
    pub komi: f64,
    pub master_seed: u64,
    pub games: Vec<GameSummary>,
    pub per_move: Vec<MoveStat>,
}

/// Komi values the win table is re-scored at, besides the configured one.
pub const KOMI_TABLE: [f64; 3] = [0.0, 6.5, 7.5];

impl SelfPlayReport {
    pub(crate) fn new(config: &SelfPlayConfig, played: &[PlayedGame]) -> Self {
        let longest = played.iter().map(|g| g.trace.moves()).max().unwrap_or(0);
        let per_move = (1..=longest)
            .map(|i| {
                let qs: Vec<f64> = played
                    .iter()
                    .filter_map(|g| g.trace.q.get(i).map(|&q| q as f64))
                    .collect();
                let n = qs.len() as f64;
                let mean = qs.iter().sum::<f64>() / n;
                let var = qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / n;
                MoveStat {
                    index: i,
                    games: qs.len(),
                    q_mean: mean,
                    q_std: var.sqrt(),
                }
            })
            .collect();
        SelfPlayReport {
            board_size: config.board.size,
            komi: config.board.komi,
            master_seed: config.seed,
            games: played.iter().map(|g| g.summary.clone()).collect(),
            per_move,
        }
    }

    pub fn wins(&self) -> WinCounts {
        self.wins_at(self.komi)
    }

    pub fn wins_at(&self, komi: f64) -> WinCounts {
        let mut w = WinCounts::default();
        for g in &self.games {
            match g.winner_at(komi) {
                Winner::Black => w.black += 1,
                Winner::White => w.white += 1,
                Winner::Draw => w.draws += 1,
            }
        }
        w
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.games.iter().map(|g| g.seed).collect()
    }

    pub fn move_counts(&self) -> Vec<usize> {
        self.games.iter().map(|g| g.moves).collect()
    }

    pub fn median_moves(&self) -> f64 {
        median(self.games.iter().map(|g| g.moves as f64).collect())
    }

    pub fn median_mean_ais(&self) -> f64 {
        median(self.games.iter().map(|g| g.mean_ais).collect())
    }

    /// Mean over games of each color's per-game AIS.
    pub fn ais_by_color(&self) -> (f64, f64) {
        let n = self.games.len().max(1) as f64;
        (
            self.games.iter().map(|g| g.ais_black).sum::<f64>() / n,
            self.games.iter().map(|g| g.ais_white).sum::<f64>() / n,
        )
    }

    /// Mean `Q_i` pooled over every game and every move after `after`.
    pub fn late_q_mean(&self, after: usize) -> Option<f64> {
        let (mut sum, mut n) = (0.0, 0usize);
        for s in self.per_move.iter().filter(|s| s.index > after) {
            sum += s.q_mean * s.games as f64;
            n += s.games;
        }
        (n > 0).then(|| sum / n as f64)
    }

    pub fn truncated(&self) -> usize {
        self.games.iter().filter(|g| g.truncated).count()
    }

    pub fn write_games_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "game", "seed", "moves", "black", "white", "margin", "winner", "collapses", "mean_ais", "ais_black",
            "ais_white", "truncated",
        ])?;
        for g in &self.games {
            w.write_record([
                g.index.to_string(),
                g.seed.to_string(),
                g.moves.to_string(),
                g.black_area.to_string(),
                g.white_area.to_string(),
                g.margin.to_string(),
                g.winner().to_string(),
                g.collapses.to_string(),
                format!("{:.4}", g.mean_ais),
                format!("{:.4}", g.ais_black),
                format!("{:.4}", g.ais_white),
                g.truncated.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_moves_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["move", "games", "q_mean", "q_std"])?;
        for s in &self.per_move {
            w.write_record([
                s.index.to_string(),
                s.games.to_string(),
                format!("{:.4}", s.q_mean),
                format!("{:.4}", s.q_std),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let counts = self.move_counts();
        let (ab, aw) = self.ais_by_color();
        let _ = writeln!(s, "games           {}", self.games.len());
        let _ = writeln!(s, "board           {0}x{0}, komi {1}", self.board_size, self.komi);
        let _ = writeln!(s, "master seed     {}", self.master_seed);
        let _ = writeln!(
            s,
            "moves           median {} min {} max {}",
            self.median_moves(),
            counts.iter().min().unwrap_or(&0),
            counts.iter().max().unwrap_or(&0)
        );
        if self.truncated() > 0 {
            let _ = writeln!(s, "truncated       {}", self.truncated());
        }
        for komi in self.komi_values() {
            let w = self.wins_at(komi);
            let _ = writeln!(s, "komi {:<10} black {} white {} draws {}", komi, w.black, w.white, w.draws);
        }
        let _ = writeln!(s, "AIS             black {ab:.3} white {aw:.3}");
        let _ = writeln!(s, "median mean AIS {:.3}", self.median_mean_ais());
        if let Some(q) = self.late_q_mean(180) {
            let _ = writeln!(s, "mean Q after 180 {q:.4}");
        }
        s
    }

    fn komi_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = KOMI_TABLE.to_vec();
        if !v.contains(&self.komi) {
            v.insert(0, self.komi);
        }
        v
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
