use crate::rules::{
    BoardConfig, Bit, Capture, Color, CollapseRecord, Move, MoveReport, PerColor, ScoreReport, StoneAngles, Winner,
};
use crate::source::SourceSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct KifuHeader {
    pub size: usize,
    pub komi: f64,
    pub detect_range: usize,
    pub measure_at_end: bool,
    pub angles: PerColor<StoneAngles>,
    /// Where the bits originally came from. Replay only needs the bits
    /// recorded in the collapse lines.
    pub source: SourceSpec,
}

impl KifuHeader {
    pub fn new(config: &BoardConfig, source: SourceSpec) -> Self {
        KifuHeader {
            size: config.size,
            komi: config.komi,
            detect_range: config.detect_range,
            measure_at_end: config.measure_at_end,
            angles: config.angles,
            source,
        }
    }

    pub fn board_config(&self) -> BoardConfig {
        BoardConfig {
            size: self.size,
            komi: self.komi,
            detect_range: self.detect_range,
            measure_at_end: self.measure_at_end,
            angles: self.angles,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveRecord {
    pub index: u32,
    pub color: Color,
    pub mv: Move,
    pub collapses: Vec<CollapseRecord>,
    pub captures: Vec<Capture>,
}

impl From<&MoveReport> for MoveRecord {
    fn from(r: &MoveReport) -> Self {
        MoveRecord {
            index: r.index,
            color: r.color,
            mv: r.mv,
            collapses: r.collapses.clone(),
            captures: r.captures.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameResult {
    /// `black - (white + komi)`.
    pub margin: f64,
}

impl GameResult {
    pub fn winner(&self) -> Winner {
        Winner::from_margin(self.margin)
    }
}

/// A complete game record.
#[derive(Clone, Debug, PartialEq)]
pub struct Kifu {
    pub header: KifuHeader,
    pub moves: Vec<MoveRecord>,
    /// Measurements forced after the final pass.
    pub final_measurement: Vec<CollapseRecord>,
    pub final_captures: Vec<Capture>,
    pub result: Option<GameResult>,
}

impl Kifu {
    pub fn new(header: KifuHeader) -> Self {
        Kifu {
            header,
            moves: Vec::new(),
            final_measurement: Vec::new(),
            final_captures: Vec::new(),
            result: None,
        }
    }

    pub fn record(&mut self, report: &MoveReport) {
        self.moves.push(report.into());
    }

    pub fn finish(&mut self, score: &ScoreReport) {
        self.final_measurement = score.collapses.clone();
        self.final_captures = score.captures.clone();
        self.result = Some(GameResult { margin: score.margin });
    }

    /// Every collapse bit in the record, in consumption order.
    pub fn bits(&self) -> Vec<Bit> {
        self.moves
            .iter()
            .flat_map(|m| &m.collapses)
            .chain(&self.final_measurement)
            .map(|c| c.bit)
            .collect()
    }

    pub fn move_count(&self) -> usize {
        self.moves.len()
    }
}
