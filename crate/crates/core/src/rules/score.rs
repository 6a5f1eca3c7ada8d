use std::fmt;

use serde::{Deserialize, Serialize};

use super::coord::Color;
use super::state::GameState;
use super::stone::{Capture, Cell, CollapseRecord, StoneId};
use super::RulesError;
use crate::source::CollapseBits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    Black,
    White,
    Draw,
}

impl Winner {
    pub fn from_margin(margin: f64) -> Winner {
        if margin > 0.0 {
            Winner::Black
        } else if margin < 0.0 {
            Winner::White
        } else {
            Winner::Draw
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Winner::Black => write!(f, "B"),
            Winner::White => write!(f, "W"),
            Winner::Draw => write!(f, "draw"),
        }
    }
}

/// Area counts for a position with no quantum stones left to measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaCount {
    pub black: u32,
    pub white: u32,
    pub neutral: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    pub black: u32,
    pub white: u32,
    pub neutral: u32,
    /// `black - (white + komi)`.
    pub margin: f64,
    pub winner: Winner,
    /// Measurements forced at the end of the game.
    pub collapses: Vec<CollapseRecord>,
    pub captures: Vec<Capture>,
    pub final_state: GameState,
}

impl GameState {
    /// Ordering used to measure whatever is left at the end: the last
    /// placed stone acts as the trigger.
    pub fn end_measurement_order(&self) -> Vec<StoneId> {
        let quantum: Vec<StoneId> = self.quantum_stones().map(|s| s.id).collect();
        if quantum.is_empty() {
            return quantum;
        }
        let trigger = self.last_placed;
        let first = trigger.map(|id| id.color()).unwrap_or(Color::Black);
        let mut order: Vec<StoneId> = quantum.iter().copied().filter(|&id| Some(id) != trigger).collect();
        order.sort_by_key(|id| (self.stones[id].color != first, *id));
        if let Some(t) = trigger {
            if quantum.contains(&t) {
                order.push(t);
            }
        }
        order
    }

    /// Area score of a finished game.
    pub fn score<B: CollapseBits + ?Sized>(&self, bits: &mut B) -> Result<ScoreReport, RulesError> {
        if !self.is_terminal() {
            return Err(RulesError::NotTerminal);
        }
        let mut fin = self.clone();
        let mut collapses = Vec::new();
        let mut captures = Vec::new();
        if self.config.measure_at_end {
            let order = fin.end_measurement_order();
            if !order.is_empty() {
                collapses = fin.measure(&order, bits)?;
                let settled: Vec<_> = collapses.iter().map(|c| c.result).collect();
                let mover = self.last_placed.map(|id| id.color()).unwrap_or(Color::Black);
                captures = fin.resolve_captures(mover, &settled);
            }
        }
        let area = fin.area();
        let margin = area.black as f64 - (area.white as f64 + self.config.komi);
        Ok(ScoreReport {
            black: area.black,
            white: area.white,
            neutral: area.neutral,
            margin,
            winner: Winner::from_margin(margin),
            collapses,
            captures,
            final_state: fin,
        })
    }

    /// Classical stones plus empty regions bordered only by one color.
    /// Quantum candidates count as empty.
    pub fn area(&self) -> AreaCount {
        let size = self.config.size;
        let mut count = AreaCount {
            black: 0,
            white: 0,
            neutral: 0,
        };
        let mut seen = vec![false; self.grid.len()];
        for (p, cell) in self.cells() {
            match cell {
                Cell::Classical(id) => match self.stones[&id].color {
                    Color::Black => count.black += 1,
                    Color::White => count.white += 1,
                },
                Cell::Empty | Cell::Quantum(_) => {
                    if seen[p.index(size)] {
                        continue;
                    }
                    let mut region = 0u32;
                    let (mut touches_black, mut touches_white) = (false, false);
                    let mut stack = vec![p];
                    seen[p.index(size)] = true;
                    while let Some(q) = stack.pop() {
                        region += 1;
                        for n in q.neighbors(size) {
                            match self.cell(n) {
                                Cell::Classical(id) => match self.stones[&id].color {
                                    Color::Black => touches_black = true,
                                    Color::White => touches_white = true,
                                },
                                _ => {
                                    if !seen[n.index(size)] {
                                        seen[n.index(size)] = true;
                                        stack.push(n);
                                    }
                                }
                            }
                        }
                    }
                    match (touches_black, touches_white) {
                        (true, false) => count.black += region,
                        (false, true) => count.white += region,
                        _ => count.neutral += region,
                    }
                }
            }
        }
        count
    }
}
