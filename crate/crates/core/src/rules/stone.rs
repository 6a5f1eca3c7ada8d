use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::coord::{Color, Intersection, PerColor, MAX_BOARD_SIZE};

/// Identifier of a stone: the number of the move that placed it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StoneId(pub u32);

impl StoneId {
    pub fn color(self) -> Color {
        Color::of_move(self.0)
    }
}

impl fmt::Display for StoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of one collapse measurement. `Zero` settles a stone on its `p1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_char(c: char) -> Option<Bit> {
        match c {
            '0' => Some(Bit::Zero),
            '1' => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl From<bool> for Bit {
    fn from(one: bool) -> Self {
        if one {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Mixing angles of the entangled state a stone is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoneAngles {
    pub theta: f64,
    pub phi: f64,
}

impl Default for StoneAngles {
    fn default() -> Self {
        StoneAngles {
            theta: FRAC_PI_4,
            phi: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("board size {0} is outside 2..={MAX_BOARD_SIZE}")]
    Size(usize),
    #[error("komi must be a finite non-negative number, got {0}")]
    Komi(f64),
    #[error("detect range must be at least 1")]
    DetectRange,
    #[error("theta {0} is outside [0, pi/2]")]
    Theta(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoardConfig {
    pub size: usize,
    pub komi: f64,
    /// Manhattan radius of a quantum stone's detectable area.
    pub detect_range: usize,
    /// Force-measure the remaining quantum stones before scoring.
    pub measure_at_end: bool,
    pub angles: PerColor<StoneAngles>,
}

impl BoardConfig {
    pub fn new(size: usize) -> Self {
        BoardConfig {
            size,
            ..Default::default()
        }
    }

    pub fn with_komi(mut self, komi: f64) -> Self {
        self.komi = komi;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.angles.black.theta = theta;
        self.angles.white.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.size < 2 || self.size > MAX_BOARD_SIZE {
            return Err(ConfigError::Size(self.size));
        }
        if !self.komi.is_finite() || self.komi < 0.0 {
            return Err(ConfigError::Komi(self.komi));
        }
        if self.detect_range < 1 {
            return Err(ConfigError::DetectRange);
        }
        for angles in [self.angles.black, self.angles.white] {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angles.theta) {
                return Err(ConfigError::Theta(angles.theta));
            }
        }
        Ok(())
    }
}

impl Default for BoardConfig {
    fn default() -> Self {
        BoardConfig {
            size: 19,
            komi: 0.0,
            detect_range: 1,
            measure_at_end: true,
            angles: PerColor::uniform(StoneAngles::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Quantum,
    Classical(Intersection),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumStone {
    pub id: StoneId,
    pub color: Color,
    pub p1: Intersection,
    pub p2: Intersection,
    pub theta: f64,
    pub phi: f64,
    pub phase: Phase,
}

impl QuantumStone {
    /// Amplitudes `(cos θ, e^{iφ} sin θ)` on `p1` and `p2`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.theta.cos(), 0.0),
            Complex64::from_polar(self.theta.sin(), self.phi),
        )
    }

    pub fn is_quantum(&self) -> bool {
        self.phase == Phase::Quantum
    }

    pub fn position_for(&self, bit: Bit) -> Intersection {
        match bit {
            Bit::Zero => self.p1,
            Bit::One => self.p2,
        }
    }

    /// The two candidates as an unordered pair (smallest first).
    pub fn candidates(&self) -> (Intersection, Intersection) {
        if self.p1 <= self.p2 {
            (self.p1, self.p2)
        } else {
            (self.p2, self.p1)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Empty,
    Classical(StoneId),
    Quantum(StoneId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Pass,
    Place { p1: Intersection, p2: Intersection },
}

impl Move {
    pub fn place(p1: Intersection, p2: Intersection) -> Self {
        Move::Place { p1, p2 }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Pass => write!(f, "pass"),
            Move::Place { p1, p2 } => write!(f, "place {p1} {p2}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseRecord {
    pub stone: StoneId,
    pub bit: Bit,
    pub result: Intersection,
    pub order_index: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Capture {
    pub stone: StoneId,
    pub at: Intersection,
}
