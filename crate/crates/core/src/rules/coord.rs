use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column letters in standard Go notation; `I` is skipped.
pub const COLUMN_LETTERS: &[u8] = b"ABCDEFGHJKLMNOPQRSTUVWXYZ";

/// Largest board that can be addressed with letter-number coordinates.
pub const MAX_BOARD_SIZE: usize = COLUMN_LETTERS.len();

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    /// Color that plays move number `index` (1-based; Black plays odd moves).
    pub fn of_move(index: u32) -> Color {
        if index % 2 == 1 {
            Color::Black
        } else {
            Color::White
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Black => 'B',
            Color::White => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'B' => Some(Color::Black),
            'W' => Some(Color::White),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A pair of values indexed by color.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerColor<T> {
    pub black: T,
    pub white: T,
}

impl<T: Copy> PerColor<T> {
    pub fn uniform(value: T) -> Self {
        PerColor {
            black: value,
            white: value,
        }
    }

    pub fn get(&self, color: Color) -> T {
        match color {
            Color::Black => self.black,
            Color::White => self.white,
        }
    }
}

impl<T> PerColor<T> {
    pub fn get_mut(&mut self, color: Color) -> &mut T {
        match color {
            Color::Black => &mut self.black,
            Color::White => &mut self.white,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CoordError {
    #[error("malformed coordinate `{0}`")]
    Malformed(String),
    #[error("coordinate `{coord}` is off a {size}x{size} board")]
    OutOfBounds { coord: String, size: usize },
}

/// A board point. `col` counts from the left edge and `row` from the bottom
/// edge, both zero-based; `B2` is `{ col: 1, row: 1 }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Intersection {
    pub col: u8,
    pub row: u8,
}

impl Intersection {
    pub const fn new(col: u8, row: u8) -> Self {
        Intersection { col, row }
    }

    pub(crate) fn from_index(index: usize, size: usize) -> Self {
        Intersection {
            col: (index % size) as u8,
            row: (index / size) as u8,
        }
    }

    pub(crate) fn index(self, size: usize) -> usize {
        self.row as usize * size + self.col as usize
    }

    pub fn in_bounds(self, size: usize) -> bool {
        (self.col as usize) < size && (self.row as usize) < size
    }

    /// Parses a coordinate and checks it against a board size.
    pub fn parse_on(s: &str, size: usize) -> Result<Self, CoordError> {
        let p: Intersection = s.parse()?;
        if p.in_bounds(size) {
            Ok(p)
        } else {
            Err(CoordError::OutOfBounds {
                coord: s.to_string(),
                size,
            })
        }
    }

    pub fn column_letter(col: usize) -> char {
        COLUMN_LETTERS[col] as char
    }

    /// Orthogonal neighbours that lie on the board.
    pub fn neighbors(self, size: usize) -> impl Iterator<Item = Intersection> {
        const STEPS: [(i32, i32); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];
        STEPS.into_iter().filter_map(move |(dc, dr)| self.offset(dc, dr, size))
    }

    /// All points with Manhattan distance `1..=range` from `self`.
    pub fn within(self, range: usize, size: usize) -> impl Iterator<Item = Intersection> {
        let r = range as i32;
        (-r..=r).flat_map(move |dc| {
            let rest = r - dc.abs();
            (-rest..=rest).filter_map(move |dr| {
                if dc == 0 && dr == 0 {
                    None
                } else {
                    self.offset(dc, dr, size)
                }
            })
        })
    }

    pub fn is_within(self, other: Intersection, range: usize) -> bool {
        let d = (self.col as i32 - other.col as i32).abs() + (self.row as i32 - other.row as i32).abs();
        d >= 1 && d as usize <= range
    }

    fn offset(self, dc: i32, dr: i32, size: usize) -> Option<Intersection> {
        let c = self.col as i32 + dc;
        let r = self.row as i32 + dr;
        if c < 0 || r < 0 || c as usize >= size || r as usize >= size {
            None
        } else {
            Some(Intersection::new(c as u8, r as u8))
        }
    }
}

impl fmt::Display for Intersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", Self::column_letter(self.col as usize), self.row as u32 + 1)
    }
}

impl FromStr for Intersection {
    type Err = CoordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || CoordError::Malformed(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(malformed)?.to_ascii_uppercase();
        let col = COLUMN_LETTERS
            .iter()
            .position(|&c| c as char == letter)
            .ok_or_else(malformed)?;
        let digits = chars.as_str();
        if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let row: usize = digits.parse().map_err(|_| malformed())?;
        if row == 0 || row > MAX_BOARD_SIZE {
            return Err(malformed());
        }
        Ok(Intersection::new(col as u8, (row - 1) as u8))
    }
}

impl TryFrom<String> for Intersection {
    type Error = CoordError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Intersection> for String {
    fn from(value: Intersection) -> Self {
        value.to_string()
    }
}
