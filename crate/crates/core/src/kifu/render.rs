use std::fmt::Write as _;

use crate::rules::{Cell, Color, GameState, Intersection};

/// Text board: `X`/`O` for black/white quantum candidates, `x`/`o` for
/// classical stones, `.` for empty points, with coordinates on all sides.
pub fn render_board(state: &GameState) -> String {
    let n = state.size();
    let letters: String = (0..n)
        .map(|c| Intersection::column_letter(c).to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let mut out = String::new();
    writeln!(out, "   {letters}").unwrap();
    for row in (0..n).rev() {
        write!(out, "{:>2}", row + 1).unwrap();
        for col in 0..n {
            let p = Intersection::new(col as u8, row as u8);
            let ch = match state.cell(p) {
                Cell::Empty => '.',
                Cell::Classical(id) if id.color() == Color::Black => 'x',
                Cell::Classical(_) => 'o',
                Cell::Quantum(id) if id.color() == Color::Black => 'X',
                Cell::Quantum(_) => 'O',
            };
            write!(out, " {ch}").unwrap();
        }
        writeln!(out, " {}", row + 1).unwrap();
    }
    writeln!(out, "   {letters}").unwrap();
    out
}
