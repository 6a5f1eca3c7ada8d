use std::collections::HashSet;
use std::fmt;

use super::coord::Intersection;
use super::state::GameState;
use super::stone::{Cell, Phase, StoneId};

/// A broken structural invariant found by [`GameState::audit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A cell refers to a stone that is missing or elsewhere.
    Occupancy(Intersection),
    /// A stone is not recorded in the cells its phase says it holds.
    Misplaced(StoneId),
    /// A quantum candidate has another stone inside its detectable area.
    Unresolved(StoneId, Intersection),
    /// A classical group with no liberties is still on the board.
    Dead(Intersection),
    PassCount(u8),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Occupancy(p) => write!(f, "cell {p} refers to a stone that is not there"),
            Violation::Misplaced(id) => write!(f, "stone {id} does not occupy its cells"),
            Violation::Unresolved(id, p) => write!(f, "quantum stone {id} has a neighbour at {p}"),
            Violation::Dead(p) => write!(f, "group at {p} has no liberties"),
            Violation::PassCount(n) => write!(f, "{n} consecutive passes"),
        }
    }
}

impl GameState {
    /// Checks the invariants every fully resolved position satisfies.
    pub fn audit(&self) -> Vec<Violation> {
        let size = self.config.size;
        let range = self.config.detect_range;
        let mut out = Vec::new();
        if self.consecutive_passes > 2 {
            out.push(Violation::PassCount(self.consecutive_passes));
        }
        for (p, cell) in self.cells() {
            let ok = match cell {
                Cell::Empty => true,
                Cell::Classical(id) => self.stones.get(&id).is_some_and(|s| s.phase == Phase::Classical(p)),
                Cell::Quantum(id) => self
                    .stones
                    .get(&id)
                    .is_some_and(|s| s.is_quantum() && (s.p1 == p || s.p2 == p)),
            };
            if !ok {
                out.push(Violation::Occupancy(p));
            }
        }
        for s in self.stones.values() {
            let placed = match s.phase {
                Phase::Quantum => {
                    s.p1 != s.p2 && self.cell(s.p1) == Cell::Quantum(s.id) && self.cell(s.p2) == Cell::Quantum(s.id)
                }
                Phase::Classical(at) => self.cell(at) == Cell::Classical(s.id),
            };
            if !placed {
                out.push(Violation::Misplaced(s.id));
            }
            if s.is_quantum() {
                for c in [s.p1, s.p2] {
                    for q in c.within(range, size) {
                        if q != s.p1 && q != s.p2 && self.cell(q) != Cell::Empty {
                            out.push(Violation::Unresolved(s.id, q));
                        }
                    }
                }
            }
        }
        let mut visited = HashSet::new();
        for (p, cell) in self.cells() {
            if matches!(cell, Cell::Classical(_)) && !visited.contains(&p) {
                let (group, liberties) = self.group_liberties(p).expect("classical cell");
                visited.extend(group);
                if liberties == 0 {
                    out.push(Violation::Dead(p));
                }
            }
        }
        out
    }
}
