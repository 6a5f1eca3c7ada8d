use std::collections::{BTreeMap, HashSet};

use super::coord::{Color, Intersection};
use super::stone::{BoardConfig, Cell, Move, Phase, QuantumStone, StoneId};
use super::{IllegalMove, RulesError};

/// Full game position plus the bookkeeping needed for turn order,
/// termination and the superko check.
#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub(super) config: BoardConfig,
    pub(super) grid: Vec<Cell>,
    pub(super) stones: BTreeMap<StoneId, QuantumStone>,
    pub(super) to_move: Color,
    pub(super) consecutive_passes: u8,
    pub(super) history: Vec<u64>,
    pub(super) seen: HashSet<u64>,
    pub(super) move_count: u32,
    pub(super) digest: u64,
    pub(super) last_placed: Option<StoneId>,
}

impl GameState {
    pub fn new(config: BoardConfig) -> Result<Self, RulesError> {
        config.validate()?;
        let digest = 0;
        Ok(GameState {
            grid: vec![Cell::Empty; config.size * config.size],
            config,
            stones: BTreeMap::new(),
            to_move: Color::Black,
            consecutive_passes: 0,
            history: vec![digest],
            seen: HashSet::from([digest]),
            move_count: 0,
            digest,
            last_placed: None,
        })
    }

    pub fn config(&self) -> &BoardConfig {
        &self.config
    }

    pub fn size(&self) -> usize {
        self.config.size
    }

    pub fn cell(&self, p: Intersection) -> Cell {
        self.grid[p.index(self.config.size)]
    }

    pub fn cells(&self) -> impl Iterator<Item = (Intersection, Cell)> + '_ {
        let size = self.config.size;
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, &c)| (Intersection::from_index(i, size), c))
    }

    pub fn stone(&self, id: StoneId) -> Option<&QuantumStone> {
        self.stones.get(&id)
    }

    /// Stones currently on the board, in placement order. Captured stones
    /// leave the registry.
    pub fn stones(&self) -> impl Iterator<Item = &QuantumStone> {
        self.stones.values()
    }

    pub fn quantum_stones(&self) -> impl Iterator<Item = &QuantumStone> {
        self.stones.values().filter(|s| s.is_quantum())
    }

    pub fn quantum_count(&self, color: Color) -> usize {
        self.quantum_stones().filter(|s| s.color == color).count()
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn consecutive_passes(&self) -> u8 {
        self.consecutive_passes
    }

    pub fn is_terminal(&self) -> bool {
        self.consecutive_passes >= 2
    }

    pub fn move_count(&self) -> u32 {
        self.move_count
    }

    pub fn last_placed(&self) -> Option<StoneId> {
        self.last_placed
    }

    /// Digest of the observable position: classical stones and unordered
    /// candidate pairs, without p1/p2 designations.
    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// Digests after every resolved move, starting with the empty board.
    pub fn history(&self) -> &[u64] {
        &self.history
    }

    pub fn empty_cells(&self) -> Vec<Intersection> {
        self.cells()
            .filter(|(_, c)| *c == Cell::Empty)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn next_stone_id(&self) -> StoneId {
        StoneId(self.move_count + 1)
    }

    /// Checks a placement for the side to move.
    pub fn check_placement(&self, p1: Intersection, p2: Intersection) -> Result<(), IllegalMove> {
        let size = self.config.size;
        for p in [p1, p2] {
            if !p.in_bounds(size) {
                return Err(IllegalMove::OffBoard(p));
            }
        }
        if p1 == p2 {
            return Err(IllegalMove::SamePoint(p1));
        }
        for p in [p1, p2] {
            if self.cell(p) != Cell::Empty {
                return Err(IllegalMove::Occupied(p));
            }
        }
        if !self.passes_superko(p1, p2) {
            return Err(IllegalMove::Superko);
        }
        Ok(())
    }

    pub(crate) fn passes_superko(&self, p1: Intersection, p2: Intersection) -> bool {
        let size = self.config.size;
        let d = self.digest ^ pair_key(self.to_move, p1.index(size), p2.index(size));
        !self.seen.contains(&d)
    }

    pub fn check_move(&self, mv: Move) -> Result<(), RulesError> {
        if self.is_terminal() {
            return Err(RulesError::Terminal);
        }
        match mv {
            Move::Pass => Ok(()),
            Move::Place { p1, p2 } => self.check_placement(p1, p2).map_err(RulesError::Illegal),
        }
    }

    /// Legal placements as unordered pairs `(a, b)` with `a < b`. Each pair
    /// may be played in either p1/p2 order.
    pub fn legal_placements(&self) -> Result<Vec<(Intersection, Intersection)>, RulesError> {
        if self.is_terminal() {
            return Err(RulesError::Terminal);
        }
        let empty = self.empty_cells();
        let mut out = Vec::with_capacity(empty.len() * empty.len().saturating_sub(1) / 2);
        for (i, &a) in empty.iter().enumerate() {
            for &b in &empty[i + 1..] {
                if self.passes_superko(a, b) {
                    out.push((a, b));
                }
            }
        }
        Ok(out)
    }

    /// Every legal move: `Pass` plus both designations of each legal pair.
    pub fn legal_moves(&self) -> Result<Vec<Move>, RulesError> {
        let pairs = self.legal_placements()?;
        let mut moves = Vec::with_capacity(pairs.len() * 2 + 1);
        moves.push(Move::Pass);
        for (a, b) in pairs {
            moves.push(Move::place(a, b));
            moves.push(Move::place(b, a));
        }
        Ok(moves)
    }

    pub(super) fn set_cell(&mut self, p: Intersection, cell: Cell) {
        let i = p.index(self.config.size);
        self.grid[i] = cell;
    }

    pub(super) fn add_quantum(&mut self, stone: QuantumStone) {
        let size = self.config.size;
        self.set_cell(stone.p1, Cell::Quantum(stone.id));
        self.set_cell(stone.p2, Cell::Quantum(stone.id));
        self.digest ^= pair_key(stone.color, stone.p1.index(size), stone.p2.index(size));
        self.stones.insert(stone.id, stone);
    }

    /// Settles a quantum stone at `at` and vacates its other candidate.
    pub(super) fn settle(&mut self, id: StoneId, at: Intersection) {
        let size = self.config.size;
        let stone = self.stones.get_mut(&id).expect("settling a stone that is not on the board");
        debug_assert!(stone.is_quantum());
        let other = if at == stone.p1 { stone.p2 } else { stone.p1 };
        stone.phase = Phase::Classical(at);
        let color = stone.color;
        self.digest ^= pair_key(color, stone.p1.index(size), stone.p2.index(size));
        self.digest ^= classical_key(color, at.index(size));
        self.set_cell(at, Cell::Classical(id));
        self.set_cell(other, Cell::Empty);
    }

    pub(super) fn remove_classical(&mut self, id: StoneId) -> Intersection {
        let size = self.config.size;
        let stone = self.stones.remove(&id).expect("removing a stone that is not on the board");
        let Phase::Classical(at) = stone.phase else {
            panic!("only classical stones can be removed");
        };
        self.digest ^= classical_key(stone.color, at.index(size));
        self.set_cell(at, Cell::Empty);
        at
    }

    pub(super) fn commit_position(&mut self) {
        self.history.push(self.digest);
        self.seen.insert(self.digest);
    }

    pub(super) fn color_at(&self, p: Intersection) -> Option<Color> {
        match self.cell(p) {
            Cell::Empty => None,
            Cell::Classical(id) | Cell::Quantum(id) => Some(self.stones[&id].color),
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn color_tag(color: Color) -> u64 {
    match color {
        Color::Black => 1,
        Color::White => 2,
    }
}

fn classical_key(color: Color, index: usize) -> u64 {
    mix(((index as u64) << 2) | color_tag(color))
}

fn pair_key(color: Color, a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    mix(0x5157_0000_0000_0000 ^ ((lo as u64) << 32) ^ ((hi as u64) << 2) ^ color_tag(color))
}
