use std::collections::{BTreeSet, HashSet};

use super::coord::{Color, Intersection};
use super::state::GameState;
use super::stone::{Bit, Capture, Cell, CollapseRecord, Move, Phase, QuantumStone, StoneId};
use super::RulesError;
use crate::source::{CollapseBits, SourceError};

/// What a single move did to the board.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveReport {
    pub index: u32,
    pub color: Color,
    pub mv: Move,
    /// The stone created by a placement.
    pub stone: Option<StoneId>,
    pub collapses: Vec<CollapseRecord>,
    pub captures: Vec<Capture>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveOutcome {
    pub report: MoveReport,
    pub state: GameState,
}

/// Applies `mv` to a copy of `state`.
pub fn apply_move<B: CollapseBits + ?Sized>(
    state: &GameState,
    mv: Move,
    bits: &mut B,
) -> Result<MoveOutcome, RulesError> {
    let mut next = state.clone();
    let report = next.play(mv, bits)?;
    Ok(MoveOutcome {
        report,
        state: next,
    })
}

impl GameState {
    /// Plays a move for the side to move. On error the state is unchanged.
    pub fn play<B: CollapseBits + ?Sized>(&mut self, mv: Move, bits: &mut B) -> Result<MoveReport, RulesError> {
        self.check_move(mv)?;
        let color = self.to_move;
        let index = self.move_count + 1;
        let mut report = MoveReport {
            index,
            color,
            mv,
            stone: None,
            collapses: Vec::new(),
            captures: Vec::new(),
        };
        match mv {
            Move::Pass => {
                self.consecutive_passes += 1;
            }
            Move::Place { p1, p2 } => {
                let mut next = self.clone();
                let order = next.involved_stones(p1, p2);
                let angles = next.config.angles.get(color);
                let id = next.next_stone_id();
                next.add_quantum(QuantumStone {
                    id,
                    color,
                    p1,
                    p2,
                    theta: angles.theta,
                    phi: angles.phi,
                    phase: Phase::Quantum,
                });
                if !order.is_empty() {
                    report.collapses = next.measure(&order, bits)?;
                    let settled: Vec<Intersection> = report.collapses.iter().map(|c| c.result).collect();
                    report.captures = next.resolve_captures(color, &settled);
                }
                next.consecutive_passes = 0;
                next.last_placed = Some(id);
                report.stone = Some(id);
                *self = next;
            }
        }
        self.commit_position();
        self.move_count = index;
        self.to_move = color.opponent();
        Ok(report)
    }

    /// Measurement order triggered by placing a new stone on `(p1, p2)`:
    /// touched quantum stones of the mover's color, then of the other
    /// color, each ascending by id, then the new stone. Empty when nothing
    /// lies in the new stone's detectable area. Classical neighbours
    /// trigger measurement but are not listed.
    pub fn involved_stones(&self, p1: Intersection, p2: Intersection) -> Vec<StoneId> {
        let size = self.config.size;
        let range = self.config.detect_range;
        let mut triggered = false;
        let mut touched = BTreeSet::new();
        for p in [p1, p2] {
            for q in p.within(range, size) {
                if q == p1 || q == p2 {
                    continue;
                }
                match self.cell(q) {
                    Cell::Empty => {}
                    Cell::Classical(_) => triggered = true,
                    Cell::Quantum(id) => {
                        triggered = true;
                        touched.insert(id);
                    }
                }
            }
        }
        if !triggered {
            return Vec::new();
        }
        let mover = self.to_move;
        let mut order = self.ordered_by_color(touched, mover);
        order.push(self.next_stone_id());
        order
    }

    fn ordered_by_color(&self, ids: impl IntoIterator<Item = StoneId>, first: Color) -> Vec<StoneId> {
        let mut ids: Vec<StoneId> = ids.into_iter().collect();
        ids.sort_by_key(|id| (self.stones[id].color != first, *id));
        ids
    }

    /// Measures the stones in `order`, then keeps measuring quantum stones
    /// that end up in the detectable area of a newly settled stone until
    /// none remain. Stones triggered by a settled stone are ordered with
    /// that stone's color first. On error the state is unchanged.
    pub fn resolve_collapse<B: CollapseBits + ?Sized>(
        &mut self,
        order: &[StoneId],
        bits: &mut B,
    ) -> Result<Vec<CollapseRecord>, RulesError> {
        let mut next = self.clone();
        let records = next.measure(order, bits)?;
        *self = next;
        Ok(records)
    }

    pub(super) fn measure<B: CollapseBits + ?Sized>(
        &mut self,
        order: &[StoneId],
        bits: &mut B,
    ) -> Result<Vec<CollapseRecord>, RulesError> {
        let size = self.config.size;
        let range = self.config.detect_range;
        let mut records = Vec::new();
        let mut wave: Vec<StoneId> = order.to_vec();
        while !wave.is_empty() {
            let mut settled = Vec::with_capacity(wave.len());
            for id in wave {
                let stone = self.stones.get(&id).ok_or(RulesError::UnknownStone(id))?;
                if !stone.is_quantum() {
                    continue;
                }
                let bit = bits.next_bit().map_err(RulesError::Bits)?;
                let at = stone.position_for(bit);
                let color = stone.color;
                self.settle(id, at);
                records.push(CollapseRecord {
                    stone: id,
                    bit,
                    result: at,
                    order_index: records.len() as u32,
                });
                settled.push((color, at));
            }
            let mut queued = HashSet::new();
            wave = Vec::new();
            for (color, at) in settled {
                let fresh: Vec<StoneId> = at
                    .within(range, size)
                    .filter_map(|q| match self.cell(q) {
                        Cell::Quantum(id) if queued.insert(id) => Some(id),
                        _ => None,
                    })
                    .collect();
                wave.extend(self.ordered_by_color(fresh, color));
            }
        }
        Ok(records)
    }

    /// Removes zero-liberty classical groups touching the `settled`
    /// points: the mover's opponent first, then the mover.
    pub(super) fn resolve_captures(&mut self, mover: Color, settled: &[Intersection]) -> Vec<Capture> {
        let mut captures = Vec::new();
        for color in [mover.opponent(), mover] {
            let mut dead: BTreeSet<StoneId> = BTreeSet::new();
            let mut visited = HashSet::new();
            for &s in settled {
                let size = self.config.size;
                for p in std::iter::once(s).chain(s.neighbors(size)) {
                    if visited.contains(&p) {
                        continue;
                    }
                    let Cell::Classical(id) = self.cell(p) else { continue };
                    if self.stones[&id].color != color {
                        continue;
                    }
                    let (group, liberties) = self.flood_group(p);
                    visited.extend(group.iter().copied());
                    if liberties == 0 {
                        dead.extend(group.iter().map(|&g| match self.cell(g) {
                            Cell::Classical(id) => id,
                            _ => unreachable!(),
                        }));
                    }
                }
            }
            for id in dead {
                let at = self.remove_classical(id);
                captures.push(Capture { stone: id, at });
            }
        }
        captures
    }

    /// Group of connected same-color classical stones containing `at`,
    /// and its liberties (adjacent empty or quantum-candidate points).
    pub fn group_liberties(&self, at: Intersection) -> Result<(BTreeSet<Intersection>, usize), RulesError> {
        if !at.in_bounds(self.config.size) {
            return Err(RulesError::NotClassical(at));
        }
        match self.cell(at) {
            Cell::Classical(_) => Ok(self.flood_group(at)),
            _ => Err(RulesError::NotClassical(at)),
        }
    }

    fn flood_group(&self, at: Intersection) -> (BTreeSet<Intersection>, usize) {
        let size = self.config.size;
        let color = self.color_at(at);
        let mut group = BTreeSet::from([at]);
        let mut liberties = HashSet::new();
        let mut stack = vec![at];
        while let Some(p) = stack.pop() {
            for q in p.neighbors(size) {
                match self.cell(q) {
                    Cell::Empty | Cell::Quantum(_) => {
                        liberties.insert(q);
                    }
                    Cell::Classical(_) => {
                        if self.color_at(q) == color && group.insert(q) {
                            stack.push(q);
                        }
                    }
                }
            }
        }
        (group, liberties.len())
    }

    /// Every possible result of playing `mv`, one per distinct sequence of
    /// collapse bits. Moves that trigger no measurement have one outcome.
    pub fn outcomes(&self, mv: Move) -> Result<Vec<(Vec<Bit>, MoveOutcome)>, RulesError> {
        let mut out = Vec::new();
        let mut pending = vec![Vec::new()];
        while let Some(prefix) = pending.pop() {
            let mut bits = PrefixBits { bits: &prefix, pos: 0 };
            match apply_move(self, mv, &mut bits) {
                Ok(outcome) => out.push((prefix, outcome)),
                Err(RulesError::Bits(SourceError::Exhausted)) => {
                    for b in [Bit::One, Bit::Zero] {
                        let mut longer = prefix.clone();
                        longer.push(b);
                        pending.push(longer);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        out.sort_by(|a, b| a.0.iter().map(|b| b.as_u8()).cmp(b.0.iter().map(|b| b.as_u8())));
        Ok(out)
    }
}

struct PrefixBits<'a> {
    bits: &'a [Bit],
    pos: usize,
}

impl CollapseBits for PrefixBits<'_> {
    fn next_bit(&mut self) -> Result<Bit, SourceError> {
        let b = self.bits.get(self.pos).copied().ok_or(SourceError::Exhausted)?;
        self.pos += 1;
        Ok(b)
    }
}
