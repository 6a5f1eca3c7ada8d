use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::AnalyticsError;
use crate::rules::{BoardConfig, Cell, Color, GameState, Intersection, Move, StoneId};

/// Node budget for [`enumerate_game_tree`].
pub const TREE_GUARD: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Ordinary Go: one stone per move, suicide illegal, positional superko.
    Classical,
    /// One node per unordered candidate pair and per collapse outcome.
    Quantum,
}

/// Node counts at depths `1..=depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCounts {
    pub variant: Variant,
    pub per_depth: Vec<u64>,
}

/// Rough upper estimate of the nodes an enumeration will visit.
pub fn projected_nodes(cells: usize, depth: usize, variant: Variant) -> f64 {
    (0..depth)
        .map(|d| {
            let free = cells.saturating_sub(d) as f64;
            match variant {
                Variant::Classical => free,
                Variant::Quantum => free * (free - 1.0).max(0.0) / 2.0 * 2f64.powi(d as i32 + 1),
            }
        })
        .scan(1.0, |acc, f| {
            *acc *= f;
            Some(*acc)
        })
        .sum()
}

/// Counts every placement sequence of length 1..=`depth` from the empty
/// board. Passing is not a tree edge.
pub fn enumerate_game_tree(config: &BoardConfig, depth: usize, variant: Variant) -> Result<TreeCounts, AnalyticsError> {
    config.validate().map_err(|e| AnalyticsError::Rules(e.into()))?;
    let cells = config.size * config.size;
    let projected = projected_nodes(cells, depth, variant);
    if projected > TREE_GUARD {
        return Err(AnalyticsError::TreeGuard { projected });
    }
    let per_depth = match variant {
        Variant::Classical => {
            let root = ClassicalBoard::new(config.size);
            let children = root.children();
            sum_levels(
                depth,
                children.into_par_iter().map(|c| {
                    let mut memo = HashMap::new();
                    c.count(depth - 1, &mut memo)
                }),
            )
        }
        Variant::Quantum => {
            let root = GameState::new(config.clone())?;
            let children = quantum_children(&root)?;
            let levels = children
                .into_par_iter()
                .map(|c| {
                    let mut memo = HashMap::new();
                    count_quantum(&c, depth - 1, &mut memo)
                })
                .collect::<Result<Vec<_>, _>>()?;
            sum_levels(depth, levels.into_par_iter())
        }
    };
    Ok(TreeCounts { variant, per_depth })
}

fn sum_levels(depth: usize, subtrees: impl ParallelIterator<Item = Vec<u64>>) -> Vec<u64> {
    if depth == 0 {
        return Vec::new();
    }
    let below: Vec<Vec<u64>> = subtrees.collect();
    let mut out = vec![0u64; depth];
    out[0] = below.len() as u64;
    for levels in below {
        for (i, n) in levels.into_iter().enumerate() {
            out[i + 1] += n;
        }
    }
    out
}

fn quantum_children(state: &GameState) -> Result<Vec<GameState>, AnalyticsError> {
    if state.is_terminal() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (a, b) in state.legal_placements()? {
        for (_, outcome) in state.outcomes(Move::place(a, b))? {
            out.push(outcome.state);
        }
    }
    Ok(out)
}

/// Everything about a position that affects the subtree below it. Stone
/// ids are replaced by their rank, which is all measurement order uses.
type QuantumKey = (Vec<u16>, bool, Vec<u64>);

fn quantum_key(state: &GameState) -> QuantumKey {
    let ids: Vec<StoneId> = state.stones().map(|s| s.id).collect();
    let rank = |id: StoneId| ids.binary_search(&id).unwrap() as u16;
    let grid = state
        .cells()
        .map(|(p, c)| match c {
            Cell::Empty => 0,
            Cell::Classical(id) => 1 + (id.color() == Color::White) as u16,
            Cell::Quantum(id) => {
                let s = state.stone(id).unwrap();
                let first = (s.p1 == p) as u16;
                4 + 4 * rank(id) + 2 * (id.color() == Color::White) as u16 + first
            }
        })
        .collect();
    let mut history: Vec<u64> = state.history().to_vec();
    history.sort_unstable();
    history.dedup();
    (grid, state.to_move() == Color::White, history)
}

fn count_quantum(
    state: &GameState,
    depth: usize,
    memo: &mut HashMap<(QuantumKey, usize), Vec<u64>>,
) -> Result<Vec<u64>, AnalyticsError> {
    if depth == 0 {
        return Ok(Vec::new());
    }
    let key = (quantum_key(state), depth);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let children = quantum_children(state)?;
    let mut out = vec![0u64; depth];
    out[0] = children.len() as u64;
    for c in &children {
        for (i, n) in count_quantum(c, depth - 1, memo)?.into_iter().enumerate() {
            out[i + 1] += n;
        }
    }
    memo.insert(key, out.clone());
    Ok(out)
}

/// Minimal classical Go position for the comparison tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalBoard {
    size: usize,
    grid: Vec<Option<Color>>,
    to_move: Color,
    history: Vec<Vec<Option<Color>>>,
}

impl ClassicalBoard {
    pub fn new(size: usize) -> Self {
        let grid = vec![None; size * size];
        ClassicalBoard {
            size,
            history: vec![grid.clone()],
            grid,
            to_move: Color::Black,
        }
    }

    pub fn stone(&self, p: Intersection) -> Option<Color> {
        self.grid[p.row as usize * self.size + p.col as usize]
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> {
        let size = self.size;
        Intersection::new((i % size) as u8, (i / size) as u8)
            .neighbors(size)
            .map(move |q| q.row as usize * size + q.col as usize)
    }

    fn group(&self, i: usize) -> (Vec<usize>, bool) {
        let color = self.grid[i];
        let mut seen = HashSet::from([i]);
        let mut stack = vec![i];
        let mut free = false;
        while let Some(p) = stack.pop() {
            for q in self.neighbours(p) {
                match self.grid[q] {
                    None => free = true,
                    c if c == color && seen.insert(q) => stack.push(q),
                    _ => {}
                }
            }
        }
        (seen.into_iter().collect(), free)
    }

    /// Plays at `at` for the side to move, or `None` if that is illegal.
    pub fn play(&self, at: Intersection) -> Option<ClassicalBoard> {
        let i = at.row as usize * self.size + at.col as usize;
        if self.grid[i].is_some() {
            return None;
        }
        let mut next = self.clone();
        let me = self.to_move;
        next.grid[i] = Some(me);
        let foes: Vec<usize> = next.neighbours(i).filter(|&q| next.grid[q] == Some(me.opponent())).collect();
        for q in foes {
            if next.grid[q].is_none() {
                continue;
            }
            let (g, free) = next.group(q);
            if !free {
                for s in g {
                    next.grid[s] = None;
                }
            }
        }
        if !next.group(i).1 {
            return None;
        }
        if next.history.contains(&next.grid) {
            return None;
        }
        next.history.push(next.grid.clone());
        next.to_move = me.opponent();
        Some(next)
    }

    pub fn children(&self) -> Vec<ClassicalBoard> {
        (0..self.grid.len())
            .filter_map(|i| self.play(Intersection::new((i % self.size) as u8, (i / self.size) as u8)))
            .collect()
    }

    fn key(&self) -> (Vec<Option<Color>>, Color, Vec<Vec<Option<Color>>>) {
        let mut h = self.history.clone();
        h.sort();
        (self.grid.clone(), self.to_move, h)
    }

    #[allow(clippy::type_complexity)]
    fn count(
        &self,
        depth: usize,
        memo: &mut HashMap<((Vec<Option<Color>>, Color, Vec<Vec<Option<Color>>>), usize), Vec<u64>>,
    ) -> Vec<u64> {
        if depth == 0 {
            return Vec::new();
        }
        let key = (self.key(), depth);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let children = self.children();
        let mut out = vec![0u64; depth];
        out[0] = children.len() as u64;
        for c in &children {
            for (i, n) in c.count(depth - 1, memo).into_iter().enumerate() {
                out[i + 1] += n;
            }
        }
        memo.insert(key, out.clone());
        out
    }
}
