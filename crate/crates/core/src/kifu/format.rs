//! The text format.
//!
//! ```text
//! qgo-kifu v1
//! size 7
//! komi 0.5                 # omitted when 0
//! detect_range 1           # omitted when 1
//! measure_at_end false     # omitted when true
//! theta 0.5 [0.6]          # black [white]; omitted at pi/4
//! phi 0 [0]                # omitted at 0
//! source simulated theta=0.785 phi=0 noise_hh=0 noise_vv=0 seed=7
//! 1 B place F2 F5
//! 2 W pass
//! 3 B place D2 B1
//! collapse 2 bit=0 -> B6
//! capture 4 at C3
//! result B+3.5             # W+x for white; a draw is B+0
//! ```
//!
//! Collapse and capture lines belong to the move above them. When they
//! follow the final pass they record the end-of-game measurement.

use std::fmt::Write as _;
use std::str::FromStr;

use super::model::{GameResult, Kifu, KifuHeader, MoveRecord};
use super::{ParseError, ParseErrorKind};
use crate::rules::{Bit, BoardConfig, Capture, Color, CollapseRecord, Intersection, Move, StoneAngles, StoneId};
use crate::source::SourceSpec;

pub const VERSION_LINE: &str = "qgo-kifu v1";

pub fn serialize(kifu: &Kifu) -> String {
    let h = &kifu.header;
    let defaults = BoardConfig::default();
    let mut out = String::new();
    out.push_str(VERSION_LINE);
    out.push('\n');
    writeln!(out, "size {}", h.size).unwrap();
    if h.komi != 0.0 {
        writeln!(out, "komi {}", h.komi).unwrap();
    }
    if h.detect_range != defaults.detect_range {
        writeln!(out, "detect_range {}", h.detect_range).unwrap();
    }
    if !h.measure_at_end {
        out.push_str("measure_at_end false\n");
    }
    let dflt = StoneAngles::default();
    let (b, w) = (h.angles.black, h.angles.white);
    if b.theta != dflt.theta || w.theta != dflt.theta {
        write_pair(&mut out, "theta", b.theta, w.theta);
    }
    if b.phi != dflt.phi || w.phi != dflt.phi {
        write_pair(&mut out, "phi", b.phi, w.phi);
    }
    if h.source != SourceSpec::default() {
        writeln!(out, "source {}", h.source).unwrap();
    }
    for m in &kifu.moves {
        writeln!(out, "{} {} {}", m.index, m.color.letter(), m.mv).unwrap();
        write_effects(&mut out, &m.collapses, &m.captures);
    }
    write_effects(&mut out, &kifu.final_measurement, &kifu.final_captures);
    if let Some(r) = kifu.result {
        let side = if r.margin < 0.0 { 'W' } else { 'B' };
        writeln!(out, "result {side}+{}", r.margin.abs()).unwrap();
    }
    out
}

fn write_pair(out: &mut String, key: &str, black: f64, white: f64) {
    if black == white {
        writeln!(out, "{key} {black}").unwrap();
    } else {
        writeln!(out, "{key} {black} {white}").unwrap();
    }
}

fn write_effects(out: &mut String, collapses: &[CollapseRecord], captures: &[Capture]) {
    for c in collapses {
        writeln!(out, "collapse {} bit={} -> {}", c.stone, c.bit, c.result).unwrap();
    }
    for c in captures {
        writeln!(out, "capture {} at {}", c.stone, c.at).unwrap();
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end: usize,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.number,
            column,
            kind,
        }
    }

    fn at(&self, i: usize, kind: ParseErrorKind) -> ParseError {
        let column = self.tokens.get(i).map_or(self.end, |t| t.column);
        self.err(column, kind)
    }

    fn token(&self, i: usize, expected: &str) -> Result<&'a str, ParseError> {
        self.tokens
            .get(i)
            .map(|t| t.text)
            .ok_or_else(|| self.at(i, ParseErrorKind::Expected(expected.to_string())))
    }

    fn number<T: FromStr>(&self, i: usize, expected: &str) -> Result<T, ParseError> {
        self.token(i, expected)?
            .parse()
            .map_err(|_| self.at(i, ParseErrorKind::Expected(expected.to_string())))
    }

    fn point(&self, i: usize, size: usize) -> Result<Intersection, ParseError> {
        let text = self.token(i, "a coordinate")?;
        Intersection::parse_on(text, size).map_err(|e| self.at(i, ParseErrorKind::Coordinate(e)))
    }

    fn done(&self, n: usize) -> Result<(), ParseError> {
        if self.tokens.len() > n {
            let t = &self.tokens[n];
            return Err(self.err(t.column, ParseErrorKind::Unexpected(t.text.to_string())));
        }
        Ok(())
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then(|| Line {
            number: i + 1,
            tokens,
            end: body.trim_end().chars().count() + 1,
        })
    })
}

/// Where collapse and capture lines currently attach.
#[derive(PartialEq)]
enum Target {
    Nothing,
    Move,
    Final,
    Closed,
}

pub fn parse(text: &str) -> Result<Kifu, ParseError> {
    let mut it = lines(text);
    let Some(first) = it.next() else {
        return Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Version(String::new()),
        });
    };
    let joined: Vec<&str> = first.tokens.iter().map(|t| t.text).collect();
    if joined.join(" ") != VERSION_LINE {
        return Err(first.err(1, ParseErrorKind::Version(joined.join(" "))));
    }

    let mut config = BoardConfig::default();
    let mut size_seen = false;
    let mut source = SourceSpec::default();
    let mut seen_keys: Vec<&str> = Vec::new();
    let mut kifu: Option<Kifu> = None;
    let mut target = Target::Nothing;

    for line in it {
        let head = line.tokens[0].text;
        if head.starts_with(|c: char| c.is_ascii_digit()) {
            if !size_seen {
                return Err(line.at(0, ParseErrorKind::Expected("a `size` line before the moves".into())));
            }
            if matches!(target, Target::Final | Target::Closed) {
                return Err(line.at(0, ParseErrorKind::Unexpected(head.to_string())));
            }
            let k = kifu.get_or_insert_with(|| Kifu::new(KifuHeader::new(&config, source.clone())));
            let index: u32 = line.number(0, "a move number")?;
            let expected = k.moves.len() as u32 + 1;
            if index != expected {
                return Err(line.at(0, ParseErrorKind::MoveNumber { expected, found: index }));
            }
            let color_text = line.token(1, "B or W")?;
            let color = match color_text {
                "B" => Color::Black,
                "W" => Color::White,
                _ => return Err(line.at(1, ParseErrorKind::Expected("B or W".into()))),
            };
            if color != Color::of_move(index) {
                return Err(line.at(1, ParseErrorKind::Alternation { index, found: color }));
            }
            let mv = match line.token(2, "place or pass")? {
                "pass" => {
                    line.done(3)?;
                    Move::Pass
                }
                "place" => {
                    let p1 = line.point(3, config.size)?;
                    let p2 = line.point(4, config.size)?;
                    line.done(5)?;
                    Move::place(p1, p2)
                }
                _ => return Err(line.at(2, ParseErrorKind::Expected("place or pass".into()))),
            };
            k.moves.push(MoveRecord {
                index,
                color,
                mv,
                collapses: Vec::new(),
                captures: Vec::new(),
            });
            target = Target::Move;
            continue;
        }
        match head {
            "collapse" | "capture" => {
                let Some(k) = kifu.as_mut() else {
                    return Err(line.at(0, ParseErrorKind::Unexpected(head.to_string())));
                };
                if target == Target::Closed {
                    return Err(line.at(0, ParseErrorKind::Unexpected(head.to_string())));
                }
                let last = k.moves.last().expect("a move precedes");
                if last.mv == Move::Pass {
                    target = Target::Final;
                }
                let id: u32 = line.number(1, "a stone number")?;
                let known = id >= 1
                    && (id as usize) <= k.moves.len()
                    && matches!(k.moves[id as usize - 1].mv, Move::Place { .. });
                if !known {
                    return Err(line.at(1, ParseErrorKind::UnknownStone(StoneId(id))));
                }
                let stone = StoneId(id);
                if head == "collapse" {
                    let bit = match line.token(2, "bit=0 or bit=1")? {
                        "bit=0" => Bit::Zero,
                        "bit=1" => Bit::One,
                        _ => return Err(line.at(2, ParseErrorKind::Expected("bit=0 or bit=1".into()))),
                    };
                    if line.token(3, "->")? != "->" {
                        return Err(line.at(3, ParseErrorKind::Expected("->".into())));
                    }
                    let result = line.point(4, config.size)?;
                    line.done(5)?;
                    let list = if target == Target::Final {
                        &mut k.final_measurement
                    } else {
                        &mut k.moves.last_mut().unwrap().collapses
                    };
                    list.push(CollapseRecord {
                        stone,
                        bit,
                        result,
                        order_index: list.len() as u32,
                    });
                } else {
                    if line.token(2, "at")? != "at" {
                        return Err(line.at(2, ParseErrorKind::Expected("at".into())));
                    }
                    let at = line.point(3, config.size)?;
                    line.done(4)?;
                    let list = if target == Target::Final {
                        &mut k.final_captures
                    } else {
                        &mut k.moves.last_mut().unwrap().captures
                    };
                    list.push(Capture { stone, at });
                }
            }
            "result" => {
                if target == Target::Closed {
                    return Err(line.at(0, ParseErrorKind::Unexpected(head.to_string())));
                }
                let k = kifu.get_or_insert_with(|| Kifu::new(KifuHeader::new(&config, source.clone())));
                let text = line.token(1, "B+<margin> or W+<margin>")?;
                let bad = || line.at(1, ParseErrorKind::Expected("B+<margin> or W+<margin>".into()));
                let (side, value) = text.split_once('+').ok_or_else(bad)?;
                let value: f64 = value.parse().map_err(|_| bad())?;
                if !(value.is_finite() && value >= 0.0) {
                    return Err(bad());
                }
                let margin = match side {
                    "B" => value,
                    "W" => -value,
                    _ => return Err(bad()),
                };
                line.done(2)?;
                k.result = Some(GameResult { margin });
                target = Target::Closed;
            }
            key => {
                if kifu.is_some() {
                    return Err(line.at(0, ParseErrorKind::Unexpected(key.to_string())));
                }
                if seen_keys.contains(&key) {
                    return Err(line.at(0, ParseErrorKind::DuplicateHeader(key.to_string())));
                }
                match key {
                    "size" => {
                        config.size = line.number(1, "a board size")?;
                        line.done(2)?;
                        config
                            .validate()
                            .map_err(|e| line.at(1, ParseErrorKind::Config(e)))?;
                        size_seen = true;
                    }
                    "komi" => {
                        config.komi = line.number(1, "a komi value")?;
                        line.done(2)?;
                        if !(config.komi.is_finite() && config.komi >= 0.0) {
                            return Err(line.at(1, ParseErrorKind::Expected("a non-negative komi".into())));
                        }
                    }
                    "detect_range" => {
                        config.detect_range = line.number(1, "a detect range")?;
                        line.done(2)?;
                        if config.detect_range < 1 {
                            return Err(line.at(1, ParseErrorKind::Expected("a detect range of at least 1".into())));
                        }
                    }
                    "measure_at_end" => {
                        config.measure_at_end = line.number(1, "true or false")?;
                        line.done(2)?;
                    }
                    "theta" | "phi" => {
                        let black: f64 = line.number(1, "an angle")?;
                        let white: f64 = if line.tokens.len() > 2 {
                            line.number(2, "an angle")?
                        } else {
                            black
                        };
                        line.done(3)?;
                        if !(black.is_finite() && white.is_finite()) {
                            return Err(line.at(1, ParseErrorKind::Expected("a finite angle".into())));
                        }
                        if key == "theta" {
                            for (i, t) in [black, white].into_iter().enumerate() {
                                if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&t) {
                                    return Err(line.at(1 + i, ParseErrorKind::Expected("theta in [0, pi/2]".into())));
                                }
                            }
                            config.angles.black.theta = black;
                            config.angles.white.theta = white;
                        } else {
                            config.angles.black.phi = black;
                            config.angles.white.phi = white;
                        }
                    }
                    "source" => {
                        let start = line.tokens[1..].first().map_or(line.end, |t| t.column);
                        let rest: Vec<&str> = line.tokens[1..].iter().map(|t| t.text).collect();
                        source = rest
                            .join(" ")
                            .parse()
                            .map_err(|e| line.err(start, ParseErrorKind::Source(format!("{e}"))))?;
                    }
                    _ => return Err(line.at(0, ParseErrorKind::Unexpected(key.to_string()))),
                }
                seen_keys.push(key);
            }
        }
    }
    if !size_seen {
        return Err(ParseError {
            line: text.lines().count().max(1),
            column: 1,
            kind: ParseErrorKind::Expected("a `size` line".into()),
        });
    }
    Ok(kifu.unwrap_or_else(|| Kifu::new(KifuHeader::new(&config, source))))
}
