//! The quantum stone box: where collapse bits come from.
//!
//! Bits are drawn from a seeded model of the entangled pair
//! `cos θ |HV⟩ + e^{iφ} sin θ |VH⟩`, extracted from four-channel time-tag
//! streams by coincidence counting, or read from a fixed script. A `0`
//! settles a stone on its `p1`, a `1` on its `p2`.

mod coincidence;
mod model;
mod tagfile;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use coincidence::{
    extract_bits, sort_tags, visibility, CoincidenceConfig, CoincidenceCounts, CoincidenceMatcher, Extraction,
    PairKind, TimeTag,
};
pub use model::{concurrence_pure, generate_timetags, StateParams};
pub use tagfile::{read_tags, write_tags, TagFormat};

use crate::rules::Bit;
use tagfile::FileBits;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("bit source exhausted")]
    Exhausted,
    #[error("invalid state parameters: {0}")]
    InvalidParams(String),
    #[error("malformed bit script: unexpected {found:?} at offset {offset}")]
    MalformedScript { offset: usize, found: char },
    #[error("malformed source spec `{0}`")]
    MalformedSpec(String),
    #[error("time tags are not sorted at index {index}")]
    Unsorted { index: usize },
    #[error("invalid channel {0}; channels are 1..=4")]
    InvalidChannel(u8),
    #[error("no coincidences counted")]
    ZeroTotal,
    #[error("tag file: {0}")]
    TagFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sequential supplier of collapse bits.
pub trait CollapseBits {
    fn next_bit(&mut self) -> Result<Bit, SourceError>;
}

impl<T: CollapseBits + ?Sized> CollapseBits for &mut T {
    fn next_bit(&mut self) -> Result<Bit, SourceError> {
        (**self).next_bit()
    }
}

/// Parses a bit script: `0`/`1` characters, whitespace ignored.
pub fn parse_bit_script(text: &str) -> Result<Vec<Bit>, SourceError> {
    text.char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(offset, c)| Bit::from_char(c).ok_or(SourceError::MalformedScript { offset, found: c }))
        .collect()
}

pub fn format_bit_script(bits: &[Bit]) -> String {
    bits.iter().map(|b| if *b == Bit::Zero { '0' } else { '1' }).collect()
}

/// How to open a [`BitSource`].
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    Simulated { params: StateParams, seed: u64 },
    FromFile { path: PathBuf, config: CoincidenceConfig },
    Scripted(Vec<Bit>),
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Scripted(Vec::new())
    }
}

impl SourceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceSpec::Simulated { .. } => "simulated",
            SourceSpec::FromFile { .. } => "file",
            SourceSpec::Scripted(_) => "scripted",
        }
    }

    /// True when collapse results are fully determined by the players'
    /// designations (`θ` at 0 or π/2).
    pub fn is_deterministic(&self) -> bool {
        match self {
            SourceSpec::Simulated { params, .. } => concurrence_pure(params.theta) < 1e-12,
            _ => false,
        }
    }
}

/// `simulated theta=… phi=… noise_hh=… noise_vv=… seed=…`,
/// `file <path> window=… delays=a,b,c,d` or `scripted <bits>`.
impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Simulated { params, seed } => write!(
                f,
                "simulated theta={} phi={} noise_hh={} noise_vv={} seed={}",
                params.theta, params.phi, params.noise_hh, params.noise_vv, seed
            ),
            SourceSpec::FromFile { path, config } => {
                let d = config.delays;
                write!(
                    f,
                    "file {} window={} delays={},{},{},{}",
                    path.display(),
                    config.window,
                    d[0],
                    d[1],
                    d[2],
                    d[3]
                )
            }
            SourceSpec::Scripted(bits) if bits.is_empty() => write!(f, "scripted"),
            SourceSpec::Scripted(bits) => write!(f, "scripted {}", format_bit_script(bits)),
        }
    }
}

impl FromStr for SourceSpec {
    type Err = SourceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || SourceError::MalformedSpec(s.to_string());
        let s = s.trim();
        let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        let rest = rest.trim();
        match kind {
            "scripted" => Ok(SourceSpec::Scripted(parse_bit_script(rest)?)),
            "simulated" => {
                let mut params = StateParams::default();
                let mut seed = 0u64;
                for kv in rest.split_whitespace() {
                    let (k, v) = kv.split_once('=').ok_or_else(malformed)?;
                    if k == "seed" {
                        seed = v.parse().map_err(|_| malformed())?;
                        continue;
                    }
                    let x: f64 = v.parse().map_err(|_| malformed())?;
                    match k {
                        "theta" => params.theta = x,
                        "phi" => params.phi = x,
                        "noise_hh" => params.noise_hh = x,
                        "noise_vv" => params.noise_vv = x,
                        "pair_rate" => params.pair_rate = x,
                        "dark_rate" => params.dark_rate = x,
                        "jitter" => params.jitter = x,
                        _ => return Err(malformed()),
                    }
                }
                params.validate()?;
                Ok(SourceSpec::Simulated { params, seed })
            }
            "file" => {
                let mut parts = rest.split_whitespace();
                let path = parts.next().ok_or_else(malformed)?;
                let mut config = CoincidenceConfig::default();
                for kv in parts {
                    let (k, v) = kv.split_once('=').ok_or_else(malformed)?;
                    match k {
                        "window" => config.window = v.parse().map_err(|_| malformed())?,
                        "delays" => {
                            let ds: Vec<i64> = v
                                .split(',')
                                .map(|d| d.parse().map_err(|_| malformed()))
                                .collect::<Result<_, _>>()?;
                            config.delays = ds.try_into().map_err(|_| malformed())?;
                        }
                        _ => return Err(malformed()),
                    }
                }
                Ok(SourceSpec::FromFile {
                    path: path.into(),
                    config,
                })
            }
            _ => Err(malformed()),
        }
    }
}

/// A single-consumer stream of collapse bits with consumption and discard
/// accounting.
pub struct BitSource {
    spec: SourceSpec,
    inner: Inner,
    consumed: u64,
    discarded: u64,
}

enum Inner {
    Simulated {
        rng: ChaCha8Rng,
        p_noise: f64,
        p_zero: f64,
    },
    Scripted {
        pos: usize,
    },
    File(Box<FileBits>),
}

impl fmt::Debug for BitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitSource")
            .field("spec", &self.spec)
            .field("consumed", &self.consumed)
            .field("discarded", &self.discarded)
            .finish()
    }
}

/// Opens a bit source. File sources validate the file up front and then
/// extract coincidences lazily as bits are read.
pub fn open_bitsource(spec: &SourceSpec) -> Result<BitSource, SourceError> {
    let inner = match spec {
        SourceSpec::Simulated { params, seed } => {
            params.validate()?;
            let p_noise = params.noise_hh + params.noise_vv;
            Inner::Simulated {
                rng: ChaCha8Rng::seed_from_u64(*seed),
                p_noise,
                p_zero: params.theta.cos().powi(2) * (1.0 - p_noise),
            }
        }
        SourceSpec::Scripted(_) => Inner::Scripted { pos: 0 },
        SourceSpec::FromFile { path, config } => Inner::File(Box::new(FileBits::open(path, config)?)),
    };
    Ok(BitSource {
        spec: spec.clone(),
        inner,
        consumed: 0,
        discarded: 0,
    })
}

impl BitSource {
    pub fn simulated(params: StateParams, seed: u64) -> Result<Self, SourceError> {
        open_bitsource(&SourceSpec::Simulated { params, seed })
    }

    pub fn scripted(bits: Vec<Bit>) -> Self {
        open_bitsource(&SourceSpec::Scripted(bits)).expect("scripted sources always open")
    }

    pub fn spec(&self) -> &SourceSpec {
        &self.spec
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Undesired HH/VV outcomes skipped so far.
    pub fn discarded(&self) -> u64 {
        self.discarded
    }

    /// Coincidence tallies seen so far, for file-backed sources.
    pub fn coincidence_counts(&self) -> Option<CoincidenceCounts> {
        match &self.inner {
            Inner::File(f) => Some(f.counts()),
            _ => None,
        }
    }

    /// Script bits not yet read, for scripted sources.
    pub fn remaining_script(&self) -> Option<usize> {
        match (&self.inner, &self.spec) {
            (Inner::Scripted { pos }, SourceSpec::Scripted(bits)) => Some(bits.len() - pos),
            _ => None,
        }
    }

    /// Reads `n` bits.
    pub fn take_bits(&mut self, n: usize) -> Result<Vec<Bit>, SourceError> {
        (0..n).map(|_| self.next_bit()).collect()
    }
}

impl CollapseBits for BitSource {
    fn next_bit(&mut self) -> Result<Bit, SourceError> {
        let bit = match &mut self.inner {
            Inner::Simulated { rng, p_noise, p_zero } => loop {
                let u: f64 = rng.random();
                if u < *p_noise {
                    self.discarded += 1;
                    continue;
                }
                break if u - *p_noise < *p_zero { Bit::Zero } else { Bit::One };
            },
            Inner::Scripted { pos } => {
                let SourceSpec::Scripted(bits) = &self.spec else { unreachable!() };
                let b = *bits.get(*pos).ok_or(SourceError::Exhausted)?;
                *pos += 1;
                b
            }
            Inner::File(file) => {
                let b = file.next_bit();
                let c = file.counts();
                self.discarded = c.n_hh + c.n_vv;
                b?
            }
        };
        self.consumed += 1;
        Ok(bit)
    }
}
