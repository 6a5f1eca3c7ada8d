//! Tag files: packed little-endian `(u8 channel, u64 timestamp_ns)` records,
//! or CSV with a `channel,timestamp_ns` header.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::coincidence::{extract_bits, sort_tags, CoincidenceConfig, CoincidenceCounts, CoincidenceMatcher, PairKind, TimeTag};
use super::SourceError;
use crate::rules::Bit;

const RECORD_LEN: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagFormat {
    Binary,
    Csv,
}

impl TagFormat {
    /// `.csv` files are CSV, anything else is binary.
    pub fn from_path(path: &Path) -> TagFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => TagFormat::Csv,
            _ => TagFormat::Binary,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRecord {
    channel: u8,
    timestamp_ns: u64,
}

pub fn write_tags(path: &Path, tags: &[TimeTag], format: TagFormat) -> Result<(), SourceError> {
    let file = File::create(path)?;
    match format {
        TagFormat::Binary => {
            let mut w = BufWriter::new(file);
            for t in tags {
                w.write_all(&[t.channel])?;
                w.write_all(&t.timestamp.to_le_bytes())?;
            }
            w.flush()?;
        }
        TagFormat::Csv => {
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            for t in tags {
                w.serialize(CsvRecord {
                    channel: t.channel,
                    timestamp_ns: t.timestamp,
                })
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Reads a whole tag file. Out-of-order files are sorted with a warning.
pub fn read_tags(path: &Path) -> Result<Vec<TimeTag>, SourceError> {
    let mut tags = TagReader::open(path)?.collect::<Result<Vec<_>, _>>()?;
    if !tags.windows(2).all(|w| (w[0].timestamp, w[0].channel) <= (w[1].timestamp, w[1].channel)) {
        log::warn!("{}: tags are not time-sorted; sorting on load", path.display());
        sort_tags(&mut tags, &CoincidenceConfig::default());
    }
    Ok(tags)
}

fn csv_err(e: csv::Error) -> SourceError {
    SourceError::TagFile(e.to_string())
}

enum TagReader {
    Binary { reader: BufReader<File>, index: usize },
    Csv(csv::DeserializeRecordsIntoIter<BufReader<File>, CsvRecord>),
}

impl TagReader {
    fn open(path: &Path) -> Result<TagReader, SourceError> {
        let file = File::open(path)?;
        Ok(match TagFormat::from_path(path) {
            TagFormat::Binary => {
                let len = file.metadata()?.len();
                if len % RECORD_LEN as u64 != 0 {
                    return Err(SourceError::TagFile(format!(
                        "{}: length {len} is not a multiple of {RECORD_LEN}",
                        path.display()
                    )));
                }
                TagReader::Binary {
                    reader: BufReader::new(file),
                    index: 0,
                }
            }
            TagFormat::Csv => TagReader::Csv(csv::Reader::from_reader(BufReader::new(file)).into_deserialize()),
        })
    }
}

impl Iterator for TagReader {
    type Item = Result<TimeTag, SourceError>;

    fn next(&mut self) -> Option<Self::Item> {
        let tag = match self {
            TagReader::Binary { reader, index } => {
                let mut buf = [0u8; RECORD_LEN];
                match reader.read_exact(&mut buf) {
                    Ok(()) => {}
                    Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return None,
                    Err(e) => return Some(Err(e.into())),
                }
                *index += 1;
                let ts = u64::from_le_bytes(buf[1..].try_into().unwrap());
                TimeTag::new(buf[0], ts)
            }
            TagReader::Csv(it) => match it.next()? {
                Ok(r) => TimeTag::new(r.channel, r.timestamp_ns),
                Err(e) => return Some(Err(csv_err(e))),
            },
        };
        if !(1..=4).contains(&tag.channel) {
            return Some(Err(SourceError::InvalidChannel(tag.channel)));
        }
        Some(Ok(tag))
    }
}

/// Coincidence extraction over a tag file, one bit at a time.
///
/// Files sorted by raw timestamp are streamed: incoming tags wait in a
/// small heap until no later tag can precede them after delay correction.
/// Unsorted files are loaded and sorted up front.
pub(crate) struct FileBits {
    mode: Mode,
    matcher: CoincidenceMatcher,
    counts: CoincidenceCounts,
}

enum Mode {
    Lazy {
        reader: TagReader,
        config: CoincidenceConfig,
        heap: BinaryHeap<Reverse<(i64, u8, u64)>>,
        next: Option<TimeTag>,
        min_delay: i64,
    },
    Eager {
        events: Vec<PairKind>,
        pos: usize,
    },
}

impl FileBits {
    pub(crate) fn open(path: &Path, config: &CoincidenceConfig) -> Result<FileBits, SourceError> {
        config.validate()?;
        let mut sorted = true;
        let mut prev = 0u64;
        for tag in TagReader::open(path)? {
            let tag = tag?;
            if tag.timestamp < prev {
                sorted = false;
            }
            prev = tag.timestamp;
        }
        let mode = if sorted {
            let mut reader = TagReader::open(path)?;
            let next = reader.next().transpose()?;
            Mode::Lazy {
                reader,
                config: *config,
                heap: BinaryHeap::new(),
                next,
                min_delay: *config.delays.iter().min().unwrap(),
            }
        } else {
            log::warn!("{}: tags are not time-sorted; extracting eagerly", path.display());
            let mut tags = TagReader::open(path)?.collect::<Result<Vec<_>, _>>()?;
            sort_tags(&mut tags, config);
            Mode::Eager {
                events: extract_bits(&tags, config)?.events,
                pos: 0,
            }
        };
        Ok(FileBits {
            mode,
            matcher: CoincidenceMatcher::new(config.window),
            counts: CoincidenceCounts::default(),
        })
    }

    pub(crate) fn counts(&self) -> CoincidenceCounts {
        self.counts
    }

    fn next_event(&mut self) -> Result<Option<PairKind>, SourceError> {
        match &mut self.mode {
            Mode::Eager { events, pos } => {
                let e = events.get(*pos).copied();
                *pos += 1;
                Ok(e)
            }
            Mode::Lazy {
                reader,
                config,
                heap,
                next,
                min_delay,
            } => loop {
                let ready = match (heap.peek(), next.as_ref()) {
                    (None, None) => return Ok(None),
                    (Some(_), None) => true,
                    (Some(Reverse(top)), Some(n)) => top.0 < n.timestamp as i64 + *min_delay,
                    (None, Some(_)) => false,
                };
                if ready {
                    let Reverse((time, channel, _)) = heap.pop().unwrap();
                    if let Some(kind) = self.matcher.push(time, channel) {
                        return Ok(Some(kind));
                    }
                } else {
                    let tag = next.take().unwrap();
                    heap.push(Reverse((tag.corrected(config), tag.channel, tag.timestamp)));
                    *next = reader.next().transpose()?;
                }
            },
        }
    }

    pub(crate) fn next_bit(&mut self) -> Result<Bit, SourceError> {
        loop {
            let kind = self.next_event()?.ok_or(SourceError::Exhausted)?;
            self.counts.record(kind);
            if let Some(bit) = kind.bit() {
                return Ok(bit);
            }
        }
    }
}
