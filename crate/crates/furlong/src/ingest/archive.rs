//! Archive and file-tree ingestion.
//!
//! Input is any of: a `tar.bz2` container, a directory tree with one
//! subdirectory per event holding one compressed market file each, or a
//! single market file. Market files are newline-delimited JSON, optionally
//! bz2-compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, Cursor, Read};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use bzip2::read::MultiBzDecoder;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::message::{parse_message, MessageEnvelope};

/// Extensions recognized as market data files inside trees and archives.
const DATA_EXTENSIONS: &[&str] = &["bz2", "json", "jsonl", "ndjson", "txt"];

/// A lazily-opened line source for one market file.
#[derive(Debug)]
pub struct MarketStream {
    /// Event identity derived from the containing directory.
    pub event_id: String,
    /// Market identity derived from the file name (cross-checked against
    /// message ids during parsing).
    pub market_id: String,
    source: StreamSource,
}

#[derive(Debug)]
enum StreamSource {
    File { path: PathBuf, bz2: bool },
    Buffer { name: String, bytes: Vec<u8>, bz2: bool },
}

/// Reader wrapper that tracks how many raw bytes have been consumed, so
/// decode errors can report an offset into the compressed stream.
struct CountingReader<R> {
    inner: R,
    count: Arc<AtomicU64>,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.count.fetch_add(n as u64, Ordering::Relaxed);
        Ok(n)
    }
}

/// Line iterator over one market file, in file order.
pub struct LineIter {
    name: String,
    reader: Box<dyn BufRead + Send>,
    offset: Arc<AtomicU64>,
}

impl Iterator for LineIter {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => None,
            Ok(_) => {
                while line.ends_with('\n') || line.ends_with('\r') {
                    line.pop();
                }
                Some(Ok(line))
            }
            Err(e) => Some(Err(Error::CorruptStream {
                file: self.name.clone(),
                offset: self.offset.load(Ordering::Relaxed),
                reason: e.to_string(),
            })),
        }
    }
}

impl MarketStream {
    fn name(&self) -> String {
        match &self.source {
            StreamSource::File { path, .. } => path.display().to_string(),
            StreamSource::Buffer { name, .. } => name.clone(),
        }
    }

    /// Open the underlying source and iterate its lines.
    pub fn lines(&self) -> Result<LineIter> {
        let offset = Arc::new(AtomicU64::new(0));
        let (raw, bz2): (Box<dyn Read + Send>, bool) = match &self.source {
            StreamSource::File { path, bz2 } => {
                let file = File::open(path).map_err(|e| Error::io(path, e))?;
                (Box::new(file), *bz2)
            }
            StreamSource::Buffer { bytes, bz2, .. } => {
                (Box::new(Cursor::new(bytes.clone())), *bz2)
            }
        };
        let counted = CountingReader {
            inner: raw,
            count: Arc::clone(&offset),
        };
        let reader: Box<dyn BufRead + Send> = if bz2 {
            Box::new(BufReader::new(MultiBzDecoder::new(counted)))
        } else {
            Box::new(BufReader::new(counted))
        };
        Ok(LineIter {
            name: self.name(),
            reader,
            offset,
        })
    }

    /// Parse every line into a typed message, collecting data-quality
    /// warnings along the way.
    pub fn parse(&self) -> Result<ParsedMarketFile> {
        let mut messages = Vec::new();
        let mut stats = ParseStats::default();
        let mut warnings = Vec::new();
        let mut prev_pt: Option<i64> = None;
        let mut id_checked = false;
        let looks_like_market_id = self.market_id.starts_with("1.");
        let mut hasher = Sha256::new();

        for (idx, line) in self.lines()?.enumerate() {
            let line = line?;
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
            if line.trim().is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let env = parse_message(&line, line_no)?;
            stats.messages += 1;
            stats.unknown_fields += env.unknown_field_count();

            if let Some(prev) = prev_pt {
                if env.pt < prev {
                    stats.out_of_order_pt += 1;
                    warnings.push(format!(
                        "{}: line {line_no}: publish time {} precedes {}",
                        self.name(),
                        env.pt,
                        prev
                    ));
                }
            }
            prev_pt = Some(prev_pt.map_or(env.pt, |p| p.max(env.pt)));

            for mc in &env.mc {
                if looks_like_market_id && !id_checked && mc.id != self.market_id {
                    warnings.push(format!(
                        "{}: message market id {} does not match file name {}",
                        self.name(),
                        mc.id,
                        self.market_id
                    ));
                    id_checked = true;
                }
                if mc.market_definition.is_none() && mc.rc.is_none() {
                    stats.changes_without_payload += 1;
                    warnings.push(format!(
                        "{}: line {line_no}: market change for {} has neither definition nor runner changes",
                        self.name(),
                        mc.id
                    ));
                }
                for rc in mc.rc.iter().flatten() {
                    if !rc.ladders_in_bounds() {
                        stats.ladder_bound_violations += 1;
                        warnings.push(format!(
                            "{}: line {line_no}: ladder price outside [1.01, 1000] for selection {}",
                            self.name(),
                            rc.id
                        ));
                    }
                }
            }
            messages.push(env);
        }

        let digest = hasher.finalize();
        let mut content_hash = String::with_capacity(64);
        for byte in digest {
            content_hash.push_str(&format!("{byte:02x}"));
        }

        Ok(ParsedMarketFile {
            event_id: self.event_id.clone(),
            market_id: self.market_id.clone(),
            messages,
            stats,
            warnings,
            content_hash,
        })
    }
}

/// Per-file parse counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub messages: usize,
    pub unknown_fields: usize,
    pub out_of_order_pt: usize,
    pub ladder_bound_violations: usize,
    pub changes_without_payload: usize,
}

impl ParseStats {
    pub fn merge(&mut self, other: &ParseStats) {
        self.messages += other.messages;
        self.unknown_fields += other.unknown_fields;
        self.out_of_order_pt += other.out_of_order_pt;
        self.ladder_bound_violations += other.ladder_bound_violations;
        self.changes_without_payload += other.changes_without_payload;
    }
}

/// Parsed contents of one market file.
#[derive(Debug, Clone)]
pub struct ParsedMarketFile {
    pub event_id: String,
    pub market_id: String,
    pub messages: Vec<MessageEnvelope>,
    pub stats: ParseStats,
    pub warnings: Vec<String>,
    /// SHA-256 of the raw line content, hex-encoded.
    pub content_hash: String,
}

fn is_data_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| DATA_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

fn market_id_from(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("unknown")
        .to_string()
}

fn event_id_from(path: &Path) -> String {
    path.parent()
        .and_then(|p| p.file_name())
        .and_then(|s| s.to_str())
        .unwrap_or("unknown")
        .to_string()
}

fn walk_tree(root: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() {
            walk_tree(&path, out)?;
        } else if is_data_file(&path) {
            out.push(path);
        }
    }
    Ok(())
}

fn open_tar_bz2(path: &Path) -> Result<Vec<MarketStream>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut archive = tar::Archive::new(MultiBzDecoder::new(file));
    let mut streams = Vec::new();
    let entries = archive.entries().map_err(|e| Error::io(path, e))?;
    for entry in entries {
        let mut entry = entry.map_err(|e| Error::CorruptStream {
            file: path.display().to_string(),
            offset: 0,
            reason: e.to_string(),
        })?;
        if !entry.header().entry_type().is_file() {
            continue;
        }
        let entry_path = entry.path().map_err(|e| Error::io(path, e))?.into_owned();
        if !is_data_file(&entry_path) {
            continue;
        }
        let mut bytes = Vec::new();
        entry.read_to_end(&mut bytes).map_err(|e| Error::CorruptStream {
            file: format!("{}:{}", path.display(), entry_path.display()),
            offset: 0,
            reason: e.to_string(),
        })?;
        let bz2 = entry_path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("bz2"));
        streams.push(MarketStream {
            event_id: event_id_from(&entry_path),
            market_id: market_id_from(&entry_path),
            source: StreamSource::Buffer {
                name: format!("{}:{}", path.display(), entry_path.display()),
                bytes,
                bz2,
            },
        });
    }
    Ok(streams)
}

/// Open an input path as a set of per-market line streams.
///
/// Accepts a directory tree, a `.tar.bz2` container, a bare `.bz2` market
/// file, or an uncompressed NDJSON file. An empty directory yields an
/// empty vector, not an error. Streams are ordered by (event, market) so
/// downstream output is deterministic.
pub fn open_archive(path: &Path) -> Result<Vec<MarketStream>> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such path"),
        ));
    }
    let mut streams = if path.is_dir() {
        let mut files = Vec::new();
        walk_tree(path, &mut files)?;
        files
            .into_iter()
            .map(|p| {
                let bz2 = p
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("bz2"));
                MarketStream {
                    event_id: event_id_from(&p),
                    market_id: market_id_from(&p),
                    source: StreamSource::File { path: p, bz2 },
                }
            })
            .collect()
    } else {
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
        if name.ends_with(".tar.bz2") {
            open_tar_bz2(path)?
        } else {
            let bz2 = name.ends_with(".bz2");
            vec![MarketStream {
                event_id: event_id_from(path),
                market_id: market_id_from(path),
                source: StreamSource::File {
                    path: path.to_path_buf(),
                    bz2,
                },
            }]
        }
    };
    streams.sort_by(|a, b| {
        (a.event_id.as_str(), a.market_id.as_str()).cmp(&(b.event_id.as_str(), b.market_id.as_str()))
    });
    Ok(streams)
}
