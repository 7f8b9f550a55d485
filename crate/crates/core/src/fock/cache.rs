//! Content-addressed operator cache: an in-memory map shared by sweep
//! workers, optionally backed by binary files in a directory.
//!
//! File layout (all integers little-endian):
//!
//! | offset | size | field                                             |
//! |-------:|-----:|---------------------------------------------------|
//! | 0      | 8    | magic `b"PPHSOPS\0"`                              |
//! | 8      | 4    | format version (`u32`, currently 1)               |
//! | 12     | 1    | precision: 8 = complex64, 16 = complex128         |
//! | 13     | 3    | zero padding                                      |
//! | 16     | 8    | rows (`u64`)                                      |
//! | 24     | 8    | cols (`u64`)                                      |
//! | 32     | 32   | SHA-256 digest of the canonical key               |
//! | 64     | 4    | key length `k` (`u32`)                            |
//! | 68     | k    | canonical key text (UTF-8)                        |
//! | 68+k   | …    | row-major payload, `re, im` per entry             |
//!
//! The file name is the lowercase hex digest plus `.ppop`.  Inserts write a
//! temporary file in the same directory and rename it into place, so readers
//! never observe a partial file.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use sha2::{Digest, Sha256};

use super::{FockOperator, C64};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PPHSOPS\0";
pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "ppop";
const FIXED_HEADER: usize = 68;

/// Payload precision on disk.  In memory everything is complex128.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    Complex64,
    #[default]
    Complex128,
}

impl Precision {
    fn tag(self) -> u8 {
        match self {
            Precision::Complex64 => 8,
            Precision::Complex128 => 16,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            8 => Ok(Precision::Complex64),
            16 => Ok(Precision::Complex128),
            t => Err(Error::CacheFormat(format!("unknown precision tag {t}"))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Complex64 => 64,
            Precision::Complex128 => 128,
        }
    }

    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            64 => Ok(Precision::Complex64),
            128 => Ok(Precision::Complex128),
            b => Err(Error::InvalidArgument(format!("precision must be 64 or 128, got {b}"))),
        }
    }
}

/// Identifies a cached operator: its kind, the real parameters it was built
/// from, and its shape.  Parameters are rendered with round-trip precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheKey {
    pub kind: String,
    pub params: Vec<(String, f64)>,
    pub rows: usize,
    pub cols: usize,
}

impl CacheKey {
    pub fn new(kind: &str, params: &[(&str, f64)], rows: usize, cols: usize) -> Self {
        Self {
            kind: kind.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            rows,
            cols,
        }
    }

    /// Canonical text: `kind;name=value;…;rows x cols`.
    pub fn canonical(&self) -> String {
        let mut s = self.kind.clone();
        for (k, v) in &self.params {
            s.push_str(&format!(";{k}={v:?}"));
        }
        s.push_str(&format!(";{}x{}", self.rows, self.cols));
        s
    }

    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.canonical().as_bytes()).into()
    }

    pub fn file_name(&self) -> String {
        format!("{}.{FILE_EXTENSION}", hex::encode(self.digest()))
    }
}

/// Summary of one cache file, as reported by [`OperatorCache::list`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct CacheEntry {
    pub file: String,
    pub key: String,
    pub rows: usize,
    pub cols: usize,
    pub precision_bits: u32,
    pub bytes: u64,
}

/// Shared cache.  Lookups take a read lock; inserts take the write lock and
/// file writes are serialised by a separate mutex.
#[derive(Debug, Default)]
pub struct OperatorCache {
    dir: Option<PathBuf>,
    precision: Precision,
    memory: RwLock<HashMap<String, Arc<FockOperator>>>,
    writer: Mutex<()>,
}

impl OperatorCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Cache backed by `dir`, created if missing.
    pub fn on_disk(dir: impl Into<PathBuf>, precision: Precision) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: Some(dir),
            precision,
            ..Self::default()
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Looks up memory first, then disk (promoting hits into memory).
    pub fn get(&self, key: &CacheKey) -> Result<Option<Arc<FockOperator>>> {
        let canon = key.canonical();
        if let Some(hit) = self.memory.read().get(&canon) {
            return Ok(Some(hit.clone()));
        }
        let Some(dir) = &self.dir else { return Ok(None) };
        let path = dir.join(key.file_name());
        if !path.exists() {
            return Ok(None);
        }
        let (stored_key, op) = read_file(&path)?;
        if stored_key != canon || op.dim() != (key.rows, key.cols) {
            return Err(Error::CacheFormat(format!(
                "{} holds '{stored_key}', expected '{canon}'",
                path.display()
            )));
        }
        let op = Arc::new(op);
        self.memory.write().entry(canon).or_insert_with(|| op.clone());
        Ok(Some(op))
    }

    /// Stores `op` under `key` in memory and (if configured) on disk.
    pub fn insert(&self, key: &CacheKey, op: FockOperator) -> Result<Arc<FockOperator>> {
        if op.dim() != (key.rows, key.cols) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {:?}, key says {}x{}",
                op.dim(),
                key.rows,
                key.cols
            )));
        }
        let canon = key.canonical();
        if let Some(dir) = &self.dir {
            let _guard = self.writer.lock();
            write_file(&dir.join(key.file_name()), &canon, &key.digest(), &op, self.precision)?;
        }
        let op = Arc::new(op);
        Ok(self.memory.write().entry(canon).or_insert(op).clone())
    }

    /// Returns the cached operator or builds, stores and returns it.
    pub fn get_or_insert_with(
        &self,
        key: &CacheKey,
        build: impl FnOnce() -> Result<FockOperator>,
    ) -> Result<Arc<FockOperator>> {
        if let Some(hit) = self.get(key)? {
            return Ok(hit);
        }
        self.insert(key, build()?)
    }

    /// Number of operators held in memory.
    pub fn memory_len(&self) -> usize {
        self.memory.read().len()
    }

    /// Headers of every cache file in the directory, sorted by file name.
    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        let Some(dir) = &self.dir else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for path in cache_files(dir)? {
            let mut f = fs::File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let header = read_header(&mut f, &path)?;
            let bytes = f.metadata().map(|m| m.len()).unwrap_or(0);
            out.push(CacheEntry {
                file: path.file_name().unwrap().to_string_lossy().into_owned(),
                key: header.key,
                rows: header.rows,
                cols: header.cols,
                precision_bits: header.precision.bits(),
                bytes,
            });
        }
        Ok(out)
    }

    /// Deletes every cache file and clears memory; returns the file count.
    pub fn purge(&self) -> Result<usize> {
        let _guard = self.writer.lock();
        self.memory.write().clear();
        let Some(dir) = &self.dir else { return Ok(0) };
        let files = cache_files(dir)?;
        for path in &files {
            fs::remove_file(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(files.len())
    }
}

fn cache_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == FILE_EXTENSION))
        .collect();
    files.sort();
    Ok(files)
}

struct Header {
    precision: Precision,
    rows: usize,
    cols: usize,
    key: String,
}

fn read_header(f: &mut impl Read, path: &Path) -> Result<Header> {
    let bad = |what: &str| Error::CacheFormat(format!("{}: {what}", path.display()));
    let mut fixed = [0u8; FIXED_HEADER];
    f.read_exact(&mut fixed).map_err(|_| bad("truncated header"))?;
    if &fixed[0..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(fixed[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let precision = Precision::from_tag(fixed[12])?;
    let rows = u64::from_le_bytes(fixed[16..24].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(fixed[24..32].try_into().unwrap()) as usize;
    let digest: [u8; 32] = fixed[32..64].try_into().unwrap();
    let klen = u32::from_le_bytes(fixed[64..68].try_into().unwrap()) as usize;
    let mut kb = vec![0u8; klen];
    f.read_exact(&mut kb).map_err(|_| bad("truncated key"))?;
    let key = String::from_utf8(kb).map_err(|_| bad("key is not UTF-8"))?;
    if <[u8; 32]>::from(Sha256::digest(key.as_bytes())) != digest {
        return Err(bad("digest does not match key"));
    }
    Ok(Header {
        precision,
        rows,
        cols,
        key,
    })
}

/// Reads a cache file, returning its canonical key and operator.
pub fn read_file(path: &Path) -> Result<(String, FockOperator)> {
    let mut f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let h = read_header(&mut f, path)?;
    let mut payload = Vec::new();
    f.read_to_end(&mut payload)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let n = h.rows * h.cols;
    let width = h.precision.tag() as usize;
    if payload.len() != n * width {
        return Err(Error::CacheFormat(format!(
            "{}: payload is {} bytes, expected {}",
            path.display(),
            payload.len(),
            n * width
        )));
    }
    let data: Vec<C64> = payload
        .chunks_exact(width)
        .map(|c| match h.precision {
            Precision::Complex128 => C64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            ),
            Precision::Complex64 => C64::new(
                f32::from_le_bytes(c[0..4].try_into().unwrap()) as f64,
                f32::from_le_bytes(c[4..8].try_into().unwrap()) as f64,
            ),
        })
        .collect();
    let op = FockOperator::from_shape_vec((h.rows, h.cols), data)
        .map_err(|e| Error::CacheFormat(format!("{}: {e}", path.display())))?;
    Ok((h.key, op))
}

fn write_file(path: &Path, key: &str, digest: &[u8; 32], op: &FockOperator, precision: Precision) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let (rows, cols) = op.dim();
    let mut buf = Vec::with_capacity(FIXED_HEADER + key.len() + rows * cols * precision.tag() as usize);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&[precision.tag(), 0, 0, 0]);
    buf.extend_from_slice(&(rows as u64).to_le_bytes());
    buf.extend_from_slice(&(cols as u64).to_le_bytes());
    buf.extend_from_slice(digest);
    buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
    buf.extend_from_slice(key.as_bytes());
    for z in op.iter() {
        match precision {
            Precision::Complex128 => {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            Precision::Complex64 => {
                buf.extend_from_slice(&(z.re as f32).to_le_bytes());
                buf.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
        }
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&buf).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
