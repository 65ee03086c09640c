//! Line-delimited JSON reading and writing.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Record { path: PathBuf, line: usize, source: serde_json::Error },
}

/// Iterates the non-blank lines of a JSONL file as `(line number, value)`.
pub struct JsonlReader<T> {
    path: PathBuf,
    lines: io::Lines<BufReader<File>>,
    line: usize,
    _t: std::marker::PhantomData<T>,
}

impl<T: DeserializeOwned> JsonlReader<T> {
    pub fn open(path: &Path) -> Result<Self, JsonlError> {
        let f = File::open(path).map_err(|source| JsonlError::Io { path: path.into(), source })?;
        Ok(Self { path: path.into(), lines: BufReader::new(f).lines(), line: 0, _t: std::marker::PhantomData })
    }
}

impl<T: DeserializeOwned> Iterator for JsonlReader<T> {
    type Item = Result<(usize, T), JsonlError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line += 1;
            let line = match line {
                Ok(l) => l,
                Err(source) => return Some(Err(JsonlError::Io { path: self.path.clone(), source })),
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(
                serde_json::from_str(&line)
                    .map(|v| (self.line, v))
                    .map_err(|source| JsonlError::Record { path: self.path.clone(), line: self.line, source }),
            );
        }
    }
}

pub fn read_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    JsonlReader::open(path)?.map(|r| r.map(|(_, v)| v)).collect()
}

pub struct JsonlWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self, JsonlError> {
        let f = File::create(path).map_err(|source| JsonlError::Io { path: path.into(), source })?;
        Ok(Self { path: path.into(), out: BufWriter::new(f) })
    }

    pub fn write<T: Serialize>(&mut self, v: &T) -> Result<(), JsonlError> {
        let io_err = |source| JsonlError::Io { path: self.path.clone(), source };
        serde_json::to_writer(&mut self.out, v).map_err(|e| io_err(io::Error::other(e)))?;
        self.out.write_all(b"\n").map_err(io_err)
    }

    pub fn finish(mut self) -> Result<(), JsonlError> {
        self.out.flush().map_err(|source| JsonlError::Io { path: self.path.clone(), source })
    }
}

/// Writes a pretty JSON document followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), JsonlError> {
    let mut buf = serde_json::to_vec_pretty(v).map_err(|e| JsonlError::Io { path: path.into(), source: io::Error::other(e) })?;
    buf.push(b'\n');
    std::fs::write(path, buf).map_err(|source| JsonlError::Io { path: path.into(), source })
}
