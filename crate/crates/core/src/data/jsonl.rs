//! Line-delimited JSON persistence for datasets.
//!
//! One segment per line:
//! `{"segment_id", "agent_id", "dt", "history": [[x,y],...], "future": [[x,y],...], "neighbors": [...]}`.
//! Floats are written in shortest round-trip form so that reading back a
//! written file reproduces the dataset bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Dataset, Segment};
use crate::error::{Error, Result};

pub fn write_jsonl(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_jsonl_to(ds, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_jsonl_to<W: Write>(ds: &Dataset, mut w: W) -> std::io::Result<()> {
    for s in &ds.segments {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl_from(BufReader::new(file), path)
}

/// Reads segments from any buffered reader; `path` is used for error messages.
pub fn read_jsonl_from<R: BufRead>(reader: R, path: &Path) -> Result<Dataset> {
    let mut segments = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let seg: Segment = serde_json::from_str(&line).map_err(|e| {
            let message = e.to_string();
            if e.is_data() {
                Error::Schema {
                    path: path.to_path_buf(),
                    line: line_no,
                    message,
                }
            } else {
                Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message,
                }
            }
        })?;
        validate(&seg).map_err(|message| Error::Schema {
            path: path.to_path_buf(),
            line: line_no,
            message,
        })?;
        segments.push(seg);
    }
    Ok(Dataset::new(segments, path.display().to_string()))
}

fn validate(s: &Segment) -> std::result::Result<(), String> {
    if !(s.dt > 0.0 && s.dt.is_finite()) {
        return Err(format!("dt must be positive, got {}", s.dt));
    }
    if s.history.is_empty() {
        return Err("history must not be empty".into());
    }
    let finite = s
        .points()
        .chain(s.neighbors.iter().flat_map(|n| n.history.iter().copied()))
        .all(|p| p.is_finite());
    if !finite {
        return Err("coordinates must be finite".into());
    }
    Ok(())
}
