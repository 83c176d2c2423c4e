//! NGSIM-format CSV ingestion and window extraction.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;

use super::{Dataset, Protocol, Segment};
use crate::error::{Error, Result};
use crate::gaussian::Vec2;

/// Exact international foot.
pub const FEET_TO_METERS: f64 = 0.3048;
/// NGSIM sampling interval (10 Hz).
pub const NGSIM_DT: f64 = 0.1;

const REQUIRED: [&str; 4] = ["Vehicle_ID", "Frame_ID", "Local_X", "Local_Y"];

/// A contiguous, uniformly sampled trajectory of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub vehicle_id: u64,
    /// Frame id of the first point, in the original 10 Hz numbering.
    pub start_frame: u64,
    pub dt: f64,
    pub points: Vec<Vec2>,
}

pub fn parse_ngsim_csv(path: impl AsRef<Path>) -> Result<Vec<Track>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ngsim_reader(file, path)
}

/// Parses NGSIM rows into per-vehicle tracks in meters.
///
/// Rows are grouped by `Vehicle_ID` and sorted by `Frame_ID`. A track is cut
/// wherever consecutive frames differ by more than one. Repeated frames for a
/// vehicle keep the first row seen.
pub fn parse_ngsim_reader<R: Read>(reader: R, path: &Path) -> Result<Vec<Track>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let mut idx = [0usize; 4];
    let mut missing = Vec::new();
    for (slot, name) in idx.iter_mut().zip(REQUIRED) {
        match headers.iter().position(|h| h == name) {
            Some(i) => *slot = i,
            None => missing.push(name.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }

    let mut by_vehicle: BTreeMap<u64, BTreeMap<u64, Vec2>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize, name: &str| {
            record
                .get(i)
                .ok_or_else(|| parse_err(path, line, format!("missing value for {name}")))
        };
        let vehicle = parse_id(field(idx[0], REQUIRED[0])?)
            .ok_or_else(|| parse_err(path, line, "invalid Vehicle_ID".into()))?;
        let frame = parse_id(field(idx[1], REQUIRED[1])?)
            .ok_or_else(|| parse_err(path, line, "invalid Frame_ID".into()))?;
        let x = parse_coord(field(idx[2], REQUIRED[2])?)
            .ok_or_else(|| parse_err(path, line, "invalid Local_X".into()))?;
        let y = parse_coord(field(idx[3], REQUIRED[3])?)
            .ok_or_else(|| parse_err(path, line, "invalid Local_Y".into()))?;
        by_vehicle
            .entry(vehicle)
            .or_default()
            .entry(frame)
            .or_insert(Vec2::new(x * FEET_TO_METERS, y * FEET_TO_METERS));
    }

    let mut tracks = Vec::new();
    for (vehicle_id, frames) in by_vehicle {
        let mut current: Option<Track> = None;
        let mut prev_frame = 0u64;
        for (frame, p) in frames {
            match current.as_mut() {
                Some(t) if frame == prev_frame + 1 => t.points.push(p),
                _ => {
                    tracks.extend(current.take());
                    current = Some(Track {
                        vehicle_id,
                        start_frame: frame,
                        dt: NGSIM_DT,
                        points: vec![p],
                    });
                }
            }
            prev_frame = frame;
        }
        tracks.extend(current);
    }
    Ok(tracks)
}

fn parse_err(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn parse_id(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    // Some exports write integer columns as floats ("12.0").
    let f: f64 = s.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64).then_some(f as u64)
}

fn parse_coord(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Keeps every `factor`-th sample starting at index 0.
pub fn downsample(track: &Track, factor: usize) -> Track {
    let factor = factor.max(1);
    Track {
        vehicle_id: track.vehicle_id,
        start_frame: track.start_frame,
        dt: track.dt * factor as f64,
        points: track.points.iter().step_by(factor).copied().collect(),
    }
}

/// Cuts sliding windows of `tau + 1 + horizon` points from every track,
/// advancing by `stride` points (a stride of 0 is treated as 1).
pub fn extract_segments(tracks: &[Track], tau: usize, horizon: usize, stride: usize) -> Dataset {
    let stride = stride.max(1);
    let protocol = Protocol {
        dt: tracks.first().map_or(Protocol::DEFAULT.dt, |t| t.dt),
        tau,
        horizon,
    };
    let window = protocol.window_len();
    let per_track: Vec<Vec<Segment>> = tracks
        .par_iter()
        .map(|t| {
            if t.points.len() < window {
                return Vec::new();
            }
            (0..=t.points.len() - window)
                .step_by(stride)
                .map(|start| Segment {
                    segment_id: format!("v{}-f{}-s{}", t.vehicle_id, t.start_frame, start),
                    agent_id: t.vehicle_id,
                    dt: t.dt,
                    history: t.points[start..start + tau + 1].to_vec(),
                    future: t.points[start + tau + 1..start + window].to_vec(),
                    neighbors: Vec::new(),
                })
                .collect()
        })
        .collect();
    Dataset::new(per_track.into_iter().flatten().collect(), "ngsim")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<Vec<Track>> {
        parse_ngsim_reader(Cursor::new(text), Path::new("t.csv"))
    }

    fn line_track(n: usize) -> Track {
        Track {
            vehicle_id: 1,
            start_frame: 0,
            dt: 0.2,
            points: (0..n).map(|i| Vec2::new(i as f64, 0.0)).collect(),
        }
    }

    #[test]
    fn converts_feet_exactly() {
        let t = parse("Vehicle_ID,Frame_ID,Local_X,Local_Y\n1,1,100.0,10\n").unwrap();
        assert_eq!(t[0].points[0], Vec2::new(100.0 * 0.3048, 10.0 * 0.3048));
        assert_eq!(t[0].points[0].x, 30.48);
    }

    #[test]
    fn groups_interleaved_vehicles_and_sorts_frames() {
        let csv = "Vehicle_ID,Frame_ID,Local_X,Local_Y\n\
                   2,11,0,1\n1,5,0,2\n2,10,0,0\n1,4,0,1\n1,3,0,0\n";
        let t = parse(csv).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].vehicle_id, 1);
        assert_eq!(t[0].points.len(), 3);
        assert_eq!(t[0].start_frame, 3);
        assert!(t[0].points.windows(2).all(|w| w[1].y > w[0].y));
        assert_eq!(t[1].vehicle_id, 2);
        assert_eq!(t[1].points.len(), 2);
    }

    #[test]
    fn splits_at_frame_gaps() {
        let csv = "Vehicle_ID,Frame_ID,Local_X,Local_Y\n\
                   7,1,0,0\n7,2,0,0\n7,3,0,0\n7,10,0,0\n7,11,0,0\n";
        let lens: Vec<usize> = parse(csv).unwrap().iter().map(|t| t.points.len()).collect();
        assert_eq!(lens, vec![3, 2]);
    }

    #[test]
    fn extra_columns_ignored_and_missing_named() {
        let csv = "Global_Time,Vehicle_ID,v_Vel,Frame_ID,Local_X,Local_Y\n0,3,12.5,1,1,2\n";
        assert_eq!(parse(csv).unwrap().len(), 1);
        match parse("Vehicle_ID,Frame_ID,Local_X\n1,1,1\n") {
            Err(Error::MissingColumns(cols)) => assert_eq!(cols, vec!["Local_Y".to_string()]),
            other => panic!("expected missing column, got {other:?}"),
        }
    }

    #[test]
    fn bad_value_reports_line() {
        match parse("Vehicle_ID,Frame_ID,Local_X,Local_Y\n1,1,0,0\n1,2,abc,0\n") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("Local_X"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn downsample_examples() {
        let t = line_track(41);
        let d = downsample(&t, 2);
        assert_eq!(d.points.len(), 21);
        assert!((d.dt - 0.4).abs() < 1e-15);
        assert!(d.points.iter().enumerate().all(|(i, p)| p.x == (2 * i) as f64));
        assert_eq!(downsample(&t, 1), t);
    }

    #[test]
    fn extraction_counts() {
        assert_eq!(extract_segments(&[line_track(41)], 15, 25, 1).len(), 1);
        assert_eq!(extract_segments(&[line_track(45)], 15, 25, 1).len(), 5);
        assert_eq!(extract_segments(&[line_track(40)], 15, 25, 1).len(), 0);
        // starts 0, 10, 20 fit in 70 points (last start 29)
        assert_eq!(extract_segments(&[line_track(70)], 15, 25, 10).len(), 3);
    }

    #[test]
    fn extraction_shapes_and_order() {
        let ds = extract_segments(&[line_track(45), line_track(50)], 15, 25, 2);
        assert!(ds.segments.iter().all(|s| s.history.len() == 16 && s.future.len() == 25));
        let s = &ds.segments[1];
        assert_eq!(s.history[0].x, 2.0);
        assert_eq!(s.future[0].x, 18.0);
        assert_eq!(ds.len(), 3 + 5);
    }
}
