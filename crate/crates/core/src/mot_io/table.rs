use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// One row of a MOT-challenge detection, ground-truth or result table.
///
/// Columns: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`. For
/// ground truth the ninth column carries visibility; the eighth and tenth are
/// not retained and are written back as `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRow {
    pub frame: u32,
    pub id: i64,
    pub bb_left: f64,
    pub bb_top: f64,
    pub bb_width: f64,
    pub bb_height: f64,
    pub conf: f64,
    /// In `[0,1]`, or `-1` when unknown.
    pub visibility: f64,
}

impl DetectionRow {
    pub fn from_bbox(frame: u32, id: i64, bbox: &BBox, conf: f64) -> Self {
        Self {
            frame,
            id,
            bb_left: bbox.left(),
            bb_top: bbox.top(),
            bb_width: bbox.w,
            bb_height: bbox.h,
            conf,
            visibility: -1.0,
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_ltwh(self.bb_left, self.bb_top, self.bb_width, self.bb_height)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame < 1 {
            return Err(Error::domain("frame index must be >= 1"));
        }
        if !(self.bb_width > 0.0 && self.bb_height > 0.0) {
            return Err(Error::domain(format!(
                "box size must be positive, got {}x{}",
                self.bb_width, self.bb_height
            )));
        }
        let finite = [self.bb_left, self.bb_top, self.bb_width, self.bb_height, self.conf];
        if !finite.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("box fields and confidence must be finite"));
        }
        if !(self.visibility == -1.0 || (0.0..=1.0).contains(&self.visibility)) {
            return Err(Error::domain(format!(
                "visibility must be in [0,1] or -1, got {}",
                self.visibility
            )));
        }
        Ok(())
    }

    pub(crate) fn canonical_cmp(&self, other: &Self) -> Ordering {
        (self.frame, self.id)
            .cmp(&(other.frame, other.id))
            .then(self.bb_left.total_cmp(&other.bb_left))
            .then(self.bb_top.total_cmp(&other.bb_top))
            .then(self.bb_width.total_cmp(&other.bb_width))
            .then(self.bb_height.total_cmp(&other.bb_height))
            .then(self.conf.total_cmp(&other.conf))
            .then(self.visibility.total_cmp(&other.visibility))
    }
}

/// Parsed table: rows in canonical `(frame, id)` order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MotTable {
    pub rows: Vec<DetectionRow>,
    /// Rows dropped for a non-positive box size.
    pub rejected: usize,
}

impl MotTable {
    /// Rows grouped by frame, in frame order.
    pub fn by_frame(&self) -> BTreeMap<u32, Vec<DetectionRow>> {
        group_by_frame(&self.rows)
    }
}

pub fn group_by_frame(rows: &[DetectionRow]) -> BTreeMap<u32, Vec<DetectionRow>> {
    let mut out: BTreeMap<u32, Vec<DetectionRow>> = BTreeMap::new();
    for r in rows {
        out.entry(r.frame).or_default().push(*r);
    }
    out
}

/// Sorts rows into canonical order: frame, id, then the remaining fields.
pub fn sort_rows(rows: &mut [DetectionRow]) {
    rows.sort_by(DetectionRow::canonical_cmp);
}

/// Parses a comma-separated MOT table.
///
/// Blank lines are ignored. At least seven fields are required; missing
/// trailing fields default to `-1`.
pub fn parse_mot_table<R: BufRead>(reader: R) -> Result<MotTable> {
    let mut table = MotTable::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected at least 7 fields, found {}", fields.len()),
            });
        }
        let real = |i: usize| -> Result<f64> {
            match fields.get(i) {
                None => Ok(-1.0),
                Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("field {} is not a number: {s:?}", i + 1),
                }),
            }
        };
        let frame = parse_integer(fields[0], lineno, 1)?;
        if frame < 1 || frame > i64::from(u32::MAX) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("frame index must be >= 1, found {frame}"),
            });
        }
        let row = DetectionRow {
            frame: frame as u32,
            id: parse_integer(fields[1], lineno, 2)?,
            bb_left: real(2)?,
            bb_top: real(3)?,
            bb_width: real(4)?,
            bb_height: real(5)?,
            conf: real(6)?,
            visibility: real(8)?,
        };
        if !(row.bb_width > 0.0 && row.bb_height > 0.0) {
            table.rejected += 1;
            continue;
        }
        row.validate().map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        table.rows.push(row);
    }
    sort_rows(&mut table.rows);
    Ok(table)
}

fn parse_integer(s: &str, line: usize, col: usize) -> Result<i64> {
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    // some tools write integral columns as reals
    match s.parse::<f64>() {
        Ok(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => Ok(v as i64),
        _ => Err(Error::Parse {
            line,
            msg: format!("field {col} is not an integer: {s:?}"),
        }),
    }
}

/// Formats a real with at least one decimal place, shortest round-trip
/// digits otherwise.
pub(crate) fn format_real(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn format_visibility(v: f64) -> String {
    if v == -1.0 {
        "-1".to_string()
    } else {
        format_real(v)
    }
}

/// Renders rows as MOT text, one row per line. Every row is validated
/// before anything is produced.
pub fn format_mot_table(rows: &[DetectionRow]) -> Result<String> {
    for (i, r) in rows.iter().enumerate() {
        r.validate()
            .map_err(|e| Error::domain(format!("row {}: {e}", i + 1)))?;
    }
    let mut out = String::with_capacity(rows.len() * 48);
    for r in rows {
        format_row(&mut out, r);
    }
    Ok(out)
}

fn format_row(out: &mut String, r: &DetectionRow) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},-1,{},-1",
        r.frame,
        r.id,
        format_real(r.bb_left),
        format_real(r.bb_top),
        format_real(r.bb_width),
        format_real(r.bb_height),
        format_real(r.conf),
        format_visibility(r.visibility)
    );
}

/// Writes rows as MOT text.
pub fn write_mot_table<W: Write>(rows: &[DetectionRow], mut writer: W) -> Result<()> {
    writer.write_all(format_mot_table(rows)?.as_bytes())?;
    Ok(())
}
