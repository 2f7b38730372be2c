use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Sequence metadata from a MOT `seqinfo.ini`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceInfo {
    pub name: String,
    pub frame_rate: f64,
    pub seq_length: u32,
    pub im_width: u32,
    pub im_height: u32,
}

/// Parses INI-style `key=value` metadata. Section headers, comments and
/// unknown keys are ignored.
pub fn parse_seqinfo<R: BufRead>(reader: R) -> Result<SequenceInfo> {
    let mut name = None;
    let mut frame_rate = None;
    let mut seq_length = None;
    let mut im_width = None;
    let mut im_height = None;
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('[') || line.starts_with(';') || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => name = Some(value.to_string()),
            "frameRate" => frame_rate = Some(parse_value::<f64>(key, value)?),
            "seqLength" => seq_length = Some(parse_value::<u32>(key, value)?),
            "imWidth" => im_width = Some(parse_value::<u32>(key, value)?),
            "imHeight" => im_height = Some(parse_value::<u32>(key, value)?),
            _ => {}
        }
    }
    let info = SequenceInfo {
        name: required("name", name)?,
        frame_rate: required("frameRate", frame_rate)?,
        seq_length: required("seqLength", seq_length)?,
        im_width: required("imWidth", im_width)?,
        im_height: required("imHeight", im_height)?,
    };
    if info.seq_length < 1 {
        return Err(Error::config("seqLength must be >= 1"));
    }
    if info.im_width < 1 || info.im_height < 1 {
        return Err(Error::config("imWidth and imHeight must be >= 1"));
    }
    Ok(info)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value for {key}: {value:?}")))
}

fn required<T>(key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::config(format!("missing required key {key}")))
}

pub fn format_seqinfo(info: &SequenceInfo) -> String {
    let mut s = String::from("[Sequence]\n");
    let _ = writeln!(s, "name={}", info.name);
    let _ = writeln!(s, "frameRate={}", info.frame_rate);
    let _ = writeln!(s, "seqLength={}", info.seq_length);
    let _ = writeln!(s, "imWidth={}", info.im_width);
    let _ = writeln!(s, "imHeight={}", info.im_height);
    s
}
