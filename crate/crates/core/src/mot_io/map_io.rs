//! Exact binary storage for response maps, plus an 8-bit raster export.
//!
//! Layout, little-endian: tag `RMP1`, `u32` width, `u32` height, then
//! `width * height` `f32` values, row-major.

use std::fs;
use std::path::Path;

use image::GrayImage;

use crate::error::{Error, Result};
use crate::response_map::ResponseMap;

pub const MAP_TAG: &[u8; 4] = b"RMP1";
const HEADER_LEN: usize = 12;

pub fn map_to_bytes(map: &ResponseMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + map.values().len() * 4);
    out.extend_from_slice(MAP_TAG);
    out.extend_from_slice(&map.width().to_le_bytes());
    out.extend_from_slice(&map.height().to_le_bytes());
    for v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn map_from_bytes(bytes: &[u8]) -> Result<ResponseMap> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Length {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[0..4] != MAP_TAG {
        return Err(Error::format(format!("bad map tag {:?}", &bytes[0..4])));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let expected = HEADER_LEN + width as usize * height as usize * 4;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            found: bytes.len(),
        });
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ResponseMap::from_values(width, height, values).map_err(|e| Error::format(e.to_string()))
}

pub fn write_map(path: impl AsRef<Path>, map: &ResponseMap) -> Result<()> {
    fs::write(path, map_to_bytes(map))?;
    Ok(())
}

pub fn read_map(path: impl AsRef<Path>) -> Result<ResponseMap> {
    map_from_bytes(&fs::read(path)?)
}

/// Lossy 8-bit view: each sample is `round(z * 255)`.
pub fn map_to_raster(map: &ResponseMap) -> GrayImage {
    let pixels = map
        .values()
        .iter()
        .map(|&z| (f64::from(z) * 255.0).round() as u8)
        .collect();
    GrayImage::from_raw(map.width(), map.height(), pixels).expect("raster size matches map")
}
