//! Dense flow fields in the Middlebury `.flo` container.
//!
//! Layout, little-endian: magic `f32` 202021.25, `i32` width, `i32` height,
//! then `width * height` interleaved `(u, v)` `f32` pairs, row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const FLOW_MAGIC: f32 = 202021.25;
const HEADER_LEN: usize = 12;

/// Per-pixel displacement grid from one frame to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: u32,
    height: u32,
    data: Vec<[f32; 2]>,
}

impl FlowField {
    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        Self::from_data(width, height, vec![[0.0, 0.0]; width as usize * height as usize])
    }

    pub fn constant(width: u32, height: u32, u: f32, v: f32) -> Result<Self> {
        Self::from_data(width, height, vec![[u, v]; width as usize * height as usize])
    }

    pub fn from_data(width: u32, height: u32, data: Vec<[f32; 2]>) -> Result<Self> {
        if width == 0 || height == 0 || width > i32::MAX as u32 || height > i32::MAX as u32 {
            return Err(Error::domain(format!("invalid flow dimensions {width}x{height}")));
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::domain(format!(
                "flow of {width}x{height} needs {expected} vectors, got {}",
                data.len()
            )));
        }
        if data.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("flow components must be finite"));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[[f32; 2]] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> [f32; 2] {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [[f32; 2]] {
        &mut self.data
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < i64::from(self.width) && y < i64::from(self.height)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 8);
        out.extend_from_slice(&FLOW_MAGIC.to_le_bytes());
        out.extend_from_slice(&(self.width as i32).to_le_bytes());
        out.extend_from_slice(&(self.height as i32).to_le_bytes());
        for [u, v] in &self.data {
            out.extend_from_slice(&u.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Length {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let word = |i: usize| -> [u8; 4] { bytes[i..i + 4].try_into().unwrap() };
        let magic = f32::from_le_bytes(word(0));
        if magic != FLOW_MAGIC {
            return Err(Error::format(format!("bad flow magic {magic}, expected {FLOW_MAGIC}")));
        }
        let width = i32::from_le_bytes(word(4));
        let height = i32::from_le_bytes(word(8));
        if width <= 0 || height <= 0 {
            return Err(Error::format(format!("invalid flow dimensions {width}x{height}")));
        }
        let expected = HEADER_LEN + width as usize * height as usize * 8;
        if bytes.len() != expected {
            return Err(Error::Length {
                expected,
                found: bytes.len(),
            });
        }
        let data = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| {
                [
                    f32::from_le_bytes(c[0..4].try_into().unwrap()),
                    f32::from_le_bytes(c[4..8].try_into().unwrap()),
                ]
            })
            .collect();
        Self::from_data(width as u32, height as u32, data).map_err(|e| Error::format(e.to_string()))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

pub fn write_flow(path: impl AsRef<Path>, flow: &FlowField) -> Result<()> {
    fs::write(path, flow.to_bytes())?;
    Ok(())
}

pub fn read_flow(path: impl AsRef<Path>) -> Result<FlowField> {
    FlowField::from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_pixel_file_is_twenty_bytes() {
        let f = FlowField::zeros(1, 1).unwrap();
        assert_eq!(f.to_bytes().len(), 20);
    }

    #[test]
    fn header_layout() {
        let f = FlowField::constant(3, 2, 1.5, -2.0).unwrap();
        let b = f.to_bytes();
        assert_eq!(&b[0..4], &[0x50, 0x49, 0x45, 0x48]); // "PIEH"
        assert_eq!(i32::from_le_bytes(b[4..8].try_into().unwrap()), 3);
        assert_eq!(i32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        assert_eq!(f32::from_le_bytes(b[12..16].try_into().unwrap()), 1.5);
        assert_eq!(f32::from_le_bytes(b[16..20].try_into().unwrap()), -2.0);
    }

    #[test]
    fn wrong_magic() {
        let mut b = FlowField::zeros(2, 2).unwrap().to_bytes();
        b[0..4].copy_from_slice(&0.0f32.to_le_bytes());
        assert!(matches!(FlowField::from_bytes(&b), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload() {
        let b = FlowField::zeros(2, 2).unwrap().to_bytes();
        assert!(matches!(
            FlowField::from_bytes(&b[..b.len() - 3]),
            Err(Error::Length { expected: 44, found: 41 })
        ));
        assert!(matches!(FlowField::from_bytes(&b[..5]), Err(Error::Length { .. })));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(FlowField::from_data(1, 1, vec![[f32::NAN, 0.0]]).is_err());
    }
}
