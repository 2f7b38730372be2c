use crate::error::{Error, Result};

/// Single-channel grid of values in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    width: u32,
    height: u32,
    values: Vec<f32>,
}

impl ResponseMap {
    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            values: vec![0.0; width as usize * height as usize],
        })
    }

    /// Wraps row-major values after checking length and range.
    pub fn from_values(width: u32, height: u32, values: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(Error::domain(format!(
                "map of {width}x{height} needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::domain(format!(
                "map value {} at index {pos} is outside [0,1]",
                values[pos]
            )));
        }
        Ok(Self { width, height, values })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    pub(crate) fn row(&self, y: usize) -> &[f32] {
        let w = self.width as usize;
        &self.values[y * w..(y + 1) * w]
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::domain(format!(
            "map dimensions must be at least 1, got {width}x{height}"
        )));
    }
    Ok(())
}
