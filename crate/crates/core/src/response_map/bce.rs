use super::ResponseMap;
use crate::error::{Error, Result};

/// Probability clamp applied before taking logarithms.
pub const BCE_EPS: f64 = 1e-7;

/// Pixel-mean binary cross entropy of `pred` against `label`, natural log.
pub fn bce_score(pred: &ResponseMap, label: &ResponseMap) -> Result<f64> {
    if pred.width() != label.width() || pred.height() != label.height() {
        return Err(Error::domain(format!(
            "map sizes differ: {}x{} vs {}x{}",
            pred.width(),
            pred.height(),
            label.width(),
            label.height()
        )));
    }
    let total: f64 = pred
        .values()
        .iter()
        .zip(label.values())
        .map(|(&p, &y)| {
            let p = f64::from(p).clamp(BCE_EPS, 1.0 - BCE_EPS);
            let y = f64::from(y);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / pred.values().len() as f64)
}
