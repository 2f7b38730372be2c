use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use super::{clear_mot, identity_metrics, FrameMatching, IOU_MATCH};
use crate::error::{Error, Result};
use crate::mot_io::{parse_mot_table, DetectionRow};

/// Coverage classes of ground-truth trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    /// Fraction of trajectories matched in at least 80% of their frames.
    pub mt: f64,
    /// Fraction matched in less than 20% of their frames.
    pub ml: f64,
    pub mostly_tracked: usize,
    pub mostly_lost: usize,
    pub trajectories: usize,
}

/// Mostly-tracked and mostly-lost fractions.
pub fn trajectory_stats(matching: &FrameMatching, gt: &[DetectionRow]) -> TrajectoryStats {
    let mut length: BTreeMap<i64, usize> = BTreeMap::new();
    for r in gt {
        *length.entry(r.id).or_default() += 1;
    }
    let mut matched: BTreeMap<i64, usize> = BTreeMap::new();
    for pair in matching.frames.values().flatten() {
        *matched.entry(pair.gt_id).or_default() += 1;
    }
    let (mut mt, mut ml) = (0, 0);
    for (id, &len) in &length {
        let m = matched.get(id).copied().unwrap_or(0);
        // integer forms of m/len >= 0.8 and m/len < 0.2
        if 5 * m >= 4 * len {
            mt += 1;
        } else if 5 * m < len {
            ml += 1;
        }
    }
    let n = length.len();
    let frac = |c: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
    TrajectoryStats {
        mt: frac(mt),
        ml: frac(ml),
        mostly_tracked: mt,
        mostly_lost: ml,
        trajectories: n,
    }
}

/// Evaluation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub iou_match: f64,
    /// Ground-truth rows below this visibility are ignored; rows of unknown
    /// visibility are always kept.
    pub min_visibility: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            iou_match: IOU_MATCH,
            min_visibility: None,
        }
    }
}

/// All metrics for one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mota: f64,
    pub motp: f64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub mt: f64,
    pub ml: f64,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub id_switches: usize,
    pub fragmentations: usize,
    pub gt_count: usize,
    pub hyp_count: usize,
    pub trajectories: usize,
}

impl MetricsReport {
    /// Single-line `key=value` form.
    pub fn key_values(&self) -> String {
        format!(
            "mota={:.4} motp={:.4} idf1={:.4} idp={:.4} idr={:.4} mt={:.4} ml={:.4} fp={} fn={} idsw={} frag={} gt={} hyp={}",
            self.mota,
            self.motp,
            self.idf1,
            self.idp,
            self.idr,
            self.mt,
            self.ml,
            self.false_positives,
            self.false_negatives,
            self.id_switches,
            self.fragmentations,
            self.gt_count,
            self.hyp_count,
        )
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |v: f64| format!("{:.1}", 100.0 * v);
        let cols = [
            ("MOTA", pct(self.mota)),
            ("MOTP", pct(self.motp)),
            ("IDF1", pct(self.idf1)),
            ("IDP", pct(self.idp)),
            ("IDR", pct(self.idr)),
            ("MT", pct(self.mt)),
            ("ML", pct(self.ml)),
            ("FP", self.false_positives.to_string()),
            ("FN", self.false_negatives.to_string()),
            ("IDSW", self.id_switches.to_string()),
            ("Frag", self.fragmentations.to_string()),
        ];
        let widths: Vec<usize> = cols.iter().map(|(k, v)| k.len().max(v.len())).collect();
        let line = |pick: fn(&(&str, String)) -> String| -> String {
            cols.iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{:>w$}", pick(c)))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(f, "{}", line(|c| c.0.to_string()))?;
        write!(f, "{}", line(|c| c.1.clone()))
    }
}

/// Metrics from parsed tables.
pub fn evaluate_rows(gt: &[DetectionRow], hyp: &[DetectionRow], opts: &EvalOptions) -> Result<MetricsReport> {
    let gt: Vec<DetectionRow> = match opts.min_visibility {
        Some(v) => gt.iter().filter(|r| r.visibility < 0.0 || r.visibility >= v).copied().collect(),
        None => gt.to_vec(),
    };
    let clear = clear_mot(&gt, hyp, opts.iou_match)?;
    let ids = identity_metrics(&gt, hyp, opts.iou_match)?;
    let traj = trajectory_stats(&clear.matching, &gt);
    Ok(MetricsReport {
        mota: clear.mota,
        motp: clear.motp,
        idf1: ids.idf1,
        idp: ids.idp,
        idr: ids.idr,
        mt: traj.mt,
        ml: traj.ml,
        false_positives: clear.false_positives,
        false_negatives: clear.false_negatives,
        id_switches: clear.id_switches,
        fragmentations: clear.fragmentations,
        gt_count: clear.gt_count,
        hyp_count: clear.hyp_count,
        trajectories: traj.trajectories,
    })
}

fn load(path: &Path) -> Result<Vec<DetectionRow>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let table = parse_mot_table(BufReader::new(file))?;
    let mut seen = HashSet::new();
    for r in &table.rows {
        if r.id >= 0 && !seen.insert((r.frame, r.id)) {
            return Err(Error::Config(format!(
                "{}: id {} appears twice in frame {}",
                path.display(),
                r.id,
                r.frame
            )));
        }
    }
    Ok(table.rows)
}

/// Metrics from a ground-truth file and a result file.
pub fn evaluate(gt: impl AsRef<Path>, result: impl AsRef<Path>, opts: &EvalOptions) -> Result<MetricsReport> {
    let gt = load(gt.as_ref())?;
    let hyp = load(result.as_ref())?;
    evaluate_rows(&gt, &hyp, opts)
}
