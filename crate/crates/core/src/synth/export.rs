use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{LabelSet, SceneTruth};
use crate::error::{Error, Result};
use crate::mot_io::{
    format_seqinfo, parse_mot_table, parse_seqinfo, read_flow, read_map, write_flow, write_map, write_mot_table,
    DetectionRow, FlowField, SequenceInfo,
};
use crate::par::Execution;
use crate::response_map::ResponseMap;

/// File locations inside a corpus directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusLayout {
    root: PathBuf,
}

impl CorpusLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn seqinfo(&self) -> PathBuf {
        self.root.join("seqinfo.ini")
    }

    pub fn gt(&self) -> PathBuf {
        self.root.join("gt").join("gt.txt")
    }

    pub fn labels(&self) -> PathBuf {
        self.root.join("labels").join("labels.txt")
    }

    pub fn flow(&self, frame: u32) -> PathBuf {
        self.root.join("flow").join(format!("{frame:06}.flo"))
    }

    pub fn map(&self, frame: u32) -> PathBuf {
        self.root.join("maps").join(format!("{frame:06}.rmp"))
    }

    pub fn read_seqinfo(&self) -> Result<SequenceInfo> {
        let path = self.seqinfo();
        let file = File::open(&path).map_err(|e| io_context(e, &path))?;
        parse_seqinfo(BufReader::new(file))
    }

    pub fn read_gt(&self) -> Result<Vec<DetectionRow>> {
        read_table(&self.gt())
    }

    pub fn read_labels(&self) -> Result<Vec<DetectionRow>> {
        read_table(&self.labels())
    }

    /// Map and flow of one frame. A missing file is reported with its frame.
    pub fn read_frame(&self, frame: u32) -> Result<(ResponseMap, FlowField)> {
        let map_path = self.map(frame);
        let flow_path = self.flow(frame);
        for p in [&map_path, &flow_path] {
            if !p.is_file() {
                return Err(Error::MissingFrame { frame, path: p.display().to_string() });
            }
        }
        Ok((read_map(map_path)?, read_flow(flow_path)?))
    }
}

fn io_context(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read_table(path: &Path) -> Result<Vec<DetectionRow>> {
    let file = File::open(path).map_err(|e| io_context(e, path))?;
    Ok(parse_mot_table(BufReader::new(file))?.rows)
}

fn write_table(path: &Path, rows: &[DetectionRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mot_table(rows, &mut w)?;
    w.flush()?;
    Ok(())
}

/// What an export produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportSummary {
    pub objects: usize,
    pub frames: u32,
    pub files: usize,
}

/// Writes ground truth, labels, per-frame flow and label maps, and
/// sequence metadata under `root`. Frames are written by `exec`.
pub fn export_scene(truth: &SceneTruth, labels: &LabelSet, root: &Path, exec: Execution) -> Result<ExportSummary> {
    let layout = CorpusLayout::new(root);
    for dir in ["gt", "labels", "flow", "maps"] {
        fs::create_dir_all(root.join(dir))?;
    }
    fs::write(layout.seqinfo(), format_seqinfo(&truth.sequence_info()))?;
    write_table(&layout.gt(), truth.gt_rows())?;
    write_table(&layout.labels(), &labels.rows())?;
    let frames = truth.frames();
    exec.try_map_range(frames as usize, |i| {
        let f = i as u32 + 1;
        write_flow(layout.flow(f), &truth.flow(f)?)?;
        write_map(layout.map(f), &labels.map(f)?.map)
    })?;
    Ok(ExportSummary {
        objects: truth.objects().len(),
        frames,
        files: 3 + 2 * frames as usize,
    })
}
