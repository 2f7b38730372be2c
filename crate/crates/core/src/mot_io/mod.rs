//! Readers and writers for every file format the toolkit touches.

mod flow;
mod map_io;
mod seqinfo;
mod table;

pub use flow::{read_flow, write_flow, FlowField, FLOW_MAGIC};
pub use map_io::{map_from_bytes, map_to_bytes, map_to_raster, read_map, write_map, MAP_TAG};
pub use seqinfo::{format_seqinfo, parse_seqinfo, SequenceInfo};
pub use table::{
    format_mot_table, group_by_frame, parse_mot_table, sort_rows, write_mot_table, DetectionRow, MotTable,
};
