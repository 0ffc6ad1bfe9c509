//! Desk-scale model of one self-simulating macrotile: a row of tiles with
//! nine fields, an agent running seven workperiods within the worktime,
//! and the growth schedule of the block sizes.

mod grid;
mod phases;
mod schedule;
mod tile;

pub use grid::{init_grid, Agent, AgentState, FieldRecord, MacrotileGrid};
pub use phases::{
    feasibility, run_phase, run_schedule, Feasibility, Neighbors, PhaseTrace, ScheduleOutcome,
    ScheduleRun, Verdict, PHASE_NAMES,
};
pub use schedule::{
    binary_write_steps, validate_schedule, CheckSummary, LevelCheck, ScheduleParams, ScheduleReport,
};
pub use tile::{pad_row, parse_glyphs, render_glyphs, Glyph, Layout, NextTile, SUBFIELDS};
