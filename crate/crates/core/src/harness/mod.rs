//! Config files, sweeps, comparisons and their text, CSV and SVG outputs.

pub mod compare;
pub mod config;
pub mod csv;
pub mod presets;
pub mod report;
pub mod svg;
pub mod sweep;

pub use compare::{compare, compare_all, validation_grid, ComparisonReport, Tolerance, Verdict};
pub use config::{load_config, load_config_with, parse_config, render_config};
pub use csv::{emit_csv, parse_csv, to_csv_string};
pub use svg::{emit_svg_chart, render_svg};
pub use sweep::{
    load_sweep, parse_sweep, preset_sweep, run_sweep, SweepParam, SweepRow, SweepSpec, SweepTable,
};
