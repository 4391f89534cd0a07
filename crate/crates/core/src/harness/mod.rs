//! Scenario runs, output files and the validation suite behind the CLI.

mod output;
mod run;
mod scenario;
mod validate;

pub use output::{emit_compare_csv, emit_csv, emit_plot_script, fmt_value, COMPARE_COLUMNS, CSV_HEADER};
pub use run::{run_scenario, SpatialProfile};
pub use scenario::{
    builtin, builtins, parse_config, resolve, Overrides, Scenario, Solver, XGrid, BUILTIN_NAMES, DEFAULT_GRID,
    DEFAULT_ORDINATES,
};
pub use validate::{relative_gaps, validate, Check, Level, Report, Status, ValidateOptions};
