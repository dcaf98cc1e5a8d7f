//! Config ingestion, schedule persistence, CSV export, and the four
//! subcommands behind the `magnetic-lqr` binary.

mod check;
pub mod commands;
pub mod config;
pub mod output;
pub mod schedule;

pub use check::{Bound, CheckReport, CheckResult};
pub use commands::{
    build_models, cmd_check, cmd_field, cmd_simulate, cmd_solve, design, Design, FieldReport,
    Overrides, SimulateReport, SolveReport, DEFAULT_FIELD_SAMPLES, FIELD_FILE, SCHEDULE_FILE,
    TRAJECTORY_FILE,
};
pub use config::{load_config, LoadedConfig, RunConfig, Scenario};
pub use schedule::{read_schedule, write_schedule, ScheduleFile};
