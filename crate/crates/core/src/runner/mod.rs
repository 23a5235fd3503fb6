//! Experiment orchestration: configuration, seeded runs, artifacts,
//! landscapes and multi-run aggregation.

pub mod aggregate;
pub mod config;
pub mod experiment;
pub mod gif;
pub mod landscape;
pub mod session;

pub use aggregate::{aggregate_runs, montage, run_suite, AggregateSummary};
pub use config::{OptimizerKind, RunConfig, OUTPUT_ROOT_VAR};
pub use experiment::{default_frames, frame_schedule, inspect, run_experiment, run_problem, FrameEntry, Manifest};
pub use gif::{write_gif, write_gif_from_pngs};
pub use landscape::{landscape_grid, LandscapeGrid};
pub use session::{BestSnapshot, Engine, EngineSettings, RunRecord, Session};
