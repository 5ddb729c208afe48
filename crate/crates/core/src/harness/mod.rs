//! Experiment engine: configuration, Monte Carlo runs, slope fitting, and
//! CSV persistence.

pub mod config;
pub mod csvio;
pub mod experiment;
pub mod slope;
pub mod svg;

pub use config::{
    default_n_grid, parse_config, process_preset, read_config, write_config, PRESET_NAMES,
};
pub use csvio::{csv_string, write_csv, write_csv_file, CSV_HEADER};
pub use experiment::{
    run_experiment, BandwidthRule, ExperimentConfig, ExperimentResult, ExperimentRow, FejerSeries,
    GridSpec, Metric, OracleKind, PILOT_SAMPLES_DEFAULT,
};
pub use slope::{fit_loglog_slope, metric_pointwise_lq, SlopeFit};
pub use svg::slope_svg;
