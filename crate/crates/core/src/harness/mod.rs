//! Experiment harness: configuration, presets, initial data, output and
//! convergence studies.

mod config;
mod init;
mod io;
mod presets;
mod run;
mod study;

pub use config::{
    load_config, output_path, GridConfig, InitConfig, ModelConfig, OutputConfig, ParamValue, PotentialConfig,
    PotentialName, PresetTag, Resolved, RunConfig, OUTPUT_DIR_ENV,
};
pub use init::{disks, ex1, initial_field, random, squares};
pub use io::{read_series, read_snapshot, series_to_string, write_series, write_snapshot, SeriesWriter, SERIES_HEADER};
pub use presets::{preset_names, preset_value, Example};
pub use run::{advance, final_state, prepare, run_simulation, RunOutput};
pub use study::{
    compare_schemes, convergence_against, convergence_study, reference_config, study_to_csv, Comparison,
    ReferenceSpec, StudyRow, Sweep,
};
