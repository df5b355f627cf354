//! File formats: little-endian binary ensembles and vectors, the
//! line-oriented experiment configuration, and JSON/CSV reports.

mod binary;
mod config;
mod report;

pub use binary::{
    decode_complex_vector, decode_ensemble, decode_real_vector, encode_complex_vector, encode_ensemble,
    encode_real_vector, load_complex_vector, load_ensemble, load_real_vector, save_complex_vector, save_ensemble,
    save_real_vector, FormatError, FORMAT_VERSION,
};
pub use config::{parse_config, parse_config_str, serialize_config, ConfigError};
pub use report::{
    report_to_csv, report_to_json, trial_dump_csv, write_report, write_trial_dump, ReportError, ReportFormat,
    CSV_COLUMNS,
};
