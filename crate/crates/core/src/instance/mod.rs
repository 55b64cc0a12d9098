//! Instance input/output: Solomon benchmark files, precedence generation and
//! the native `.avrp` format.

pub mod format;
pub mod generate;
pub mod solomon;

pub use format::{read as read_instance, write as write_instance, FormatError};
pub use generate::{
    build_instance, build_suite, fleet_defaults, generate_precedence, instance_name,
    precedence_matrix, GenerateError, GeneratorConfig,
};
pub use solomon::{load_source, load_sources, SolomonData, SolomonError, SourceError};
