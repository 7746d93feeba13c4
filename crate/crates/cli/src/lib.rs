//! Library side of the `qpair` command: parse a request, execute it, emit
//! the result envelope as JSON or CSV.

pub mod emit;
pub mod error;
pub mod execute;
pub mod request;
mod serde_str;

pub use emit::{emit, ResultEnvelope};
pub use error::CliError;
pub use execute::{execute, Outcome};
pub use request::{parse_request, OutputFormat, Parsed, RunRequest};
