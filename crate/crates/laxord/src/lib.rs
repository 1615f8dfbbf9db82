//! Partition regular languages into orderable parts and enumerate each part
//! as a stream of bounded push-pop edit scripts.

pub mod automata;
pub mod editops;
pub mod enumerator;
pub mod interchange;
pub mod meter;
pub mod oracle;
pub mod slender;
pub mod strata;
pub mod worddag;

pub use automata::{parse_dfa, Dfa, DfaError, Parsed, Run};
pub use editops::{apply, distance, script_between, EditOp, EditScript, Metric};
