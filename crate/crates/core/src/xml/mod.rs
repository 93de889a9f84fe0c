//! X3D XML encoding.

mod compare;
mod lex;
mod parse;
mod write;

pub use compare::{semantic_diff, semantic_equal, values_close, REAL_TOLERANCE};
pub use lex::{format_real, format_value, parse_value};
pub use parse::{parse_xml, ParseDiagnostic};
pub use write::serialize_xml;
