//! `.s3db` compact binary encoding and the compression report.
//!
//! Layout (all multi-byte fixed-width integers little-endian):
//!
//! ```text
//! header  "S3DB" | u8 version=1 | u8 flags | u32 body length | u32 CRC-32 of body
//! body    (DEFLATE-compressed when flags bit 0 is set)
//!         string table | profile | version | components | meta
//!         kind table | root records | route table
//! ```
//!
//! See `docs/binary-format.md` for the record and value encodings.

mod decode;
mod encode;
mod report;
pub mod varint;

use thiserror::Error;

pub use decode::decode_binary;
pub use encode::{encode_binary, EncodeError};
pub use report::{compression_report, CompressionReport, CompressionRow, ReportError};

pub const MAGIC: [u8; 4] = *b"S3DB";
pub const VERSION: u8 = 1;
pub const FLAG_DEFLATE: u8 = 0b01;
pub const FLAG_DEDUP: u8 = 0b10;
pub const HEADER_LEN: usize = 14;

/// Largest body the decoder will inflate.
pub const MAX_BODY: usize = 1 << 26;
/// Deepest node nesting the decoder accepts.
pub const MAX_DEPTH: usize = 256;

/// Value tags. Reals are stored as f32 when every component of the value
/// is exactly representable in f32, otherwise as f64.
pub(crate) mod tag {
    pub const BOOL: u8 = 0x01;
    pub const INT: u8 = 0x02;
    pub const FLOAT32: u8 = 0x03;
    pub const FLOAT64: u8 = 0x04;
    pub const TIME: u8 = 0x05;
    pub const STRING: u8 = 0x06;
    pub const VEC3_32: u8 = 0x07;
    pub const VEC3_64: u8 = 0x08;
    pub const ROT_32: u8 = 0x09;
    pub const ROT_64: u8 = 0x0A;
    pub const COLOR_32: u8 = 0x0B;
    pub const COLOR_64: u8 = 0x0C;
    /// List tags are the scalar tag with bit 4 set.
    pub const LIST: u8 = 0x10;
    pub const NODE: u8 = 0x21;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub compress_payload: bool,
    pub string_table_dedup: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { compress_payload: true, string_table_dedup: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad magic {0:02x?}; not an .s3db stream")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown header flags {0:#04x}")]
    UnknownFlags(u8),
    #[error("stream truncated: needed {needed} more byte(s) at offset {at}")]
    Truncated { at: usize, needed: usize },
    #[error("{0} byte(s) after the declared body")]
    TrailingBytes(usize),
    #[error("checksum mismatch: header {expected:#010x}, body {actual:#010x}")]
    ChecksumMismatch { expected: u32, actual: u32 },
    #[error("body does not inflate: {0}")]
    Decompress(String),
    #[error("varint longer than 64 bits at offset {0}")]
    VarintOverflow(usize),
    #[error("string index {0} out of range")]
    BadStringIndex(u64),
    #[error("string {0} is not UTF-8")]
    InvalidUtf8(usize),
    #[error("node-kind token {0} not in the kind table")]
    UnknownKindToken(u64),
    #[error("unknown node kind '{0}'")]
    UnknownKindName(String),
    #[error("{kind} has no field id {id}")]
    UnknownField { kind: String, id: u8 },
    #[error("value tag {tag:#04x} does not fit {kind}.{field}")]
    BadValueTag { kind: String, field: String, tag: u8 },
    #[error("count {0} exceeds the remaining input")]
    BadCount(u64),
    #[error("nodes nested deeper than {MAX_DEPTH}")]
    NestingTooDeep,
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("USE '{0}' has no earlier DEF")]
    UnresolvedUse(String),
    #[error("DEF '{0}' appears twice")]
    DuplicateDef(String),
}
