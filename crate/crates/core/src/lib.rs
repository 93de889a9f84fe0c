//! Scene-graph tooling for a small X3D subset: an in-memory model,
//! XML and compact binary codecs, an event runtime, and a generator for
//! a rail-yard world with its bench corpus.

pub mod math;
pub mod scene;
pub mod xml;
pub mod binary;
pub mod cli;
pub mod runtime;
pub mod random;
pub mod resolve;
pub mod scenegen;
