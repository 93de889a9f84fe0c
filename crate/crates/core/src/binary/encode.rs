use std::collections::HashMap;
use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use thiserror::Error;

use super::varint::{write_u64, zigzag};
use super::{tag, EncodeOptions, FLAG_DEDUP, FLAG_DEFLATE, MAGIC, VERSION};
use crate::scene::{schema, FieldType, FieldValue, Node, NodeKind, NodeRef, SceneGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("{kind} has no field '{field}'")]
    UnknownField { kind: NodeKind, field: String },
    #[error("{kind}.{field} holds {found}, expected {expected}")]
    FieldType { kind: NodeKind, field: String, found: &'static str, expected: &'static str },
    #[error("body of {0} bytes does not fit the u32 length field")]
    TooLarge(usize),
}

/// Encodes a scene as `.s3db`. The result is self-describing: decoding
/// needs no options.
pub fn encode_binary(scene: &SceneGraph, opts: EncodeOptions) -> Result<Vec<u8>, EncodeError> {
    let mut e = Encoder {
        dedup: opts.string_table_dedup,
        strings: Vec::new(),
        index: HashMap::new(),
        kinds: Vec::new(),
    };

    let mut head = Vec::new();
    let profile = e.intern(&scene.profile);
    write_u64(&mut head, profile);
    let version = e.intern(&scene.version);
    write_u64(&mut head, version);
    write_u64(&mut head, scene.components.len() as u64);
    for c in &scene.components {
        let name = e.intern(&c.name);
        write_u64(&mut head, name);
        write_u64(&mut head, u64::from(c.level));
    }
    write_u64(&mut head, scene.meta.len() as u64);
    for (k, v) in &scene.meta {
        let k = e.intern(k);
        write_u64(&mut head, k);
        let v = e.intern(v);
        write_u64(&mut head, v);
    }

    let mut nodes = Vec::new();
    write_u64(&mut nodes, scene.roots.len() as u64);
    for r in &scene.roots {
        e.node_ref(&mut nodes, r)?;
    }
    write_u64(&mut nodes, scene.routes.len() as u64);
    for r in &scene.routes {
        for s in [&r.from_node, &r.from_field, &r.to_node, &r.to_field] {
            let i = e.intern(s);
            write_u64(&mut nodes, i);
        }
    }

    let mut kinds = Vec::new();
    write_u64(&mut kinds, e.kinds.len() as u64);
    let kind_list = e.kinds.clone();
    for k in kind_list {
        let i = e.intern(k.name());
        write_u64(&mut kinds, i);
    }

    let mut body = Vec::new();
    write_u64(&mut body, e.strings.len() as u64);
    for s in &e.strings {
        write_u64(&mut body, s.len() as u64);
        body.extend_from_slice(s.as_bytes());
    }
    body.extend_from_slice(&head);
    body.extend_from_slice(&kinds);
    body.extend_from_slice(&nodes);

    let mut flags = 0;
    if opts.string_table_dedup {
        flags |= FLAG_DEDUP;
    }
    if opts.compress_payload {
        flags |= FLAG_DEFLATE;
        let mut z = DeflateEncoder::new(Vec::new(), Compression::best());
        z.write_all(&body).expect("writing to a Vec cannot fail");
        body = z.finish().expect("writing to a Vec cannot fail");
    }
    let len = u32::try_from(body.len()).map_err(|_| EncodeError::TooLarge(body.len()))?;

    let mut out = Vec::with_capacity(super::HEADER_LEN + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(flags);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&crc32fast::hash(&body).to_le_bytes());
    out.extend_from_slice(&body);
    Ok(out)
}

struct Encoder {
    dedup: bool,
    strings: Vec<String>,
    index: HashMap<String, u64>,
    kinds: Vec<NodeKind>,
}

fn f32_exact(x: f64) -> bool {
    f64::from(x as f32) == x
}

fn put_reals(out: &mut Vec<u8>, xs: &[f64], wide: bool) {
    for x in xs {
        if wide {
            out.extend_from_slice(&x.to_le_bytes());
        } else {
            out.extend_from_slice(&(*x as f32).to_le_bytes());
        }
    }
}

/// Writes a real-valued payload, picking the narrow tag when lossless.
fn reals(out: &mut Vec<u8>, narrow: u8, xs: &[f64], list_len: Option<usize>) {
    let wide = !xs.iter().all(|x| f32_exact(*x));
    out.push(if wide { narrow + 1 } else { narrow });
    if let Some(n) = list_len {
        write_u64(out, n as u64);
    }
    put_reals(out, xs, wide);
}

impl Encoder {
    fn intern(&mut self, s: &str) -> u64 {
        if self.dedup {
            if let Some(i) = self.index.get(s) {
                return *i;
            }
        }
        self.strings.push(s.to_string());
        let i = self.strings.len() as u64;
        if self.dedup {
            self.index.insert(s.to_string(), i);
        }
        i
    }

    fn token(&mut self, kind: NodeKind) -> u64 {
        match self.kinds.iter().position(|k| *k == kind) {
            Some(p) => p as u64 + 1,
            None => {
                self.kinds.push(kind);
                self.kinds.len() as u64
            }
        }
    }

    fn node_ref(&mut self, out: &mut Vec<u8>, r: &NodeRef) -> Result<(), EncodeError> {
        match r {
            NodeRef::Use(name) => {
                out.push(0);
                let i = self.intern(name);
                write_u64(out, i);
                Ok(())
            }
            NodeRef::Node(n) => self.node(out, n),
        }
    }

    fn node(&mut self, out: &mut Vec<u8>, node: &Node) -> Result<(), EncodeError> {
        let t = self.token(node.kind);
        write_u64(out, t);
        let def = match &node.def_name {
            Some(d) => self.intern(d),
            None => 0,
        };
        write_u64(out, def);

        let table = schema::fields(node.kind);
        if let Some(bad) = node.fields.keys().find(|k| !table.iter().any(|s| s.name == k.as_str())) {
            return Err(EncodeError::UnknownField { kind: node.kind, field: bad.clone() });
        }
        write_u64(out, node.fields.len() as u64);
        for (id, spec) in table.iter().enumerate() {
            let Some(value) = node.fields.get(spec.name) else { continue };
            if !value.conforms_to(spec.ty) || spec.ty == FieldType::MFNode {
                return Err(EncodeError::FieldType {
                    kind: node.kind,
                    field: spec.name.to_string(),
                    found: value.type_name(),
                    expected: spec.ty.name(),
                });
            }
            out.push(id as u8);
            self.value(out, value)?;
        }
        write_u64(out, node.children.len() as u64);
        for c in &node.children {
            self.node_ref(out, c)?;
        }
        Ok(())
    }

    fn value(&mut self, out: &mut Vec<u8>, v: &FieldValue) -> Result<(), EncodeError> {
        use FieldValue as V;
        const L: u8 = tag::LIST;
        match v {
            V::Bool(b) => {
                out.push(tag::BOOL);
                out.push(u8::from(*b));
            }
            V::Int(i) => {
                out.push(tag::INT);
                write_u64(out, zigzag(i64::from(*i)));
            }
            V::Float(x) => reals(out, tag::FLOAT32, &[*x], None),
            V::Time(x) => {
                out.push(tag::TIME);
                put_reals(out, &[*x], true);
            }
            V::String(s) => {
                out.push(tag::STRING);
                let i = self.intern(s);
                write_u64(out, i);
            }
            V::Vec3(p) => reals(out, tag::VEC3_32, &p.to_array(), None),
            V::Rotation(r) => reals(out, tag::ROT_32, &r.to_array(), None),
            V::Color(c) => reals(out, tag::COLOR_32, &c.to_array(), None),
            V::Bools(bs) => {
                out.push(tag::BOOL | L);
                write_u64(out, bs.len() as u64);
                out.extend(bs.iter().map(|b| u8::from(*b)));
            }
            V::Ints(is) => {
                out.push(tag::INT | L);
                write_u64(out, is.len() as u64);
                let mut prev = 0i64;
                for i in is {
                    let i = i64::from(*i);
                    write_u64(out, zigzag(i - prev));
                    prev = i;
                }
            }
            V::Floats(xs) => reals(out, tag::FLOAT32 | L, xs, Some(xs.len())),
            V::Times(xs) => {
                out.push(tag::TIME | L);
                write_u64(out, xs.len() as u64);
                put_reals(out, xs, true);
            }
            V::Strings(ss) => {
                out.push(tag::STRING | L);
                write_u64(out, ss.len() as u64);
                for s in ss {
                    let i = self.intern(s);
                    write_u64(out, i);
                }
            }
            V::Vec3s(ps) => {
                let flat: Vec<f64> = ps.iter().flat_map(|p| p.to_array()).collect();
                reals(out, tag::VEC3_32 | L, &flat, Some(ps.len()));
            }
            V::Rotations(rs) => {
                let flat: Vec<f64> = rs.iter().flat_map(|r| r.to_array()).collect();
                reals(out, tag::ROT_32 | L, &flat, Some(rs.len()));
            }
            V::Colors(cs) => {
                let flat: Vec<f64> = cs.iter().flat_map(|c| c.to_array()).collect();
                reals(out, tag::COLOR_32 | L, &flat, Some(cs.len()));
            }
            V::Node(r) => {
                out.push(tag::NODE);
                self.node_ref(out, r)?;
            }
        }
        Ok(())
    }
}
