use std::collections::BTreeMap;
use std::io::Read;

use flate2::read::DeflateDecoder;

use super::varint::{read_u64, unzigzag, VarintError};
use super::{tag, DecodeError, FLAG_DEDUP, FLAG_DEFLATE, HEADER_LEN, MAGIC, MAX_BODY, MAX_DEPTH, VERSION};
use crate::math::{ColorRGB, Rotation, Vec3};
use crate::scene::{schema, Component, FieldType, FieldValue, Node, NodeKind, NodeRef, Route, SceneGraph};

/// Decodes an `.s3db` stream. Never reads past the declared body and
/// reports every malformation as a typed error.
pub fn decode_binary(bytes: &[u8]) -> Result<SceneGraph, DecodeError> {
    if bytes.len() < 4 {
        return Err(DecodeError::Truncated { at: bytes.len(), needed: HEADER_LEN - bytes.len() });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Truncated { at: bytes.len(), needed: HEADER_LEN - bytes.len() });
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::UnsupportedVersion(bytes[4]));
    }
    let flags = bytes[5];
    if flags & !(FLAG_DEFLATE | FLAG_DEDUP) != 0 {
        return Err(DecodeError::UnknownFlags(flags));
    }
    let len = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let expected = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
    let rest = &bytes[HEADER_LEN..];
    if rest.len() < len {
        return Err(DecodeError::Truncated { at: bytes.len(), needed: len - rest.len() });
    }
    if rest.len() > len {
        return Err(DecodeError::TrailingBytes(rest.len() - len));
    }
    let actual = crc32fast::hash(rest);
    if actual != expected {
        return Err(DecodeError::ChecksumMismatch { expected, actual });
    }

    let inflated;
    let body: &[u8] = if flags & FLAG_DEFLATE != 0 {
        let mut out = Vec::new();
        DeflateDecoder::new(rest)
            .take(MAX_BODY as u64 + 1)
            .read_to_end(&mut out)
            .map_err(|e| DecodeError::Decompress(e.to_string()))?;
        if out.len() > MAX_BODY {
            return Err(DecodeError::Decompress(format!("body inflates past {MAX_BODY} bytes")));
        }
        inflated = out;
        &inflated
    } else {
        rest
    };

    let mut d = Decoder {
        r: Reader { buf: body, pos: 0 },
        strings: Vec::new(),
        kinds: Vec::new(),
        defs: BTreeMap::new(),
        open: Vec::new(),
    };
    let scene = d.scene()?;
    if d.r.pos != body.len() {
        return Err(DecodeError::TrailingBytes(body.len() - d.r.pos));
    }
    Ok(scene)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.remaining() < n {
            return Err(DecodeError::Truncated { at: self.pos, needed: n - self.remaining() });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn varint(&mut self) -> Result<u64, DecodeError> {
        match read_u64(&self.buf[self.pos..]) {
            Ok((v, n)) => {
                self.pos += n;
                Ok(v)
            }
            Err(VarintError::Truncated) => Err(DecodeError::Truncated { at: self.buf.len(), needed: 1 }),
            Err(VarintError::Overflow) => Err(DecodeError::VarintOverflow(self.pos)),
        }
    }

    /// A count of items that each occupy at least `min_size` bytes.
    fn count(&mut self, min_size: usize) -> Result<usize, DecodeError> {
        let n = self.varint()?;
        if n.saturating_mul(min_size as u64) > self.remaining() as u64 {
            return Err(DecodeError::BadCount(n));
        }
        Ok(n as usize)
    }

    fn real(&mut self, wide: bool) -> Result<f64, DecodeError> {
        let x = if wide {
            f64::from_le_bytes(self.take(8)?.try_into().unwrap())
        } else {
            f64::from(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
        };
        if !x.is_finite() {
            return Err(DecodeError::InvalidValue(format!("non-finite real at offset {}", self.pos)));
        }
        Ok(x)
    }

    fn reals(&mut self, n: usize, wide: bool) -> Result<Vec<f64>, DecodeError> {
        (0..n).map(|_| self.real(wide)).collect()
    }
}

struct Decoder<'a> {
    r: Reader<'a>,
    strings: Vec<String>,
    kinds: Vec<NodeKind>,
    defs: BTreeMap<String, NodeKind>,
    open: Vec<String>,
}

fn vec3(c: &[f64]) -> Vec3 {
    Vec3::new(c[0], c[1], c[2])
}

fn rotation(c: &[f64]) -> Result<Rotation, DecodeError> {
    Rotation::from_unit_axis(vec3(c), c[3]).map_err(|e| DecodeError::InvalidValue(e.to_string()))
}

fn color(c: &[f64]) -> Result<ColorRGB, DecodeError> {
    ColorRGB::new(c[0], c[1], c[2]).map_err(|e| DecodeError::InvalidValue(e.to_string()))
}

impl Decoder<'_> {
    fn string(&mut self) -> Result<String, DecodeError> {
        let i = self.r.varint()?;
        match usize::try_from(i).ok().and_then(|i| i.checked_sub(1)).and_then(|i| self.strings.get(i)) {
            Some(s) => Ok(s.clone()),
            None => Err(DecodeError::BadStringIndex(i)),
        }
    }

    fn scene(&mut self) -> Result<SceneGraph, DecodeError> {
        let n = self.r.count(1)?;
        for i in 0..n {
            let len = self.r.count(1)?;
            let raw = self.r.take(len)?;
            let s = std::str::from_utf8(raw).map_err(|_| DecodeError::InvalidUtf8(i + 1))?;
            self.strings.push(s.to_string());
        }

        let mut scene = SceneGraph::new();
        scene.profile = self.string()?;
        scene.version = self.string()?;
        let n = self.r.count(2)?;
        for _ in 0..n {
            let name = self.string()?;
            let level = u32::try_from(self.r.varint()?)
                .map_err(|_| DecodeError::InvalidValue("component level out of range".into()))?;
            scene.components.push(Component { name, level });
        }
        let n = self.r.count(2)?;
        for _ in 0..n {
            let k = self.string()?;
            let v = self.string()?;
            scene.meta.insert(k, v);
        }

        let n = self.r.count(1)?;
        for _ in 0..n {
            let name = self.string()?;
            let kind = NodeKind::from_name(&name).ok_or(DecodeError::UnknownKindName(name))?;
            self.kinds.push(kind);
        }

        let n = self.r.count(2)?;
        for _ in 0..n {
            let (r, kind) = self.node_ref(0)?;
            if !kind.is_child_node() {
                return Err(DecodeError::InvalidValue(format!("{kind} cannot be a scene root")));
            }
            scene.roots.push(r);
        }
        let n = self.r.count(4)?;
        for _ in 0..n {
            let from_node = self.string()?;
            let from_field = self.string()?;
            let to_node = self.string()?;
            let to_field = self.string()?;
            scene.routes.push(Route { from_node, from_field, to_node, to_field });
        }
        Ok(scene)
    }

    fn node_ref(&mut self, depth: usize) -> Result<(NodeRef, NodeKind), DecodeError> {
        if depth >= MAX_DEPTH {
            return Err(DecodeError::NestingTooDeep);
        }
        let token = self.r.varint()?;
        if token == 0 {
            let name = self.string()?;
            let Some(kind) = self.defs.get(&name).copied() else {
                return Err(DecodeError::UnresolvedUse(name));
            };
            if self.open.contains(&name) {
                return Err(DecodeError::InvalidValue(format!("USE '{name}' refers to an enclosing node")));
            }
            return Ok((NodeRef::Use(name), kind));
        }
        let kind = usize::try_from(token)
            .ok()
            .and_then(|t| self.kinds.get(t - 1))
            .copied()
            .ok_or(DecodeError::UnknownKindToken(token))?;
        let mut node = Node::new(kind);
        let def = self.r.varint()?;
        if def != 0 {
            let name = match usize::try_from(def).ok().and_then(|i| self.strings.get(i - 1)) {
                Some(s) => s.clone(),
                None => return Err(DecodeError::BadStringIndex(def)),
            };
            if name.is_empty() {
                return Err(DecodeError::InvalidValue("empty DEF name".into()));
            }
            if self.defs.insert(name.clone(), kind).is_some() {
                return Err(DecodeError::DuplicateDef(name));
            }
            node.def_name = Some(name);
        }
        if let Some(d) = &node.def_name {
            self.open.push(d.clone());
        }

        let table = schema::fields(kind);
        let n = self.r.count(2)?;
        for _ in 0..n {
            let id = self.r.u8()?;
            let spec = table
                .get(id as usize)
                .filter(|s| s.ty != FieldType::MFNode && s.access.is_initializable())
                .ok_or_else(|| DecodeError::UnknownField { kind: kind.name().to_string(), id })?;
            if node.fields.contains_key(spec.name) {
                return Err(DecodeError::InvalidValue(format!("{kind}.{} given twice", spec.name)));
            }
            let t = self.r.u8()?;
            let value = self.value(kind, spec.name, spec.ty, t, depth)?;
            node.set(spec.name, value);
        }
        let n = self.r.count(1)?;
        if n > 0 && !kind.is_grouping() {
            return Err(DecodeError::InvalidValue(format!("{kind} cannot have children")));
        }
        for _ in 0..n {
            let (c, child_kind) = self.node_ref(depth + 1)?;
            if !child_kind.is_child_node() {
                return Err(DecodeError::InvalidValue(format!("{child_kind} cannot be a child of {kind}")));
            }
            node.children.push(c);
        }
        if node.def_name.is_some() {
            self.open.pop();
        }
        Ok((NodeRef::node(node), kind))
    }

    fn value(&mut self, kind: NodeKind, field: &str, ty: FieldType, t: u8, depth: usize) -> Result<FieldValue, DecodeError> {
        use FieldType as F;
        use FieldValue as V;
        const L: u8 = tag::LIST;
        let bad = || DecodeError::BadValueTag { kind: kind.name().to_string(), field: field.to_string(), tag: t };
        // narrow/wide real forms share a type; `wide` tells them apart
        let wide = matches!(t & 0x0f, 0x04 | 0x08 | 0x0A | 0x0C);
        let scalar = t & !L;
        let expect = |ok: bool| if ok { Ok(()) } else { Err(bad()) };
        Ok(match ty {
            F::SFBool => {
                expect(t == tag::BOOL)?;
                match self.r.u8()? {
                    0 => V::Bool(false),
                    1 => V::Bool(true),
                    b => return Err(DecodeError::InvalidValue(format!("boolean byte {b}"))),
                }
            }
            F::SFInt32 => {
                expect(t == tag::INT)?;
                V::Int(int32(unzigzag(self.r.varint()?))?)
            }
            F::SFFloat => {
                expect(t == tag::FLOAT32 || t == tag::FLOAT64)?;
                V::Float(self.r.real(wide)?)
            }
            F::SFTime => {
                expect(t == tag::TIME)?;
                V::Time(self.r.real(true)?)
            }
            F::SFString => {
                expect(t == tag::STRING)?;
                V::String(self.string()?)
            }
            F::SFVec3f => {
                expect(t == tag::VEC3_32 || t == tag::VEC3_64)?;
                V::Vec3(vec3(&self.r.reals(3, wide)?))
            }
            F::SFRotation => {
                expect(t == tag::ROT_32 || t == tag::ROT_64)?;
                V::Rotation(rotation(&self.r.reals(4, wide)?)?)
            }
            F::SFColor => {
                expect(t == tag::COLOR_32 || t == tag::COLOR_64)?;
                V::Color(color(&self.r.reals(3, wide)?)?)
            }
            F::MFBool => {
                expect(t == tag::BOOL | L)?;
                let n = self.r.count(1)?;
                let raw = self.r.take(n)?;
                V::Bools(
                    raw.iter()
                        .map(|b| match b {
                            0 => Ok(false),
                            1 => Ok(true),
                            b => Err(DecodeError::InvalidValue(format!("boolean byte {b}"))),
                        })
                        .collect::<Result<_, _>>()?,
                )
            }
            F::MFInt32 => {
                expect(t == tag::INT | L)?;
                let n = self.r.count(1)?;
                let mut out = Vec::with_capacity(n);
                let mut prev = 0i64;
                for _ in 0..n {
                    let v = prev.checked_add(unzigzag(self.r.varint()?)).ok_or_else(|| {
                        DecodeError::InvalidValue("integer delta overflows".into())
                    })?;
                    out.push(int32(v)?);
                    prev = v;
                }
                V::Ints(out)
            }
            F::MFFloat | F::MFTime | F::MFVec3f | F::MFRotation | F::MFColor => {
                let (group, ok) = match ty {
                    F::MFFloat => (1, scalar == tag::FLOAT32 || scalar == tag::FLOAT64),
                    F::MFTime => (1, scalar == tag::TIME),
                    F::MFVec3f => (3, scalar == tag::VEC3_32 || scalar == tag::VEC3_64),
                    F::MFRotation => (4, scalar == tag::ROT_32 || scalar == tag::ROT_64),
                    _ => (3, scalar == tag::COLOR_32 || scalar == tag::COLOR_64),
                };
                expect(ok && t & L != 0)?;
                let wide = wide || ty == F::MFTime;
                let n = self.r.count(group * if wide { 8 } else { 4 })?;
                let flat = self.r.reals(n * group, wide)?;
                match ty {
                    F::MFFloat => V::Floats(flat),
                    F::MFTime => V::Times(flat),
                    F::MFVec3f => V::Vec3s(flat.chunks(3).map(vec3).collect()),
                    F::MFRotation => V::Rotations(flat.chunks(4).map(rotation).collect::<Result<_, _>>()?),
                    _ => V::Colors(flat.chunks(3).map(color).collect::<Result<_, _>>()?),
                }
            }
            F::MFString => {
                expect(t == tag::STRING | L)?;
                let n = self.r.count(1)?;
                V::Strings((0..n).map(|_| self.string()).collect::<Result<_, _>>()?)
            }
            F::SFNode => {
                expect(t == tag::NODE)?;
                let (r, child_kind) = self.node_ref(depth + 1)?;
                if !schema::accepts_node(kind, field, child_kind) {
                    return Err(DecodeError::InvalidValue(format!("{child_kind} cannot go in {kind}.{field}")));
                }
                V::Node(r)
            }
            F::MFNode => return Err(bad()),
        })
    }

}

fn int32(v: i64) -> Result<i32, DecodeError> {
    i32::try_from(v).map_err(|_| DecodeError::InvalidValue(format!("{v} does not fit in 32 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::{encode_binary, EncodeOptions};
    use crate::xml::semantic_equal;

    fn one_box() -> SceneGraph {
        SceneGraph::new().with_root(
            Node::new(NodeKind::Shape).with("geometry", FieldValue::Node(Node::new(NodeKind::Box).into())),
        )
    }

    fn all_opts() -> [EncodeOptions; 4] {
        [(false, false), (false, true), (true, false), (true, true)]
            .map(|(c, d)| EncodeOptions { compress_payload: c, string_table_dedup: d })
    }

    #[test]
    fn empty_scene_is_small() {
        for opts in all_opts() {
            let bytes = encode_binary(&SceneGraph::new(), opts).unwrap();
            assert!(bytes.len() < 64, "{} bytes", bytes.len());
            assert_eq!(decode_binary(&bytes).unwrap(), SceneGraph::new());
        }
    }

    #[test]
    fn box_round_trips() {
        for opts in all_opts() {
            let s = one_box();
            assert!(semantic_equal(&decode_binary(&encode_binary(&s, opts).unwrap()).unwrap(), &s));
        }
    }

    #[test]
    fn wide_and_narrow_reals() {
        let s = SceneGraph::new().with_root(
            Node::new(NodeKind::Transform)
                .with("translation", FieldValue::Vec3(Vec3::new(0.1, 0.5, -500.0)))
                .with("scale", FieldValue::Vec3(Vec3::new(0.5, 2.0, 1.0))),
        );
        let bytes = encode_binary(&s, EncodeOptions { compress_payload: false, string_table_dedup: true }).unwrap();
        assert_eq!(decode_binary(&bytes).unwrap(), s);
        assert!(bytes.windows(1).any(|w| w[0] == tag::VEC3_64));
    }

    #[test]
    fn header_errors() {
        let good = encode_binary(&one_box(), EncodeOptions::default()).unwrap();
        let mut x3db = good.clone();
        x3db[..4].copy_from_slice(b"X3DB");
        assert!(matches!(decode_binary(&x3db), Err(DecodeError::BadMagic(_))));

        let mut long = good.clone();
        let len = u32::from_le_bytes(long[6..10].try_into().unwrap()) + 5;
        long[6..10].copy_from_slice(&len.to_le_bytes());
        assert!(matches!(decode_binary(&long), Err(DecodeError::Truncated { .. })));

        let mut flipped = good.clone();
        let last = flipped.len() - 1;
        flipped[last] ^= 0x40;
        assert!(matches!(decode_binary(&flipped), Err(DecodeError::ChecksumMismatch { .. })));

        let mut v2 = good.clone();
        v2[4] = 2;
        assert_eq!(decode_binary(&v2), Err(DecodeError::UnsupportedVersion(2)));

        assert!(matches!(decode_binary(&good[..good.len() - 1]), Err(DecodeError::Truncated { .. })));
        let mut extra = good;
        extra.push(0);
        assert_eq!(decode_binary(&extra), Err(DecodeError::TrailingBytes(1)));
    }

    /// Wraps a raw body in a valid uncompressed header.
    fn framed(body: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.push(VERSION);
        out.push(0);
        out.extend_from_slice(&(body.len() as u32).to_le_bytes());
        out.extend_from_slice(&crc32fast::hash(body).to_le_bytes());
        out.extend_from_slice(body);
        out
    }

    #[test]
    fn body_errors() {
        // strings: "P", "V", "Group"; no components/meta; kind table [Group]
        let prefix: &[u8] = &[3, 1, b'P', 1, b'V', 5, b'G', b'r', b'o', b'u', b'p', 1, 2, 0, 0, 1, 3];
        let with = |tail: &[u8]| framed(&[prefix, tail].concat());
        assert!(decode_binary(&with(&[0, 0])).is_ok());
        assert_eq!(decode_binary(&with(&[1, 9, 0, 0, 0, 0])), Err(DecodeError::UnknownKindToken(9)));
        assert_eq!(decode_binary(&with(&[1, 0, 1])), Err(DecodeError::UnresolvedUse("P".into())));
        assert_eq!(decode_binary(&with(&[1, 1, 0, 1, 0x40, 0x01, 0, 0, 0])).unwrap_err().to_string(), "Group has no field id 64");
        assert_eq!(decode_binary(&with(&[0xff, 0xff, 0xff])), Err(DecodeError::Truncated { at: 20, needed: 1 }));
        assert_eq!(decode_binary(&with(&[100])), Err(DecodeError::BadCount(100)));
        assert_eq!(
            decode_binary(&with(&[2, 1, 1, 0, 0, 1, 1, 0, 0, 0])),
            Err(DecodeError::DuplicateDef("P".into()))
        );
        // a Group nested deeper than the limit
        let mut deep = vec![1u8];
        for _ in 0..MAX_DEPTH + 1 {
            deep.extend_from_slice(&[1, 0, 0, 1]);
        }
        assert_eq!(decode_binary(&with(&deep)), Err(DecodeError::NestingTooDeep));
    }

    #[test]
    fn deflate_bomb_is_capped() {
        use flate2::{write::DeflateEncoder, Compression};
        use std::io::Write;
        let mut z = DeflateEncoder::new(Vec::new(), Compression::best());
        let zeros = vec![0u8; 1 << 20];
        for _ in 0..(MAX_BODY >> 20) + 1 {
            z.write_all(&zeros).unwrap();
        }
        let body = z.finish().unwrap();
        let mut stream = framed(&body);
        stream[5] = FLAG_DEFLATE;
        assert!(matches!(decode_binary(&stream), Err(DecodeError::Decompress(_))));
    }
}
