use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::lex;
use crate::scene::{schema, FieldType, Node, NodeKind, NodeRef, SceneGraph};

/// Canonical XML: two-space indent, one element per line, attributes in
/// schema order after `DEF`, `containerField` only where it differs from
/// the default, ROUTEs at the end of `<Scene>`.
pub fn serialize_xml(scene: &SceneGraph) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<X3D profile='{}' version='{}'>", escape(&scene.profile), escape(&scene.version));
    if !scene.components.is_empty() || !scene.meta.is_empty() {
        out.push_str("  <head>\n");
        for c in &scene.components {
            let _ = writeln!(out, "    <component name='{}' level='{}'/>", escape(&c.name), c.level);
        }
        for (k, v) in &scene.meta {
            let _ = writeln!(out, "    <meta name='{}' content='{}'/>", escape(k), escape(v));
        }
        out.push_str("  </head>\n");
    }
    if scene.roots.is_empty() && scene.routes.is_empty() {
        out.push_str("  <Scene/>\n");
    } else {
        out.push_str("  <Scene>\n");
        let mut kinds = BTreeMap::new();
        for r in &scene.roots {
            write_ref(&mut out, r, "children", 2, &mut kinds);
        }
        for r in &scene.routes {
            let _ = writeln!(
                out,
                "    <ROUTE fromNode='{}' fromField='{}' toNode='{}' toField='{}'/>",
                escape(&r.from_node),
                escape(&r.from_field),
                escape(&r.to_node),
                escape(&r.to_field)
            );
        }
        out.push_str("  </Scene>\n");
    }
    out.push_str("</X3D>\n");
    out.into_bytes()
}

fn write_ref(out: &mut String, r: &NodeRef, slot: &str, depth: usize, kinds: &mut BTreeMap<String, NodeKind>) {
    let indent = "  ".repeat(depth);
    match r {
        NodeRef::Use(name) => {
            // an unresolved USE can only come from an invalid scene; Group keeps the output parseable
            let kind = kinds.get(name).copied().unwrap_or(NodeKind::Group);
            let _ = write!(out, "{indent}<{} USE='{}'", kind.name(), escape(name));
            container(out, kind, slot);
            out.push_str("/>\n");
        }
        NodeRef::Node(node) => write_node(out, node, slot, depth, kinds),
    }
}

fn container(out: &mut String, kind: NodeKind, slot: &str) {
    if kind.default_container() != slot {
        let _ = write!(out, " containerField='{slot}'");
    }
}

fn write_node(out: &mut String, node: &Node, slot: &str, depth: usize, kinds: &mut BTreeMap<String, NodeKind>) {
    let indent = "  ".repeat(depth);
    let _ = write!(out, "{indent}<{}", node.kind.name());
    if let Some(d) = &node.def_name {
        let _ = write!(out, " DEF='{}'", escape(d));
        kinds.insert(d.clone(), node.kind);
    }
    for spec in schema::fields(node.kind) {
        if matches!(spec.ty, FieldType::SFNode | FieldType::MFNode) {
            continue;
        }
        if let Some(text) = node.fields.get(spec.name).and_then(lex::format_value) {
            let _ = write!(out, " {}='{}'", spec.name, escape(&text));
        }
    }
    container(out, node.kind, slot);
    let mut slots = node.node_slots().peekable();
    if slots.peek().is_none() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for (slot, r) in slots {
        write_ref(out, r, slot, depth + 1, kinds);
    }
    let _ = writeln!(out, "{indent}</{}>", node.kind.name());
}

/// Escapes for a single-quoted attribute. Whitespace other than a plain
/// space is written as character references so attribute normalization
/// on reparse leaves it intact.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}
