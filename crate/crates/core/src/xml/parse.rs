use std::collections::BTreeMap;
use std::fmt;

use roxmltree::{Document, Node as XNode, ParsingOptions};
use serde::Serialize;

use super::lex;
use crate::scene::{schema, Component, FieldType, FieldValue, Node, NodeKind, NodeRef, Route, SceneGraph};

/// A parse problem. `line` and `column` are 1-based and point into the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: u32,
    pub column: u32,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.code, self.message)
    }
}

/// Parses the XML encoding. All problems found are reported together.
pub fn parse_xml(bytes: &[u8]) -> Result<SceneGraph, Vec<ParseDiagnostic>> {
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            let (line, column) = line_col(bytes, e.valid_up_to());
            return Err(vec![ParseDiagnostic {
                line,
                column,
                code: "NOT_UTF8",
                message: "input is not valid UTF-8".into(),
            }]);
        }
    };
    let opts = ParsingOptions { allow_dtd: true, ..ParsingOptions::default() };
    let doc = match Document::parse_with_options(text, opts) {
        Ok(d) => d,
        Err(e) => {
            let pos = e.pos();
            let (line, column) = clamp(bytes, pos.row, pos.col);
            return Err(vec![ParseDiagnostic { line, column, code: "XML_MALFORMED", message: e.to_string() }]);
        }
    };
    let mut p = Parser { doc: &doc, diags: Vec::new(), defs: BTreeMap::new(), open: Vec::new(), routes: Vec::new() };
    let scene = p.document();
    if p.diags.is_empty() {
        Ok(scene)
    } else {
        Err(p.diags)
    }
}

fn line_col(bytes: &[u8], offset: usize) -> (u32, u32) {
    let before = &bytes[..offset.min(bytes.len())];
    let line = before.iter().filter(|b| **b == b'\n').count() as u32 + 1;
    let start = before.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    let column = String::from_utf8_lossy(&before[start..]).chars().count() as u32 + 1;
    (line, column)
}

/// Keeps a reported position inside the input (end-of-input errors point
/// at the last character).
fn clamp(bytes: &[u8], line: u32, column: u32) -> (u32, u32) {
    if bytes.is_empty() {
        return (1, 1);
    }
    let (last_line, last_col) = line_col(bytes, bytes.len() - 1);
    if line > last_line || (line == last_line && column > last_col) {
        (last_line, last_col)
    } else {
        (line.max(1), column.max(1))
    }
}

fn elements<'a, 'b: 'a>(el: XNode<'a, 'b>) -> impl Iterator<Item = XNode<'a, 'b>> {
    el.children().filter(|c| c.is_element())
}

struct Parser<'d, 'i> {
    doc: &'d Document<'i>,
    diags: Vec<ParseDiagnostic>,
    defs: BTreeMap<String, NodeKind>,
    /// DEF names of the elements currently open.
    open: Vec<String>,
    routes: Vec<Route>,
}

impl<'d, 'i> Parser<'d, 'i> {
    fn diag_at(&mut self, pos: usize, code: &'static str, message: String) {
        let p = self.doc.text_pos_at(pos);
        self.diags.push(ParseDiagnostic { line: p.row, column: p.col, code, message });
    }

    fn diag(&mut self, el: XNode, code: &'static str, message: String) {
        self.diag_at(el.range().start, code, message);
    }

    fn unexpected_text(&mut self, el: XNode) {
        for t in el.children().filter(|c| c.is_text()) {
            if !t.text().unwrap_or("").trim().is_empty() {
                self.diag(t, "UNEXPECTED_TEXT", format!("text content inside <{}>", el.tag_name().name()));
            }
        }
    }

    fn document(&mut self) -> SceneGraph {
        let mut scene = SceneGraph::new();
        let root = self.doc.root_element();
        if root.tag_name().name() != "X3D" {
            self.diag(root, "NOT_X3D", format!("root element is <{}>, expected <X3D>", root.tag_name().name()));
            return scene;
        }
        if let Some(p) = root.attribute("profile") {
            scene.profile = p.to_string();
        }
        if let Some(v) = root.attribute("version") {
            scene.version = v.to_string();
        }
        self.unexpected_text(root);
        let mut saw_scene = false;
        for el in elements(root) {
            match el.tag_name().name() {
                "head" => self.head(el, &mut scene),
                "Scene" if !saw_scene => {
                    saw_scene = true;
                    self.unexpected_text(el);
                    for child in elements(el) {
                        if let Some(r) = self.child(child, None) {
                            scene.roots.push(r);
                        }
                    }
                }
                other => self.diag(el, "UNSUPPORTED_ELEMENT", format!("unexpected <{other}> in <X3D>")),
            }
        }
        if !saw_scene {
            self.diag(root, "MISSING_SCENE", "<X3D> has no <Scene>".into());
        }
        scene.routes = std::mem::take(&mut self.routes);
        scene
    }

    fn head(&mut self, head: XNode, scene: &mut SceneGraph) {
        for el in elements(head) {
            match el.tag_name().name() {
                "component" => {
                    let name = el.attribute("name").unwrap_or("").to_string();
                    let level = match el.attribute("level").map(str::parse::<u32>) {
                        Some(Ok(l)) => l,
                        None => 1,
                        Some(Err(_)) => {
                            self.diag(el, "BAD_VALUE", "component level is not a number".into());
                            1
                        }
                    };
                    scene.components.push(Component { name, level });
                }
                "meta" => {
                    if let (Some(n), Some(c)) = (el.attribute("name"), el.attribute("content")) {
                        scene.meta.insert(n.to_string(), c.to_string());
                    }
                }
                other => self.diag(el, "UNSUPPORTED_ELEMENT", format!("unexpected <{other}> in <head>")),
            }
        }
    }

    /// A child element of a node (or of `<Scene>` when `host` is None).
    /// Returns the node reference for the caller to place.
    fn child(&mut self, el: XNode, host: Option<NodeKind>) -> Option<NodeRef> {
        let tag = el.tag_name().name();
        if tag == "ROUTE" {
            self.route(el);
            return None;
        }
        let Some(kind) = NodeKind::from_name(tag) else {
            self.diag(el, "UNSUPPORTED_ELEMENT", format!("<{tag}> is not a supported node"));
            return None;
        };
        if let Some(name) = el.attribute("USE") {
            for a in el.attributes() {
                if !matches!(a.name(), "USE" | "containerField") {
                    self.diag_at(a.range().start, "BAD_USE", format!("USE element carries '{}'", a.name()));
                }
            }
            if elements(el).next().is_some() {
                self.diag(el, "BAD_USE", "USE element has children".into());
            }
            match self.defs.get(name) {
                None => self.diag(el, "USE_UNDEFINED", format!("USE '{name}' has no earlier DEF")),
                Some(k) if *k != kind => {
                    let k = *k;
                    self.diag(el, "USE_KIND_MISMATCH", format!("'{name}' is a {k}, not a {kind}"))
                }
                Some(_) if self.open.iter().any(|o| o == name) => {
                    self.diag(el, "USE_CYCLE", format!("USE '{name}' refers to an enclosing node"))
                }
                Some(_) => {}
            }
            return Some(NodeRef::Use(name.to_string()));
        }

        let mut node = Node::new(kind);
        for a in el.attributes() {
            let name = a.name();
            if a.namespace().is_some() {
                continue;
            }
            match name {
                "DEF" => {
                    let def = a.value();
                    if def.is_empty() {
                        self.diag_at(a.range().start, "BAD_DEF", "empty DEF name".into());
                    } else if self.defs.contains_key(def) {
                        self.diag_at(a.range().start, "DUPLICATE_DEF", format!("DEF '{def}' is already defined"));
                    } else {
                        self.defs.insert(def.to_string(), kind);
                    }
                    node.def_name = Some(def.to_string());
                }
                "containerField" => {}
                _ => {
                    let Some(spec) = schema::field(kind, name) else {
                        self.diag_at(a.range().start, "UNKNOWN_FIELD", format!("{kind} has no field '{name}'"));
                        continue;
                    };
                    if matches!(spec.ty, FieldType::SFNode | FieldType::MFNode) {
                        self.diag_at(a.range().start, "FIELD_TYPE", format!("{kind}.{name} takes nodes, not text"));
                        continue;
                    }
                    if !spec.access.is_initializable() {
                        self.diag_at(
                            a.range().start,
                            "FIELD_ACCESS",
                            format!("{kind}.{name} cannot be given an initial value"),
                        );
                        continue;
                    }
                    match lex::parse_value(spec.ty, a.value()) {
                        Ok(v) => node.set(name, v),
                        Err(msg) => self.diag_at(
                            a.range_value().start,
                            "FIELD_TYPE",
                            format!("{kind}.{name} ({}): {msg}", spec.ty.name()),
                        ),
                    }
                }
            }
        }

        self.unexpected_text(el);
        let opened = node.def_name.clone().map(|d| self.open.push(d)).is_some();
        for child_el in elements(el) {
            let Some(r) = self.child(child_el, Some(kind)) else { continue };
            let child_kind = match &r {
                NodeRef::Node(n) => n.kind,
                NodeRef::Use(name) => match self.defs.get(name) {
                    Some(k) => *k,
                    None => continue,
                },
            };
            let slot = child_el.attribute("containerField").unwrap_or(child_kind.default_container());
            if !schema::accepts_node(kind, slot, child_kind) {
                if slot == "children" && !kind.is_grouping() {
                    self.diag(child_el, "CHILDREN_NOT_ALLOWED", format!("{kind} cannot have children"));
                } else {
                    self.diag(child_el, "NODE_NOT_ALLOWED", format!("{child_kind} cannot go in {kind}.{slot}"));
                }
                continue;
            }
            if slot == "children" {
                node.children.push(r);
            } else if node.fields.contains_key(slot) {
                self.diag(child_el, "DUPLICATE_FIELD", format!("{kind}.{slot} is given twice"));
            } else {
                node.set(slot, FieldValue::Node(r));
            }
        }
        if opened {
            self.open.pop();
        }
        if host.is_none() && !kind.is_child_node() {
            self.diag(el, "NODE_NOT_ALLOWED", format!("{kind} cannot be a scene root"));
        }
        Some(NodeRef::node(node))
    }

    fn route(&mut self, el: XNode) {
        let mut parts = Vec::with_capacity(4);
        for attr in ["fromNode", "fromField", "toNode", "toField"] {
            match el.attribute(attr) {
                Some(v) if !v.is_empty() => parts.push(v),
                _ => {
                    self.diag(el, "ROUTE_SYNTAX", format!("ROUTE is missing '{attr}'"));
                    return;
                }
            }
        }
        if elements(el).next().is_some() {
            self.diag(el, "ROUTE_SYNTAX", "ROUTE cannot have children".into());
        }
        self.routes.push(Route::new(parts[0], parts[1], parts[2], parts[3]));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec3;

    fn codes(src: &str) -> Vec<&'static str> {
        parse_xml(src.as_bytes()).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn box_in_shape() {
        let s = parse_xml(b"<X3D><Scene><Shape><Box size='1 1 1'/></Shape></Scene></X3D>").unwrap();
        let shape = s.roots[0].as_node().unwrap();
        assert_eq!(shape.kind, NodeKind::Shape);
        let FieldValue::Node(geom) = &shape.fields["geometry"] else { panic!() };
        let geom = geom.as_node().unwrap();
        assert_eq!(geom.kind, NodeKind::Box);
        assert_eq!(geom.vec3("size"), Vec3::ONE);
    }

    #[test]
    fn transform_below() {
        let s = parse_xml(b"<X3D><Scene><Transform translation='0 -500 0'/></Scene></X3D>").unwrap();
        assert_eq!(s.roots[0].as_node().unwrap().vec3("translation"), Vec3::new(0.0, -500.0, 0.0));
    }

    #[test]
    fn routes_header_and_use() {
        let src = r#"<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE X3D PUBLIC "ISO//Web3D//DTD X3D 3.3//EN" "http://www.web3d.org/specifications/x3d-3.3.dtd">
<X3D profile='Interchange' version='3.2' xmlns:xsd='http://www.w3.org/2001/XMLSchema-instance'>
  <head>
    <component name='Sound' level='1'/>
    <meta name='title' content='t'/>
  </head>
  <Scene>
    <!-- dropped -->
    <TimeSensor DEF='Clock' loop='true'/>
    <Group>
      <Shape DEF='S'><Appearance DEF='A'><Material/></Appearance><Box/></Shape>
      <Shape><Appearance USE='A'/><Box/></Shape>
      <ROUTE fromNode='Clock' fromField='isActive' toNode='Clock' toField='enabled'/>
    </Group>
    <Shape USE='S'/>
  </Scene>
</X3D>"#;
        let s = parse_xml(src.as_bytes()).unwrap();
        assert_eq!((s.profile.as_str(), s.version.as_str()), ("Interchange", "3.2"));
        assert_eq!(s.components, vec![Component { name: "Sound".into(), level: 1 }]);
        assert_eq!(s.meta["title"], "t");
        assert_eq!(s.roots.len(), 3);
        assert_eq!(s.roots[2], NodeRef::Use("S".into()));
        assert_eq!(s.routes, vec![Route::new("Clock", "isActive", "Clock", "enabled")]);
    }

    #[test]
    fn diagnostics() {
        assert_eq!(codes("<X3D><Scene><Cylinder/></Scene></X3D>"), vec!["UNSUPPORTED_ELEMENT"]);
        assert_eq!(codes("<X3D><Scene><Group bogus='1'/></Scene></X3D>"), vec!["UNKNOWN_FIELD"]);
        assert_eq!(codes("<X3D><Scene><Group USE='G'/><Group DEF='G'/></Scene></X3D>"), vec!["USE_UNDEFINED"]);
        assert_eq!(codes("<X3D><Scene><Transform translation='a b c'/></Scene></X3D>"), vec!["FIELD_TYPE"]);
        assert_eq!(codes("<X3D><Scene><Group DEF='G'/><Group DEF='G'/></Scene></X3D>"), vec!["DUPLICATE_DEF"]);
        assert_eq!(codes("<X3D><Scene><Box/></Scene></X3D>"), vec!["NODE_NOT_ALLOWED"]);
        assert_eq!(codes("<X3D><Scene><Viewpoint><Group/></Viewpoint></Scene></X3D>"), vec!["CHILDREN_NOT_ALLOWED"]);
        assert_eq!(codes("<X3D><Scene><TimeSensor isActive='true'/></Scene></X3D>"), vec!["FIELD_ACCESS"]);
        assert_eq!(codes("<X3D><Scene><ROUTE fromNode='a'/></Scene></X3D>"), vec!["ROUTE_SYNTAX"]);
        assert_eq!(codes("<X3D/>"), vec!["MISSING_SCENE"]);
        assert_eq!(codes("<X3D><Scene><Group DEF='G'><Group USE='G'/></Group></Scene></X3D>"), vec!["USE_CYCLE"]);
        assert_eq!(codes("<X3D><Scene>"), vec!["XML_MALFORMED"]);
    }

    #[test]
    fn diagnostic_positions_lie_in_input() {
        let src = "<X3D>\n  <Scene>\n    <Transform\n       translation='0 x 0'/>\n  </Scene>\n</X3D>";
        let d = &parse_xml(src.as_bytes()).unwrap_err()[0];
        assert_eq!((d.line, d.column), (4, 21));
        let d = &parse_xml(b"<X3D><Scene>").unwrap_err()[0];
        assert!(d.line == 1 && d.column <= 12);
        let d = &parse_xml(b"<X3D>\xff</X3D>").unwrap_err()[0];
        assert_eq!((d.code, d.line, d.column), ("NOT_UTF8", 1, 6));
    }
}
