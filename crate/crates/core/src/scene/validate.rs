use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::schema::{self, FieldType};
use super::{FieldValue, Node, NodeKind, NodePath, NodeRef, PathStep, SceneGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationEntry {
    pub code: &'static str,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ValidationEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationEntry>,
    pub warnings: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error_codes(&self) -> Vec<&'static str> {
        self.errors.iter().map(|e| e.code).collect()
    }

    fn push(&mut self, severity: Severity, code: &'static str, path: impl ToString, message: String) {
        let entry = ValidationEntry { code, path: path.to_string(), message };
        match severity {
            Severity::Error => self.errors.push(entry),
            Severity::Warning => self.warnings.push(entry),
        }
    }
}

/// Checks schema conformance, DEF/USE structure, route typing, per-kind
/// value rules, and the StaticGroup rules: nothing beneath a StaticGroup
/// may be a sensor, an interpolator, or a route endpoint.
///
/// Entries are reported in document order, routes last.
pub fn validate(scene: &SceneGraph) -> ValidationReport {
    let mut v = Validator {
        report: ValidationReport::default(),
        defined: BTreeMap::new(),
        def_nodes: BTreeMap::new(),
        ancestors: Vec::new(),
        static_defs: BTreeSet::new(),
    };
    let mut path = NodePath::default();
    for (i, root) in scene.roots.iter().enumerate() {
        path.0.push(PathStep::Child(i));
        v.visit(root, None, &mut path, false, true);
        path.0.pop();
    }
    v.check_routes(scene);
    v.report
}

struct Validator<'a> {
    report: ValidationReport,
    /// DEF name -> kind, in declaration order so far.
    defined: BTreeMap<&'a str, NodeKind>,
    def_nodes: BTreeMap<&'a str, &'a Node>,
    /// DEF names of the nodes currently being visited.
    ancestors: Vec<&'a str>,
    /// DEF names instantiated somewhere beneath a StaticGroup.
    static_defs: BTreeSet<&'a str>,
}

impl<'a> Validator<'a> {
    fn err(&mut self, code: &'static str, path: &NodePath, message: String) {
        self.report.push(Severity::Error, code, path, message);
    }

    fn warn(&mut self, code: &'static str, path: &NodePath, message: String) {
        self.report.push(Severity::Warning, code, path, message);
    }

    /// `declare` is false when re-walking a USE'd subtree for the
    /// StaticGroup rules only.
    fn visit(
        &mut self,
        r: &'a NodeRef,
        slot: Option<(NodeKind, &str)>,
        path: &mut NodePath,
        in_static: bool,
        declare: bool,
    ) {
        match r {
            NodeRef::Use(name) => {
                let Some(&kind) = self.defined.get(name.as_str()) else {
                    if declare {
                        self.err("USE_UNDEFINED", path, format!("USE '{name}' has no earlier DEF"));
                    }
                    return;
                };
                if self.ancestors.contains(&name.as_str()) {
                    if declare {
                        self.err("USE_CYCLE", path, format!("USE '{name}' refers to an enclosing node"));
                    }
                    return;
                }
                if declare {
                    self.check_slot(kind, slot, path);
                }
                if in_static {
                    // walk the shared subtree again under this StaticGroup
                    let node = self.def_nodes[name.as_str()];
                    self.visit_node(node, path, true, false);
                }
            }
            NodeRef::Node(node) => {
                if declare {
                    self.check_slot(node.kind, slot, path);
                }
                self.visit_node(node, path, in_static, declare);
            }
        }
    }

    fn check_slot(&mut self, kind: NodeKind, slot: Option<(NodeKind, &str)>, path: &NodePath) {
        let ok = match slot {
            None => kind.is_child_node(),
            Some((host, field)) => schema::accepts_node(host, field, kind),
        };
        if !ok {
            let place = match slot {
                None => "the scene root".to_string(),
                Some((host, field)) => format!("{host}.{field}"),
            };
            self.err("NODE_NOT_ALLOWED", path, format!("{kind} is not allowed in {place}"));
        }
    }

    fn visit_node(&mut self, node: &'a Node, path: &mut NodePath, in_static: bool, declare: bool) {
        if let Some(name) = node.def_name.as_deref() {
            if declare {
                if name.is_empty() {
                    self.err("BAD_DEF", path, "empty DEF name".into());
                } else if self.defined.contains_key(name) {
                    self.err("DUPLICATE_DEF", path, format!("DEF '{name}' is already defined"));
                } else {
                    self.defined.insert(name, node.kind);
                    self.def_nodes.insert(name, node);
                }
            }
            if in_static {
                self.static_defs.insert(name);
            }
        }
        if in_static && (node.kind.is_sensor() || node.kind.is_interpolator()) {
            self.err(
                "STATIC_DYNAMIC_NODE",
                path,
                format!("{} may not be placed beneath a StaticGroup", node.kind),
            );
        }
        if declare {
            self.check_fields(node, path);
            self.check_kind_rules(node, path);
        }

        let child_static = in_static || node.kind == NodeKind::StaticGroup;
        if let Some(name) = node.def_name.as_deref() {
            self.ancestors.push(name);
        }
        let mut child_index = 0;
        for (slot, r) in node.node_slots() {
            let step = if slot == "children" {
                child_index += 1;
                PathStep::Child(child_index - 1)
            } else {
                PathStep::Field(slot.to_string())
            };
            path.0.push(step);
            self.visit(r, Some((node.kind, slot)), path, child_static, declare);
            path.0.pop();
        }
        if node.def_name.is_some() {
            self.ancestors.pop();
        }
    }

    fn check_fields(&mut self, node: &Node, path: &NodePath) {
        for (name, value) in &node.fields {
            let Some(spec) = schema::field(node.kind, name) else {
                self.err("UNKNOWN_FIELD", path, format!("{} has no field '{name}'", node.kind));
                continue;
            };
            if spec.ty == FieldType::MFNode {
                self.err("FIELD_TYPE", path, format!("{}.{name} is held in the children list", node.kind));
                continue;
            }
            if !value.conforms_to(spec.ty) {
                self.err(
                    "FIELD_TYPE",
                    path,
                    format!("{}.{name} expects {} but holds {}", node.kind, spec.ty.name(), value.type_name()),
                );
                continue;
            }
            if !spec.access.is_initializable() {
                self.err("FIELD_ACCESS", path, format!("{}.{name} cannot be given an initial value", node.kind));
            }
            if let Some(problem) = value.value_problem() {
                self.err("BAD_VALUE", path, format!("{}.{name}: {problem}", node.kind));
            }
        }
        if !node.kind.is_grouping() && !node.children.is_empty() {
            self.err("CHILDREN_NOT_ALLOWED", path, format!("{} cannot have children", node.kind));
        }
    }

    fn check_kind_rules(&mut self, node: &Node, path: &NodePath) {
        match node.kind {
            NodeKind::Lod => {
                let ranges = node.floats("range");
                if ranges.windows(2).any(|w| w[1] < w[0]) {
                    self.err("LOD_RANGE_ORDER", path, format!("ranges {ranges:?} are not ascending"));
                }
                if ranges.iter().any(|r| *r < 0.0) {
                    self.err("LOD_RANGE_ORDER", path, "negative range".into());
                }
                if !ranges.is_empty() && node.children.len() != ranges.len() + 1 {
                    self.err(
                        "LOD_CHILD_COUNT",
                        path,
                        format!("{} ranges need {} children, found {}", ranges.len(), ranges.len() + 1, node.children.len()),
                    );
                }
            }
            k if k.is_interpolator() => {
                let keys = node.floats("key");
                let values = match node.get("keyValue") {
                    Some(FieldValue::Vec3s(v)) => v.len(),
                    Some(FieldValue::Rotations(v)) => v.len(),
                    Some(FieldValue::Colors(v)) => v.len(),
                    _ => 0,
                };
                if keys.len() != values {
                    self.err(
                        "INTERP_LENGTH",
                        path,
                        format!("{} keys but {} keyValues", keys.len(), values),
                    );
                }
                if keys.windows(2).any(|w| w[1] < w[0]) {
                    self.err("INTERP_KEY_ORDER", path, "keys must be non-decreasing".into());
                }
                if keys.iter().any(|k| !(0.0..=1.0).contains(k)) {
                    self.err("INTERP_KEY_RANGE", path, "keys must lie in [0, 1]".into());
                }
                if keys.is_empty() {
                    self.warn("INTERP_EMPTY", path, "interpolator has no keys".into());
                }
            }
            NodeKind::TimeSensor => {
                if let Some(FieldValue::Time(c)) = node.get("cycleInterval") {
                    if c <= 0.0 {
                        self.err("TIME_CYCLE", path, format!("cycleInterval {c} must be positive"));
                    }
                }
            }
            NodeKind::ProximitySensor => {
                let size = node.vec3("size");
                if size.x < 0.0 || size.y < 0.0 || size.z < 0.0 {
                    self.err("BAD_VALUE", path, "ProximitySensor size must be non-negative".into());
                }
            }
            NodeKind::Inline if node.strings("url").is_empty() => {
                self.warn("INLINE_NO_URL", path, "Inline has no url".into());
            }
            _ => {}
        }
    }

    /// Splits `Inline.Node` style imported endpoints.
    fn imported<'n>(&self, name: &'n str) -> Option<(&'n str, &'n str)> {
        let (prefix, rest) = name.split_once('.')?;
        (self.defined.get(prefix) == Some(&NodeKind::Inline)).then_some((prefix, rest))
    }

    fn check_routes(&mut self, scene: &'a SceneGraph) {
        for (i, route) in scene.routes.iter().enumerate() {
            let path = NodePath::route(i);
            let mut ends = Vec::with_capacity(2);
            for (node_name, field_name, is_source) in
                [(&route.from_node, &route.from_field, true), (&route.to_node, &route.to_field, false)]
            {
                let kind = match self.defined.get(node_name.as_str()) {
                    Some(k) => Some(*k),
                    None => {
                        if let Some((prefix, _)) = self.imported(node_name) {
                            let static_code = if is_source { "STATIC_ROUTE_SOURCE" } else { "STATIC_ROUTE_TARGET" };
                            if self.static_defs.contains(prefix) {
                                self.report.push(
                                    Severity::Error,
                                    static_code,
                                    &path,
                                    format!("{route}: endpoint lies beneath a StaticGroup"),
                                );
                            }
                        } else {
                            self.report.push(
                                Severity::Error,
                                "ROUTE_UNKNOWN_NODE",
                                &path,
                                format!("{route}: no DEF '{node_name}'"),
                            );
                        }
                        ends.push(None);
                        continue;
                    }
                };
                let kind = kind.unwrap();
                let Some(spec) = schema::route_field(kind, field_name) else {
                    self.report.push(
                        Severity::Error,
                        "ROUTE_UNKNOWN_FIELD",
                        &path,
                        format!("{route}: {kind} has no field '{field_name}'"),
                    );
                    ends.push(None);
                    continue;
                };
                let alias_in = field_name.starts_with("set_") && field_name.as_str() != spec.name;
                let alias_out = field_name.ends_with("_changed") && field_name.as_str() != spec.name;
                if is_source && (!spec.access.emits_output() || alias_in) {
                    self.report.push(
                        Severity::Error,
                        "ROUTE_NOT_OUTPUT",
                        &path,
                        format!("{route}: {kind}.{field_name} does not emit events"),
                    );
                }
                if !is_source && (!spec.access.accepts_input() || alias_out) {
                    self.report.push(
                        Severity::Error,
                        "ROUTE_NOT_INPUT",
                        &path,
                        format!("{route}: {kind}.{field_name} does not accept events"),
                    );
                }
                if self.static_defs.contains(node_name.as_str()) {
                    let code = if is_source { "STATIC_ROUTE_SOURCE" } else { "STATIC_ROUTE_TARGET" };
                    self.report.push(
                        Severity::Error,
                        code,
                        &path,
                        format!("{route}: '{node_name}' lies beneath a StaticGroup"),
                    );
                }
                ends.push(Some(spec.ty));
            }
            if let [Some(from), Some(to)] = ends[..] {
                if from.event_type().is_none() || from.event_type() != to.event_type() {
                    self.report.push(
                        Severity::Error,
                        "ROUTE_TYPE_MISMATCH",
                        &path,
                        format!("{route}: {} cannot feed {}", from.name(), to.name()),
                    );
                }
            }
        }
    }
}
