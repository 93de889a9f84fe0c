//! In-memory scene graph for the supported X3D node subset.

mod promote;
pub mod schema;
mod stats;
mod transform;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use crate::math::{ColorRGB, Rotation, Vec3};

pub use promote::{promote_static_groups, PromoteError};
pub use schema::{Access, EventType, FieldSpec, FieldType};
pub use stats::{scene_stats, viewpoint_inventory, SceneStats, ViewpointEntry};
pub use transform::{transform_matrix, world_transform, PathError};
pub(crate) use transform::compose_transform;
pub(crate) use stats::{inline_namespace, resolve_inline};
pub use validate::{validate, Severity, ValidationEntry, ValidationReport};

macro_rules! node_kinds {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Supported node kinds. Anything else is rejected by the parsers.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum NodeKind {
            $($variant),*
        }

        impl NodeKind {
            pub const ALL: [NodeKind; node_kinds!(@count $($variant)*)] = [$(NodeKind::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(NodeKind::$variant => $name),*
                }
            }

            pub fn from_name(name: &str) -> Option<NodeKind> {
                match name {
                    $($name => Some(NodeKind::$variant),)*
                    _ => None,
                }
            }
        }
    };
    (@count) => { 0 };
    (@count $head:ident $($tail:ident)*) => { 1 + node_kinds!(@count $($tail)*) };
}

node_kinds! {
    Transform => "Transform",
    Group => "Group",
    StaticGroup => "StaticGroup",
    Lod => "LOD",
    Inline => "Inline",
    Shape => "Shape",
    Appearance => "Appearance",
    Material => "Material",
    ImageTexture => "ImageTexture",
    Box => "Box",
    IndexedFaceSet => "IndexedFaceSet",
    Coordinate => "Coordinate",
    Viewpoint => "Viewpoint",
    NavigationInfo => "NavigationInfo",
    Background => "Background",
    SpotLight => "SpotLight",
    TimeSensor => "TimeSensor",
    TouchSensor => "TouchSensor",
    ProximitySensor => "ProximitySensor",
    PositionInterpolator => "PositionInterpolator",
    OrientationInterpolator => "OrientationInterpolator",
    ColorInterpolator => "ColorInterpolator",
    Sound => "Sound",
    AudioClip => "AudioClip",
    WorldInfo => "WorldInfo",
}

impl NodeKind {
    pub fn is_grouping(self) -> bool {
        matches!(self, NodeKind::Transform | NodeKind::Group | NodeKind::StaticGroup | NodeKind::Lod)
    }

    /// Whether the kind may appear in a `children` list.
    pub fn is_child_node(self) -> bool {
        !matches!(
            self,
            NodeKind::Appearance
                | NodeKind::Material
                | NodeKind::ImageTexture
                | NodeKind::Box
                | NodeKind::IndexedFaceSet
                | NodeKind::Coordinate
                | NodeKind::AudioClip
        )
    }

    pub fn is_sensor(self) -> bool {
        matches!(self, NodeKind::TimeSensor | NodeKind::TouchSensor | NodeKind::ProximitySensor)
    }

    pub fn is_interpolator(self) -> bool {
        matches!(
            self,
            NodeKind::PositionInterpolator | NodeKind::OrientationInterpolator | NodeKind::ColorInterpolator
        )
    }

    /// Field a node of this kind lands in when nested without an explicit
    /// `containerField`.
    pub fn default_container(self) -> &'static str {
        match self {
            NodeKind::Appearance => "appearance",
            NodeKind::Material => "material",
            NodeKind::ImageTexture => "texture",
            NodeKind::Box | NodeKind::IndexedFaceSet => "geometry",
            NodeKind::Coordinate => "coord",
            NodeKind::AudioClip => "source",
            _ => "children",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A node occurrence: either a node defined in place or a `USE` of an
/// earlier `DEF`.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeRef {
    Node(std::boxed::Box<Node>),
    Use(String),
}

impl NodeRef {
    pub fn node(node: Node) -> Self {
        NodeRef::Node(std::boxed::Box::new(node))
    }

    pub fn as_node(&self) -> Option<&Node> {
        match self {
            NodeRef::Node(n) => Some(n),
            NodeRef::Use(_) => None,
        }
    }
}

impl From<Node> for NodeRef {
    fn from(n: Node) -> Self {
        NodeRef::node(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Bool(bool),
    Int(i32),
    Float(f64),
    Time(f64),
    String(String),
    Vec3(Vec3),
    Rotation(Rotation),
    Color(ColorRGB),
    Bools(Vec<bool>),
    Ints(Vec<i32>),
    Floats(Vec<f64>),
    Times(Vec<f64>),
    Strings(Vec<String>),
    Vec3s(Vec<Vec3>),
    Rotations(Vec<Rotation>),
    Colors(Vec<ColorRGB>),
    Node(NodeRef),
}

impl FieldValue {
    pub fn conforms_to(&self, ty: FieldType) -> bool {
        matches!(
            (self, ty),
            (FieldValue::Bool(_), FieldType::SFBool)
                | (FieldValue::Int(_), FieldType::SFInt32)
                | (FieldValue::Float(_), FieldType::SFFloat)
                | (FieldValue::Time(_), FieldType::SFTime)
                | (FieldValue::String(_), FieldType::SFString)
                | (FieldValue::Vec3(_), FieldType::SFVec3f)
                | (FieldValue::Rotation(_), FieldType::SFRotation)
                | (FieldValue::Color(_), FieldType::SFColor)
                | (FieldValue::Bools(_), FieldType::MFBool)
                | (FieldValue::Ints(_), FieldType::MFInt32)
                | (FieldValue::Floats(_), FieldType::MFFloat)
                | (FieldValue::Times(_), FieldType::MFTime)
                | (FieldValue::Strings(_), FieldType::MFString)
                | (FieldValue::Vec3s(_), FieldType::MFVec3f)
                | (FieldValue::Rotations(_), FieldType::MFRotation)
                | (FieldValue::Colors(_), FieldType::MFColor)
                | (FieldValue::Node(_), FieldType::SFNode)
        )
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            FieldValue::Bool(_) => "SFBool",
            FieldValue::Int(_) => "SFInt32",
            FieldValue::Float(_) => "SFFloat",
            FieldValue::Time(_) => "SFTime",
            FieldValue::String(_) => "SFString",
            FieldValue::Vec3(_) => "SFVec3f",
            FieldValue::Rotation(_) => "SFRotation",
            FieldValue::Color(_) => "SFColor",
            FieldValue::Bools(_) => "MFBool",
            FieldValue::Ints(_) => "MFInt32",
            FieldValue::Floats(_) => "MFFloat",
            FieldValue::Times(_) => "MFTime",
            FieldValue::Strings(_) => "MFString",
            FieldValue::Vec3s(_) => "MFVec3f",
            FieldValue::Rotations(_) => "MFRotation",
            FieldValue::Colors(_) => "MFColor",
            FieldValue::Node(_) => "SFNode",
        }
    }

    /// First non-finite or out-of-range scalar, as a message.
    pub(crate) fn value_problem(&self) -> Option<String> {
        fn reals<'a>(v: &'a FieldValue) -> Box<dyn Iterator<Item = f64> + 'a> {
            match v {
                FieldValue::Float(x) | FieldValue::Time(x) => Box::new(std::iter::once(*x)),
                FieldValue::Vec3(p) => Box::new(p.to_array().into_iter()),
                FieldValue::Rotation(r) => Box::new(r.to_array().into_iter()),
                FieldValue::Color(c) => Box::new(c.to_array().into_iter()),
                FieldValue::Floats(v) | FieldValue::Times(v) => Box::new(v.iter().copied()),
                FieldValue::Vec3s(v) => Box::new(v.iter().flat_map(|p| p.to_array())),
                FieldValue::Rotations(v) => Box::new(v.iter().flat_map(|r| r.to_array())),
                FieldValue::Colors(v) => Box::new(v.iter().flat_map(|c| c.to_array())),
                _ => Box::new(std::iter::empty()),
            }
        }
        if let Some(bad) = reals(self).find(|x| !x.is_finite()) {
            return Some(format!("non-finite value {bad}"));
        }
        let colors: Vec<ColorRGB> = match self {
            FieldValue::Color(c) => vec![*c],
            FieldValue::Colors(v) => v.clone(),
            _ => Vec::new(),
        };
        if let Some(c) = colors.iter().find(|c| !c.in_range()) {
            return Some(format!("color ({}, {}, {}) outside [0, 1]", c.r, c.g, c.b));
        }
        let rotations: Vec<Rotation> = match self {
            FieldValue::Rotation(r) => vec![*r],
            FieldValue::Rotations(v) => v.clone(),
            _ => Vec::new(),
        };
        if let Some(r) = rotations.iter().find(|r| (r.axis().length() - 1.0).abs() > 1e-9) {
            return Some(format!("rotation axis {} is not unit length", r.axis()));
        }
        None
    }
}

/// One node. `fields` holds the explicitly specified values; anything
/// absent takes the schema default.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub def_name: Option<String>,
    pub fields: BTreeMap<String, FieldValue>,
    pub children: Vec<NodeRef>,
}

impl Node {
    pub fn new(kind: NodeKind) -> Self {
        Node { kind, def_name: None, fields: BTreeMap::new(), children: Vec::new() }
    }

    pub fn def(mut self, name: impl Into<String>) -> Self {
        self.def_name = Some(name.into());
        self
    }

    pub fn with(mut self, field: &str, value: FieldValue) -> Self {
        self.fields.insert(field.to_string(), value);
        self
    }

    pub fn child(mut self, child: impl Into<NodeRef>) -> Self {
        self.children.push(child.into());
        self
    }

    pub fn set(&mut self, field: &str, value: FieldValue) {
        self.fields.insert(field.to_string(), value);
    }

    /// Effective value: explicit value or schema default.
    pub fn get(&self, field: &str) -> Option<FieldValue> {
        if let Some(v) = self.fields.get(field) {
            return Some(v.clone());
        }
        schema::field(self.kind, field)?.default_value()
    }

    pub fn vec3(&self, field: &str) -> Vec3 {
        match self.get(field) {
            Some(FieldValue::Vec3(v)) => v,
            _ => Vec3::ZERO,
        }
    }

    pub fn rotation(&self, field: &str) -> Rotation {
        match self.get(field) {
            Some(FieldValue::Rotation(r)) => r,
            _ => Rotation::IDENTITY,
        }
    }

    pub fn floats(&self, field: &str) -> Vec<f64> {
        match self.get(field) {
            Some(FieldValue::Floats(v)) => v,
            _ => Vec::new(),
        }
    }

    pub fn strings(&self, field: &str) -> Vec<String> {
        match self.get(field) {
            Some(FieldValue::Strings(v)) => v,
            _ => Vec::new(),
        }
    }

    pub fn string(&self, field: &str) -> String {
        match self.get(field) {
            Some(FieldValue::String(s)) => s,
            _ => String::new(),
        }
    }

    /// Node-valued fields in schema order, followed by children.
    pub fn node_slots(&self) -> impl Iterator<Item = (&str, &NodeRef)> {
        schema::fields(self.kind)
            .iter()
            .filter(|s| s.ty == FieldType::SFNode)
            .filter_map(|s| match self.fields.get(s.name) {
                Some(FieldValue::Node(r)) => Some((s.name, r)),
                _ => None,
            })
            .chain(self.children.iter().map(|c| ("children", c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Route {
    pub from_node: String,
    pub from_field: String,
    pub to_node: String,
    pub to_field: String,
}

impl Route {
    pub fn new(from_node: &str, from_field: &str, to_node: &str, to_field: &str) -> Self {
        Route {
            from_node: from_node.to_string(),
            from_field: from_field.to_string(),
            to_node: to_node.to_string(),
            to_field: to_field.to_string(),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} -> {}.{}", self.from_node, self.from_field, self.to_node, self.to_field)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub level: u32,
}

pub const DEFAULT_PROFILE: &str = "Immersive";
pub const DEFAULT_VERSION: &str = "3.3";

#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub profile: String,
    pub version: String,
    pub components: Vec<Component>,
    /// `<meta name=... content=...>` pairs from the header.
    pub meta: BTreeMap<String, String>,
    pub roots: Vec<NodeRef>,
    pub routes: Vec<Route>,
}

impl Default for SceneGraph {
    fn default() -> Self {
        SceneGraph::new()
    }
}

impl SceneGraph {
    pub fn new() -> Self {
        SceneGraph {
            profile: DEFAULT_PROFILE.to_string(),
            version: DEFAULT_VERSION.to_string(),
            components: Vec::new(),
            meta: BTreeMap::new(),
            roots: Vec::new(),
            routes: Vec::new(),
        }
    }

    pub fn with_root(mut self, node: impl Into<NodeRef>) -> Self {
        self.roots.push(node.into());
        self
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.routes.push(route);
        self
    }

    /// All DEF'd nodes in document order.
    pub fn defs(&self) -> BTreeMap<&str, &Node> {
        let mut out = BTreeMap::new();
        self.walk_defined(&mut |node, _| {
            if let Some(name) = &node.def_name {
                out.entry(name.as_str()).or_insert(node);
            }
        });
        out
    }

    pub fn find_def(&self, name: &str) -> Option<&Node> {
        let mut found = None;
        self.walk_defined(&mut |node, _| {
            if found.is_none() && node.def_name.as_deref() == Some(name) {
                found = Some(node);
            }
        });
        found
    }

    /// Path of the defining occurrence of a DEF name.
    pub fn path_of_def(&self, name: &str) -> Option<NodePath> {
        let mut found = None;
        self.walk_defined(&mut |node, path| {
            if found.is_none() && node.def_name.as_deref() == Some(name) {
                found = Some(path.clone());
            }
        });
        found
    }

    /// Visits every node written in place (not USE occurrences), preorder,
    /// including nodes held in node-valued fields.
    pub fn walk_defined<'a>(&'a self, f: &mut dyn FnMut(&'a Node, &NodePath)) {
        fn go<'a>(node: &'a Node, path: &mut NodePath, f: &mut dyn FnMut(&'a Node, &NodePath)) {
            f(node, path);
            let mut child_index = 0;
            for (slot, r) in node.node_slots() {
                let step = if slot == "children" {
                    child_index += 1;
                    PathStep::Child(child_index - 1)
                } else {
                    PathStep::Field(slot.to_string())
                };
                if let NodeRef::Node(n) = r {
                    path.0.push(step);
                    go(n, path, f);
                    path.0.pop();
                }
            }
        }
        let mut path = NodePath::default();
        for (i, r) in self.roots.iter().enumerate() {
            if let NodeRef::Node(n) = r {
                path.0.push(PathStep::Child(i));
                go(n, &mut path, f);
                path.0.pop();
            }
        }
    }

    /// Total number of nodes written in place.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk_defined(&mut |_, _| n += 1);
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathStep {
    Child(usize),
    Field(String),
}

/// Address of a node occurrence: indices through root/children lists and
/// names of node-valued fields. A step through a `USE` continues into the
/// referenced node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<PathStep>);

impl NodePath {
    pub fn children(indices: &[usize]) -> Self {
        NodePath(indices.iter().map(|i| PathStep::Child(*i)).collect())
    }

    pub fn route(index: usize) -> String {
        format!("ROUTE[{index}]")
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for step in &self.0 {
            match step {
                PathStep::Child(i) => write!(f, "/{i}")?,
                PathStep::Field(name) => write!(f, "/{name}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for NodePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let steps = s
            .split('/')
            .filter(|p| !p.is_empty())
            .map(|p| match p.parse::<usize>() {
                Ok(i) => PathStep::Child(i),
                Err(_) => PathStep::Field(p.to_string()),
            })
            .collect();
        Ok(NodePath(steps))
    }
}

/// Looks up nodes by `Inline` URL.
pub trait InlineResolver {
    fn resolve(&self, url: &str) -> Option<std::sync::Arc<SceneGraph>>;
}

/// Resolver that knows no files.
pub struct NoInlines;

impl InlineResolver for NoInlines {
    fn resolve(&self, _url: &str) -> Option<std::sync::Arc<SceneGraph>> {
        None
    }
}

impl InlineResolver for BTreeMap<String, std::sync::Arc<SceneGraph>> {
    fn resolve(&self, url: &str) -> Option<std::sync::Arc<SceneGraph>> {
        self.get(url).cloned()
    }
}
