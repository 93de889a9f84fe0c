//! Closed per-kind field schema shared by both codecs and the validator.
//!
//! Field order in each table is the canonical attribute order for XML and
//! the field-id numbering for the binary encoding. Never reorder entries:
//! field ids are part of the `.s3db` format.

use crate::math::{ColorRGB, Rotation, Vec3};

use super::{FieldValue, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldType {
    SFBool,
    SFInt32,
    SFFloat,
    SFTime,
    SFString,
    SFVec3f,
    SFRotation,
    SFColor,
    MFBool,
    MFInt32,
    MFFloat,
    MFTime,
    MFString,
    MFVec3f,
    MFRotation,
    MFColor,
    SFNode,
    MFNode,
}

impl FieldType {
    pub fn name(self) -> &'static str {
        match self {
            FieldType::SFBool => "SFBool",
            FieldType::SFInt32 => "SFInt32",
            FieldType::SFFloat => "SFFloat",
            FieldType::SFTime => "SFTime",
            FieldType::SFString => "SFString",
            FieldType::SFVec3f => "SFVec3f",
            FieldType::SFRotation => "SFRotation",
            FieldType::SFColor => "SFColor",
            FieldType::MFBool => "MFBool",
            FieldType::MFInt32 => "MFInt32",
            FieldType::MFFloat => "MFFloat",
            FieldType::MFTime => "MFTime",
            FieldType::MFString => "MFString",
            FieldType::MFVec3f => "MFVec3f",
            FieldType::MFRotation => "MFRotation",
            FieldType::MFColor => "MFColor",
            FieldType::SFNode => "SFNode",
            FieldType::MFNode => "MFNode",
        }
    }

    /// Event type carried by a route on a field of this type. Node-valued
    /// fields do not participate in routing within this subset.
    pub fn event_type(self) -> Option<EventType> {
        use EventType::*;
        Some(match self {
            FieldType::SFBool => Bool,
            FieldType::SFInt32 => Int32,
            FieldType::SFFloat => Float,
            FieldType::SFTime => Time,
            FieldType::SFString => String,
            FieldType::SFVec3f => Vec3,
            FieldType::SFRotation => Rotation,
            FieldType::SFColor => Color,
            FieldType::MFBool => Bools,
            FieldType::MFInt32 => Int32s,
            FieldType::MFFloat => Floats,
            FieldType::MFTime => Times,
            FieldType::MFString => Strings,
            FieldType::MFVec3f => Vec3s,
            FieldType::MFRotation => Rotations,
            FieldType::MFColor => Colors,
            FieldType::SFNode | FieldType::MFNode => return None,
        })
    }
}

/// Types an event may carry along a route. A route is well-typed iff both
/// endpoints carry the same event type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventType {
    Bool,
    Int32,
    Float,
    Time,
    String,
    Vec3,
    Rotation,
    Color,
    Bools,
    Int32s,
    Floats,
    Times,
    Strings,
    Vec3s,
    Rotations,
    Colors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    InitializeOnly,
    InputOnly,
    OutputOnly,
    InputOutput,
}

impl Access {
    pub fn accepts_input(self) -> bool {
        matches!(self, Access::InputOnly | Access::InputOutput)
    }

    pub fn emits_output(self) -> bool {
        matches!(self, Access::OutputOnly | Access::InputOutput)
    }

    /// Whether a value may be written in the file (as opposed to arriving
    /// only through events).
    pub fn is_initializable(self) -> bool {
        matches!(self, Access::InitializeOnly | Access::InputOutput)
    }
}

/// Compile-time default for a field.
#[derive(Debug, Clone, Copy)]
pub enum DefaultValue {
    Bool(bool),
    Int(i32),
    Float(f64),
    Time(f64),
    Str(&'static str),
    Vec3(f64, f64, f64),
    Rotation(f64, f64, f64, f64),
    Color(f64, f64, f64),
    Floats(&'static [f64]),
    Strings(&'static [&'static str]),
    Colors(&'static [[f64; 3]]),
    /// Empty list, or no node for node-valued fields.
    Empty,
}

#[derive(Debug, Clone, Copy)]
pub struct FieldSpec {
    pub name: &'static str,
    pub ty: FieldType,
    pub access: Access,
    pub default: DefaultValue,
}

impl FieldSpec {
    /// Default value, or `None` for node-valued fields and event-only fields.
    pub fn default_value(&self) -> Option<FieldValue> {
        Some(match (self.ty, self.default) {
            (_, DefaultValue::Bool(b)) => FieldValue::Bool(b),
            (_, DefaultValue::Int(i)) => FieldValue::Int(i),
            (_, DefaultValue::Float(f)) => FieldValue::Float(f),
            (_, DefaultValue::Time(t)) => FieldValue::Time(t),
            (_, DefaultValue::Str(s)) => FieldValue::String(s.to_string()),
            (_, DefaultValue::Vec3(x, y, z)) => FieldValue::Vec3(Vec3::new(x, y, z)),
            (_, DefaultValue::Rotation(x, y, z, a)) => {
                FieldValue::Rotation(Rotation::new(Vec3::new(x, y, z), a).ok()?)
            }
            (_, DefaultValue::Color(r, g, b)) => FieldValue::Color(ColorRGB::rgb(r, g, b)),
            (_, DefaultValue::Floats(v)) => FieldValue::Floats(v.to_vec()),
            (_, DefaultValue::Strings(v)) => FieldValue::Strings(v.iter().map(|s| s.to_string()).collect()),
            (_, DefaultValue::Colors(v)) => {
                FieldValue::Colors(v.iter().map(|c| ColorRGB::rgb(c[0], c[1], c[2])).collect())
            }
            (FieldType::SFBool, DefaultValue::Empty) => FieldValue::Bool(false),
            (FieldType::SFTime, DefaultValue::Empty) => FieldValue::Time(0.0),
            (FieldType::SFFloat, DefaultValue::Empty) => FieldValue::Float(0.0),
            (FieldType::SFInt32, DefaultValue::Empty) => FieldValue::Int(0),
            (FieldType::SFVec3f, DefaultValue::Empty) => FieldValue::Vec3(Vec3::ZERO),
            (FieldType::SFRotation, DefaultValue::Empty) => FieldValue::Rotation(Rotation::IDENTITY),
            (FieldType::SFColor, DefaultValue::Empty) => FieldValue::Color(ColorRGB::BLACK),
            (FieldType::SFString, DefaultValue::Empty) => FieldValue::String(String::new()),
            (FieldType::MFBool, DefaultValue::Empty) => FieldValue::Bools(Vec::new()),
            (FieldType::MFInt32, DefaultValue::Empty) => FieldValue::Ints(Vec::new()),
            (FieldType::MFFloat, DefaultValue::Empty) => FieldValue::Floats(Vec::new()),
            (FieldType::MFTime, DefaultValue::Empty) => FieldValue::Times(Vec::new()),
            (FieldType::MFString, DefaultValue::Empty) => FieldValue::Strings(Vec::new()),
            (FieldType::MFVec3f, DefaultValue::Empty) => FieldValue::Vec3s(Vec::new()),
            (FieldType::MFRotation, DefaultValue::Empty) => FieldValue::Rotations(Vec::new()),
            (FieldType::MFColor, DefaultValue::Empty) => FieldValue::Colors(Vec::new()),
            (FieldType::SFNode | FieldType::MFNode, DefaultValue::Empty) => return None,
        })
    }
}

const fn f(name: &'static str, ty: FieldType, access: Access, default: DefaultValue) -> FieldSpec {
    FieldSpec { name, ty, access, default }
}

use Access::{InitializeOnly as Init, InputOnly as In, InputOutput as InOut, OutputOnly as Out};
use DefaultValue as D;
use FieldType as T;

const CHILDREN: FieldSpec = f("children", T::MFNode, InOut, D::Empty);

static TRANSFORM: &[FieldSpec] = &[
    f("translation", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    f("rotation", T::SFRotation, InOut, D::Rotation(0.0, 0.0, 1.0, 0.0)),
    f("scale", T::SFVec3f, InOut, D::Vec3(1.0, 1.0, 1.0)),
    f("scaleOrientation", T::SFRotation, InOut, D::Rotation(0.0, 0.0, 1.0, 0.0)),
    f("center", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    CHILDREN,
];

static GROUP: &[FieldSpec] = &[CHILDREN];

static STATIC_GROUP: &[FieldSpec] = &[f("children", T::MFNode, Init, D::Empty)];

static LOD: &[FieldSpec] = &[
    f("center", T::SFVec3f, Init, D::Vec3(0.0, 0.0, 0.0)),
    f("range", T::MFFloat, Init, D::Empty),
    f("level_changed", T::SFInt32, Out, D::Int(0)),
    CHILDREN,
];

static INLINE: &[FieldSpec] = &[
    f("url", T::MFString, InOut, D::Empty),
    f("load", T::SFBool, InOut, D::Bool(true)),
];

static SHAPE: &[FieldSpec] = &[
    f("appearance", T::SFNode, InOut, D::Empty),
    f("geometry", T::SFNode, InOut, D::Empty),
];

static APPEARANCE: &[FieldSpec] = &[
    f("material", T::SFNode, InOut, D::Empty),
    f("texture", T::SFNode, InOut, D::Empty),
];

static MATERIAL: &[FieldSpec] = &[
    f("diffuseColor", T::SFColor, InOut, D::Color(0.8, 0.8, 0.8)),
    f("emissiveColor", T::SFColor, InOut, D::Color(0.0, 0.0, 0.0)),
    f("specularColor", T::SFColor, InOut, D::Color(0.0, 0.0, 0.0)),
    f("ambientIntensity", T::SFFloat, InOut, D::Float(0.2)),
    f("shininess", T::SFFloat, InOut, D::Float(0.2)),
    f("transparency", T::SFFloat, InOut, D::Float(0.0)),
];

static IMAGE_TEXTURE: &[FieldSpec] = &[
    f("url", T::MFString, InOut, D::Empty),
    f("repeatS", T::SFBool, Init, D::Bool(true)),
    f("repeatT", T::SFBool, Init, D::Bool(true)),
];

static BOX: &[FieldSpec] = &[
    f("size", T::SFVec3f, Init, D::Vec3(2.0, 2.0, 2.0)),
    f("solid", T::SFBool, Init, D::Bool(true)),
];

static INDEXED_FACE_SET: &[FieldSpec] = &[
    f("coord", T::SFNode, InOut, D::Empty),
    f("coordIndex", T::MFInt32, Init, D::Empty),
    f("solid", T::SFBool, Init, D::Bool(true)),
    f("ccw", T::SFBool, Init, D::Bool(true)),
    f("convex", T::SFBool, Init, D::Bool(true)),
    f("creaseAngle", T::SFFloat, Init, D::Float(0.0)),
];

static COORDINATE: &[FieldSpec] = &[f("point", T::MFVec3f, InOut, D::Empty)];

// defaults as the standard writes them
#[allow(clippy::approx_constant)]
static VIEWPOINT: &[FieldSpec] = &[
    f("description", T::SFString, InOut, D::Str("")),
    f("position", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 10.0)),
    f("orientation", T::SFRotation, InOut, D::Rotation(0.0, 0.0, 1.0, 0.0)),
    f("fieldOfView", T::SFFloat, InOut, D::Float(0.7854)),
    f("jump", T::SFBool, InOut, D::Bool(true)),
    f("set_bind", T::SFBool, In, D::Empty),
    f("isBound", T::SFBool, Out, D::Empty),
    f("bindTime", T::SFTime, Out, D::Empty),
];

static NAVIGATION_INFO: &[FieldSpec] = &[
    f("type", T::MFString, InOut, D::Strings(&["EXAMINE", "ANY"])),
    f("speed", T::SFFloat, InOut, D::Float(1.0)),
    f("headlight", T::SFBool, InOut, D::Bool(true)),
    f("avatarSize", T::MFFloat, InOut, D::Floats(&[0.25, 1.6, 0.75])),
];

static BACKGROUND: &[FieldSpec] = &[
    f("skyColor", T::MFColor, InOut, D::Colors(&[[0.0, 0.0, 0.0]])),
    f("skyAngle", T::MFFloat, InOut, D::Empty),
    f("groundColor", T::MFColor, InOut, D::Empty),
    f("groundAngle", T::MFFloat, InOut, D::Empty),
];

// defaults as the standard writes them
#[allow(clippy::approx_constant)]
static SPOT_LIGHT: &[FieldSpec] = &[
    f("on", T::SFBool, InOut, D::Bool(true)),
    f("color", T::SFColor, InOut, D::Color(1.0, 1.0, 1.0)),
    f("intensity", T::SFFloat, InOut, D::Float(1.0)),
    f("ambientIntensity", T::SFFloat, InOut, D::Float(0.0)),
    f("location", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    f("direction", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, -1.0)),
    f("attenuation", T::SFVec3f, InOut, D::Vec3(1.0, 0.0, 0.0)),
    f("beamWidth", T::SFFloat, InOut, D::Float(0.7854)),
    f("cutOffAngle", T::SFFloat, InOut, D::Float(1.5708)),
    f("radius", T::SFFloat, InOut, D::Float(100.0)),
];

static TIME_SENSOR: &[FieldSpec] = &[
    f("enabled", T::SFBool, InOut, D::Bool(true)),
    f("cycleInterval", T::SFTime, InOut, D::Time(1.0)),
    f("loop", T::SFBool, InOut, D::Bool(false)),
    f("startTime", T::SFTime, InOut, D::Time(0.0)),
    f("stopTime", T::SFTime, InOut, D::Time(0.0)),
    f("cycleTime", T::SFTime, Out, D::Empty),
    f("fraction_changed", T::SFFloat, Out, D::Empty),
    f("isActive", T::SFBool, Out, D::Empty),
    f("time", T::SFTime, Out, D::Empty),
];

static TOUCH_SENSOR: &[FieldSpec] = &[
    f("description", T::SFString, InOut, D::Str("")),
    f("enabled", T::SFBool, InOut, D::Bool(true)),
    f("isActive", T::SFBool, Out, D::Empty),
    f("isOver", T::SFBool, Out, D::Empty),
    f("touchTime", T::SFTime, Out, D::Empty),
];

static PROXIMITY_SENSOR: &[FieldSpec] = &[
    f("enabled", T::SFBool, InOut, D::Bool(true)),
    f("center", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    f("size", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    f("enterTime", T::SFTime, Out, D::Empty),
    f("exitTime", T::SFTime, Out, D::Empty),
    f("isActive", T::SFBool, Out, D::Empty),
    f("position_changed", T::SFVec3f, Out, D::Empty),
    f("orientation_changed", T::SFRotation, Out, D::Empty),
];

static POSITION_INTERPOLATOR: &[FieldSpec] = &[
    f("key", T::MFFloat, InOut, D::Empty),
    f("keyValue", T::MFVec3f, InOut, D::Empty),
    f("set_fraction", T::SFFloat, In, D::Empty),
    f("value_changed", T::SFVec3f, Out, D::Empty),
];

static ORIENTATION_INTERPOLATOR: &[FieldSpec] = &[
    f("key", T::MFFloat, InOut, D::Empty),
    f("keyValue", T::MFRotation, InOut, D::Empty),
    f("set_fraction", T::SFFloat, In, D::Empty),
    f("value_changed", T::SFRotation, Out, D::Empty),
];

static COLOR_INTERPOLATOR: &[FieldSpec] = &[
    f("key", T::MFFloat, InOut, D::Empty),
    f("keyValue", T::MFColor, InOut, D::Empty),
    f("set_fraction", T::SFFloat, In, D::Empty),
    f("value_changed", T::SFColor, Out, D::Empty),
];

static SOUND: &[FieldSpec] = &[
    f("source", T::SFNode, InOut, D::Empty),
    f("location", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 0.0)),
    f("direction", T::SFVec3f, InOut, D::Vec3(0.0, 0.0, 1.0)),
    f("intensity", T::SFFloat, InOut, D::Float(1.0)),
    f("minFront", T::SFFloat, InOut, D::Float(1.0)),
    f("maxFront", T::SFFloat, InOut, D::Float(10.0)),
    f("minBack", T::SFFloat, InOut, D::Float(1.0)),
    f("maxBack", T::SFFloat, InOut, D::Float(10.0)),
    f("spatialize", T::SFBool, Init, D::Bool(true)),
];

static AUDIO_CLIP: &[FieldSpec] = &[
    f("description", T::SFString, InOut, D::Str("")),
    f("url", T::MFString, InOut, D::Empty),
    f("loop", T::SFBool, InOut, D::Bool(false)),
    f("pitch", T::SFFloat, InOut, D::Float(1.0)),
    f("startTime", T::SFTime, InOut, D::Time(0.0)),
    f("stopTime", T::SFTime, InOut, D::Time(0.0)),
];

static WORLD_INFO: &[FieldSpec] = &[
    f("title", T::SFString, Init, D::Str("")),
    f("info", T::MFString, Init, D::Empty),
];

/// Field table for a node kind, in canonical order.
pub fn fields(kind: NodeKind) -> &'static [FieldSpec] {
    match kind {
        NodeKind::Transform => TRANSFORM,
        NodeKind::Group => GROUP,
        NodeKind::StaticGroup => STATIC_GROUP,
        NodeKind::Lod => LOD,
        NodeKind::Inline => INLINE,
        NodeKind::Shape => SHAPE,
        NodeKind::Appearance => APPEARANCE,
        NodeKind::Material => MATERIAL,
        NodeKind::ImageTexture => IMAGE_TEXTURE,
        NodeKind::Box => BOX,
        NodeKind::IndexedFaceSet => INDEXED_FACE_SET,
        NodeKind::Coordinate => COORDINATE,
        NodeKind::Viewpoint => VIEWPOINT,
        NodeKind::NavigationInfo => NAVIGATION_INFO,
        NodeKind::Background => BACKGROUND,
        NodeKind::SpotLight => SPOT_LIGHT,
        NodeKind::TimeSensor => TIME_SENSOR,
        NodeKind::TouchSensor => TOUCH_SENSOR,
        NodeKind::ProximitySensor => PROXIMITY_SENSOR,
        NodeKind::PositionInterpolator => POSITION_INTERPOLATOR,
        NodeKind::OrientationInterpolator => ORIENTATION_INTERPOLATOR,
        NodeKind::ColorInterpolator => COLOR_INTERPOLATOR,
        NodeKind::Sound => SOUND,
        NodeKind::AudioClip => AUDIO_CLIP,
        NodeKind::WorldInfo => WORLD_INFO,
    }
}

pub fn field(kind: NodeKind, name: &str) -> Option<&'static FieldSpec> {
    fields(kind).iter().find(|f| f.name == name)
}

pub fn field_index(kind: NodeKind, name: &str) -> Option<usize> {
    fields(kind).iter().position(|f| f.name == name)
}

/// Resolves a route endpoint name, accepting the `set_x` / `x_changed`
/// aliases of input-output fields. Returns the canonical field.
pub fn route_field(kind: NodeKind, name: &str) -> Option<&'static FieldSpec> {
    if let Some(spec) = field(kind, name) {
        return Some(spec);
    }
    let base = name
        .strip_prefix("set_")
        .or_else(|| name.strip_suffix("_changed"))?;
    field(kind, base).filter(|s| s.access == Access::InputOutput)
}

/// Kinds accepted in a node-valued field.
pub fn accepts_node(kind: NodeKind, field: &str, child: NodeKind) -> bool {
    match (kind, field) {
        (_, "children") => kind.is_grouping() && child.is_child_node(),
        (NodeKind::Shape, "appearance") => child == NodeKind::Appearance,
        (NodeKind::Shape, "geometry") => matches!(child, NodeKind::Box | NodeKind::IndexedFaceSet),
        (NodeKind::Appearance, "material") => child == NodeKind::Material,
        (NodeKind::Appearance, "texture") => child == NodeKind::ImageTexture,
        (NodeKind::IndexedFaceSet, "coord") => child == NodeKind::Coordinate,
        (NodeKind::Sound, "source") => child == NodeKind::AudioClip,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_matches_its_type() {
        for kind in NodeKind::ALL {
            for spec in fields(kind) {
                if let Some(v) = spec.default_value() {
                    assert!(v.conforms_to(spec.ty), "{}.{}", kind.name(), spec.name);
                }
            }
        }
    }

    #[test]
    fn field_tables_fit_in_a_byte_and_are_unique() {
        for kind in NodeKind::ALL {
            let table = fields(kind);
            assert!(table.len() < 256);
            for (i, a) in table.iter().enumerate() {
                assert!(table[i + 1..].iter().all(|b| b.name != a.name));
            }
        }
    }

    #[test]
    fn route_aliases() {
        let t = route_field(NodeKind::Transform, "set_translation").unwrap();
        assert_eq!(t.name, "translation");
        assert_eq!(route_field(NodeKind::Transform, "translation_changed").unwrap().name, "translation");
        assert!(route_field(NodeKind::PositionInterpolator, "fraction").is_none());
        assert_eq!(route_field(NodeKind::PositionInterpolator, "set_fraction").unwrap().name, "set_fraction");
    }

    #[test]
    fn default_container_is_accepted() {
        for kind in NodeKind::ALL {
            let container = kind.default_container();
            let hosts: Vec<_> = NodeKind::ALL
                .into_iter()
                .filter(|host| accepts_node(*host, container, kind))
                .collect();
            assert!(!hosts.is_empty(), "{} has no host", kind.name());
        }
    }
}
