//! Seeded generator of random valid scenes, for round-trip and fuzz tests.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{ColorRGB, Rotation, Vec3};
use crate::scene::schema::{self, accepts_node};
use crate::scene::{Component, FieldType, FieldValue, Node, NodeKind, NodeRef, Route, SceneGraph};

/// Size limits for [`random_scene`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSceneOptions {
    pub max_roots: usize,
    pub max_depth: usize,
    pub max_children: usize,
    pub max_list: usize,
    pub max_routes: usize,
}

impl Default for RandomSceneOptions {
    fn default() -> Self {
        RandomSceneOptions { max_roots: 6, max_depth: 4, max_children: 4, max_list: 12, max_routes: 8 }
    }
}

/// A scene from `seed` that validates with no errors.
pub fn random_scene_from_seed(seed: u64, opts: RandomSceneOptions) -> SceneGraph {
    random_scene(&mut ChaCha8Rng::seed_from_u64(seed), opts)
}

pub fn random_scene<R: Rng + ?Sized>(rng: &mut R, opts: RandomSceneOptions) -> SceneGraph {
    let mut g = Gen { rng, opts, defs: Vec::new(), next_def: 0 };
    let mut scene = SceneGraph::new();
    if g.rng.random_bool(0.3) {
        scene.components.push(Component { name: g.word(), level: g.rng.random_range(1..5) });
    }
    if g.rng.random_bool(0.3) {
        let (k, v) = (g.word(), g.text());
        scene.meta.insert(k, v);
    }
    let roots = g.rng.random_range(1..=opts.max_roots);
    for _ in 0..roots {
        let r = g.child_ref(0, false, &mut Vec::new());
        scene.roots.push(r);
    }
    let fixed = static_defs(&scene);
    for d in &mut g.defs {
        d.in_static |= fixed.contains(&d.name);
    }
    scene.routes = g.routes();
    scene
}

/// DEF names that end up beneath a StaticGroup, directly or through USE.
fn static_defs(scene: &SceneGraph) -> Vec<String> {
    fn mark(scene: &SceneGraph, r: &NodeRef, in_static: bool, out: &mut Vec<String>) {
        let node = match r {
            NodeRef::Node(n) => n.as_ref(),
            NodeRef::Use(name) => {
                if !in_static {
                    return;
                }
                match scene.find_def(name) {
                    Some(n) => n,
                    None => return,
                }
            }
        };
        let in_static = in_static || node.kind == NodeKind::StaticGroup;
        if in_static {
            if let Some(name) = &node.def_name {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
        for (_, c) in node.node_slots() {
            mark(scene, c, in_static, out);
        }
    }
    let mut out = Vec::new();
    for r in &scene.roots {
        mark(scene, r, false, &mut out);
    }
    out
}

struct DefInfo {
    name: String,
    kind: NodeKind,
    in_static: bool,
}

struct Gen<'r, R: Rng + ?Sized> {
    rng: &'r mut R,
    opts: RandomSceneOptions,
    defs: Vec<DefInfo>,
    next_def: usize,
}

const CHILD_KINDS: [NodeKind; 18] = [
    NodeKind::Transform,
    NodeKind::Group,
    NodeKind::StaticGroup,
    NodeKind::Lod,
    NodeKind::Inline,
    NodeKind::Shape,
    NodeKind::Viewpoint,
    NodeKind::NavigationInfo,
    NodeKind::Background,
    NodeKind::SpotLight,
    NodeKind::TimeSensor,
    NodeKind::TouchSensor,
    NodeKind::ProximitySensor,
    NodeKind::PositionInterpolator,
    NodeKind::OrientationInterpolator,
    NodeKind::ColorInterpolator,
    NodeKind::Sound,
    NodeKind::WorldInfo,
];

impl<R: Rng + ?Sized> Gen<'_, R> {
    fn word(&mut self) -> String {
        const ALPHA: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
        let n = self.rng.random_range(1..8);
        (0..n).map(|_| ALPHA[self.rng.random_range(0..ALPHA.len())] as char).collect()
    }

    /// Free text, including the characters that need escaping.
    fn text(&mut self) -> String {
        const PIECES: &[&str] = &["a", "Z", " ", "\"", "'", "\\", "<", ">", "&", "\n", "\t", "é", "东", "🚂", ",", "0.5"];
        let n = self.rng.random_range(0..6);
        (0..n).map(|_| PIECES[self.rng.random_range(0..PIECES.len())]).collect()
    }

    fn real(&mut self) -> f64 {
        match self.rng.random_range(0..5) {
            0 => self.rng.random_range(-100i32..100) as f64,
            1 => self.rng.random_range(-100.0f32..100.0) as f64,
            2 => self.rng.random_range(-1e3..1e3),
            3 => self.rng.random_range(-1.0..1.0) * 10f64.powi(self.rng.random_range(-12..12)),
            _ => 0.0,
        }
    }

    fn unit(&mut self) -> f64 {
        match self.rng.random_range(0..3) {
            0 => self.rng.random_range(0..=4) as f64 / 4.0,
            1 => self.rng.random_range(0.0f32..=1.0) as f64,
            _ => self.rng.random_range(0.0..=1.0),
        }
    }

    fn vec3(&mut self) -> Vec3 {
        Vec3::new(self.real(), self.real(), self.real())
    }

    fn rotation(&mut self) -> Rotation {
        if self.rng.random_bool(0.3) {
            return Rotation::about_y(self.real());
        }
        loop {
            let axis = Vec3::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0));
            if axis.length() > 1e-3 {
                return Rotation::new(axis, self.real()).expect("non-zero axis");
            }
        }
    }

    fn color(&mut self) -> ColorRGB {
        ColorRGB::rgb(self.unit(), self.unit(), self.unit())
    }

    fn list<T>(&mut self, mut f: impl FnMut(&mut Self) -> T) -> Vec<T> {
        let n = self.rng.random_range(0..=self.opts.max_list);
        (0..n).map(|_| f(self)).collect()
    }

    fn value(&mut self, ty: FieldType) -> Option<FieldValue> {
        Some(match ty {
            FieldType::SFBool => FieldValue::Bool(self.rng.random()),
            FieldType::SFInt32 => FieldValue::Int(self.rng.random()),
            FieldType::SFFloat => FieldValue::Float(self.real()),
            FieldType::SFTime => FieldValue::Time(self.real()),
            FieldType::SFString => FieldValue::String(self.text()),
            FieldType::SFVec3f => FieldValue::Vec3(self.vec3()),
            FieldType::SFRotation => FieldValue::Rotation(self.rotation()),
            FieldType::SFColor => FieldValue::Color(self.color()),
            FieldType::MFBool => FieldValue::Bools(self.list(|g| g.rng.random())),
            FieldType::MFInt32 => FieldValue::Ints(self.list(|g| {
                if g.rng.random_bool(0.5) {
                    g.rng.random_range(-1..50)
                } else {
                    g.rng.random()
                }
            })),
            FieldType::MFFloat => FieldValue::Floats(self.list(|g| g.real())),
            FieldType::MFTime => FieldValue::Times(self.list(|g| g.real())),
            FieldType::MFString => FieldValue::Strings(self.list(|g| g.text())),
            FieldType::MFVec3f => FieldValue::Vec3s(self.list(|g| g.vec3())),
            FieldType::MFRotation => FieldValue::Rotations(self.list(|g| g.rotation())),
            FieldType::MFColor => FieldValue::Colors(self.list(|g| g.color())),
            FieldType::SFNode | FieldType::MFNode => return None,
        })
    }

    fn sorted_units(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.unit()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn fields(&mut self, node: &mut Node) {
        for spec in schema::fields(node.kind) {
            if !spec.access.is_initializable() || !self.rng.random_bool(0.5) {
                continue;
            }
            if let Some(v) = self.value(spec.ty) {
                node.set(spec.name, v);
            }
        }
        // per-kind constraints
        match node.kind {
            NodeKind::TimeSensor => {
                node.set("cycleInterval", FieldValue::Time(self.rng.random_range(0.1..100.0)));
            }
            NodeKind::ProximitySensor => {
                let s = self.vec3();
                node.set("size", FieldValue::Vec3(Vec3::new(s.x.abs(), s.y.abs(), s.z.abs())));
            }
            k if k.is_interpolator() => {
                let n = self.rng.random_range(0..=self.opts.max_list);
                node.set("key", FieldValue::Floats(self.sorted_units(n)));
                let values = match k {
                    NodeKind::PositionInterpolator => FieldValue::Vec3s((0..n).map(|_| self.vec3()).collect()),
                    NodeKind::OrientationInterpolator => FieldValue::Rotations((0..n).map(|_| self.rotation()).collect()),
                    _ => FieldValue::Colors((0..n).map(|_| self.color()).collect()),
                };
                node.set("keyValue", values);
            }
            NodeKind::Lod => {
                node.fields.remove("range");
            }
            _ => {}
        }
    }

    fn maybe_def(&mut self, node: &mut Node, in_static: bool) {
        if self.rng.random_bool(0.4) {
            let name = format!("{}{}", self.word(), self.next_def);
            self.next_def += 1;
            node.def_name = Some(name.clone());
            self.defs.push(DefInfo { name, kind: node.kind, in_static });
        }
    }

    /// A USE of an earlier DEF that fits `accept` and is not an ancestor.
    fn reuse(&mut self, accept: impl Fn(NodeKind) -> bool, ancestors: &[String], in_static: bool) -> Option<NodeRef> {
        let choices: Vec<usize> = (0..self.defs.len())
            .filter(|i| accept(self.defs[*i].kind) && !ancestors.contains(&self.defs[*i].name))
            .filter(|i| {
                let k = self.defs[*i].kind;
                !(in_static && (k.is_sensor() || k.is_interpolator() || k.is_grouping()))
            })
            .collect();
        if choices.is_empty() || !self.rng.random_bool(0.15) {
            return None;
        }
        let d = &mut self.defs[choices[self.rng.random_range(0..choices.len())]];
        Some(NodeRef::Use(d.name.clone()))
    }

    fn child_ref(&mut self, depth: usize, in_static: bool, ancestors: &mut Vec<String>) -> NodeRef {
        if let Some(u) = self.reuse(NodeKind::is_child_node, ancestors, in_static) {
            return u;
        }
        let kinds: Vec<NodeKind> = CHILD_KINDS
            .iter()
            .copied()
            .filter(|k| !(in_static && (k.is_sensor() || k.is_interpolator())))
            .filter(|k| depth < self.opts.max_depth || !k.is_grouping())
            .collect();
        let kind = kinds[self.rng.random_range(0..kinds.len())];
        self.node(kind, depth, in_static, ancestors).into()
    }

    fn node(&mut self, kind: NodeKind, depth: usize, in_static: bool, ancestors: &mut Vec<String>) -> Node {
        let mut node = Node::new(kind);
        self.fields(&mut node);
        self.maybe_def(&mut node, in_static);
        if let Some(name) = &node.def_name {
            ancestors.push(name.clone());
        }
        let child_static = in_static || kind == NodeKind::StaticGroup;
        // node-valued fields
        for spec in schema::fields(kind).iter().filter(|s| s.ty == FieldType::SFNode) {
            if !self.rng.random_bool(0.7) {
                continue;
            }
            let choices: Vec<NodeKind> = NodeKind::ALL.into_iter().filter(|c| accepts_node(kind, spec.name, *c)).collect();
            if choices.is_empty() {
                continue;
            }
            let r = match self.reuse(|c| accepts_node(kind, spec.name, c), ancestors, child_static) {
                Some(u) => u,
                None => {
                    let c = choices[self.rng.random_range(0..choices.len())];
                    let mut inner = self.node(c, depth + 1, child_static, ancestors);
                    if c == NodeKind::IndexedFaceSet {
                        self.index_within(&mut inner);
                    }
                    inner.into()
                }
            };
            node.set(spec.name, FieldValue::Node(r));
        }
        if kind.is_grouping() {
            let n = self.rng.random_range(0..=self.opts.max_children);
            for _ in 0..n {
                let c = self.child_ref(depth + 1, child_static, ancestors);
                node.children.push(c);
            }
            if kind == NodeKind::Lod && !node.children.is_empty() && self.rng.random_bool(0.7) {
                let ranges = self.sorted_units(node.children.len() - 1).iter().map(|r| r * 500.0).collect();
                node.set("range", FieldValue::Floats(ranges));
            }
        }
        if node.def_name.is_some() {
            ancestors.pop();
        }
        node
    }

    /// Keeps coordIndex plausible for the generated coordinates.
    fn index_within(&mut self, ifs: &mut Node) {
        let points = match ifs.fields.get("coord") {
            Some(FieldValue::Node(NodeRef::Node(c))) => match c.fields.get("point") {
                Some(FieldValue::Vec3s(p)) => p.len(),
                _ => 0,
            },
            _ => 0,
        };
        if points == 0 {
            return;
        }
        let n = self.rng.random_range(0..=self.opts.max_list);
        let idx = (0..n)
            .map(|_| if self.rng.random_bool(0.2) { -1 } else { self.rng.random_range(0..points as i32) })
            .collect();
        ifs.set("coordIndex", FieldValue::Ints(idx));
    }

    fn routes(&mut self) -> Vec<Route> {
        let live: Vec<(String, NodeKind)> =
            self.defs.iter().filter(|d| !d.in_static).map(|d| (d.name.clone(), d.kind)).collect();
        let mut outputs = Vec::new();
        let mut inputs = Vec::new();
        for (name, kind) in &live {
            for spec in schema::fields(*kind) {
                if spec.ty == FieldType::SFNode || spec.ty == FieldType::MFNode {
                    continue;
                }
                if spec.access.emits_output() {
                    outputs.push((name.clone(), spec.name, spec.ty));
                }
                if spec.access.accepts_input() {
                    inputs.push((name.clone(), spec.name, spec.ty));
                }
            }
        }
        let mut routes = Vec::new();
        if outputs.is_empty() || inputs.is_empty() {
            return routes;
        }
        let n = self.rng.random_range(0..=self.opts.max_routes);
        for _ in 0..n {
            let (from, ff, ty) = outputs[self.rng.random_range(0..outputs.len())].clone();
            let fits: Vec<_> = inputs.iter().filter(|i| i.2 == ty).collect();
            if fits.is_empty() {
                continue;
            }
            let (to, tf, _) = fits[self.rng.random_range(0..fits.len())];
            routes.push(Route::new(&from, ff, to, tf));
        }
        routes
    }
}
