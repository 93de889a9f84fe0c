//! Flattened runtime view of a scene. Every node written in place gets one
//! arena slot; `USE` shares the slot, and resolved `Inline` content hangs
//! under its Inline node with names qualified by the Inline's namespace.

use std::collections::BTreeMap;

use crate::math::{Mat4, Quat, Rotation, Vec3};
use crate::scene::schema::{self, route_field};
use crate::scene::{
    compose_transform, inline_namespace, resolve_inline, FieldValue, InlineResolver, Node, NodeKind, NodeRef,
    SceneGraph,
};

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct RtNode {
    pub kind: NodeKind,
    /// Qualified DEF name, e.g. `SavannahScene.IncomingTrain`.
    pub name: Option<String>,
    /// Parent of the first instance.
    pub parent: Option<NodeId>,
    /// Node-valued fields and children, in slot order.
    pub children: Vec<NodeId>,
    values: BTreeMap<String, FieldValue>,
}

impl RtNode {
    fn from_node(node: &Node, name: Option<String>, parent: Option<NodeId>) -> Self {
        let values = node
            .fields
            .iter()
            .filter(|(_, v)| !matches!(v, FieldValue::Node(_)))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        RtNode { kind: node.kind, name, parent, children: Vec::new(), values }
    }

    /// Current value: last written value, explicit file value, or default.
    pub fn get(&self, field: &str) -> Option<FieldValue> {
        if let Some(v) = self.values.get(field) {
            return Some(v.clone());
        }
        schema::field(self.kind, field)?.default_value()
    }

    pub fn set(&mut self, field: &str, value: FieldValue) {
        self.values.insert(field.to_string(), value);
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

    pub fn real(&self, field: &str) -> f64 {
        match self.get(field) {
            Some(FieldValue::Float(x) | FieldValue::Time(x)) => x,
            _ => 0.0,
        }
    }

    pub fn flag(&self, field: &str) -> bool {
        matches!(self.get(field), Some(FieldValue::Bool(true)))
    }

    pub fn floats(&self, field: &str) -> Vec<f64> {
        match self.get(field) {
            Some(FieldValue::Floats(v)) => v,
            _ => Vec::new(),
        }
    }

    /// Local matrix (identity for anything but a Transform).
    pub fn local_matrix(&self) -> Mat4 {
        if self.kind != NodeKind::Transform {
            return Mat4::IDENTITY;
        }
        compose_transform(
            self.vec3("translation"),
            self.vec3("center"),
            self.rotation("rotation"),
            self.vec3("scale"),
            self.rotation("scaleOrientation"),
        )
    }
}

/// A route with both endpoints resolved to arena slots and canonical
/// field names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtRoute {
    pub from: NodeId,
    pub from_field: &'static str,
    pub to: NodeId,
    pub to_field: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct World {
    nodes: Vec<RtNode>,
    names: BTreeMap<String, NodeId>,
    routes: Vec<RtRoute>,
    /// Routes whose endpoints could not be resolved, as `from -> to` text.
    pub unresolved_routes: Vec<String>,
    pub missing_inlines: Vec<String>,
}

impl World {
    pub fn build(scene: &SceneGraph, resolver: &dyn InlineResolver) -> World {
        let mut b = Builder { world: World::default(), resolver, inline_stack: Vec::new() };
        b.scene(scene, "", None);
        b.world
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &RtNode {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut RtNode {
        &mut self.nodes[id]
    }

    pub fn id_of(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied()
    }

    pub fn name_of(&self, id: NodeId) -> Option<&str> {
        self.nodes[id].name.as_deref()
    }

    pub fn routes(&self) -> &[RtRoute] {
        &self.routes
    }

    /// Arena slots of one kind, in preorder.
    pub fn ids_of_kind(&self, kind: NodeKind) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|i| self.nodes[*i].kind == kind).collect()
    }

    /// Matrix taking a node's own field coordinates to world space: the
    /// product of its ancestors' Transforms, excluding the node itself.
    pub fn frame(&self, id: NodeId) -> Mat4 {
        let mut m = Mat4::IDENTITY;
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            m = self.nodes[p].local_matrix() * m;
            cur = self.nodes[p].parent;
        }
        m
    }

    /// Matrix taking a node's child coordinates to world space.
    pub fn world_matrix(&self, id: NodeId) -> Mat4 {
        self.frame(id) * self.nodes[id].local_matrix()
    }

    /// Product of ancestor Transform rotations, as a quaternion.
    pub fn frame_rotation(&self, id: NodeId) -> Quat {
        let mut q = Quat::IDENTITY;
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            let n = &self.nodes[p];
            if n.kind == NodeKind::Transform {
                q = n.rotation("rotation").to_quat() * q;
            }
            cur = n.parent;
        }
        q
    }
}

struct Builder<'r> {
    world: World,
    resolver: &'r dyn InlineResolver,
    inline_stack: Vec<String>,
}

impl Builder<'_> {
    fn scene(&mut self, scene: &SceneGraph, prefix: &str, parent: Option<NodeId>) -> Vec<NodeId> {
        let ids: Vec<NodeId> = scene.roots.iter().filter_map(|r| self.node_ref(r, prefix, parent)).collect();
        for r in &scene.routes {
            let from = self.world.id_of(&format!("{prefix}{}", r.from_node));
            let to = self.world.id_of(&format!("{prefix}{}", r.to_node));
            let resolved = from.zip(to).and_then(|(from, to)| {
                let f = route_field(self.world.nodes[from].kind, &r.from_field)?;
                let t = route_field(self.world.nodes[to].kind, &r.to_field)?;
                Some(RtRoute { from, from_field: f.name, to, to_field: t.name })
            });
            match resolved {
                Some(route) => self.world.routes.push(route),
                None => self.world.unresolved_routes.push(format!("{prefix}{r}")),
            }
        }
        ids
    }

    fn node_ref(&mut self, r: &NodeRef, prefix: &str, parent: Option<NodeId>) -> Option<NodeId> {
        match r {
            NodeRef::Use(name) => self.world.id_of(&format!("{prefix}{name}")),
            NodeRef::Node(node) => Some(self.node(node, prefix, parent)),
        }
    }

    fn node(&mut self, node: &Node, prefix: &str, parent: Option<NodeId>) -> NodeId {
        let id = self.world.nodes.len();
        let name = node.def_name.as_ref().map(|d| format!("{prefix}{d}"));
        if let Some(n) = &name {
            self.world.names.entry(n.clone()).or_insert(id);
        }
        self.world.nodes.push(RtNode::from_node(node, name, parent));
        let mut children = Vec::new();
        for (_, r) in node.node_slots() {
            if let Some(c) = self.node_ref(r, prefix, Some(id)) {
                children.push(c);
            }
        }
        if node.kind == NodeKind::Inline && node.get("load") == Some(FieldValue::Bool(true)) {
            children.extend(self.inline(node, prefix, id));
        }
        self.world.nodes[id].children = children;
        id
    }

    fn inline(&mut self, node: &Node, prefix: &str, id: NodeId) -> Vec<NodeId> {
        let Some((url, content)) = resolve_inline(node, self.resolver) else {
            self.world.missing_inlines.extend(node.strings("url").into_iter().take(1));
            return Vec::new();
        };
        if self.inline_stack.contains(&url) {
            return Vec::new();
        }
        self.inline_stack.push(url);
        let inner = format!("{prefix}{}.", inline_namespace(node));
        let ids = self.scene(&content, &inner, Some(id));
        self.inline_stack.pop();
        ids
    }
}
