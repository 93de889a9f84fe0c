use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::validate::{validate, ValidationReport};
use super::{Node, NodeKind, NodeRef, SceneGraph};

#[derive(Debug, Clone, Error)]
pub enum PromoteError {
    #[error("scene has {} validation error(s); first: {}", .0.errors.len(), .0.errors[0])]
    Invalid(ValidationReport),
}

/// Rewrites every Group that can be static into a StaticGroup.
///
/// A Group qualifies when nothing beneath it (following USE) is a sensor,
/// an interpolator or a Viewpoint, and no DEF inside it is a route
/// endpoint or is USE'd from outside the Group.
pub fn promote_static_groups(scene: &SceneGraph) -> Result<SceneGraph, PromoteError> {
    let report = validate(scene);
    if !report.is_clean() {
        return Err(PromoteError::Invalid(report));
    }

    let mut routed: BTreeSet<String> = BTreeSet::new();
    for r in &scene.routes {
        for name in [&r.from_node, &r.to_node] {
            routed.insert(name.clone());
            // an imported endpoint pins the Inline it comes through
            if let Some((prefix, _)) = name.split_once('.') {
                routed.insert(prefix.to_string());
            }
        }
    }
    let mut use_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut dynamic_defs: BTreeMap<String, bool> = BTreeMap::new();
    for r in &scene.roots {
        survey(r, &routed, &mut use_counts, &mut dynamic_defs);
    }

    let ctx = Ctx { routed, use_counts, dynamic_defs };
    let mut out = scene.clone();
    for r in &mut out.roots {
        ctx.rewrite(r);
    }
    Ok(out)
}

/// Counts USE sites per name and records, per DEF, whether its subtree
/// is dynamic or holds a route endpoint. Returns that flag for `r`.
fn survey(
    r: &NodeRef,
    routed: &BTreeSet<String>,
    uses: &mut BTreeMap<String, usize>,
    dynamic: &mut BTreeMap<String, bool>,
) -> bool {
    match r {
        NodeRef::Use(name) => {
            *uses.entry(name.clone()).or_default() += 1;
            dynamic.get(name).copied().unwrap_or(false)
        }
        NodeRef::Node(node) => {
            let mut dyn_here = is_dynamic_kind(node.kind) || node.def_name.as_ref().is_some_and(|d| routed.contains(d));
            for (_, child) in node.node_slots() {
                dyn_here |= survey(child, routed, uses, dynamic);
            }
            if let Some(d) = &node.def_name {
                dynamic.insert(d.clone(), dyn_here);
            }
            dyn_here
        }
    }
}

fn is_dynamic_kind(kind: NodeKind) -> bool {
    kind.is_sensor() || kind.is_interpolator() || kind == NodeKind::Viewpoint
}

struct Ctx {
    routed: BTreeSet<String>,
    use_counts: BTreeMap<String, usize>,
    /// DEF name -> subtree cannot sit beneath a StaticGroup.
    dynamic_defs: BTreeMap<String, bool>,
}

#[derive(Default)]
struct Summary {
    dynamic: bool,
    defs: Vec<String>,
    uses: BTreeMap<String, usize>,
}

impl Ctx {
    fn rewrite(&self, r: &mut NodeRef) -> Summary {
        match r {
            NodeRef::Use(name) => {
                let mut s = Summary { dynamic: self.dynamic_defs.get(name.as_str()).copied().unwrap_or(false), ..Default::default() };
                s.uses.insert(name.clone(), 1);
                s
            }
            NodeRef::Node(node) => self.rewrite_node(node),
        }
    }

    fn rewrite_node(&self, node: &mut Node) -> Summary {
        let mut s = Summary { dynamic: is_dynamic_kind(node.kind), ..Default::default() };
        if let Some(d) = &node.def_name {
            s.defs.push(d.clone());
        }
        let absorb = |child: Summary, s: &mut Summary| {
            s.dynamic |= child.dynamic;
            s.defs.extend(child.defs);
            for (k, v) in child.uses {
                *s.uses.entry(k).or_default() += v;
            }
        };
        for value in node.fields.values_mut() {
            if let super::FieldValue::Node(r) = value {
                let child = self.rewrite(r);
                absorb(child, &mut s);
            }
        }
        for r in &mut node.children {
            let child = self.rewrite(r);
            absorb(child, &mut s);
        }
        if node.kind == NodeKind::Group && self.may_be_static(&s) {
            node.kind = NodeKind::StaticGroup;
        }
        s
    }

    fn may_be_static(&self, s: &Summary) -> bool {
        !s.dynamic
            && s.defs.iter().all(|d| {
                let outside = self.use_counts.get(d).copied().unwrap_or(0) - s.uses.get(d).copied().unwrap_or(0);
                !self.routed.contains(d) && outside == 0
            })
    }
}
