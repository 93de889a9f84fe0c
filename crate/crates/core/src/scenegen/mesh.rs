//! Procedural IndexedFaceSet meshes. Coordinates are snapped to 1/64 so
//! they stay exact in 32-bit floats.

use crate::math::Vec3;
use crate::scene::{FieldValue, Node, NodeKind};

pub fn snap(x: f64) -> f64 {
    let r = (x * 64.0).round() / 64.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub points: Vec<Vec3>,
    pub index: Vec<i32>,
}

impl Mesh {
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    fn push_point(&mut self, p: Vec3) -> i32 {
        self.points.push(Vec3::new(snap(p.x), snap(p.y), snap(p.z)));
        (self.points.len() - 1) as i32
    }

    fn face(&mut self, corners: &[i32]) {
        self.index.extend_from_slice(corners);
        self.index.push(-1);
    }

    pub fn append(&mut self, other: &Mesh) {
        let base = self.points.len() as i32;
        self.points.extend_from_slice(&other.points);
        self.index.extend(other.index.iter().map(|i| if *i < 0 { *i } else { i + base }));
    }

    pub fn translated(mut self, by: Vec3) -> Mesh {
        for p in &mut self.points {
            *p = Vec3::new(snap(p.x + by.x), snap(p.y + by.y), snap(p.z + by.z));
        }
        self
    }

    pub fn to_node(&self) -> Node {
        let coord = Node::new(NodeKind::Coordinate).with("point", FieldValue::Vec3s(self.points.clone()));
        Node::new(NodeKind::IndexedFaceSet)
            .with("coord", FieldValue::Node(coord.into()))
            .with("coordIndex", FieldValue::Ints(self.index.clone()))
    }
}

/// A `nu` × `nv` grid of quads over `f(u, v)`, `u, v ∈ [0, 1]`.
pub fn grid(nu: usize, nv: usize, f: impl Fn(f64, f64) -> Vec3) -> Mesh {
    let (nu, nv) = (nu.max(2), nv.max(2));
    let mut m = Mesh::default();
    for j in 0..nv {
        for i in 0..nu {
            m.push_point(f(i as f64 / (nu - 1) as f64, j as f64 / (nv - 1) as f64));
        }
    }
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let a = (j * nu + i) as i32;
            let b = a + nu as i32;
            m.face(&[a, a + 1, b + 1, b]);
        }
    }
    m
}

/// Closed hull of a rounded-box cross-section extruded along Z, centred on
/// the origin, with roughly `density` points on the side mesh.
pub fn hull(length: f64, width: f64, height: f64, density: usize) -> Mesh {
    let ring = ((density as f64 * 2.0).sqrt().round() as usize).clamp(8, 4096);
    let stations = (density / ring).max(2);
    let (a, b) = (width / 2.0, height / 2.0);
    let profile: Vec<(f64, f64)> = (0..ring)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / ring as f64;
            let (s, c) = t.sin_cos();
            // superellipse |x/a|^4 + |y/b|^4 = 1
            (a * c.signum() * c.abs().sqrt(), b * s.signum() * s.abs().sqrt())
        })
        .collect();
    let mut m = Mesh::default();
    for j in 0..stations {
        let z = -length / 2.0 + length * j as f64 / (stations - 1) as f64;
        for (x, y) in &profile {
            m.push_point(Vec3::new(*x, *y + b, z));
        }
    }
    for j in 0..stations - 1 {
        for k in 0..ring {
            let a0 = (j * ring + k) as i32;
            let a1 = (j * ring + (k + 1) % ring) as i32;
            m.face(&[a0, a1, a1 + ring as i32, a0 + ring as i32]);
        }
    }
    let front: Vec<i32> = (0..ring as i32).rev().collect();
    let back: Vec<i32> = (0..ring as i32).map(|k| k + ((stations - 1) * ring) as i32).collect();
    m.face(&front);
    m.face(&back);
    m
}

/// An open box of four facade grids and a roof, base on y = 0.
pub fn facade_block(w: f64, h: f64, d: f64, detail: usize) -> Mesh {
    let (nu, nv) = (detail.max(2), (detail * 2).max(2));
    let (x0, x1, z0, z1) = (-w / 2.0, w / 2.0, -d / 2.0, d / 2.0);
    let mut m = Mesh::default();
    let sides: [(Vec3, Vec3); 4] = [
        (Vec3::new(x0, 0.0, z1), Vec3::new(x1, 0.0, z1)),
        (Vec3::new(x1, 0.0, z1), Vec3::new(x1, 0.0, z0)),
        (Vec3::new(x1, 0.0, z0), Vec3::new(x0, 0.0, z0)),
        (Vec3::new(x0, 0.0, z0), Vec3::new(x0, 0.0, z1)),
    ];
    for (p, q) in sides {
        m.append(&grid(nu, nv, |u, v| p.lerp(q, u) + Vec3::new(0.0, h * v, 0.0)));
    }
    m.append(&grid(2, 2, |u, v| Vec3::new(x0 + w * u, h, z1 - d * v)));
    m
}
