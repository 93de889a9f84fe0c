//! The event loop. Time advances in fixed ticks; injected events are
//! handled at their own timestamps. Everything that happens at one
//! timestamp forms a cascade in which each route fires at most once.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::config::{SimConfig, Verbosity};
use super::interp::{interpolate_color, interpolate_orientation, interpolate_position, KeyframeTrack};
use super::lod::select_lod_child;
use super::proximity::{evaluate_proximity, ProximityRegion, ProximityState, ViewerPose};
use super::script::{SimEvent, SimEventKind};
use super::timesensor::{timesensor_fraction, TimeSensorState};
use super::trace::{TraceRecord, TraceSummary};
use super::world::{NodeId, World};
use crate::math::{Mat4, Quat, Vec3};
use crate::scene::schema::{self, Access};
use crate::scene::{FieldValue, InlineResolver, NodeKind, SceneGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("time {at} is before the current time {now}")]
    TimeWentBack { at: f64, now: f64 },
    #[error("time {0} is not finite")]
    NonFinite(f64),
    #[error("script events are not sorted at {0}")]
    OutOfOrder(f64),
    #[error("no node named '{0}'")]
    UnknownNode(String),
    #[error("'{0}' is not a Viewpoint")]
    NotAViewpoint(String),
    #[error("no TouchSensor watches '{0}'")]
    NoTouchSensor(String),
}

#[derive(Debug, Clone, Copy, Default)]
struct TimerRt {
    active: bool,
    cycle: f64,
}

#[derive(Debug, Clone, Copy)]
struct Transition {
    from: ViewerPose,
    t0: f64,
}

pub struct Simulation {
    world: World,
    config: SimConfig,
    now: f64,
    initialized: bool,
    next_tick: u64,
    timers: BTreeMap<NodeId, TimerRt>,
    proximity: BTreeMap<NodeId, ProximityState>,
    lod_levels: BTreeMap<NodeId, usize>,
    bind_stack: Vec<NodeId>,
    transition: Option<Transition>,
    pose_override: Option<ViewerPose>,
    /// Timestamp of the open cascade and the routes already fired in it.
    cascade_at: f64,
    fired: BTreeSet<usize>,
    seq: u64,
    queue: VecDeque<(NodeId, &'static str, FieldValue)>,
    records: Vec<TraceRecord>,
    total_records: usize,
}

impl Simulation {
    pub fn new(scene: &SceneGraph, resolver: &dyn InlineResolver, config: SimConfig) -> Self {
        let world = World::build(scene, resolver);
        let timers = world.ids_of_kind(NodeKind::TimeSensor).into_iter().map(|i| (i, TimerRt::default())).collect();
        Simulation {
            world,
            config,
            now: 0.0,
            initialized: false,
            next_tick: 0,
            timers,
            proximity: BTreeMap::new(),
            lod_levels: BTreeMap::new(),
            bind_stack: Vec::new(),
            transition: None,
            pose_override: None,
            cascade_at: f64::NEG_INFINITY,
            fired: BTreeSet::new(),
            seq: 0,
            queue: VecDeque::new(),
            records: Vec::new(),
            total_records: 0,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    /// Processes `events` and every tick up to and including `t`, and
    /// returns the trace records produced.
    pub fn step_to(&mut self, t: f64, events: &[SimEvent]) -> Result<Vec<TraceRecord>, SimError> {
        if !t.is_finite() {
            return Err(SimError::NonFinite(t));
        }
        if t < self.now {
            return Err(SimError::TimeWentBack { at: t, now: self.now });
        }
        let mut prev = self.now;
        for e in events {
            if !e.at.is_finite() {
                return Err(SimError::NonFinite(e.at));
            }
            if e.at < prev {
                return Err(SimError::OutOfOrder(e.at));
            }
            if e.at > t {
                return Err(SimError::TimeWentBack { at: t, now: e.at });
            }
            prev = e.at;
        }
        self.check_names(events)?;

        let mut pending = events.iter().peekable();
        loop {
            let tick_at = self.tick_time(self.next_tick);
            let next_event = pending.peek().map(|e| e.at);
            let at = match next_event {
                Some(e) if e <= tick_at => e,
                _ if tick_at <= t => tick_at,
                _ => break,
            };
            self.begin(at);
            while let Some(e) = pending.next_if(|e| e.at == at) {
                self.inject(e)?;
            }
            if at == tick_at {
                self.tick(at);
                self.next_tick += 1;
            }
        }
        self.now = t;
        Ok(std::mem::take(&mut self.records))
    }

    /// Binds a viewpoint at time `at`, advancing the clock to it.
    pub fn bind_viewpoint(&mut self, name: &str, at: f64) -> Result<Vec<TraceRecord>, SimError> {
        self.step_to(at, &[SimEvent::bind(at, name)])
    }

    /// Effective viewer pose at the current time.
    pub fn viewer_pose(&self) -> ViewerPose {
        self.pose_at(self.now)
    }

    pub fn bound_viewpoint(&self) -> Option<&str> {
        self.bind_stack.last().and_then(|id| self.world.name_of(*id))
    }

    pub fn field(&self, node: &str, field: &str) -> Option<FieldValue> {
        self.world.node(self.world.id_of(node)?).get(field)
    }

    /// World matrix of a node's child coordinates (includes the node's own
    /// transform).
    pub fn world_transform_of(&self, node: &str) -> Option<Mat4> {
        Some(self.world.world_matrix(self.world.id_of(node)?))
    }

    /// Matrix taking a node's own field coordinates to world space.
    pub fn frame_of(&self, node: &str) -> Option<Mat4> {
        Some(self.world.frame(self.world.id_of(node)?))
    }

    pub fn lod_level(&self, node: &str) -> Option<usize> {
        self.lod_levels.get(&self.world.id_of(node)?).copied()
    }

    /// World pose of a viewpoint from its current field values.
    pub fn viewpoint_pose(&self, name: &str) -> Option<ViewerPose> {
        let id = self.world.id_of(name)?;
        (self.world.node(id).kind == NodeKind::Viewpoint).then(|| self.vp_pose(id))
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            events: self.total_records,
            final_time: self.now,
            viewer: self.viewer_pose(),
            bound_viewpoint: self.bound_viewpoint().map(str::to_string),
        }
    }

    fn tick_time(&self, k: u64) -> f64 {
        k as f64 / self.config.tick_rate
    }

    fn check_names(&self, events: &[SimEvent]) -> Result<(), SimError> {
        for e in events {
            match &e.kind {
                SimEventKind::Touch { node } => {
                    let id = self.world.id_of(node).ok_or_else(|| SimError::UnknownNode(node.clone()))?;
                    self.touch_sensors(id).ok_or_else(|| SimError::NoTouchSensor(node.clone()))?;
                }
                SimEventKind::BindViewpoint { viewpoint } => {
                    let id =
                        self.world.id_of(viewpoint).ok_or_else(|| SimError::UnknownNode(viewpoint.clone()))?;
                    if self.world.node(id).kind != NodeKind::Viewpoint {
                        return Err(SimError::NotAViewpoint(viewpoint.clone()));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Opens the cascade for timestamp `at`; the first one binds the
    /// initial viewpoint.
    fn begin(&mut self, at: f64) {
        if at != self.cascade_at {
            self.cascade_at = at;
            self.fired.clear();
            self.seq = 0;
        }
        self.now = at;
        if !self.initialized {
            self.initialized = true;
            if let Some(first) = self.world.ids_of_kind(NodeKind::Viewpoint).first() {
                self.bind_stack.push(*first);
                self.emit(*first, "isBound", FieldValue::Bool(true));
                self.emit(*first, "bindTime", FieldValue::Time(at));
                self.drain();
            }
        }
    }

    fn inject(&mut self, e: &SimEvent) -> Result<(), SimError> {
        let at = e.at;
        match &e.kind {
            SimEventKind::Touch { node } => {
                let id = self.world.id_of(node).ok_or_else(|| SimError::UnknownNode(node.clone()))?;
                for s in self.touch_sensors(id).unwrap_or_default() {
                    if self.world.node(s).flag("enabled") {
                        self.emit(s, "isActive", FieldValue::Bool(true));
                        self.emit(s, "touchTime", FieldValue::Time(at));
                    }
                }
            }
            SimEventKind::SetViewerPose { position, orientation } => {
                self.pose_override = Some(ViewerPose { position: *position, orientation: *orientation });
                self.transition = None;
                self.sense(at);
            }
            SimEventKind::BindViewpoint { viewpoint } => {
                let id = self.world.id_of(viewpoint).ok_or_else(|| SimError::UnknownNode(viewpoint.clone()))?;
                self.bind(id, at);
            }
            SimEventKind::Reset => self.reset(at),
            SimEventKind::AdvanceOnly => {}
        }
        self.drain();
        Ok(())
    }

    /// The named TouchSensor, else the TouchSensors among the named node's
    /// children, else among the children of its nearest ancestor that has
    /// any.
    fn touch_sensors(&self, id: NodeId) -> Option<Vec<NodeId>> {
        if self.world.node(id).kind == NodeKind::TouchSensor {
            return Some(vec![id]);
        }
        let mut cur = Some(id);
        while let Some(n) = cur {
            let found: Vec<NodeId> = self
                .world
                .node(n)
                .children
                .iter()
                .copied()
                .filter(|c| self.world.node(*c).kind == NodeKind::TouchSensor)
                .collect();
            if !found.is_empty() {
                return Some(found);
            }
            cur = self.world.node(n).parent;
        }
        None
    }

    fn reset(&mut self, at: f64) {
        let targeted: BTreeSet<NodeId> = self
            .world
            .routes()
            .iter()
            .filter(|r| r.to_field == "startTime" && self.world.node(r.to).kind == NodeKind::TimeSensor)
            .map(|r| r.to)
            .collect();
        for id in targeted {
            self.world.node_mut(id).set("stopTime", FieldValue::Time(at));
            self.emit(id, "fraction_changed", FieldValue::Float(0.0));
            let rt = self.timers.entry(id).or_default();
            if rt.active {
                rt.active = false;
                self.emit(id, "isActive", FieldValue::Bool(false));
            }
        }
    }

    fn tick(&mut self, at: f64) {
        let ids: Vec<NodeId> = self.timers.keys().copied().collect();
        for id in ids {
            self.tick_timer(id, at);
            self.drain();
        }
        self.sense(at);
    }

    fn tick_timer(&mut self, id: NodeId, at: f64) {
        let n = self.world.node(id);
        let mut state = TimeSensorState {
            cycle_interval: n.real("cycleInterval"),
            looping: n.flag("loop"),
            start_time: n.real("startTime"),
            stop_time: n.real("stopTime"),
            enabled: n.flag("enabled"),
            is_active: false,
        };
        if state.cycle_interval <= 0.0 {
            return;
        }
        let rt = self.timers[&id];
        state.is_active = rt.active;
        let (fraction, active) = timesensor_fraction(&state, at);
        let cycle = ((at - state.start_time) / state.cycle_interval).floor();
        if active {
            if !rt.active {
                self.timers.insert(id, TimerRt { active: true, cycle });
                self.emit(id, "isActive", FieldValue::Bool(true));
                self.emit(id, "cycleTime", FieldValue::Time(at));
            } else if cycle > rt.cycle {
                self.timers.insert(id, TimerRt { active: true, cycle });
                self.emit(id, "cycleTime", FieldValue::Time(at));
            }
            self.emit(id, "fraction_changed", FieldValue::Float(fraction.unwrap_or(0.0)));
            self.emit(id, "time", FieldValue::Time(at));
        } else if rt.active {
            self.timers.insert(id, TimerRt { active: false, cycle });
            if let Some(f) = fraction {
                self.emit(id, "fraction_changed", FieldValue::Float(f));
            }
            self.emit(id, "isActive", FieldValue::Bool(false));
        }
    }

    /// Viewer-dependent nodes: proximity sensors, then LODs.
    fn sense(&mut self, at: f64) {
        let pose = self.pose_at(at);
        for id in self.world.ids_of_kind(NodeKind::ProximitySensor) {
            let n = self.world.node(id);
            if !n.flag("enabled") {
                continue;
            }
            let region = ProximityRegion {
                center: n.vec3("center"),
                size: n.vec3("size"),
                world: self.world.frame(id),
                world_rotation: self.world.frame_rotation(id),
            };
            let state = self.proximity.entry(id).or_default();
            for (field, value) in evaluate_proximity(&region, state, &pose, at) {
                self.emit(id, field, value);
            }
            self.drain();
        }
        for id in self.world.ids_of_kind(NodeKind::Lod) {
            let n = self.world.node(id);
            let level = select_lod_child(&n.floats("range"), n.vec3("center"), pose.position, &self.world.frame(id));
            if self.lod_levels.get(&id) != Some(&level) {
                self.lod_levels.insert(id, level);
                self.emit(id, "level_changed", FieldValue::Int(level as i32));
                self.drain();
            }
        }
    }

    fn vp_pose(&self, id: NodeId) -> ViewerPose {
        let n = self.world.node(id);
        let q: Quat = self.world.frame_rotation(id) * n.rotation("orientation").to_quat();
        ViewerPose {
            position: self.world.frame(id).transform_point(n.vec3("position")),
            orientation: q.normalize().to_rotation(Vec3::Z),
        }
    }

    fn pose_at(&self, t: f64) -> ViewerPose {
        if let Some(p) = self.pose_override {
            return p;
        }
        let Some(&top) = self.bind_stack.last() else {
            return ViewerPose::default();
        };
        let target = self.vp_pose(top);
        match self.transition {
            Some(tr) if self.config.transition_duration > 0.0 && t < tr.t0 + self.config.transition_duration => {
                let s = ((t - tr.t0) / self.config.transition_duration).clamp(0.0, 1.0);
                let q = tr.from.orientation.to_quat().slerp(target.orientation.to_quat(), s);
                ViewerPose {
                    position: tr.from.position.lerp(target.position, s),
                    orientation: q.to_rotation(target.orientation.axis()),
                }
            }
            _ => target,
        }
    }

    fn start_transition(&mut self, at: f64) {
        let from = self.pose_at(at);
        self.pose_override = None;
        self.transition = Some(Transition { from, t0: at });
    }

    fn bind(&mut self, id: NodeId, at: f64) {
        if self.bind_stack.last() == Some(&id) {
            return;
        }
        self.start_transition(at);
        if let Some(old) = self.bind_stack.pop() {
            self.emit(old, "isBound", FieldValue::Bool(false));
        }
        self.bind_stack.retain(|v| *v != id);
        self.bind_stack.push(id);
        self.emit(id, "isBound", FieldValue::Bool(true));
        self.emit(id, "bindTime", FieldValue::Time(at));
    }

    fn unbind(&mut self, id: NodeId, at: f64) {
        if self.bind_stack.last() != Some(&id) {
            self.bind_stack.retain(|v| *v != id);
            return;
        }
        self.start_transition(at);
        self.bind_stack.pop();
        self.emit(id, "isBound", FieldValue::Bool(false));
        if let Some(&next) = self.bind_stack.last() {
            self.emit(next, "isBound", FieldValue::Bool(true));
            self.emit(next, "bindTime", FieldValue::Time(at));
        }
    }

    /// Records an output event and queues its route deliveries.
    fn emit(&mut self, id: NodeId, field: &'static str, value: FieldValue) {
        self.record(id, field, &value);
        self.fan_out(id, field, value);
    }

    fn record(&mut self, id: NodeId, field: &'static str, value: &FieldValue) {
        let Some(name) = self.world.name_of(id) else {
            return;
        };
        let keep = match self.config.verbosity {
            Verbosity::Full => true,
            Verbosity::Discrete => {
                matches!(value, FieldValue::Bool(_) | FieldValue::Int(_) | FieldValue::Time(_))
            }
        };
        if keep {
            self.records.push(TraceRecord {
                at: self.now,
                seq: self.seq,
                node: name.to_string(),
                field: field.to_string(),
                value: value.clone(),
            });
            self.seq += 1;
            self.total_records += 1;
        }
    }

    fn fan_out(&mut self, id: NodeId, field: &'static str, value: FieldValue) {
        for (i, r) in self.world.routes().iter().enumerate() {
            if r.from == id && r.from_field == field && self.fired.insert(i) {
                self.queue.push_back((r.to, r.to_field, value.clone()));
            }
        }
    }

    fn drain(&mut self) {
        while let Some((to, field, value)) = self.queue.pop_front() {
            self.deliver(to, field, value);
        }
    }

    fn deliver(&mut self, id: NodeId, field: &'static str, value: FieldValue) {
        let kind = self.world.node(id).kind;
        let Some(spec) = schema::field(kind, field) else {
            return;
        };
        if !value.conforms_to(spec.ty) {
            return;
        }
        let at = self.now;
        match (kind, field, &value) {
            (NodeKind::Viewpoint, "set_bind", FieldValue::Bool(b)) => {
                if *b {
                    self.bind(id, at);
                } else {
                    self.unbind(id, at);
                }
            }
            (k, "set_fraction", FieldValue::Float(f)) if k.is_interpolator() => {
                if let Some(out) = self.interpolate(id, *f) {
                    self.record(id, "value_changed", &out);
                    self.fan_out(id, "value_changed", out);
                }
            }
            _ if spec.access == Access::InputOutput => {
                self.world.node_mut(id).set(field, value.clone());
                self.record(id, spec.name, &value);
                self.fan_out(id, spec.name, value);
            }
            _ => {}
        }
    }

    fn interpolate(&self, id: NodeId, f: f64) -> Option<FieldValue> {
        let n = self.world.node(id);
        let keys = n.floats("key");
        Some(match n.get("keyValue")? {
            FieldValue::Vec3s(v) => FieldValue::Vec3(interpolate_position(&KeyframeTrack::new(keys, v).ok()?, f)),
            FieldValue::Rotations(v) => {
                FieldValue::Rotation(interpolate_orientation(&KeyframeTrack::new(keys, v).ok()?, f))
            }
            FieldValue::Colors(v) => FieldValue::Color(interpolate_color(&KeyframeTrack::new(keys, v).ok()?, f)),
            _ => return None,
        })
    }
}
