//! Mission tree and blackboard for the controlled vessel.
//!
//! ```text
//! Root
//! └── R?
//!     ├── R-> [IsWayFree, MoveToTarget]
//!     ├── R-> [IsStaticObstacle, AvoidStatic]
//!     └── ?
//!         ├── R-> [IsRule13, ApplyRule13]
//!         ├── R-> [IsRule14, ApplyRule14]
//!         ├── R-> [IsRule15, ApplyRule15]
//!         └── R-> [IsRule17, ApplyRule17]
//! ```
//!
//! A rule leaf latches its encounter on the blackboard and keeps returning
//! `Running` until the encounter is cleared; while latched, `IsWayFree` fails
//! and only the matching `IsRuleNN` succeeds.

use crate::apf::{colregs_field, force_to_guidance, FieldParams};
use crate::colregs::{
    classify_encounter, encounter_cleared, encounter_geometry, ColregsThresholds, EncounterType,
};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::guidance::{
    advance_virtual_target, vtg_command, GuidanceCommand, GuidanceConfig, PlanarPath, VirtualTarget,
};
use crate::simulator::predict_min_separation;
use crate::vessel_dynamics::{VesselParams, VesselState};

use super::{BtNode, NodeStatus, TickHandler};

const IS_WAY_FREE: &str = "IsWayFree";
const IS_STATIC_OBSTACLE: &str = "IsStaticObstacle";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZestLeaf {
    MoveToTarget,
    AvoidStatic,
    ApplyRule13,
    ApplyRule14,
    ApplyRule15,
    ApplyRule17,
}

impl ZestLeaf {
    pub const ALL: [ZestLeaf; 6] = [
        ZestLeaf::MoveToTarget,
        ZestLeaf::AvoidStatic,
        ZestLeaf::ApplyRule13,
        ZestLeaf::ApplyRule14,
        ZestLeaf::ApplyRule15,
        ZestLeaf::ApplyRule17,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ZestLeaf::MoveToTarget => "MoveToTarget",
            ZestLeaf::AvoidStatic => "AvoidStatic",
            ZestLeaf::ApplyRule13 => "ApplyRule13",
            ZestLeaf::ApplyRule14 => "ApplyRule14",
            ZestLeaf::ApplyRule15 => "ApplyRule15",
            ZestLeaf::ApplyRule17 => "ApplyRule17",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == name)
    }

    fn rule(&self) -> Option<EncounterType> {
        match self {
            ZestLeaf::ApplyRule13 => Some(EncounterType::Overtaking),
            ZestLeaf::ApplyRule14 => Some(EncounterType::HeadOn),
            ZestLeaf::ApplyRule15 => Some(EncounterType::CrossingGiveWay),
            ZestLeaf::ApplyRule17 => Some(EncounterType::StandOn),
            _ => None,
        }
    }
}

const RULES: [(&str, EncounterType, ZestLeaf); 4] = [
    ("IsRule13", EncounterType::Overtaking, ZestLeaf::ApplyRule13),
    ("IsRule14", EncounterType::HeadOn, ZestLeaf::ApplyRule14),
    (
        "IsRule15",
        EncounterType::CrossingGiveWay,
        ZestLeaf::ApplyRule15,
    ),
    ("IsRule17", EncounterType::StandOn, ZestLeaf::ApplyRule17),
];

/// Every condition and leaf name the mission tree uses.
pub fn leaf_names() -> Vec<&'static str> {
    let mut names = vec![IS_WAY_FREE, IS_STATIC_OBSTACLE];
    names.extend(RULES.iter().map(|r| r.0));
    names.extend(ZestLeaf::ALL.iter().map(|l| l.name()));
    names
}

pub fn build_zest_tree() -> BtNode {
    let guarded = |cond: &str, leaf: ZestLeaf| {
        BtNode::recursive_sequence(vec![BtNode::condition(cond), BtNode::leaf(leaf.name())])
    };
    BtNode::root(BtNode::recursive_fallback(vec![
        guarded(IS_WAY_FREE, ZestLeaf::MoveToTarget),
        guarded(IS_STATIC_OBSTACLE, ZestLeaf::AvoidStatic),
        BtNode::fallback(RULES.iter().map(|(c, _, l)| guarded(c, *l)).collect()),
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatchedEncounter {
    pub kind: EncounterType,
    pub contact: usize,
}

/// Shared state of one controlled vessel's tree.
#[derive(Debug, Clone)]
pub struct Blackboard {
    pub own: VesselState,
    pub own_params: VesselParams,
    pub contacts: Vec<VesselState>,
    pub path: PlanarPath,
    pub vt: VirtualTarget,
    /// Arc length the target has covered since the start, unwrapped.
    pub vt_progress: f64,
    /// Progress at which the mission ends.
    pub mission_length: f64,
    pub goal: Vec2,
    pub guidance: GuidanceConfig,
    pub thresholds: ColregsThresholds,
    pub field: FieldParams,
    pub dt: f64,
    pub time: f64,
    pub latched: Option<LatchedEncounter>,
    pub command: Option<GuidanceCommand>,
    pub active_leaf: Option<ZestLeaf>,
    pub goal_reached: bool,
    /// Re-project the target onto the path before the next pursuit step.
    pub resync_target: bool,
    /// Per-node statuses of the current tick, when dumping is enabled.
    pub trace: Option<Vec<String>>,
}

impl Blackboard {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        own: VesselState,
        own_params: VesselParams,
        path: PlanarPath,
        laps: u32,
        guidance: GuidanceConfig,
        thresholds: ColregsThresholds,
        field: FieldParams,
        dt: f64,
    ) -> Self {
        let mission_length = if path.is_closed() {
            path.length() * laps.max(1) as f64
        } else {
            path.length()
        };
        let goal = path.point_at(mission_length);
        let vt = VirtualTarget::at(&path, 0.0);
        Self {
            own,
            own_params,
            contacts: Vec::new(),
            path,
            vt,
            vt_progress: 0.0,
            mission_length,
            goal,
            guidance,
            thresholds,
            field,
            dt,
            time: own.t,
            latched: None,
            command: None,
            active_leaf: None,
            goal_reached: false,
            resync_target: false,
            trace: None,
        }
    }

    /// Loads this tick's observations and clears the previous outputs.
    pub fn begin_tick(&mut self, own: VesselState, contacts: &[VesselState], time: f64) {
        self.own = own;
        self.contacts.clear();
        self.contacts.extend_from_slice(contacts);
        self.time = time;
        self.command = None;
        self.active_leaf = None;
        if let Some(trace) = self.trace.as_mut() {
            trace.clear();
        }
    }

    /// Rule obligation toward one contact, if it is close enough to matter:
    /// inside the clear range, forecast to come within the safety radius,
    /// and not classified as clear.
    pub fn conflict_with(&self, idx: usize) -> Option<EncounterType> {
        let other = self.contacts.get(idx)?;
        let geom = match encounter_geometry(&self.own, other) {
            Ok(g) => g,
            Err(_) => {
                return Some(if other.u.abs() < self.thresholds.static_speed_threshold {
                    EncounterType::StaticObstacle
                } else {
                    EncounterType::HeadOn
                })
            }
        };
        if geom.range > self.thresholds.clear_range {
            return None;
        }
        let (d_min, _) = predict_min_separation(
            &self.own,
            other,
            self.field.predict_horizon,
            self.field.scan_step,
        );
        if d_min > self.field.safety_radius {
            return None;
        }
        match classify_encounter(&geom, &self.thresholds) {
            EncounterType::Clear => None,
            kind => Some(kind),
        }
    }

    /// Closest contact with a rule obligation.
    pub fn nearest_conflict(&self) -> Option<(usize, EncounterType)> {
        let own = self.own.position();
        (0..self.contacts.len())
            .filter_map(|i| self.conflict_with(i).map(|k| (i, k)))
            .min_by(|a, b| {
                let da = (self.contacts[a.0].position() - own).norm();
                let db = (self.contacts[b.0].position() - own).norm();
                da.total_cmp(&db)
            })
    }

    /// Encounter currently driving behaviour, for logging.
    pub fn encounter(&self) -> EncounterType {
        match self.latched {
            Some(l) => l.kind,
            None => self
                .nearest_conflict()
                .map(|(_, k)| k)
                .unwrap_or(EncounterType::Clear),
        }
    }

    fn way_free(&self) -> bool {
        self.latched.is_none() && self.nearest_conflict().is_none()
    }

    fn mission_complete(&self) -> bool {
        self.vt_progress >= self.mission_length
            && (self.own.position() - self.goal).norm() < self.guidance.arrival_tolerance
    }

    fn move_target_to(&mut self, new_s: f64, delta: f64) {
        let remaining = self.mission_length - self.vt_progress;
        if delta >= remaining {
            self.vt_progress = self.mission_length;
            self.vt = VirtualTarget::at(&self.path, self.mission_length);
        } else {
            self.vt_progress += delta;
            self.vt = VirtualTarget::at(&self.path, new_s);
        }
    }

    /// Advances the virtual target one step and returns the pursuit command.
    pub fn pursue_target(&mut self) -> GuidanceCommand {
        if self.resync_target {
            self.resync_target = false;
            let s = self.path.project_ahead(&self.own.position(), self.vt.s);
            let delta = s - self.vt.s;
            if delta > 0.0 {
                self.move_target_to(s, delta);
            }
        }
        if self.vt_progress < self.mission_length {
            let next = advance_virtual_target(
                &self.path,
                &self.vt,
                &self.own,
                self.own_params.cruise_speed * self.guidance.target_speed_ratio,
                self.guidance.lag_limit,
                self.dt,
            );
            let delta = if self.path.is_closed() {
                (next.s - self.vt.s).rem_euclid(self.path.length())
            } else {
                next.s - self.vt.s
            };
            if delta > 0.0 {
                self.move_target_to(next.s, delta);
            }
        }
        vtg_command(
            &self.own,
            &self.vt,
            self.own_params.cruise_speed,
            self.guidance.arrival_radius,
        )
    }

    fn field_command(&self, contact: usize, kind: EncounterType) -> Option<GuidanceCommand> {
        let other = self.contacts.get(contact)?;
        let force = colregs_field(&self.own, other, kind, &self.goal, &self.field).ok()?;
        force_to_guidance(
            &force,
            kind,
            self.own_params.cruise_speed,
            self.guidance.slowdown,
        )
        .ok()
    }

    fn move_to_target(&mut self) -> NodeStatus {
        let cmd = self.pursue_target();
        if self.mission_complete() {
            self.goal_reached = true;
            self.command = Some(GuidanceCommand {
                desired_speed: 0.0,
                desired_heading: self.own.psi,
            });
            NodeStatus::Success
        } else {
            self.command = Some(cmd);
            NodeStatus::Running
        }
    }

    fn avoid_static(&mut self) -> NodeStatus {
        if self.way_free() {
            let cmd = self.pursue_target();
            self.command = Some(cmd);
            return NodeStatus::Success;
        }
        let cmd = match self.nearest_conflict() {
            Some((idx, EncounterType::StaticObstacle)) => {
                self.field_command(idx, EncounterType::StaticObstacle)
            }
            _ => None,
        };
        self.resync_target = true;
        self.command = Some(cmd.unwrap_or_else(|| self.pursue_target()));
        NodeStatus::Running
    }

    fn apply_rule(&mut self, kind: EncounterType) -> NodeStatus {
        let contact = match self.latched {
            Some(l) if l.kind == kind => l.contact,
            _ => match self.nearest_conflict() {
                Some((idx, k)) if k == kind => idx,
                _ => return NodeStatus::Failure,
            },
        };
        if self.latched.is_none() && kind != EncounterType::StandOn {
            self.resync_target = true;
        }
        self.latched = Some(LatchedEncounter { kind, contact });

        let cleared = self
            .contacts
            .get(contact)
            .and_then(|other| encounter_geometry(&self.own, other).ok())
            .is_some_and(|g| encounter_cleared(&g, &self.thresholds));
        if cleared || contact >= self.contacts.len() {
            self.latched = None;
            let cmd = self.pursue_target();
            self.command = Some(cmd);
            return NodeStatus::Success;
        }

        let cmd = if kind == EncounterType::StandOn {
            None
        } else {
            self.field_command(contact, kind)
        };
        self.command = Some(cmd.unwrap_or_else(|| self.pursue_target()));
        NodeStatus::Running
    }
}

impl TickHandler for Blackboard {
    fn condition(&self, name: &str) -> Result<bool> {
        if name == IS_WAY_FREE {
            return Ok(self.way_free());
        }
        let wanted = if name == IS_STATIC_OBSTACLE {
            EncounterType::StaticObstacle
        } else {
            RULES
                .iter()
                .find(|r| r.0 == name)
                .map(|r| r.1)
                .ok_or_else(|| Error::UnknownNode(name.into()))?
        };
        Ok(match self.latched {
            Some(l) => l.kind == wanted,
            None => self.nearest_conflict().is_some_and(|(_, k)| k == wanted),
        })
    }

    fn action(&mut self, name: &str) -> Result<NodeStatus> {
        let leaf = ZestLeaf::from_name(name).ok_or_else(|| Error::UnknownNode(name.into()))?;
        self.active_leaf = Some(leaf);
        Ok(match leaf {
            ZestLeaf::MoveToTarget => self.move_to_target(),
            ZestLeaf::AvoidStatic => self.avoid_static(),
            other => self.apply_rule(other.rule().expect("rule leaf")),
        })
    }

    fn observe(&mut self, node: &BtNode, status: NodeStatus) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(format!("{}={}", node.label(), status));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior_tree::tick;
    use std::f64::consts::PI;

    fn board(own: VesselState, goal: Vec2) -> Blackboard {
        let params = VesselParams::default();
        let path = PlanarPath::straight(own.position(), goal).unwrap();
        Blackboard::new(
            own,
            params,
            path,
            1,
            GuidanceConfig::default(),
            ColregsThresholds::default(),
            FieldParams::for_vessel(&params),
            0.1,
        )
    }

    #[test]
    fn tree_is_valid_and_names_resolve() {
        let tree = build_zest_tree();
        tree.validate().unwrap();
        let bb = board(VesselState::new(0.0, 0.0, 0.0, 0.0), Vec2::new(100.0, 0.0));
        for name in leaf_names() {
            if ZestLeaf::from_name(name).is_none() {
                bb.condition(name).unwrap();
            }
        }
        assert!(bb.condition("IsRule99").is_err());
    }

    #[test]
    fn clear_scene_moves_to_target() {
        let mut tree = build_zest_tree();
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let mut bb = board(own, Vec2::new(100.0, 0.0));
        bb.contacts.push(VesselState::new(0.0, 300.0, 0.0, 1.0));
        assert!(bb.condition(IS_WAY_FREE).unwrap());
        assert_eq!(tick(&mut tree, &mut bb).unwrap(), NodeStatus::Running);
        assert_eq!(bb.active_leaf, Some(ZestLeaf::MoveToTarget));
        assert!(bb.command.is_some());
    }

    #[test]
    fn goal_reached_succeeds() {
        let mut tree = build_zest_tree();
        let goal = Vec2::new(100.0, 0.0);
        let mut bb = board(VesselState::new(0.0, 0.0, 0.0, 0.0), goal);
        bb.vt_progress = bb.mission_length;
        bb.vt = VirtualTarget::at(&bb.path, bb.mission_length);
        bb.own = VesselState::new(99.0, 0.5, 0.0, 0.3);
        assert_eq!(tick(&mut tree, &mut bb).unwrap(), NodeStatus::Success);
        assert!(bb.goal_reached);
    }

    #[test]
    fn head_on_contact_activates_rule_14() {
        let mut tree = build_zest_tree();
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let mut bb = board(own, Vec2::new(200.0, 0.0));
        bb.contacts.push(VesselState::new(80.0, 0.0, PI, 1.5));
        assert!(!bb.condition(IS_WAY_FREE).unwrap());
        assert!(bb.condition("IsRule14").unwrap());
        assert_eq!(tick(&mut tree, &mut bb).unwrap(), NodeStatus::Running);
        assert_eq!(bb.active_leaf, Some(ZestLeaf::ApplyRule14));
        assert_eq!(bb.latched.map(|l| l.kind), Some(EncounterType::HeadOn));
        let cmd = bb.command.unwrap();
        assert!(cmd.desired_heading > 0.0);
        assert_eq!(cmd.desired_speed, 1.25);
    }

    #[test]
    fn stand_on_keeps_pursuit_command() {
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let mut bb = board(own, Vec2::new(160.0, 0.0));
        // collision course from port
        bb.contacts
            .push(VesselState::new(40.0, -20.0, PI / 2.0, 1.0));
        let mut plain = bb.clone();
        plain.contacts.clear();

        let mut tree = build_zest_tree();
        assert_eq!(tick(&mut tree, &mut bb).unwrap(), NodeStatus::Running);
        assert_eq!(bb.active_leaf, Some(ZestLeaf::ApplyRule17));

        let mut plain_tree = build_zest_tree();
        tick(&mut plain_tree, &mut plain).unwrap();
        assert_eq!(bb.command, plain.command);
        assert_eq!(bb.vt, plain.vt);
    }

    #[test]
    fn cleared_rule_returns_success() {
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let mut bb = board(own, Vec2::new(300.0, 0.0));
        // opening, astern, beyond release range
        bb.contacts.push(VesselState::new(-30.0, 70.0, 0.0, 1.5));
        bb.latched = Some(LatchedEncounter {
            kind: EncounterType::CrossingGiveWay,
            contact: 0,
        });
        assert_eq!(bb.action("ApplyRule15").unwrap(), NodeStatus::Success);
        assert!(bb.latched.is_none());
        assert!(bb.command.is_some());
    }

    #[test]
    fn unknown_leaf_rejected() {
        let mut bb = board(VesselState::new(0.0, 0.0, 0.0, 0.0), Vec2::new(100.0, 0.0));
        assert_eq!(bb.action("Dance"), Err(Error::UnknownNode("Dance".into())));
    }
}
