//! Potential-field local planner.
//!
//! Quadratic attraction to the goal, Khatib-style repulsion inside the
//! influence radius, and a predictive term that pushes sideways when the
//! constant-velocity forecast brings the contact inside the influence radius.
//! [`colregs_field`] shapes the lateral part of the field according to the
//! active rule.

use serde::{Deserialize, Serialize};

use crate::colregs::EncounterType;
use crate::error::{Error, Result};
use crate::geometry::{bearing_of, heading_vector, starboard_vector, Vec2};
use crate::guidance::GuidanceCommand;
use crate::simulator::predict_min_separation;
use crate::vessel_dynamics::{VesselParams, VesselState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub k_att: f64,
    pub k_rep: f64,
    pub influence_radius: f64,
    /// Always twice the own beam.
    pub safety_radius: f64,
    pub predict_horizon: f64,
    pub k_pred: f64,
    pub lateral_bias_gain: f64,
    pub max_force: f64,
    pub min_distance: f64,
    /// Time resolution of the separation forecast.
    pub scan_step: f64,
}

impl FieldParams {
    /// Default field for a vessel: safety radius 2 × beam, influence radius
    /// 5 × safety radius.
    pub fn for_vessel(params: &VesselParams) -> Self {
        let safety_radius = 2.0 * params.beam;
        Self {
            k_att: 1.0,
            k_rep: 4e5,
            influence_radius: 5.0 * safety_radius,
            safety_radius,
            predict_horizon: 60.0,
            k_pred: 4e5,
            lateral_bias_gain: 1.0,
            max_force: 1e4,
            min_distance: 0.5,
            scan_step: 0.1,
        }
    }

    pub fn validate(&self, params: &VesselParams) -> Result<()> {
        if self.safety_radius != 2.0 * params.beam {
            return Err(Error::InvalidConfig(format!(
                "apf.safety_radius must equal 2 x beam ({}), got {}",
                2.0 * params.beam,
                self.safety_radius
            )));
        }
        if !(self.influence_radius > self.safety_radius
            && self.safety_radius > self.min_distance
            && self.min_distance > 0.0)
        {
            return Err(Error::InvalidConfig(
                "apf: need influence_radius > safety_radius > min_distance > 0".into(),
            ));
        }
        let non_negative = [
            ("k_att", self.k_att),
            ("k_rep", self.k_rep),
            ("k_pred", self.k_pred),
            ("lateral_bias_gain", self.lateral_bias_gain),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("apf.{name} must be >= 0")));
            }
        }
        if !(self.max_force > 0.0 && self.predict_horizon > 0.0 && self.scan_step > 0.0) {
            return Err(Error::InvalidConfig(
                "apf: max_force, predict_horizon and scan_step must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Planar force, north then east.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ForceVector {
    pub fx: f64,
    pub fy: f64,
}

impl ForceVector {
    pub fn new(fx: f64, fy: f64) -> Self {
        Self { fx, fy }
    }

    pub fn from_vec(v: Vec2) -> Self {
        Self { fx: v.x, fy: v.y }
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.fx, self.fy)
    }

    pub fn magnitude(&self) -> f64 {
        self.fx.hypot(self.fy)
    }

    pub fn clamped(self, max: f64) -> Self {
        let m = self.magnitude();
        if m > max {
            Self::from_vec(self.as_vec() * (max / m))
        } else {
            self
        }
    }
}

impl std::ops::Add for ForceVector {
    type Output = ForceVector;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.fx + rhs.fx, self.fy + rhs.fy)
    }
}

pub fn attractive_potential(pos: &Vec2, goal: &Vec2, k_att: f64) -> f64 {
    0.5 * k_att * (goal - pos).norm_squared()
}

pub fn attractive_force(pos: &Vec2, goal: &Vec2, k_att: f64) -> ForceVector {
    ForceVector::from_vec((goal - pos) * k_att)
}

/// `½ k_rep (1/d - 1/d0)²` inside the influence radius, zero outside.
pub fn repulsive_potential(pos: &Vec2, obstacle: &Vec2, fp: &FieldParams) -> f64 {
    let d = (pos - obstacle).norm().max(fp.min_distance);
    if d > fp.influence_radius {
        return 0.0;
    }
    let g = 1.0 / d - 1.0 / fp.influence_radius;
    0.5 * fp.k_rep * g * g
}

pub fn repulsive_force(pos: &Vec2, obstacle: &Vec2, fp: &FieldParams) -> ForceVector {
    let delta = pos - obstacle;
    let raw = delta.norm();
    let d = raw.max(fp.min_distance);
    if d > fp.influence_radius {
        return ForceVector::default();
    }
    let magnitude = fp.k_rep * (1.0 / d - 1.0 / fp.influence_radius) / (d * d);
    // coincident: push north
    let dir = if raw > 0.0 {
        delta / raw
    } else {
        Vec2::new(1.0, 0.0)
    };
    ForceVector::from_vec(dir * magnitude).clamped(fp.max_force)
}

/// Lateral deflection from the forecast closest approach.
///
/// The force acts perpendicular to own heading, away from where the contact
/// will be at the moment of minimum separation. An exact tie (collision
/// course) deflects to starboard.
pub fn predictive_force(own: &VesselState, other: &VesselState, fp: &FieldParams) -> ForceVector {
    let (d_min, t_min) = predict_min_separation(own, other, fp.predict_horizon, fp.scan_step);
    if d_min > fp.influence_radius {
        return ForceVector::default();
    }
    let d = d_min.max(fp.min_distance);
    let magnitude = fp.k_pred * (1.0 / d - 1.0 / fp.influence_radius);
    let stbd = starboard_vector(own.psi);
    let own_at = own.position() + own.velocity() * t_min;
    let other_at = other.position() + other.velocity() * t_min;
    let side = (other_at - own_at).dot(&stbd);
    let dir = if side > 1e-9 { -stbd } else { stbd };
    ForceVector::from_vec(dir * magnitude).clamped(fp.max_force)
}

/// Starboard direction of the reference course: the bearing to the goal, or
/// own heading once the goal is reached.
fn course_starboard(own: &VesselState, goal: &Vec2) -> Vec2 {
    let to_goal = goal - own.position();
    if to_goal.norm() > 1e-9 {
        starboard_vector(bearing_of(&to_goal))
    } else {
        starboard_vector(own.psi)
    }
}

/// Lateral side (starboard = +1) on which a rule wants own vessel to pass.
fn rule_side(
    own: &VesselState,
    other: &VesselState,
    encounter: EncounterType,
    stbd: &Vec2,
    fp: &FieldParams,
) -> f64 {
    match encounter {
        EncounterType::Overtaking => {
            let lateral = (other.position() - own.position()).dot(stbd);
            if lateral > fp.safety_radius {
                -1.0
            } else {
                1.0
            }
        }
        _ => 1.0,
    }
}

/// Total avoidance field for an active encounter.
///
/// Lateral directions are taken across the bearing to the goal. Under rules
/// 13, 14 and 15 the predictive deflection is applied on the side
/// the rule prescribes and a bias of `lateral_bias_gain · |F_att|` is added on
/// that side; for crossing the bias also pulls toward a point one influence
/// radius astern of the other vessel. Stand-on and static obstacles keep the
/// unshaped predictive term and get no bias.
pub fn colregs_field(
    own: &VesselState,
    other: &VesselState,
    encounter: EncounterType,
    goal: &Vec2,
    fp: &FieldParams,
) -> Result<ForceVector> {
    if encounter == EncounterType::Clear {
        return Err(Error::NoFieldNeeded);
    }
    let pos = own.position();
    let att = attractive_force(&pos, goal, fp.k_att);
    let rep = repulsive_force(&pos, &other.position(), fp);
    let pred = predictive_force(own, other, fp);
    let stbd = course_starboard(own, goal);
    let bias_mag = fp.lateral_bias_gain * att.magnitude();

    let total = match encounter {
        EncounterType::Overtaking | EncounterType::HeadOn | EncounterType::CrossingGiveWay => {
            let side = rule_side(own, other, encounter, &stbd, fp);
            let lateral = stbd * side;
            let mut shaped = lateral * (pred.magnitude() + bias_mag);
            if encounter == EncounterType::CrossingGiveWay {
                let astern = other.position() - heading_vector(other.psi) * fp.influence_radius;
                let to_astern = astern - pos;
                let n = to_astern.norm();
                if n > 0.0 {
                    shaped += to_astern * (bias_mag / n);
                }
            }
            att + rep + ForceVector::from_vec(shaped)
        }
        EncounterType::StandOn | EncounterType::StaticObstacle => att + rep + pred,
        EncounterType::Clear => unreachable!(),
    };
    Ok(total.clamped(fp.max_force))
}

/// Turns a field force into a speed/heading demand, slowing down while giving
/// way under rules 13 and 14.
pub fn force_to_guidance(
    force: &ForceVector,
    encounter: EncounterType,
    cruise_speed: f64,
    slowdown: f64,
) -> Result<GuidanceCommand> {
    if !(force.magnitude() > 0.0) {
        return Err(Error::UndefinedDirection);
    }
    let factor = match encounter {
        EncounterType::Overtaking | EncounterType::HeadOn => slowdown,
        _ => 1.0,
    };
    Ok(GuidanceCommand {
        desired_speed: cruise_speed * factor,
        desired_heading: bearing_of(&force.as_vec()),
    })
}
