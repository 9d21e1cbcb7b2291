//! Two-vessel encounter geometry and rule classification.
//!
//! Bearings are measured relative to the observer's heading, positive to
//! starboard, in `(-π, π]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap_angle;
use crate::vessel_dynamics::VesselState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncounterGeometry {
    pub range: f64,
    pub bearing_own_to_other: f64,
    pub bearing_other_to_own: f64,
    /// `wrap(other.psi - own.psi)`.
    pub heading_delta: f64,
    /// Positive when the range is opening.
    pub range_rate: f64,
    pub other_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncounterType {
    Clear,
    StaticObstacle,
    /// Rule 13: own vessel is overtaking.
    Overtaking,
    /// Rule 14.
    HeadOn,
    /// Rule 15: other vessel on own starboard side, own gives way.
    CrossingGiveWay,
    /// Rule 17: other vessel on own port side, own stands on.
    StandOn,
}

impl EncounterType {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncounterType::Clear => "Clear",
            EncounterType::StaticObstacle => "StaticObstacle",
            EncounterType::Overtaking => "Overtaking",
            EncounterType::HeadOn => "HeadOn",
            EncounterType::CrossingGiveWay => "CrossingGiveWay",
            EncounterType::StandOn => "StandOn",
        }
    }

    pub fn rule_number(&self) -> Option<u8> {
        match self {
            EncounterType::Overtaking => Some(13),
            EncounterType::HeadOn => Some(14),
            EncounterType::CrossingGiveWay => Some(15),
            EncounterType::StandOn => Some(17),
            _ => None,
        }
    }
}

impl fmt::Display for EncounterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColregsThresholds {
    pub head_on_half_angle: f64,
    pub reciprocal_tolerance: f64,
    /// Bearing from the other vessel's bow beyond which own lies in its stern
    /// sector (22.5° abaft the beam).
    pub overtake_boundary: f64,
    pub static_speed_threshold: f64,
    pub clear_range: f64,
    pub release_range: f64,
}

impl Default for ColregsThresholds {
    fn default() -> Self {
        Self {
            head_on_half_angle: 15f64.to_radians(),
            reciprocal_tolerance: 15f64.to_radians(),
            overtake_boundary: 112.5f64.to_radians(),
            static_speed_threshold: 0.2,
            clear_range: 150.0,
            release_range: 60.0,
        }
    }
}

impl ColregsThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.head_on_half_angle
            && self.head_on_half_angle < self.overtake_boundary
            && self.overtake_boundary < PI)
        {
            return Err(Error::InvalidConfig(
                "colregs: need 0 < head_on_half_angle < overtake_boundary < pi".into(),
            ));
        }
        if !(self.reciprocal_tolerance > 0.0 && self.reciprocal_tolerance < PI) {
            return Err(Error::InvalidConfig(
                "colregs: reciprocal_tolerance must lie in (0, pi)".into(),
            ));
        }
        if !(self.static_speed_threshold >= 0.0
            && self.release_range > 0.0
            && self.clear_range >= self.release_range)
        {
            return Err(Error::InvalidConfig(
                "colregs: need static_speed_threshold >= 0 and 0 < release_range <= clear_range"
                    .into(),
            ));
        }
        Ok(())
    }
}

pub fn encounter_geometry(own: &VesselState, other: &VesselState) -> Result<EncounterGeometry> {
    let rel = other.position() - own.position();
    let range = rel.norm();
    if !(range > 1e-9) {
        return Err(Error::DegenerateGeometry);
    }
    let los = rel.y.atan2(rel.x);
    let rel_vel = other.velocity() - own.velocity();
    Ok(EncounterGeometry {
        range,
        bearing_own_to_other: wrap_angle(los - own.psi),
        bearing_other_to_own: wrap_angle(los + PI - other.psi),
        heading_delta: wrap_angle(other.psi - own.psi),
        range_rate: rel.dot(&rel_vel) / range,
        other_speed: other.u.abs(),
    })
}

/// Priority-ordered classification. Ties on sector boundaries resolve toward
/// the give-way class (head-on over crossing, overtaking over crossing).
pub fn classify_encounter(geom: &EncounterGeometry, th: &ColregsThresholds) -> EncounterType {
    if geom.other_speed < th.static_speed_threshold {
        return EncounterType::StaticObstacle;
    }
    if geom.range > th.clear_range || (geom.range_rate > 0.0 && geom.range > th.release_range) {
        return EncounterType::Clear;
    }
    let closing = geom.range_rate < 0.0;
    if geom.bearing_other_to_own.abs() >= th.overtake_boundary && closing {
        return EncounterType::Overtaking;
    }
    let b = geom.bearing_own_to_other;
    if b.abs() <= th.head_on_half_angle
        && wrap_angle(geom.heading_delta - PI).abs() <= th.reciprocal_tolerance
    {
        return EncounterType::HeadOn;
    }
    if b > th.head_on_half_angle && b <= th.overtake_boundary {
        return EncounterType::CrossingGiveWay;
    }
    if b >= -th.overtake_boundary && b < -th.head_on_half_angle {
        return EncounterType::StandOn;
    }
    EncounterType::Clear
}

/// An active rule is complete once the range opens past `release_range` with
/// the other vessel abaft own beam.
pub fn encounter_cleared(geom: &EncounterGeometry, th: &ColregsThresholds) -> bool {
    geom.range_rate > 0.0
        && geom.range > th.release_range
        && geom.bearing_own_to_other.abs() > FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn own() -> VesselState {
        VesselState::new(0.0, 0.0, 0.0, 2.5)
    }

    fn classify(own: &VesselState, other: &VesselState) -> EncounterType {
        let g = encounter_geometry(own, other).unwrap();
        classify_encounter(&g, &ColregsThresholds::default())
    }

    #[test]
    fn bearings() {
        let g = encounter_geometry(&own(), &VesselState::new(50.0, 0.0, 0.0, 2.5)).unwrap();
        assert_eq!(g.bearing_own_to_other, 0.0);
        assert_eq!(g.range_rate, 0.0);
        let g = encounter_geometry(&own(), &VesselState::new(0.0, 50.0, 0.0, 2.5)).unwrap();
        assert!((g.bearing_own_to_other - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn coincident_is_degenerate() {
        assert_eq!(
            encounter_geometry(&own(), &own()),
            Err(Error::DegenerateGeometry)
        );
    }

    #[test]
    fn four_rules() {
        let head_on = VesselState::new(50.0, 0.0, PI, 1.5);
        assert_eq!(classify(&own(), &head_on), EncounterType::HeadOn);

        let slow_ahead = VesselState::new(50.0, 0.0, 0.0, 0.5);
        assert_eq!(classify(&own(), &slow_ahead), EncounterType::Overtaking);

        let from_stbd = VesselState::new(0.0, 50.0, -FRAC_PI_2, 1.5);
        assert_eq!(classify(&own(), &from_stbd), EncounterType::CrossingGiveWay);

        let from_port = VesselState::new(0.0, -50.0, FRAC_PI_2, 1.5);
        assert_eq!(classify(&own(), &from_port), EncounterType::StandOn);
    }

    #[test]
    fn range_gate_and_static() {
        let far = VesselState::new(200.0, 0.0, PI, 1.5);
        assert_eq!(classify(&own(), &far), EncounterType::Clear);
        let buoy = VesselState::new(30.0, 0.0, 0.0, 0.0);
        assert_eq!(classify(&own(), &buoy), EncounterType::StaticObstacle);
    }

    #[test]
    fn overtaking_boundary_is_inclusive() {
        let th = ColregsThresholds::default();
        let mut g = EncounterGeometry {
            range: 50.0,
            bearing_own_to_other: 0.0,
            bearing_other_to_own: th.overtake_boundary,
            heading_delta: 0.0,
            range_rate: -1.0,
            other_speed: 1.0,
        };
        assert_eq!(classify_encounter(&g, &th), EncounterType::Overtaking);
        g.bearing_other_to_own = th.overtake_boundary - 1e-9;
        assert_ne!(classify_encounter(&g, &th), EncounterType::Overtaking);
    }

    #[test]
    fn head_on_wins_sector_boundary() {
        let th = ColregsThresholds::default();
        let g = EncounterGeometry {
            range: 50.0,
            bearing_own_to_other: th.head_on_half_angle,
            bearing_other_to_own: 0.0,
            heading_delta: PI,
            range_rate: -3.0,
            other_speed: 1.0,
        };
        assert_eq!(classify_encounter(&g, &th), EncounterType::HeadOn);
    }

    #[test]
    fn cleared_gates() {
        let th = ColregsThresholds::default();
        let mut g = EncounterGeometry {
            range: 100.0,
            bearing_own_to_other: 3.0,
            bearing_other_to_own: 0.0,
            heading_delta: PI,
            range_rate: 1.0,
            other_speed: 1.0,
        };
        assert!(encounter_cleared(&g, &th));
        g.range_rate = -1.0;
        assert!(!encounter_cleared(&g, &th));
        g.range_rate = 1.0;
        g.bearing_own_to_other = 0.5;
        assert!(!encounter_cleared(&g, &th));
    }

    #[test]
    fn default_thresholds_valid() {
        ColregsThresholds::default().validate().unwrap();
        let bad = ColregsThresholds {
            head_on_half_angle: 2.0,
            ..ColregsThresholds::default()
        };
        assert!(bad.validate().is_err());
    }
}
