//! Reference scenarios used by the suite and the acceptance tests.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::vessel_dynamics::{VesselParams, VesselState};

use super::{RedScript, RedVessel, Route, ScenarioConfig};

pub const FIGURE_EIGHT: &str = "figure8";
pub const OVERTAKING: &str = "rule13_overtaking";
pub const HEAD_ON: &str = "rule14_head_on";
pub const CROSSING_GIVE_WAY: &str = "rule15_crossing";
pub const STAND_ON: &str = "rule17_stand_on";

pub fn names() -> [&'static str; 5] {
    [
        FIGURE_EIGHT,
        OVERTAKING,
        HEAD_ON,
        CROSSING_GIVE_WAY,
        STAND_ON,
    ]
}

pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    match name {
        FIGURE_EIGHT => Some(figure_eight()),
        OVERTAKING => Some(overtaking()),
        HEAD_ON => Some(head_on()),
        CROSSING_GIVE_WAY => Some(crossing_give_way()),
        STAND_ON => Some(stand_on()),
        _ => None,
    }
}

pub fn all() -> Vec<ScenarioConfig> {
    names().iter().filter_map(|n| by_name(n)).collect()
}

/// One lap of a lemniscate of half-width 40 m, starting at its centre.
pub fn figure_eight() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(
        FIGURE_EIGHT,
        Route::Lemniscate {
            amplitude: 40.0,
            n_samples: 4096,
            laps: 1,
        },
    );
    c.white.initial = VesselState::new(0.0, 0.0, FRAC_PI_4, 0.0);
    c.max_time = 400.0;
    c
}

/// White heading north from the origin toward (160, 0), red placed by the
/// caller.
pub fn encounter(name: &str, red_pos: (f64, f64), red_psi: f64, red_speed: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(name, Route::Goal([160.0, 0.0]));
    c.white.initial = VesselState::new(0.0, 0.0, 0.0, 0.0);
    c.red = Some(RedVessel {
        params: VesselParams::default(),
        initial: VesselState::new(red_pos.0, red_pos.1, red_psi, red_speed),
        script: RedScript::ConstantSpeed(red_speed),
    });
    c
}

pub fn overtaking() -> ScenarioConfig {
    encounter(OVERTAKING, (40.0, 0.0), 0.0, 0.5)
}

pub fn head_on() -> ScenarioConfig {
    let mut c = encounter(HEAD_ON, (120.0, 0.0), -PI, 1.5);
    c.white.route = Route::Goal([200.0, 0.0]);
    c
}

pub fn crossing_give_way() -> ScenarioConfig {
    encounter(CROSSING_GIVE_WAY, (60.0, 60.0), -FRAC_PI_2, 1.5)
}

pub fn stand_on() -> ScenarioConfig {
    encounter(STAND_ON, (20.0, -40.0), FRAC_PI_2, 1.0)
}
