//! TOML scenario files.
//!
//! ```toml
//! [vessel.white]
//! initial = { x = 0.0, y = 0.0, psi = 0.0, u = 0.0 }
//! goal = [160.0, 0.0]          # or waypoints = [[..], ..] or lemniscate = {..}
//!
//! [vessel.white.params]        # any VesselParams field
//! beam = 4.0
//!
//! [vessel.red]
//! initial = { x = 60.0, y = 60.0, psi = -1.5707963267948966 }
//! speed = 1.5                  # or thrust = <N per motor>
//!
//! [guidance]                   # GuidanceConfig fields
//! [colregs]                    # ColregsThresholds fields, angles in radians
//! [apf]                        # FieldParams fields; safety_radius is 2 x beam
//! [sim]                        # name, dt, max_time, seed, [sim.noise]
//! ```

use serde::{Deserialize, Serialize};

use zest_core::apf::FieldParams;
use zest_core::colregs::ColregsThresholds;
use zest_core::geometry::wrap_heading;
use zest_core::guidance::GuidanceConfig;
use zest_core::simulator::{RedScript, RedVessel, Route, ScenarioConfig, SensorNoise, WhiteVessel};
use zest_core::vessel_dynamics::{VesselParams, VesselState};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub vessel: VesselSection,
    #[serde(default)]
    pub guidance: GuidanceConfig,
    #[serde(default)]
    pub colregs: ColregsThresholds,
    #[serde(default)]
    pub apf: ApfSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselSection {
    pub white: WhiteSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub red: Option<RedSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub r: f64,
}

impl InitialState {
    fn to_state(self) -> VesselState {
        VesselState {
            x: self.x,
            y: self.y,
            psi: wrap_heading(self.psi),
            u: self.u,
            r: self.r,
            t: 0.0,
        }
    }

    fn from_state(s: &VesselState) -> Self {
        Self {
            x: s.x,
            y: s.y,
            psi: s.psi,
            u: s.u,
            r: s.r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemniscateSpec {
    pub amplitude: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default = "default_laps")]
    pub laps: u32,
}

fn default_samples() -> usize {
    4096
}

fn default_laps() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhiteSection {
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waypoints: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemniscate: Option<LemniscateSpec>,
    #[serde(default)]
    pub params: VesselParams,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedSection {
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thrust: Option<f64>,
    #[serde(default)]
    pub params: VesselParams,
}

/// Field parameters; omitted keys take the defaults for the white vessel,
/// `scan_step` defaults to `sim.dt`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApfSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_att: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_rep: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub influence_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safety_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predict_horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_pred: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lateral_bias_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_force: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub name: String,
    pub dt: f64,
    pub max_time: f64,
    pub seed: u64,
    pub noise: SensorNoise,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            dt: 0.1,
            max_time: 600.0,
            seed: 0,
            noise: SensorNoise::default(),
        }
    }
}

impl ApfSection {
    fn resolve(&self, white: &VesselParams, dt: f64) -> FieldParams {
        let d = FieldParams::for_vessel(white);
        FieldParams {
            k_att: self.k_att.unwrap_or(d.k_att),
            k_rep: self.k_rep.unwrap_or(d.k_rep),
            influence_radius: self.influence_radius.unwrap_or(d.influence_radius),
            safety_radius: self.safety_radius.unwrap_or(d.safety_radius),
            predict_horizon: self.predict_horizon.unwrap_or(d.predict_horizon),
            k_pred: self.k_pred.unwrap_or(d.k_pred),
            lateral_bias_gain: self.lateral_bias_gain.unwrap_or(d.lateral_bias_gain),
            max_force: self.max_force.unwrap_or(d.max_force),
            min_distance: self.min_distance.unwrap_or(d.min_distance),
            scan_step: self.scan_step.unwrap_or(dt),
        }
    }

    fn explicit(fp: &FieldParams) -> Self {
        Self {
            k_att: Some(fp.k_att),
            k_rep: Some(fp.k_rep),
            influence_radius: Some(fp.influence_radius),
            safety_radius: Some(fp.safety_radius),
            predict_horizon: Some(fp.predict_horizon),
            k_pred: Some(fp.k_pred),
            lateral_bias_gain: Some(fp.lateral_bias_gain),
            max_force: Some(fp.max_force),
            min_distance: Some(fp.min_distance),
            scan_step: Some(fp.scan_step),
        }
    }
}

impl ScenarioFile {
    /// Resolves defaults without validating.
    pub fn to_config(&self) -> Result<ScenarioConfig, CliError> {
        let w = &self.vessel.white;
        let route = match (&w.goal, &w.waypoints, &w.lemniscate) {
            (Some(g), None, None) => Route::Goal(*g),
            (None, Some(p), None) => Route::Waypoints(p.clone()),
            (None, None, Some(l)) => Route::Lemniscate {
                amplitude: l.amplitude,
                n_samples: l.n_samples,
                laps: l.laps,
            },
            _ => {
                return Err(CliError::Schema(
                    "vessel.white needs exactly one of goal, waypoints, lemniscate".into(),
                ))
            }
        };
        let red = match &self.vessel.red {
            None => None,
            Some(r) => {
                let script = match (r.speed, r.thrust) {
                    (Some(v), None) => RedScript::ConstantSpeed(v),
                    (None, Some(t)) => RedScript::ConstantThrust(t),
                    _ => {
                        return Err(CliError::Schema(
                            "vessel.red needs exactly one of speed, thrust".into(),
                        ))
                    }
                };
                Some(RedVessel {
                    params: r.params,
                    initial: r.initial.to_state(),
                    script,
                })
            }
        };
        Ok(ScenarioConfig {
            name: self.sim.name.clone(),
            white: WhiteVessel {
                params: w.params,
                initial: w.initial.to_state(),
                route,
            },
            red,
            thresholds: self.colregs,
            field: self.apf.resolve(&w.params, self.sim.dt),
            guidance: self.guidance,
            dt: self.sim.dt,
            max_time: self.sim.max_time,
            noise: self.sim.noise,
            seed: self.sim.seed,
        })
    }

    /// Fully explicit file for a config.
    pub fn from_config(c: &ScenarioConfig) -> Self {
        let (goal, waypoints, lemniscate) = match &c.white.route {
            Route::Goal(g) => (Some(*g), None, None),
            Route::Waypoints(p) => (None, Some(p.clone()), None),
            Route::Lemniscate {
                amplitude,
                n_samples,
                laps,
            } => (
                None,
                None,
                Some(LemniscateSpec {
                    amplitude: *amplitude,
                    n_samples: *n_samples,
                    laps: *laps,
                }),
            ),
        };
        let red = c.red.as_ref().map(|r| {
            let (speed, thrust) = match r.script {
                RedScript::ConstantSpeed(v) => (Some(v), None),
                RedScript::ConstantThrust(t) => (None, Some(t)),
            };
            RedSection {
                initial: InitialState::from_state(&r.initial),
                speed,
                thrust,
                params: r.params,
            }
        });
        Self {
            vessel: VesselSection {
                white: WhiteSection {
                    initial: InitialState::from_state(&c.white.initial),
                    goal,
                    waypoints,
                    lemniscate,
                    params: c.white.params,
                },
                red,
            },
            guidance: c.guidance,
            colregs: c.thresholds,
            apf: ApfSection::explicit(&c.field),
            sim: SimSection {
                name: c.name.clone(),
                dt: c.dt,
                max_time: c.max_time,
                seed: c.seed,
                noise: c.noise,
            },
        }
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioConfig, CliError> {
    let file: ScenarioFile = toml::from_str(text)?;
    let config = file.to_config()?;
    config.validate()?;
    Ok(config)
}

pub fn serialize_scenario(config: &ScenarioConfig) -> Result<String, CliError> {
    Ok(toml::to_string(&ScenarioFile::from_config(config))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zest_core::simulator::scenarios;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_scenario_file("[vessel.white]\ngoal = [100.0, 0.0]\n").unwrap();
        let mut expected = ScenarioConfig::new("scenario", Route::Goal([100.0, 0.0]));
        expected.field.scan_step = expected.dt;
        assert_eq!(c, expected);
    }

    #[test]
    fn safety_radius_follows_beam() {
        let text = "[vessel.white]\ngoal = [100.0, 0.0]\n[vessel.white.params]\nbeam = 4.0\n";
        assert_eq!(parse_scenario_file(text).unwrap().field.safety_radius, 8.0);
        let text = "[vessel.white]\ngoal = [100.0, 0.0]\n[vessel.white.params]\nbeam = 3.0\n";
        assert_eq!(parse_scenario_file(text).unwrap().field.safety_radius, 6.0);
    }

    #[test]
    fn contradicting_safety_radius_rejected() {
        let text = "[vessel.white]\ngoal = [100.0, 0.0]\n[apf]\nsafety_radius = 10.0\n";
        assert!(matches!(
            parse_scenario_file(text),
            Err(CliError::Invalid(_))
        ));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_scenario_file("[vessel.white]\ngoal = [1.0, 0.0]\nspeeed = 2.0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("speeed"), "{err}");
        let err = parse_scenario_file("[vessel.white]\ngoal = [1.0, 0.0]\n[sim]\nfoo = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("foo"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_scenario_file("[vessel.white]\ngoal = [1.0, \n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn invalid_values_rejected() {
        let text = "[vessel.white]\ngoal = [100.0, 0.0]\n[sim]\ndt = 0.0\n";
        assert!(matches!(
            parse_scenario_file(text),
            Err(CliError::Invalid(_))
        ));
        let text = "[vessel.white]\ngoal = [1.0, 0.0]\nwaypoints = [[0.0, 0.0], [5.0, 0.0]]\n";
        assert!(matches!(
            parse_scenario_file(text),
            Err(CliError::Schema(_))
        ));
        let text = "[vessel.white]\ngoal = [1.0, 0.0]\n[vessel.red]\nspeed = 1.0\nthrust = 3.0\n";
        assert!(matches!(
            parse_scenario_file(text),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn golden_scenarios_round_trip() {
        for mut c in scenarios::all() {
            c.noise.gps = 0.25;
            c.seed = 42;
            let text = serialize_scenario(&c).unwrap();
            let back = parse_scenario_file(&text).unwrap();
            assert_eq!(back, c, "{text}");
            assert_eq!(serialize_scenario(&back).unwrap(), text);
        }
    }

    #[test]
    fn red_thrust_script() {
        let text = "[vessel.white]\ngoal = [100.0, 0.0]\n[vessel.red]\ninitial = { x = 50.0, psi = 3.141592653589793 }\nthrust = 800.0\n";
        let c = parse_scenario_file(text).unwrap();
        let red = c.red.unwrap();
        assert_eq!(red.script, RedScript::ConstantThrust(800.0));
        assert!(red.initial.psi < 0.0);
    }
}
