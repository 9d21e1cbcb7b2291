//! Two-vessel world: the controlled ("white") vessel runs the full stack, the
//! optional intruder ("red") holds a constant thrust and never steers.

mod metrics;
mod prediction;
pub mod scenarios;
mod sensors;

pub use metrics::{compute_metrics, track_crossing, Metrics, TrackCrossing};
pub use prediction::predict_min_separation;
pub use sensors::{sense, SensorNoise, SensorReading};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::apf::FieldParams;
use crate::behavior_tree::{build_zest_tree, tick, Blackboard, NodeStatus, ZestLeaf};
use crate::colregs::{ColregsThresholds, EncounterType};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::guidance::{
    guidance_to_thrust, make_lemniscate_path, GuidanceCommand, GuidanceConfig, PlanarPath,
};
use crate::vessel_dynamics::{step_dynamics, ThrustCommand, VesselParams, VesselState};

/// Separation below which a run is stopped as a collision.
pub const COLLISION_DISTANCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    /// Straight line from the initial position to this point.
    Goal([f64; 2]),
    Waypoints(Vec<[f64; 2]>),
    Lemniscate {
        amplitude: f64,
        n_samples: usize,
        laps: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhiteVessel {
    pub params: VesselParams,
    pub initial: VesselState,
    pub route: Route,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RedScript {
    /// Starts at this surge speed and holds it with equal thrust.
    ConstantSpeed(f64),
    /// Equal per-motor thrust from the configured initial state.
    ConstantThrust(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedVessel {
    pub params: VesselParams,
    pub initial: VesselState,
    pub script: RedScript,
}

impl RedVessel {
    fn start_state(&self) -> VesselState {
        match self.script {
            RedScript::ConstantSpeed(v) => VesselState {
                u: v,
                ..self.initial
            },
            RedScript::ConstantThrust(_) => self.initial,
        }
    }

    fn thrust(&self) -> ThrustCommand {
        let per_motor = match self.script {
            RedScript::ConstantSpeed(v) => self.params.thrust_for_speed(v),
            RedScript::ConstantThrust(t) => t,
        };
        ThrustCommand::new(per_motor, per_motor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub white: WhiteVessel,
    pub red: Option<RedVessel>,
    pub thresholds: ColregsThresholds,
    pub field: FieldParams,
    pub guidance: GuidanceConfig,
    pub dt: f64,
    pub max_time: f64,
    pub noise: SensorNoise,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Defaults everywhere, white vessel at the origin heading north.
    pub fn new(name: impl Into<String>, route: Route) -> Self {
        let params = VesselParams::default();
        Self {
            name: name.into(),
            white: WhiteVessel {
                params,
                initial: VesselState::default(),
                route,
            },
            red: None,
            thresholds: ColregsThresholds::default(),
            field: FieldParams::for_vessel(&params),
            guidance: GuidanceConfig::default(),
            dt: 0.1,
            max_time: 600.0,
            noise: SensorNoise::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(Error::InvalidTimestep(self.dt));
        }
        if !(self.max_time >= self.dt && self.max_time.is_finite()) {
            return Err(Error::InvalidConfig("sim.max_time must be >= dt".into()));
        }
        let noise = [
            self.noise.gps,
            self.noise.compass,
            self.noise.yaw_rate,
            self.noise.surge_accel,
        ];
        if noise.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidConfig("sensor noise must be >= 0".into()));
        }
        self.white.params.validate()?;
        if !self.white.initial.is_finite() {
            return Err(Error::InvalidState("white initial state".into()));
        }
        if let Some(red) = &self.red {
            red.params.validate()?;
            if !red.initial.is_finite() {
                return Err(Error::InvalidState("red initial state".into()));
            }
        }
        self.thresholds.validate()?;
        self.field.validate(&self.white.params)?;
        self.guidance.validate()?;
        self.build_path().map(|_| ())
    }

    pub fn build_path(&self) -> Result<PlanarPath> {
        match &self.white.route {
            Route::Goal(g) => {
                PlanarPath::straight(self.white.initial.position(), Vec2::new(g[0], g[1]))
            }
            Route::Waypoints(w) => {
                PlanarPath::new(w.iter().map(|p| Vec2::new(p[0], p[1])).collect(), false)
            }
            Route::Lemniscate {
                amplitude,
                n_samples,
                ..
            } => make_lemniscate_path(*amplitude, *n_samples),
        }
    }

    fn laps(&self) -> u32 {
        match self.white.route {
            Route::Lemniscate { laps, .. } => laps,
            _ => 1,
        }
    }

    /// Same scenario with the intruder removed.
    pub fn without_red(&self) -> Self {
        Self {
            red: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub white: VesselState,
    pub red: Option<VesselState>,
    /// Leaf that produced this step's command; `None` if the tree failed.
    pub leaf: Option<ZestLeaf>,
    pub encounter: EncounterType,
    pub command: GuidanceCommand,
    pub thrust: ThrustCommand,
    pub separation: Option<f64>,
    pub cross_track: f64,
    /// Node statuses of this tick, innermost first, when dumping is enabled.
    pub bt_trace: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub dt: f64,
    pub records: Vec<SimRecord>,
    pub goal_reached: bool,
    pub collided: bool,
}

impl SimLog {
    pub fn end_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub dump_bt: bool,
}

/// Runs a scenario and evaluates its metrics.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(SimLog, Metrics)> {
    run_scenario_with(config, RunOptions::default())
}

pub fn run_scenario_with(config: &ScenarioConfig, opts: RunOptions) -> Result<(SimLog, Metrics)> {
    let log = simulate(config, opts)?;
    let metrics = compute_metrics(&log, config)?;
    Ok((log, metrics))
}

/// The simulation loop alone.
///
/// Each step: sense the white vessel, tick its tree, convert the command to
/// thrust, record, then integrate both vessels. Stops when the tree reports
/// the goal reached, on collision, or at `max_time`.
pub fn simulate(config: &ScenarioConfig, opts: RunOptions) -> Result<SimLog> {
    config.validate()?;
    let dt = config.dt;
    let path = config.build_path()?;
    let wp = config.white.params;

    let mut white = VesselState {
        t: 0.0,
        ..config.white.initial
    };
    let mut red = config.red.as_ref().map(|r| VesselState {
        t: 0.0,
        ..r.start_state()
    });
    let red_thrust = config.red.as_ref().map(RedVessel::thrust);

    let mut bb = Blackboard::new(
        white,
        wp,
        path.clone(),
        config.laps(),
        config.guidance,
        config.thresholds,
        config.field,
        dt,
    );
    if opts.dump_bt {
        bb.trace = Some(Vec::new());
    }
    let mut tree = build_zest_tree();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut speed_pid = config.guidance.speed_pid(&wp);
    let mut heading_pid = config.guidance.heading_pid(&wp);

    let steps = (config.max_time / dt + 1e-9).floor() as usize;
    let mut records = Vec::with_capacity(steps + 1);
    let mut prev_u = white.u;
    let mut goal_reached = false;
    let mut collided = false;

    for k in 0..=steps {
        let t = k as f64 * dt;
        white.t = t;
        if let Some(r) = red.as_mut() {
            r.t = t;
        }
        check_state(&white, k, "white")?;
        if let Some(r) = &red {
            check_state(r, k, "red")?;
        }

        let accel = if k == 0 { 0.0 } else { (white.u - prev_u) / dt };
        let reading = sense(&white, accel, &config.noise, &mut rng);
        let own = reading.to_state(&white);
        let contacts: Vec<VesselState> = red.iter().copied().collect();
        bb.begin_tick(own, &contacts, t);
        let status = tick(&mut tree, &mut bb)?;
        let command = match bb.command {
            Some(c) => c,
            None => bb.pursue_target(),
        };
        let leaf = if bb.command.is_some() {
            bb.active_leaf
        } else {
            None
        };
        if !(command.desired_speed.is_finite() && command.desired_heading.is_finite()) {
            return Err(Error::InvariantViolation {
                record: k,
                what: "non-finite guidance command".into(),
            });
        }
        let (thrust, sp, hp) =
            guidance_to_thrust(&command, &own, &speed_pid, &heading_pid, &wp, dt);
        speed_pid = sp;
        heading_pid = hp;

        let separation = red.map(|r| (r.position() - white.position()).norm());
        records.push(SimRecord {
            t,
            white,
            red,
            leaf,
            encounter: bb.encounter(),
            command,
            thrust,
            separation,
            cross_track: path.distance_to(&white.position()),
            bt_trace: bb.trace.as_ref().map(|tr| tr.join(" ")),
        });

        if status == NodeStatus::Success && bb.goal_reached {
            goal_reached = true;
            break;
        }
        if separation.is_some_and(|s| s < COLLISION_DISTANCE) {
            collided = true;
            break;
        }
        if k == steps {
            break;
        }

        prev_u = white.u;
        white = step_dynamics(&white, &wp, &thrust, dt).map_err(|e| invariant(k, e))?;
        if let (Some(r), Some(th), Some(cfg)) = (red.as_mut(), red_thrust, config.red.as_ref()) {
            *r = step_dynamics(r, &cfg.params, &th, dt).map_err(|e| invariant(k, e))?;
        }
    }

    Ok(SimLog {
        dt,
        records,
        goal_reached,
        collided,
    })
}

fn invariant(record: usize, e: Error) -> Error {
    Error::InvariantViolation {
        record,
        what: e.to_string(),
    }
}

fn check_state(s: &VesselState, record: usize, who: &str) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::InvariantViolation {
            record,
            what: format!("{who} state not finite"),
        });
    }
    if !(-std::f64::consts::PI..std::f64::consts::PI).contains(&s.psi) {
        return Err(Error::InvariantViolation {
            record,
            what: format!("{who} heading {} outside [-pi, pi)", s.psi),
        });
    }
    Ok(())
}
