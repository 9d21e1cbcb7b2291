//! Surge/yaw model of a twin-thruster catamaran.
//!
//! ```text
//! x' = u cos(psi)        u' = (T_l + T_r - d_u u - d_uu u|u|) / m
//! y' = u sin(psi)        r' = ((T_l - T_r) b/2 - d_r r - d_rr r|r|) / I_z
//! psi' = r
//! ```
//!
//! Sway is not modelled: the hull moves along its heading only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{heading_vector, wrap_heading, Vec2};

/// Pose and body velocities of one vessel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VesselState {
    /// North position (m).
    pub x: f64,
    /// East position (m).
    pub y: f64,
    /// Heading, clockwise from north, in `[-π, π)`.
    pub psi: f64,
    /// Surge speed (m/s).
    pub u: f64,
    /// Yaw rate (rad/s), positive turns the bow to starboard.
    pub r: f64,
    /// Simulation time (s).
    pub t: f64,
}

impl VesselState {
    pub fn new(x: f64, y: f64, psi: f64, u: f64) -> Self {
        Self {
            x,
            y,
            psi: wrap_heading(psi),
            u,
            r: 0.0,
            t: 0.0,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Ground velocity in the north/east frame.
    pub fn velocity(&self) -> Vec2 {
        heading_vector(self.psi) * self.u
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.psi, self.u, self.r, self.t]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselParams {
    pub length: f64,
    pub beam: f64,
    pub mass: f64,
    pub yaw_inertia: f64,
    pub thruster_separation: f64,
    pub linear_drag_surge: f64,
    pub quad_drag_surge: f64,
    pub linear_drag_yaw: f64,
    pub quad_drag_yaw: f64,
    pub max_thrust_per_motor: f64,
    pub cruise_speed: f64,
    pub min_speed: f64,
    pub max_speed: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        Self {
            length: 10.0,
            beam: 4.0,
            mass: 6000.0,
            yaw_inertia: 40000.0,
            thruster_separation: 4.0,
            linear_drag_surge: 900.0,
            quad_drag_surge: 250.0,
            linear_drag_yaw: 25000.0,
            quad_drag_yaw: 20000.0,
            max_thrust_per_motor: 2500.0,
            cruise_speed: 2.5,
            min_speed: 0.0,
            // 11 kn
            max_speed: 5.66,
        }
    }
}

impl VesselParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("beam", self.beam),
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("thruster_separation", self.thruster_separation),
            ("max_thrust_per_motor", self.max_thrust_per_motor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        let drags = [
            ("linear_drag_surge", self.linear_drag_surge),
            ("quad_drag_surge", self.quad_drag_surge),
            ("linear_drag_yaw", self.linear_drag_yaw),
            ("quad_drag_yaw", self.quad_drag_yaw),
        ];
        for (name, v) in drags {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        if !(self.min_speed <= self.cruise_speed && self.cruise_speed <= self.max_speed) {
            return Err(Error::InvalidParams(format!(
                "speeds must satisfy min <= cruise <= max, got {} / {} / {}",
                self.min_speed, self.cruise_speed, self.max_speed
            )));
        }
        Ok(())
    }

    /// Equal per-motor thrust that holds `speed` in steady state.
    pub fn thrust_for_speed(&self, speed: f64) -> f64 {
        0.5 * (self.linear_drag_surge * speed + self.quad_drag_surge * speed * speed.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThrustCommand {
    pub t_left: f64,
    pub t_right: f64,
}

impl ThrustCommand {
    pub fn new(t_left: f64, t_right: f64) -> Self {
        Self { t_left, t_right }
    }

    /// Clamps each motor independently to `±max`.
    pub fn saturate(self, max: f64) -> Self {
        Self {
            t_left: self.t_left.clamp(-max, max),
            t_right: self.t_right.clamp(-max, max),
        }
    }
}

/// Time derivative of the integrated part of a [`VesselState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRate {
    pub dx: f64,
    pub dy: f64,
    pub dpsi: f64,
    pub du: f64,
    pub dr: f64,
}

pub fn state_derivative(
    state: &VesselState,
    params: &VesselParams,
    thrust: &ThrustCommand,
) -> Result<StateRate> {
    if !state.is_finite() {
        return Err(Error::InvalidState("non-finite vessel state".into()));
    }
    if !(thrust.t_left.is_finite() && thrust.t_right.is_finite()) {
        return Err(Error::InvalidState("non-finite thrust".into()));
    }
    let d = rates(
        [state.x, state.y, state.psi, state.u, state.r],
        params,
        thrust,
    );
    Ok(StateRate {
        dx: d[0],
        dy: d[1],
        dpsi: d[2],
        du: d[3],
        dr: d[4],
    })
}

fn rates(s: [f64; 5], p: &VesselParams, th: &ThrustCommand) -> [f64; 5] {
    let [_, _, psi, u, r] = s;
    let surge = th.t_left + th.t_right - p.linear_drag_surge * u - p.quad_drag_surge * u * u.abs();
    let yaw = (th.t_left - th.t_right) * p.thruster_separation / 2.0
        - p.linear_drag_yaw * r
        - p.quad_drag_yaw * r * r.abs();
    [
        u * psi.cos(),
        u * psi.sin(),
        r,
        surge / p.mass,
        yaw / p.yaw_inertia,
    ]
}

fn axpy(a: f64, x: &[f64; 5], y: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| y[i] + a * x[i])
}

/// One fixed RK4 step. Thrust is saturated before integration.
pub fn step_dynamics(
    state: &VesselState,
    params: &VesselParams,
    thrust: &ThrustCommand,
    dt: f64,
) -> Result<VesselState> {
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(Error::InvalidTimestep(dt));
    }
    if !state.is_finite() {
        return Err(Error::InvalidState("non-finite vessel state".into()));
    }
    let th = thrust.saturate(params.max_thrust_per_motor);
    if !(th.t_left.is_finite() && th.t_right.is_finite()) {
        return Err(Error::InvalidState("non-finite thrust".into()));
    }

    let s0 = [state.x, state.y, state.psi, state.u, state.r];
    let k1 = rates(s0, params, &th);
    let k2 = rates(axpy(dt / 2.0, &k1, &s0), params, &th);
    let k3 = rates(axpy(dt / 2.0, &k2, &s0), params, &th);
    let k4 = rates(axpy(dt, &k3, &s0), params, &th);
    let s1: [f64; 5] =
        std::array::from_fn(|i| s0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));

    let next = VesselState {
        x: s1[0],
        y: s1[1],
        psi: wrap_heading(s1[2]),
        u: s1[3],
        r: s1[4],
        t: state.t + dt,
    };
    if !next.is_finite() {
        return Err(Error::InvalidState(
            "integration produced non-finite state".into(),
        ));
    }
    Ok(next)
}
