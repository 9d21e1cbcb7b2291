//! Virtual target guidance and the speed/heading PID loops.
//!
//! A target point slides along an arc-length parameterised path. It slows
//! down when the vessel falls behind and stops entirely once the lag exceeds
//! `lag_limit`. The vessel pursues the target; two PID loops convert the
//! resulting speed and heading demands into common and differential thrust.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bearing_of, wrap_angle, wrap_heading, Vec2};
use crate::vessel_dynamics::{ThrustCommand, VesselParams, VesselState};

/// Piecewise linear reference path.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    samples: Vec<Vec2>,
    cumulative: Vec<f64>,
    closed: bool,
}

impl PlanarPath {
    pub fn new(samples: Vec<Vec2>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidPath("need at least 2 samples".into()));
        }
        if samples
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::InvalidPath("non-finite sample".into()));
        }
        if closed && (samples[0] - samples[samples.len() - 1]).norm() > 1e-9 {
            return Err(Error::InvalidPath(
                "closed path must end where it starts".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(samples.len());
        cumulative.push(0.0);
        for w in samples.windows(2) {
            let seg = (w[1] - w[0]).norm();
            if seg <= 0.0 {
                return Err(Error::InvalidPath("repeated consecutive sample".into()));
            }
            let last = *cumulative.last().unwrap();
            cumulative.push(last + seg);
        }
        Ok(Self {
            samples,
            cumulative,
            closed,
        })
    }

    pub fn straight(from: Vec2, to: Vec2) -> Result<Self> {
        Self::new(vec![from, to], false)
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> Vec2 {
        self.samples[0]
    }

    pub fn end(&self) -> Vec2 {
        self.samples[self.samples.len() - 1]
    }

    /// Maps any arc length onto the valid range: modulo length when closed,
    /// clamped otherwise.
    pub fn normalize_s(&self, s: f64) -> f64 {
        let len = self.length();
        if self.closed {
            let w = s.rem_euclid(len);
            if w >= len {
                0.0
            } else {
                w
            }
        } else {
            s.clamp(0.0, len)
        }
    }

    fn segment_at(&self, s: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= s);
        i.saturating_sub(1).min(self.samples.len() - 2)
    }

    pub fn point_at(&self, s: f64) -> Vec2 {
        let s = self.normalize_s(s);
        let i = self.segment_at(s);
        let (s0, s1) = (self.cumulative[i], self.cumulative[i + 1]);
        let f = (s - s0) / (s1 - s0);
        self.samples[i] + (self.samples[i + 1] - self.samples[i]) * f
    }

    /// Heading of the path tangent at `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        let i = self.segment_at(self.normalize_s(s));
        bearing_of(&(self.samples[i + 1] - self.samples[i]))
    }

    /// Nearest point on the polyline: `(arc length, distance)`.
    pub fn project(&self, p: &Vec2) -> (f64, f64) {
        self.project_window(p, 0, self.samples.len() - 1)
    }

    fn project_window(&self, p: &Vec2, first: usize, last: usize) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for i in first..last {
            let a = self.samples[i];
            let ab = self.samples[i + 1] - a;
            let len2 = ab.norm_squared();
            let f = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
            let d = (a + ab * f - p).norm();
            if d < best.1 {
                best = (
                    self.cumulative[i] + f * (self.cumulative[i + 1] - self.cumulative[i]),
                    d,
                );
            }
        }
        best
    }

    /// Distance from `p` to the closest point on the path.
    pub fn distance_to(&self, p: &Vec2) -> f64 {
        self.project(p).1
    }

    /// Signed lateral offset of `p` from the path at its projection,
    /// positive to starboard of the direction of travel.
    pub fn signed_offset(&self, p: &Vec2) -> f64 {
        let (s, d) = self.project(p);
        let i = self.segment_at(s);
        let ab = self.samples[i + 1] - self.samples[i];
        let cross = ab.x * (p.y - self.samples[i].y) - ab.y * (p.x - self.samples[i].x);
        if cross >= 0.0 {
            d
        } else {
            -d
        }
    }

    /// Projection of `p` restricted to the part of the path at or ahead of
    /// `from_s` (one lap ahead on closed paths).
    pub fn project_ahead(&self, p: &Vec2, from_s: f64) -> f64 {
        let from_s = self.normalize_s(from_s);
        let i0 = self.segment_at(from_s);
        let last = self.samples.len() - 1;
        if !self.closed {
            let (s, _) = self.project_window(p, i0, last);
            return s.max(from_s);
        }
        let (s_tail, d_tail) = self.project_window(p, i0, last);
        let (s_head, d_head) = self.project_window(p, 0, i0 + 1);
        let ahead_tail = s_tail.max(from_s);
        if d_head < d_tail && s_head < from_s {
            s_head + self.length()
        } else {
            ahead_tail
        }
    }
}

/// Closed Gerono lemniscate `x = A sin θ`, `y = A sin θ cos θ`.
///
/// `n_samples` distinct points are taken uniformly in θ; the first point is
/// repeated at the end to close the path.
pub fn make_lemniscate_path(amplitude: f64, n_samples: usize) -> Result<PlanarPath> {
    if n_samples < 16 {
        return Err(Error::PathTooCoarse(n_samples));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidPath(format!(
            "amplitude must be > 0, got {amplitude}"
        )));
    }
    let mut samples: Vec<Vec2> = (0..n_samples)
        .map(|i| {
            let th = TAU * i as f64 / n_samples as f64;
            Vec2::new(amplitude * th.sin(), amplitude * th.sin() * th.cos())
        })
        .collect();
    samples.push(samples[0]);
    PlanarPath::new(samples, true)
}

/// Target point moving along a [`PlanarPath`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualTarget {
    pub s: f64,
    pub pos: Vec2,
}

impl VirtualTarget {
    pub fn at(path: &PlanarPath, s: f64) -> Self {
        let s = path.normalize_s(s);
        Self {
            s,
            pos: path.point_at(s),
        }
    }
}

/// Advances the target by `nominal_speed * dt`, scaled down linearly with the
/// vessel's distance from it and frozen once that distance reaches `lag_limit`.
pub fn advance_virtual_target(
    path: &PlanarPath,
    vt: &VirtualTarget,
    vessel: &VesselState,
    nominal_speed: f64,
    lag_limit: f64,
    dt: f64,
) -> VirtualTarget {
    let d = (vessel.position() - vt.pos).norm();
    let factor = (1.0 - d / lag_limit).max(0.0);
    if factor == 0.0 {
        return *vt;
    }
    VirtualTarget::at(path, vt.s + nominal_speed * dt * factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceCommand {
    pub desired_speed: f64,
    pub desired_heading: f64,
}

/// Pursuit of the virtual target: head straight at it, slow down inside
/// `arrival_radius`.
pub fn vtg_command(
    vessel: &VesselState,
    vt: &VirtualTarget,
    cruise_speed: f64,
    arrival_radius: f64,
) -> GuidanceCommand {
    let delta = vt.pos - vessel.position();
    let d = delta.norm();
    if d < 1e-6 {
        return GuidanceCommand {
            desired_speed: 0.0,
            desired_heading: vessel.psi,
        };
    }
    GuidanceCommand {
        desired_speed: cruise_speed * (d / arrival_radius).min(1.0),
        desired_heading: bearing_of(&delta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidState {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub integral: f64,
    pub prev_error: f64,
    pub output_limit: f64,
}

impl PidState {
    pub fn new(kp: f64, ki: f64, kd: f64, output_limit: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            integral: 0.0,
            prev_error: 0.0,
            output_limit,
        }
    }
}

/// One PID update. The integral is clamped so that `|ki * integral|` never
/// exceeds the output limit.
pub fn pid_step(pid: &PidState, error: f64, dt: f64) -> (f64, PidState) {
    let mut integral = pid.integral + error * dt;
    if pid.ki != 0.0 {
        let bound = pid.output_limit / pid.ki.abs();
        integral = integral.clamp(-bound, bound);
    }
    let derivative = (error - pid.prev_error) / dt;
    let raw = pid.kp * error + pid.ki * integral + pid.kd * derivative;
    let out = raw.clamp(-pid.output_limit, pid.output_limit);
    (
        out,
        PidState {
            integral,
            prev_error: error,
            ..*pid
        },
    )
}

/// Speed loop -> common thrust, heading loop -> differential thrust.
pub fn guidance_to_thrust(
    cmd: &GuidanceCommand,
    vessel: &VesselState,
    speed_pid: &PidState,
    heading_pid: &PidState,
    params: &VesselParams,
    dt: f64,
) -> (ThrustCommand, PidState, PidState) {
    let (common, speed_pid) = pid_step(speed_pid, cmd.desired_speed - vessel.u, dt);
    let heading_error = wrap_angle(cmd.desired_heading - vessel.psi);
    let (diff, heading_pid) = pid_step(heading_pid, heading_error, dt);
    // Yaw has priority: the common part is trimmed so the differential survives
    // saturation.
    let max = params.max_thrust_per_motor;
    let common = common.clamp(-(max - diff.abs()), max - diff.abs());
    let thrust = ThrustCommand::new(common + diff, common - diff).saturate(max);
    (thrust, speed_pid, heading_pid)
}

/// Guidance tuning, all overridable per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceConfig {
    /// Distance at which the virtual target stops waiting for the vessel.
    pub lag_limit: f64,
    /// Radius inside which the commanded speed ramps down.
    pub arrival_radius: f64,
    /// Distance to the final goal that counts as arrival.
    pub arrival_tolerance: f64,
    /// Virtual target speed as a multiple of cruise speed.
    pub target_speed_ratio: f64,
    /// Speed factor applied while giving way under rules 13 and 14.
    pub slowdown: f64,
    pub speed_kp: f64,
    pub speed_ki: f64,
    pub speed_kd: f64,
    pub heading_kp: f64,
    pub heading_ki: f64,
    pub heading_kd: f64,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            lag_limit: 15.0,
            arrival_radius: 5.0,
            arrival_tolerance: 2.0,
            target_speed_ratio: 1.0,
            slowdown: 0.5,
            speed_kp: 800.0,
            speed_ki: 80.0,
            speed_kd: 0.0,
            heading_kp: 3000.0,
            heading_ki: 0.0,
            heading_kd: 9000.0,
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lag_limit", self.lag_limit),
            ("arrival_radius", self.arrival_radius),
            ("arrival_tolerance", self.arrival_tolerance),
            ("target_speed_ratio", self.target_speed_ratio),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("guidance.{name} must be > 0")));
            }
        }
        if !(self.slowdown > 0.0 && self.slowdown <= 1.0) {
            return Err(Error::InvalidConfig(
                "guidance.slowdown must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn speed_pid(&self, params: &VesselParams) -> PidState {
        PidState::new(
            self.speed_kp,
            self.speed_ki,
            self.speed_kd,
            params.max_thrust_per_motor,
        )
    }

    pub fn heading_pid(&self, params: &VesselParams) -> PidState {
        PidState::new(
            self.heading_kp,
            self.heading_ki,
            self.heading_kd,
            params.max_thrust_per_motor,
        )
    }
}

/// Wrapped heading error as used by the heading loop.
pub fn heading_error(desired: f64, actual: f64) -> f64 {
    wrap_angle(wrap_heading(desired) - actual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn north() -> VesselState {
        VesselState::new(0.0, 0.0, 0.0, 0.0)
    }

    #[test]
    fn lemniscate_landmarks() {
        let a = 40.0;
        let path = make_lemniscate_path(a, 4096).unwrap();
        let s = path.samples();
        assert_eq!(s.len(), 4097);
        assert_eq!(s[0], Vec2::new(0.0, 0.0));
        assert!((s[1024] - Vec2::new(a, 0.0)).norm() < 1e-12);
        assert!(path.is_closed());
        assert_eq!(s[0], s[4096]);
    }

    #[test]
    fn lemniscate_rejects_coarse_sampling() {
        assert_eq!(
            make_lemniscate_path(40.0, 15),
            Err(Error::PathTooCoarse(15))
        );
        assert!(make_lemniscate_path(40.0, 16).is_ok());
    }

    #[test]
    fn arclength_strictly_increasing() {
        let path = make_lemniscate_path(10.0, 64).unwrap();
        let c = path.cumulative_arclength();
        assert_eq!(c[0], 0.0);
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_paths() {
        assert!(PlanarPath::new(vec![Vec2::zeros()], false).is_err());
        let open = vec![Vec2::zeros(), Vec2::new(1.0, 0.0)];
        assert!(PlanarPath::new(open, true).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let path = PlanarPath::straight(Vec2::zeros(), Vec2::new(100.0, 0.0)).unwrap();
        let p = path.point_at(37.5);
        assert!((p - Vec2::new(37.5, 0.0)).norm() < 1e-12);
        assert_eq!(path.point_at(250.0), Vec2::new(100.0, 0.0));
        assert_eq!(path.distance_to(&Vec2::new(50.0, -3.0)), 3.0);
        assert_eq!(path.signed_offset(&Vec2::new(50.0, 3.0)), 3.0);
        assert_eq!(path.signed_offset(&Vec2::new(50.0, -3.0)), -3.0);
    }

    #[test]
    fn target_advances_at_nominal_speed_when_coincident() {
        let path = PlanarPath::straight(Vec2::zeros(), Vec2::new(100.0, 0.0)).unwrap();
        let vt = VirtualTarget::at(&path, 10.0);
        let vessel = VesselState::new(10.0, 0.0, 0.0, 0.0);
        let next = advance_virtual_target(&path, &vt, &vessel, 2.5, 15.0, 0.1);
        assert!((next.s - 10.25).abs() < 1e-12);
    }

    #[test]
    fn target_waits_for_lagging_vessel() {
        let path = PlanarPath::straight(Vec2::zeros(), Vec2::new(100.0, 0.0)).unwrap();
        let vt = VirtualTarget::at(&path, 40.0);
        let vessel = VesselState::new(20.0, 0.0, 0.0, 0.0);
        let next = advance_virtual_target(&path, &vt, &vessel, 2.5, 15.0, 0.1);
        assert_eq!(next.s, 40.0);
    }

    #[test]
    fn target_wraps_on_closed_path() {
        let path = make_lemniscate_path(40.0, 256).unwrap();
        let len = path.length();
        let vt = VirtualTarget::at(&path, len - 0.1);
        let vessel = VesselState::new(vt.pos.x, vt.pos.y, 0.0, 0.0);
        let next = advance_virtual_target(&path, &vt, &vessel, 2.5, 15.0, 0.1);
        assert!((next.s - ((len - 0.1 + 0.25) % len)).abs() < 1e-9);
        assert!((next.pos - path.point_at(next.s)).norm() < 1e-9);
    }

    #[test]
    fn vtg_dead_ahead_and_abeam() {
        let path = PlanarPath::straight(Vec2::zeros(), Vec2::new(100.0, 100.0)).unwrap();
        let _ = path;
        let ahead = VirtualTarget {
            s: 0.0,
            pos: Vec2::new(10.0, 0.0),
        };
        let c = vtg_command(&north(), &ahead, 2.5, 5.0);
        assert_eq!(c.desired_heading, 0.0);
        assert_eq!(c.desired_speed, 2.5);

        let east = VirtualTarget {
            s: 0.0,
            pos: Vec2::new(0.0, 10.0),
        };
        let c = vtg_command(&north(), &east, 2.5, 5.0);
        assert!((c.desired_heading - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn vtg_degenerate_holds_heading() {
        let v = VesselState::new(3.0, 4.0, 0.7, 1.0);
        let vt = VirtualTarget {
            s: 0.0,
            pos: Vec2::new(3.0, 4.0),
        };
        let c = vtg_command(&v, &vt, 2.5, 5.0);
        assert_eq!(c.desired_speed, 0.0);
        assert_eq!(c.desired_heading, 0.7);
    }

    #[test]
    fn vtg_slows_inside_arrival_radius() {
        let vt = VirtualTarget {
            s: 0.0,
            pos: Vec2::new(2.0, 0.0),
        };
        let c = vtg_command(&north(), &vt, 2.5, 5.0);
        assert!((c.desired_speed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pid_basics() {
        let pid = PidState::new(0.0, 0.0, 0.0, 10.0);
        assert_eq!(pid_step(&pid, 0.0, 0.1).0, 0.0);

        let p = PidState::new(2.0, 0.0, 0.0, 10.0);
        assert_eq!(pid_step(&p, 3.0, 0.1).0, 6.0);
    }

    #[test]
    fn pid_anti_windup() {
        let mut pid = PidState::new(0.0, 1.0, 0.0, 0.5);
        let mut out = 0.0;
        for _ in 0..100 {
            let (o, next) = pid_step(&pid, 1.0, 0.1);
            out = o;
            pid = next;
            assert!((pid.integral * pid.ki).abs() <= pid.output_limit + 1e-15);
        }
        assert_eq!(out, 0.5);
        let (_, after) = pid_step(&pid, 1.0, 0.1);
        assert_eq!(after.integral, pid.integral);
    }

    fn thrust_for(cmd: GuidanceCommand, v: &VesselState) -> ThrustCommand {
        let g = GuidanceConfig::default();
        let p = VesselParams::default();
        guidance_to_thrust(&cmd, v, &g.speed_pid(&p), &g.heading_pid(&p), &p, 0.1).0
    }

    #[test]
    fn thrust_split_conventions() {
        let v = VesselState::new(0.0, 0.0, 0.3, 2.0);
        let straight = thrust_for(
            GuidanceCommand {
                desired_speed: 2.0,
                desired_heading: 0.3,
            },
            &v,
        );
        assert_eq!(straight.t_left, straight.t_right);

        let stbd = thrust_for(
            GuidanceCommand {
                desired_speed: 2.0,
                desired_heading: 0.3 + FRAC_PI_2,
            },
            &v,
        );
        assert!(stbd.t_left > stbd.t_right);

        let wrapped = thrust_for(
            GuidanceCommand {
                desired_speed: 2.0,
                desired_heading: 0.3 - 3.0 * FRAC_PI_2,
            },
            &v,
        );
        assert!((wrapped.t_left - stbd.t_left).abs() < 1e-9);
        assert!((wrapped.t_right - stbd.t_right).abs() < 1e-9);
    }

    #[test]
    fn thrust_respects_motor_limit() {
        let v = VesselState::new(0.0, 0.0, 0.0, 0.0);
        let t = thrust_for(
            GuidanceCommand {
                desired_speed: 5.0,
                desired_heading: PI - 0.1,
            },
            &v,
        );
        assert!(t.t_left.abs() <= 2500.0 && t.t_right.abs() <= 2500.0);
    }

    proptest! {
        #[test]
        fn pid_is_pure(e in -10.0f64..10.0, i in -5.0f64..5.0, prev in -5.0f64..5.0) {
            let pid = PidState { integral: i, prev_error: prev, ..PidState::new(3.0, 0.5, 1.0, 100.0) };
            prop_assert_eq!(pid_step(&pid, e, 0.1), pid_step(&pid, e, 0.1));
        }

        #[test]
        fn heading_error_wrap_invariant(a in -PI..PI, psi in -PI..PI, k in -5i32..5) {
            let e1 = heading_error(a, psi);
            let e2 = heading_error(a + TAU * k as f64, psi);
            prop_assert!((e1 - e2).abs() < 1e-9 || (e1.abs() - PI).abs() < 1e-9);
        }

        #[test]
        fn open_path_target_is_monotone(steps in proptest::collection::vec((-20.0f64..120.0, -20.0f64..20.0), 1..60)) {
            let path = PlanarPath::straight(Vec2::zeros(), Vec2::new(100.0, 0.0)).unwrap();
            let mut vt = VirtualTarget::at(&path, 0.0);
            for (x, y) in steps {
                let v = VesselState::new(x, y, 0.0, 0.0);
                let next = advance_virtual_target(&path, &vt, &v, 2.5, 15.0, 0.1);
                prop_assert!(next.s >= vt.s);
                prop_assert!(next.s <= path.length());
                vt = next;
            }
        }
    }
}
