//! Idealised GPS, compass and IMU with additive Gaussian noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::wrap_heading;
use crate::vessel_dynamics::VesselState;

/// Standard deviation of each channel; zero disables the channel's noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorNoise {
    pub gps: f64,
    pub compass: f64,
    pub yaw_rate: f64,
    pub surge_accel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReading {
    pub gps: (f64, f64),
    pub compass: f64,
    /// (yaw rate, surge acceleration)
    pub imu: (f64, f64),
}

impl SensorReading {
    /// Own-state estimate assembled from the reading. Surge speed has no
    /// sensor channel and is taken from `truth`.
    pub fn to_state(&self, truth: &VesselState) -> VesselState {
        VesselState {
            x: self.gps.0,
            y: self.gps.1,
            psi: self.compass,
            u: truth.u,
            r: self.imu.0,
            t: truth.t,
        }
    }
}

fn noisy<R: Rng + ?Sized>(value: f64, std: f64, rng: &mut R) -> f64 {
    if std > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        value + std * z
    } else {
        value
    }
}

pub fn sense<R: Rng + ?Sized>(
    truth: &VesselState,
    surge_accel: f64,
    noise: &SensorNoise,
    rng: &mut R,
) -> SensorReading {
    let gx = noisy(truth.x, noise.gps, rng);
    let gy = noisy(truth.y, noise.gps, rng);
    let compass = if noise.compass > 0.0 {
        wrap_heading(noisy(truth.psi, noise.compass, rng))
    } else {
        truth.psi
    };
    let yaw_rate = noisy(truth.r, noise.yaw_rate, rng);
    let accel = noisy(surge_accel, noise.surge_accel, rng);
    SensorReading {
        gps: (gx, gy),
        compass,
        imu: (yaw_rate, accel),
    }
}
