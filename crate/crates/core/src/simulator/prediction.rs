use crate::vessel_dynamics::VesselState;

/// Closest approach of two vessels under constant-velocity extrapolation,
/// scanned on a uniform grid `0, dt, 2dt, …` up to `horizon`.
///
/// Returns `(min_separation, time_of_min)`; the earliest time wins ties.
pub fn predict_min_separation(
    own: &VesselState,
    other: &VesselState,
    horizon: f64,
    dt: f64,
) -> (f64, f64) {
    let p = other.position() - own.position();
    let v = other.velocity() - own.velocity();
    let steps = (horizon / dt + 1e-9).floor().max(0.0) as usize;
    let mut best = (p.norm(), 0.0);
    for k in 1..=steps {
        let t = k as f64 * dt;
        let d = (p + v * t).norm();
        if d < best.0 {
            best = (d, t);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn parallel_tracks_keep_distance() {
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let other = VesselState::new(0.0, 20.0, 0.0, 2.0);
        assert_eq!(predict_min_separation(&own, &other, 60.0, 0.1), (20.0, 0.0));
    }

    #[test]
    fn head_on_meets_midway() {
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let other = VesselState::new(50.0, 0.0, PI, 2.0);
        let (d, t) = predict_min_separation(&own, &other, 60.0, 0.1);
        assert!(d < 1e-9);
        assert!((t - 12.5).abs() < 1e-9);
    }

    #[test]
    fn crossing_matches_fine_scan() {
        let own = VesselState::new(0.0, 0.0, 0.0, 2.0);
        let other = VesselState::new(60.0, 50.0, -FRAC_PI_2, 2.0);
        let (d, t) = predict_min_separation(&own, &other, 60.0, 0.1);
        // independent fine scan
        let mut fine = (f64::INFINITY, 0.0);
        for k in 0..=600_000 {
            let tau = k as f64 * 1e-4;
            let sep = ((60.0 - 2.0 * tau).powi(2) + (50.0 - 2.0 * tau).powi(2)).sqrt();
            if sep < fine.0 {
                fine = (sep, tau);
            }
        }
        assert!((fine.0 - 50f64.sqrt()).abs() < 1e-6);
        assert!((fine.1 - 27.5).abs() < 1e-3);
        assert!((d - fine.0).abs() < 1e-6);
        assert!((t - fine.1).abs() < 1e-3);
    }
}
