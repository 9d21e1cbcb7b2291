use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{heading_vector, wrap_angle};

use super::{simulate, RunOptions, ScenarioConfig, SimLog};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub min_separation: Option<f64>,
    pub cpa_time: Option<f64>,
    /// Signed offset of the white vessel from its path at CPA, + starboard.
    pub cpa_lateral_offset: Option<f64>,
    pub time_to_goal: Option<f64>,
    pub cross_track_rms: f64,
    pub max_cross_track: f64,
    /// Largest heading difference against the same scenario without the red
    /// vessel, sampled at equal times. Zero when there is no red vessel.
    pub max_heading_deviation: f64,
    /// Separation dropped below the safety radius, or the run collided.
    pub colregs_violation: bool,
}

/// Moment the white vessel crosses the red vessel's initial track line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackCrossing {
    pub t: f64,
    /// Along-track coordinate of the crossing point, from red's start.
    pub crossing_along: f64,
    /// Red's own along-track coordinate at that time.
    pub red_along: f64,
}

impl TrackCrossing {
    /// White crossed behind red.
    pub fn passes_astern(&self) -> bool {
        self.red_along > self.crossing_along
    }
}

pub fn compute_metrics(log: &SimLog, config: &ScenarioConfig) -> Result<Metrics> {
    if log.records.is_empty() {
        return Err(Error::EmptyLog);
    }
    let path = config.build_path()?;
    let n = log.records.len() as f64;
    let sum_sq: f64 = log.records.iter().map(|r| r.cross_track.powi(2)).sum();
    let max_cross_track = log
        .records
        .iter()
        .map(|r| r.cross_track)
        .fold(0.0, f64::max);

    let mut cpa: Option<(f64, usize)> = None;
    for (i, r) in log.records.iter().enumerate() {
        if let Some(s) = r.separation {
            if cpa.is_none_or(|(best, _)| s < best) {
                cpa = Some((s, i));
            }
        }
    }

    let max_heading_deviation = if config.red.is_some() {
        let base = simulate(&config.without_red(), RunOptions::default())?;
        let last = base.records.len() - 1;
        log.records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let b = &base.records[i.min(last)];
                wrap_angle(r.white.psi - b.white.psi).abs()
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let min_separation = cpa.map(|(s, _)| s);
    Ok(Metrics {
        min_separation,
        cpa_time: cpa.map(|(_, i)| log.records[i].t),
        cpa_lateral_offset: cpa.map(|(_, i)| path.signed_offset(&log.records[i].white.position())),
        time_to_goal: log.goal_reached.then(|| log.end_time()),
        cross_track_rms: (sum_sq / n).sqrt(),
        max_cross_track,
        max_heading_deviation,
        colregs_violation: log.collided
            || min_separation.is_some_and(|s| s < config.field.safety_radius),
    })
}

/// First crossing of the line through red's initial position along red's
/// initial heading, linearly interpolated between records.
pub fn track_crossing(log: &SimLog) -> Option<TrackCrossing> {
    let red0 = log.records.first()?.red?;
    let h = heading_vector(red0.psi);
    let origin = red0.position();
    let side = |p: crate::Vec2| {
        let d = p - origin;
        h.x * d.y - h.y * d.x
    };
    for w in log.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (sa, sb) = (side(a.white.position()), side(b.white.position()));
        if sa == 0.0 || sa.signum() != sb.signum() {
            let f = if sa == sb { 0.0 } else { sa / (sa - sb) };
            let wp = a.white.position() + (b.white.position() - a.white.position()) * f;
            let (ra, rb) = (a.red?.position(), b.red?.position());
            let rp = ra + (rb - ra) * f;
            return Some(TrackCrossing {
                t: a.t + (b.t - a.t) * f,
                crossing_along: (wp - origin).dot(&h),
                red_along: (rp - origin).dot(&h),
            });
        }
    }
    None
}
