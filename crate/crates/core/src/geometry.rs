//! Planar helpers shared by every module.

use std::f64::consts::{PI, TAU};

pub type Vec2 = nalgebra::Vector2<f64>;

/// Wraps a heading into `[-π, π)`. Values already in range are returned unchanged.
pub fn wrap_heading(a: f64) -> f64 {
    if (-PI..PI).contains(&a) {
        return a;
    }
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Wraps a relative angle (bearing, heading error) into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Unit vector along a heading (north component first).
pub fn heading_vector(psi: f64) -> Vec2 {
    Vec2::new(psi.cos(), psi.sin())
}

/// Unit vector pointing to starboard of a heading.
pub fn starboard_vector(psi: f64) -> Vec2 {
    Vec2::new(-psi.sin(), psi.cos())
}

/// Heading of a north/east displacement.
pub fn bearing_of(v: &Vec2) -> f64 {
    wrap_heading(v.y.atan2(v.x))
}
