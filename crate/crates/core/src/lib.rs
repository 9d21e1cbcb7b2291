//! Planar autonomy stack for a twin-thruster catamaran.
//!
//! The crate is organised bottom-up:
//!
//! - [`vessel_dynamics`]: surge/yaw differential-thrust model with RK4 stepping.
//! - [`guidance`]: reference paths, virtual target guidance and the PID loops
//!   that turn speed/heading demands into thruster forces.
//! - [`colregs`]: encounter geometry and rule classification (13/14/15/17).
//! - [`apf`]: attractive, repulsive and predictive potential-field terms and the
//!   rule-shaped avoidance field.
//! - [`behavior_tree`]: a small tick engine plus the mission tree that wires the
//!   pieces together through a blackboard.
//! - [`simulator`]: two-vessel world stepping, idealised sensors, logs and metrics.
//!
//! Frame convention everywhere: `x` north, `y` east, heading clockwise from north.

pub mod apf;
pub mod behavior_tree;
pub mod colregs;
pub mod error;
pub mod geometry;
pub mod guidance;
pub mod simulator;
pub mod vessel_dynamics;

pub use error::{Error, Result};
pub use geometry::Vec2;
