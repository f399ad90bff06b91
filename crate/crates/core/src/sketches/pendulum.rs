//! Damped pendulum integrated once per tick with semi-implicit Euler.

use crate::draw::{Color, DrawList};
use crate::geom::{wrap_angle, Point2};
use crate::value::Value;
use crate::{Tick, TICKS_PER_SECOND};

/// g/L of 9.8 s⁻² expressed per tick².
pub const GRAVITY_OVER_LENGTH: f64 = 9.8 / (TICKS_PER_SECOND * TICKS_PER_SECOND);
pub const DAMPING: f64 = 0.05;

/// Pivot and rod in the sketch's local frame.
pub const PIVOT: Point2 = Point2::new(0.0, -0.45);
pub const ROD_LENGTH: f64 = 0.75;
pub const BOB_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PendulumState {
    /// Radians from hanging rest; positive swings toward +x.
    pub theta: f64,
    /// Radians per tick.
    pub omega: f64,
    pub damping: f64,
    pub gravity_over_length: f64,
    pub grabbed: bool,
    // Last two pointer samples while grabbed: (angle, tick).
    drag_samples: [Option<(f64, Tick)>; 2],
}

impl Default for PendulumState {
    fn default() -> Self {
        Self::new(0.0, 0.0)
    }
}

impl PendulumState {
    pub fn new(theta: f64, omega: f64) -> Self {
        Self {
            theta,
            omega,
            damping: DAMPING,
            gravity_over_length: GRAVITY_OVER_LENGTH,
            grabbed: false,
            drag_samples: [None, None],
        }
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    /// One tick of motion; does nothing while grabbed.
    pub fn step(&mut self) {
        if self.grabbed {
            return;
        }
        self.omega += -self.gravity_over_length * libm::sin(self.theta) - self.damping * self.omega;
        self.theta += self.omega;
    }

    pub fn output(&self) -> Value {
        Value::Real(self.theta)
    }

    /// ½ω² + g/L·(1 − cos θ)
    pub fn energy(&self) -> f64 {
        0.5 * self.omega * self.omega + self.gravity_over_length * (1.0 - libm::cos(self.theta))
    }

    /// Bob centre in local coordinates.
    pub fn bob(&self) -> Point2 {
        PIVOT + Point2::new(libm::sin(self.theta), libm::cos(self.theta)) * ROD_LENGTH
    }

    pub fn hits_bob(&self, local: Point2) -> bool {
        local.distance(self.bob()) <= BOB_RADIUS * 1.5
    }

    /// Angle from the pivot to a local point.
    pub fn angle_to(local: Point2) -> f64 {
        let d = local - PIVOT;
        libm::atan2(d.x, d.y)
    }

    pub fn grab(&mut self, local: Point2, tick: Tick) {
        self.grabbed = true;
        self.omega = 0.0;
        self.drag_samples = [None, None];
        self.drag_to(local, tick);
    }

    /// While grabbed, the rod points at the pointer.
    pub fn drag_to(&mut self, local: Point2, tick: Tick) {
        if !self.grabbed {
            return;
        }
        let angle = Self::angle_to(local);
        // Keep theta continuous across the ±π seam so a full swing over the top
        // does not jump.
        self.theta += wrap_angle(angle - self.theta);
        self.drag_samples = [self.drag_samples[1], Some((self.theta, tick))];
    }

    /// Lets go; the swing speed is the angular change between the last two
    /// pointer samples, per tick.
    pub fn release(&mut self) {
        if !self.grabbed {
            return;
        }
        self.grabbed = false;
        self.omega = match self.drag_samples {
            [Some((a0, t0)), Some((a1, t1))] => (a1 - a0) / (t1.saturating_sub(t0).max(1)) as f64,
            _ => 0.0,
        };
        self.drag_samples = [None, None];
    }

    pub fn render(&self, out: &mut DrawList) {
        out.line(PIVOT - Point2::new(0.2, 0.0), PIVOT + Point2::new(0.2, 0.0), Color::INK, 0.02);
        let bob = self.bob();
        out.line(PIVOT, bob, Color::INK, 0.015);
        let color = if self.grabbed { Color::HIGHLIGHT } else { Color::ACCENT };
        out.circle(bob, BOB_RADIUS, color, true);
    }
}
