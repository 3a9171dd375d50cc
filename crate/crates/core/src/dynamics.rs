//! Time stepping: the discrete-time Newton update and a classical RK4
//! reference for the continuous limit.

use crate::error::{Error, Result};
use crate::field::{force_closed_form, potential, FieldParams, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub pos: Vec2,
    pub vel: Vec2,
    pub t: f64,
}

impl ParticleState {
    pub fn new(pos: Vec2, vel: Vec2, t: f64) -> Self {
        ParticleState { pos, vel, t }
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.vel.is_finite() && self.t.is_finite()
    }
}

/// Time-discreteness parameter and particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub tau: f64,
    pub mass: f64,
}

impl StepParams {
    /// Default mass used by the experiments. With unit mass the appendix
    /// setup cannot reach the detector screen at all.
    pub const DEFAULT_MASS: f64 = 2.0;

    pub fn new(tau: f64, mass: f64) -> Result<Self> {
        let sp = StepParams { tau, mass };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau must be positive and finite"));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid("mass must be positive and finite"));
        }
        Ok(())
    }
}

/// One discrete-time step: `v' = v + (τ/m) F(r)`, `r' = r + τ v'`.
///
/// The force is taken at the pre-step position; the position update uses
/// the new velocity.
pub fn step_discrete(
    s: &ParticleState,
    params: &FieldParams,
    sp: &StepParams,
) -> Result<ParticleState> {
    let force = force_closed_form(s.pos, params)?;
    let vel = s.vel + force * (sp.tau / sp.mass);
    let pos = s.pos + vel * sp.tau;
    let next = ParticleState::new(pos, vel, s.t + sp.tau);
    if !next.is_finite() {
        return Err(Error::NonFinite("particle state"));
    }
    Ok(next)
}

/// One classical fourth-order Runge–Kutta step of `m r'' = F(r)`.
pub fn rk4_step(
    s: &ParticleState,
    params: &FieldParams,
    mass: f64,
    h: f64,
) -> Result<ParticleState> {
    let accel = |p: Vec2| force_closed_form(p, params).map(|f| f * (1.0 / mass));

    let k1v = accel(s.pos)?;
    let k1x = s.vel;
    let k2v = accel(s.pos + k1x * (0.5 * h))?;
    let k2x = s.vel + k1v * (0.5 * h);
    let k3v = accel(s.pos + k2x * (0.5 * h))?;
    let k3x = s.vel + k2v * (0.5 * h);
    let k4v = accel(s.pos + k3x * h)?;
    let k4x = s.vel + k3v * h;

    let pos = s.pos + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
    let vel = s.vel + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    let next = ParticleState::new(pos, vel, s.t + h);
    if !next.is_finite() {
        return Err(Error::NonFinite("particle state"));
    }
    Ok(next)
}

/// Integrates the continuous equations of motion with fixed-step RK4 until
/// `stop` returns true for the latest state. The returned path includes the
/// initial state and the state on which `stop` fired.
pub fn integrate_reference<P>(
    s: &ParticleState,
    params: &FieldParams,
    mass: f64,
    h: f64,
    max_steps: usize,
    mut stop: P,
) -> Result<Vec<ParticleState>>
where
    P: FnMut(&ParticleState) -> bool,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("reference step must be positive and finite"));
    }
    if !(mass > 0.0) {
        return Err(Error::invalid("mass must be positive"));
    }
    let mut path = vec![*s];
    let mut cur = *s;
    for _ in 0..max_steps {
        if stop(&cur) {
            return Ok(path);
        }
        cur = rk4_step(&cur, params, mass, h)?;
        path.push(cur);
    }
    if stop(&cur) {
        return Ok(path);
    }
    Err(Error::StepLimit(max_steps))
}

/// Total energy `½ m |v|² + U(r)`.
pub fn energy(s: &ParticleState, params: &FieldParams, mass: f64) -> Result<f64> {
    Ok(0.5 * mass * s.vel.dot(s.vel) + potential(s.pos, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn launch() -> ParticleState {
        ParticleState::new(Vec2::new(-5.0, 0.0), Vec2::new(12.0, 0.0), 0.0)
    }

    #[test]
    fn free_step() {
        let free = FieldParams::new(0.0, 5.0).unwrap();
        let sp = StepParams::new(0.05, 1.0).unwrap();
        let next = step_discrete(&launch(), &free, &sp).unwrap();
        assert_relative_eq!(next.pos.x, -4.4, max_relative = 1e-15);
        assert_eq!(next.pos.y, 0.0);
        assert_eq!(next.vel, Vec2::new(12.0, 0.0));
        assert_eq!(next.t, 0.05);
    }

    #[test]
    fn charged_step_uses_new_velocity() {
        let field = FieldParams::new(-1.0, 5.0).unwrap();
        let sp = StepParams::new(0.05, 1.0).unwrap();
        let next = step_discrete(&launch(), &field, &sp).unwrap();
        let v = 12.0 + 0.05 * PI;
        assert_relative_eq!(next.vel.x, v, max_relative = 1e-15);
        assert_relative_eq!(next.vel.x, 12.157_08, epsilon = 1e-5);
        assert_relative_eq!(next.pos.x, -5.0 + 0.05 * v, max_relative = 1e-15);
        assert_relative_eq!(next.pos.x, -4.392_15, epsilon = 1e-5);
    }

    #[test]
    fn two_half_steps_differ_from_one_double_step() {
        let field = FieldParams::new(-1.0, 5.0).unwrap();
        let s = ParticleState::new(Vec2::new(-2.0, 1.0), Vec2::new(10.0, 3.0), 0.0);
        let small = StepParams::new(0.05, 1.0).unwrap();
        let big = StepParams::new(0.1, 1.0).unwrap();
        let twice =
            step_discrete(&step_discrete(&s, &field, &small).unwrap(), &field, &small).unwrap();
        let once = step_discrete(&s, &field, &big).unwrap();
        assert!((twice.pos - once.pos).norm() > 1e-4);
    }

    #[test]
    fn reversal_without_force() {
        let free = FieldParams::new(0.0, 5.0).unwrap();
        let sp = StepParams::new(0.25, 1.0).unwrap();
        let s = ParticleState::new(Vec2::new(-3.0, 0.5), Vec2::new(4.0, -2.0), 0.0);
        let fwd = step_discrete(&s, &free, &sp).unwrap();
        let back = step_discrete(&ParticleState::new(fwd.pos, -fwd.vel, 0.0), &free, &sp).unwrap();
        assert_eq!(back.pos, s.pos);
    }

    #[test]
    fn step_onto_screen_is_an_error() {
        let field = FieldParams::new(-1.0, 5.0).unwrap();
        let sp = StepParams::new(0.05, 1.0).unwrap();
        let s = ParticleState::new(Vec2::new(0.0, 6.0), Vec2::new(1.0, 0.0), 0.0);
        assert!(matches!(
            step_discrete(&s, &field, &sp),
            Err(Error::OnScreen { .. })
        ));
    }

    #[test]
    fn reference_straight_line() {
        let free = FieldParams::new(0.0, 5.0).unwrap();
        let s = ParticleState::new(Vec2::new(-5.0, 0.0), Vec2::new(9.0, 4.0), 0.0);
        let path = integrate_reference(&s, &free, 1.0, 1e-3, 10_000, |p| p.t >= 0.5).unwrap();
        for p in &path {
            let expect = s.pos + s.vel * p.t;
            assert!((p.pos - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn reference_axis_launch_stays_on_axis() {
        let field = FieldParams::new(-1.0, 5.0).unwrap();
        let path =
            integrate_reference(&launch(), &field, 2.0, 1e-3, 100_000, |p| p.pos.x > 10.0).unwrap();
        assert!(path.iter().all(|p| p.pos.y == 0.0));
    }

    #[test]
    fn reference_step_limit() {
        let free = FieldParams::new(0.0, 5.0).unwrap();
        let err = integrate_reference(&launch(), &free, 1.0, 1e-3, 10, |_| false).unwrap_err();
        assert_eq!(err, Error::StepLimit(10));
    }

    #[test]
    fn energy_at_rest_at_origin() {
        let field = FieldParams::new(-1.0, 5.0).unwrap();
        let s = ParticleState::new(Vec2::ZERO, Vec2::ZERO, 0.0);
        assert_eq!(energy(&s, &field, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_step_params() {
        assert!(StepParams::new(0.0, 1.0).is_err());
        assert!(StepParams::new(0.1, -1.0).is_err());
    }
}
