//! Single trajectories from the emitter to a terminal [`Outcome`].
//!
//! Between consecutive states the path is treated as a straight segment.
//! A segment that crosses the screen plane `x = 0` outside the effective
//! aperture `|y| < R - r` ends the run as [`Outcome::Blocked`]; a segment
//! reaching the detector plane `x = d` ends it as [`Outcome::Detected`].

use crate::dynamics::{rk4_step, step_discrete, ParticleState, StepParams};
use crate::error::{Error, Result};
use crate::field::{FieldParams, Vec2};

/// Where a detector hit is registered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectorRule {
    /// The position at the first tick with `x >= d`.
    #[default]
    FirstTick,
    /// The straight-line interpolation of the crossing segment at `x = d`.
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Emitter at `x = -D`.
    pub emitter_distance: f64,
    /// Detector plane at `x = +d`.
    pub screen_gap: f64,
    pub slit_half_height: f64,
    pub particle_radius: f64,
    /// Runs with `|y| > y_bound` are escapes.
    pub y_bound: f64,
    pub max_steps: usize,
    pub detector: DetectorRule,
}

impl Geometry {
    /// `D = 5`, `d = 25`, `R = 5`, `r = 0.2`, escape bound 50, 10⁶ steps.
    pub fn appendix() -> Self {
        Geometry {
            emitter_distance: 5.0,
            screen_gap: 25.0,
            slit_half_height: 5.0,
            particle_radius: 0.2,
            y_bound: 50.0,
            max_steps: 1_000_000,
            detector: DetectorRule::FirstTick,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.emitter_distance,
            self.screen_gap,
            self.slit_half_height,
            self.particle_radius,
            self.y_bound,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("geometry"));
        }
        if !(self.emitter_distance > 0.0 && self.screen_gap > 0.0) {
            return Err(Error::invalid(
                "emitter_distance and screen_gap must be positive",
            ));
        }
        if !(self.particle_radius >= 0.0 && self.particle_radius < self.slit_half_height) {
            return Err(Error::invalid("particle_radius must satisfy 0 <= r < R"));
        }
        if !(self.y_bound > self.slit_half_height) {
            return Err(Error::invalid("y_bound must exceed the slit half-height"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be positive"));
        }
        Ok(())
    }

    /// Checks that the field's slit matches this geometry's slit.
    pub fn check_field(&self, field: &FieldParams) -> Result<()> {
        field.validate()?;
        if field.slit_half_height != self.slit_half_height {
            return Err(Error::invalid(format!(
                "slit half-height differs between geometry ({}) and field ({})",
                self.slit_half_height, field.slit_half_height
            )));
        }
        Ok(())
    }

    /// Half-height of the opening available to the particle's centre.
    pub fn effective_aperture(&self) -> f64 {
        self.slit_half_height - self.particle_radius
    }

    /// Runs with `x` below this are escapes.
    pub fn x_escape(&self) -> f64 {
        -2.0 * self.emitter_distance
    }

    /// Initial state for launch angle `alpha` (radians) and speed `v0`.
    pub fn launch(&self, alpha: f64, v0: f64) -> ParticleState {
        ParticleState::new(
            Vec2::new(-self.emitter_distance, 0.0),
            Vec2::new(v0 * alpha.cos(), v0 * alpha.sin()),
            0.0,
        )
    }

    /// Reference integrator step `1e-4 · D / v0`.
    pub fn default_reference_step(&self, v0: f64) -> f64 {
        1e-4 * self.emitter_distance / v0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Blocked { y_impact: f64 },
    Detected { y_hit: f64, t_hit: f64 },
    Escaped,
    StepLimit,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Blocked { .. } => "blocked",
            Outcome::Detected { .. } => "detected",
            Outcome::Escaped => "escaped",
            Outcome::StepLimit => "step_limit",
        }
    }

    pub fn is_detected(&self) -> bool {
        matches!(self, Outcome::Detected { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub outcome: Outcome,
    /// Visited states, including the launch state and the terminal point.
    pub path: Option<Vec<ParticleState>>,
    pub steps_taken: usize,
}

fn lerp_state(a: &ParticleState, b: &ParticleState, s: f64, pos: Vec2) -> ParticleState {
    ParticleState::new(pos, b.vel, a.t + s * (b.t - a.t))
}

/// Classifies the segment `prev → next`. Returns the outcome together with
/// the terminal state to record, or `None` if the run continues.
pub(crate) fn classify_segment(
    prev: &ParticleState,
    next: &ParticleState,
    g: &Geometry,
    rule: DetectorRule,
) -> Option<(Outcome, ParticleState)> {
    let (x0, x1) = (prev.pos.x, next.pos.x);
    let (y0, y1) = (prev.pos.y, next.pos.y);

    let blocked = if (x0 < 0.0 && x1 >= 0.0) || (x0 > 0.0 && x1 <= 0.0) {
        let s = x0 / (x0 - x1);
        let y = y0 + s * (y1 - y0);
        (y.abs() >= g.effective_aperture()).then_some((s, y))
    } else {
        None
    };

    let d = g.screen_gap;
    let detected = (x0 < d && x1 >= d).then(|| (d - x0) / (x1 - x0));

    match (blocked, detected) {
        (Some((s0, y)), sd) if sd.is_none_or(|sd| s0 <= sd) => Some((
            Outcome::Blocked { y_impact: y },
            lerp_state(prev, next, s0, Vec2::new(0.0, y)),
        )),
        (_, Some(sd)) => match rule {
            DetectorRule::FirstTick => Some((
                Outcome::Detected {
                    y_hit: y1,
                    t_hit: next.t,
                },
                *next,
            )),
            DetectorRule::Interpolated => {
                let y = y0 + sd * (y1 - y0);
                let state = lerp_state(prev, next, sd, Vec2::new(d, y));
                Some((
                    Outcome::Detected {
                        y_hit: y,
                        t_hit: state.t,
                    },
                    state,
                ))
            }
        },
        _ if y1.abs() > g.y_bound || x1 < g.x_escape() => Some((Outcome::Escaped, *next)),
        _ => None,
    }
}

fn run_trajectory<S>(
    start: ParticleState,
    g: &Geometry,
    rule: DetectorRule,
    record: bool,
    mut step: S,
) -> Result<TrajectoryRecord>
where
    S: FnMut(&ParticleState) -> Result<ParticleState>,
{
    let mut path = record.then(|| vec![start]);
    let mut cur = start;
    for n in 1..=g.max_steps {
        let next = step(&cur)?;
        if let Some((outcome, last)) = classify_segment(&cur, &next, g, rule) {
            if let Some(p) = path.as_mut() {
                p.push(last);
            }
            return Ok(TrajectoryRecord {
                outcome,
                path,
                steps_taken: n,
            });
        }
        if let Some(p) = path.as_mut() {
            p.push(next);
        }
        cur = next;
    }
    Ok(TrajectoryRecord {
        outcome: Outcome::StepLimit,
        path,
        steps_taken: g.max_steps,
    })
}

fn check_inputs(v0: f64, g: &Geometry, f: &FieldParams) -> Result<()> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(Error::invalid("v0 must be positive and finite"));
    }
    g.validate()?;
    g.check_field(f)
}

/// Runs one particle launched at angle `alpha` (radians) under the
/// discrete-time update.
pub fn run_discrete_trajectory(
    alpha: f64,
    v0: f64,
    g: &Geometry,
    f: &FieldParams,
    sp: &StepParams,
    record: bool,
) -> Result<TrajectoryRecord> {
    check_inputs(v0, g, f)?;
    sp.validate()?;
    if !alpha.is_finite() {
        return Err(Error::NonFinite("launch angle"));
    }
    run_trajectory(g.launch(alpha, v0), g, g.detector, record, |s| {
        step_discrete(s, f, sp)
    })
}

/// Runs one particle under the RK4 reference integrator with step `h`.
/// Detector hits are always interpolated.
pub fn run_continuous_trajectory(
    alpha: f64,
    v0: f64,
    g: &Geometry,
    f: &FieldParams,
    mass: f64,
    h: f64,
    record: bool,
) -> Result<TrajectoryRecord> {
    check_inputs(v0, g, f)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::invalid("mass must be positive and finite"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("reference step must be positive and finite"));
    }
    if !alpha.is_finite() {
        return Err(Error::NonFinite("launch angle"));
    }
    run_trajectory(
        g.launch(alpha, v0),
        g,
        DetectorRule::Interpolated,
        record,
        |s| rk4_step(s, f, mass, h),
    )
}
