//! Electrostatic force of a uniformly charged plane at `x = 0` with a slit
//! `|y| < R`, acting on a point charge moving in the `z = 0` plane.
//!
//! Two routes are provided: the closed form used in production
//! ([`force_closed_form`]) and a numerical integration of the projected
//! Coulomb integrals ([`force_quadrature`]) that serves as its oracle.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breakpoints, Integral};

/// A point or vector in the `xy`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Charge product `qσ` and slit half-height `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub charge_product: f64,
    pub slit_half_height: f64,
}

impl FieldParams {
    pub fn new(charge_product: f64, slit_half_height: f64) -> Result<Self> {
        let params = FieldParams {
            charge_product,
            slit_half_height,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.charge_product.is_finite() {
            return Err(Error::invalid("charge_product must be finite"));
        }
        if !(self.slit_half_height > 0.0 && self.slit_half_height.is_finite()) {
            return Err(Error::invalid(
                "slit_half_height must be positive and finite",
            ));
        }
        Ok(())
    }

    /// Whether `p` lies on the charged part of the screen.
    pub fn on_screen(&self, p: Vec2) -> bool {
        p.x == 0.0 && p.y.abs() >= self.slit_half_height
    }

    fn check_point(&self, p: Vec2) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::NonFinite("position"));
        }
        if self.on_screen(p) {
            return Err(Error::OnScreen { x: p.x, y: p.y });
        }
        Ok(())
    }
}

/// Settings for [`force_quadrature`].
///
/// `truncation_half_width` is the symmetric cutoff `Y`: the two half-lines
/// of the screen are integrated as a pair over `[R, Y]`, which cancels their
/// individually divergent logarithms, and the remainder `[Y, ∞)` is
/// integrated after the substitution `u = Y / s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub truncation_half_width: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            truncation_half_width: 1e4,
            abs_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

/// Closed-form force on a unit-mass charge at `p`.
///
/// `F_x = 2qσ (sign(x) π + atan((y-R)/x) - atan((y+R)/x))`,
/// `F_y = qσ ln[(x² + (R-y)²) / (x² + (R+y)²)]`.
///
/// Inside the slit at `x = 0` the analytic limit `F_x = 0` is used.
pub fn force_closed_form(p: Vec2, params: &FieldParams) -> Result<Vec2> {
    params.check_point(p)?;
    Ok(force_unchecked(p, params))
}

/// [`force_closed_form`] without the domain checks, for hot loops whose
/// callers guarantee `p` is finite and off the screen.
#[inline]
pub(crate) fn force_unchecked(p: Vec2, params: &FieldParams) -> Vec2 {
    let qs = params.charge_product;
    let r = params.slit_half_height;
    let Vec2 { x, y } = p;
    let x2 = x * x;
    // ln(a) - ln(b) rather than ln(a/b) keeps F_y exactly odd in y.
    let fy = qs * ((x2 + (r - y) * (r - y)).ln() - (x2 + (r + y) * (r + y)).ln());
    let fx = if x == 0.0 {
        0.0
    } else {
        let lower = ((y - r) / x).atan();
        let upper = ((y + r) / x).atan();
        2.0 * qs * (x.signum() * PI + (lower - upper))
    };
    Vec2::new(fx, fy)
}

/// Force at `p` by adaptive quadrature of the projected Coulomb integrals,
/// with the `z'` integral done analytically (`∫ dz' / (a² + z'²)^{3/2} = 2/a²`).
pub fn force_quadrature(p: Vec2, params: &FieldParams, spec: &QuadratureSpec) -> Result<Vec2> {
    params.check_point(p)?;
    let r = params.slit_half_height;
    let cutoff = spec.truncation_half_width;
    if !(cutoff > r) {
        return Err(Error::invalid(
            "truncation_half_width must exceed the slit half-height",
        ));
    }
    if !(spec.abs_tol > 0.0) {
        return Err(Error::invalid("abs_tol must be positive"));
    }
    let Vec2 { x, y } = p;
    let x2 = x * x;

    // Contributions of y' = u and y' = -u, u > R, summed.
    let gx = |u: f64| {
        let a = y - u;
        let b = y + u;
        2.0 * x / (x2 + a * a) + 2.0 * x / (x2 + b * b)
    };
    let gy = |u: f64| {
        let a = y - u;
        let b = y + u;
        2.0 * a / (x2 + a * a) + 2.0 * b / (x2 + b * b)
    };

    let mut breaks = vec![r, cutoff];
    for c in [
        y.abs(),
        y.abs() + 4.0 * (x.abs() + 1.0),
        2.0 * r + y.abs(),
        10.0 * (r + y.abs()),
    ] {
        if c > r && c < cutoff {
            breaks.push(c);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let tol = 0.25 * spec.abs_tol;
    let near = |g: &dyn Fn(f64) -> f64| -> Result<Integral> {
        integrate_with_breakpoints(g, &breaks, tol, spec.max_subdivisions)
    };
    let tail = |g: &dyn Fn(f64) -> f64| -> Result<Integral> {
        integrate_with_breakpoints(
            |s: f64| {
                let u = cutoff / s;
                g(u) * cutoff / (s * s)
            },
            &[0.0, 1.0],
            tol,
            spec.max_subdivisions,
        )
    };

    let ix = near(&gx)?.value + tail(&gx)?.value;
    let iy = near(&gy)?.value + tail(&gy)?.value;
    let qs = params.charge_product;
    Ok(Vec2::new(qs * ix, qs * iy))
}

const POTENTIAL_TOL: f64 = 1e-11;
const POTENTIAL_MAX_SUBDIVISIONS: usize = 2000;

/// Electrostatic potential energy at `p`, referenced to `potential(0, 0) = 0`.
///
/// Computed as `-∫ F · dl` along the polyline `(0,0) → (x,0) → (x,y)`; the
/// first leg runs along the axis through the slit, the second is off the
/// screen plane whenever `x ≠ 0`. For `x = 0` the path runs along the slit.
pub fn potential(p: Vec2, params: &FieldParams) -> Result<f64> {
    params.check_point(p)?;
    let r = params.slit_half_height;
    let fx_axis = |s: f64| force_unchecked(Vec2::new(s, 0.0), params).x;
    let fy_at = |s: f64| force_unchecked(Vec2::new(p.x, s), params).y;

    let along_x = if p.x == 0.0 {
        0.0
    } else {
        signed_integral(fx_axis, 0.0, p.x, &[])?
    };
    let along_y = if p.y == 0.0 {
        0.0
    } else {
        signed_integral(fy_at, 0.0, p.y, &[-r, r])?
    };
    Ok(-(along_x + along_y))
}

fn signed_integral<F: Fn(f64) -> f64>(f: F, from: f64, to: f64, extra: &[f64]) -> Result<f64> {
    let (lo, hi, sign) = if from <= to {
        (from, to, 1.0)
    } else {
        (to, from, -1.0)
    };
    let mut breaks = vec![lo, hi];
    breaks.extend(extra.iter().copied().filter(|&b| b > lo && b < hi));
    breaks.sort_by(f64::total_cmp);
    let scale = 1.0 + (hi - lo);
    let integral = integrate_with_breakpoints(
        f,
        &breaks,
        POTENTIAL_TOL * scale,
        POTENTIAL_MAX_SUBDIVISIONS,
    )?;
    Ok(sign * integral.value)
}
