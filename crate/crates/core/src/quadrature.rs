//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the union of the consecutive intervals given by
/// `breakpoints` (which must be sorted), bisecting the worst segment until
/// the summed error estimate falls below `abs_tol`.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if breakpoints.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two breakpoints"));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::invalid("quadrature tolerance must be positive"));
    }
    if breakpoints.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("quadrature bounds"));
    }

    let mut segments: Vec<Segment> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&mut f, w[0], w[1]))
        .collect();
    let mut subdivisions = 0;

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        if error <= abs_tol {
            return Ok(Integral {
                value,
                error,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::ToleranceNotMet {
                tolerance: abs_tol,
                estimate: error,
                subdivisions,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|(_, l), (_, r)| l.error.total_cmp(&r.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        // Interval too small to split further in floating point.
        if !(s.a < mid && mid < s.b) {
            return Err(Error::ToleranceNotMet {
                tolerance: abs_tol,
                estimate: error,
                subdivisions,
            });
        }
        segments.push(kronrod15(&mut f, s.a, mid));
        segments.push(kronrod15(&mut f, mid, s.b));
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, b]`; see [`integrate_with_breakpoints`].
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if b < a {
        return integrate_with_breakpoints(f, &[b, a], abs_tol, max_subdivisions).map(|mut i| {
            i.value = -i.value;
            i
        });
    }
    integrate_with_breakpoints(f, &[a, b], abs_tol, max_subdivisions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        // K15 integrates degree <= 22 exactly.
        let r = integrate(|x| x.powi(6) - 2.0 * x, 0.0, 2.0, 1e-12, 10).unwrap();
        assert_relative_eq!(r.value, 128.0 / 7.0 - 4.0, max_relative = 1e-14);
    }

    #[test]
    fn peaked_lorentzian() {
        let w = 1e-3;
        let r = integrate(|x| w / (w * w + x * x), -1.0, 1.0, 1e-12, 200).unwrap();
        assert_relative_eq!(r.value, 2.0 * (1.0 / w).atan(), max_relative = 1e-11);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let a = integrate(f64::cos, 0.0, 1.0, 1e-13, 10).unwrap().value;
        let b = integrate(f64::cos, 1.0, 0.0, 1e-13, 10).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let err = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }
}
