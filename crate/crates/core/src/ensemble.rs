//! Trajectory ensembles and detector histograms.
//!
//! Every trajectory index `i` owns its own random substream (ChaCha8 keyed
//! by `(seed, i)`), and partial histograms are combined by integer addition,
//! so the result does not depend on the number of workers or on scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::StepParams;
use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::scattering::{run_discrete_trajectory, Geometry, Outcome};

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionMode {
    /// `n` angles drawn uniformly from `[alpha_min, alpha_max)`.
    Random { seed: u64, n: u64 },
    /// `n` evenly spaced angles including both ends.
    Sweep { n: u64 },
}

/// Launch speed and angle distribution. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionSpec {
    pub v0: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub mode: EmissionMode,
}

impl EmissionSpec {
    /// The `±45.5°` cone at speed 12.
    pub fn appendix(mode: EmissionMode) -> Self {
        EmissionSpec {
            v0: 12.0,
            alpha_min: (-45.5f64).to_radians(),
            alpha_max: 45.5f64.to_radians(),
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v0 > 0.0 && self.v0.is_finite()) {
            return Err(Error::invalid("v0 must be positive and finite"));
        }
        if !(self.alpha_min.is_finite() && self.alpha_max.is_finite()) {
            return Err(Error::NonFinite("angle range"));
        }
        if !(self.alpha_min < self.alpha_max) {
            return Err(Error::invalid("alpha_min must be below alpha_max"));
        }
        if self.count() == 0 {
            return Err(Error::invalid("emission count must be positive"));
        }
        Ok(())
    }

    pub fn count(&self) -> u64 {
        match self.mode {
            EmissionMode::Random { n, .. } | EmissionMode::Sweep { n } => n,
        }
    }

    /// Launch angle of trajectory `i`.
    pub fn angle(&self, i: u64) -> f64 {
        match self.mode {
            EmissionMode::Random { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let u: f64 = rng.random();
                self.alpha_min + (self.alpha_max - self.alpha_min) * u
            }
            EmissionMode::Sweep { n } => {
                if n == 1 {
                    return 0.5 * (self.alpha_min + self.alpha_max);
                }
                // Weighted form: a symmetric range gives exactly negated angles.
                let last = (n - 1) as f64;
                let i = i as f64;
                (self.alpha_min * (last - i) + self.alpha_max * i) / last
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSpec {
    pub bin_width: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Location of a detector hit relative to the binned range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinSlot {
    Underflow,
    Bin(usize),
    Overflow,
}

impl HistogramSpec {
    /// Cells one particle diameter wide over `[-25, 25]`.
    pub fn appendix() -> Self {
        HistogramSpec {
            bin_width: 0.4,
            y_min: -25.0,
            y_max: 25.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::invalid("bin_width must be positive and finite"));
        }
        if !(self.y_min.is_finite() && self.y_max.is_finite() && self.y_min < self.y_max) {
            return Err(Error::invalid("histogram range must satisfy y_min < y_max"));
        }
        Ok(())
    }

    /// `ceil((y_max - y_min) / bin_width)`, ignoring rounding noise in the ratio.
    pub fn bin_count(&self) -> usize {
        let ratio = (self.y_max - self.y_min) / self.bin_width;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        };
        (n as usize).max(1)
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.y_min + (k as f64 + 0.5) * self.bin_width
    }

    pub fn slot(&self, y: f64) -> BinSlot {
        if y < self.y_min {
            BinSlot::Underflow
        } else if y > self.y_max {
            BinSlot::Overflow
        } else {
            let k = ((y - self.y_min) / self.bin_width).floor() as usize;
            BinSlot::Bin(k.min(self.bin_count() - 1))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    pub n_emitted: u64,
    pub n_detected: u64,
    pub n_blocked: u64,
    pub n_escaped: u64,
    pub n_steplimit: u64,
    /// Detected below `y_min`.
    pub underflow: u64,
    /// Detected above `y_max`.
    pub overflow: u64,
}

impl Histogram {
    pub fn empty(spec: HistogramSpec) -> Self {
        Histogram {
            counts: vec![0; spec.bin_count()],
            spec,
            n_emitted: 0,
            n_detected: 0,
            n_blocked: 0,
            n_escaped: 0,
            n_steplimit: 0,
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn record(&mut self, outcome: &Outcome) {
        self.n_emitted += 1;
        match *outcome {
            Outcome::Blocked { .. } => self.n_blocked += 1,
            Outcome::Escaped => self.n_escaped += 1,
            Outcome::StepLimit => self.n_steplimit += 1,
            Outcome::Detected { y_hit, .. } => {
                self.n_detected += 1;
                match self.spec.slot(y_hit) {
                    BinSlot::Underflow => self.underflow += 1,
                    BinSlot::Overflow => self.overflow += 1,
                    BinSlot::Bin(k) => self.counts[k] += 1,
                }
            }
        }
    }

    /// Both bookkeeping identities: outcome tallies sum to the emitted
    /// count, and binned plus out-of-range hits sum to the detected count.
    pub fn is_conserved(&self) -> bool {
        let binned: u64 = self.counts.iter().sum();
        self.n_emitted == self.n_detected + self.n_blocked + self.n_escaped + self.n_steplimit
            && binned + self.underflow + self.overflow == self.n_detected
    }
}

/// Element-wise sum of two histograms over the same spec.
pub fn merge(a: &Histogram, b: &Histogram) -> Result<Histogram> {
    if a.spec != b.spec || a.counts.len() != b.counts.len() {
        return Err(Error::SpecMismatch);
    }
    Ok(Histogram {
        spec: a.spec,
        counts: a.counts.iter().zip(&b.counts).map(|(x, y)| x + y).collect(),
        n_emitted: a.n_emitted + b.n_emitted,
        n_detected: a.n_detected + b.n_detected,
        n_blocked: a.n_blocked + b.n_blocked,
        n_escaped: a.n_escaped + b.n_escaped,
        n_steplimit: a.n_steplimit + b.n_steplimit,
        underflow: a.underflow + b.underflow,
        overflow: a.overflow + b.overflow,
    })
}

/// Per-bin frequencies `count / n_detected`.
pub fn normalize(h: &Histogram) -> Result<Vec<f64>> {
    if h.n_detected == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = h.n_detected as f64;
    Ok(h.counts.iter().map(|&c| c as f64 / n).collect())
}

/// Runs the ensemble described by `e` on `workers` threads and bins the
/// detector hits.
pub fn run_ensemble(
    e: &EmissionSpec,
    g: &Geometry,
    f: &FieldParams,
    sp: &StepParams,
    h: &HistogramSpec,
    workers: usize,
) -> Result<Histogram> {
    e.validate()?;
    g.validate()?;
    g.check_field(f)?;
    sp.validate()?;
    h.validate()?;
    if workers == 0 {
        return Err(Error::invalid("workers must be at least 1"));
    }

    let n = e.count();
    let chunks = n.div_ceil(CHUNK);
    let run_chunk = |c: u64| -> Result<Histogram> {
        let mut partial = Histogram::empty(*h);
        for i in (c * CHUNK)..((c + 1) * CHUNK).min(n) {
            let rec = run_discrete_trajectory(e.angle(i), e.v0, g, f, sp, false)?;
            partial.record(&rec.outcome);
        }
        Ok(partial)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|err| Error::WorkerPool(err.to_string()))?;
    let partials: Vec<Histogram> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(run_chunk)
            .collect::<Result<Vec<_>>>()
    })?;

    let mut total = Histogram::empty(*h);
    for p in &partials {
        total = merge(&total, p)?;
    }
    debug_assert!(total.is_conserved());
    Ok(total)
}
