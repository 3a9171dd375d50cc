use slitsim_core::{
    normalize, run_ensemble, EmissionMode, EmissionSpec, FieldParams, Geometry, HistogramSpec,
    StepParams,
};

fn field() -> FieldParams {
    FieldParams::new(-1.0, 5.0).unwrap()
}

fn sp(tau: f64) -> StepParams {
    StepParams::new(tau, StepParams::DEFAULT_MASS).unwrap()
}

#[test]
fn tallies_are_conserved() {
    let e = EmissionSpec::appendix(EmissionMode::Random { seed: 3, n: 1000 });
    let h = run_ensemble(
        &e,
        &Geometry::appendix(),
        &field(),
        &sp(0.05),
        &HistogramSpec::appendix(),
        2,
    )
    .unwrap();
    assert_eq!(h.n_emitted, 1000);
    assert_eq!(
        h.n_detected + h.n_blocked + h.n_escaped + h.n_steplimit,
        1000
    );
    assert!(h.is_conserved());
    assert!(h.n_detected > 0);
}

#[test]
fn worker_count_does_not_change_the_result() {
    let e = EmissionSpec::appendix(EmissionMode::Random { seed: 11, n: 5000 });
    let run = |w| {
        run_ensemble(
            &e,
            &Geometry::appendix(),
            &field(),
            &sp(0.05),
            &HistogramSpec::appendix(),
            w,
        )
        .unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(8));
    assert_eq!(one, run(3));
}

#[test]
fn free_sweep_histogram_is_exactly_symmetric() {
    let free = FieldParams::new(0.0, 5.0).unwrap();
    let e = EmissionSpec {
        v0: 12.0,
        alpha_min: (-45f64).to_radians(),
        alpha_max: 45f64.to_radians(),
        mode: EmissionMode::Sweep { n: 1001 },
    };
    let spec = HistogramSpec {
        bin_width: 0.4,
        y_min: -40.2,
        y_max: 40.2,
    };
    // Odd bin count so the axial hit sits in a centred bin, not on an edge.
    // Straight lines with |α| ≤ 45° reach |y| ≤ 30 at the detector.
    let h = run_ensemble(&e, &Geometry::appendix(), &free, &sp(0.05), &spec, 4).unwrap();
    assert_eq!(h.underflow + h.overflow, 0);
    let k = h.counts.len();
    for i in 0..k {
        assert_eq!(h.counts[i], h.counts[k - 1 - i], "bin {i}");
    }
    // Slit clipping is the only loss for free flight.
    assert_eq!(h.n_escaped, 0);
    assert_eq!(h.n_detected + h.n_blocked, 1001);
}

/// Upper χ² quantile by the Wilson–Hilferty approximation.
fn chi2_quantile(dof: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * dof);
    dof * (1.0 - a + z * a.sqrt()).powi(3)
}

#[test]
fn random_ensemble_has_no_systematic_asymmetry() {
    let e = EmissionSpec::appendix(EmissionMode::Random {
        seed: 2024,
        n: 100_000,
    });
    let h = run_ensemble(
        &e,
        &Geometry::appendix(),
        &field(),
        &sp(0.05),
        &HistogramSpec::appendix(),
        1,
    )
    .unwrap();
    let k = h.counts.len();
    let (mut stat, mut dof) = (0.0, 0.0);
    for i in 0..k / 2 {
        let (a, b) = (h.counts[i] as f64, h.counts[k - 1 - i] as f64);
        if a + b > 0.0 {
            stat += (a - b).powi(2) / (a + b);
            dof += 1.0;
        }
    }
    let critical = chi2_quantile(dof, 2.326);
    assert!(
        stat < critical,
        "chi2 {stat} over {dof} dof, critical {critical}"
    );
    let f = normalize(&h).unwrap();
    let binned: f64 = f.iter().sum();
    let outside = (h.underflow + h.overflow) as f64 / h.n_detected as f64;
    assert!((binned + outside - 1.0).abs() < 1e-12);
}
