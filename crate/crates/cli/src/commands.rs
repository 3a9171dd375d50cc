use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use slitsim_core::analysis::find_extrema_at;
use slitsim_core::{
    find_extrema, normalize, oscillation_index, run_discrete_trajectory, run_ensemble,
    total_variation, ExtremaReport, Histogram,
};

use crate::config::{EmissionKind, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{self, Distribution, Traced, View};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(CliError::io(path))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn frequencies(h: &Histogram) -> Result<Vec<f64>> {
    if h.n_detected == 0 {
        return Ok(vec![0.0; h.counts.len()]);
    }
    Ok(normalize(h)?)
}

fn extrema(cfg: &ExperimentConfig, h: &Histogram, freqs: &[f64]) -> Result<ExtremaReport> {
    if h.n_detected == 0 {
        return Ok(ExtremaReport {
            maxima: Vec::new(),
            minima: Vec::new(),
            smoothing_window: cfg.window,
        });
    }
    Ok(find_extrema(
        freqs,
        &h.spec,
        h.n_detected,
        cfg.window,
        cfg.k_sigma,
    )?)
}

fn run_at(cfg: &ExperimentConfig, tau: f64) -> Result<Histogram> {
    Ok(run_ensemble(
        &cfg.emission_spec(cfg.emission, cfg.n),
        &cfg.geometry(),
        &cfg.field()?,
        &cfg.step_params(tau)?,
        &cfg.histogram(),
        cfg.workers,
    )?)
}

fn tallies(s: &mut String, h: &Histogram) {
    let _ = writeln!(s, "emitted = {}", h.n_emitted);
    let _ = writeln!(s, "detected = {}", h.n_detected);
    let _ = writeln!(s, "blocked = {}", h.n_blocked);
    let _ = writeln!(s, "escaped = {}", h.n_escaped);
    let _ = writeln!(s, "step_limit = {}", h.n_steplimit);
    let _ = writeln!(s, "underflow = {}", h.underflow);
    let _ = writeln!(s, "overflow = {}", h.overflow);
}

pub struct SimulateOutput {
    pub histogram: Histogram,
    pub extrema: ExtremaReport,
    pub distribution: PathBuf,
}

/// Runs one ensemble at `cfg.tau`; writes `distribution.csv` and `report.txt`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulateOutput> {
    cfg.validate()?;
    prepare_dir(&cfg.output_dir)?;
    let start = Instant::now();
    let h = run_at(cfg, cfg.tau)?;
    let wall = start.elapsed().as_secs_f64();
    let freqs = frequencies(&h)?;
    let ext = extrema(cfg, &h, &freqs)?;

    let distribution = cfg.output_dir.join("distribution.csv");
    write(&distribution, &output::distribution_csv(&h, &freqs))?;

    let mut report = String::from("# slitsim simulate\n");
    tallies(&mut report, &h);
    let _ = writeln!(report, "maxima = {}", ext.maxima.len());
    let _ = writeln!(report, "minima = {}", ext.minima.len());
    let _ = writeln!(report, "wall_time_s = {wall:.3}");
    report.push_str("# parameters\n");
    report.push_str(&cfg.to_config_text());
    write(&cfg.output_dir.join("report.txt"), &report)?;

    Ok(SimulateOutput {
        histogram: h,
        extrema: ext,
        distribution,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub n_detected: u64,
    pub n_maxima: usize,
    pub oscillation_index: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// `(i, j, total_variation)` for every `i < j` in `tau_list` order.
    pub pairs: Vec<(usize, usize, f64)>,
}

/// Per-τ distribution file name; the index keeps repeated steps apart.
pub fn sweep_file_name(index: usize, tau: f64) -> String {
    format!("distribution_{index:02}_tau_{tau}.csv")
}

/// Runs the same emitted ensemble at each step in `tau_list`.
pub fn sweep_tau(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    prepare_dir(&cfg.output_dir)?;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut all_freqs = Vec::new();
    let mut report = String::from("# slitsim sweep-tau\n");
    for (i, &tau) in cfg.tau_list.iter().enumerate() {
        let h = run_at(cfg, tau)?;
        let freqs = frequencies(&h)?;
        let ext = extrema(cfg, &h, &freqs)?;
        write(
            &cfg.output_dir.join(sweep_file_name(i, tau)),
            &output::distribution_csv(&h, &freqs),
        )?;
        let _ = writeln!(report, "[tau = {tau}]");
        tallies(&mut report, &h);
        rows.push(SweepRow {
            tau,
            n_detected: h.n_detected,
            n_maxima: ext.maxima.len(),
            oscillation_index: oscillation_index(&freqs, cfg.window)?,
        });
        all_freqs.push(freqs);
    }
    let mut pairs = Vec::new();
    for i in 0..all_freqs.len() {
        for j in i + 1..all_freqs.len() {
            pairs.push((i, j, total_variation(&all_freqs[i], &all_freqs[j])?));
        }
    }

    let mut csv = String::from("tau,n_maxima,oscillation_index\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{}",
            output::g17(r.tau),
            r.n_maxima,
            output::g17(r.oscillation_index)
        );
    }
    write(&cfg.output_dir.join("sweep_report.csv"), &csv)?;
    let mut pcsv = String::from("tau_a,tau_b,total_variation\n");
    for &(i, j, tv) in &pairs {
        let (a, b) = (cfg.tau_list[i], cfg.tau_list[j]);
        let _ = writeln!(
            pcsv,
            "{},{},{}",
            output::g17(a),
            output::g17(b),
            output::g17(tv)
        );
    }
    write(&cfg.output_dir.join("sweep_pairs.csv"), &pcsv)?;

    let _ = writeln!(report, "wall_time_s = {:.3}", start.elapsed().as_secs_f64());
    report.push_str("# parameters\n");
    report.push_str(&cfg.to_config_text());
    write(&cfg.output_dir.join("report.txt"), &report)?;
    Ok(SweepOutput { rows, pairs })
}

pub struct TraceOutput {
    pub traces: Vec<Traced>,
    pub svg: PathBuf,
    pub csv: PathBuf,
}

/// Draws `cfg.trace_n` evenly swept trajectories at `cfg.tau`.
pub fn trace(cfg: &ExperimentConfig) -> Result<TraceOutput> {
    if !cfg.record {
        return Err(CliError::Config(
            "trace requires recording (record = true)".into(),
        ));
    }
    if cfg.trace_n == 0 {
        return Err(CliError::Config("trace_n must be at least 1".into()));
    }
    cfg.validate()?;
    prepare_dir(&cfg.output_dir)?;
    let e = cfg.emission_spec(EmissionKind::Sweep, cfg.trace_n);
    e.validate()?;
    let (g, f, sp) = (cfg.geometry(), cfg.field()?, cfg.step_params(cfg.tau)?);
    let traces = (0..cfg.trace_n)
        .map(|i| {
            let rec = run_discrete_trajectory(e.angle(i), e.v0, &g, &f, &sp, true)?;
            Ok(Traced {
                outcome: rec.outcome,
                path: rec.path.unwrap_or_default(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let csv = cfg.output_dir.join("trajectories.csv");
    write(&csv, &output::trajectories_csv(&traces))?;
    let view = View::for_setup(&g, cfg.y_min.abs().max(cfg.y_max.abs()));
    let caption = format!(
        "{} trajectories, tau = {}, angles [{}, {}] deg",
        cfg.trace_n, cfg.tau, cfg.alpha_min_deg, cfg.alpha_max_deg
    );
    let svg = cfg.output_dir.join("trajectories.svg");
    write(
        &svg,
        &output::trajectories_svg(&traces, &g, &view, &caption),
    )?;
    Ok(TraceOutput { traces, svg, csv })
}

pub struct AnalyzeOutput {
    pub distribution: Distribution,
    pub report: ExtremaReport,
    pub extrema_csv: PathBuf,
}

/// Finds extrema in an emitted distribution CSV and writes `extrema.csv`
/// into `out_dir`.
pub fn analyze(
    csv_path: &Path,
    window: usize,
    k_sigma: f64,
    out_dir: &Path,
) -> Result<AnalyzeOutput> {
    let text = fs::read_to_string(csv_path).map_err(CliError::io(csv_path))?;
    let d = output::parse_distribution(&text, csv_path)?;
    let n = d.n_detected();
    if n == 0 {
        return Err(CliError::Input {
            path: csv_path.to_path_buf(),
            msg: "distribution has no detected hits".into(),
        });
    }
    let report = find_extrema_at(&d.freqs, &d.centers, n, window, k_sigma)?;
    prepare_dir(out_dir)?;
    let extrema_csv = out_dir.join("extrema.csv");
    write(&extrema_csv, &output::extrema_csv(&report))?;
    Ok(AnalyzeOutput {
        distribution: d,
        report,
        extrema_csv,
    })
}
