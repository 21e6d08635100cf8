//! Experiment drivers. Each returns a table plus the list of convergence
//! conditions that failed along the way.

use crate::config::{ExperimentConfig, PrecisionSetting, ScalingScheme};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use ddsim_core::hamiltonian::{
    build_spin_chain, coupling_strengths, decompose, random_decomposition, random_hermitian, thermal_bath_state,
    BathDecomposition, CouplingStrengths,
};
use ddsim_core::magnus::{
    bound_cdd, bound_pdd, bound_tsds, cdd_pdd_ratio_bound, convergence_check, ideal_level_bound, BathRegime,
};
use ddsim_core::operator::{op_norm, NormKind, OperatorMatrix, SystemPosition};
use ddsim_core::precision::run_with_escalation;
use ddsim_core::pulse::{
    adjust_for_width, gen_cdd, gen_concat_cpmg, gen_cpmg, gen_pdd, gen_tsds, parse_sequence, simplify_pauli, Axis,
    PulseSequence, Segment,
};
use ddsim_core::scalar::{to_decimal, Float};
use ddsim_core::simulator::{
    default_system_state, effective_error_hamiltonian, purity_loss, simulate, thompson_check, Evolver,
};
use ddsim_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub struct Report {
    pub table: Table,
    /// Human-readable descriptions of failed convergence conditions.
    pub flags: Vec<String>,
}

impl Report {
    fn new(table: Table) -> Self {
        Report { table, flags: Vec::new() }
    }
}

/// Dispatch on `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    use crate::config::Experiment::*;
    let mut report = match cfg.experiment {
        Fig1 => run_fig1(cfg)?,
        Fig2 => run_fig2(cfg)?,
        Table1Scaling => run_scaling(cfg, cfg.scheme)?,
        PddCddRatio => run_ratio(cfg)?,
        ThompsonSweep => run_thompson_sweep(cfg)?,
        CpmgScaling => run_cpmg_scaling(cfg)?,
        TsdsScaling => run_tsds_scaling(cfg)?,
        Custom => run_custom(cfg)?,
    };
    report.table.config_hash = cfg.hash();
    report.table.annotate("experiment", cfg.experiment);
    Ok(report)
}

/// Least-squares slope of `ln y` against `ln x`, ignoring non-positive points.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `points` values spaced evenly in log between `lo` and `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|k| lo * (step * k as f64).exp()).collect()
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// Spin-chain model rebuilt at whatever precision a run needs.
struct ChainModel {
    cfg: ExperimentConfig,
}

impl ChainModel {
    fn at(&self, bits: u32) -> CliResult<(OperatorMatrix, OperatorMatrix)> {
        let h = build_spin_chain(&self.cfg.chain(), bits)?;
        let d = decompose(&h, SystemPosition::Last)?;
        let rho = thermal_bath_state(&d.b0, &self.cfg.thermal())?;
        Ok((h, rho))
    }

    fn couplings(&self) -> CliResult<CouplingStrengths> {
        let h = build_spin_chain(&self.cfg.chain(), 128)?;
        Ok(coupling_strengths(&decompose(&h, SystemPosition::Last)?, NormKind::Spectral)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dd {
    Cdd,
    Pdd,
}

impl Dd {
    fn name(self) -> &'static str {
        match self {
            Dd::Cdd => "CDD",
            Dd::Pdd => "PDD",
        }
    }
}

/// Level-`level` sequence at `τ0 = T/4^level`. PDD repeats the universal
/// cycle `4^(level−1)` times. CDD pulses are left unmerged, so every nominal
/// pulse carries its own width.
fn level_sequence(dd: Dd, total_time: f64, level: u32, width: f64) -> ddsim_core::Result<PulseSequence> {
    let tau0 = total_time / 4f64.powi(level as i32);
    let seq = match dd {
        Dd::Cdd => gen_cdd(tau0, level)?,
        Dd::Pdd => gen_pdd(tau0, 4usize.pow(level.saturating_sub(1)))?,
    };
    if width > 0.0 {
        adjust_for_width(&seq, width)
    } else {
        Ok(seq)
    }
}

struct PurityRow {
    n_pulses: u64,
    loss: Float,
    bits: u32,
}

fn purity_row(model: &ChainModel, seq: &PulseSequence, setting: PrecisionSetting, predicted: f64) -> CliResult<PurityRow> {
    let dim = 1usize << model.cfg.n_spins;
    let ((loss, _), bits) = run_with_escalation(setting.policy(predicted), dim, |bits| {
        let (h, rho) = model.at(bits).map_err(|e| match e {
            CliError::Core(c) => c,
            other => Error::BadParams(other.to_string()),
        })?;
        let u = Evolver::new(&h, bits)?.evolve(seq)?;
        let loss = purity_loss(&u, &default_system_state(bits), &rho)?;
        let obs = loss.to_f64();
        Ok(((loss, ()), obs))
    })?;
    Ok(PurityRow { n_pulses: seq.pulse_count(), loss, bits })
}

/// Purity predicted from the level bound, used to pick the starting precision.
fn predicted_purity(c: &CouplingStrengths, dd: Dd, total_time: f64, level: u32, width: f64) -> f64 {
    let tau0 = total_time / 4f64.powi(level as i32);
    let phi = match dd {
        Dd::Cdd => total_time * ideal_level_bound(c.j, c.beta, tau0, level),
        Dd::Pdd => bound_pdd(c, tau0, total_time, 0.0).map(|e| e.phi).unwrap_or(1.0),
    };
    (phi * phi + (width * c.j).powi(2)).min(1.0)
}

fn level_flags(c: &CouplingStrengths, cfg: &ExperimentConfig, level: u32, width: f64) -> CliResult<Option<String>> {
    let tau0 = cfg.total_time / 4f64.powi(level as i32);
    let r = convergence_check(c, tau0, width, level, cfg.total_time)?;
    if r.all_ok() {
        return Ok(None);
    }
    let mut failed = Vec::new();
    for (ok, name) in [
        (r.magnus_radius_ok, "magnus_radius"),
        (r.taunb_ok, "taunb"),
        (r.width_ok, "width"),
        (r.appendix_b_ok, "appendix_b"),
    ] {
        if !ok {
            failed.push(name);
        }
    }
    Ok(Some(format!("level {level} width {width:e}: {}", failed.join(","))))
}

/// CDD and PDD purity loss for ideal pulses at every level.
pub fn run_fig1(cfg: &ExperimentConfig) -> CliResult<Report> {
    let model = ChainModel { cfg: cfg.clone() };
    let c = model.couplings()?;
    let setting = cfg.precision_setting()?;
    let jobs: Vec<(u32, Dd)> =
        (cfg.level_min.max(1)..=cfg.level_max).flat_map(|l| [(l, Dd::Cdd), (l, Dd::Pdd)]).collect();
    let rows: Vec<CliResult<Vec<String>>> = jobs
        .par_iter()
        .map(|&(level, dd)| {
            let seq = level_sequence(dd, cfg.total_time, level, 0.0)?;
            let r = purity_row(&model, &seq, setting, predicted_purity(&c, dd, cfg.total_time, level, 0.0))?;
            Ok(vec![
                level.to_string(),
                dd.name().into(),
                r.n_pulses.to_string(),
                to_decimal(&r.loss),
                r.bits.to_string(),
            ])
        })
        .collect();
    let mut table = Table::new(&["level", "scheme", "n_pulses", "purity_loss", "precision_bits"]);
    for r in rows {
        table.push(r?);
    }
    let mut report = Report::new(table);
    for level in cfg.level_min.max(1)..=cfg.level_max {
        report.flags.extend(level_flags(&c, cfg, level, 0.0)?);
    }
    Ok(report)
}

/// The `run_fig1` sweep repeated for each configured pulse width. Rows whose pulses
/// no longer fit into the free periods are marked `skipped`.
pub fn run_fig2(cfg: &ExperimentConfig) -> CliResult<Report> {
    let model = ChainModel { cfg: cfg.clone() };
    let c = model.couplings()?;
    let setting = cfg.precision_setting()?;
    let mut jobs = Vec::new();
    for &w in &cfg.pulse_width {
        for l in cfg.level_min.max(1)..=cfg.level_max {
            jobs.push((w, l, Dd::Cdd));
            jobs.push((w, l, Dd::Pdd));
        }
    }
    let rows: Vec<CliResult<Vec<String>>> = jobs
        .par_iter()
        .map(|&(width, level, dd)| {
            let mut row = vec![level.to_string(), dd.name().to_string(), fmt(width)];
            match level_sequence(dd, cfg.total_time, level, width) {
                Err(Error::WidthTooLarge { .. }) => {
                    row.extend(["".into(), "".into(), "".into(), "skipped".into()]);
                }
                Err(e) => return Err(e.into()),
                Ok(seq) => {
                    let pred = predicted_purity(&c, dd, cfg.total_time, level, width);
                    let r = purity_row(&model, &seq, setting, pred)?;
                    row.extend([r.n_pulses.to_string(), to_decimal(&r.loss), r.bits.to_string(), "ok".into()]);
                }
            }
            Ok(row)
        })
        .collect();
    let mut table =
        Table::new(&["level", "scheme", "width", "n_pulses", "purity_loss", "precision_bits", "status"]);
    for r in rows {
        table.push(r?);
    }
    let mut report = Report::new(table);
    for &w in &cfg.pulse_width {
        for level in cfg.level_min.max(1)..=cfg.level_max {
            report.flags.extend(level_flags(&c, cfg, level, w)?);
        }
    }
    Ok(report)
}

fn seeded(cfg: &ExperimentConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

/// Random model with `‖B0‖ = model_beta` and couplings up to `model_j`.
pub fn random_model(cfg: &ExperimentConfig, bits: u32, dephasing_only: bool) -> CliResult<BathDecomposition> {
    let mut rng = seeded(cfg, 0);
    let (j, beta) = cfg.model_couplings();
    let mut d = random_decomposition(cfg.model_bath_dim, bits, j, beta, NormKind::Spectral, &mut rng)?;
    if dephasing_only {
        d.bx = OperatorMatrix::zeros(cfg.model_bath_dim, bits);
        d.by = OperatorMatrix::zeros(cfg.model_bath_dim, bits);
    }
    Ok(d)
}

fn exact_phi(evolver: &mut Evolver, seq: &PulseSequence) -> CliResult<f64> {
    let u = evolver.evolve(seq)?;
    Ok(effective_error_hamiltonian(&u, seq)?.1)
}

/// Exact error phase and analytic bound over a sweep of pulse intervals.
pub fn run_scaling(cfg: &ExperimentConfig, scheme: ScalingScheme) -> CliResult<Report> {
    let bits = cfg.precision_setting()?.base_bits();
    let dephasing = matches!(scheme, ScalingScheme::Cpmg | ScalingScheme::ConcatCpmg);
    let d = random_model(cfg, bits, dephasing)?;
    let c = coupling_strengths(&d, NormKind::Spectral)?;
    let h = d.reassemble(SystemPosition::Last)?;
    let grid = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.points);
    let rows: Vec<CliResult<(f64, f64, Option<f64>)>> = grid
        .par_iter()
        .map(|&tau| {
            let mut ev = Evolver::new(&h, bits)?;
            let (tau0, seq, bound) = match scheme {
                ScalingScheme::Pdd => {
                    let k = ((cfg.total_time / (4.0 * tau)).round() as usize).max(1);
                    let tau0 = cfg.total_time / (4.0 * k as f64);
                    let seq = gen_pdd(tau0, k)?;
                    let b = bound_pdd(&c, tau0, seq.total_duration(), 0.0)?.phi;
                    (tau0, seq, Some(b))
                }
                ScalingScheme::Cdd => {
                    let seq = simplify_pauli(&gen_cdd(tau, cfg.cdd_level)?)?;
                    let b = bound_cdd(&c, tau, cfg.cdd_level, BathRegime::classify(&c))?.phi;
                    (tau, seq, Some(b))
                }
                ScalingScheme::Tsds => {
                    let seq = gen_tsds(cfg.tsds_order, tau)?;
                    let b = bound_tsds(&c, seq.total_duration(), seq.pulse_count().max(4))?.phi;
                    (tau, seq, Some(b))
                }
                ScalingScheme::Cpmg => (tau, gen_cpmg(tau, 1)?, None),
                ScalingScheme::ConcatCpmg => (tau, gen_concat_cpmg(tau, cfg.cdd_level.clamp(1, 3))?, None),
            };
            Ok((tau0, exact_phi(&mut ev, &seq)?, bound))
        })
        .collect();
    let mut table = Table::new(&["tau0", "phi_exact", "phi_bound"]);
    let mut exact = Vec::new();
    let mut bounds = Vec::new();
    for r in rows {
        let (tau0, phi, bound) = r?;
        exact.push((tau0, phi));
        if let Some(b) = bound {
            bounds.push((tau0, b));
        }
        table.push(vec![fmt(tau0), fmt(phi), bound.map(fmt).unwrap_or_default()]);
    }
    table.annotate("scheme", format!("{scheme:?}").to_lowercase());
    table.annotate("slope_exact", fmt(loglog_slope(&exact)));
    if !bounds.is_empty() {
        table.annotate("slope_bound", fmt(loglog_slope(&bounds)));
    }
    Ok(Report::new(table))
}

/// Concatenated CPMG levels 1 to 3 on a pure-dephasing model.
pub fn run_cpmg_scaling(cfg: &ExperimentConfig) -> CliResult<Report> {
    let bits = cfg.precision_setting()?.base_bits();
    let d = random_model(cfg, bits, true)?;
    let h = d.reassemble(SystemPosition::Last)?;
    let grid = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.points);
    let jobs: Vec<(u32, f64)> = (1..=3).flat_map(|l| grid.iter().map(move |&t| (l, t))).collect();
    let rows: Vec<CliResult<(u32, f64, f64)>> = jobs
        .par_iter()
        .map(|&(level, tau)| {
            let mut ev = Evolver::new(&h, bits)?;
            Ok((level, tau, exact_phi(&mut ev, &gen_concat_cpmg(tau, level)?)?))
        })
        .collect();
    let mut table = Table::new(&["level", "tau", "phi_exact"]);
    let mut per_level: Vec<Vec<(f64, f64)>> = vec![Vec::new(); 3];
    for r in rows {
        let (level, tau, phi) = r?;
        per_level[level as usize - 1].push((tau, phi));
        table.push(vec![level.to_string(), fmt(tau), fmt(phi)]);
    }
    for (i, pts) in per_level.iter().enumerate() {
        table.annotate(&format!("slope_p{}", i + 1), fmt(loglog_slope(pts)));
    }
    Ok(Report::new(table))
}

/// Trotter-Suzuki sequences of order 2 up to `tsds_order`.
pub fn run_tsds_scaling(cfg: &ExperimentConfig) -> CliResult<Report> {
    let bits = cfg.precision_setting()?.base_bits();
    let d = random_model(cfg, bits, false)?;
    let c = coupling_strengths(&d, NormKind::Spectral)?;
    let h = d.reassemble(SystemPosition::Last)?;
    let grid = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.points);
    let orders: Vec<u32> = (2..=cfg.tsds_order.max(2)).collect();
    let jobs: Vec<(u32, f64)> = orders.iter().flat_map(|&o| grid.iter().map(move |&t| (o, t))).collect();
    let rows: Vec<CliResult<Option<(u32, f64, f64, f64)>>> = jobs
        .par_iter()
        .map(|&(order, tau)| {
            let seq = match gen_tsds(order, tau) {
                Ok(s) => s,
                Err(Error::NegativeInterval { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let mut ev = Evolver::new(&h, bits)?;
            let phi = exact_phi(&mut ev, &seq)?;
            let b = bound_tsds(&c, seq.total_duration(), seq.pulse_count().max(4))?.phi;
            Ok(Some((order, tau, phi, b)))
        })
        .collect();
    let mut table = Table::new(&["order", "tau", "phi_exact", "phi_bound"]);
    let mut per_order: Vec<(u32, Vec<(f64, f64)>)> = orders.iter().map(|&o| (o, Vec::new())).collect();
    for r in rows {
        let Some((order, tau, phi, b)) = r? else { continue };
        per_order[(order - 2) as usize].1.push((tau, phi));
        table.push(vec![order.to_string(), fmt(tau), fmt(phi), fmt(b)]);
    }
    for (o, pts) in &per_order {
        if pts.len() >= 2 {
            table.annotate(&format!("slope_order{o}"), fmt(loglog_slope(pts)));
        } else {
            table.annotate(&format!("slope_order{o}"), "unrealizable");
        }
    }
    Ok(Report::new(table))
}

/// `Φ_CDD/Φ_PDD` at fixed `c = βT` as the level grows.
pub fn run_ratio(cfg: &ExperimentConfig) -> CliResult<Report> {
    let bits = cfg.precision_setting()?.base_bits();
    let d = random_model(cfg, bits, false)?;
    let beta = op_norm(&d.b0, NormKind::Spectral)?.to_f64();
    let h = d.reassemble(SystemPosition::Last)?;
    let t = cfg.ratio_c / beta;
    let levels: Vec<u32> = (cfg.level_min.max(1)..=cfg.level_max).collect();
    let rows: Vec<CliResult<Vec<String>>> = levels
        .par_iter()
        .map(|&level| {
            let tau0 = t / 4f64.powi(level as i32);
            let mut ev = Evolver::new(&h, bits)?;
            let cdd = level_sequence(Dd::Cdd, t, level, 0.0)?;
            let pdd = level_sequence(Dd::Pdd, t, level, 0.0)?;
            let phi_cdd = exact_phi(&mut ev, &cdd)?;
            let phi_pdd = exact_phi(&mut ev, &pdd)?;
            let bound = cdd_pdd_ratio_bound(cfg.ratio_c, beta * tau0)?;
            Ok(vec![
                level.to_string(),
                fmt(beta * tau0),
                fmt(phi_cdd),
                fmt(phi_pdd),
                fmt(phi_cdd / phi_pdd),
                fmt(bound),
            ])
        })
        .collect();
    let mut table = Table::new(&["level", "beta_tau0", "phi_cdd", "phi_pdd", "ratio_exact", "ratio_bound"]);
    for r in rows {
        table.push(r?);
    }
    table.annotate("c", fmt(cfg.ratio_c));
    Ok(Report::new(table))
}

/// Random ideal Pauli sequence: 1 to 8 pulses, intervals in `[0.02, 0.3)`
/// in units of `1/‖H_e‖`.
pub fn random_pauli_sequence<R: Rng>(rng: &mut R, norm: f64) -> PulseSequence {
    let n = rng.random_range(1..=8usize);
    let mut segs = Vec::with_capacity(2 * n + 1);
    for _ in 0..n {
        segs.push(Segment::free(rng.random_range(0.02..0.3) / norm));
        segs.push(Segment::pulse(Axis::ALL[rng.random_range(0..3usize)]));
    }
    segs.push(Segment::free(rng.random_range(0.02..0.3) / norm));
    PulseSequence::from_segments("random", segs)
}

/// Thompson norm inequality over random models and random Pauli sequences.
/// Each model is scaled to spectral norm `model_beta`.
pub fn run_thompson_sweep(cfg: &ExperimentConfig) -> CliResult<Report> {
    let bits = cfg.precision_setting()?.base_bits().min(192);
    let dim = 2 * cfg.model_bath_dim;
    let (_, scale) = cfg.model_couplings();
    let draws: Vec<usize> = (0..cfg.draws).collect();
    let rows: Vec<CliResult<(usize, u64, f64, f64, bool)>> = draws
        .par_iter()
        .map(|&k| {
            let mut rng = seeded(cfg, 1 + k as u64);
            let raw = random_hermitian(dim, bits, &mut rng);
            let norm = op_norm(&raw, NormKind::Spectral)?;
            let h = raw.scale(&(Float::with_val(bits, scale) / norm));
            let seq = random_pauli_sequence(&mut rng, scale);
            let r = thompson_check(&h, &seq)?;
            Ok((k, seq.pulse_count(), r.lhs, r.rhs, r.holds))
        })
        .collect();
    let mut table = Table::new(&["draw", "n_pulses", "lhs", "rhs", "holds"]);
    let mut violations = 0;
    for r in rows {
        let (k, n, lhs, rhs, holds) = r?;
        violations += usize::from(!holds);
        table.push(vec![k.to_string(), n.to_string(), fmt(lhs), fmt(rhs), holds.to_string()]);
    }
    table.annotate("violations", violations);
    Ok(Report::new(table))
}

/// Run a sequence file on the configured spin chain.
pub fn run_custom(cfg: &ExperimentConfig) -> CliResult<Report> {
    let path = cfg
        .sequence_file
        .as_ref()
        .ok_or_else(|| CliError::Config("custom experiment needs sequence_file".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let seq = parse_sequence(path, &text)?;
    let model = ChainModel { cfg: cfg.clone() };
    let setting = cfg.precision_setting()?;
    let policy = setting.policy(1e-30);
    let bits = policy.initial_bits();
    let (h, rho) = model.at(bits)?;
    let res = simulate(&h, &seq, &rho, policy)?;
    let j = res.to_json();
    let mut table = Table::new(&["label", "n_pulses", "duration_s", "purity_loss", "error_phase", "precision_bits"]);
    table.push(vec![
        res.label.clone(),
        res.n_pulses.to_string(),
        fmt(res.duration),
        j["purity_loss"].as_str().unwrap_or_default().to_string(),
        res.error_phase_exact.map(fmt).unwrap_or_default(),
        res.precision_bits.to_string(),
    ]);
    Ok(Report::new(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = geometric_grid(1e-3, 1.0, 5).into_iter().map(|x| (x, 7.0 * x.powi(3))).collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn level_one_rows_share_a_sequence() {
        let a = level_sequence(Dd::Cdd, 1.0, 1, 0.0).unwrap();
        let b = level_sequence(Dd::Pdd, 1.0, 1, 0.0).unwrap();
        assert_eq!(a.segments(), b.segments());
    }
}
