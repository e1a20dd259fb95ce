//! Seeded experiment runner: builds channel realizations, runs the schemes over
//! a sweep and writes one CSV row per (trial, scheme, sweep point).

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{build_network, ChannelModel, NetworkChannels, NoiseModel};
use crate::error::{Error, Result};
use crate::joint::solve_joint;
use crate::kkt::{inner_max_closed_form, inner_max_oracle, DualPrices, PowerBox, SolveMethod};
use crate::numeric::format_sig6;
use crate::rate::{ClipPolicy, RateMode, SubcarrierGains};
use crate::report::{Scheme, SolveReport, SolverParams};
use crate::restricted::{evaluate_non_opt_multi, solve_subopt1, solve_subopt2};
use crate::single_link::{evaluate_non_opt_single, solve_opt, solve_subopt_relay_only_single};

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "trial",
    "scheme",
    "sweep_var",
    "sweep_value",
    "sr_sum",
    "iterations",
    "converged",
    "duality_gap",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table3,
    Custom,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Fig7 => "fig7",
            ExperimentId::Table3 => "table3",
            ExperimentId::Custom => "custom",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            ExperimentId::Fig3 | ExperimentId::Fig5 => 20,
            _ => 1,
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            ExperimentId::Fig3,
            ExperimentId::Fig4,
            ExperimentId::Fig5,
            ExperimentId::Fig6,
            ExperimentId::Fig7,
            ExperimentId::Table3,
            ExperimentId::Custom,
        ];
        all.into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment id {s:?}")))
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    /// Sub-carrier count for fig4, fig6, fig7, table3 and custom.
    pub subcarriers: usize,
    /// Sub-carrier counts swept by fig3 and fig5.
    pub subcarrier_grid: Vec<usize>,
    pub relays: usize,
    pub users: usize,
    pub n_taps: usize,
    /// Variance of each tap's real part and of its imaginary part.
    pub tap_variance: f64,
    pub sigma2: f64,
    /// `P_t = Q_t` values (watts) for the budget sweeps.
    pub budgets: Vec<f64>,
    /// `P_t = Q_t` for the experiments without a budget sweep.
    pub operating_budget: f64,
    pub relay_grid: Vec<usize>,
    pub user_grid: Vec<usize>,
    /// Monte-Carlo trials; `None` uses the experiment's default.
    pub trials: Option<usize>,
    /// Schemes run by the custom experiment.
    pub schemes: Vec<Scheme>,
    pub solver: SolverParams,
    pub clip: ClipPolicy,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentId::Custom,
            seed: 1,
            subcarriers: 64,
            subcarrier_grid: vec![32, 64],
            relays: 4,
            users: 12,
            n_taps: 6,
            tap_variance: 1.0,
            sigma2: 1.0,
            budgets: (1..=10).map(f64::from).collect(),
            operating_budget: 7.0,
            relay_grid: vec![1, 2, 3, 4],
            user_grid: vec![2, 4, 6, 8, 10, 12],
            trials: None,
            schemes: vec![
                Scheme::JOpt,
                Scheme::SubOptI,
                Scheme::SubOptII,
                Scheme::NonOpt,
            ],
            solver: SolverParams::default(),
            clip: ClipPolicy::default(),
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn for_experiment(id: ExperimentId) -> Self {
        Self {
            experiment: id,
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn trials(&self) -> usize {
        self.trials
            .unwrap_or_else(|| self.experiment.default_trials())
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        let model = ChannelModel {
            n_taps: self.n_taps,
            tap_variance: self.tap_variance,
            noise: NoiseModel::new(self.sigma2)?,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        self.channel_model()?;
        self.solver.validate()?;
        let positive = |x: &f64| *x > 0.0 && x.is_finite();
        if self.trials == Some(0) {
            return bad("trials must be at least 1");
        }
        if self.budgets.is_empty() || !self.budgets.iter().all(positive) {
            return bad("budgets must be a nonempty list of positive values");
        }
        if !positive(&self.operating_budget) {
            return bad("operating_budget must be positive");
        }
        for (name, grid) in [
            ("subcarrier_grid", &self.subcarrier_grid),
            ("relay_grid", &self.relay_grid),
            ("user_grid", &self.user_grid),
        ] {
            if grid.is_empty() || grid.contains(&0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a nonempty list of positive counts"
                )));
            }
        }
        if self.subcarriers == 0 || self.relays == 0 || self.users == 0 {
            return bad("subcarriers, relays and users must be positive");
        }
        let smallest_n = match self.experiment {
            ExperimentId::Fig3 | ExperimentId::Fig5 => {
                self.subcarrier_grid.iter().copied().min().unwrap_or(0)
            }
            _ => self.subcarriers,
        };
        if smallest_n < self.n_taps {
            return bad("sub-carrier counts must be at least n_taps");
        }
        if self.experiment == ExperimentId::Custom && self.schemes.is_empty() {
            return bad("custom experiments need at least one scheme");
        }
        Ok(())
    }

    /// The config with defaults made explicit, preceded by the output conventions.
    pub fn resolved_toml(&self) -> Result<String> {
        let resolved = Self {
            trials: Some(self.trials()),
            ..self.clone()
        };
        let body = toml::to_string(&resolved).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(format!(
            "# sr_sum is in bits/s/Hz and includes the 1/2 half-duplex factor.\n\
             # The dual subproblems are solved without the 1/2 factor.\n\
             # Solver objective: {:?} secrecy rate; reported rates use the exact rate with the clip policy below.\n\
             # Taps: complex normal, independent real and imaginary parts with variance tap_variance each.\n\
             # Channel gains: |DFT of the zero-padded taps|^2 / sigma2.\n\
             {body}",
            self.solver.objective
        ))
    }
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub trial: usize,
    pub scheme: Scheme,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub sr_sum: f64,
    pub iterations: usize,
    pub converged: bool,
    pub duality_gap: Option<f64>,
}

/// One dual iteration of a fig4 run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub trial: usize,
    pub scheme: Scheme,
    pub iteration: usize,
    pub lambda: Option<f64>,
    pub v: f64,
    pub source_power: f64,
    pub relay_power: f64,
    pub dual_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<TraceRow>,
}

/// Seed of an independent stream derived from `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Channel seed of a Monte-Carlo trial.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(seed, trial as u64)
}

/// Seed of the random assignment used by Sub-OPT-II and Non-OPT in a trial.
pub fn assignment_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(seed, (1 << 62) | trial as u64)
}

struct Point<'a> {
    cfg: &'a ExperimentConfig,
    trial: usize,
    sweep_var: String,
    sweep_value: f64,
}

impl Point<'_> {
    fn row(&self, report: &SolveReport) -> Result<ResultRow> {
        if !report.is_feasible() {
            return Err(Error::Domain(format!(
                "{} returned an infeasible allocation",
                report.scheme
            )));
        }
        let sr_sum = report
            .sr_sum(RateMode::Exact, self.cfg.clip)
            .expect("exact rates always exist");
        Ok(ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            trial: self.trial,
            scheme: report.scheme,
            sweep_var: self.sweep_var.clone(),
            sweep_value: self.sweep_value,
            sr_sum,
            iterations: report.iterations,
            converged: report.converged,
            duality_gap: report.duality_gap,
        })
    }
}

/// Runs one multi-relay scheme on a network with `P_t = Q_j = budget`.
pub fn run_multi_scheme(
    scheme: Scheme,
    net: &NetworkChannels,
    budget: f64,
    params: &SolverParams,
    assign_seed: u64,
) -> Result<SolveReport> {
    let q = vec![budget; net.relays()];
    match scheme {
        Scheme::JOpt => solve_joint(net, budget, &q, params),
        Scheme::SubOptI => solve_subopt1(net, budget, &q, params),
        Scheme::SubOptII => solve_subopt2(net, budget, &q, params, assign_seed),
        Scheme::NonOpt => evaluate_non_opt_multi(net, budget, &q, assign_seed),
        Scheme::Opt | Scheme::SubOpt => {
            let gains = net.single_link(0, 0);
            run_single_scheme(scheme, &gains, budget, params)
        }
    }
}

/// Runs one single-link scheme with `P_t = Q_t = budget`.
pub fn run_single_scheme(
    scheme: Scheme,
    gains: &[SubcarrierGains],
    budget: f64,
    params: &SolverParams,
) -> Result<SolveReport> {
    match scheme {
        Scheme::Opt => solve_opt(gains, budget, budget, params),
        Scheme::SubOpt => solve_subopt_relay_only_single(gains, budget, budget, params),
        Scheme::NonOpt => evaluate_non_opt_single(gains, budget, budget),
        other => Err(Error::InvalidConfig(format!(
            "{other} needs a multi-relay network"
        ))),
    }
}

const SINGLE_SCHEMES: [Scheme; 3] = [Scheme::Opt, Scheme::SubOpt, Scheme::NonOpt];
const MULTI_SCHEMES: [Scheme; 4] = [
    Scheme::JOpt,
    Scheme::SubOptI,
    Scheme::SubOptII,
    Scheme::NonOpt,
];

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<ExperimentOutput> {
    let model = cfg.channel_model()?;
    let seed = trial_seed(cfg.seed, trial);
    let assign_seed = assignment_seed(cfg.seed, trial);
    let mut out = ExperimentOutput::default();
    let point = |sweep_var: String, sweep_value: f64| Point {
        cfg,
        trial,
        sweep_var,
        sweep_value,
    };
    match cfg.experiment {
        ExperimentId::Fig3 => {
            for &n in &cfg.subcarrier_grid {
                let gains = build_network(seed, n, 1, 1, &model)?.single_link(0, 0);
                for &budget in &cfg.budgets {
                    let pt = point(format!("budget_n{n}"), budget);
                    for scheme in SINGLE_SCHEMES {
                        out.rows.push(pt.row(&run_single_scheme(
                            scheme,
                            &gains,
                            budget,
                            &cfg.solver,
                        )?)?);
                    }
                }
            }
        }
        ExperimentId::Fig4 => {
            let gains = build_network(seed, cfg.subcarriers, 1, 1, &model)?.single_link(0, 0);
            let params = SolverParams {
                record_trace: true,
                ..cfg.solver
            };
            let pt = point("budget".into(), cfg.operating_budget);
            for scheme in [Scheme::Opt, Scheme::SubOpt] {
                let report = run_single_scheme(scheme, &gains, cfg.operating_budget, &params)?;
                out.traces
                    .extend(report.trace.records.iter().map(|r| TraceRow {
                        trial,
                        scheme,
                        iteration: r.iteration,
                        lambda: r.prices.lambda,
                        v: r.prices.v[0],
                        source_power: r.source_power,
                        relay_power: r.relay_power[0],
                        dual_value: r.dual_value,
                    }));
                out.rows.push(pt.row(&report)?);
            }
        }
        ExperimentId::Fig5 => {
            for &n in &cfg.subcarrier_grid {
                let net = build_network(seed, n, cfg.relays, cfg.users, &model)?;
                for &budget in &cfg.budgets {
                    let pt = point(format!("budget_n{n}"), budget);
                    for scheme in MULTI_SCHEMES {
                        out.rows.push(pt.row(&run_multi_scheme(
                            scheme,
                            &net,
                            budget,
                            &cfg.solver,
                            assign_seed,
                        )?)?);
                    }
                }
            }
        }
        ExperimentId::Fig6 | ExperimentId::Table3 => {
            for &j in &cfg.relay_grid {
                let net = build_network(seed, cfg.subcarriers, j, cfg.users, &model)?;
                let pt = point("relays".into(), j as f64);
                for scheme in MULTI_SCHEMES {
                    out.rows.push(pt.row(&run_multi_scheme(
                        scheme,
                        &net,
                        cfg.operating_budget,
                        &cfg.solver,
                        assign_seed,
                    )?)?);
                }
            }
        }
        ExperimentId::Fig7 => {
            for &k in &cfg.user_grid {
                let net = build_network(seed, cfg.subcarriers, cfg.relays, k, &model)?;
                let pt = point("users".into(), k as f64);
                for scheme in MULTI_SCHEMES {
                    out.rows.push(pt.row(&run_multi_scheme(
                        scheme,
                        &net,
                        cfg.operating_budget,
                        &cfg.solver,
                        assign_seed,
                    )?)?);
                }
            }
        }
        ExperimentId::Custom => {
            let net = build_network(seed, cfg.subcarriers, cfg.relays, cfg.users, &model)?;
            for &budget in &cfg.budgets {
                let pt = point("budget".into(), budget);
                for &scheme in &cfg.schemes {
                    out.rows.push(pt.row(&run_multi_scheme(
                        scheme,
                        &net,
                        budget,
                        &cfg.solver,
                        assign_seed,
                    )?)?);
                }
            }
        }
    }
    Ok(out)
}

/// Runs every trial of `cfg`. Trials run in parallel; rows come back in
/// (trial, sweep point, scheme) order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let per_trial: Vec<ExperimentOutput> = (0..cfg.trials())
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<_>>()?;
    let mut out = ExperimentOutput::default();
    for t in per_trial {
        out.rows.extend(t.rows);
        out.traces.extend(t.traces);
    }
    Ok(out)
}

/// Mean, min and max of `sr_sum` over trials for one (scheme, sweep point).
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedRow {
    pub experiment: String,
    pub scheme: Scheme,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Groups rows by (scheme, sweep_var, sweep_value) in first-appearance order.
pub fn monte_carlo_average(rows: &[ResultRow]) -> Result<Vec<AveragedRow>> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to average".into()));
    }
    let mut groups: Vec<(AveragedRow, f64)> = Vec::new();
    for r in rows {
        let found = groups.iter_mut().find(|(g, _)| {
            g.scheme == r.scheme
                && g.sweep_var == r.sweep_var
                && g.sweep_value == r.sweep_value
                && g.experiment == r.experiment
        });
        match found {
            Some((g, sum)) => {
                g.trials += 1;
                *sum += r.sr_sum;
                g.min = g.min.min(r.sr_sum);
                g.max = g.max.max(r.sr_sum);
            }
            None => groups.push((
                AveragedRow {
                    experiment: r.experiment.clone(),
                    scheme: r.scheme,
                    sweep_var: r.sweep_var.clone(),
                    sweep_value: r.sweep_value,
                    trials: 1,
                    mean: r.sr_sum,
                    min: r.sr_sum,
                    max: r.sr_sum,
                },
                r.sr_sum,
            )),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(mut g, sum)| {
            g.mean = if g.trials == 1 {
                g.mean
            } else {
                sum / g.trials as f64
            };
            g
        })
        .collect())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.trial.to_string(),
            r.scheme.name().to_string(),
            r.sweep_var.clone(),
            format_sig6(r.sweep_value),
            format_sig6(r.sr_sum),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.duality_gap.map(format_sig6).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_averages<W: Write>(rows: &[AveragedRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "experiment",
        "scheme",
        "sweep_var",
        "sweep_value",
        "trials",
        "mean_sr_sum",
        "min_sr_sum",
        "max_sr_sum",
    ])?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.scheme.name().to_string(),
            r.sweep_var.clone(),
            format_sig6(r.sweep_value),
            r.trials.to_string(),
            format_sig6(r.mean),
            format_sig6(r.min),
            format_sig6(r.max),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_traces<W: Write>(rows: &[TraceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "trial",
        "scheme",
        "iteration",
        "lambda",
        "v",
        "source_power",
        "relay_power",
        "dual_value",
    ])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.scheme.name().to_string(),
            r.iteration.to_string(),
            r.lambda.map(format_sig6).unwrap_or_default(),
            format_sig6(r.v),
            format_sig6(r.source_power),
            format_sig6(r.relay_power),
            format_sig6(r.dual_value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub config: PathBuf,
    pub averages: Option<PathBuf>,
    pub traces: Option<PathBuf>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Writes the results CSV at `path`, the resolved config next to it, the
/// Monte-Carlo averages when there is more than one trial, and fig4 traces.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    out: &ExperimentOutput,
    path: &Path,
) -> Result<OutputFiles> {
    let create = |p: &Path| std::fs::File::create(p).map(std::io::BufWriter::new);
    write_rows(&out.rows, create(path)?)?;
    let config = sibling(path, ".config.toml");
    std::fs::write(&config, cfg.resolved_toml()?)?;
    let averages = if cfg.trials() > 1 {
        let p = sibling(path, "_mean.csv");
        write_averages(&monte_carlo_average(&out.rows)?, create(&p)?)?;
        Some(p)
    } else {
        None
    };
    let traces = if out.traces.is_empty() {
        None
    } else {
        let p = sibling(path, "_trace.csv");
        write_traces(&out.traces, create(&p)?)?;
        Some(p)
    };
    Ok(OutputFiles {
        results: path.to_path_buf(),
        config,
        averages,
        traces,
    })
}

/// Outcome of [`oracle_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub samples: usize,
    pub agreed: usize,
    pub fallbacks: usize,
    pub worst_relative_error: f64,
}

impl OracleCheck {
    pub fn failures(&self) -> usize {
        self.samples - self.agreed
    }
}

/// Draws random secure sub-carriers and prices and compares the closed-form
/// subproblem maximizer with the brute-force oracle (relative tolerance 1e-4).
pub fn oracle_check(samples: usize, seed: u64) -> OracleCheck {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = PowerBox::for_budgets(7.0, 7.0);
    let draws: Vec<(SubcarrierGains, DualPrices)> = (0..samples)
        .map(|_| {
            let mut gain = || 10f64.powf(rng.random_range(-2.0..1.5));
            let (h, x, y) = (gain(), gain(), gain());
            let (g, f) = if x > y { (x, y) } else { (y, x) };
            let mut price = || 10f64.powf(rng.random_range(-2.5..0.5));
            (
                SubcarrierGains::new(h, g, f),
                DualPrices {
                    lambda: price(),
                    v: price(),
                },
            )
        })
        .collect();
    let results: Vec<(bool, bool, f64)> = draws
        .par_iter()
        .map(|&(g, pr)| {
            let cf = inner_max_closed_form(g, pr, bounds, Default::default());
            let or = inner_max_oracle(g, pr, bounds, Default::default());
            let err = (cf.objective - or.objective).abs()
                / cf.objective.abs().max(or.objective.abs()).max(1e-12);
            (
                err <= 1e-4 || (cf.objective - or.objective).abs() <= 1e-12,
                cf.method == SolveMethod::Oracle,
                err,
            )
        })
        .collect();
    OracleCheck {
        samples,
        agreed: results.iter().filter(|r| r.0).count(),
        fallbacks: results.iter().filter(|r| r.1).count(),
        worst_relative_error: results.iter().map(|r| r.2).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheme: Scheme, v: f64, sr: f64) -> ResultRow {
        ResultRow {
            experiment: "fig3".into(),
            trial: 0,
            scheme,
            sweep_var: "budget".into(),
            sweep_value: v,
            sr_sum: sr,
            iterations: 0,
            converged: true,
            duality_gap: None,
        }
    }

    #[test]
    fn averages_two_trials() {
        let rows = [
            row(Scheme::Opt, 1.0, 1.0),
            row(Scheme::Opt, 2.0, 5.0),
            row(Scheme::Opt, 1.0, 3.0),
        ];
        let avg = monte_carlo_average(&rows).unwrap();
        assert_eq!(avg.len(), 2);
        assert_eq!(
            (avg[0].mean, avg[0].min, avg[0].max, avg[0].trials),
            (2.0, 1.0, 3.0, 2)
        );
        assert_eq!(avg[1].mean, 5.0);
    }

    #[test]
    fn single_trial_average_is_identity() {
        let avg = monte_carlo_average(&[row(Scheme::NonOpt, 7.0, 0.123)]).unwrap();
        assert_eq!(avg[0].mean, 0.123);
        assert!(monte_carlo_average(&[]).is_err());
    }

    #[test]
    fn csv_uses_six_significant_digits() {
        let mut r = row(Scheme::JOpt, 7.0, 18.1034567);
        r.duality_gap = Some(1.5e-5);
        let mut buf = Vec::new();
        write_rows(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "experiment,trial,scheme,sweep_var,sweep_value,sr_sum,iterations,converged,duality_gap\n\
             fig3,0,J-OPT,budget,7,18.1035,0,true,1.5e-05\n"
        );
    }

    #[test]
    fn config_parses_and_rejects_unknown_keys() {
        let cfg = ExperimentConfig::from_toml_str(
            "experiment = \"fig6\"\nseed = 3\n[solver]\nmax_iters = 10\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentId::Fig6);
        assert_eq!(cfg.solver.max_iters, 10);
        assert_eq!(cfg.trials(), 1);
        assert!(ExperimentConfig::from_toml_str("experiment = \"fig9\"").is_err());
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("budgets = []").is_err());
        assert!(ExperimentConfig::from_toml_str("subcarriers = 4").is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig::for_experiment(ExperimentId::Fig5);
        let text = cfg.resolved_toml().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.trials, Some(20));
        assert_eq!(back.budgets, cfg.budgets);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(trial_seed(7, 0), trial_seed(7, 1));
        assert_ne!(trial_seed(7, 0), assignment_seed(7, 0));
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
    }
}
