//! Solver parameters, dual traces and solve reports.

use serde::{Deserialize, Serialize};

use crate::alloc::{Assignment, Budgets, PowerAllocation};
use crate::channel::{NetworkChannels, NoiseModel};
use crate::error::{Error, Result};
use crate::kkt::{Objective, PowerBox};
use crate::rate::{clip_sum, subcarrier_rates, ClipPolicy, RateMode};

/// Dual subgradient settings shared by every optimized scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    /// Initial step δ₀; `None` selects `0.1 / largest budget`.
    pub step0: Option<f64>,
    pub max_iters: usize,
    /// Relative budget violation tolerated on an iterate before primal recovery.
    pub tol: f64,
    /// Convergence threshold on the largest price movement of one iteration.
    pub price_tol: f64,
    pub initial_lambda: f64,
    pub initial_v: f64,
    pub objective: Objective,
    /// Inner maximizations run over `[0, box_scale·P_t] × [0, box_scale·max Q]`.
    pub box_scale: f64,
    /// Iterations inspected when looking for assignment cycles.
    pub cycle_window: usize,
    pub record_trace: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            step0: None,
            max_iters: 5000,
            tol: 1e-3,
            price_tol: 1e-6,
            initial_lambda: 0.5,
            initial_v: 0.5,
            objective: Objective::Exact,
            box_scale: 10.0,
            cycle_window: 10,
            record_trace: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let problems = [
            (
                self.step0.is_some_and(|s| !positive(s)),
                "step0 must be positive",
            ),
            (self.max_iters == 0, "max_iters must be at least 1"),
            (!positive(self.tol), "tol must be positive"),
            (!positive(self.price_tol), "price_tol must be positive"),
            (
                !(self.initial_lambda >= 0.0 && self.initial_lambda.is_finite()),
                "initial_lambda must be nonnegative",
            ),
            (
                !(self.initial_v >= 0.0 && self.initial_v.is_finite()),
                "initial_v must be nonnegative",
            ),
            (
                !(self.box_scale >= 1.0 && self.box_scale.is_finite()),
                "box_scale must be at least 1",
            ),
            (self.cycle_window < 2, "cycle_window must be at least 2"),
        ];
        match problems.iter().find(|(bad, _)| *bad) {
            Some((_, msg)) => Err(Error::InvalidConfig((*msg).into())),
            None => Ok(()),
        }
    }

    pub fn power_box(&self, budgets: &Budgets) -> PowerBox {
        let q = budgets.relays.iter().copied().fold(0.0, f64::max);
        PowerBox {
            p_max: self.box_scale * budgets.source,
            q_max: self.box_scale * q,
        }
    }
}

/// Allocation schemes, named as in the CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "OPT")]
    Opt,
    #[serde(rename = "Sub-OPT")]
    SubOpt,
    #[serde(rename = "Non-OPT")]
    NonOpt,
    #[serde(rename = "J-OPT")]
    JOpt,
    #[serde(rename = "Sub-OPT-I")]
    SubOptI,
    #[serde(rename = "Sub-OPT-II")]
    SubOptII,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Opt => "OPT",
            Scheme::SubOpt => "Sub-OPT",
            Scheme::NonOpt => "Non-OPT",
            Scheme::JOpt => "J-OPT",
            Scheme::SubOptI => "Sub-OPT-I",
            Scheme::SubOptII => "Sub-OPT-II",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Source price (absent when the source power is fixed) and per-relay prices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiDualState {
    pub lambda: Option<f64>,
    pub v: Vec<f64>,
}

/// State of one dual iteration: prices before the update, the inner
/// maximizers' power usage, and the dual function value (no 1/2 factor).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub prices: MultiDualState,
    pub source_power: f64,
    pub relay_power: Vec<f64>,
    pub dual_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DualTrace {
    pub records: Vec<TraceRecord>,
}

impl DualTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Budget usage of the reported allocation relative to each budget:
/// `(used − budget) / budget`, never positive after primal recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub source: f64,
    pub relays: Vec<f64>,
}

/// Result of one scheme on one network.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub scheme: Scheme,
    pub allocation: PowerAllocation,
    pub assignment: Assignment,
    pub budgets: Budgets,
    /// Exact per-sub-carrier secrecy rates with the 1/2 factor.
    pub rates_exact: Vec<f64>,
    /// High-SNR rates; `None` when some assigned tuple has a zero gain.
    pub rates_approx: Option<Vec<f64>>,
    /// Exact sum rate, clipped per sub-carrier.
    pub sr_sum_exact: f64,
    /// High-SNR sum rate, clipped per sub-carrier.
    pub sr_sum_approx: Option<f64>,
    /// Solver objective at the reported allocation: unclipped exact sum without 1/2.
    pub primal: f64,
    /// Smallest dual function value seen before any assignment freeze.
    pub dual_bound: Option<f64>,
    pub duality_gap: Option<f64>,
    pub prices: MultiDualState,
    pub trace: DualTrace,
    pub iterations: usize,
    pub converged: bool,
    /// Iteration at which assignment cycling froze the assignment.
    pub frozen_at: Option<usize>,
    pub residuals: Residuals,
    pub fallbacks: usize,
    pub inner_solves_per_iteration: Vec<usize>,
}

impl SolveReport {
    /// Report for a fixed allocation with no dual diagnostics.
    pub fn evaluate(
        scheme: Scheme,
        net: &NetworkChannels,
        allocation: PowerAllocation,
        assignment: Assignment,
        budgets: Budgets,
    ) -> Result<Self> {
        let rates_exact = subcarrier_rates(
            &allocation,
            &assignment,
            net,
            RateMode::Exact,
            NoiseModel::UNIT,
        )?;
        let rates_approx = subcarrier_rates(
            &allocation,
            &assignment,
            net,
            RateMode::Approx,
            NoiseModel::UNIT,
        )
        .ok();
        let residual = |used: f64, cap: f64| (used - cap) / cap;
        let residuals = Residuals {
            source: residual(allocation.source_total(), budgets.source),
            relays: budgets
                .relays
                .iter()
                .enumerate()
                .map(|(j, &q)| residual(allocation.relay_total(j), q))
                .collect(),
        };
        Ok(Self {
            scheme,
            sr_sum_exact: clip_sum(&rates_exact, ClipPolicy::PerSubcarrier),
            sr_sum_approx: rates_approx
                .as_deref()
                .map(|r| clip_sum(r, ClipPolicy::PerSubcarrier)),
            primal: 2.0 * clip_sum(&rates_exact, ClipPolicy::None),
            rates_exact,
            rates_approx,
            allocation,
            assignment,
            budgets,
            dual_bound: None,
            duality_gap: None,
            prices: MultiDualState {
                lambda: None,
                v: Vec::new(),
            },
            trace: DualTrace::default(),
            iterations: 0,
            converged: true,
            frozen_at: None,
            residuals,
            fallbacks: 0,
            inner_solves_per_iteration: Vec::new(),
        })
    }

    /// Sum rate (with the 1/2 factor) under a rate mode and clip policy.
    pub fn sr_sum(&self, mode: RateMode, clip: ClipPolicy) -> Option<f64> {
        match mode {
            RateMode::Exact => Some(clip_sum(&self.rates_exact, clip)),
            RateMode::Approx => self.rates_approx.as_deref().map(|r| clip_sum(r, clip)),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.allocation.is_feasible(&self.budgets, &self.assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::SubcarrierGains;

    #[test]
    fn default_params_are_valid() {
        SolverParams::default().validate().unwrap();
        let bad = SolverParams {
            cycle_window: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverParams {
            step0: Some(0.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn scheme_names_round_trip_through_serde() {
        for s in [
            Scheme::Opt,
            Scheme::SubOpt,
            Scheme::NonOpt,
            Scheme::JOpt,
            Scheme::SubOptI,
            Scheme::SubOptII,
        ] {
            let text = toml::Value::try_from(s).unwrap();
            assert_eq!(text.as_str(), Some(s.name()));
        }
    }

    #[test]
    fn evaluate_reports_both_rate_modes() {
        let gains = [
            SubcarrierGains::new(2.0, 3.0, 1.0),
            SubcarrierGains::new(1.0, 0.5, 2.0),
        ];
        let net = NetworkChannels::from_single_link(&gains).unwrap();
        let alloc = PowerAllocation {
            source: vec![1.0, 1.0],
            relay: vec![vec![1.0], vec![1.0]],
        };
        let budgets = Budgets::new(2.0, vec![2.0]).unwrap();
        let r = SolveReport::evaluate(
            Scheme::NonOpt,
            &net,
            alloc,
            Assignment::single_link(2),
            budgets,
        )
        .unwrap();
        assert!(r.is_feasible());
        assert_eq!(r.residuals.source, 0.0);
        assert!(r.rates_exact[1] < 0.0);
        assert_eq!(r.sr_sum_exact, r.rates_exact[0]);
        let none = r.sr_sum(RateMode::Exact, ClipPolicy::None).unwrap();
        assert!((r.primal - 2.0 * none).abs() < 1e-15);
        assert!(
            (r.sr_sum(RateMode::Approx, ClipPolicy::PerSubcarrier)
                .unwrap()
                - 0.5)
                .abs()
                < 1e-15
        );
    }
}
