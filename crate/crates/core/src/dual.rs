//! Projected subgradient iteration on the dual prices, shared by all optimized schemes.

use std::collections::VecDeque;

use crate::alloc::{Assignment, Budgets, PowerAllocation};
use crate::channel::{NetworkChannels, NoiseModel};
use crate::error::{Error, Result};
use crate::kkt::Objective;
use crate::rate::{clip_sum, subcarrier_rates, ClipPolicy, RateMode};
use crate::report::{DualTrace, MultiDualState, Scheme, SolveReport, SolverParams, TraceRecord};

/// Inner maximizers at one price vector.
pub(crate) struct Relaxation {
    /// Sum of the per-sub-carrier subproblem values (no price·budget terms).
    pub value: f64,
    /// Power used against each priced budget, in price order.
    pub usage: Vec<f64>,
    pub allocation: PowerAllocation,
    pub assignment: Assignment,
    pub solves: usize,
    pub fallbacks: usize,
}

/// Which budgets carry a price. Prices are ordered `[λ?, V_1..V_J]`.
#[derive(Clone, Copy)]
pub(crate) struct PriceLayout {
    pub source_priced: bool,
    pub relays: usize,
}

impl PriceLayout {
    fn state(&self, prices: &[f64]) -> MultiDualState {
        let (lambda, v) = if self.source_priced {
            (Some(prices[0]), &prices[1..])
        } else {
            (None, prices)
        };
        MultiDualState {
            lambda,
            v: v.to_vec(),
        }
    }

    fn budgets(&self, b: &Budgets) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.relays + 1);
        if self.source_priced {
            out.push(b.source);
        }
        out.extend_from_slice(&b.relays);
        out
    }

    fn initial(&self, params: &SolverParams) -> Vec<f64> {
        let mut out = vec![params.initial_v; self.relays + usize::from(self.source_priced)];
        if self.source_priced {
            out[0] = params.initial_lambda;
        }
        out
    }
}

// Per-price step multipliers: shrink when the subgradient changes sign,
// grow while it keeps its sign.
const STEP_SHRINK: f64 = 0.5;
const STEP_GROWTH: f64 = 1.2;
const MAX_STEP_FACTOR: f64 = 100.0;

/// Validates solver inputs and builds the budgets.
pub(crate) fn check_inputs(
    net: &NetworkChannels,
    p_t: f64,
    q: &[f64],
    params: &SolverParams,
) -> Result<Budgets> {
    params.validate()?;
    if q.len() != net.relays() {
        return Err(Error::InvalidConfig(format!(
            "{} relay budgets for {} relays",
            q.len(),
            net.relays()
        )));
    }
    let budgets = Budgets::new(p_t, q.to_vec())?;
    if params.objective == Objective::HighSnr {
        let zero = (0..net.subcarriers()).any(|i| {
            (0..net.relays())
                .any(|j| net.c(i, j) == 0.0 || (0..net.users()).any(|k| net.b(i, j, k) == 0.0))
        });
        if zero {
            return Err(Error::Domain(
                "the high-SNR rate needs positive relay-user and relay-eve gains".into(),
            ));
        }
    }
    Ok(budgets)
}

/// Solver objective (exact, unclipped, no 1/2) of an allocation.
fn primal_value(
    net: &NetworkChannels,
    alloc: &PowerAllocation,
    assign: &Assignment,
) -> Result<f64> {
    let rates = subcarrier_rates(alloc, assign, net, RateMode::Exact, NoiseModel::UNIT)?;
    Ok(2.0 * clip_sum(&rates, ClipPolicy::None))
}

/// Runs the dual iteration and assembles the report of the best recovered primal point.
///
/// `relax(prices, frozen)` must return the inner maximizers at `prices`,
/// restricted to the `frozen` assignment when one is given. Assignment cycle
/// detection is enabled only when `assignment_varies` is set.
pub(crate) fn solve<R>(
    scheme: Scheme,
    net: &NetworkChannels,
    budgets: &Budgets,
    layout: PriceLayout,
    params: &SolverParams,
    assignment_varies: bool,
    mut relax: R,
) -> Result<SolveReport>
where
    R: FnMut(&[f64], Option<&Assignment>) -> Relaxation,
{
    let caps = layout.budgets(budgets);
    let step0 = params.step0.unwrap_or(0.1 / budgets.largest());
    let mut prices = layout.initial(params);
    let mut factors = vec![1.0; prices.len()];
    let mut last_sign = vec![0.0; prices.len()];

    let mut best: Option<(f64, PowerAllocation, Assignment)> = None;
    let mut dual_bound = f64::INFINITY;
    let mut frozen: Option<Assignment> = None;
    let mut frozen_at = None;
    let mut window: VecDeque<Assignment> = VecDeque::with_capacity(params.cycle_window + 1);
    let mut trace = DualTrace::default();
    let mut solves = Vec::new();
    let mut fallbacks = 0;
    let mut converged = false;
    let mut iterations = 0;

    for m in 1..=params.max_iters {
        iterations = m;
        let rel = relax(&prices, frozen.as_ref());
        solves.push(rel.solves);
        fallbacks += rel.fallbacks;
        let dual = rel.value + prices.iter().zip(&caps).map(|(x, c)| x * c).sum::<f64>();
        if frozen.is_none() {
            dual_bound = dual_bound.min(dual);
        }
        if params.record_trace {
            let relay_power = if layout.source_priced {
                rel.usage[1..].to_vec()
            } else {
                rel.usage.clone()
            };
            let source_power = if layout.source_priced {
                rel.usage[0]
            } else {
                rel.allocation.source_total()
            };
            trace.records.push(TraceRecord {
                iteration: m,
                prices: layout.state(&prices),
                source_power,
                relay_power,
                dual_value: dual,
            });
        }

        let mut fitted = rel.allocation.clone();
        fitted.fit_to(budgets);
        let value = primal_value(net, &fitted, &rel.assignment)?;
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, fitted, rel.assignment.clone()));
        }

        if assignment_varies && frozen.is_none() {
            let cycling = window.len() == params.cycle_window
                && window.back() != Some(&rel.assignment)
                && window.contains(&rel.assignment);
            if cycling {
                frozen = best.as_ref().map(|b| b.2.clone());
                frozen_at = Some(m);
            } else {
                if window.len() == params.cycle_window {
                    window.pop_front();
                }
                window.push_back(rel.assignment);
            }
        }

        let step = step0 / (m as f64).sqrt();
        let mut movement: f64 = 0.0;
        for c in 0..prices.len() {
            let g = rel.usage[c] - caps[c];
            let sign = if g > 0.0 {
                1.0
            } else if g < 0.0 {
                -1.0
            } else {
                0.0
            };
            if sign != 0.0 && last_sign[c] != 0.0 && sign != last_sign[c] {
                factors[c] *= STEP_SHRINK;
            } else {
                factors[c] = (factors[c] * STEP_GROWTH).min(MAX_STEP_FACTOR);
            }
            if sign != 0.0 {
                last_sign[c] = sign;
            }
            let next = (prices[c] + step * factors[c] * g).max(0.0);
            movement = movement.max((next - prices[c]).abs());
            prices[c] = next;
        }
        if movement < params.price_tol {
            converged = true;
            break;
        }
    }

    let (primal, allocation, assignment) = best.expect("at least one iteration");
    let mut report = SolveReport::evaluate(scheme, net, allocation, assignment, budgets.clone())?;
    report.primal = primal;
    report.dual_bound = dual_bound.is_finite().then_some(dual_bound);
    report.duality_gap = report.dual_bound.and_then(|d| relative_gap(d, primal));
    report.prices = layout.state(&prices);
    report.trace = trace;
    report.iterations = iterations;
    report.converged = converged;
    report.frozen_at = frozen_at;
    report.fallbacks = fallbacks;
    report.inner_solves_per_iteration = solves;
    debug_assert!(
        report.residuals.source <= 0.0 && report.residuals.relays.iter().all(|r| *r <= 0.0)
    );
    Ok(report)
}

fn relative_gap(dual: f64, primal: f64) -> Option<f64> {
    if primal > 0.0 {
        Some((dual - primal) / primal)
    } else if dual <= 1e-12 {
        Some(0.0)
    } else {
        None
    }
}
