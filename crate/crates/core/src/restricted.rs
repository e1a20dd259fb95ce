//! Reduced-complexity schemes for the multi-relay network: Sub-OPT-I (uniform
//! source power, optimized relay powers and assignment), Sub-OPT-II (random
//! assignment, optimized powers) and the equal-power Non-OPT baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alloc::{Assignment, Budgets, Link, PowerAllocation};
use crate::channel::NetworkChannels;
use crate::dual::{self, PriceLayout, Relaxation};
use crate::error::Result;
use crate::joint::assemble;
use crate::kkt::{inner_max_joint, relay_power_fixed_source, DualPrices, SolveMethod};
use crate::report::{Scheme, SolveReport, SolverParams};

/// Exclusive assignment drawing each sub-carrier's (relay, user) pair
/// uniformly and independently from a seeded stream.
///
/// The relay and user of sub-carrier `i` come from two uniform variates
/// scaled by `relays` and `users`, so for a fixed seed the assignments of
/// networks of different sizes are coupled (common random numbers).
pub fn random_assignment(seed: u64, n: usize, relays: usize, users: usize) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |u: f64, count: usize| ((u * count as f64) as usize).min(count - 1);
    let links = (0..n)
        .map(|_| {
            let (u, w): (f64, f64) = (rng.random(), rng.random());
            Link {
                relay: pick(u, relays),
                user: pick(w, users),
            }
        })
        .collect();
    Assignment::from_links(links)
}

/// Optimizes source and relay powers for a fixed assignment under the source
/// budget and the J relay budgets (N subproblems per iteration).
pub fn optimize_powers_for_assignment(
    net: &NetworkChannels,
    assign: &Assignment,
    p_t: f64,
    q: &[f64],
    params: &SolverParams,
) -> Result<SolveReport> {
    let budgets = dual::check_inputs(net, p_t, q, params)?;
    assign.validate_for(net)?;
    let bounds = params.power_box(&budgets);
    let layout = PriceLayout {
        source_priced: true,
        relays: net.relays(),
    };
    let relax = |prices: &[f64], _: Option<&Assignment>| {
        let solutions: Vec<_> = assign
            .links()
            .iter()
            .enumerate()
            .map(|(i, &link)| {
                let pr = DualPrices {
                    lambda: prices[0],
                    v: prices[1 + link.relay],
                };
                let (a, b, c) = (
                    net.a(i, link.relay),
                    net.b(i, link.relay, link.user),
                    net.c(i, link.relay),
                );
                (link, inner_max_joint(a, b, c, pr, bounds, params.objective))
            })
            .collect();
        let fallbacks = solutions
            .iter()
            .filter(|(_, s)| s.method == SolveMethod::Oracle)
            .count();
        assemble(solutions, net.relays(), net.subcarriers(), fallbacks)
    };
    dual::solve(
        Scheme::SubOptII,
        net,
        &budgets,
        layout,
        params,
        false,
        relax,
    )
}

/// Sub-OPT-I: every sub-carrier gets source power `p_t / N`; relay powers,
/// relay selection and user assignment are optimized with one price per relay.
pub fn solve_subopt1(
    net: &NetworkChannels,
    p_t: f64,
    q: &[f64],
    params: &SolverParams,
) -> Result<SolveReport> {
    let budgets = dual::check_inputs(net, p_t, q, params)?;
    let u_max = params.power_box(&budgets).q_max;
    let (n, nj, nk) = (net.subcarriers(), net.relays(), net.users());
    let p = p_t / n as f64;
    let layout = PriceLayout {
        source_priced: false,
        relays: nj,
    };

    let relax = |prices: &[f64], frozen: Option<&Assignment>| {
        let tuple = |i: usize, j: usize, k: usize| {
            relay_power_fixed_source(
                net.a(i, j),
                net.b(i, j, k),
                net.c(i, j),
                p,
                prices[j],
                u_max,
                params.objective,
            )
        };
        let mut solutions = Vec::with_capacity(n);
        let solves = match frozen {
            Some(assign) => {
                for (i, &link) in assign.links().iter().enumerate() {
                    solutions.push((link, tuple(i, link.relay, link.user)));
                }
                n
            }
            None => {
                for i in 0..n {
                    let mut best = (Link { relay: 0, user: 0 }, tuple(i, 0, 0));
                    for j in 0..nj {
                        for k in 0..nk {
                            if (j, k) == (0, 0) {
                                continue;
                            }
                            let s = tuple(i, j, k);
                            if s.objective > best.1.objective {
                                best = (Link { relay: j, user: k }, s);
                            }
                        }
                    }
                    solutions.push(best);
                }
                n * nj * nk
            }
        };
        let fallbacks = solutions
            .iter()
            .filter(|(_, s)| s.method == SolveMethod::Oracle)
            .count();
        let full = assemble(solutions, nj, solves, fallbacks);
        Relaxation {
            usage: full.usage[1..].to_vec(),
            ..full
        }
    };
    dual::solve(Scheme::SubOptI, net, &budgets, layout, params, true, relax)
}

/// Sub-OPT-II: powers optimized for the seeded random assignment.
pub fn solve_subopt2(
    net: &NetworkChannels,
    p_t: f64,
    q: &[f64],
    params: &SolverParams,
    assign_seed: u64,
) -> Result<SolveReport> {
    let assign = random_assignment(assign_seed, net.subcarriers(), net.relays(), net.users());
    optimize_powers_for_assignment(net, &assign, p_t, q, params)
}

/// Equal powers on a given assignment: `p_t / N` per sub-carrier at the
/// source and `Q_j / (carriers of j)` at each relay.
pub fn equal_power(
    net: &NetworkChannels,
    assign: &Assignment,
    p_t: f64,
    q: &[f64],
) -> Result<SolveReport> {
    assign.validate_for(net)?;
    let budgets = Budgets::new(p_t, q.to_vec())?;
    if q.len() != net.relays() {
        return Err(crate::Error::InvalidConfig(format!(
            "{} relay budgets for {} relays",
            q.len(),
            net.relays()
        )));
    }
    let n = net.subcarriers();
    let mut alloc = PowerAllocation::zeros(n, net.relays());
    for (i, link) in assign.links().iter().enumerate() {
        alloc.source[i] = p_t / n as f64;
        alloc.relay[i][link.relay] = q[link.relay] / assign.carriers_of_relay(link.relay) as f64;
    }
    alloc.fit_to(&budgets);
    SolveReport::evaluate(Scheme::NonOpt, net, alloc, assign.clone(), budgets)
}

/// Non-OPT: equal powers on the seeded random assignment.
pub fn evaluate_non_opt_multi(
    net: &NetworkChannels,
    p_t: f64,
    q: &[f64],
    assign_seed: u64,
) -> Result<SolveReport> {
    let assign = random_assignment(assign_seed, net.subcarriers(), net.relays(), net.users());
    equal_power(net, &assign, p_t, q)
}
