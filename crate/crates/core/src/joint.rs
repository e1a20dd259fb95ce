//! J-OPT: joint source/relay power allocation, relay selection and exclusive
//! sub-carrier assignment by dual decomposition over (λ, V_1..V_J).

use crate::alloc::{Assignment, Link, PowerAllocation};
use crate::channel::NetworkChannels;
use crate::dual::{self, PriceLayout, Relaxation};
use crate::error::{Error, Result};
use crate::kkt::{inner_max_joint, DualPrices, InnerSolution, SolveMethod};
use crate::report::{Scheme, SolveReport, SolverParams};

/// Per-(sub-carrier, relay, user) subproblem values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTensor {
    n: usize,
    j: usize,
    k: usize,
    data: Vec<f64>,
}

impl ScoreTensor {
    pub fn new(n: usize, j: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * j * k || j == 0 || k == 0 {
            return Err(Error::InvalidConfig(format!(
                "score tensor needs {n}x{j}x{k} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("scores must be finite".into()));
        }
        Ok(Self { n, j, k, data })
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.j + j) * self.k + k]
    }

    pub fn subcarriers(&self) -> usize {
        self.n
    }
}

/// Best (relay, user) per sub-carrier; ties go to the smallest relay, then user.
pub fn assign_best(scores: &ScoreTensor) -> Assignment {
    let links = (0..scores.n)
        .map(|i| {
            let row = &scores.data[i * scores.j * scores.k..(i + 1) * scores.j * scores.k];
            let mut best = 0;
            for (idx, &s) in row.iter().enumerate() {
                if s > row[best] {
                    best = idx;
                }
            }
            Link {
                relay: best / scores.k,
                user: best % scores.k,
            }
        })
        .collect();
    Assignment::from_links(links)
}

/// Maximizes the sum secrecy rate over source powers, relay powers and the
/// exclusive assignment of sub-carriers to (relay, user) pairs, subject to the
/// source budget `p_t` and one budget per relay.
///
/// Each iteration solves all N·J·K tuple subproblems, assigns every
/// sub-carrier to its best tuple and updates the prices from the assigned
/// powers. If the assignment starts cycling, it is frozen to the assignment
/// of the best primal iterate and only N subproblems are solved afterwards.
pub fn solve_joint(
    net: &NetworkChannels,
    p_t: f64,
    q: &[f64],
    params: &SolverParams,
) -> Result<SolveReport> {
    let budgets = dual::check_inputs(net, p_t, q, params)?;
    let bounds = params.power_box(&budgets);
    let (n, nj, nk) = (net.subcarriers(), net.relays(), net.users());
    let layout = PriceLayout {
        source_priced: true,
        relays: nj,
    };

    let relax = |prices: &[f64], frozen: Option<&Assignment>| {
        let lambda = prices[0];
        let tuple = |i: usize, j: usize, k: usize| {
            let pr = DualPrices {
                lambda,
                v: prices[1 + j],
            };
            inner_max_joint(
                net.a(i, j),
                net.b(i, j, k),
                net.c(i, j),
                pr,
                bounds,
                params.objective,
            )
        };
        let mut solutions: Vec<(Link, InnerSolution)> = Vec::with_capacity(n);
        let mut fallbacks = 0;
        let solves;
        match frozen {
            Some(assign) => {
                for (i, &link) in assign.links().iter().enumerate() {
                    let s = tuple(i, link.relay, link.user);
                    fallbacks += usize::from(s.method == SolveMethod::Oracle);
                    solutions.push((link, s));
                }
                solves = n;
            }
            None => {
                let mut row = Vec::with_capacity(nj * nk);
                for i in 0..n {
                    row.clear();
                    for j in 0..nj {
                        for k in 0..nk {
                            let s = tuple(i, j, k);
                            fallbacks += usize::from(s.method == SolveMethod::Oracle);
                            row.push(s);
                        }
                    }
                    let mut best = 0;
                    for (idx, s) in row.iter().enumerate() {
                        if s.objective > row[best].objective {
                            best = idx;
                        }
                    }
                    solutions.push((
                        Link {
                            relay: best / nk,
                            user: best % nk,
                        },
                        row[best],
                    ));
                }
                solves = n * nj * nk;
            }
        }
        assemble(solutions, nj, solves, fallbacks)
    };
    dual::solve(Scheme::JOpt, net, &budgets, layout, params, true, relax)
}

/// Relaxation from one chosen tuple solution per sub-carrier, with λ priced.
pub(crate) fn assemble(
    solutions: Vec<(Link, InnerSolution)>,
    relays: usize,
    solves: usize,
    fallbacks: usize,
) -> Relaxation {
    let n = solutions.len();
    let mut allocation = PowerAllocation::zeros(n, relays);
    let mut usage = vec![0.0; relays + 1];
    let mut value = 0.0;
    let mut links = Vec::with_capacity(n);
    for (i, (link, s)) in solutions.into_iter().enumerate() {
        allocation.source[i] = s.p;
        allocation.relay[i][link.relay] = s.q;
        usage[0] += s.p;
        usage[1 + link.relay] += s.q;
        value += s.objective;
        links.push(link);
    }
    Relaxation {
        value,
        usage,
        allocation,
        assignment: Assignment::from_links(links),
        solves,
        fallbacks,
    }
}
