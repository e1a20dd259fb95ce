use afsec::alloc::{Assignment, Link};
use afsec::channel::build_network;
use afsec::joint::solve_joint;
use afsec::rate::exact_secrecy_rate;
use afsec::restricted::{
    equal_power, optimize_powers_for_assignment, random_assignment, solve_subopt1, solve_subopt2,
};
use afsec::single_link::{evaluate_non_opt_single, solve_opt, solve_subopt_relay_only_single};
use afsec::{ChannelModel, NetworkChannels, NoiseModel, PowerPair, SolverParams, SubcarrierGains};

fn rate(p: f64, q: f64, g: SubcarrierGains) -> f64 {
    exact_secrecy_rate(PowerPair { p, q }, g, NoiseModel::default())
}

/// Best value of `f` on `[0, hi]`: a fine grid followed by local zooming.
fn line_max(f: impl Fn(f64) -> f64, hi: f64) -> (f64, f64) {
    let (mut lo, mut up, mut best) = (0.0, hi, (0.0, f(0.0)));
    for _ in 0..4 {
        let step = (up - lo) / 100.0;
        for s in 0..=100 {
            let x = lo + step * s as f64;
            let y = f(x);
            if y > best.1 {
                best = (x, y);
            }
        }
        lo = (best.0 - 2.0 * step).max(0.0);
        up = (best.0 + 2.0 * step).min(hi);
    }
    best
}

fn params() -> SolverParams {
    SolverParams::default()
}

#[test]
fn one_carrier_opt_matches_constrained_grid() {
    for g in [
        SubcarrierGains::new(1.0, 4.0, 1.0),
        SubcarrierGains::new(0.3, 9.0, 0.2),
        SubcarrierGains::new(5.0, 0.8, 0.1),
    ] {
        let (p_t, q_t) = (3.0, 2.0);
        // Maximize over q for each p, then over p.
        let (_, best) = line_max(|p| line_max(|q| rate(p, q, g), q_t).1, p_t);
        let report = solve_opt(&[g], p_t, q_t, &params()).unwrap();
        assert!(report.is_feasible());
        assert!(
            (report.sr_sum_exact - best).abs() < 1e-3,
            "{g:?}: solver {} grid {best}",
            report.sr_sum_exact
        );
    }
}

#[test]
fn one_carrier_subopt_matches_line_search() {
    let g = SubcarrierGains::new(0.5, 6.0, 0.4);
    let (p_t, q_t) = (2.0, 4.0);
    let (_, best) = line_max(|q| rate(p_t, q, g), q_t);
    let report = solve_subopt_relay_only_single(&[g], p_t, q_t, &params()).unwrap();
    assert_eq!(report.allocation.source, vec![p_t]);
    assert!((report.sr_sum_exact - best).abs() < 1e-3);
}

#[test]
fn two_carrier_opt_matches_budget_split_search() {
    let gains = [
        SubcarrierGains::new(1.2, 3.0, 0.5),
        SubcarrierGains::new(0.4, 8.0, 1.0),
    ];
    let (p_t, q_t) = (2.0, 2.0);
    // Each carrier's best rate for a given (p, q) budget share, searched on a grid.
    let per_carrier = |g: SubcarrierGains, p_cap: f64, q_cap: f64| {
        line_max(|p| line_max(|q| rate(p, q, g), q_cap).1, p_cap).1
    };
    let steps = 20;
    let table: Vec<Vec<[f64; 2]>> = (0..=steps)
        .map(|a| {
            (0..=steps)
                .map(|b| {
                    let (ps, qs) = (p_t * a as f64 / steps as f64, q_t * b as f64 / steps as f64);
                    [per_carrier(gains[0], ps, qs), per_carrier(gains[1], ps, qs)]
                })
                .collect()
        })
        .collect();
    let mut best = 0.0f64;
    for a in 0..=steps {
        for b in 0..=steps {
            best = best.max(table[a][b][0] + table[steps - a][steps - b][1]);
        }
    }
    let report = solve_opt(&gains, p_t, q_t, &params()).unwrap();
    assert!(
        report.sr_sum_exact >= best - 1e-3,
        "solver {} grid {best}",
        report.sr_sum_exact
    );
    assert!(report.is_feasible());
}

#[test]
fn single_link_schemes_are_ordered() {
    let gains = build_network(12, 32, 1, 1, &ChannelModel::default())
        .unwrap()
        .single_link(0, 0);
    for budget in [1.0, 5.0, 10.0] {
        let opt = solve_opt(&gains, budget, budget, &params()).unwrap();
        let sub = solve_subopt_relay_only_single(&gains, budget, budget, &params()).unwrap();
        let non = evaluate_non_opt_single(&gains, budget, budget).unwrap();
        assert!(opt.sr_sum_exact >= sub.sr_sum_exact);
        assert!(sub.sr_sum_exact >= non.sr_sum_exact);
        assert!(opt.is_feasible() && sub.is_feasible() && non.is_feasible());
    }
}

#[test]
fn larger_budgets_never_lower_opt() {
    let gains = build_network(13, 16, 1, 1, &ChannelModel::default())
        .unwrap()
        .single_link(0, 0);
    let mut last = 0.0;
    for budget in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = solve_opt(&gains, budget, budget, &params()).unwrap();
        assert!(r.sr_sum_exact >= last - 1e-6);
        last = r.sr_sum_exact;
    }
}

#[test]
fn one_relay_one_user_reduces_to_single_link() {
    let net = build_network(14, 32, 1, 1, &ChannelModel::default()).unwrap();
    let gains = net.single_link(0, 0);
    let opt = solve_opt(&gains, 5.0, 5.0, &params()).unwrap();
    let joint = solve_joint(&net, 5.0, &[5.0], &params()).unwrap();
    let sub2 = solve_subopt2(&net, 5.0, &[5.0], &params(), 99).unwrap();
    assert!((joint.sr_sum_exact - opt.sr_sum_exact).abs() < 1e-9);
    assert!((sub2.sr_sum_exact - opt.sr_sum_exact).abs() < 1e-9);
    let sub = solve_subopt_relay_only_single(&gains, 5.0, 5.0, &params()).unwrap();
    let sub1 = solve_subopt1(&net, 5.0, &[5.0], &params()).unwrap();
    assert!((sub1.sr_sum_exact - sub.sr_sum_exact).abs() < 1e-9);
}

#[test]
fn dominated_user_is_never_chosen() {
    let base = build_network(15, 16, 2, 1, &ChannelModel::default()).unwrap();
    let (n, j) = (16, 2);
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..n {
        for jj in 0..j {
            a.push(base.a(i, jj));
            c.push(base.c(i, jj));
            b.push(base.b(i, jj, 0));
            b.push(0.01 * base.b(i, jj, 0));
        }
    }
    let net = NetworkChannels::from_tensors(n, j, 2, a, b, c).unwrap();
    let r = solve_joint(&net, 7.0, &[7.0, 7.0], &params()).unwrap();
    for (i, link) in r.assignment.links().iter().enumerate() {
        if r.rates_exact[i] > 0.0 {
            assert_eq!(link.user, 0, "carrier {i}");
        }
    }
}

#[test]
fn multi_relay_schemes_are_ordered_and_feasible() {
    let net = build_network(16, 32, 3, 4, &ChannelModel::default()).unwrap();
    let q = [6.0; 3];
    let jopt = solve_joint(&net, 6.0, &q, &params()).unwrap();
    let sub1 = solve_subopt1(&net, 6.0, &q, &params()).unwrap();
    let assign = random_assignment(5, 32, 3, 4);
    let sub2 = optimize_powers_for_assignment(&net, &assign, 6.0, &q, &params()).unwrap();
    let non = equal_power(&net, &assign, 6.0, &q).unwrap();
    for r in [&jopt, &sub1, &sub2, &non] {
        assert!(r.is_feasible(), "{}", r.scheme);
    }
    let slack = 1e-2 * jopt.sr_sum_exact;
    assert!(jopt.sr_sum_exact >= sub1.sr_sum_exact - slack);
    assert!(jopt.sr_sum_exact >= sub2.sr_sum_exact - slack);
    assert!(sub2.sr_sum_exact >= non.sr_sum_exact - slack);
}

#[test]
fn inner_solve_counts_follow_the_scheme() {
    let net = build_network(17, 16, 3, 2, &ChannelModel::default()).unwrap();
    let q = [4.0; 3];
    let jopt = solve_joint(&net, 4.0, &q, &params()).unwrap();
    let unfrozen = jopt
        .frozen_at
        .unwrap_or(jopt.inner_solves_per_iteration.len());
    assert!(jopt.inner_solves_per_iteration[..unfrozen]
        .iter()
        .all(|&s| s == 16 * 3 * 2));
    assert!(jopt.inner_solves_per_iteration[unfrozen..]
        .iter()
        .all(|&s| s == 16));
    let sub2 = solve_subopt2(&net, 4.0, &q, &params(), 3).unwrap();
    assert!(sub2.inner_solves_per_iteration.iter().all(|&s| s == 16));
}

#[test]
fn traces_bound_the_primal_from_above() {
    let gains = build_network(18, 32, 1, 1, &ChannelModel::default())
        .unwrap()
        .single_link(0, 0);
    let p = SolverParams {
        record_trace: true,
        ..params()
    };
    let r = solve_opt(&gains, 7.0, 7.0, &p).unwrap();
    assert_eq!(r.trace.len(), r.iterations);
    assert!(r
        .trace
        .records
        .iter()
        .all(|t| t.dual_value >= r.primal * (1.0 - 1e-9)));
    assert!(r.duality_gap.unwrap() >= -1e-9);
}

#[test]
fn insecure_network_gets_zero_rate() {
    let gains: Vec<_> = (0..8)
        .map(|i| SubcarrierGains::new(1.0 + i as f64, 0.5, 2.0))
        .collect();
    let r = solve_opt(&gains, 3.0, 3.0, &params()).unwrap();
    assert_eq!(r.sr_sum_exact, 0.0);
    assert!(r.is_feasible());
}

#[test]
fn exhaustive_assignment_search_agrees_on_a_tiny_network() {
    let (n, j, k) = (3, 2, 2);
    let net = build_network(
        19,
        n,
        j,
        k,
        &ChannelModel {
            n_taps: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let q = [3.0; 2];
    let mut best = 0.0f64;
    for code in 0..(j * k).pow(n as u32) {
        let links = (0..n)
            .map(|i| {
                let d = (code / (j * k).pow(i as u32)) % (j * k);
                Link {
                    relay: d / k,
                    user: d % k,
                }
            })
            .collect();
        let r = optimize_powers_for_assignment(
            &net,
            &Assignment::from_links(links),
            3.0,
            &q,
            &params(),
        )
        .unwrap();
        best = best.max(r.sr_sum_exact);
    }
    let jopt = solve_joint(&net, 3.0, &q, &params()).unwrap();
    assert!(
        (jopt.sr_sum_exact - best).abs() < 1e-3,
        "J-OPT {} exhaustive {best}",
        jopt.sr_sum_exact
    );
}

#[test]
fn bad_inputs_are_rejected() {
    let net = build_network(20, 8, 2, 2, &ChannelModel::default()).unwrap();
    assert!(solve_joint(&net, -1.0, &[1.0, 1.0], &params()).is_err());
    assert!(solve_joint(&net, 1.0, &[1.0], &params()).is_err());
    let bad = SolverParams {
        max_iters: 0,
        ..params()
    };
    assert!(solve_subopt1(&net, 1.0, &[1.0, 1.0], &bad).is_err());
    let wrong = Assignment::from_links(vec![Link { relay: 2, user: 0 }; 8]);
    assert!(optimize_powers_for_assignment(&net, &wrong, 1.0, &[1.0, 1.0], &params()).is_err());
}
