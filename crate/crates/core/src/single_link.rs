//! One relay, one user: OPT (source and relay powers optimized under separate
//! budgets), Sub-OPT (uniform source power, relay powers optimized) and Non-OPT
//! (equal powers at both nodes).

use crate::alloc::Assignment;
use crate::channel::NetworkChannels;
use crate::error::Result;
use crate::rate::SubcarrierGains;
use crate::report::{Scheme, SolveReport, SolverParams};
use crate::restricted::{equal_power, optimize_powers_for_assignment, solve_subopt1};

pub fn solve_opt(
    gains: &[SubcarrierGains],
    p_t: f64,
    q_t: f64,
    params: &SolverParams,
) -> Result<SolveReport> {
    let net = NetworkChannels::from_single_link(gains)?;
    let mut report = optimize_powers_for_assignment(
        &net,
        &Assignment::single_link(gains.len()),
        p_t,
        &[q_t],
        params,
    )?;
    report.scheme = Scheme::Opt;
    Ok(report)
}

pub fn solve_subopt_relay_only_single(
    gains: &[SubcarrierGains],
    p_t: f64,
    q_t: f64,
    params: &SolverParams,
) -> Result<SolveReport> {
    let net = NetworkChannels::from_single_link(gains)?;
    let mut report = solve_subopt1(&net, p_t, &[q_t], params)?;
    report.scheme = Scheme::SubOpt;
    Ok(report)
}

pub fn evaluate_non_opt_single(
    gains: &[SubcarrierGains],
    p_t: f64,
    q_t: f64,
) -> Result<SolveReport> {
    let net = NetworkChannels::from_single_link(gains)?;
    equal_power(&net, &Assignment::single_link(gains.len()), p_t, &[q_t])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::{approx_secrecy_rate, ClipPolicy, PowerPair, RateMode};

    #[test]
    fn insecure_link_gets_nothing() {
        let gains = vec![SubcarrierGains::new(1.0, 0.5, 2.0); 4];
        let params = SolverParams::default();
        for r in [
            solve_opt(&gains, 7.0, 7.0, &params).unwrap(),
            solve_subopt_relay_only_single(&gains, 7.0, 7.0, &params).unwrap(),
        ] {
            assert!(
                r.allocation.relay.iter().flatten().all(|u| *u == 0.0),
                "{:?}",
                r.scheme
            );
            assert_eq!(r.sr_sum_exact, 0.0);
        }
    }

    #[test]
    fn non_opt_two_carrier_hand_instance() {
        let gains = [
            SubcarrierGains::new(2.0, 3.0, 1.0),
            SubcarrierGains::new(1.0, 2.0, 4.0),
        ];
        let r = evaluate_non_opt_single(&gains, 2.0, 2.0).unwrap();
        let pp = PowerPair { p: 1.0, q: 1.0 };
        let expected =
            approx_secrecy_rate(pp, gains[0]).unwrap() + approx_secrecy_rate(pp, gains[1]).unwrap();
        let got = r.sr_sum(RateMode::Approx, ClipPolicy::None).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(
            r.sr_sum(RateMode::Exact, ClipPolicy::PerSubcarrier)
                .unwrap()
                >= 0.0
        );
    }
}
