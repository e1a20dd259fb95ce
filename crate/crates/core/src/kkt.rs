//! Per-sub-carrier maximizers of the Lagrangian subproblem
//!
//! ```text
//!     max_{0 ≤ p ≤ p_max, 0 ≤ q ≤ q_max}   R(p, q) − λ·p − v·q
//! ```
//!
//! where `R` is the secrecy rate of one sub-carrier in bits/s/Hz *without* the
//! half-duplex factor 1/2, and (λ, v) are the source and relay power prices.
//!
//! With the exact AF rate, writing `s = 1 + pH` and primes for prices scaled to
//! nats (`λ' = λ·ln 2`), the rate is
//!
//! ```text
//!     ln(1+qG) − ln(1+qF) + ln(s+qF) − ln(s+qG)
//! ```
//!
//! For fixed `q` it is concave in `s`, and the source-power KKT condition
//! `(s+qF)(s+qG) = qE/λ'` (`E = GH − HF`) is a quadratic with a closed-form root.
//! The source branch is active (`p* > 0`) exactly on the relay powers where
//! `A q² + B q + C < 0`, with `A = λ'FG`, `B = λ'(F+G) − E`, `C = λ'`.
//! Substituting `s*(q)` leaves the relay condition
//!
//! ```text
//!     (G−F)(s−1)(s − q²FG) / ((1+qG)(1+qF)(s+qF)(s+qG)) = v'
//! ```
//!
//! which is bracketed on the active interval and solved by bisection. The rate
//! behaves like `pq` near the origin, so `(0, 0)` is always a competing local
//! maximum with value 0 and the better of the two is returned.
//!
//! The high-SNR rate `log2(G(1+Hp+Fq) / (F(1+Hp+Gq)))` is decreasing in `q`
//! whenever `G > F`. Its subproblem is therefore maximized at the origin for
//! every nonnegative price pair.
//!
//! [`inner_max_oracle`] solves the same problems by brute force (a 2-D grid
//! followed by coordinate-wise golden-section refinement). It evaluates rates
//! through [`crate::rate`] rather than the formulas above.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::NoiseModel;
use crate::numeric::{bisect_descending, geomspace, golden_section_max};
use crate::rate::{approx_secrecy_rate, exact_secrecy_rate, PowerPair, SubcarrierGains};

/// Rate expression optimized by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Exact end-to-end AF secrecy rate.
    #[default]
    Exact,
    /// High-SNR approximation of the secrecy rate.
    HighSnr,
}

/// Source price λ and relay price v, in bits/s/Hz per watt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPrices {
    pub lambda: f64,
    pub v: f64,
}

/// Upper bounds on the per-sub-carrier powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBox {
    pub p_max: f64,
    pub q_max: f64,
}

impl PowerBox {
    /// `[0, 10·P_t] × [0, 10·Q_t]`: never binding for a feasible allocation.
    pub fn for_budgets(p_t: f64, q_t: f64) -> Self {
        Self {
            p_max: 10.0 * p_t,
            q_max: 10.0 * q_t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ClosedForm,
    Oracle,
}

/// Maximizer of one subproblem and its value (bits/s/Hz, no 1/2 factor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolution {
    pub p: f64,
    pub q: f64,
    pub objective: f64,
    pub method: SolveMethod,
}

impl InnerSolution {
    fn origin(objective: f64) -> Self {
        Self {
            p: 0.0,
            q: 0.0,
            objective,
            method: SolveMethod::ClosedForm,
        }
    }
}

/// Coefficients of the exact-rate KKT system at source price λ.
///
/// `A q² + B q + C < 0` is the set of relay powers for which the source
/// transmits; `D = F − G` and `E = GH − HF` enter the source-power quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl Coefficients {
    pub fn new(g: SubcarrierGains, lambda: f64) -> Self {
        let lam = lambda * LN_2;
        let e = g.g * g.h - g.h * g.f;
        Self {
            a: lam * g.f * g.g,
            b: lam * (g.f + g.g) - e,
            c: lam,
            d: g.f - g.g,
            e,
        }
    }

    /// Open interval of relay powers where the optimal source power is positive.
    pub fn active_interval(&self) -> Option<(f64, f64)> {
        if self.b >= 0.0 {
            return None;
        }
        if self.a == 0.0 {
            return Some((self.c / -self.b, f64::INFINITY));
        }
        let disc = self.b * self.b - 4.0 * self.a * self.c;
        if disc <= 0.0 {
            return None;
        }
        let root = -self.b + disc.sqrt();
        Some((2.0 * self.c / root, root / (2.0 * self.a)))
    }
}

/// Secrecy rate in bits/s/Hz without the 1/2 factor.
///
/// Evaluated through [`crate::rate`]; the closed forms below use their own algebra.
pub fn rate_bits(objective: Objective, g: SubcarrierGains, p: f64, q: f64) -> f64 {
    let pp = PowerPair { p, q };
    match objective {
        Objective::Exact => 2.0 * exact_secrecy_rate(pp, g, NoiseModel::UNIT),
        Objective::HighSnr => approx_secrecy_rate(pp, g).map_or(f64::NEG_INFINITY, |r| 2.0 * r),
    }
}

/// `R(p, q) − λp − vq` for a secure sub-carrier; 0 for an insecure one, which is never powered.
pub fn subproblem_value(
    objective: Objective,
    g: SubcarrierGains,
    prices: DualPrices,
    p: f64,
    q: f64,
) -> f64 {
    if !g.is_secure() {
        return 0.0;
    }
    rate_bits(objective, g, p, q) - prices.lambda * p - prices.v * q
}

/// Exact rate in nats from `s = 1 + pH`, without the 1/2 factor.
fn exact_nats(s: f64, q: f64, g: f64, f: f64) -> f64 {
    (q * g).ln_1p() - (q * f).ln_1p() + (-q * (g - f) / (s + q * g)).ln_1p()
}

/// Relay-power derivative of the exact rate (nats) at fixed `s`.
fn exact_dq(s: f64, q: f64, g: f64, f: f64) -> f64 {
    (g - f) * (s - 1.0) * (s - q * q * f * g)
        / ((1.0 + q * g) * (1.0 + q * f) * (s + q * f) * (s + q * g))
}

struct ExactProblem {
    h: f64,
    g: f64,
    f: f64,
    lam: f64,
    v: f64,
    bounds: PowerBox,
}

impl ExactProblem {
    /// Optimal source power for relay power `q`.
    fn source_power(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        let ratio = q * (self.g * self.h - self.h * self.f) / self.lam;
        if !ratio.is_finite() {
            return self.bounds.p_max;
        }
        let c = ratio - q * q * self.f * self.g;
        let disc = q * q * (self.g - self.f).powi(2) + 4.0 * ratio;
        let s = 2.0 * c / (q * (self.f + self.g) + disc.sqrt());
        ((s - 1.0) / self.h).clamp(0.0, self.bounds.p_max)
    }

    fn slope(&self, q: f64) -> f64 {
        let s = 1.0 + self.h * self.source_power(q);
        exact_dq(s, q, self.g, self.f) - self.v
    }

    fn value(&self, q: f64) -> (f64, f64) {
        let p = self.source_power(q);
        let s = 1.0 + self.h * p;
        (
            p,
            exact_nats(s, q, self.g, self.f) - self.lam * p - self.v * q,
        )
    }

    fn solve(&self, coeffs: &Coefficients) -> Option<(f64, f64, f64)> {
        const GRID: usize = 48;
        let (q_on, q_off) = if self.lam == 0.0 {
            (0.0, f64::INFINITY)
        } else {
            coeffs.active_interval()?
        };
        let hi = q_off.min(self.bounds.q_max);
        let lo = if q_on > 0.0 { q_on } else { hi * 1e-12 };
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return None;
        }
        let grid = geomspace(lo, hi, GRID);
        let slopes: Vec<f64> = grid.iter().map(|&q| self.slope(q)).collect();
        if slopes.iter().any(|d| d.is_nan()) {
            return None;
        }

        let mut roots = Vec::new();
        for w in 0..GRID - 1 {
            if slopes[w] > 0.0 && slopes[w + 1] <= 0.0 {
                roots.push(bisect_descending(|q| self.slope(q), grid[w], grid[w + 1]));
            }
        }
        if slopes[GRID - 1] > 0.0 {
            roots.push(hi);
        }
        if roots.is_empty() {
            // A narrow positive bump in the slope can fall between grid points.
            let top = (0..GRID)
                .max_by(|&x, &y| slopes[x].total_cmp(&slopes[y]))
                .unwrap_or(0);
            let (left, right) = (grid[top.saturating_sub(1)], grid[(top + 1).min(GRID - 1)]);
            let (peak, peak_slope) =
                golden_section_max(|q| self.slope(q), left, right, 1e-14 * right);
            if peak_slope > 0.0 {
                roots.push(bisect_descending(|q| self.slope(q), peak, right));
            }
        }

        let best = roots
            .into_iter()
            .map(|q| {
                let (p, val) = self.value(q);
                (p, q, val)
            })
            .filter(|(_, _, val)| *val > 0.0)
            .max_by(|x, y| x.2.total_cmp(&y.2));
        match best {
            Some((p, q, val)) if val.is_finite() && p.is_finite() => Some((p, q, val)),
            Some(_) => None,
            None => Some((0.0, 0.0, 0.0)),
        }
    }
}

/// Closed-form maximizer of one sub-carrier's subproblem.
///
/// Insecure sub-carriers (`G ≤ F`) return `(0, 0)` with value 0. When the
/// exact-rate algebra produces a non-finite quantity the numeric oracle takes
/// over and the result is tagged [`SolveMethod::Oracle`].
pub fn inner_max_closed_form(
    g: SubcarrierGains,
    prices: DualPrices,
    bounds: PowerBox,
    objective: Objective,
) -> InnerSolution {
    if !g.is_secure() {
        return InnerSolution::origin(0.0);
    }
    match objective {
        Objective::HighSnr => InnerSolution::origin((g.g / g.f).log2()),
        Objective::Exact => {
            if g.h <= 0.0 {
                return InnerSolution::origin(0.0);
            }
            let problem = ExactProblem {
                h: g.h,
                g: g.g,
                f: g.f,
                lam: prices.lambda * LN_2,
                v: prices.v * LN_2,
                bounds,
            };
            let coeffs = Coefficients::new(g, prices.lambda);
            match problem.solve(&coeffs) {
                Some((p, q, val)) => InnerSolution {
                    p,
                    q,
                    objective: val / LN_2,
                    method: SolveMethod::ClosedForm,
                },
                None if coeffs.active_interval().is_none() && prices.lambda > 0.0 => {
                    InnerSolution::origin(0.0)
                }
                None => InnerSolution {
                    method: SolveMethod::Oracle,
                    ..inner_max_oracle(g, prices, bounds, objective)
                },
            }
        }
    }
}

/// Joint-network form of [`inner_max_closed_form`]: `a`, `b`, `c` are the
/// source→relay, relay→user and relay→eavesdropper gains of one
/// (sub-carrier, relay, user) tuple, and `prices` carries (λ, V_j).
pub fn inner_max_joint(
    a: f64,
    b: f64,
    c: f64,
    prices: DualPrices,
    bounds: PowerBox,
    objective: Objective,
) -> InnerSolution {
    inner_max_closed_form(
        SubcarrierGains { h: a, g: b, f: c },
        prices,
        bounds,
        objective,
    )
}

/// Brute-force maximizer: a 161×161 grid (zero plus geometric spacing down to
/// 1e-7 of each bound) followed by alternating golden-section line searches
/// in `p` and `q` until neither coordinate moves.
///
/// In `p` the objective is concave and in `q` it has a single stationary
/// point, so each line search is over a unimodal function. The origin is a
/// local maximum, so the refinement starts from both the best grid point and
/// the best grid point with positive powers.
pub fn inner_max_oracle(
    g: SubcarrierGains,
    prices: DualPrices,
    bounds: PowerBox,
    objective: Objective,
) -> InnerSolution {
    if !g.is_secure() {
        return InnerSolution {
            method: SolveMethod::Oracle,
            ..InnerSolution::origin(0.0)
        };
    }
    let f = |p: f64, q: f64| subproblem_value(objective, g, prices, p, q);
    let (ps, qs) = (
        geomspace(bounds.p_max * 1e-7, bounds.p_max, 160),
        geomspace(bounds.q_max * 1e-7, bounds.q_max, 160),
    );
    let mut interior = (ps[0], qs[0], f(ps[0], qs[0]));
    for &p in &ps {
        for &q in &qs {
            let val = f(p, q);
            if val > interior.2 {
                interior = (p, q, val);
            }
        }
    }
    let mut best = (0.0, 0.0, f(0.0, 0.0));
    for start in [interior, (0.0, 0.0, best.2)] {
        let refined = coordinate_ascent(&f, start, bounds);
        if refined.2 > best.2 {
            best = refined;
        }
    }
    InnerSolution {
        p: best.0,
        q: best.1,
        objective: best.2,
        method: SolveMethod::Oracle,
    }
}

fn coordinate_ascent<F: Fn(f64, f64) -> f64>(
    f: &F,
    start: (f64, f64, f64),
    bounds: PowerBox,
) -> (f64, f64, f64) {
    let (mut p, mut q, mut val) = start;
    let tol_p = 1e-13 * bounds.p_max;
    let tol_q = 1e-13 * bounds.q_max;
    for _ in 0..2000 {
        let (p_new, v_p) = golden_section_max(|x| f(x, q), 0.0, bounds.p_max, tol_p);
        let (p_next, v_after_p) = if v_p > val { (p_new, v_p) } else { (p, val) };
        let (q_new, v_q) = golden_section_max(|y| f(p_next, y), 0.0, bounds.q_max, tol_q);
        let (q_next, v_next) = if v_q > v_after_p {
            (q_new, v_q)
        } else {
            (q, v_after_p)
        };
        let moved = (p_next - p).abs() + (q_next - q).abs();
        let gained = v_next - val;
        p = p_next;
        q = q_next;
        val = v_next;
        if moved <= 1e-12 * (1.0 + p + q) || gained <= 1e-15 * val.abs().max(1e-300) {
            break;
        }
    }
    (p, q, val)
}

/// Relay power on one tuple when the source power is fixed at `p_fixed`:
/// maximizes `R(p_fixed, u) − ζ·u` over `0 ≤ u ≤ u_max`.
///
/// For the exact rate the derivative in `u` crosses zero at most once, at
/// the root of `(b−c)(s−1)(s − u²bc) = ζ'(1+ub)(1+uc)(s+uc)(s+ub)` with
/// `s = 1 + a·p_fixed`, which lies below `√(s/(bc))`. The returned solution
/// carries `p = p_fixed`, `q = u*` and objective `R − ζu`.
pub fn relay_power_fixed_source(
    a: f64,
    b: f64,
    c: f64,
    p_fixed: f64,
    zeta: f64,
    u_max: f64,
    objective: Objective,
) -> InnerSolution {
    let g = SubcarrierGains { h: a, g: b, f: c };
    let fixed = |u: f64, value: f64, method| InnerSolution {
        p: p_fixed,
        q: u,
        objective: value,
        method,
    };
    if !g.is_secure() {
        return fixed(0.0, 0.0, SolveMethod::ClosedForm);
    }
    match objective {
        Objective::HighSnr => fixed(
            0.0,
            rate_bits(objective, g, p_fixed, 0.0),
            SolveMethod::ClosedForm,
        ),
        Objective::Exact => {
            let s = 1.0 + a * p_fixed;
            let zeta_n = zeta * LN_2;
            if s <= 1.0 {
                return fixed(0.0, 0.0, SolveMethod::ClosedForm);
            }
            let slope = |u: f64| exact_dq(s, u, b, c) - zeta_n;
            let value = |u: f64| exact_nats(s, u, b, c) / LN_2 - zeta * u;
            if slope(0.0) <= 0.0 {
                return fixed(0.0, 0.0, SolveMethod::ClosedForm);
            }
            let hi = if c > 0.0 {
                u_max.min((s / (b * c)).sqrt())
            } else {
                u_max
            };
            let u = if slope(hi) > 0.0 {
                hi
            } else {
                bisect_descending(slope, 0.0, hi)
            };
            let val = value(u);
            if u.is_finite() && val.is_finite() {
                fixed(u, val, SolveMethod::ClosedForm)
            } else {
                relay_power_oracle(a, b, c, p_fixed, zeta, u_max, objective)
            }
        }
    }
}

/// Golden-section maximizer of the fixed-source relay subproblem.
pub fn relay_power_oracle(
    a: f64,
    b: f64,
    c: f64,
    p_fixed: f64,
    zeta: f64,
    u_max: f64,
    objective: Objective,
) -> InnerSolution {
    let g = SubcarrierGains { h: a, g: b, f: c };
    if !g.is_secure() {
        return InnerSolution {
            p: p_fixed,
            q: 0.0,
            objective: 0.0,
            method: SolveMethod::Oracle,
        };
    }
    let f = |u: f64| rate_bits(objective, g, p_fixed, u) - zeta * u;
    let (u, val) = golden_section_max(f, 0.0, u_max, 1e-13 * u_max);
    InnerSolution {
        p: p_fixed,
        q: u,
        objective: val,
        method: SolveMethod::Oracle,
    }
}
