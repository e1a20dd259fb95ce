//! Sub-carrier assignments, power allocations and budgets.

use crate::channel::NetworkChannels;
use crate::error::{Error, Result};

/// The (relay, user) pair a sub-carrier is routed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub relay: usize,
    pub user: usize,
}

/// Exclusive sub-carrier assignment: every sub-carrier carries exactly one
/// (relay, user) pair, i.e. `Σ_{j,k} π[i][j][k] = 1` for all `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    links: Vec<Link>,
}

impl Assignment {
    pub fn from_links(links: Vec<Link>) -> Self {
        Self { links }
    }

    /// Every sub-carrier through relay 0 to user 0.
    pub fn single_link(n: usize) -> Self {
        Self {
            links: vec![Link { relay: 0, user: 0 }; n],
        }
    }

    /// Builds an assignment from the binary indicator `π[i][j][k]`.
    pub fn from_indicator(pi: &[Vec<Vec<bool>>]) -> Result<Self> {
        let links = pi
            .iter()
            .enumerate()
            .map(|(i, per_relay)| {
                let mut chosen = per_relay.iter().enumerate().flat_map(|(j, users)| {
                    users
                        .iter()
                        .enumerate()
                        .filter(|(_, on)| **on)
                        .map(move |(k, _)| Link { relay: j, user: k })
                });
                match (chosen.next(), chosen.next()) {
                    (Some(link), None) => Ok(link),
                    (None, _) => Err(Error::InvalidAssignment(format!(
                        "sub-carrier {i} is not assigned"
                    ))),
                    (Some(_), Some(_)) => Err(Error::InvalidAssignment(format!(
                        "sub-carrier {i} is assigned to more than one pair"
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { links })
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, i: usize) -> Link {
        self.links[i]
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// `π[i][j][k]`.
    pub fn indicator(&self, i: usize, j: usize, k: usize) -> bool {
        self.links[i] == Link { relay: j, user: k }
    }

    /// Number of sub-carriers routed through relay `j`.
    pub fn carriers_of_relay(&self, j: usize) -> usize {
        self.links.iter().filter(|l| l.relay == j).count()
    }

    /// Checks that the assignment covers every sub-carrier of `net` with in-range indices.
    pub fn validate_for(&self, net: &NetworkChannels) -> Result<()> {
        if self.links.len() != net.subcarriers() {
            return Err(Error::InvalidAssignment(format!(
                "{} links for {} sub-carriers",
                self.links.len(),
                net.subcarriers()
            )));
        }
        if let Some((i, l)) = self
            .links
            .iter()
            .enumerate()
            .find(|(_, l)| l.relay >= net.relays() || l.user >= net.users())
        {
            return Err(Error::InvalidAssignment(format!(
                "sub-carrier {i} uses relay {} / user {} outside a {}x{} network",
                l.relay,
                l.user,
                net.relays(),
                net.users()
            )));
        }
        Ok(())
    }
}

/// Source powers `p[i]` and relay powers `u[i][j]` in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub source: Vec<f64>,
    pub relay: Vec<Vec<f64>>,
}

impl PowerAllocation {
    pub fn zeros(n: usize, j: usize) -> Self {
        Self {
            source: vec![0.0; n],
            relay: vec![vec![0.0; j]; n],
        }
    }

    pub fn subcarriers(&self) -> usize {
        self.source.len()
    }

    pub fn relays(&self) -> usize {
        self.relay.first().map_or(0, Vec::len)
    }

    pub fn source_total(&self) -> f64 {
        self.source.iter().sum()
    }

    pub fn relay_total(&self, j: usize) -> f64 {
        self.relay.iter().map(|row| row[j]).sum()
    }

    /// True when all powers are nonnegative, every budget holds with zero
    /// tolerance, and only the assigned relay of each sub-carrier transmits.
    pub fn is_feasible(&self, budgets: &Budgets, assign: &Assignment) -> bool {
        let nonneg = self
            .source
            .iter()
            .chain(self.relay.iter().flatten())
            .all(|x| *x >= 0.0 && x.is_finite());
        let idle_relays_silent = self.relay.iter().zip(assign.links()).all(|(row, link)| {
            row.iter()
                .enumerate()
                .all(|(j, u)| j == link.relay || *u == 0.0)
        });
        nonneg
            && idle_relays_silent
            && self.source_total() <= budgets.source
            && (0..budgets.relays.len()).all(|j| self.relay_total(j) <= budgets.relays[j])
    }

    /// Scales the source powers and each relay's powers down proportionally
    /// so every budget holds exactly in floating point.
    pub fn fit_to(&mut self, budgets: &Budgets) {
        fit_to_budget(self.source.iter_mut(), budgets.source);
        for (j, &cap) in budgets.relays.iter().enumerate() {
            fit_to_budget(self.relay.iter_mut().map(|row| &mut row[j]), cap);
        }
    }
}

/// Total power limits: `source` at the base station, `relays[j]` at relay `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Budgets {
    pub source: f64,
    pub relays: Vec<f64>,
}

impl Budgets {
    pub fn new(source: f64, relays: Vec<f64>) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(source) || relays.is_empty() || !relays.iter().all(|q| ok(*q)) {
            return Err(Error::InvalidConfig(
                "power budgets must be positive and finite".into(),
            ));
        }
        Ok(Self { source, relays })
    }

    pub fn largest(&self) -> f64 {
        self.relays.iter().copied().fold(self.source, f64::max)
    }
}

fn fit_to_budget<'a>(values: impl Iterator<Item = &'a mut f64>, budget: f64) {
    let mut values: Vec<&mut f64> = values.collect();
    let total = |v: &[&mut f64]| v.iter().map(|x| **x).sum::<f64>();
    let sum = total(&values);
    if sum <= budget {
        return;
    }
    let scale = budget / sum;
    for x in values.iter_mut() {
        **x *= scale;
    }
    // Rounding can leave the sum a few ulps above the budget.
    let mut shrink = 1.0 - f64::EPSILON;
    while total(&values) > budget {
        for x in values.iter_mut() {
            **x *= shrink;
        }
        shrink *= 1.0 - f64::EPSILON;
    }
}
