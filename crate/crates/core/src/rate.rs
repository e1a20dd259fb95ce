//! Amplification factor, end-to-end SNRs and secrecy rates of one AF hop pair.

use serde::{Deserialize, Serialize};

use crate::alloc::{Assignment, PowerAllocation};
use crate::channel::{NetworkChannels, NoiseModel};
use crate::error::{Error, Result};

/// Normalized gains of one sub-carrier: `h` source→relay, `g` relay→destination,
/// `f` relay→eavesdropper, each `|·|²/σ²` (1/watt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcarrierGains {
    pub h: f64,
    pub g: f64,
    pub f: f64,
}

impl SubcarrierGains {
    pub fn new(h: f64, g: f64, f: f64) -> Self {
        debug_assert!(h >= 0.0 && g >= 0.0 && f >= 0.0);
        Self { h, g, f }
    }

    /// Destination channel strictly better than the eavesdropper's.
    pub fn is_secure(&self) -> bool {
        self.g > self.f
    }
}

/// Source power `p` and relay power `q` on one sub-carrier (watts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// Exact end-to-end AF rates.
    Exact,
    /// High-SNR approximation.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipPolicy {
    /// Negative sub-carrier rates count as zero.
    #[default]
    PerSubcarrier,
    /// The sum is reported as `max(0, Σ rates)`.
    Scheme,
    /// Plain sum, possibly negative.
    None,
}

/// Relay gain `√(q / (p·|h|² + σ²))`, with `h_gain_raw = |h|²`.
pub fn amplification_factor(pp: PowerPair, h_gain_raw: f64, noise: NoiseModel) -> f64 {
    (pp.q / (pp.p * h_gain_raw + noise.sigma2())).sqrt()
}

fn end_to_end_snr(pp: PowerPair, h_raw: f64, hop2_raw: f64, noise: NoiseModel) -> f64 {
    let sigma2 = noise.sigma2();
    let amp2 = amplification_factor(pp, h_raw, noise).powi(2);
    amp2 * pp.p * h_raw * hop2_raw / (amp2 * hop2_raw * sigma2 + sigma2)
}

/// Secrecy rate `½·[log2(1+SNR_D) − log2(1+SNR_E)]` in bits/s/Hz. Not clipped.
pub fn exact_secrecy_rate(pp: PowerPair, g: SubcarrierGains, noise: NoiseModel) -> f64 {
    let sigma2 = noise.sigma2();
    let (h_raw, g_raw, f_raw) = (g.h * sigma2, g.g * sigma2, g.f * sigma2);
    let snr_d = end_to_end_snr(pp, h_raw, g_raw, noise);
    let snr_e = end_to_end_snr(pp, h_raw, f_raw, noise);
    0.5 * ((1.0 + snr_d).log2() - (1.0 + snr_e).log2())
}

/// High-SNR secrecy rate `½·log2((G + HGp + GFq) / (F + HFp + GFq))`.
pub fn approx_secrecy_rate(pp: PowerPair, g: SubcarrierGains) -> Result<f64> {
    if !(g.f > 0.0 && g.g > 0.0) {
        return Err(Error::Domain(format!(
            "high-SNR rate needs positive destination and eavesdropper gains (G={}, F={})",
            g.g, g.f
        )));
    }
    let num = g.g + g.h * g.g * pp.p + g.g * g.f * pp.q;
    let den = g.f + g.h * g.f * pp.p + g.g * g.f * pp.q;
    Ok(0.5 * (num / den).log2())
}

/// Per-sub-carrier rate under `mode`, with the 1/2 half-duplex factor.
pub fn subcarrier_rate(
    pp: PowerPair,
    g: SubcarrierGains,
    noise: NoiseModel,
    mode: RateMode,
) -> Result<f64> {
    match mode {
        RateMode::Exact => Ok(exact_secrecy_rate(pp, g, noise)),
        RateMode::Approx => approx_secrecy_rate(pp, g),
    }
}

/// Per-sub-carrier rates (with the 1/2 factor) of an allocation over its assignment.
pub fn subcarrier_rates(
    alloc: &PowerAllocation,
    assign: &Assignment,
    net: &NetworkChannels,
    mode: RateMode,
    noise: NoiseModel,
) -> Result<Vec<f64>> {
    assign.validate_for(net)?;
    if alloc.subcarriers() != net.subcarriers() || alloc.relays() != net.relays() {
        return Err(Error::InvalidAssignment(
            "allocation dimensions do not match the network".into(),
        ));
    }
    assign
        .links()
        .iter()
        .enumerate()
        .map(|(i, link)| {
            let pp = PowerPair {
                p: alloc.source[i],
                q: alloc.relay[i][link.relay],
            };
            subcarrier_rate(pp, net.gains(i, link.relay, link.user), noise, mode)
        })
        .collect()
}

/// Aggregates per-sub-carrier rates under a clip policy.
pub fn clip_sum(rates: &[f64], clip: ClipPolicy) -> f64 {
    match clip {
        ClipPolicy::PerSubcarrier => rates.iter().map(|r| r.max(0.0)).sum(),
        ClipPolicy::Scheme => rates.iter().sum::<f64>().max(0.0),
        ClipPolicy::None => rates.iter().sum(),
    }
}

/// Sum secrecy rate of `alloc` over the assigned (sub-carrier, relay, user) tuples.
///
/// Gains in `net` are already normalized by σ², and the exact rate depends on
/// the powers and normalized gains only, so the default noise model is used.
pub fn sum_secrecy_rate(
    alloc: &PowerAllocation,
    assign: &Assignment,
    net: &NetworkChannels,
    mode: RateMode,
    clip: ClipPolicy,
) -> Result<f64> {
    let rates = subcarrier_rates(alloc, assign, net, mode, NoiseModel::default())?;
    Ok(clip_sum(&rates, clip))
}
