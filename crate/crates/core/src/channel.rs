//! Seeded multipath channels and their per-sub-carrier normalized gains.
//!
//! Every link is an `L`-tap channel with i.i.d. complex Gaussian taps. A
//! sub-carrier's gain is the squared magnitude of the channel's DFT bin,
//! divided by the noise variance, so gains are in units of 1/watt.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::SubcarrierGains;

/// Complex tap amplitudes of one multipath link.
#[derive(Debug, Clone, PartialEq)]
pub struct TapChannel {
    taps: Vec<Complex64>,
}

impl TapChannel {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidConfig(
                "a tap channel needs at least one tap".into(),
            ));
        }
        if taps.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::InvalidConfig("tap amplitudes must be finite".into()));
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Σ |tap|².
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// AWGN variance σ², identical at every node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub const UNIT: NoiseModel = NoiseModel { sigma2: 1.0 };

    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::UNIT
    }
}

/// Parameters shared by every link of a generated network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub n_taps: usize,
    /// Variance of each tap's real part (and, separately, of its imaginary part).
    pub tap_variance: f64,
    pub noise: NoiseModel,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            n_taps: 6,
            tap_variance: 1.0,
            noise: NoiseModel::default(),
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if self.n_taps == 0 {
            return Err(Error::InvalidConfig("n_taps must be at least 1".into()));
        }
        if !(self.tap_variance > 0.0 && self.tap_variance.is_finite()) {
            return Err(Error::InvalidConfig("tap_variance must be positive".into()));
        }
        Ok(())
    }
}

fn draw_taps(rng: &mut ChaCha8Rng, n_taps: usize, scale: f64) -> TapChannel {
    let taps = (0..n_taps)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(scale * re, scale * im)
        })
        .collect();
    TapChannel { taps }
}

/// Draws `count` tap channels from one seeded stream. Real and imaginary parts
/// are independent standard normals.
pub fn generate_taps(seed: u64, count: usize, n_taps: usize) -> Vec<TapChannel> {
    assert!(n_taps >= 1, "n_taps must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| draw_taps(&mut rng, n_taps, 1.0))
        .collect()
}

/// Per-sub-carrier gains `|Σ_l taps[l]·exp(−j2π·i·l/N)|² / σ²` for `i = 0..N`.
pub fn taps_to_gains(ch: &TapChannel, n: usize, noise: NoiseModel) -> Result<Vec<f64>> {
    if n < ch.len() {
        return Err(Error::InvalidConfig(format!(
            "{} sub-carriers cannot resolve a {}-tap channel",
            n,
            ch.len()
        )));
    }
    let gains = (0..n)
        .map(|i| {
            let response: Complex64 = ch
                .taps
                .iter()
                .enumerate()
                .map(|(l, tap)| {
                    // Reduce i·l mod N first so the phase stays exact for large N.
                    let k = (i * l) % n;
                    tap * Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
                })
                .sum();
            response.norm_sqr() / noise.sigma2()
        })
        .collect();
    Ok(gains)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    SourceRelay,
    RelayUser,
    RelayEavesdropper,
}

impl LinkKind {
    pub fn label(self) -> &'static str {
        match self {
            LinkKind::SourceRelay => "source-relay",
            LinkKind::RelayUser => "relay-user",
            LinkKind::RelayEavesdropper => "relay-eve",
        }
    }

    fn code(self) -> u64 {
        match self {
            LinkKind::SourceRelay => 1,
            LinkKind::RelayUser => 2,
            LinkKind::RelayEavesdropper => 3,
        }
    }
}

/// Taps of a single link. Each (kind, relay, user) owns a generator stream,
/// so a network with fewer relays or users is an exact sub-network of a larger one.
pub fn link_taps(
    seed: u64,
    kind: LinkKind,
    relay: usize,
    user: usize,
    model: &ChannelModel,
) -> TapChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind.code() << 48) | ((relay as u64) << 24) | user as u64);
    draw_taps(&mut rng, model.n_taps, model.tap_variance.sqrt())
}

/// Normalized gain tensors of a network with `n` sub-carriers, `j` relays and `k` users.
///
/// `a[i][j]` source→relay, `b[i][j][k]` relay→user, `c[i][j]` relay→eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkChannels {
    n: usize,
    j: usize,
    k: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl NetworkChannels {
    /// Builds a network from explicit tensors laid out row-major as `[i][j]` and `[i][j][k]`.
    pub fn from_tensors(
        n: usize,
        j: usize,
        k: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 || j == 0 || k == 0 {
            return Err(Error::InvalidConfig(
                "N, J and K must all be at least 1".into(),
            ));
        }
        if a.len() != n * j || c.len() != n * j || b.len() != n * j * k {
            return Err(Error::InvalidConfig(
                "gain tensor dimensions do not match N, J, K".into(),
            ));
        }
        if a.iter()
            .chain(&b)
            .chain(&c)
            .any(|g| !(g.is_finite() && *g >= 0.0))
        {
            return Err(Error::InvalidConfig(
                "gains must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { n, j, k, a, b, c })
    }

    /// The single-relay, single-user network with the given per-sub-carrier triples.
    pub fn from_single_link(gains: &[SubcarrierGains]) -> Result<Self> {
        let a = gains.iter().map(|g| g.h).collect();
        let b = gains.iter().map(|g| g.g).collect();
        let c = gains.iter().map(|g| g.f).collect();
        Self::from_tensors(gains.len(), 1, 1, a, b, c)
    }

    pub fn subcarriers(&self) -> usize {
        self.n
    }

    pub fn relays(&self) -> usize {
        self.j
    }

    pub fn users(&self) -> usize {
        self.k
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.j + j]
    }

    pub fn b(&self, i: usize, j: usize, k: usize) -> f64 {
        self.b[(i * self.j + j) * self.k + k]
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.j + j]
    }

    /// The (H, G, F) triple seen on sub-carrier `i` through relay `j` to user `k`.
    pub fn gains(&self, i: usize, j: usize, k: usize) -> SubcarrierGains {
        SubcarrierGains {
            h: self.a(i, j),
            g: self.b(i, j, k),
            f: self.c(i, j),
        }
    }

    /// All sub-carriers of the path through relay `j` to user `k`.
    pub fn single_link(&self, j: usize, k: usize) -> Vec<SubcarrierGains> {
        (0..self.n).map(|i| self.gains(i, j, k)).collect()
    }

    /// Restriction to the first `j` relays and `k` users.
    pub fn sub_network(&self, j: usize, k: usize) -> Result<Self> {
        if j == 0 || k == 0 || j > self.j || k > self.k {
            return Err(Error::InvalidConfig(format!(
                "cannot take a {j}x{k} slice of a {}x{} network",
                self.j, self.k
            )));
        }
        let mut a = Vec::with_capacity(self.n * j);
        let mut b = Vec::with_capacity(self.n * j * k);
        let mut c = Vec::with_capacity(self.n * j);
        for i in 0..self.n {
            for jj in 0..j {
                a.push(self.a(i, jj));
                c.push(self.c(i, jj));
                for kk in 0..k {
                    b.push(self.b(i, jj, kk));
                }
            }
        }
        Self::from_tensors(self.n, j, k, a, b, c)
    }

    /// Writes `link-type,i,j,k,gain` rows for every gain in the network.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["link-type", "i", "j", "k", "gain"])?;
        for i in 0..self.n {
            for j in 0..self.j {
                let (i_s, j_s) = (i.to_string(), j.to_string());
                w.write_record([
                    LinkKind::SourceRelay.label(),
                    &i_s,
                    &j_s,
                    "",
                    &format!("{:e}", self.a(i, j)),
                ])?;
                for k in 0..self.k {
                    let g = format!("{:e}", self.b(i, j, k));
                    w.write_record([LinkKind::RelayUser.label(), &i_s, &j_s, &k.to_string(), &g])?;
                }
                w.write_record([
                    LinkKind::RelayEavesdropper.label(),
                    &i_s,
                    &j_s,
                    "",
                    &format!("{:e}", self.c(i, j)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws an independent tap channel for every source→relay, relay→user and
/// relay→eavesdropper link and converts each to sub-carrier gains.
pub fn build_network(
    seed: u64,
    n: usize,
    j: usize,
    k: usize,
    model: &ChannelModel,
) -> Result<NetworkChannels> {
    model.validate()?;
    if n == 0 || j == 0 || k == 0 {
        return Err(Error::InvalidConfig(
            "N, J and K must all be at least 1".into(),
        ));
    }
    let per_relay = |kind: LinkKind, user: usize| -> Result<Vec<Vec<f64>>> {
        (0..j)
            .map(|jj| taps_to_gains(&link_taps(seed, kind, jj, user, model), n, model.noise))
            .collect()
    };
    let source = per_relay(LinkKind::SourceRelay, 0)?;
    let eve = per_relay(LinkKind::RelayEavesdropper, 0)?;
    let users = (0..k)
        .map(|kk| per_relay(LinkKind::RelayUser, kk))
        .collect::<Result<Vec<_>>>()?;

    let mut a = Vec::with_capacity(n * j);
    let mut b = Vec::with_capacity(n * j * k);
    let mut c = Vec::with_capacity(n * j);
    for i in 0..n {
        for jj in 0..j {
            a.push(source[jj][i]);
            c.push(eve[jj][i]);
            for user in &users {
                b.push(user[jj][i]);
            }
        }
    }
    NetworkChannels::from_tensors(n, j, k, a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn taps_are_deterministic_and_seed_sensitive() {
        let first = generate_taps(1, 2, 6);
        let second = generate_taps(1, 2, 6);
        assert_eq!(first, second);
        for (x, y) in first.iter().zip(&second) {
            for (a, b) in x.taps().iter().zip(y.taps()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
        assert_ne!(generate_taps(1, 2, 6), generate_taps(2, 2, 6));
    }

    #[test]
    fn tap_power_sample_mean_near_two() {
        let chans = generate_taps(7, 10_000, 6);
        let total: f64 = chans
            .iter()
            .flat_map(|ch| ch.taps().iter())
            .map(|t| t.norm_sqr())
            .sum();
        let mean = total / 60_000.0;
        assert!((mean - 2.0).abs() < 0.1, "mean |tap|^2 = {mean}");
    }

    #[test]
    fn flat_channel_has_flat_gains() {
        let ch = TapChannel::new(vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(
            taps_to_gains(&ch, 4, NoiseModel::default()).unwrap(),
            vec![1.0; 4]
        );
    }

    #[test]
    fn two_tap_dft_bins() {
        let ch = TapChannel::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let g = taps_to_gains(&ch, 2, NoiseModel::default()).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-12);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn gains_match_direct_fourier_sum() {
        // Independent oracle: the DFT written out in real arithmetic.
        let ch = TapChannel::new(vec![c(1.0, 0.0), c(0.0, 0.5)]).unwrap();
        let noise = NoiseModel::new(2.0).unwrap();
        let n = 8;
        let g = taps_to_gains(&ch, n, noise).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let theta = 2.0 * PI * i as f64 / n as f64;
            // 1 + 0.5j·(cos θ − j sin θ) = (1 + 0.5 sin θ) + j·0.5 cos θ
            let re = 1.0 + 0.5 * theta.sin();
            let im = 0.5 * theta.cos();
            let expected = (re * re + im * im) / 2.0;
            assert!((gi - expected).abs() < 1e-12, "bin {i}: {gi} vs {expected}");
        }
    }

    #[test]
    fn too_few_subcarriers_is_rejected() {
        let ch = generate_taps(3, 1, 6).remove(0);
        assert!(matches!(
            taps_to_gains(&ch, 5, NoiseModel::default()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(TapChannel::new(vec![]).is_err());
        assert!(TapChannel::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(NoiseModel::new(0.0).is_err());
        assert!(build_network(1, 0, 1, 1, &ChannelModel::default()).is_err());
    }

    #[test]
    fn network_shapes_and_determinism() {
        let model = ChannelModel::default();
        let net = build_network(11, 64, 4, 12, &model).unwrap();
        assert_eq!((net.subcarriers(), net.relays(), net.users()), (64, 4, 12));
        assert_eq!(net.a.len(), 64 * 4);
        assert_eq!(net.b.len(), 64 * 4 * 12);
        assert_eq!(net.c.len(), 64 * 4);
        assert_eq!(net, build_network(11, 64, 4, 12, &model).unwrap());
    }

    #[test]
    fn smaller_networks_are_sub_networks() {
        let model = ChannelModel::default();
        let big = build_network(5, 16, 4, 6, &model).unwrap();
        let small = build_network(5, 16, 2, 3, &model).unwrap();
        assert_eq!(big.sub_network(2, 3).unwrap(), small);
    }

    #[test]
    fn degenerate_network_is_single_link_slice() {
        let model = ChannelModel::default();
        let net = build_network(9, 8, 1, 1, &model).unwrap();
        let link = net.single_link(0, 0);
        assert_eq!(link.len(), 8);
        assert_eq!(NetworkChannels::from_single_link(&link).unwrap(), net);
    }

    #[test]
    fn channel_csv_has_one_row_per_gain() {
        let net = build_network(2, 8, 2, 3, &ChannelModel::default()).unwrap();
        let mut buf = Vec::new();
        net.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("link-type,i,j,k,gain\n"));
        assert_eq!(text.lines().count(), 1 + 8 * 2 * (3 + 2));
    }
}
