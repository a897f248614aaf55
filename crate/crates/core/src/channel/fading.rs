use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ChannelSpec, TapProfile};
use crate::ofdm::IqWaveform;
use crate::{Error, Result, C64};

/// Sinusoids per tap in the sum-of-sinusoids Doppler simulator.
pub const SINUSOIDS_PER_TAP: usize = 32;

/// Time-varying tap gains of one tapped-delay-line realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_samples: usize,
    offsets: Vec<usize>,
    /// Row-major: `gains[t * n_taps + k]`.
    gains: Vec<C64>,
}

impl ChannelRealization {
    /// Time-invariant channel with the given `(delay in samples, gain)` taps.
    pub fn new_static(taps: &[(usize, C64)], n_samples: usize) -> Self {
        let offsets = taps.iter().map(|t| t.0).collect();
        let row: Vec<C64> = taps.iter().map(|t| t.1).collect();
        let gains = row.iter().copied().cycle().take(row.len() * n_samples).collect();
        Self { n_samples, offsets, gains }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_taps(&self) -> usize {
        self.offsets.len()
    }

    pub fn tap_offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Gains of all taps at sample `t`.
    pub fn gains_at(&self, t: usize) -> &[C64] {
        let k = self.n_taps();
        &self.gains[t * k..(t + 1) * k]
    }

    /// Time series of one tap.
    pub fn tap_series(&self, tap: usize) -> impl Iterator<Item = C64> + '_ {
        self.gains.iter().skip(tap).step_by(self.n_taps()).copied()
    }

    /// Frequency response at sample `t` on the given subcarrier offsets of a
    /// `symbol_len`-point DFT: H[k] = Σ g_i exp(-j2π k d_i / N).
    pub fn freq_response_at(&self, t: usize, subcarriers: &[i32], symbol_len: usize) -> Vec<C64> {
        let gains = self.gains_at(t);
        subcarriers
            .iter()
            .map(|&k| {
                gains
                    .iter()
                    .zip(&self.offsets)
                    .map(|(g, &d)| g * C64::from_polar(1.0, -2.0 * PI * k as f64 * d as f64 / symbol_len as f64))
                    .sum()
            })
            .collect()
    }
}

/// Realize a fading channel for `n_samples` samples.
pub fn realize_channel<R: Rng + ?Sized>(spec: &ChannelSpec, n_samples: usize, rng: &mut R) -> Result<ChannelRealization> {
    spec.validate()?;
    let profile = TapProfile::for_profile(spec.profile);
    realize_taps(&profile, spec.max_doppler_hz, spec.sample_rate_hz, n_samples, rng)
}

/// Realize independent Rayleigh taps for an arbitrary delay profile.
///
/// Each tap is a Gaussian-weighted sum of sinusoids whose Doppler shifts are
/// `f_D cos(a)` with arrival angles `a` uniform on [0, 2π), giving the
/// classical Jakes spectrum (autocorrelation J0(2π f_D τ) in expectation) and
/// complex Gaussian marginals. Tap powers are normalized to unit total.
pub fn realize_taps<R: Rng + ?Sized>(
    profile: &TapProfile,
    max_doppler_hz: f64,
    sample_rate_hz: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if n_samples == 0 {
        return Err(Error::Empty("channel realization needs at least one sample"));
    }
    let powers = profile.normalized_powers();
    let offsets = profile.sample_offsets(sample_rate_hz);
    let n_taps = powers.len();
    let mut gains = vec![C64::new(0.0, 0.0); n_samples * n_taps];
    let mut phasors = [C64::new(0.0, 0.0); SINUSOIDS_PER_TAP];
    let mut steps = [C64::new(0.0, 0.0); SINUSOIDS_PER_TAP];
    for (tap, &power) in powers.iter().enumerate() {
        // CN(0, 1) weights: E|w|^2 = 1, so the tap power is `power`.
        let amp = (power / SINUSOIDS_PER_TAP as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        for (p, s) in phasors.iter_mut().zip(steps.iter_mut()) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let angle = rng.random::<f64>() * 2.0 * PI;
            let doppler = max_doppler_hz * angle.cos();
            *p = C64::new(re, im) * amp;
            *s = C64::from_polar(1.0, 2.0 * PI * doppler / sample_rate_hz);
        }
        for t in 0..n_samples {
            gains[t * n_taps + tap] = phasors.iter().sum();
            for (p, s) in phasors.iter_mut().zip(&steps) {
                *p *= s;
            }
        }
    }
    Ok(ChannelRealization { n_samples, offsets, gains })
}

/// Time-varying tapped-delay convolution, y[n] = Σ_k g_k[n] x[n - d_k].
/// The convolution tail is dropped so the output has the input length.
pub fn apply_channel(waveform: &IqWaveform, channel: &ChannelRealization) -> Result<IqWaveform> {
    if channel.n_samples() < waveform.len() {
        return Err(Error::LengthMismatch { expected: waveform.len(), actual: channel.n_samples() });
    }
    let x = waveform.samples();
    let out = (0..x.len())
        .map(|n| {
            channel
                .gains_at(n)
                .iter()
                .zip(channel.tap_offsets())
                .filter(|(_, &d)| d <= n)
                .map(|(g, &d)| g * x[n - d])
                .sum()
        })
        .collect();
    Ok(IqWaveform::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Profile;
    use crate::fft;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Bessel J0 by its power series; accurate for the small arguments used
    /// here.
    fn bessel_j0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= -(x * x / 4.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    fn rayleigh_cdf(r: f64, power: f64) -> f64 {
        1.0 - (-r * r / power).exp()
    }

    #[test]
    fn identity_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x: Vec<C64> = (0..100).map(|_| C64::new(rng.random(), rng.random())).collect();
        let w = IqWaveform::new(x);
        let ch = ChannelRealization::new_static(&[(0, C64::new(1.0, 0.0))], 100);
        assert_eq!(apply_channel(&w, &ch).unwrap(), w);
        let short = ChannelRealization::new_static(&[(0, C64::new(1.0, 0.0))], 99);
        assert!(matches!(apply_channel(&w, &short), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn static_two_tap_matches_convolution_theorem() {
        // Periodic input: one OFDM-like body preceded by a prefix longer than
        // the channel memory, so the body sees a circular convolution.
        let n = 64;
        let cp = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let body: Vec<C64> = (0..n).map(|_| C64::new(rng.random(), rng.random())).collect();
        let mut x = body[n - cp..].to_vec();
        x.extend_from_slice(&body);
        let taps = [(0, C64::new(0.8, 0.1)), (5, C64::new(-0.3, 0.4))];
        let ch = ChannelRealization::new_static(&taps, x.len());
        let y = apply_channel(&IqWaveform::new(x), &ch).unwrap();
        let mut y_body = y.samples()[cp..].to_vec();
        let mut x_body = body.clone();
        fft::forward(n).process(&mut y_body);
        fft::forward(n).process(&mut x_body);
        let bins: Vec<i32> = (0..n as i32).collect();
        let h = ch.freq_response_at(0, &bins, n);
        for k in 0..n {
            assert!((y_body[k] - x_body[k] * h[k]).norm() < 1e-8);
        }
    }

    #[test]
    fn rayleigh_marginal_ks() {
        // Ensemble of independent realizations, one sample each, so the KS
        // samples are independent.
        let profile = TapProfile::new(vec![0.0], vec![0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 20_000;
        let mut mags: Vec<f64> = (0..n)
            .map(|_| {
                let ch = realize_taps(&profile, 300.0, 7.68e6, 64, &mut rng).unwrap();
                ch.gains_at(63)[0].norm()
            })
            .collect();
        mags.sort_by(f64::total_cmp);
        let d = mags
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = rayleigh_cdf(r, 1.0);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        // alpha = 0.01 critical value
        let crit = 1.628 / (n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} >= {crit}");
    }

    #[test]
    fn jakes_autocorrelation() {
        let profile = TapProfile::new(vec![0.0], vec![0.0]).unwrap();
        let fs = 76_800.0;
        let fd = 300.0;
        let lags = [10usize, 30, 60];
        let n_real = 4000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut acc = vec![C64::new(0.0, 0.0); lags.len()];
        let mut p0 = 0.0;
        for _ in 0..n_real {
            let ch = realize_taps(&profile, fd, fs, 61, &mut rng).unwrap();
            let g0 = ch.gains_at(0)[0];
            p0 += g0.norm_sqr();
            for (a, &l) in acc.iter_mut().zip(&lags) {
                *a += ch.gains_at(l)[0] * g0.conj();
            }
        }
        for (a, &l) in acc.iter().zip(&lags) {
            let measured = a.re / p0;
            let expect = bessel_j0(2.0 * PI * fd * l as f64 / fs);
            assert!((measured - expect).abs() < 0.05 * expect.abs().max(0.2), "lag {l}: {measured} vs {expect}");
        }
    }

    #[test]
    fn near_zero_doppler_is_constant() {
        let profile = TapProfile::new(vec![0.0], vec![0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = realize_taps(&profile, 1e-9, 7.68e6, 4000, &mut rng).unwrap();
        let g0 = ch.gains_at(0)[0];
        assert!(ch.tap_series(0).all(|g| (g - g0).norm() < 1e-9));
    }

    #[test]
    fn average_power_is_preserved() {
        let spec = ChannelSpec::standard(Profile::Eva);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x: Vec<C64> = (0..160).map(|i| C64::from_polar(1.0, 0.37 * (i * i) as f64)).collect();
        let w = IqWaveform::new(x);
        let n = 4000;
        let mut ratio = 0.0;
        for _ in 0..n {
            let ch = realize_channel(&spec, w.len(), &mut rng).unwrap();
            ratio += apply_channel(&w, &ch).unwrap().mean_power() / w.mean_power();
        }
        ratio /= n as f64;
        // samples before a tap's delay see no input through it
        let taps = TapProfile::for_profile(Profile::Eva);
        let expected: f64 = taps
            .normalized_powers()
            .iter()
            .zip(taps.sample_offsets(spec.sample_rate_hz))
            .map(|(p, d)| p * (160 - d) as f64 / 160.0)
            .sum();
        assert!((ratio / expected - 1.0).abs() < 0.02, "{ratio} vs {expected}");
    }
}
