//! Cyclic-prefix cross-correlation.
//!
//! Each prefix is correlated against the waveform with every prefix removed.
//! Correlation is energy normalized per lag,
//! |Σ w[m+n] c*[n]| / (‖c‖ · ‖w[m..m+L]‖), so an exact copy scores 1. Lags
//! are reported relative to the first body sample of the prefix's own OFDM
//! symbol; a faithful prefix peaks at lag `symbol_len - cp_len`, where the
//! symbol tail it was copied from begins.

use serde::{Deserialize, Serialize};

use super::psd::median_in_place;
use crate::fft;
use crate::ofdm::{IqWaveform, WaveformSpec};
use crate::{Error, Result, C64};

/// Correlation of every prefix of one waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct CpCorrelation {
    symbol_len: usize,
    /// `curves[i][m]` for raw lag `m` into the stripped waveform.
    curves: Vec<Vec<f64>>,
    /// Maximum of each prefix's curve.
    pub prefix_max: Vec<f64>,
    /// Raw-lag position of each maximum, relative to the prefix's symbol.
    pub prefix_peak_lag: Vec<i64>,
}

impl CpCorrelation {
    /// Largest correlation over all prefixes.
    pub fn max(&self) -> f64 {
        self.prefix_max.iter().copied().fold(0.0, f64::max)
    }

    /// Correlation of prefix `i` at lag relative to its symbol start, if that
    /// lag falls inside the stripped waveform.
    pub fn at(&self, prefix: usize, lag: i64) -> Option<f64> {
        let m = lag + (prefix * self.symbol_len) as i64;
        usize::try_from(m).ok().and_then(|m| self.curves[prefix].get(m).copied())
    }

    pub fn n_prefixes(&self) -> usize {
        self.curves.len()
    }
}

/// Correlation profile as a function of symbol-relative lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpProfile {
    pub lags: Vec<i64>,
    pub values: Vec<f64>,
}

impl CpProfile {
    /// Lag of the largest value.
    pub fn peak_lag(&self) -> i64 {
        let i = (0..self.values.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b])).unwrap_or(0);
        self.lags[i]
    }

    pub fn value_at(&self, lag: i64) -> Option<f64> {
        let first = *self.lags.first()?;
        usize::try_from(lag - first).ok().and_then(|i| self.values.get(i).copied())
    }
}

/// Lag at which a faithful prefix correlates perfectly with its symbol.
pub fn expected_peak_lag(spec: &WaveformSpec) -> i64 {
    (spec.symbol_len - spec.cp_len()) as i64
}

pub fn cp_crosscorr(waveform: &IqWaveform, spec: &WaveformSpec) -> Result<CpCorrelation> {
    if waveform.len() != spec.waveform_len() {
        return Err(Error::LengthMismatch { expected: spec.waveform_len(), actual: waveform.len() });
    }
    let n = spec.symbol_len;
    let cp = spec.cp_len();
    if cp == 0 {
        return Err(Error::InvalidSpec("waveform has no cyclic prefix".into()));
    }
    let blocks: Vec<&[C64]> = waveform.samples().chunks_exact(n + cp).collect();
    let stripped: Vec<C64> = blocks.iter().flat_map(|b| b[cp..].iter().copied()).collect();
    let len = stripped.len();
    let n_lags = len - cp + 1;

    // sliding window energy of the stripped waveform
    let mut cumulative = Vec::with_capacity(len + 1);
    cumulative.push(0.0);
    for s in &stripped {
        cumulative.push(cumulative.last().unwrap() + s.norm_sqr());
    }
    let window_energy: Vec<f64> = (0..n_lags).map(|m| (cumulative[m + cp] - cumulative[m]).max(0.0)).collect();

    let nfft = (len + cp).next_power_of_two();
    let fwd = fft::forward(nfft);
    let inv = fft::inverse(nfft);
    let mut w_spec = stripped.clone();
    w_spec.resize(nfft, C64::new(0.0, 0.0));
    fwd.process(&mut w_spec);

    let mut curves = Vec::with_capacity(blocks.len());
    let mut prefix_max = Vec::with_capacity(blocks.len());
    let mut prefix_peak_lag = Vec::with_capacity(blocks.len());
    let mut buf = vec![C64::new(0.0, 0.0); nfft];
    for (i, block) in blocks.iter().enumerate() {
        let prefix = &block[..cp];
        let prefix_energy: f64 = prefix.iter().map(|c| c.norm_sqr()).sum();
        buf.iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
        buf[..cp].copy_from_slice(prefix);
        fwd.process(&mut buf);
        for (b, w) in buf.iter_mut().zip(&w_spec) {
            *b = w * b.conj();
        }
        inv.process(&mut buf);
        let curve: Vec<f64> = (0..n_lags)
            .map(|m| {
                let denom = (prefix_energy * window_energy[m]).sqrt();
                if denom > 0.0 {
                    (buf[m].norm() / nfft as f64 / denom).min(1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let (peak, &best) = curve
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one lag");
        prefix_max.push(best);
        prefix_peak_lag.push(peak as i64 - (i * n) as i64);
        curves.push(curve);
    }
    Ok(CpCorrelation { symbol_len: n, curves, prefix_max, prefix_peak_lag })
}

/// Median over every prefix of every waveform at each symbol-relative lag.
/// The lag axis spans all lags reachable by any prefix.
pub fn median_profile(correlations: &[CpCorrelation], spec: &WaveformSpec) -> Result<CpProfile> {
    if correlations.is_empty() {
        return Err(Error::Empty("correlation set"));
    }
    let n = spec.symbol_len as i64;
    let n_sym = spec.n_symbols as i64;
    let cp = spec.cp_len() as i64;
    let lags: Vec<i64> = (-(n_sym - 1) * n..=n_sym * n - cp).collect();
    let mut column = Vec::new();
    let values = lags
        .iter()
        .map(|&lag| {
            column.clear();
            for c in correlations {
                column.extend((0..c.n_prefixes()).filter_map(|i| c.at(i, lag)));
            }
            if column.is_empty() {
                0.0
            } else {
                median_in_place(&mut column)
            }
        })
        .collect();
    Ok(CpProfile { lags, values })
}

/// Median of per-waveform maxima.
pub fn median_max(correlations: &[CpCorrelation]) -> Result<f64> {
    if correlations.is_empty() {
        return Err(Error::Empty("correlation set"));
    }
    let mut maxima: Vec<f64> = correlations.iter().map(CpCorrelation::max).collect();
    Ok(median_in_place(&mut maxima))
}

/// Relative error in percent between two median maxima.
pub fn relerr_pct(r_gen: f64, r_target: f64) -> Result<f64> {
    if r_target == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((r_gen - r_target).abs() / r_target.abs() * 100.0)
}

/// Relative error of the median per-waveform maximum correlation.
pub fn cp_relerr(gen_set: &[CpCorrelation], target_set: &[CpCorrelation]) -> Result<f64> {
    relerr_pct(median_max(gen_set)?, median_max(target_set)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::{add_awgn, generate_waveform, AllocClass};
    use crate::rng::derived_rng;

    /// Direct O(N·L) evaluation of the normalized correlation.
    fn direct(waveform: &IqWaveform, spec: &WaveformSpec, prefix: usize, m: usize) -> f64 {
        let n = spec.symbol_len;
        let cp = spec.cp_len();
        let blocks: Vec<&[C64]> = waveform.samples().chunks_exact(n + cp).collect();
        let stripped: Vec<C64> = blocks.iter().flat_map(|b| b[cp..].iter().copied()).collect();
        let c = &blocks[prefix][..cp];
        let w = &stripped[m..m + cp];
        let num: C64 = w.iter().zip(c).map(|(a, b)| a * b.conj()).sum();
        let ec: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        let ew: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        num.norm() / (ec * ew).sqrt()
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        let spec = WaveformSpec::new(128, AllocClass::Medium, 16, Some(-25.0));
        let w = generate_waveform(&spec, &mut derived_rng(1, 0, 0)).unwrap().waveform;
        let c = cp_crosscorr(&w, &spec).unwrap();
        for prefix in [0, 3, 5] {
            for m in [0usize, 96, 100, 500, 735] {
                let lag = m as i64 - (prefix * 128) as i64;
                assert!((c.at(prefix, lag).unwrap() - direct(&w, &spec, prefix, m)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_prefix_peaks_at_symbol_tail() {
        let spec = WaveformSpec::new(256, AllocClass::Medium, 16, None);
        let w = generate_waveform(&spec, &mut derived_rng(2, 0, 0)).unwrap().waveform;
        let c = cp_crosscorr(&w, &spec).unwrap();
        assert_eq!(c.n_prefixes(), 6);
        for (peak, max) in c.prefix_peak_lag.iter().zip(&c.prefix_max) {
            assert_eq!(*peak, expected_peak_lag(&spec));
            assert!((max - 1.0).abs() < 1e-9);
        }
        let profile = median_profile(&[c], &spec).unwrap();
        assert_eq!(profile.peak_lag(), 192);
    }

    #[test]
    fn white_noise_correlates_weakly() {
        for n in [128usize, 256] {
            let spec = WaveformSpec::new(n, AllocClass::Medium, 16, None);
            let l = spec.cp_len() as f64;
            let mut rng = derived_rng(3, 0, n as u64);
            let mut maxima: Vec<f64> = (0..200)
                .flat_map(|_| {
                    let w = add_awgn(&IqWaveform::zeros(spec.waveform_len()), 1.0, &mut rng);
                    cp_crosscorr(&w, &spec).unwrap().prefix_max
                })
                .collect();
            let median = median_in_place(&mut maxima);
            assert!(median < 3.0 / l.sqrt(), "{n}: {median}");
        }
    }

    #[test]
    fn relerr_arithmetic() {
        assert!((relerr_pct(0.9, 1.0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(relerr_pct(0.5, 0.5).unwrap(), 0.0);
        assert!(matches!(relerr_pct(0.5, 0.0), Err(Error::ZeroReference)));
    }

    #[test]
    fn identical_sets_have_zero_error() {
        let spec = WaveformSpec::new(128, AllocClass::Small, 16, Some(-25.0));
        let set: Vec<CpCorrelation> = (0..9)
            .map(|i| cp_crosscorr(&generate_waveform(&spec, &mut derived_rng(4, 0, i)).unwrap().waveform, &spec).unwrap())
            .collect();
        assert_eq!(cp_relerr(&set, &set).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        let spec = WaveformSpec::new(128, AllocClass::Small, 16, None);
        assert!(cp_crosscorr(&IqWaveform::zeros(959), &spec).is_err());
    }
}
