//! Pilot-based channel estimation, zero-forcing equalization and coherence
//! bandwidth.

use crate::ofdm::ResourceGrid;
use crate::{Error, Result, C64};

/// Equalizer floor: coefficients below this magnitude are not inverted.
pub const H_MAGNITUDE_FLOOR: f64 = 1e-12;

/// Channel frequency response on the occupied subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqResponse {
    values: Vec<C64>,
    /// Signed subcarrier offsets, increasing.
    offsets: Vec<i32>,
}

impl FreqResponse {
    /// Response on consecutive subcarriers `0..values.len()`.
    pub fn contiguous(values: Vec<C64>) -> Self {
        let offsets = (0..values.len() as i32).collect();
        Self { values, offsets }
    }

    pub fn with_offsets(values: Vec<C64>, offsets: Vec<i32>) -> Result<Self> {
        if values.len() != offsets.len() {
            return Err(Error::LengthMismatch { expected: values.len(), actual: offsets.len() });
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("subcarrier offsets must be increasing".into()));
        }
        Ok(Self { values, offsets })
    }

    /// Attach the real subcarrier positions (e.g. an allocation with its DC
    /// gap).
    pub fn on_offsets(self, offsets: &[i32]) -> Result<Self> {
        Self::with_offsets(self.values, offsets.to_vec())
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Least-squares estimate H[k] = Y[k] / P[k] from a demodulated pilot.
pub fn estimate_freq_response(demod_pilot: &[C64], known_pilot: &[C64]) -> Result<FreqResponse> {
    if demod_pilot.len() != known_pilot.len() {
        return Err(Error::LengthMismatch { expected: known_pilot.len(), actual: demod_pilot.len() });
    }
    if let Some(k) = known_pilot.iter().position(|p| p.norm_sqr() == 0.0) {
        return Err(Error::ZeroPilot(k));
    }
    Ok(FreqResponse::contiguous(demod_pilot.iter().zip(known_pilot).map(|(y, p)| y / p).collect()))
}

/// Result of equalizing a grid.
#[derive(Debug, Clone)]
pub struct Equalized {
    pub grid: ResourceGrid,
    /// Columns whose coefficient fell below [`H_MAGNITUDE_FLOOR`]; they are
    /// left unequalized.
    pub flagged: Vec<usize>,
}

/// One-tap zero-forcing equalization of every OFDM symbol.
pub fn equalize(grid: &ResourceGrid, h: &FreqResponse) -> Result<Equalized> {
    if grid.n_subcarriers() != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "grid has {} subcarriers, response has {}",
            grid.n_subcarriers(),
            h.len()
        )));
    }
    let flagged: Vec<usize> = (0..h.len()).filter(|&k| h.values[k].norm() < H_MAGNITUDE_FLOOR).collect();
    let mut out = grid.clone();
    for row in 0..out.n_symbols() {
        for (k, (v, hk)) in out.row_mut(row).iter_mut().zip(&h.values).enumerate() {
            if !flagged.contains(&k) {
                *v /= hk;
            }
        }
    }
    Ok(Equalized { grid: out, flagged })
}

/// Normalized frequency autocorrelation magnitude |R(l)| / |R(0)| for lags
/// `0..=max_lag` (in subcarriers). Each lag averages over the subcarrier
/// pairs actually present at that spacing, so gaps such as DC are skipped.
pub fn freq_autocorrelation(h: &FreqResponse, max_lag: usize) -> Vec<f64> {
    let Some((&lo, &hi)) = h.offsets.first().zip(h.offsets.last()) else {
        return Vec::new();
    };
    let span = (hi - lo) as usize + 1;
    let mut dense = vec![None; span];
    for (&k, &v) in h.offsets.iter().zip(&h.values) {
        dense[(k - lo) as usize] = Some(v);
    }
    let mut r: Vec<f64> = (0..=max_lag.min(span - 1))
        .map(|lag| {
            let (sum, count) = dense[lag..]
                .iter()
                .zip(&dense)
                .filter_map(|(a, b)| Some(a.as_ref()? * b.as_ref()?.conj()))
                .fold((C64::new(0.0, 0.0), 0usize), |(s, c), v| (s + v, c + 1));
            if count == 0 {
                f64::NAN
            } else {
                sum.norm() / count as f64
            }
        })
        .collect();
    let r0 = r[0];
    r.iter_mut().for_each(|v| *v /= r0);
    r
}

/// Half-width at half-maximum of |R(l)| in subcarriers, linearly
/// interpolated. Every lag of the occupied span is searched; `None` means no
/// crossing.
pub fn half_max_lag(h: &FreqResponse) -> Option<f64> {
    let r = freq_autocorrelation(h, usize::MAX);
    if r.first().is_none_or(|r0| !r0.is_finite()) {
        return None;
    }
    let mut prev = r[0];
    for (lag, &cur) in r.iter().enumerate().skip(1) {
        if !cur.is_finite() {
            continue;
        }
        if cur <= 0.5 {
            return Some((lag - 1) as f64 + (prev - 0.5) / (prev - cur));
        }
        prev = cur;
    }
    None
}

/// Coherence bandwidth in Hz. Returns the full occupied bandwidth
/// (`len · spacing`) when the correlation never falls to half maximum.
pub fn coherence_bandwidth(h: &FreqResponse, subcarrier_spacing_hz: f64) -> f64 {
    match half_max_lag(h) {
        Some(lag) => lag * subcarrier_spacing_hz,
        None => h.len() as f64 * subcarrier_spacing_hz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn estimate_trivial_cases() {
        let p: Vec<C64> = (0..40).map(|i| C64::from_polar(1.0, 0.1 * i as f64)).collect();
        let h = estimate_freq_response(&p, &p).unwrap();
        assert!(h.values().iter().all(|v| (v - 1.0).norm() < 1e-15));
        let y: Vec<C64> = p.iter().map(|v| v * C64::new(0.0, 2.0)).collect();
        let h = estimate_freq_response(&y, &p).unwrap();
        assert!(h.values().iter().all(|v| (v - C64::new(0.0, 2.0)).norm() < 1e-14));
        let mut z = p.clone();
        z[7] = C64::new(0.0, 0.0);
        assert!(matches!(estimate_freq_response(&p, &z), Err(Error::ZeroPilot(7))));
        assert!(estimate_freq_response(&p[1..], &p).is_err());
    }

    #[test]
    fn equalize_flat() {
        let g = ResourceGrid::from_rows(2, 3, (0..6).map(|i| C64::new(i as f64, 1.0)).collect()).unwrap();
        let same = equalize(&g, &FreqResponse::contiguous(vec![C64::new(1.0, 0.0); 3])).unwrap();
        assert_eq!(same.grid, g);
        let gain = C64::new(0.5, -2.0);
        let eq = equalize(&g, &FreqResponse::contiguous(vec![gain; 3])).unwrap();
        for (a, b) in eq.grid.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b / gain).norm() < 1e-15);
        }
        let flagged = equalize(&g, &FreqResponse::contiguous(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), gain]))
            .unwrap();
        assert_eq!(flagged.flagged, [1]);
        assert_eq!(flagged.grid.get(0, 1), g.get(0, 1));
        assert!(equalize(&g, &FreqResponse::contiguous(vec![gain; 4])).is_err());
    }

    #[test]
    fn flat_channel_has_no_crossing() {
        let h = FreqResponse::contiguous(vec![C64::new(0.3, 0.2); 150]);
        assert_eq!(half_max_lag(&h), None);
        assert_eq!(coherence_bandwidth(&h, 15e3), 150.0 * 15e3);
    }

    /// Two equal-power taps in quadrature, separated by `tau`: the
    /// autocorrelation magnitude is |cos(π Δf τ)|, which crosses 1/2 at
    /// Δf = 1/(3τ).
    fn two_tap(n: usize, tau: f64, spacing: f64) -> FreqResponse {
        let offsets: Vec<i32> = (0..n as i32).map(|k| k - n as i32 / 2).collect();
        let values = offsets
            .iter()
            .map(|&k| C64::new(1.0, 0.0) + C64::new(0.0, 1.0) * C64::from_polar(1.0, -2.0 * PI * k as f64 * spacing * tau))
            .collect();
        FreqResponse::with_offsets(values, offsets).unwrap()
    }

    #[test]
    fn two_tap_oracle() {
        let spacing = 15e3;
        for tau in [0.5e-6, 1e-6, 2e-6] {
            let est = coherence_bandwidth(&two_tap(300, tau, spacing), spacing);
            let oracle = 1.0 / (3.0 * tau);
            assert!((est / oracle - 1.0).abs() < 0.05, "tau {tau}: {est} vs {oracle}");
        }
    }

    #[test]
    fn dc_gap_is_respected() {
        // Same channel sampled with and without the DC subcarrier gives the
        // same half-width.
        let spacing = 15e3;
        let full = two_tap(301, 1e-6, spacing);
        let (vals, offs): (Vec<C64>, Vec<i32>) =
            full.values().iter().zip(full.offsets()).filter(|(_, &k)| k != 0).map(|(v, k)| (*v, *k)).unzip();
        let gapped = FreqResponse::with_offsets(vals, offs).unwrap();
        let a = half_max_lag(&full).unwrap();
        let b = half_max_lag(&gapped).unwrap();
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }
}
