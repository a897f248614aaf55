use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dpss;
use crate::fft;
use crate::ofdm::IqWaveform;
use crate::{Error, Result, C64};

/// Time-bandwidth product of the multitaper estimator.
pub const MULTITAPER_NW: f64 = 4.0;
/// Number of Slepian tapers.
pub const MULTITAPER_K: usize = 7;
/// Floor applied to every PSD bin before taking logarithms.
pub const PSD_FLOOR: f64 = 1e-20;

/// Power spectral density on the centered grid f_d = -0.5 + k / nfft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psd {
    pub values: Vec<f64>,
}

impl Psd {
    pub fn nfft(&self) -> usize {
        self.values.len()
    }

    pub fn df(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// Normalized frequency of bin `k`.
    pub fn freq(&self, k: usize) -> f64 {
        -0.5 + k as f64 * self.df()
    }

    /// Riemann sum of the PSD over [-0.5, 0.5).
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.df()
    }
}

/// Thomson multitaper estimate over the full waveform, averaged over K
/// unit-energy tapers. For white noise of variance σ² the expected level is σ²
/// in every bin.
pub fn multitaper_psd(waveform: &IqWaveform) -> Result<Psd> {
    if waveform.is_empty() {
        return Err(Error::Empty("waveform"));
    }
    let n = waveform.len();
    let nfft = n.next_power_of_two();
    let tapers = dpss::cached(n, MULTITAPER_NW, MULTITAPER_K.min(n));
    let plan = fft::forward(nfft);
    let mut acc = vec![0.0; nfft];
    let mut buf = vec![C64::new(0.0, 0.0); nfft];
    for taper in tapers.iter() {
        for (b, (x, h)) in buf.iter_mut().zip(waveform.samples().iter().zip(taper)) {
            *b = x * h;
        }
        buf[n..].iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
        plan.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let k = tapers.len() as f64;
    acc.iter_mut().for_each(|a| *a = (*a / k).max(PSD_FLOOR));
    fft::fftshift(&mut acc);
    Ok(Psd { values: acc })
}

pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    assert!(n > 0);
    let mid = n / 2;
    let (_, &mut hi, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// Per-bin median of individual multitaper PSDs.
pub fn median_psd(waveforms: &[IqWaveform]) -> Result<Psd> {
    let first = waveforms.first().ok_or(Error::Empty("waveform set"))?;
    if let Some(w) = waveforms.iter().find(|w| w.len() != first.len()) {
        return Err(Error::LengthMismatch { expected: first.len(), actual: w.len() });
    }
    let psds: Vec<Psd> = waveforms.par_iter().map(multitaper_psd).collect::<Result<_>>()?;
    median_of(&psds)
}

/// Per-bin median of precomputed PSDs on the same grid.
pub fn median_of(psds: &[Psd]) -> Result<Psd> {
    let nfft = psds.first().ok_or(Error::Empty("psd set"))?.nfft();
    if psds.iter().any(|p| p.nfft() != nfft) {
        return Err(Error::GridMismatch("PSDs have different bin counts".into()));
    }
    let values = (0..nfft)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(psds.len()),
            |col, k| {
                col.clear();
                col.extend(psds.iter().map(|p| p.values[k]));
                median_in_place(col)
            },
        )
        .collect();
    Ok(Psd { values })
}

/// Geodesic distance between power spectra, natural log:
/// sqrt( Σ r_k² Δf − (Σ r_k Δf)² ) with r_k = ln(P_g[k] / P_t[k]).
pub fn psd_geodesic_distance(generated: &Psd, target: &Psd) -> Result<f64> {
    if generated.nfft() != target.nfft() {
        return Err(Error::GridMismatch(format!("{} vs {} bins", generated.nfft(), target.nfft())));
    }
    if generated.nfft() == 0 {
        return Err(Error::Empty("psd"));
    }
    let df = generated.df();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (g, t) in generated.values.iter().zip(&target.values) {
        if !(*g > 0.0 && *t > 0.0 && g.is_finite() && t.is_finite()) {
            return Err(Error::GridMismatch("PSD bins must be positive and finite".into()));
        }
        let r = (g / t).ln();
        sum += r * df;
        sum_sq += r * r * df;
    }
    Ok((sum_sq - sum * sum).max(0.0).sqrt())
}
