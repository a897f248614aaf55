//! AWGN calibrated to a target EVM.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{IqWaveform, WaveformSpec};
use crate::C64;

/// Per-complex-sample noise standard deviation that yields `target_evm_db`.
///
/// With unit-power constellations and unitary transforms the per-subcarrier
/// error power equals the per-sample noise variance, so the EVM in linear
/// units is the standard deviation itself.
pub fn calibrate_noise_sigma(target_evm_db: f64, _spec: &WaveformSpec) -> f64 {
    if target_evm_db == f64::NEG_INFINITY {
        return 0.0;
    }
    10f64.powf(target_evm_db / 20.0)
}

/// Noise level for an optional target (`None` means noiseless).
pub fn sigma_for(spec: &WaveformSpec) -> f64 {
    spec.target_evm_db.map_or(0.0, |db| calibrate_noise_sigma(db, spec))
}

/// Add circular complex Gaussian noise with variance `sigma^2` per sample.
pub fn add_awgn<R: Rng + ?Sized>(waveform: &IqWaveform, sigma: f64, rng: &mut R) -> IqWaveform {
    let mut out = waveform.clone();
    add_awgn_in_place(&mut out, sigma, rng);
    out
}

pub fn add_awgn_in_place<R: Rng + ?Sized>(waveform: &mut IqWaveform, sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    let per_dim = sigma * std::f64::consts::FRAC_1_SQRT_2;
    for s in waveform.samples_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += C64::new(re, im) * per_dim;
    }
}
