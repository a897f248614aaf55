//! Baseband OFDM waveform synthesis.
//!
//! Random bits are Gray-mapped to QAM symbols, placed on a centered block of
//! subcarriers (DC unused), converted to time domain with a unitary inverse
//! DFT, and prefixed with a cyclic prefix. AWGN is added at a level that
//! produces the requested EVM.

mod allocation;
mod constellation;
mod modem;
mod noise;
pub mod pilot;
mod waveform;

pub use allocation::{max_occupied, AllocClass, Allocation};
pub use constellation::QamConstellation;
pub use modem::{demap_bits, demodulate, map_bits, modulate};
pub use noise::{add_awgn, add_awgn_in_place, calibrate_noise_sigma, sigma_for};
pub use pilot::zadoff_chu_pilot;
pub use waveform::{IqWaveform, ResourceGrid, WaveformSpec};

use rand::Rng;

use crate::channel;
use crate::Result;

/// One synthesized waveform together with its ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedWaveform {
    pub waveform: IqWaveform,
    /// Transmitted symbols, pilot row included when enabled.
    pub grid: ResourceGrid,
    /// Bits drawn for every grid entry. When a pilot is enabled the bits of
    /// the pilot row are drawn but not transmitted.
    pub bits: Vec<u8>,
}

/// Synthesize one waveform. Draws, in order: bits, noise, channel.
///
/// With a channel configured, noise is added before the channel; otherwise
/// noise is added to the clean modulated signal.
pub fn generate_waveform<R: Rng + ?Sized>(spec: &WaveformSpec, rng: &mut R) -> Result<GeneratedWaveform> {
    spec.validate()?;
    let constellation = spec.constellation()?;
    let alloc = spec.allocation()?;
    let n_bits = spec.n_symbols * alloc.len() * constellation.bits_per_symbol();
    let bits: Vec<u8> = (0..n_bits).map(|_| u8::from(rng.random::<bool>())).collect();
    let mut grid = map_bits(&bits, &constellation, &alloc, spec.n_symbols)?;
    if spec.pilot_enabled {
        let pilot = zadoff_chu_pilot(alloc.len())?;
        grid.row_mut(spec.pilot_position).copy_from_slice(&pilot);
    }
    let mut waveform = modulate(&grid, spec)?;
    add_awgn_in_place(&mut waveform, sigma_for(spec), rng);
    if let Some(ch) = &spec.channel {
        let realization = channel::realize_channel(ch, waveform.len(), rng)?;
        waveform = channel::apply_channel(&waveform, &realization)?;
    }
    Ok(GeneratedWaveform { waveform, grid, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::evm_db;
    use crate::rng::derived_rng;

    #[test]
    fn noiseless_waveform_demodulates_exactly() {
        let spec = WaveformSpec::new(256, AllocClass::Medium, 16, None);
        let g = generate_waveform(&spec, &mut derived_rng(1, 0, 0)).unwrap();
        assert_eq!(g.waveform.len(), 1920);
        let rx = demodulate(&g.waveform, &spec).unwrap();
        let c = spec.constellation().unwrap();
        assert!(evm_db(&rx, &c).unwrap() < -100.0);
        assert_eq!(demap_bits(&rx, &c), g.bits);
    }

    #[test]
    fn reproducible_under_fixed_seed() {
        let spec = WaveformSpec::new(128, AllocClass::Small, 16, Some(-25.0));
        let a = generate_waveform(&spec, &mut derived_rng(9, 0, 4)).unwrap();
        let b = generate_waveform(&spec, &mut derived_rng(9, 0, 4)).unwrap();
        let c = generate_waveform(&spec, &mut derived_rng(9, 0, 5)).unwrap();
        assert_eq!(a.waveform, b.waveform);
        assert_ne!(a.waveform, c.waveform);
    }

    #[test]
    fn pilot_on_fourth_symbol() {
        let spec = WaveformSpec::new(512, AllocClass::Medium, 16, None).with_pilot();
        let g = generate_waveform(&spec, &mut derived_rng(3, 0, 0)).unwrap();
        let pilot = zadoff_chu_pilot(150).unwrap();
        assert_eq!(g.grid.row(3), pilot.as_slice());
        let rx = demodulate(&g.waveform, &spec).unwrap();
        for (a, b) in rx.row(3).iter().zip(&pilot) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn bits_are_balanced() {
        let spec = WaveformSpec::new(512, AllocClass::Large, 64, None);
        let g = generate_waveform(&spec, &mut derived_rng(2, 0, 0)).unwrap();
        let ones = g.bits.iter().filter(|&&b| b == 1).count() as f64;
        let n = g.bits.len() as f64;
        // 8100 bits; 4 standard deviations
        assert!((ones / n - 0.5).abs() < 4.0 * 0.5 / n.sqrt());
    }
}
