//! Bit mapping and OFDM (de)modulation.

use super::{Allocation, IqWaveform, QamConstellation, ResourceGrid, WaveformSpec};
use crate::{fft, Error, Result, C64};

/// Map a bit sequence (values 0/1, MSB first per symbol) onto a resource grid,
/// filling row by row.
pub fn map_bits(
    bits: &[u8],
    constellation: &QamConstellation,
    allocation: &Allocation,
    n_symbols: usize,
) -> Result<ResourceGrid> {
    let k = constellation.bits_per_symbol();
    let n_sc = allocation.len();
    let expected = n_symbols * n_sc * k;
    if bits.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: bits.len() });
    }
    let symbols = bits
        .chunks_exact(k)
        .map(|group| {
            let label = group.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1));
            constellation.point(label)
        })
        .collect();
    ResourceGrid::from_rows(n_symbols, n_sc, symbols)
}

/// Hard-decision demapping back to bits.
pub fn demap_bits(grid: &ResourceGrid, constellation: &QamConstellation) -> Vec<u8> {
    let k = constellation.bits_per_symbol();
    let mut bits = Vec::with_capacity(grid.as_slice().len() * k);
    for &s in grid.as_slice() {
        let label = constellation.nearest_label(s);
        bits.extend((0..k).rev().map(|b| ((label >> b) & 1) as u8));
    }
    bits
}

/// OFDM modulation: occupied bins, unitary inverse DFT, cyclic prefix.
pub fn modulate(grid: &ResourceGrid, spec: &WaveformSpec) -> Result<IqWaveform> {
    let alloc = spec.allocation()?;
    check_grid(grid, spec, &alloc)?;
    let n = spec.symbol_len;
    let cp = spec.cp_len();
    let ifft = fft::inverse(n);
    let scale = (n as f64).sqrt().recip();
    let mut out = Vec::with_capacity(spec.waveform_len());
    let mut body = vec![C64::new(0.0, 0.0); n];
    for row in 0..spec.n_symbols {
        body.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (bin, &sym) in alloc.bins().zip(grid.row(row)) {
            body[bin] = sym;
        }
        ifft.process(&mut body);
        body.iter_mut().for_each(|v| *v *= scale);
        out.extend_from_slice(&body[n - cp..]);
        out.extend_from_slice(&body);
    }
    Ok(IqWaveform::new(out))
}

/// OFDM demodulation: strip prefixes, unitary forward DFT, select occupied
/// bins.
pub fn demodulate(waveform: &IqWaveform, spec: &WaveformSpec) -> Result<ResourceGrid> {
    if waveform.len() != spec.waveform_len() {
        return Err(Error::LengthMismatch { expected: spec.waveform_len(), actual: waveform.len() });
    }
    let alloc = spec.allocation()?;
    let n = spec.symbol_len;
    let cp = spec.cp_len();
    let fft = fft::forward(n);
    let scale = (n as f64).sqrt().recip();
    let mut grid = ResourceGrid::zeros(spec.n_symbols, alloc.len());
    let mut body = vec![C64::new(0.0, 0.0); n];
    for (row, block) in waveform.samples().chunks_exact(n + cp).enumerate() {
        body.copy_from_slice(&block[cp..]);
        fft.process(&mut body);
        for (dst, bin) in grid.row_mut(row).iter_mut().zip(alloc.bins()) {
            *dst = body[bin] * scale;
        }
    }
    Ok(grid)
}

fn check_grid(grid: &ResourceGrid, spec: &WaveformSpec, alloc: &Allocation) -> Result<()> {
    if grid.n_symbols() != spec.n_symbols || grid.n_subcarriers() != alloc.len() {
        return Err(Error::DimensionMismatch(format!(
            "grid is {}x{}, spec needs {}x{}",
            grid.n_symbols(),
            grid.n_subcarriers(),
            spec.n_symbols,
            alloc.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::AllocClass;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn all_zero_bits_map_to_label_zero() {
        let c = QamConstellation::new(4).unwrap();
        let a = Allocation::new(128, AllocClass::Small).unwrap();
        let g = map_bits(&vec![0; 6 * 19 * 2], &c, &a, 6).unwrap();
        assert!(g.as_slice().iter().all(|&s| s == c.point(0)));
    }

    #[test]
    fn grid_shape_and_bit_round_trip() {
        let c = QamConstellation::new(16).unwrap();
        let a = Allocation::new(128, AllocClass::Small).unwrap();
        let bits = random_bits(6 * 19 * 4, 1);
        let g = map_bits(&bits, &c, &a, 6).unwrap();
        assert_eq!((g.n_symbols(), g.n_subcarriers()), (6, 19));
        assert_eq!(demap_bits(&g, &c), bits);
        assert!(matches!(map_bits(&bits[1..], &c, &a, 6), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn modulated_length_and_cyclic_prefix() {
        let spec = WaveformSpec::new(128, AllocClass::Medium, 16, None);
        let c = spec.constellation().unwrap();
        let a = spec.allocation().unwrap();
        let bits = random_bits(6 * a.len() * 4, 2);
        let w = modulate(&map_bits(&bits, &c, &a, 6).unwrap(), &spec).unwrap();
        assert_eq!(w.len(), 960);
        for block in w.samples().chunks_exact(160) {
            assert_eq!(&block[..32], &block[128..]);
        }
    }

    #[test]
    fn single_subcarrier_is_complex_exponential() {
        let spec = WaveformSpec::new(128, AllocClass::Explicit(40), 4, None);
        let a = spec.allocation().unwrap();
        let col = a.offsets().iter().position(|&k| k == 5).unwrap();
        let mut g = ResourceGrid::zeros(6, a.len());
        g.row_mut(0)[col] = C64::new(1.0, 0.0);
        let w = modulate(&g, &spec).unwrap();
        let body = &w.samples()[32..160];
        for (t, s) in body.iter().enumerate() {
            let expect = C64::from_polar(1.0 / 128f64.sqrt(), 2.0 * std::f64::consts::PI * 5.0 * t as f64 / 128.0);
            assert!((s - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn zeros_demodulate_to_zeros() {
        let spec = WaveformSpec::new(256, AllocClass::Large, 64, None);
        let g = demodulate(&IqWaveform::zeros(1920), &spec).unwrap();
        assert!(g.as_slice().iter().all(|s| s.norm() == 0.0));
        assert!(matches!(demodulate(&IqWaveform::zeros(1919), &spec), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn modulate_rejects_wrong_grid() {
        let spec = WaveformSpec::new(256, AllocClass::Large, 64, None);
        assert!(matches!(modulate(&ResourceGrid::zeros(6, 10), &spec), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn parseval_time_power() {
        // Mean power of the symbol body equals |occupied| / symbol_len for
        // unit-power symbols.
        for (n, class) in [(128, AllocClass::Small), (256, AllocClass::Medium), (512, AllocClass::Large)] {
            let spec = WaveformSpec::new(n, class, 16, None);
            let c = spec.constellation().unwrap();
            let a = spec.allocation().unwrap();
            let mut acc = 0.0;
            let reps = 200;
            for seed in 0..reps {
                let bits = random_bits(6 * a.len() * 4, seed);
                let w = modulate(&map_bits(&bits, &c, &a, 6).unwrap(), &spec).unwrap();
                acc += w.mean_power();
            }
            let measured = acc / reps as f64;
            let expected = a.len() as f64 / n as f64;
            assert!((measured / expected - 1.0).abs() < 0.01, "{n}: {measured} vs {expected}");
        }
    }

    proptest! {
        #[test]
        fn modulate_demodulate_round_trip(seed in any::<u64>(), which in 0usize..3) {
            let n = [128, 256, 512][which];
            let spec = WaveformSpec::new(n, AllocClass::Large, 16, None);
            let a = spec.allocation().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let syms = (0..6 * a.len())
                .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let g = ResourceGrid::from_rows(6, a.len(), syms).unwrap();
            let back = demodulate(&modulate(&g, &spec).unwrap(), &spec).unwrap();
            prop_assert!(back.max_abs_diff(&g) < 1e-10);
        }
    }
}
