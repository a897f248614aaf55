use rayon::prelude::*;

use super::container::{Container, Header, Representation, StftMeta};
use super::generate::interleave;
use crate::ofdm::IqWaveform;
use crate::scaling::{scale, unscale, ScalingMode};
use crate::stft::{istft, stft, StftGrid};
use crate::{Error, Result, C64};

/// Decode a container into unscaled time-domain waveforms, inverting the
/// STFT when needed.
pub fn to_waveforms(container: &Container) -> Result<Vec<IqWaveform>> {
    let header = &container.header;
    let layout = header.layout()?;
    let values: Vec<f64> = container.payload.iter().map(|&v| f64::from(v)).collect();
    let values = match &header.scaling {
        Some(params) => unscale(&values, &layout, params)?,
        None => values,
    };
    let item_len = layout.item_len();
    match (header.representation, &header.stft) {
        (Representation::Raw, _) => Ok(values
            .chunks_exact(item_len)
            .map(|item| IqWaveform::new(item.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect()))
            .collect()),
        (Representation::Stft, Some(meta)) => values
            .par_chunks_exact(item_len)
            .map(|item| {
                let (re, im) = item.split_at(item_len / 2);
                let grid_values = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
                istft(&StftGrid::from_values(grid_values, meta.window_len, meta.hop, meta.pad)?)
            })
            .collect(),
        (Representation::Stft, None) => Err(Error::Representation("STFT container lacks STFT metadata".into())),
    }
}

/// Encode waveforms as a container in the requested representation,
/// optionally min-max scaled with statistics fitted on this set. The spec,
/// seed and count are taken from `template`.
pub fn from_waveforms(
    template: &Header,
    waveforms: &[IqWaveform],
    representation: Representation,
    scaling: Option<ScalingMode>,
) -> Result<Container> {
    let len = template.spec.waveform_len();
    if let Some(w) = waveforms.iter().find(|w| w.len() != len) {
        return Err(Error::LengthMismatch { expected: len, actual: w.len() });
    }
    let mut header = Header::raw(template.spec.clone(), waveforms.len(), template.seed);
    let values: Vec<f64> = match representation {
        Representation::Raw => {
            let mut out = Vec::with_capacity(2 * len * waveforms.len());
            for w in waveforms {
                out.extend(w.samples().iter().flat_map(|c| [c.re, c.im]));
            }
            out
        }
        Representation::Stft => {
            let window_len = template.spec.symbol_len;
            let grids: Vec<StftGrid> = waveforms.par_iter().map(|w| stft(w, window_len)).collect::<Result<_>>()?;
            let first = grids.first().ok_or(Error::Empty("waveform set"))?;
            header.representation = Representation::Stft;
            header.stft = Some(StftMeta {
                window_len,
                hop: first.hop,
                bins: first.bins(),
                frames: first.frames(),
                pad: first.pad,
            });
            let mut out = Vec::with_capacity(2 * first.values().len() * grids.len());
            for g in &grids {
                out.extend(g.values().iter().map(|c| c.re));
                out.extend(g.values().iter().map(|c| c.im));
            }
            out
        }
    };
    let layout = header.layout()?;
    let payload: Vec<f32> = match scaling {
        Some(mode) => {
            let (scaled, params) = scale(&values, &layout, mode, None)?;
            header.scaling = Some(params);
            scaled.iter().map(|&v| v as f32).collect()
        }
        None if representation == Representation::Raw => {
            let mut out = Vec::with_capacity(values.len());
            waveforms.iter().for_each(|w| interleave(w, &mut out));
            out
        }
        None => values.iter().map(|&v| v as f32).collect(),
    };
    Container::new(header, payload)
}

/// Re-encode a container in another representation and scaling.
pub fn convert(container: &Container, representation: Representation, scaling: Option<ScalingMode>) -> Result<Container> {
    from_waveforms(&container.header, &to_waveforms(container)?, representation, scaling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_dataset;
    use crate::ofdm::{AllocClass, WaveformSpec};

    fn raw(n: usize) -> Container {
        generate_dataset(&WaveformSpec::new(n, AllocClass::Medium, 16, Some(-25.0)), 8, 5).unwrap()
    }

    fn max_diff(a: &[IqWaveform], b: &[IqWaveform]) -> f64 {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.samples().iter().zip(y.samples()).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn raw_identity_without_scaling() {
        let c = raw(128);
        assert_eq!(convert(&c, Representation::Raw, None).unwrap(), c);
    }

    #[test]
    fn stft_round_trip_through_scaling() {
        for n in [128, 256] {
            let c = raw(n);
            let original = to_waveforms(&c).unwrap();
            for mode in [ScalingMode::Global, ScalingMode::Featurewise] {
                let s = convert(&c, Representation::Stft, Some(mode)).unwrap();
                let meta = s.header.stft.unwrap();
                assert_eq!((meta.bins, meta.frames), (n, 33));
                assert!(s.payload.iter().all(|v| (-1.0..=1.0).contains(v)));
                let back = convert(&s, Representation::Raw, None).unwrap();
                assert!(max_diff(&original, &to_waveforms(&back).unwrap()) < 1e-6);
            }
        }
    }

    #[test]
    fn scaled_raw_round_trip() {
        let c = raw(128);
        let s = convert(&c, Representation::Raw, Some(ScalingMode::Global)).unwrap();
        assert_eq!(s.header.scaling.as_ref().unwrap().mins.len(), 1);
        assert!(max_diff(&to_waveforms(&c).unwrap(), &to_waveforms(&s).unwrap()) < 1e-6);
    }

    #[test]
    fn wrong_length_rejected() {
        let c = raw(128);
        let bad = [IqWaveform::zeros(100)];
        assert!(matches!(
            from_waveforms(&c.header, &bad, Representation::Raw, None),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
