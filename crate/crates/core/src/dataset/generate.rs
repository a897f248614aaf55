use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;

use super::container::{Container, ContainerWriter, Header};
use crate::ofdm::{generate_waveform, IqWaveform, WaveformSpec};
use crate::rng::{derived_rng, WAVEFORM_SALT};
use crate::{Error, Result};

/// Waveforms generated per parallel batch before being written in order.
pub const CHUNK_SIZE: usize = 1024;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "OFDMGAN_THREADS";

/// Build a thread pool sized by [`THREADS_ENV`], if set.
pub fn thread_pool_from_env() -> Result<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidSpec(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidSpec(e.to_string()))
}

fn salt(spec: &WaveformSpec) -> u64 {
    WAVEFORM_SALT ^ spec.channel.map_or(0, |c| c.seed)
}

/// Waveform `index` of the dataset `(spec, seed)`.
pub fn dataset_waveform(spec: &WaveformSpec, seed: u64, index: u64) -> Result<IqWaveform> {
    Ok(generate_waveform(spec, &mut derived_rng(seed, salt(spec), index))?.waveform)
}

/// Generate a range of dataset waveforms in parallel, in index order.
pub fn generate_waveforms(spec: &WaveformSpec, seed: u64, indices: Range<u64>) -> Result<Vec<IqWaveform>> {
    spec.validate()?;
    indices.into_par_iter().map(|i| dataset_waveform(spec, seed, i)).collect()
}

pub(crate) fn interleave(w: &IqWaveform, out: &mut Vec<f32>) {
    out.extend(w.samples().iter().flat_map(|c| [c.re as f32, c.im as f32]));
}

fn header_for(spec: &WaveformSpec, count: usize, seed: u64) -> Result<Header> {
    if count == 0 {
        return Err(Error::InvalidSpec("count must be positive".into()));
    }
    let mut spec = spec.clone();
    spec.seed = seed;
    spec.validate()?;
    Ok(Header::raw(spec, count, seed))
}

/// Generate an unscaled raw dataset in memory.
pub fn generate_dataset(spec: &WaveformSpec, count: usize, seed: u64) -> Result<Container> {
    let header = header_for(spec, count, seed)?;
    let mut payload = Vec::with_capacity(header.payload_len()?);
    for w in generate_waveforms(spec, seed, 0..count as u64)? {
        interleave(&w, &mut payload);
    }
    Container::new(header, payload)
}

/// Generate a raw dataset straight to disk in chunks of [`CHUNK_SIZE`];
/// memory use does not grow with `count`. The bytes written equal those of
/// [`generate_dataset`] followed by [`Container::write_to`].
pub fn generate_to_file(spec: &WaveformSpec, count: usize, seed: u64, path: &Path) -> Result<Header> {
    let header = header_for(spec, count, seed)?;
    let mut writer = ContainerWriter::create(path, &header)?;
    let mut buf = Vec::new();
    for start in (0..count).step_by(CHUNK_SIZE) {
        let end = (start + CHUNK_SIZE).min(count);
        buf.clear();
        for w in generate_waveforms(spec, seed, start as u64..end as u64)? {
            interleave(&w, &mut buf);
        }
        writer.write_items(&buf)?;
    }
    writer.finish()?;
    Ok(header)
}
