//! Invertible short-time Fourier transform.
//!
//! Periodic Hann window, hop of a quarter window (75% overlap), centered
//! framing: the signal is first zero-padded to the next power of two, then
//! half a window of zeros is added on each side. Frames are full complex DFTs
//! with the zero-frequency bin rotated to the center. A 960-sample waveform
//! with a 128-sample window gives 1024 / 32 + 1 = 33 frames.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fft;
use crate::ofdm::IqWaveform;
use crate::{Error, Result, C64};

/// Overlap-add weight sum of the squared periodic Hann window at hop N/4.
pub const HANN_SQUARED_OLA: f64 = 1.5;

/// Complex STFT values, `bins x frames`, frequency-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StftGrid {
    values: Vec<C64>,
    pub window_len: usize,
    pub hop: usize,
    pub pad: PadMeta,
}

/// Lengths needed to undo the zero padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadMeta {
    pub original_len: usize,
    pub padded_len: usize,
}

impl StftGrid {
    pub fn from_values(values: Vec<C64>, window_len: usize, hop: usize, pad: PadMeta) -> Result<Self> {
        let expected = window_len * frame_count(pad.padded_len, hop);
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        Ok(Self { values, window_len, hop, pad })
    }

    pub fn bins(&self) -> usize {
        self.window_len
    }

    pub fn frames(&self) -> usize {
        frame_count(self.pad.padded_len, self.hop)
    }

    pub fn get(&self, bin: usize, frame: usize) -> C64 {
        self.values[bin * self.frames() + frame]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn scaled(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }
}

/// Number of centered frames for a padded length and hop.
pub fn frame_count(padded_len: usize, hop: usize) -> usize {
    padded_len / hop + 1
}

/// Shape `(bins, frames)` produced for a waveform of `len` samples.
pub fn grid_shape(len: usize, window_len: usize) -> (usize, usize) {
    (window_len, frame_count(len.next_power_of_two(), window_len / 4))
}

/// Periodic Hann window.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len).map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos()).collect()
}

fn check_params(window_len: usize, hop: usize, padded_len: usize) -> Result<()> {
    if window_len < 4 || !window_len.is_power_of_two() {
        return Err(Error::InvalidStft(format!("window length {window_len} must be a power of two >= 4")));
    }
    if hop * 4 != window_len {
        return Err(Error::InvalidStft(format!("hop {hop} is not a quarter of window {window_len}")));
    }
    if !padded_len.is_multiple_of(hop) || padded_len < window_len {
        return Err(Error::InvalidStft(format!(
            "padded length {padded_len} incompatible with window {window_len}"
        )));
    }
    Ok(())
}

pub fn stft(waveform: &IqWaveform, window_len: usize) -> Result<StftGrid> {
    if waveform.is_empty() {
        return Err(Error::Empty("waveform"));
    }
    let padded_len = waveform.len().next_power_of_two();
    let hop = window_len / 4;
    check_params(window_len, hop, padded_len)?;
    let half = window_len / 2;
    let mut ext = vec![C64::new(0.0, 0.0); padded_len + window_len];
    ext[half..half + waveform.len()].copy_from_slice(waveform.samples());

    let window = hann(window_len);
    let frames = frame_count(padded_len, hop);
    let plan = fft::forward(window_len);
    let mut values = vec![C64::new(0.0, 0.0); window_len * frames];
    let mut buf = vec![C64::new(0.0, 0.0); window_len];
    for t in 0..frames {
        let seg = &ext[t * hop..t * hop + window_len];
        for ((b, s), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = s * w;
        }
        plan.process(&mut buf);
        fft::fftshift(&mut buf);
        for (bin, v) in buf.iter().enumerate() {
            values[bin * frames + t] = *v;
        }
    }
    Ok(StftGrid { values, window_len, hop, pad: PadMeta { original_len: waveform.len(), padded_len } })
}

/// Weighted overlap-add inverse; removes the padding recorded in the grid.
pub fn istft(grid: &StftGrid) -> Result<IqWaveform> {
    check_params(grid.window_len, grid.hop, grid.pad.padded_len)?;
    let n = grid.window_len;
    let frames = grid.frames();
    let window = hann(n);
    let plan = fft::inverse(n);
    let mut acc = vec![C64::new(0.0, 0.0); grid.pad.padded_len + n];
    let mut norm = vec![0.0; acc.len()];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for t in 0..frames {
        for (bin, b) in buf.iter_mut().enumerate() {
            *b = grid.values[bin * frames + t];
        }
        fft::ifftshift(&mut buf);
        plan.process(&mut buf);
        let start = t * grid.hop;
        for (i, (b, w)) in buf.iter().zip(&window).enumerate() {
            acc[start + i] += b * (w / n as f64);
            norm[start + i] += w * w;
        }
    }
    let half = n / 2;
    let out = acc[half..half + grid.pad.original_len]
        .iter()
        .zip(&norm[half..])
        .map(|(a, w)| a / *w)
        .collect();
    Ok(IqWaveform::new(out))
}
