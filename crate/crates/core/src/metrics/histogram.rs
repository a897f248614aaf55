use serde::{Deserialize, Serialize};

use crate::C64;

/// Bins per axis of the constellation histogram.
pub const HIST_BINS: usize = 150;
/// Half-width of the square histogram region.
pub const HIST_EXTENT: f64 = 1.5;

/// 2-D histogram of symbols over [-1.5, 1.5]² with 150 x 150 bins. Symbols
/// outside the region are not binned; they are counted in `dropped`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationHistogram {
    /// `counts[i_bin * 150 + q_bin]`.
    pub counts: Vec<u64>,
    pub dropped: u64,
}

impl Default for ConstellationHistogram {
    fn default() -> Self {
        Self { counts: vec![0; HIST_BINS * HIST_BINS], dropped: 0 }
    }
}

/// Bin index of a coordinate; the upper edge belongs to the last bin.
pub fn bin_of(v: f64) -> Option<usize> {
    if !(-HIST_EXTENT..=HIST_EXTENT).contains(&v) {
        return None;
    }
    Some((((v + HIST_EXTENT) * HIST_BINS as f64 / (2.0 * HIST_EXTENT)).floor() as usize).min(HIST_BINS - 1))
}

/// Center coordinate of bin `i`.
pub fn bin_center(i: usize) -> f64 {
    let width = 2.0 * HIST_EXTENT / HIST_BINS as f64;
    -HIST_EXTENT + (i as f64 + 0.5) * width
}

impl ConstellationHistogram {
    pub fn add(&mut self, s: C64) {
        match (bin_of(s.re), bin_of(s.im)) {
            (Some(i), Some(q)) => self.counts[i * HIST_BINS + q] += 1,
            _ => self.dropped += 1,
        }
    }

    pub fn extend<'a>(&mut self, symbols: impl IntoIterator<Item = &'a C64>) {
        symbols.into_iter().for_each(|&s| self.add(s));
    }

    pub fn merge(&mut self, other: &ConstellationHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.dropped += other.dropped;
    }

    pub fn get(&self, i_bin: usize, q_bin: usize) -> u64 {
        self.counts[i_bin * HIST_BINS + q_bin]
    }

    pub fn binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// Histogram of all symbols in a set.
pub fn constellation_histogram<'a>(symbols: impl IntoIterator<Item = &'a C64>) -> ConstellationHistogram {
    let mut h = ConstellationHistogram::default();
    h.extend(symbols);
    h
}
