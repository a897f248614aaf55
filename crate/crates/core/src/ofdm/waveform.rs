use serde::{Deserialize, Serialize};

use super::{AllocClass, Allocation, QamConstellation};
use crate::channel::ChannelSpec;
use crate::{Error, Result, C64};

fn default_n_symbols() -> usize {
    6
}

fn default_cp_fraction() -> f64 {
    0.25
}

fn default_pilot_position() -> usize {
    3
}

/// Complete parameterization of one synthetic OFDM dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    /// OFDM symbol length (number of subcarriers): 128, 256 or 512.
    pub symbol_len: usize,
    #[serde(default = "default_n_symbols")]
    pub n_symbols: usize,
    #[serde(default = "default_cp_fraction")]
    pub cp_fraction: f64,
    pub alloc: AllocClass,
    pub mod_order: u32,
    /// Target EVM in dB; `None` generates noiseless waveforms.
    pub target_evm_db: Option<f64>,
    #[serde(default)]
    pub pilot_enabled: bool,
    /// Zero-based OFDM symbol index carrying the pilot.
    #[serde(default = "default_pilot_position")]
    pub pilot_position: usize,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    #[serde(default)]
    pub seed: u64,
}

impl WaveformSpec {
    /// Six symbols, 25% cyclic prefix, no pilot, no channel, seed 0.
    pub fn new(symbol_len: usize, alloc: AllocClass, mod_order: u32, target_evm_db: Option<f64>) -> Self {
        Self {
            symbol_len,
            n_symbols: default_n_symbols(),
            cp_fraction: default_cp_fraction(),
            alloc,
            mod_order,
            target_evm_db,
            pilot_enabled: false,
            pilot_position: default_pilot_position(),
            channel: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pilot(mut self) -> Self {
        self.pilot_enabled = true;
        self
    }

    pub fn with_channel(mut self, channel: ChannelSpec) -> Self {
        self.channel = Some(channel);
        self
    }

    pub fn cp_len(&self) -> usize {
        (self.cp_fraction * self.symbol_len as f64).round() as usize
    }

    /// Samples per OFDM symbol including the cyclic prefix.
    pub fn block_len(&self) -> usize {
        self.symbol_len + self.cp_len()
    }

    /// Total waveform length in samples.
    pub fn waveform_len(&self) -> usize {
        self.n_symbols * self.block_len()
    }

    pub fn allocation(&self) -> Result<Allocation> {
        Allocation::new(self.symbol_len, self.alloc)
    }

    pub fn constellation(&self) -> Result<QamConstellation> {
        QamConstellation::new(self.mod_order)
    }

    /// Rows of the resource grid that carry data (all rows except the pilot).
    pub fn data_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_symbols).filter(move |&r| !(self.pilot_enabled && r == self.pilot_position))
    }

    pub fn validate(&self) -> Result<()> {
        let alloc = self.allocation()?;
        QamConstellation::new(self.mod_order)?;
        if self.n_symbols == 0 {
            return Err(Error::InvalidSpec("n_symbols must be positive".into()));
        }
        let cp = self.cp_fraction * self.symbol_len as f64;
        if !(0.0..1.0).contains(&self.cp_fraction) || (cp - cp.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "cp_fraction {} does not give an integer prefix for symbol length {}",
                self.cp_fraction, self.symbol_len
            )));
        }
        if let Some(evm) = self.target_evm_db {
            if evm.is_nan() || evm >= 0.0 {
                return Err(Error::InvalidSpec(format!("target EVM must be negative dB, got {evm}")));
            }
        }
        if self.pilot_enabled {
            if self.pilot_position >= self.n_symbols {
                return Err(Error::InvalidSpec(format!(
                    "pilot position {} outside {} symbols",
                    self.pilot_position, self.n_symbols
                )));
            }
            if alloc.len() < super::pilot::MIN_ZC_SUBCARRIERS {
                return Err(Error::PilotTooShort { min: super::pilot::MIN_ZC_SUBCARRIERS, actual: alloc.len() });
            }
        }
        if let Some(ch) = &self.channel {
            ch.validate()?;
        }
        Ok(())
    }
}

/// Complex baseband I/Q time series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IqWaveform {
    samples: Vec<C64>,
}

impl IqWaveform {
    pub fn new(samples: Vec<C64>) -> Self {
        Self { samples }
    }

    pub fn zeros(len: usize) -> Self {
        Self { samples: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

impl From<Vec<C64>> for IqWaveform {
    fn from(samples: Vec<C64>) -> Self {
        Self { samples }
    }
}

/// QAM symbols indexed by (OFDM symbol, occupied subcarrier). Columns follow
/// the allocation's increasing-frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    n_symbols: usize,
    n_subcarriers: usize,
    symbols: Vec<C64>,
}

impl ResourceGrid {
    pub fn zeros(n_symbols: usize, n_subcarriers: usize) -> Self {
        Self { n_symbols, n_subcarriers, symbols: vec![C64::new(0.0, 0.0); n_symbols * n_subcarriers] }
    }

    pub fn from_rows(n_symbols: usize, n_subcarriers: usize, symbols: Vec<C64>) -> Result<Self> {
        if symbols.len() != n_symbols * n_subcarriers {
            return Err(Error::LengthMismatch { expected: n_symbols * n_subcarriers, actual: symbols.len() });
        }
        Ok(Self { n_symbols, n_subcarriers, symbols })
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn row(&self, symbol: usize) -> &[C64] {
        &self.symbols[symbol * self.n_subcarriers..(symbol + 1) * self.n_subcarriers]
    }

    pub fn row_mut(&mut self, symbol: usize) -> &mut [C64] {
        &mut self.symbols[symbol * self.n_subcarriers..(symbol + 1) * self.n_subcarriers]
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> C64 {
        self.symbols[symbol * self.n_subcarriers + subcarrier]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.symbols
    }

    pub fn max_abs_diff(&self, other: &ResourceGrid) -> f64 {
        self.symbols.iter().zip(&other.symbols).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
