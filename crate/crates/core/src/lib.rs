//! Synthetic OFDM waveform datasets for training and evaluating generative
//! RF models.
//!
//! The crate is organised around the data path:
//!
//! * [`ofdm`] builds baseband OFDM waveforms (Gray-coded QAM, centered
//!   subcarrier allocation, cyclic prefix, calibrated AWGN, Zadoff-Chu pilot).
//! * [`channel`] realizes tapped-delay-line Rayleigh fading channels and
//!   provides pilot-based estimation, equalization and coherence bandwidth.
//! * [`stft`] and [`scaling`] give the invertible time-frequency
//!   representation and the min-max scaling used for model input.
//! * [`metrics`] computes the fidelity suite (multitaper PSD geodesic
//!   distance, EVM, constellation histograms, cyclic-prefix correlation).
//! * [`dataset`] holds the binary container, presets and parallel generation.

pub mod channel;
pub mod dataset;
mod fft;
mod error;
pub mod metrics;
pub mod ofdm;
pub mod rng;
pub mod scaling;
pub mod stft;

pub use error::{Error, Result};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;
