//! Tapped-delay-line Rayleigh fading channels (EPA, EVA, ETU) and the
//! receiver-side processing used to evaluate them.

mod estimation;
mod fading;
mod profile;

pub use estimation::{
    coherence_bandwidth, equalize, estimate_freq_response, freq_autocorrelation, half_max_lag, Equalized,
    FreqResponse, H_MAGNITUDE_FLOOR,
};
pub use fading::{apply_channel, realize_channel, realize_taps, ChannelRealization, SINUSOIDS_PER_TAP};
pub use profile::{ChannelSpec, Profile, TapProfile, LTE_5MHZ_SAMPLE_RATE_HZ};
