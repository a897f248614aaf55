//! Fidelity metrics for generated-vs-target waveform sets: multitaper median
//! PSD and its geodesic distance, EVM, constellation histograms, cyclic-prefix
//! cross-correlation and, for fading-channel data, coherence bandwidth.

mod cyclic_prefix;
pub mod dpss;
mod evm;
mod histogram;
mod psd;
mod report;

pub use cyclic_prefix::{
    cp_crosscorr, cp_relerr, expected_peak_lag, median_max, median_profile, relerr_pct, CpCorrelation, CpProfile,
};
pub use evm::{evm_db, evm_db_of_symbols, median_evm, EVM_FLOOR_DB};
pub use histogram::{bin_center, bin_of, constellation_histogram, ConstellationHistogram, HIST_BINS, HIST_EXTENT};
pub use psd::{
    median_of, median_psd, multitaper_psd, psd_geodesic_distance, Psd, MULTITAPER_K, MULTITAPER_NW, PSD_FLOOR,
};
pub use report::{
    analyze_set, compare, evaluate, received_symbols, write_csv_tables, CoherenceSummary, EvalReport, SetAnalysis,
    COHERENCE_BINS, PROFILE_WAVEFORMS,
};
