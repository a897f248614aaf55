use crate::ofdm::{QamConstellation, ResourceGrid};
use crate::{Error, Result, C64};

/// Lower bound reported for an exact match.
pub const EVM_FLOOR_DB: f64 = -150.0;

/// RMS EVM in dB of `symbols` against the nearest constellation points,
/// normalized by the mean power of the M unique points.
pub fn evm_db_of_symbols(symbols: &[C64], constellation: &QamConstellation) -> Result<f64> {
    if symbols.is_empty() {
        return Err(Error::Empty("symbol set"));
    }
    let err: f64 = symbols.iter().map(|&s| (s - constellation.nearest_point(s)).norm_sqr()).sum::<f64>()
        / symbols.len() as f64;
    let ratio = err / constellation.mean_power();
    Ok((10.0 * ratio.log10()).max(EVM_FLOOR_DB))
}

/// EVM over every symbol of a grid.
pub fn evm_db(measured: &ResourceGrid, constellation: &QamConstellation) -> Result<f64> {
    evm_db_of_symbols(measured.as_slice(), constellation)
}

/// Median of per-waveform EVM values.
pub fn median_evm(per_waveform_db: &[f64]) -> Result<f64> {
    if per_waveform_db.is_empty() {
        return Err(Error::Empty("EVM set"));
    }
    Ok(super::psd::median_in_place(&mut per_waveform_db.to_vec()))
}
