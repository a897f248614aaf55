use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cyclic_prefix::{cp_crosscorr, median_profile, relerr_pct, CpCorrelation, CpProfile};
use super::evm::{evm_db_of_symbols, median_evm};
use super::histogram::{bin_center, ConstellationHistogram, HIST_BINS};
use super::psd::{median_in_place, median_of, multitaper_psd, psd_geodesic_distance, Psd, MULTITAPER_K, MULTITAPER_NW};
use crate::channel::{coherence_bandwidth, equalize, estimate_freq_response};
use crate::ofdm::{demodulate, zadoff_chu_pilot, IqWaveform, WaveformSpec};
use crate::{Error, Result, C64};

/// Waveforms per set whose full correlation curves feed the median profile.
/// Maxima are taken over every waveform.
pub const PROFILE_WAVEFORMS: usize = 512;

/// Bins of the coherence-bandwidth histograms.
pub const COHERENCE_BINS: usize = 50;

/// Everything measured on one test set.
#[derive(Debug, Clone)]
pub struct SetAnalysis {
    pub median_psd: Psd,
    pub evm_db: Vec<f64>,
    pub cp_max: Vec<f64>,
    pub cp_profile: CpProfile,
    pub histogram: ConstellationHistogram,
    /// Per-waveform coherence bandwidth in Hz, for channel datasets.
    pub coherence_hz: Option<Vec<f64>>,
}

impl SetAnalysis {
    pub fn median_evm_db(&self) -> f64 {
        median_evm(&self.evm_db).expect("nonempty set")
    }

    pub fn median_cp_max(&self) -> f64 {
        median_in_place(&mut self.cp_max.clone())
    }

    pub fn median_coherence_hz(&self) -> Option<f64> {
        self.coherence_hz.as_ref().map(|v| median_in_place(&mut v.clone()))
    }
}

struct WaveformResult {
    psd: Psd,
    evm_db: f64,
    cp: CpCorrelation,
    coherence_hz: Option<f64>,
}

/// Demodulated data symbols of one waveform, equalized with the pilot when a
/// channel is configured, plus the pilot-derived coherence bandwidth.
pub fn received_symbols(waveform: &IqWaveform, spec: &WaveformSpec) -> Result<(Vec<C64>, Option<f64>)> {
    let grid = demodulate(waveform, spec)?;
    let alloc = spec.allocation()?;
    let (grid, flagged, coherence) = match (&spec.channel, spec.pilot_enabled) {
        (Some(ch), true) => {
            let pilot = zadoff_chu_pilot(alloc.len())?;
            let h = estimate_freq_response(grid.row(spec.pilot_position), &pilot)?.on_offsets(alloc.offsets())?;
            let spacing = ch.sample_rate_hz / spec.symbol_len as f64;
            let cb = coherence_bandwidth(&h, spacing);
            let eq = equalize(&grid, &h)?;
            (eq.grid, eq.flagged, Some(cb))
        }
        _ => (grid, Vec::new(), None),
    };
    let symbols = spec
        .data_rows()
        .flat_map(|r| grid.row(r).iter().enumerate().filter(|(k, _)| !flagged.contains(k)).map(|(_, s)| *s))
        .collect();
    Ok((symbols, coherence))
}

fn analyze_waveform(waveform: &IqWaveform, spec: &WaveformSpec) -> Result<(WaveformResult, Vec<C64>)> {
    let constellation = spec.constellation()?;
    let (symbols, coherence_hz) = received_symbols(waveform, spec)?;
    let result = WaveformResult {
        psd: multitaper_psd(waveform)?,
        evm_db: evm_db_of_symbols(&symbols, &constellation)?,
        cp: cp_crosscorr(waveform, spec)?,
        coherence_hz,
    };
    Ok((result, symbols))
}

/// Run every per-waveform metric on a set. Results do not depend on the
/// number of worker threads.
pub fn analyze_set(set: &[IqWaveform], spec: &WaveformSpec) -> Result<SetAnalysis> {
    if set.is_empty() {
        return Err(Error::Empty("waveform set"));
    }
    spec.validate()?;
    type Acc = (Vec<(usize, WaveformResult)>, ConstellationHistogram);
    let (mut results, histogram) = set
        .par_iter()
        .enumerate()
        .map(|(i, w)| analyze_waveform(w, spec).map(|r| (i, r)))
        .try_fold(
            || -> Acc { (Vec::new(), ConstellationHistogram::default()) },
            |(mut v, mut h): Acc, r: Result<_>| -> Result<Acc> {
                let (i, (res, symbols)) = r?;
                h.extend(&symbols);
                v.push((i, res));
                Ok((v, h))
            },
        )
        .try_reduce(
            || (Vec::new(), ConstellationHistogram::default()),
            |(mut va, mut ha): Acc, (vb, hb): Acc| -> Result<Acc> {
                va.extend(vb);
                ha.merge(&hb);
                Ok((va, ha))
            },
        )?;
    results.sort_unstable_by_key(|(i, _)| *i);

    let psds: Vec<Psd> = results.iter().map(|(_, r)| r.psd.clone()).collect();
    let median_psd = median_of(&psds)?;
    drop(psds);
    let curves: Vec<CpCorrelation> = results.iter().take(PROFILE_WAVEFORMS).map(|(_, r)| r.cp.clone()).collect();
    let cp_profile = median_profile(&curves, spec)?;
    let coherence_hz = if results[0].1.coherence_hz.is_some() {
        Some(results.iter().filter_map(|(_, r)| r.coherence_hz).collect())
    } else {
        None
    };
    Ok(SetAnalysis {
        median_psd,
        evm_db: results.iter().map(|(_, r)| r.evm_db).collect(),
        cp_max: results.iter().map(|(_, r)| r.cp.max()).collect(),
        cp_profile,
        histogram,
        coherence_hz,
    })
}

/// Histograms of coherence bandwidth for both sets on shared bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSummary {
    pub bin_edges_hz: Vec<f64>,
    pub generated: Vec<u64>,
    pub target: Vec<u64>,
    pub median_generated_hz: f64,
    pub median_target_hz: f64,
}

fn histogram_1d(values: &[f64], edges: &[f64]) -> Vec<u64> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0; bins];
    for &v in values {
        if (lo..=hi).contains(&v) {
            let i = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
            counts[i.min(bins - 1)] += 1;
        }
    }
    counts
}

/// Fidelity report for one generated-vs-target pair of test sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: WaveformSpec,
    pub n_generated: usize,
    pub n_target: usize,
    pub multitaper_nw: f64,
    pub multitaper_k: usize,
    pub psd_distance: f64,
    /// Median EVM of the generated set.
    pub evm_db: f64,
    pub evm_target_db: f64,
    pub r_gen: f64,
    pub r_target: f64,
    pub cp_relerr_pct: f64,
    pub constellation_hist: ConstellationHistogram,
    pub constellation_hist_target: ConstellationHistogram,
    pub coherence_bw: Option<CoherenceSummary>,
    pub psd_generated: Psd,
    pub psd_target: Psd,
    pub cp_profile_generated: CpProfile,
    pub cp_profile_target: CpProfile,
}

pub fn evaluate(gen_set: &[IqWaveform], target_set: &[IqWaveform], spec: &WaveformSpec) -> Result<EvalReport> {
    let generated = analyze_set(gen_set, spec)?;
    let target = analyze_set(target_set, spec)?;
    compare(&generated, &target, spec, gen_set.len(), target_set.len())
}

/// Combine two set analyses into a report.
pub fn compare(
    generated: &SetAnalysis,
    target: &SetAnalysis,
    spec: &WaveformSpec,
    n_generated: usize,
    n_target: usize,
) -> Result<EvalReport> {
    let r_gen = generated.median_cp_max();
    let r_target = target.median_cp_max();
    let coherence_bw = match (&generated.coherence_hz, &target.coherence_hz) {
        (Some(g), Some(t)) => {
            let alloc = spec.allocation()?;
            let ch = spec.channel.as_ref().expect("coherence implies a channel");
            let top = alloc.len() as f64 * ch.sample_rate_hz / spec.symbol_len as f64;
            let edges: Vec<f64> = (0..=COHERENCE_BINS).map(|i| top * i as f64 / COHERENCE_BINS as f64).collect();
            Some(CoherenceSummary {
                generated: histogram_1d(g, &edges),
                target: histogram_1d(t, &edges),
                bin_edges_hz: edges,
                median_generated_hz: generated.median_coherence_hz().unwrap_or(f64::NAN),
                median_target_hz: target.median_coherence_hz().unwrap_or(f64::NAN),
            })
        }
        _ => None,
    };
    Ok(EvalReport {
        spec: spec.clone(),
        n_generated,
        n_target,
        multitaper_nw: MULTITAPER_NW,
        multitaper_k: MULTITAPER_K,
        psd_distance: psd_geodesic_distance(&generated.median_psd, &target.median_psd)?,
        evm_db: generated.median_evm_db(),
        evm_target_db: target.median_evm_db(),
        r_gen,
        r_target,
        cp_relerr_pct: relerr_pct(r_gen, r_target)?,
        constellation_hist: generated.histogram.clone(),
        constellation_hist_target: target.histogram.clone(),
        coherence_bw,
        psd_generated: generated.median_psd.clone(),
        psd_target: target.median_psd.clone(),
        cp_profile_generated: generated.cp_profile.clone(),
        cp_profile_target: target.cp_profile.clone(),
    })
}

impl EvalReport {
    pub fn is_finite(&self) -> bool {
        [self.psd_distance, self.evm_db, self.evm_target_db, self.r_gen, self.r_target, self.cp_relerr_pct]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn csv_file(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_histogram(dir: &Path, name: &str, h: &ConstellationHistogram) -> Result<()> {
    let mut f = csv_file(dir, name)?;
    writeln!(f, "i_bin,q_bin,i_center,q_center,count")?;
    for i in 0..HIST_BINS {
        for q in 0..HIST_BINS {
            let c = h.get(i, q);
            if c > 0 {
                writeln!(f, "{i},{q},{:.4},{:.4},{c}", bin_center(i), bin_center(q))?;
            }
        }
    }
    f.flush()?;
    Ok(())
}

/// Write plotting tables: `psd.csv`, `constellation_generated.csv`,
/// `constellation_target.csv`, `cp_profile.csv`, `summary.csv` and, for
/// channel datasets, `coherence_bw.csv`. Returns the file names written.
pub fn write_csv_tables(report: &EvalReport, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let mut f = csv_file(dir, "psd.csv")?;
    writeln!(f, "freq,target,generated")?;
    for (k, (t, g)) in report.psd_target.values.iter().zip(&report.psd_generated.values).enumerate() {
        writeln!(f, "{},{t:e},{g:e}", report.psd_target.freq(k))?;
    }
    f.flush()?;
    written.push("psd.csv".to_string());

    write_histogram(dir, "constellation_generated.csv", &report.constellation_hist)?;
    write_histogram(dir, "constellation_target.csv", &report.constellation_hist_target)?;
    written.push("constellation_generated.csv".into());
    written.push("constellation_target.csv".into());

    let mut f = csv_file(dir, "cp_profile.csv")?;
    writeln!(f, "lag,target,generated")?;
    for (lag, t) in report.cp_profile_target.lags.iter().zip(&report.cp_profile_target.values) {
        let g = report.cp_profile_generated.value_at(*lag).unwrap_or(f64::NAN);
        writeln!(f, "{lag},{t},{g}")?;
    }
    f.flush()?;
    written.push("cp_profile.csv".into());

    if let Some(cb) = &report.coherence_bw {
        let mut f = csv_file(dir, "coherence_bw.csv")?;
        writeln!(f, "bin_lo_hz,bin_hi_hz,target,generated")?;
        for (i, (t, g)) in cb.target.iter().zip(&cb.generated).enumerate() {
            writeln!(f, "{},{},{t},{g}", cb.bin_edges_hz[i], cb.bin_edges_hz[i + 1])?;
        }
        f.flush()?;
        written.push("coherence_bw.csv".into());
    }

    let mut f = csv_file(dir, "summary.csv")?;
    writeln!(f, "metric,generated,target")?;
    writeln!(f, "psd_distance,{},", report.psd_distance)?;
    writeln!(f, "median_evm_db,{},{}", report.evm_db, report.evm_target_db)?;
    writeln!(f, "median_cp_max,{},{}", report.r_gen, report.r_target)?;
    writeln!(f, "cp_relerr_pct,{},", report.cp_relerr_pct)?;
    writeln!(f, "histogram_dropped,{},{}", report.constellation_hist.dropped, report.constellation_hist_target.dropped)?;
    if let Some(cb) = &report.coherence_bw {
        writeln!(f, "median_coherence_bw_hz,{},{}", cb.median_generated_hz, cb.median_target_hz)?;
    }
    f.flush()?;
    written.push("summary.csv".into());
    Ok(written)
}
