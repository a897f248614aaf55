//! Min-max scaling to [-1, 1].
//!
//! Statistics are computed over a whole dataset. In global mode a single
//! (min, max) pair covers every value; in featurewise mode each time step
//! (a sample index for raw I/Q, a frame for STFT grids) gets its own pair,
//! shared by the real and imaginary parts.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    Global,
    Featurewise,
}

impl std::str::FromStr for ScalingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(ScalingMode::Global),
            "featurewise" => Ok(ScalingMode::Featurewise),
            other => Err(Error::InvalidSpec(format!("unknown scaling mode {other:?}"))),
        }
    }
}

/// How the flat elements of one item map to features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Interleaved I/Q samples: element `e` belongs to time step `e / 2`.
    RawIq { len: usize },
    /// Channel-major `[re/im][bin][frame]` grids: element `e` belongs to
    /// frame `e % frames`.
    Stft { bins: usize, frames: usize },
}

impl Layout {
    pub fn item_len(&self) -> usize {
        match *self {
            Layout::RawIq { len } => 2 * len,
            Layout::Stft { bins, frames } => 2 * bins * frames,
        }
    }

    pub fn n_features(&self) -> usize {
        match *self {
            Layout::RawIq { len } => len,
            Layout::Stft { frames, .. } => frames,
        }
    }

    fn feature(&self, e: usize) -> usize {
        match *self {
            Layout::RawIq { .. } => e / 2,
            Layout::Stft { frames, .. } => e % frames,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub mode: ScalingMode,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalingParams {
    /// Indices of features with max == min; they scale to 0 and unscale to
    /// the constant.
    pub fn degenerate(&self) -> Vec<usize> {
        self.mins.iter().zip(&self.maxs).enumerate().filter(|(_, (lo, hi))| lo >= hi).map(|(i, _)| i).collect()
    }

    fn expected_len(&self, layout: &Layout) -> usize {
        match self.mode {
            ScalingMode::Global => 1,
            ScalingMode::Featurewise => layout.n_features(),
        }
    }

    fn index(&self, layout: &Layout, e: usize) -> usize {
        match self.mode {
            ScalingMode::Global => 0,
            ScalingMode::Featurewise => layout.feature(e % layout.item_len()),
        }
    }
}

/// Dataset statistics for `data` (a concatenation of items).
pub fn fit(data: &[f64], layout: &Layout, mode: ScalingMode) -> Result<ScalingParams> {
    let item_len = layout.item_len();
    if data.is_empty() || item_len == 0 || !data.len().is_multiple_of(item_len) {
        return Err(Error::LengthMismatch { expected: item_len, actual: data.len() });
    }
    let n = match mode {
        ScalingMode::Global => 1,
        ScalingMode::Featurewise => layout.n_features(),
    };
    let mut params = ScalingParams { mode, mins: vec![f64::INFINITY; n], maxs: vec![f64::NEG_INFINITY; n] };
    for (e, &v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let i = params.index(layout, e);
        params.mins[i] = params.mins[i].min(v);
        params.maxs[i] = params.maxs[i].max(v);
    }
    Ok(params)
}

/// Scale to [-1, 1]. Statistics are fitted on `data` unless `params` are
/// given, in which case their mode must equal `mode`.
pub fn scale(
    data: &[f64],
    layout: &Layout,
    mode: ScalingMode,
    params: Option<&ScalingParams>,
) -> Result<(Vec<f64>, ScalingParams)> {
    let params = match params {
        Some(p) if p.mode != mode => return Err(Error::ScalingModeMismatch { expected: mode, actual: p.mode }),
        Some(p) => {
            check(data, layout, p)?;
            p.clone()
        }
        None => fit(data, layout, mode)?,
    };
    let out = data
        .iter()
        .enumerate()
        .map(|(e, &v)| {
            let i = params.index(layout, e);
            let (lo, hi) = (params.mins[i], params.maxs[i]);
            if hi > lo {
                2.0 * (v - lo) / (hi - lo) - 1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((out, params))
}

/// Exact inverse of [`scale`].
pub fn unscale(data: &[f64], layout: &Layout, params: &ScalingParams) -> Result<Vec<f64>> {
    check(data, layout, params)?;
    Ok(data
        .iter()
        .enumerate()
        .map(|(e, &v)| {
            let i = params.index(layout, e);
            let (lo, hi) = (params.mins[i], params.maxs[i]);
            if hi > lo {
                (v + 1.0) * 0.5 * (hi - lo) + lo
            } else {
                lo
            }
        })
        .collect())
}

fn check(data: &[f64], layout: &Layout, params: &ScalingParams) -> Result<()> {
    let item_len = layout.item_len();
    if item_len == 0 || !data.len().is_multiple_of(item_len) {
        return Err(Error::LengthMismatch { expected: item_len, actual: data.len() });
    }
    let expected = params.expected_len(layout);
    if params.mins.len() != expected || params.maxs.len() != expected {
        let actual = if params.mins.len() == 1 { ScalingMode::Global } else { ScalingMode::Featurewise };
        return Err(Error::ScalingModeMismatch { expected: params.mode, actual });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn global_maps_range_to_unit_interval() {
        let layout = Layout::RawIq { len: 3 };
        let data = [-2.0, 0.0, 1.0, 2.0, -1.0, 0.5];
        let (s, p) = scale(&data, &layout, ScalingMode::Global, None).unwrap();
        assert_eq!(s, [-1.0, 0.0, 0.5, 1.0, -0.5, 0.25]);
        assert_eq!((p.mins[0], p.maxs[0]), (-2.0, 2.0));
    }

    #[test]
    fn featurewise_per_time_step() {
        // two items, two time steps each: step 0 spans [-4, 4], step 1 is
        // constant 3
        let layout = Layout::RawIq { len: 2 };
        let data = [-4.0, 0.0, 3.0, 3.0, 4.0, 2.0, 3.0, 3.0];
        let (s, p) = scale(&data, &layout, ScalingMode::Featurewise, None).unwrap();
        assert_eq!(p.degenerate(), [1]);
        assert_eq!(s, [-1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0]);
        assert_eq!(unscale(&s, &layout, &p).unwrap(), data);
    }

    #[test]
    fn stft_features_are_frames() {
        let layout = Layout::Stft { bins: 2, frames: 3 };
        // [re/im][bin][frame]; frame 0 values 0..=3 scaled jointly
        let data: Vec<f64> = (0..12).map(|e| if e % 3 == 0 { e as f64 } else { 1.0 + (e % 3) as f64 }).collect();
        let (_, p) = scale(&data, &layout, ScalingMode::Featurewise, None).unwrap();
        assert_eq!(p.mins, [0.0, 2.0, 3.0]);
        assert_eq!(p.maxs, [9.0, 2.0, 3.0]);
    }

    #[test]
    fn mode_mismatch_and_bad_input() {
        let layout = Layout::RawIq { len: 2 };
        let data = [1.0, 2.0, 3.0, 4.0];
        let (_, global) = scale(&data, &layout, ScalingMode::Global, None).unwrap();
        assert!(matches!(
            scale(&data, &layout, ScalingMode::Featurewise, Some(&global)),
            Err(Error::ScalingModeMismatch { .. })
        ));
        let mut forged = global.clone();
        forged.mode = ScalingMode::Featurewise;
        assert!(matches!(unscale(&data, &layout, &forged), Err(Error::ScalingModeMismatch { .. })));
        assert!(matches!(fit(&[1.0, f64::NAN, 0.0, 0.0], &layout, ScalingMode::Global), Err(Error::NonFinite)));
        assert!(fit(&[1.0, 2.0, 3.0], &layout, ScalingMode::Global).is_err());
    }

    #[test]
    fn reuse_params_is_identity_on_fitting_data() {
        let layout = Layout::RawIq { len: 2 };
        let data = [1.0, -2.0, 3.0, 4.0];
        let (a, p) = scale(&data, &layout, ScalingMode::Featurewise, None).unwrap();
        let (b, q) = scale(&data, &layout, ScalingMode::Featurewise, Some(&p)).unwrap();
        assert_eq!(a, b);
        assert_eq!(p, q);
    }

    proptest! {
        #[test]
        fn round_trip(values in prop::collection::vec(-1e3f64..1e3, 8..64), featurewise in any::<bool>()) {
            let len = values.len() / 4;
            let data = &values[..len * 4];
            let layout = Layout::RawIq { len: 2 };
            let mode = if featurewise { ScalingMode::Featurewise } else { ScalingMode::Global };
            let (s, p) = scale(data, &layout, mode, None).unwrap();
            prop_assert!(s.iter().all(|v| (-1.0..=1.0).contains(v)));
            let back = unscale(&s, &layout, &p).unwrap();
            for (a, b) in data.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
