use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sampling rate of a 5 MHz LTE carrier (512-point OFDM symbols).
pub const LTE_5MHZ_SAMPLE_RATE_HZ: f64 = 7.68e6;

/// Multipath delay profiles of the LTE UE conformance channel models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Profile {
    /// Extended Pedestrian A.
    Epa,
    /// Extended Vehicular A.
    Eva,
    /// Extended Typical Urban.
    Etu,
}

impl Profile {
    /// Maximum Doppler frequency paired with the profile in the standard
    /// model names (EPA-5Hz, EVA-70Hz, ETU-300Hz).
    pub fn standard_doppler_hz(self) -> f64 {
        match self {
            Profile::Epa => 5.0,
            Profile::Eva => 70.0,
            Profile::Etu => 300.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Epa => "EPA",
            Profile::Eva => "EVA",
            Profile::Etu => "ETU",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EPA" => Ok(Profile::Epa),
            "EVA" => Ok(Profile::Eva),
            "ETU" => Ok(Profile::Etu),
            _ => Err(Error::InvalidSpec(format!("unknown channel profile {s:?}"))),
        }
    }
}

/// Fading channel configuration attached to a waveform spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub profile: Profile,
    pub max_doppler_hz: f64,
    pub sample_rate_hz: f64,
    /// Mixed into the salt of every per-waveform random stream.
    #[serde(default)]
    pub seed: u64,
}

impl ChannelSpec {
    /// Profile with its standard Doppler at the 5 MHz LTE sampling rate.
    pub fn standard(profile: Profile) -> Self {
        Self {
            profile,
            max_doppler_hz: profile.standard_doppler_hz(),
            sample_rate_hz: LTE_5MHZ_SAMPLE_RATE_HZ,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_doppler_hz > 0.0 && self.max_doppler_hz.is_finite()) {
            return Err(Error::InvalidSpec("max_doppler_hz must be positive".into()));
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::InvalidSpec("sample_rate_hz must be positive".into()));
        }
        Ok(())
    }
}

/// Tap delays and relative powers of a tapped delay line.
#[derive(Debug, Clone, PartialEq)]
pub struct TapProfile {
    pub delays_ns: Vec<f64>,
    pub powers_db: Vec<f64>,
}

impl TapProfile {
    /// Delay/power table of the given profile (3GPP TS 36.101, Annex B.2.1).
    pub fn for_profile(profile: Profile) -> Self {
        let (delays, powers): (&[f64], &[f64]) = match profile {
            Profile::Epa => (
                &[0.0, 30.0, 70.0, 90.0, 110.0, 190.0, 410.0],
                &[0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8],
            ),
            Profile::Eva => (
                &[0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0],
                &[0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9],
            ),
            Profile::Etu => (
                &[0.0, 50.0, 120.0, 200.0, 230.0, 500.0, 1600.0, 2300.0, 5000.0],
                &[-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0],
            ),
        };
        Self { delays_ns: delays.to_vec(), powers_db: powers.to_vec() }
    }

    /// Custom profile; delays must be nonnegative and strictly increasing.
    pub fn new(delays_ns: Vec<f64>, powers_db: Vec<f64>) -> Result<Self> {
        if delays_ns.len() != powers_db.len() || delays_ns.is_empty() {
            return Err(Error::InvalidSpec("tap delays and powers must be nonempty and of equal length".into()));
        }
        if delays_ns[0] < 0.0 || delays_ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("tap delays must be nonnegative and increasing".into()));
        }
        Ok(Self { delays_ns, powers_db })
    }

    pub fn len(&self) -> usize {
        self.delays_ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_ns.is_empty()
    }

    /// Linear tap powers normalized to unit sum.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    /// Delays rounded to the nearest sample.
    pub fn sample_offsets(&self, sample_rate_hz: f64) -> Vec<usize> {
        self.delays_ns
            .iter()
            .map(|d| (d * 1e-9 * sample_rate_hz).round() as usize)
            .collect()
    }

    /// Power-weighted RMS delay spread in nanoseconds.
    pub fn rms_delay_spread_ns(&self) -> f64 {
        let p = self.normalized_powers();
        let mean: f64 = p.iter().zip(&self.delays_ns).map(|(p, d)| p * d).sum();
        let second: f64 = p.iter().zip(&self.delays_ns).map(|(p, d)| p * d * d).sum();
        (second - mean * mean).sqrt()
    }
}
