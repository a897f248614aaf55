use crate::channel::{ChannelSpec, Profile};
use crate::ofdm::{AllocClass, WaveformSpec};
use crate::{Error, Result};

/// A named experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: String,
    pub spec: WaveformSpec,
}

/// EVM target shared by the complexity and modulation-order experiments.
pub const DEFAULT_EVM_DB: f64 = -25.0;

fn channel_preset(profile: Profile, evm_db: f64) -> ExperimentPreset {
    let ch = ChannelSpec::standard(profile);
    ExperimentPreset {
        name: format!("channel-{}{}", profile.name().to_lowercase(), ch.max_doppler_hz),
        spec: WaveformSpec::new(512, AllocClass::Medium, 16, Some(evm_db)).with_pilot().with_channel(ch),
    }
}

/// All presets: nine signal-complexity configurations, four modulation
/// orders and three fading channels.
pub fn presets() -> Vec<ExperimentPreset> {
    let mut out = Vec::new();
    for n in [128, 256, 512] {
        for alloc in [AllocClass::Small, AllocClass::Medium, AllocClass::Large] {
            out.push(ExperimentPreset {
                name: format!("complexity-{n}-{}", alloc.name()),
                spec: WaveformSpec::new(n, alloc, 16, Some(DEFAULT_EVM_DB)),
            });
        }
    }
    for m in [4, 16, 32, 64] {
        out.push(ExperimentPreset {
            name: format!("modorder-m{m}"),
            spec: WaveformSpec::new(128, AllocClass::Medium, m, Some(DEFAULT_EVM_DB)),
        });
    }
    out.push(channel_preset(Profile::Epa, -30.0));
    out.push(channel_preset(Profile::Eva, -40.0));
    out.push(channel_preset(Profile::Etu, -50.0));
    out
}

pub fn preset(name: &str) -> Result<WaveformSpec> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .map(|p| p.spec)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
