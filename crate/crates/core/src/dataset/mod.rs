//! Dataset container, experiment presets and deterministic generation.

mod container;
mod convert;
mod generate;
mod presets;

pub use container::{Container, ContainerReader, ContainerWriter, Header, Representation, StftMeta, FORMAT_VERSION, MAGIC};
pub use convert::{convert, from_waveforms, to_waveforms};
pub use generate::{
    dataset_waveform, generate_dataset, generate_to_file, generate_waveforms, thread_pool_from_env, CHUNK_SIZE,
    THREADS_ENV,
};
pub use presets::{preset, presets, ExperimentPreset, DEFAULT_EVM_DB};
