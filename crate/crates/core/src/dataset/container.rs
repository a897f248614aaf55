//! Binary dataset container.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `OFDG` |
//! | 4 | u32 format version |
//! | 8 | u64 header length `h` |
//! | h | UTF-8 JSON [`Header`] |
//! | rest | f32 payload, `count * item_len` values |
//!
//! Raw items are interleaved I/Q samples. STFT items are channel-major
//! `[re/im][bin][frame]` grids.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ofdm::WaveformSpec;
use crate::scaling::{Layout, ScalingParams};
use crate::stft::PadMeta;
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"OFDG";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Raw,
    Stft,
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Representation::Raw),
            "stft" => Ok(Representation::Stft),
            other => Err(Error::Representation(format!("unknown representation {other:?}"))),
        }
    }
}

/// Shape of STFT items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StftMeta {
    pub window_len: usize,
    pub hop: usize,
    pub bins: usize,
    pub frames: usize,
    pub pad: PadMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub spec: WaveformSpec,
    pub count: usize,
    pub seed: u64,
    pub representation: Representation,
    /// Present when the payload is min-max scaled.
    #[serde(default)]
    pub scaling: Option<ScalingParams>,
    /// Present for STFT payloads.
    #[serde(default)]
    pub stft: Option<StftMeta>,
}

impl Header {
    /// Header for an unscaled raw dataset.
    pub fn raw(spec: WaveformSpec, count: usize, seed: u64) -> Self {
        Self { format_version: FORMAT_VERSION, spec, count, seed, representation: Representation::Raw, scaling: None, stft: None }
    }

    pub fn layout(&self) -> Result<Layout> {
        match (self.representation, &self.stft) {
            (Representation::Raw, None) => Ok(Layout::RawIq { len: self.spec.waveform_len() }),
            (Representation::Stft, Some(m)) => Ok(Layout::Stft { bins: m.bins, frames: m.frames }),
            (Representation::Raw, Some(_)) => Err(Error::Representation("raw container carries STFT metadata".into())),
            (Representation::Stft, None) => Err(Error::Representation("STFT container lacks STFT metadata".into())),
        }
    }

    /// f32 values per item.
    pub fn item_len(&self) -> Result<usize> {
        Ok(self.layout()?.item_len())
    }

    pub fn payload_len(&self) -> Result<usize> {
        Ok(self.count * self.item_len()?)
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.format_version));
        }
        self.spec.validate()?;
        self.layout()?;
        if let Some(m) = &self.stft {
            let len = self.spec.waveform_len();
            let (bins, frames) = crate::stft::grid_shape(len, m.window_len);
            if m.pad.original_len != len || (m.bins, m.frames) != (bins, frames) || m.hop * 4 != m.window_len {
                return Err(Error::Representation(format!(
                    "STFT shape {}x{} does not match {len}-sample waveforms",
                    m.bins, m.frames
                )));
            }
        }
        Ok(())
    }
}

/// A fully loaded container.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub header: Header,
    pub payload: Vec<f32>,
}

impl Container {
    pub fn new(header: Header, payload: Vec<f32>) -> Result<Self> {
        header.validate()?;
        let expected = header.payload_len()?;
        if payload.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: payload.len() });
        }
        Ok(Self { header, payload })
    }

    pub fn item(&self, i: usize) -> &[f32] {
        let n = self.header.item_len().expect("validated header");
        &self.payload[i * n..(i + 1) * n]
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = ContainerWriter::create(path, &self.header)?;
        w.write_items(&self.payload)?;
        w.finish()
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut r = ContainerReader::open(path)?;
        let mut payload = Vec::with_capacity(r.header().payload_len()?);
        let mut item = Vec::new();
        while r.next_item(&mut item)? {
            payload.extend_from_slice(&item);
        }
        Ok(Self { header: r.header, payload })
    }
}

/// Streaming writer; the header (and so the item count) is fixed up front.
pub struct ContainerWriter {
    out: BufWriter<File>,
    expected: usize,
    written: usize,
}

impl ContainerWriter {
    pub fn create(path: &Path, header: &Header) -> Result<Self> {
        header.validate()?;
        let json = serde_json::to_vec(header)?;
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(&MAGIC)?;
        out.write_all(&header.format_version.to_le_bytes())?;
        out.write_all(&(json.len() as u64).to_le_bytes())?;
        out.write_all(&json)?;
        Ok(Self { out, expected: header.payload_len()?, written: 0 })
    }

    pub fn write_items(&mut self, values: &[f32]) -> Result<()> {
        if self.written + values.len() > self.expected {
            return Err(Error::LengthMismatch { expected: self.expected, actual: self.written + values.len() });
        }
        let mut bytes = Vec::with_capacity(values.len() * 4);
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        self.out.write_all(&bytes)?;
        self.written += values.len();
        Ok(())
    }

    /// Flush; fails if fewer values were written than the header promises.
    pub fn finish(mut self) -> Result<()> {
        if self.written != self.expected {
            return Err(Error::LengthMismatch { expected: self.expected, actual: self.written });
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Streaming reader yielding one item at a time.
pub struct ContainerReader {
    header: Header,
    input: BufReader<File>,
    item_len: usize,
    remaining: usize,
    bytes: Vec<u8>,
}

impl ContainerReader {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        let file_len = file.metadata()?.len();
        let mut input = BufReader::new(file);
        let mut magic = [0u8; 4];
        read_prefix(&mut input, &mut magic)?;
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let mut word = [0u8; 4];
        read_prefix(&mut input, &mut word)?;
        let version = u32::from_le_bytes(word);
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let mut len = [0u8; 8];
        read_prefix(&mut input, &mut len)?;
        let header_len = u64::from_le_bytes(len);
        if header_len > file_len.saturating_sub(16) {
            return Err(Error::TruncatedPayload { expected: header_len as usize, actual: file_len.saturating_sub(16) as usize });
        }
        let mut json = vec![0u8; header_len as usize];
        input.read_exact(&mut json)?;
        let header: Header = serde_json::from_slice(&json)?;
        header.validate()?;
        let item_len = header.item_len()?;
        let payload_bytes = file_len - 16 - header_len;
        let expected = header.payload_len()? as u64 * 4;
        if payload_bytes != expected {
            return Err(Error::TruncatedPayload { expected: expected as usize, actual: payload_bytes as usize });
        }
        Ok(Self { remaining: header.count, header, input, item_len, bytes: vec![0; item_len * 4] })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    /// Read the next item into `out`; returns false once all items are read.
    pub fn next_item(&mut self, out: &mut Vec<f32>) -> Result<bool> {
        if self.remaining == 0 {
            return Ok(false);
        }
        self.input.read_exact(&mut self.bytes)?;
        out.clear();
        out.extend(self.bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])));
        self.remaining -= 1;
        debug_assert_eq!(out.len(), self.item_len);
        Ok(true)
    }
}

fn read_prefix(input: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::TruncatedPayload { expected: 16, actual: 0 },
        _ => Error::Io(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::AllocClass;

    fn sample() -> Container {
        let spec = WaveformSpec::new(128, AllocClass::Small, 16, Some(-25.0));
        let header = Header::raw(spec, 2, 9);
        let payload = (0..2 * 1920).map(|i| i as f32 * 0.5 - 3.0).collect();
        Container::new(header, payload).unwrap()
    }

    #[test]
    fn write_read_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ofdg");
        let c = sample();
        c.write_to(&path).unwrap();
        assert_eq!(Container::read_from(&path).unwrap(), c);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"OFDG");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), FORMAT_VERSION);
        let h = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        assert_eq!(bytes.len(), 16 + h + 2 * 1920 * 4);
        let tail = &bytes[16 + h..16 + h + 4];
        assert_eq!(f32::from_le_bytes(tail.try_into().unwrap()), -3.0);
    }

    #[test]
    fn header_json_round_trip() {
        let h = sample().header;
        let back: Header = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn corrupted_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ofdg");
        sample().write_to(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(Container::read_from(&path), Err(Error::BadMagic(m)) if &m == b"XFDG"));
    }

    #[test]
    fn wrong_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ofdg");
        sample().write_to(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 7;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(Container::read_from(&path), Err(Error::UnsupportedVersion(7))));
    }

    #[test]
    fn truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ofdg");
        sample().write_to(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(Container::read_from(&path), Err(Error::TruncatedPayload { .. })));
        std::fs::write(&path, &bytes[..10]).unwrap();
        assert!(matches!(Container::read_from(&path), Err(Error::TruncatedPayload { .. })));
    }

    #[test]
    fn writer_enforces_count() {
        let dir = tempfile::tempdir().unwrap();
        let c = sample();
        let mut w = ContainerWriter::create(&dir.path().join("b"), &c.header).unwrap();
        w.write_items(c.item(0)).unwrap();
        assert!(matches!(w.finish(), Err(Error::LengthMismatch { .. })));
        assert!(Container::new(c.header.clone(), vec![0.0; 5]).is_err());
    }

    #[test]
    fn representation_metadata_must_agree() {
        let mut h = sample().header;
        h.representation = Representation::Stft;
        assert!(matches!(h.layout(), Err(Error::Representation(_))));
    }
}
