//! `MPW1` weight files.
//!
//! ```text
//! magic        4 bytes  "MPW1"
//! version      u32      1
//! layer count  u32
//! input height u32
//! input width  u32
//! per layer    9 bytes  kind u8, in u16, out u16, kernel h u8, kernel w u8,
//!                       stride u8, flags u8
//! parameters   f32 * n  each layer's kernel then bias, in layer order
//! crc32        u32      IEEE CRC of every preceding byte
//! ```
//!
//! All integers and floats are little-endian. Flag bits: 0 = has bias,
//! 1 = stacks input, 2 = has skip; bits 3..=7 hold the skip source index.
//! Layer kinds: 0 input embed, 1 conv, 2 transposed conv, 3 output head.

use super::layers::{Layer, LayerKind, LayerSpec};
use super::model::{PredictorWeights, MAX_SKIP_SOURCE};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MPW1";
pub const VERSION: u32 = 1;
const LAYER_HEADER_LEN: usize = 9;

const FLAG_BIAS: u8 = 1;
const FLAG_STACKS_INPUT: u8 = 1 << 1;
const FLAG_SKIP: u8 = 1 << 2;
const SKIP_SHIFT: u8 = 3;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Codec(format!("truncated: need {n} bytes at offset {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

fn encode_flags(spec: &LayerSpec) -> Result<u8> {
    let mut flags = 0;
    if spec.has_bias {
        flags |= FLAG_BIAS;
    }
    if spec.stacks_input {
        flags |= FLAG_STACKS_INPUT;
    }
    if let Some(src) = spec.skip_source {
        if src > MAX_SKIP_SOURCE {
            return Err(Error::Codec(format!("skip source {src} does not fit the flag byte")));
        }
        flags |= FLAG_SKIP | ((src as u8) << SKIP_SHIFT);
    }
    Ok(flags)
}

fn narrow<T: TryFrom<usize>>(v: usize, what: &str) -> Result<T> {
    T::try_from(v).map_err(|_| Error::Codec(format!("{what}={v} does not fit the header field")))
}

pub fn save_weights(weights: &PredictorWeights) -> Result<Vec<u8>> {
    weights.validate()?;
    let mut out = Vec::with_capacity(20 + weights.layers.len() * LAYER_HEADER_LEN + 4 * weights.param_count() + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&narrow::<u32>(weights.layers.len(), "layer count")?.to_le_bytes());
    out.extend_from_slice(&narrow::<u32>(weights.input_dims.0, "input height")?.to_le_bytes());
    out.extend_from_slice(&narrow::<u32>(weights.input_dims.1, "input width")?.to_le_bytes());
    for layer in &weights.layers {
        let s = &layer.spec;
        out.push(s.kind.code());
        out.extend_from_slice(&narrow::<u16>(s.in_channels, "in_channels")?.to_le_bytes());
        out.extend_from_slice(&narrow::<u16>(s.out_channels, "out_channels")?.to_le_bytes());
        out.push(narrow(s.kernel.0, "kernel height")?);
        out.push(narrow(s.kernel.1, "kernel width")?);
        out.push(narrow(s.stride, "stride")?);
        out.push(encode_flags(s)?);
    }
    for layer in &weights.layers {
        for v in &layer.params {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn load_weights(bytes: &[u8]) -> Result<PredictorWeights> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Codec("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Codec(format!("unsupported version {version}")));
    }
    let count = r.u32()? as usize;
    let input_dims = (r.u32()? as usize, r.u32()? as usize);
    // guard the allocation below against garbage counts
    if count.saturating_mul(LAYER_HEADER_LEN) > bytes.len() {
        return Err(Error::Codec(format!("truncated: {count} layers declared")));
    }
    let mut specs = Vec::with_capacity(count);
    for _ in 0..count {
        let code = r.u8()?;
        let kind = LayerKind::from_code(code).ok_or_else(|| Error::Codec(format!("unknown layer kind {code}")))?;
        let in_channels = r.u16()? as usize;
        let out_channels = r.u16()? as usize;
        let kernel = (r.u8()? as usize, r.u8()? as usize);
        let stride = r.u8()? as usize;
        let flags = r.u8()?;
        specs.push(LayerSpec {
            kind,
            in_channels,
            out_channels,
            kernel,
            stride,
            has_bias: flags & FLAG_BIAS != 0,
            stacks_input: flags & FLAG_STACKS_INPUT != 0,
            skip_source: (flags & FLAG_SKIP != 0).then_some((flags >> SKIP_SHIFT) as usize),
        });
    }
    let total: usize = specs.iter().map(LayerSpec::param_len).sum();
    let expected_len = r.pos + 4 * total + 4;
    if bytes.len() < expected_len {
        return Err(Error::Codec(format!(
            "truncated: {} bytes, expected {expected_len}",
            bytes.len()
        )));
    }
    if bytes.len() > expected_len {
        return Err(Error::Codec(format!(
            "{} trailing bytes after checksum",
            bytes.len() - expected_len
        )));
    }
    let stored = u32::from_le_bytes(bytes[expected_len - 4..].try_into().unwrap());
    if crc32fast::hash(&bytes[..expected_len - 4]) != stored {
        return Err(Error::Codec("checksum mismatch".into()));
    }
    let mut layers = Vec::with_capacity(count);
    for spec in specs {
        let raw = r.take(4 * spec.param_len())?;
        let params = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        layers.push(Layer::new(spec, params)?);
    }
    PredictorWeights::new(input_dims, layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let w = PredictorWeights::random((12, 10), 5, 1.0);
        let bytes = save_weights(&w).unwrap();
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(load_weights(&bytes).unwrap(), w);
    }

    #[test]
    fn header_layout() {
        let w = PredictorWeights::zeros((64, 64));
        let bytes = save_weights(&w).unwrap();
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 20);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 64);
        // layer 0: embed, 3 -> 1, 1x1, stride 1, no flags
        assert_eq!(&bytes[20..29], &[0, 3, 0, 1, 0, 1, 1, 1, 0]);
        // layer 11 skips from 8: bias | skip | 8 << 3
        let l11 = 20 + 11 * 9;
        assert_eq!(bytes[l11 + 8], 1 | 4 | (8 << 3));
        let expected = 20 + 20 * 9 + 4 * w.param_count() + 4;
        assert_eq!(bytes.len(), expected);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = save_weights(&PredictorWeights::random((8, 8), 1, 1.0)).unwrap();

        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(load_weights(&bad_magic), Err(Error::Codec(m)) if m.contains("magic")));

        for cut in [3, 10, 100, bytes.len() - 1] {
            assert!(matches!(load_weights(&bytes[..cut]), Err(Error::Codec(m)) if m.contains("truncated")));
        }

        let mut flipped = bytes.clone();
        let mid = bytes.len() / 2;
        flipped[mid] ^= 0x40;
        assert!(matches!(load_weights(&flipped), Err(Error::Codec(m)) if m.contains("checksum")));

        let mut extra = bytes.clone();
        extra.push(0);
        assert!(load_weights(&extra).is_err());
    }
}
