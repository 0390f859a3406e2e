//! Binary checkpoint container.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic        8 bytes   "TXSPCKPT"
//! version      u32       currently 1
//! header_len   u32       length of the JSON header
//! header       UTF-8 JSON {"config": EncoderConfig, "meta": CheckpointMeta}
//! n_tensors    u32
//! n_tensors times:
//!   name_len   u16
//!   name       UTF-8
//!   dtype      u8        0 = f32, 1 = f64
//!   ndim       u8
//!   dims       u32 x ndim
//!   data       dtype x product(dims), row-major
//! ```
//!
//! Tensors appear in the order of [`Parameters::tensors`]; names and shapes
//! must match what the header's config implies.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EncoderConfig, EncoderError, Parameters, Scalar};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"TXSPCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;
const MAX_HEADER_BYTES: u32 = 1 << 20;
/// Refuse configs whose parameters would exceed this many scalars.
const MAX_SCALARS: usize = 1 << 31;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("config in checkpoint is invalid: {0}")]
    Config(#[from] EncoderError),
    #[error("tensor {index}: {message}")]
    Tensor { index: usize, message: String },
    #[error("trailing bytes after the last tensor")]
    TrailingBytes,
    #[error("file holds {got} bytes of tensor data but the header describes at least {needed}")]
    Truncated { needed: usize, got: usize },
}

/// Provenance stored next to the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    /// 1-based epoch the snapshot was taken at.
    pub epoch: usize,
    pub trial_f1: f64,
    /// Seed the training run started from.
    pub seed: u64,
    pub vocab_size: usize,
    /// See [`crate::tokenizer::Vocab::fingerprint`].
    pub vocab_fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: EncoderConfig,
    meta: CheckpointMeta,
}

pub fn write_checkpoint<F: Scalar, W: Write>(
    mut w: W,
    config: &EncoderConfig,
    meta: &CheckpointMeta,
    params: &Parameters<F>,
) -> Result<(), CheckpointError> {
    let header = serde_json::to_vec(&Header { config: config.clone(), meta: meta.clone() })
        .map_err(|e| CheckpointError::Header(e.to_string()))?;
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_u32::<LittleEndian>(CHECKPOINT_VERSION)?;
    w.write_u32::<LittleEndian>(header.len() as u32)?;
    w.write_all(&header)?;
    let tensors = params.tensors();
    w.write_u32::<LittleEndian>(tensors.len() as u32)?;
    for t in tensors {
        w.write_u16::<LittleEndian>(t.name.len() as u16)?;
        w.write_all(t.name.as_bytes())?;
        w.write_u8(F::DTYPE)?;
        w.write_u8(t.shape.len() as u8)?;
        for &d in &t.shape {
            w.write_u32::<LittleEndian>(d as u32)?;
        }
        for &v in t.data {
            if F::DTYPE == f32::DTYPE {
                w.write_f32::<LittleEndian>(v.as_f64() as f32)?;
            } else {
                w.write_f64::<LittleEndian>(v.as_f64())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a checkpoint into precision `F`, converting if the file was
/// written in the other precision.
pub fn read_checkpoint<F: Scalar, R: Read>(
    mut r: R,
) -> Result<(EncoderConfig, CheckpointMeta, Parameters<F>), CheckpointError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let header_len = r.read_u32::<LittleEndian>()?;
    if header_len > MAX_HEADER_BYTES {
        return Err(CheckpointError::Header(format!("header of {header_len} bytes is too large")));
    }
    let mut header = vec![0u8; header_len as usize];
    r.read_exact(&mut header)?;
    let Header { config, meta } =
        serde_json::from_slice(&header).map_err(|e| CheckpointError::Header(e.to_string()))?;
    config.validate()?;
    if !(0.0..=1.0).contains(&meta.trial_f1) {
        return Err(CheckpointError::Header(format!("trial_f1 {} outside [0, 1]", meta.trial_f1)));
    }

    let scalars = match expected_scalars(&config) {
        Some(n) if n <= MAX_SCALARS => n,
        _ => return Err(CheckpointError::Header("config describes an implausibly large model".into())),
    };
    // size the body before allocating anything the header asks for
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() < scalars * 4 {
        return Err(CheckpointError::Truncated { needed: scalars * 4, got: body.len() });
    }
    let mut r = body.as_slice();

    let mut params = Parameters::<F>::zeros(&config);
    let count = r.read_u32::<LittleEndian>()? as usize;
    let mut slots = params.tensors_mut();
    if count != slots.len() {
        return Err(CheckpointError::Tensor {
            index: count.min(slots.len()),
            message: format!("expected {} tensors, found {count}", slots.len()),
        });
    }
    for (index, slot) in slots.iter_mut().enumerate() {
        let err = |message: String| CheckpointError::Tensor { index, message };
        let name_len = r.read_u16::<LittleEndian>()? as usize;
        let mut name = vec![0u8; name_len];
        r.read_exact(&mut name)?;
        if name != slot.name.as_bytes() {
            return Err(err(format!("expected `{}`, found `{}`", slot.name, String::from_utf8_lossy(&name))));
        }
        let dtype = r.read_u8()?;
        if dtype > 1 {
            return Err(err(format!("unknown dtype {dtype}")));
        }
        let ndim = r.read_u8()? as usize;
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            dims.push(r.read_u32::<LittleEndian>()? as usize);
        }
        if dims != slot.shape {
            return Err(err(format!("shape {dims:?} does not match expected {:?}", slot.shape)));
        }
        for v in slot.data.iter_mut() {
            let x = if dtype == 0 {
                r.read_f32::<LittleEndian>()? as f64
            } else {
                r.read_f64::<LittleEndian>()?
            };
            *v = F::from_f64(x);
        }
    }
    drop(slots);
    if !r.is_empty() {
        return Err(CheckpointError::TrailingBytes);
    }
    Ok((config, meta, params))
}

fn expected_scalars(c: &EncoderConfig) -> Option<usize> {
    let d = c.hidden_dim;
    let ff = c.ff_dim();
    let block = d.checked_mul(d)?.checked_mul(4)?
        .checked_add(d.checked_mul(ff)?.checked_mul(2)?)?
        .checked_add(ff)?
        .checked_add(d.checked_mul(9)?)?;
    c.vocab_size
        .checked_add(c.max_len)?
        .checked_mul(d)?
        .checked_add(block.checked_mul(c.num_blocks)?)?
        .checked_add(c.classifier_input_dim().checked_mul(c.num_classes)?)?
        .checked_add(c.num_classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{init_parameters, DepthSpec};

    fn cfg() -> EncoderConfig {
        EncoderConfig::new(30, 8, 2, 2, 6).with_depth(DepthSpec::last(2))
    }

    fn meta() -> CheckpointMeta {
        CheckpointMeta { epoch: 3, trial_f1: 0.5, seed: 9, vocab_size: 30, vocab_fingerprint: "ab".into() }
    }

    fn bytes<F: Scalar>(p: &Parameters<F>) -> Vec<u8> {
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &cfg(), &meta(), p).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_exact() {
        let p = init_parameters::<f32>(&cfg(), 4);
        let buf = bytes(&p);
        let (c, m, back) = read_checkpoint::<f32, _>(buf.as_slice()).unwrap();
        assert_eq!(c, cfg());
        assert_eq!(m, meta());
        assert_eq!(back, p);
        assert_eq!(&buf[..8], CHECKPOINT_MAGIC);
    }

    #[test]
    fn size_matches_layout() {
        let p = init_parameters::<f64>(&cfg(), 4);
        let buf = bytes(&p);
        let header_len = u32::from_le_bytes(buf[12..16].try_into().unwrap()) as usize;
        let tensor_bytes: usize = p
            .tensors()
            .iter()
            .map(|t| 2 + t.name.len() + 2 + 4 * t.shape.len() + 8 * t.data.len())
            .sum();
        assert_eq!(buf.len(), 8 + 4 + 4 + header_len + 4 + tensor_bytes);
        assert_eq!(expected_scalars(&cfg()), Some(p.num_scalars()));
    }

    #[test]
    fn reads_across_precisions() {
        let p = init_parameters::<f32>(&cfg(), 4);
        let (_, _, wide) = read_checkpoint::<f64, _>(bytes(&p).as_slice()).unwrap();
        assert_eq!(wide.cast::<f32>(&cfg()), p);
    }

    #[test]
    fn rejects_corruption() {
        let p = init_parameters::<f32>(&cfg(), 4);
        let good = bytes(&p);

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(read_checkpoint::<f32, _>(bad.as_slice()), Err(CheckpointError::BadMagic)));

        let mut bad = good.clone();
        bad[8] = 2;
        assert!(matches!(read_checkpoint::<f32, _>(bad.as_slice()), Err(CheckpointError::UnsupportedVersion(2))));

        let truncated = &good[..good.len() - 3];
        assert!(matches!(read_checkpoint::<f32, _>(truncated), Err(CheckpointError::Io(_))));

        let header_len = u32::from_le_bytes(good[12..16].try_into().unwrap()) as usize;
        let mut huge = cfg();
        huge.vocab_size = 50_000_000;
        let header = serde_json::to_vec(&Header { config: huge, meta: meta() }).unwrap();
        let mut bomb = good[..12].to_vec();
        bomb.extend((header.len() as u32).to_le_bytes());
        bomb.extend(header);
        bomb.extend(&good[16 + header_len..16 + header_len + 64]);
        assert!(matches!(read_checkpoint::<f32, _>(bomb.as_slice()), Err(CheckpointError::Truncated { .. })));

        let mut trailing = good.clone();
        trailing.push(0);
        assert!(matches!(read_checkpoint::<f32, _>(trailing.as_slice()), Err(CheckpointError::TrailingBytes)));
    }
}
