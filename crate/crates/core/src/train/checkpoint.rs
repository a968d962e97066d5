//! Binary checkpoint container.
//!
//! All integers are little-endian.
//!
//! ```text
//! "HCMS"                      4-byte magic
//! u32                         format version (currently 1)
//! u64 + bytes                 run configuration, UTF-8 `key = value` text
//! u32                         vocabulary size V
//! V × (u32 + bytes)           tokens in index order, UTF-8
//! u32                         parameter count P
//! P × manifest entry:
//!     u32 + bytes             parameter name, UTF-8
//!     u32                     number of dimensions n
//!     n × u64                 extents
//!     u64                     offset into the data section, in f64 elements
//! u64                         data section length D, in f64 elements
//! D × f64                     parameter values, IEEE-754 binary64
//! 32 bytes                    SHA-256 of everything above
//! ```

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::RunConfig;
use crate::corpus::{Vocabulary, PAD_TOKEN, UNK_TOKEN};
use crate::nn::Hcms;
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"HCMS";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported checkpoint: {0}")]
    Version(String),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("parameter {name}: expected shape {expected:?}, found {found:?}")]
    Shape {
        name: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
}

/// A trained model together with everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: RunConfig,
    pub vocab: Vocabulary,
    pub model: Hcms,
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_str32(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, FORMAT_VERSION);
        let config = self.config.to_text();
        put_u64(&mut out, config.len() as u64);
        out.extend_from_slice(config.as_bytes());

        put_u32(&mut out, self.vocab.len() as u32);
        for tok in self.vocab.tokens() {
            put_str32(&mut out, tok);
        }

        let params = self.model.parameters();
        put_u32(&mut out, params.len() as u32);
        let mut offset = 0u64;
        for (name, p) in &params {
            put_str32(&mut out, name);
            put_u32(&mut out, p.shape().len() as u32);
            for &d in p.shape() {
                put_u64(&mut out, d as u64);
            }
            put_u64(&mut out, offset);
            offset += p.value.len() as u64;
        }
        put_u64(&mut out, offset);
        for (_, p) in &params {
            for x in p.value.data() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(CheckpointError::Version("missing HCMS magic".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(CheckpointError::Version(format!(
                "format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        if bytes.len() < 8 + DIGEST_LEN {
            return Err(CheckpointError::Corrupt("file truncated".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != digest {
            return Err(CheckpointError::Corrupt("checksum mismatch (truncated or damaged file)".into()));
        }

        let mut r = Reader { buf: body, pos: 8 };
        let config_len = r.u64()? as usize;
        let config_text = r.str(config_len)?;
        let config = RunConfig::from_text(config_text)
            .map_err(|e| CheckpointError::Corrupt(format!("configuration block: {e}")))?;

        let vocab_len = r.u32()? as usize;
        let mut tokens = Vec::with_capacity(vocab_len.min(1 << 20));
        for _ in 0..vocab_len {
            let n = r.u32()? as usize;
            tokens.push(r.str(n)?.to_string());
        }
        if tokens.len() < 2 || tokens[0] != PAD_TOKEN || tokens[1] != UNK_TOKEN {
            return Err(CheckpointError::Corrupt("vocabulary lacks PAD/UNK entries".into()));
        }
        let vocab = Vocabulary::from_tokens(tokens[2..].iter().cloned(), config.min_count);
        if vocab.len() != vocab_len {
            return Err(CheckpointError::Corrupt("duplicate vocabulary entries".into()));
        }

        let count = r.u32()? as usize;
        let mut manifest = Vec::with_capacity(count.min(64));
        for _ in 0..count {
            let n = r.u32()? as usize;
            let name = r.str(n)?.to_string();
            let ndim = r.u32()? as usize;
            if ndim > 8 {
                return Err(CheckpointError::Corrupt(format!("{name}: {ndim} dimensions")));
            }
            let shape = (0..ndim).map(|_| r.u64().map(|d| d as usize)).collect::<Result<Vec<_>, _>>()?;
            let offset = r.u64()? as usize;
            manifest.push((name, shape, offset));
        }
        let data_len = r.u64()? as usize;
        if r.remaining() != data_len.checked_mul(8).ok_or_else(|| CheckpointError::Corrupt("data length overflow".into()))? {
            return Err(CheckpointError::Corrupt(format!(
                "data section holds {} bytes, manifest declares {data_len} values",
                r.remaining()
            )));
        }
        let data: Vec<f64> = r.buf[r.pos..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();

        let model_cfg = config.model_config(vocab.len());
        let mut model = Hcms::new(model_cfg, 0)
            .map_err(|e| CheckpointError::Corrupt(format!("configuration does not build a model: {e}")))?;
        let mut params = model.parameters_mut();
        if params.len() != manifest.len() {
            return Err(CheckpointError::Shape {
                name: "<parameter list>".into(),
                expected: vec![params.len()],
                found: vec![manifest.len()],
            });
        }
        for ((name, p), (m_name, shape, offset)) in params.iter_mut().zip(manifest) {
            if *name != m_name {
                return Err(CheckpointError::Corrupt(format!("expected parameter {name}, found {m_name}")));
            }
            if p.shape() != shape.as_slice() {
                return Err(CheckpointError::Shape {
                    name: m_name,
                    expected: p.shape().to_vec(),
                    found: shape,
                });
            }
            let n = p.value.len();
            let values = data
                .get(offset..offset + n)
                .ok_or_else(|| CheckpointError::Corrupt(format!("{m_name}: data out of bounds")))?;
            let value = Tensor::new(shape, values.to_vec()).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
            **p = crate::tensor::Parameter::new(value);
        }
        drop(params);
        Ok(Self { config, vocab, model })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| CheckpointError::Corrupt(format!("unexpected end of data at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn str(&mut self, n: usize) -> Result<&'a str, CheckpointError> {
        std::str::from_utf8(self.take(n)?).map_err(|e| CheckpointError::Corrupt(e.to_string()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

pub fn save_checkpoint(checkpoint: &Checkpoint, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    fs::write(path, checkpoint.to_bytes())?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint, CheckpointError> {
    Checkpoint::from_bytes(&fs::read(path)?)
}
