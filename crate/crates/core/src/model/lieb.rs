//! The LIEB embedding dump format.
//!
//! All integers are little-endian:
//!
//! ```text
//! magic "LIEB" | version u16 = 1 | flags u16 | dim u32 | seq_count u64
//! per sequence:
//!   id_len u16 | id (UTF-8) | n_tokens u32
//!   per token: tok_len u16 | token (UTF-8) | word_index u32
//!   n_tokens * dim f32, row-major
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingSequence, EmbeddingStore, Token};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"LIEB";
const VERSION: u16 = 1;

/// Passages longer than this are rejected when loaded as documents.
pub const MAX_DOC_TOKENS: usize = 512;

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub max_tokens: Option<usize>,
}

impl LoadOptions {
    pub fn documents() -> Self {
        Self {
            max_tokens: Some(MAX_DOC_TOKENS),
        }
    }
}

pub fn load_embeddings(path: impl AsRef<Path>, opts: LoadOptions) -> Result<EmbeddingStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    read_embeddings(BufReader::new(file), opts).map_err(|e| e.in_file(path))
}

fn eof_as_truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Truncated
    } else {
        Error::Io(e)
    }
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(eof_as_truncated)?;
        Ok(buf)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = self.u16()? as usize;
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf).map_err(eof_as_truncated)?;
        String::from_utf8(buf).map_err(|_| Error::Malformed(format!("{what} is not valid UTF-8")))
    }
}

pub fn read_embeddings(reader: impl Read, opts: LoadOptions) -> Result<EmbeddingStore> {
    let mut r = Reader { inner: reader };
    if &r.bytes::<4>()? != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    // Flag bits are informational (e.g. bit 0 = lowercased by the exporter).
    let _flags = r.u16()?;
    let dim = r.u32()? as usize;
    if dim == 0 {
        return Err(Error::Malformed("dimension must be positive".into()));
    }
    let seq_count = r.u64()?;

    let mut sequences = Vec::with_capacity(seq_count.min(1 << 16) as usize);
    for _ in 0..seq_count {
        let id = r.string("sequence id")?;
        let n_tokens = r.u32()? as usize;
        if let Some(cap) = opts.max_tokens {
            if n_tokens > cap {
                return Err(Error::TooManyTokens { id, n_tokens, cap });
            }
        }
        let mut tokens = Vec::with_capacity(n_tokens.min(1 << 16));
        for _ in 0..n_tokens {
            let text = r.string("token")?;
            let word_index = r.u32()?;
            tokens.push(Token { text, word_index });
        }
        let n_values = n_tokens
            .checked_mul(dim)
            .ok_or_else(|| Error::Malformed("matrix size overflows".into()))?;
        let mut raw = vec![0u8; n_values * 4];
        r.inner.read_exact(&mut raw).map_err(eof_as_truncated)?;
        let data = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        sequences.push(EmbeddingSequence::new(id, tokens, dim, data)?);
    }
    let mut probe = [0u8; 1];
    if r.inner.read(&mut probe)? != 0 {
        return Err(Error::Malformed(
            "trailing bytes after last sequence".into(),
        ));
    }
    EmbeddingStore::new(dim, sequences)
}

fn put_str(w: &mut impl Write, s: &str, what: &str) -> Result<()> {
    let len = u16::try_from(s.len())
        .map_err(|_| Error::Malformed(format!("{what} longer than 65535 bytes")))?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Serializes sequences in LIEB format. Rows are written as stored.
pub fn write_embeddings<'a>(
    writer: impl Write,
    dim: usize,
    sequences: impl IntoIterator<Item = &'a EmbeddingSequence>,
) -> Result<()> {
    let sequences: Vec<_> = sequences.into_iter().collect();
    let mut w = BufWriter::new(writer);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&0u16.to_le_bytes())?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    w.write_all(&(sequences.len() as u64).to_le_bytes())?;
    for seq in sequences {
        if seq.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: seq.dim(),
            });
        }
        put_str(&mut w, seq.id(), "sequence id")?;
        w.write_all(&(seq.len() as u32).to_le_bytes())?;
        for tok in seq.tokens() {
            put_str(&mut w, &tok.text, "token")?;
            w.write_all(&tok.word_index.to_le_bytes())?;
        }
        for x in seq.data() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}
