//! The ACFT frame-feature file.
//!
//! Little-endian layout:
//!
//! | field            | type                    |
//! |------------------|-------------------------|
//! | magic            | `b"ACFT"`               |
//! | version          | u16 (= 1)               |
//! | dim              | u32                     |
//! | frame_count      | u32                     |
//! | frame_stride_ms  | f32                     |
//! | window_ms        | f32 (0 when unknown)    |
//! | source_tag       | u16 length + UTF-8      |
//! | frames           | frame_count x dim f32, row-major |

use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::FrameMatrix;

pub const MAGIC: [u8; 4] = *b"ACFT";
pub const VERSION: u16 = 1;

pub fn encode(m: &FrameMatrix) -> Result<Vec<u8>> {
    let tag = m.source_tag().as_bytes();
    let tag_len = u16::try_from(tag.len())
        .map_err(|_| Error::InvalidFrames(format!("source tag of {} bytes", tag.len())))?;
    let frames = u32::try_from(m.frames())
        .map_err(|_| Error::InvalidFrames(format!("{} frames", m.frames())))?;
    let dim =
        u32::try_from(m.dim()).map_err(|_| Error::InvalidFrames(format!("dim {}", m.dim())))?;

    let mut out = Vec::with_capacity(24 + tag.len() + 4 * m.as_slice().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&frames.to_le_bytes());
    out.extend_from_slice(&m.frame_stride_ms().to_le_bytes());
    out.extend_from_slice(&m.window_ms().to_le_bytes());
    out.extend_from_slice(&tag_len.to_le_bytes());
    out.extend_from_slice(tag);
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::CorruptFile(format!(
                "truncated while reading {what} at byte {}",
                self.pos
            ))),
        }
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }
}

pub fn decode(bytes: &[u8]) -> Result<FrameMatrix> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic: [u8; 4] = match cur.array("magic") {
        Ok(m) => m,
        Err(_) => {
            let mut m = [0u8; 4];
            m[..bytes.len()].copy_from_slice(bytes);
            return Err(Error::NotAFeatureFile(m));
        }
    };
    if magic != MAGIC {
        return Err(Error::NotAFeatureFile(magic));
    }
    let version = u16::from_le_bytes(cur.array("version")?);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = u32::from_le_bytes(cur.array("dim")?) as usize;
    let frames = u32::from_le_bytes(cur.array("frame count")?) as usize;
    let stride = f32::from_le_bytes(cur.array("frame stride")?);
    let window = f32::from_le_bytes(cur.array("window")?);
    let tag_len = u16::from_le_bytes(cur.array("tag length")?) as usize;
    let tag = std::str::from_utf8(cur.take(tag_len, "source tag")?)
        .map_err(|e| Error::CorruptFile(format!("source tag is not UTF-8: {e}")))?
        .to_owned();

    let values = dim
        .checked_mul(frames)
        .ok_or_else(|| Error::CorruptFile(format!("{frames} x {dim} overflows")))?;
    let payload = cur.take(values * 4, "frame payload")?;
    if cur.pos != bytes.len() {
        return Err(Error::CorruptFile(format!(
            "{} trailing bytes after payload",
            bytes.len() - cur.pos
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")))
        .collect();
    FrameMatrix::new(data, dim, stride, window, tag)
        .map_err(|e| Error::CorruptFile(e.to_string()))
}

pub fn write_features(m: &FrameMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(m)?).map_err(|e| Error::io(path, e))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FrameMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::CorruptFile(msg) => Error::CorruptFile(format!("{}: {msg}", path.display())),
        other => other,
    })
}
