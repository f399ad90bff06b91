//! Frame snapshots and the digests used for golden replay comparisons.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use inkboard_core::draw::DrawList;
use inkboard_core::Tick;

pub const FNV_OFFSET_BASIS: u64 = 14695981039346656037;
pub const FNV_PRIME: u64 = 1099511628211;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_extend(FNV_OFFSET_BASIS, bytes)
}

fn fnv1a64_extend(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Folds per-frame digests, each as eight little-endian bytes, into one.
pub fn fold_digests<I: IntoIterator<Item = u64>>(digests: I) -> u64 {
    digests
        .into_iter()
        .fold(FNV_OFFSET_BASIS, |h, d| fnv1a64_extend(h, &d.to_le_bytes()))
}

pub fn hash_frames(frames: &[FrameSnapshot]) -> u64 {
    fold_digests(frames.iter().map(|f| f.digest))
}

pub fn hex(digest: u64) -> String {
    format!("{digest:016x}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSnapshot {
    pub tick: Tick,
    /// Canonical (rounded) form.
    pub drawlist: DrawList,
    pub digest: u64,
}

impl FrameSnapshot {
    pub fn capture(tick: Tick, frame: &DrawList) -> Self {
        let drawlist = frame.canonical();
        let digest = fnv1a64(frame.canonical_json().as_bytes());
        Self {
            tick,
            drawlist,
            digest,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&FrameLine {
            tick: self.tick,
            digest: hex(self.digest),
            drawlist: self.drawlist.clone(),
        })
        .expect("frames always serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct FrameLine {
    tick: Tick,
    digest: String,
    drawlist: DrawList,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("malformed frames file at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Reads a frames file, checking each digest against its draw list.
pub fn parse_frames(text: &str) -> Result<Vec<FrameSnapshot>, FrameError> {
    let mut out = Vec::new();
    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        let bad = |reason: String| FrameError::Malformed { line, reason };
        if raw.trim().is_empty() {
            continue;
        }
        let f: FrameLine = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        let digest = u64::from_str_radix(&f.digest, 16).map_err(|e| bad(format!("digest: {e}")))?;
        let snap = FrameSnapshot::capture(f.tick, &f.drawlist);
        if snap.digest != digest {
            return Err(bad(format!(
                "digest {} does not match draw list ({})",
                f.digest,
                hex(snap.digest)
            )));
        }
        out.push(snap);
    }
    Ok(out)
}
