//! `OKSMPC v1` sample files.
//!
//! ```text
//! OKSMPC v1 <N> <T>\n
//! T*N*3 little-endian f32   frames, xyz interleaved, frame-major
//! N little-endian u32       labels
//! N little-endian u32       corr_ids
//! OKSM <len>\n<len bytes>   ground-truth OKSM document (UTF-8)
//! CAMERA <len>\n<len bytes> object-to-camera pose {rotation, translation}
//! ```

use std::path::Path;

use super::{DemoSequence, SynthError};
use crate::geometry::{PoseDoc, RigidTransform, Vec3};
use crate::model::{load_oksm, save_oksm};

pub const MAGIC: &str = "OKSMPC";

fn tagged_section(out: &mut Vec<u8>, tag: &str, body: &[u8]) {
    out.extend_from_slice(format!("{tag} {}\n", body.len()).as_bytes());
    out.extend_from_slice(body);
}

pub fn encode_sample(seq: &DemoSequence) -> Vec<u8> {
    let n = seq.point_count();
    let t = seq.frame_count();
    let mut out = Vec::with_capacity(32 + t * n * 12 + n * 8 + 4096);
    out.extend_from_slice(format!("{MAGIC} v1 {n} {t}\n").as_bytes());
    for frame in &seq.frames {
        for p in frame {
            for k in 0..3 {
                out.extend_from_slice(&(p[k] as f32).to_le_bytes());
            }
        }
    }
    for l in &seq.labels {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for c in &seq.corr_ids {
        out.extend_from_slice(&c.to_le_bytes());
    }
    tagged_section(&mut out, "OKSM", save_oksm(&seq.ground_truth).as_bytes());
    let cam = serde_json::to_string(&PoseDoc::from(&seq.camera_pose)).expect("pose serializes");
    tagged_section(&mut out, "CAMERA", cam.as_bytes());
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Result<&'a str, SynthError> {
        let rest = &self.buf[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| fmt_err(format!("missing newline at byte {}", self.pos)))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| fmt_err(format!("non-UTF-8 line at byte {}", self.pos)))?;
        self.pos += end + 1;
        Ok(line)
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], SynthError> {
        if self.buf.len() - self.pos < len {
            return Err(fmt_err(format!(
                "truncated: need {len} bytes at byte {}",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn section(&mut self, tag: &str) -> Result<&'a str, SynthError> {
        let line = self.line()?;
        let len = line
            .strip_prefix(tag)
            .and_then(|r| r.strip_prefix(' '))
            .and_then(|r| r.parse::<usize>().ok())
            .ok_or_else(|| fmt_err(format!("expected `{tag} <len>`, found `{line}`")))?;
        std::str::from_utf8(self.take(len)?).map_err(|_| fmt_err(format!("{tag} section is not UTF-8")))
    }
}

fn fmt_err(m: String) -> SynthError {
    SynthError::Format(m)
}

pub fn decode_sample(bytes: &[u8]) -> Result<DemoSequence, SynthError> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    let header = cur.line()?;
    let fields: Vec<&str> = header.split(' ').collect();
    let (n, t) = match fields.as_slice() {
        [MAGIC, "v1", n, t] => (
            n.parse::<usize>().map_err(|_| fmt_err(format!("bad N in `{header}`")))?,
            t.parse::<usize>().map_err(|_| fmt_err(format!("bad T in `{header}`")))?,
        ),
        _ => return Err(fmt_err(format!("bad header `{header}`"))),
    };

    let floats = cur.take(t * n * 12)?;
    let mut values = floats
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64);
    let mut frames = Vec::with_capacity(t);
    for _ in 0..t {
        let frame: Vec<Vec3> = (0..n)
            .map(|_| {
                let x = values.next().unwrap();
                let y = values.next().unwrap();
                let z = values.next().unwrap();
                Vec3::new(x, y, z)
            })
            .collect();
        frames.push(frame);
    }
    let read_u32s = |raw: &[u8]| -> Vec<u32> {
        raw.chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect()
    };
    let labels = read_u32s(cur.take(n * 4)?);
    let corr_ids = read_u32s(cur.take(n * 4)?);

    let ground_truth = load_oksm(cur.section("OKSM")?)
        .map_err(|e| fmt_err(format!("embedded OKSM: {e}")))?;
    let cam: PoseDoc = serde_json::from_str(cur.section("CAMERA")?)
        .map_err(|e| fmt_err(format!("camera pose: {e}")))?;

    let seq = DemoSequence {
        frames,
        labels,
        corr_ids,
        camera_pose: RigidTransform::from(&cam),
        ground_truth,
    };
    seq.validate()?;
    Ok(seq)
}

pub fn write_sample(path: &Path, seq: &DemoSequence) -> Result<(), SynthError> {
    std::fs::write(path, encode_sample(seq)).map_err(|e| SynthError::io(path, e))
}

pub fn read_sample(path: &Path) -> Result<DemoSequence, SynthError> {
    let bytes = std::fs::read(path).map_err(|e| SynthError::io(path, e))?;
    decode_sample(&bytes)
}
