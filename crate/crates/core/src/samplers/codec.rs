//! Binary frame: `LVSK`, version (u16), tag (u8), seed (u128), salt (u32),
//! then a tag-specific payload. All integers and floats are little-endian.

use super::{GSampler, KMinState, KParetoFrontier, ParetoFrontier, ParetoTuple};
use crate::level::WeightFunction;
use crate::randomness::OracleHash;

pub const MAGIC: [u8; 4] = *b"LVSK";
pub const FORMAT_VERSION: u16 = 1;

const TAG_GSAMPLER: u8 = 1;
const TAG_PARETO: u8 = 2;
const TAG_WOR: u8 = 3;
const TAG_KPARETO: u8 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown sketch tag {0}")]
    UnknownTag(u8),
    #[error("frame truncated")]
    Truncated,
    #[error("{0} trailing bytes after frame")]
    TrailingBytes(usize),
    #[error("payload is not in canonical form: {0}")]
    NonCanonical(&'static str),
    #[error("invalid weight function in frame: {0}")]
    BadWeight(String),
}

/// Any sketch, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchFrame {
    GSampler(GSampler),
    Pareto(ParetoFrontier),
    Wor(KMinState),
    KPareto(KParetoFrontier),
}

struct Writer(Vec<u8>);

impl Writer {
    fn header(tag: u8, hash: OracleHash) -> Self {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(&MAGIC);
        w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        w.0.push(tag);
        w.0.extend_from_slice(&hash.seed.to_le_bytes());
        w.0.extend_from_slice(&hash.salt.to_le_bytes());
        w
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    fn string(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn tuples(&mut self, ts: &[ParetoTuple]) {
        self.u32(ts.len() as u32);
        for t in ts {
            self.f64(t.a);
            self.f64(t.b);
            self.u64(t.key);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(s)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.array()?))
    }
    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn u128(&mut self) -> Result<u128, CodecError> {
        Ok(u128::from_le_bytes(self.array()?))
    }
    fn f64(&mut self) -> Result<f64, CodecError> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn count(&mut self, item_size: usize) -> Result<usize, CodecError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(item_size) > self.buf.len() - self.pos {
            return Err(CodecError::Truncated);
        }
        Ok(n)
    }
    fn weight(&mut self) -> Result<WeightFunction, CodecError> {
        let n = self.count(1)?;
        let bytes = self.take(n)?;
        let s = std::str::from_utf8(bytes).map_err(|_| CodecError::BadWeight("not utf-8".into()))?;
        let g: WeightFunction = s.parse().map_err(|e| CodecError::BadWeight(format!("{e}")))?;
        if g.to_string() != s {
            return Err(CodecError::NonCanonical("weight function text"));
        }
        Ok(g)
    }
    fn tuples(&mut self) -> Result<Vec<ParetoTuple>, CodecError> {
        let n = self.count(24)?;
        (0..n)
            .map(|_| {
                Ok(ParetoTuple {
                    a: self.f64()?,
                    b: self.f64()?,
                    key: self.u64()?,
                })
            })
            .collect()
    }
}

impl SketchFrame {
    pub fn kind(&self) -> &'static str {
        match self {
            SketchFrame::GSampler(_) => "gsampler",
            SketchFrame::Pareto(_) => "pareto",
            SketchFrame::Wor(_) => "wor",
            SketchFrame::KPareto(_) => "kpareto",
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        match self {
            SketchFrame::GSampler(s) => {
                let mut w = Writer::header(TAG_GSAMPLER, s.hash());
                w.string(&s.g().to_string());
                match s.query() {
                    Some((key, h)) => {
                        w.0.push(1);
                        w.u64(key);
                        w.f64(h);
                    }
                    None => {
                        w.0.push(0);
                        w.u64(0);
                        w.f64(f64::INFINITY);
                    }
                }
                w.0
            }
            SketchFrame::Pareto(f) => {
                let mut w = Writer::header(TAG_PARETO, f.hash());
                w.tuples(f.tuples());
                w.0
            }
            SketchFrame::Wor(s) => {
                let mut w = Writer::header(TAG_WOR, s.hash());
                w.string(&s.g().to_string());
                w.u32(s.k() as u32);
                w.u32(s.entries().len() as u32);
                for &(key, h) in s.entries() {
                    w.u64(key);
                    w.f64(h);
                }
                w.0
            }
            SketchFrame::KPareto(f) => {
                let mut w = Writer::header(TAG_KPARETO, f.hash());
                w.u32(f.k() as u32);
                w.tuples(f.tuples());
                w.0
            }
        }
    }

    pub fn decode(bytes: &[u8]) -> Result<SketchFrame, CodecError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4).map_err(|_| CodecError::BadMagic)? != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let tag = r.u8()?;
        let hash = OracleHash::new(r.u128()?, r.u32()?);
        let bad = |e: super::SamplerError| CodecError::BadWeight(e.to_string());
        let frame = match tag {
            TAG_GSAMPLER => {
                let g = r.weight()?;
                let present = r.u8()?;
                let key = r.u64()?;
                let h = r.f64()?;
                let state = match present {
                    0 if key == 0 && h == f64::INFINITY => None,
                    1 if h >= 0.0 && h.is_finite() => Some((key, h)),
                    _ => return Err(CodecError::NonCanonical("gsampler state")),
                };
                SketchFrame::GSampler(GSampler::from_parts(g, hash, state).map_err(bad)?)
            }
            TAG_PARETO => {
                let tuples = r.tuples()?;
                if !ParetoFrontier::is_canonical(&tuples) {
                    return Err(CodecError::NonCanonical("pareto frontier order"));
                }
                SketchFrame::Pareto(ParetoFrontier::from_parts(hash, tuples))
            }
            TAG_WOR => {
                let g = r.weight()?;
                let k = r.u32()? as usize;
                let n = r.count(16)?;
                let mut entries = Vec::with_capacity(n);
                for _ in 0..n {
                    entries.push((r.u64()?, r.f64()?));
                }
                if k == 0 || !KMinState::is_canonical(k, &entries) {
                    return Err(CodecError::NonCanonical("wor entries"));
                }
                SketchFrame::Wor(KMinState::from_parts(g, k, hash, entries).map_err(bad)?)
            }
            TAG_KPARETO => {
                let k = r.u32()? as usize;
                let tuples = r.tuples()?;
                if k == 0 || !KParetoFrontier::is_canonical(k, &tuples) {
                    return Err(CodecError::NonCanonical("k-pareto tuples"));
                }
                SketchFrame::KPareto(KParetoFrontier::from_parts(k, hash, tuples).map_err(bad)?)
            }
            other => return Err(CodecError::UnknownTag(other)),
        };
        let rest = bytes.len() - r.pos;
        if rest != 0 {
            return Err(CodecError::TrailingBytes(rest));
        }
        Ok(frame)
    }
}
