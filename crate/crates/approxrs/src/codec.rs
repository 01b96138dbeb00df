//! Little-endian binary serialization with a magic header and version.
//!
//! File layout: `MAGIC` (8 bytes), format version (u32), structure tag
//! (u32), then the structure body. Bodies are sequences of little-endian
//! integers; word arrays carry their length as a u64 prefix.

use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"APPRXRS\0";
pub const VERSION: u32 = 1;

/// Tag identifying which structure a file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Tag {
    PlainBitVector = 1,
    SparseBitVector = 2,
    PartialSums = 3,
    DRankSelectA = 4,
    RankDSelectA = 5,
    MultisetFixedM = 6,
    MultisetFixedMRd = 7,
    MultisetBoundedFreq = 8,
    SeqApprox = 9,
    SeqRankSelect = 10,
}

impl Tag {
    pub fn from_u32(v: u32) -> Option<Tag> {
        use Tag::*;
        Some(match v {
            1 => PlainBitVector,
            2 => SparseBitVector,
            3 => PartialSums,
            4 => DRankSelectA,
            5 => RankDSelectA,
            6 => MultisetFixedM,
            7 => MultisetFixedMRd,
            8 => MultisetBoundedFreq,
            9 => SeqApprox,
            10 => SeqRankSelect,
            _ => return None,
        })
    }
}

/// Structures that can be written to and read back from a byte stream.
pub trait Persist: Sized {
    const TAG: Tag;
    fn write_body(&self, w: &mut Writer);
    fn read_body(r: &mut Reader) -> Result<Self>;

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(&MAGIC);
        w.u32(VERSION);
        w.u32(Self::TAG as u32);
        self.write_body(&mut w);
        w.buf
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let tag = peek_tag(bytes)?;
        if tag != Self::TAG {
            return Err(Error::Format(format!("expected {:?}, found {:?}", Self::TAG, tag)));
        }
        let mut r = Reader::new(&bytes[16..]);
        let v = Self::read_body(&mut r)?;
        if !r.is_done() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(v)
    }
}

/// Validate the header and return the structure tag.
pub fn peek_tag(bytes: &[u8]) -> Result<Tag> {
    if bytes.len() < 16 || bytes[..8] != MAGIC {
        return Err(Error::Format("missing magic header".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let tag = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    Tag::from_u32(tag).ok_or_else(|| Error::Format(format!("unknown tag {tag}")))
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn words(&mut self, ws: &[u64]) {
        self.u64(ws.len() as u64);
        for &x in ws {
            self.u64(x);
        }
    }
    pub fn u16s(&mut self, ws: &[u16]) {
        self.u64(ws.len() as u64);
        for &x in ws {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub fn bad(&self, what: &str) -> Error {
        Error::Format(format!("bad {what} at byte {}", self.pos))
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < k {
            return Err(Error::Format("unexpected end of data".into()));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.bad("length"))
    }
    fn count(&mut self, elem: usize) -> Result<usize> {
        let k = self.usize()?;
        if k.checked_mul(elem).is_none_or(|b| b > self.buf.len() - self.pos) {
            return Err(self.bad("array length"));
        }
        Ok(k)
    }
    pub fn words(&mut self) -> Result<Vec<u64>> {
        let k = self.count(8)?;
        (0..k).map(|_| self.u64()).collect()
    }
    pub fn u16s(&mut self) -> Result<Vec<u16>> {
        let k = self.count(2)?;
        (0..k)
            .map(|_| Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_checks() {
        assert!(peek_tag(b"short").is_err());
        let mut b = MAGIC.to_vec();
        b.extend_from_slice(&2u32.to_le_bytes());
        b.extend_from_slice(&1u32.to_le_bytes());
        assert!(matches!(peek_tag(&b), Err(Error::Format(_))));
        b[8..12].copy_from_slice(&VERSION.to_le_bytes());
        assert_eq!(peek_tag(&b).unwrap(), Tag::PlainBitVector);
    }

    #[test]
    fn truncated_array_rejected() {
        let mut w = Writer::default();
        w.u64(1 << 40);
        let bytes = w.into_bytes();
        assert!(Reader::new(&bytes).words().is_err());
    }
}
