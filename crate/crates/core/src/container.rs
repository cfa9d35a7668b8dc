//! Self-describing complex sample container.
//!
//! Layout (little-endian): a 64-byte header followed by `rows * cols`
//! interleaved `f32` (re, im) pairs in row-major order.
//!
//! | offset | type   | field        |
//! |--------|--------|--------------|
//! | 0      | [u8;8] | `JRCCPLX\0`  |
//! | 8      | u32    | version (1)  |
//! | 12     | u32    | kind         |
//! | 16     | u64    | rows         |
//! | 24     | u64    | cols         |
//! | 32     | f64    | sample rate (along a row), Hz |
//! | 40     | f64    | row rate, Hz |
//! | 48     | f64    | row origin, s |
//! | 56     | f64    | column origin, s |

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub const MAGIC: [u8; 8] = *b"JRCCPLX\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum ContainerKind {
    Waveform = 1,
    Raster = 2,
    Image = 3,
}

impl ContainerKind {
    fn from_u32(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Self::Waveform),
            2 => Ok(Self::Raster),
            3 => Ok(Self::Image),
            _ => Err(Error::Format(format!("unknown container kind {v}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainerHeader {
    pub kind: ContainerKind,
    pub rows: u64,
    pub cols: u64,
    pub sample_rate: f64,
    pub row_rate: f64,
    pub row_origin: f64,
    pub col_origin: f64,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..8].copy_from_slice(&MAGIC);
        b[8..12].copy_from_slice(&VERSION.to_le_bytes());
        b[12..16].copy_from_slice(&(self.kind as u32).to_le_bytes());
        b[16..24].copy_from_slice(&self.rows.to_le_bytes());
        b[24..32].copy_from_slice(&self.cols.to_le_bytes());
        b[32..40].copy_from_slice(&self.sample_rate.to_le_bytes());
        b[40..48].copy_from_slice(&self.row_rate.to_le_bytes());
        b[48..56].copy_from_slice(&self.row_origin.to_le_bytes());
        b[56..64].copy_from_slice(&self.col_origin.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8; HEADER_LEN]) -> Result<Self> {
        if b[0..8] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        Ok(Self {
            kind: ContainerKind::from_u32(u32_at(12))?,
            rows: u64_at(16),
            cols: u64_at(24),
            sample_rate: f64_at(32),
            row_rate: f64_at(40),
            row_origin: f64_at(48),
            col_origin: f64_at(56),
        })
    }
}

pub fn write_container<W: Write, T: Real>(mut w: W, header: &ContainerHeader, data: &[Cplx<T>]) -> Result<()> {
    if data.len() as u64 != header.rows * header.cols {
        return Err(Error::Format(format!(
            "{} samples do not fill {}x{}",
            data.len(),
            header.rows,
            header.cols
        )));
    }
    w.write_all(&header.to_bytes())?;
    let mut buf = Vec::with_capacity(data.len() * 8);
    for s in data {
        buf.extend_from_slice(&(s.re.as_f64() as f32).to_le_bytes());
        buf.extend_from_slice(&(s.im.as_f64() as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_container<R: Read, T: Real>(mut r: R) -> Result<(ContainerHeader, Vec<Cplx<T>>)> {
    let mut hb = [0u8; HEADER_LEN];
    r.read_exact(&mut hb)?;
    let header = ContainerHeader::from_bytes(&hb)?;
    let n = usize::try_from(header.rows * header.cols).map_err(|_| Error::Format("dimensions overflow".into()))?;
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    let data = buf
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[0..4].try_into().unwrap());
            let im = f32::from_le_bytes(c[4..8].try_into().unwrap());
            Cplx::new(T::lit(re as f64), T::lit(im as f64))
        })
        .collect();
    Ok((header, data))
}

pub fn save_container<T: Real>(path: &Path, header: &ContainerHeader, data: &[Cplx<T>]) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_container(f, header, data)
}

pub fn load_container<T: Real>(path: &Path) -> Result<(ContainerHeader, Vec<Cplx<T>>)> {
    read_container(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> ContainerHeader {
        ContainerHeader {
            kind: ContainerKind::Raster,
            rows: 2,
            cols: 3,
            sample_rate: 200e6,
            row_rate: 863.0,
            row_origin: -0.68,
            col_origin: 1.2e-1,
        }
    }

    #[test]
    fn round_trip() {
        let data: Vec<Cplx<f64>> = (0..6).map(|i| Cplx::new(i as f64, -0.5 * i as f64)).collect();
        let mut bytes = Vec::new();
        write_container(&mut bytes, &header(), &data).unwrap();
        assert_eq!(bytes.len(), 64 + 6 * 8);
        assert_eq!(&bytes[0..8], b"JRCCPLX\0");
        let (h, back) = read_container::<_, f64>(bytes.as_slice()).unwrap();
        assert_eq!(h, header());
        assert_eq!(back, data);
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = Vec::new();
        write_container(&mut bytes, &header(), &[Cplx::new(0.0f32, 0.0); 6]).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_container::<_, f32>(bad.as_slice()).is_err());
        let mut bad = bytes.clone();
        bad[12] = 9;
        assert!(read_container::<_, f32>(bad.as_slice()).is_err());
        assert!(read_container::<_, f32>(&bytes[..70]).is_err());
        assert!(write_container(Vec::new(), &header(), &[Cplx::new(0.0f32, 0.0); 5]).is_err());
    }
}
