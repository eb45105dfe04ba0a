//! Binary SF-ETT files.
//!
//! Layout: the six bytes `SFETT1`, then little-endian `u64`s
//! `d, d_t, n_1..n_d, rtt_1..rtt_{d-1}, rt_1..rt_{d_t}, rt_s`, then
//! little-endian `f64`s: TT cores in order, the distinct factors, and the
//! shared factor, each block first-index-fastest.

use std::fs;
use std::path::Path;

use sfett_core::{DenseTensor, Error, Mat, Result, SfEttTensor, TtTensor};

pub const MAGIC: &[u8; 6] = b"SFETT1";

// generous bound so a corrupt header cannot request absurd allocations
const MAX_ORDER: u64 = 4096;

pub fn encode(x: &SfEttTensor) -> Vec<u8> {
    let d = x.order();
    let ranks = x.ranks();
    let mut header: Vec<u64> = vec![d as u64, x.d_t() as u64];
    header.extend(x.dims().iter().map(|&n| n as u64));
    header.extend(ranks.tt.iter().map(|&r| r as u64));
    header.extend(ranks.tucker.iter().map(|&r| r as u64));
    header.push(ranks.shared as u64);

    let mut out = MAGIC.to_vec();
    for h in header {
        out.extend_from_slice(&h.to_le_bytes());
    }
    let blocks = x
        .core()
        .cores()
        .iter()
        .map(|c| c.data())
        .chain(x.factors().iter().map(|f| f.as_slice()))
        .chain(std::iter::once(x.shared_factor().as_slice()));
    for block in blocks {
        for v in block {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn u64(&mut self) -> Result<u64> {
        let end = self.pos + 8;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated header".into()))?;
        self.pos = end;
        Ok(u64::from_le_bytes(bytes.try_into().unwrap()))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let v = self.u64()?;
        if v == 0 {
            return Err(Error::Format(format!("{what} is zero")));
        }
        usize::try_from(v).map_err(|_| Error::Format(format!("{what} does not fit in usize")))
    }

    fn f64s(&mut self, count: usize) -> Vec<f64> {
        let out = self.buf[self.pos..self.pos + 8 * count]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        self.pos += 8 * count;
        out
    }
}

pub fn decode(buf: &[u8]) -> Result<SfEttTensor> {
    if buf.len() < MAGIC.len() || &buf[..MAGIC.len()] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut rd = Reader { buf, pos: MAGIC.len() };
    let d = rd.u64()?;
    let d_t = rd.u64()?;
    if !(2..=MAX_ORDER).contains(&d) || d_t >= d {
        return Err(Error::Format(format!("order {d} with d_t = {d_t}")));
    }
    let (d, d_t) = (d as usize, d_t as usize);
    let dims = (0..d).map(|_| rd.usize("mode size")).collect::<Result<Vec<_>>>()?;
    let tt = (0..d - 1).map(|_| rd.usize("TT rank")).collect::<Result<Vec<_>>>()?;
    let tucker = (0..d_t).map(|_| rd.usize("Tucker rank")).collect::<Result<Vec<_>>>()?;
    let shared = rd.usize("shared rank")?;
    if dims[d_t..].iter().any(|&n| n != dims[d_t]) {
        return Err(Error::Format("shared modes differ in size".into()));
    }

    let core_dims: Vec<usize> = (0..d).map(|k| if k < d_t { tucker[k] } else { shared }).collect();
    let mut bounds = vec![1];
    bounds.extend(&tt);
    bounds.push(1);
    let mut sizes: Vec<[usize; 3]> =
        (0..d).map(|k| [bounds[k], core_dims[k], bounds[k + 1]]).collect();
    sizes.extend((0..d_t).map(|k| [dims[k], tucker[k], 1]));
    sizes.push([dims[d_t], shared, 1]);
    let mut expected: usize = 0;
    for s in &sizes {
        let n = s
            .iter()
            .try_fold(1usize, |acc, &v| acc.checked_mul(v))
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Format("block size overflows".into()))?;
        expected = expected
            .checked_add(n)
            .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    }
    let payload = buf.len() - rd.pos;
    if payload != expected {
        return Err(Error::Format(format!("payload has {payload} bytes, header implies {expected}")));
    }

    let cores = sizes[..d]
        .iter()
        .map(|s| DenseTensor::new(s.to_vec(), rd.f64s(s.iter().product())))
        .collect::<Result<Vec<_>>>()?;
    let mut mats: Vec<Mat> = sizes[d..]
        .iter()
        .map(|s| Mat::from_vec(s[0], s[1], rd.f64s(s[0] * s[1])))
        .collect();
    let shared_factor = mats.pop().unwrap();
    SfEttTensor::new(TtTensor::new(cores)?, mats, shared_factor, d_t)
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn save(path: impl AsRef<Path>, x: &SfEttTensor) -> Result<()> {
    fs::write(path, encode(x))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<SfEttTensor> {
    decode(&fs::read(path)?)
}
