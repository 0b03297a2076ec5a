use std::io::{self, Read, Write};

use super::simulate::{WalkSample, WalkSeed};
use crate::error::{Error, Result};

pub const DUMP_MAGIC: [u8; 4] = *b"EWLK";
pub const DUMP_VERSION: u32 = 1;
pub const DUMP_HEADER_LEN: usize = 64;

// Header layout, little-endian:
//   0..4 magic, 4..8 version, 8..16 N, 16..24 master seed, 24..32 stream,
//   32..64 zero. Followed by ceil(N/64) u64 words, bit k-1 set iff X_k = +1.

/// One walk read back from a binary dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub version: u32,
    pub len: usize,
    pub seed: WalkSeed,
    pub words: Vec<u64>,
}

impl StepRecord {
    pub fn step(&self, k: usize) -> i8 {
        let b = k - 1;
        if (self.words[b / 64] >> (b % 64)) & 1 == 1 {
            1
        } else {
            -1
        }
    }
}

pub fn write_steps<W: Write, P: Copy>(mut w: W, sample: &WalkSample<P>) -> io::Result<()> {
    let mut h = [0u8; DUMP_HEADER_LEN];
    h[0..4].copy_from_slice(&DUMP_MAGIC);
    h[4..8].copy_from_slice(&DUMP_VERSION.to_le_bytes());
    h[8..16].copy_from_slice(&(sample.len() as u64).to_le_bytes());
    h[16..24].copy_from_slice(&sample.seed.master.to_le_bytes());
    h[24..32].copy_from_slice(&sample.seed.stream.to_le_bytes());
    w.write_all(&h)?;
    for word in sample.packed_steps() {
        w.write_all(&word.to_le_bytes())?;
    }
    Ok(())
}

/// Next record of a dump, or `None` at a clean end of input.
pub fn read_steps<R: Read>(mut r: R) -> Result<Option<StepRecord>> {
    let mut h = [0u8; DUMP_HEADER_LEN];
    let mut got = 0;
    while got < h.len() {
        match r.read(&mut h[got..])? {
            0 if got == 0 => return Ok(None),
            0 => return Err(Error::Io(io::ErrorKind::UnexpectedEof.into())),
            n => got += n,
        }
    }
    if h[0..4] != DUMP_MAGIC {
        return Err(Error::Config("walk dump does not start with EWLK".into()));
    }
    let u64_at = |i: usize| u64::from_le_bytes(h[i..i + 8].try_into().expect("8 bytes"));
    let version = u32::from_le_bytes(h[4..8].try_into().expect("4 bytes"));
    if version != DUMP_VERSION {
        return Err(Error::Config(format!("unsupported walk dump version {version}")));
    }
    let len = u64_at(8) as usize;
    let seed = WalkSeed { master: u64_at(16), stream: u64_at(24) };
    let mut words = vec![0u64; len.div_ceil(64)];
    let mut buf = [0u8; 8];
    for word in &mut words {
        r.read_exact(&mut buf)?;
        *word = u64::from_le_bytes(buf);
    }
    Ok(Some(StepRecord { version, len, seed, words }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CirclePoint, Rotation};
    use crate::markov::EnvironmentProfile;
    use crate::walk::{simulate_ensemble, WalkConfig};

    #[test]
    fn dump_round_trip() {
        let r = Rotation::golden();
        let prof = EnvironmentProfile::constant(0.5).unwrap();
        let ws = simulate_ensemble(&r, &prof, &[CirclePoint::new(0.2); 3], &WalkConfig::new(130), 5);
        let mut buf = Vec::new();
        for w in &ws {
            write_steps(&mut buf, w).unwrap();
        }
        assert_eq!(&buf[..4], b"EWLK");
        assert_eq!(buf.len(), 3 * (64 + 3 * 8));
        let mut cur = buf.as_slice();
        for w in &ws {
            let rec = read_steps(&mut cur).unwrap().unwrap();
            assert_eq!(rec.seed, w.seed);
            assert_eq!(rec.words, w.packed_steps());
            assert!((1..=130).all(|k| rec.step(k) == w.step(k)));
        }
        assert!(read_steps(&mut cur).unwrap().is_none());
        assert!(read_steps(&buf[..10]).is_err());
    }
}
