use std::collections::HashMap;

use sha2::{Digest, Sha256};

use super::ProtocolError;

/// Something answering byte-string queries with fixed-width outputs.
pub trait RandomOracle {
    fn output_bits(&self) -> usize;
    fn query(&mut self, q: &[u8]) -> Vec<u8>;
    fn query_count(&self) -> usize;
}

/// Lazily sampled random function. Answers are a SHA-256 counter-mode
/// expansion of `(seed, salt ‖ query)`, so two tables with the same seed and
/// salt are the same function. Output bits are big-endian within the byte
/// string; unused low bits of the last byte are zero.
#[derive(Debug, Clone)]
pub struct OracleTable {
    seed: u64,
    salt: Option<Vec<u8>>,
    output_bits: usize,
    programmed: HashMap<Vec<u8>, Vec<u8>>,
    query_count: usize,
}

impl OracleTable {
    pub fn new(seed: u64, output_bits: usize) -> Result<Self, ProtocolError> {
        if output_bits == 0 {
            return Err(ProtocolError::InvalidParams("oracle output width must be positive".into()));
        }
        Ok(Self { seed, salt: None, output_bits, programmed: HashMap::new(), query_count: 0 })
    }

    /// `H(z, ·)`: the same function with every query prefixed by `salt`.
    pub fn with_salt(&self, salt: &[u8]) -> Self {
        let mut t = self.clone();
        t.salt = Some(salt.to_vec());
        t.query_count = 0;
        t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn salt(&self) -> Option<&[u8]> {
        self.salt.as_deref()
    }

    pub fn output_bytes(&self) -> usize {
        self.output_bits.div_ceil(8)
    }

    fn full_query(&self, q: &[u8]) -> Vec<u8> {
        match &self.salt {
            Some(z) => [z.as_slice(), q].concat(),
            None => q.to_vec(),
        }
    }

    fn expand(&self, full: &[u8]) -> Vec<u8> {
        let n = self.output_bytes();
        let mut out = Vec::with_capacity(n + 32);
        let mut ctr = 0u32;
        while out.len() < n {
            let mut h = Sha256::new();
            h.update(self.seed.to_be_bytes());
            h.update((full.len() as u64).to_be_bytes());
            h.update(full);
            h.update(ctr.to_be_bytes());
            out.extend_from_slice(&h.finalize());
            ctr += 1;
        }
        out.truncate(n);
        mask_tail(&mut out, self.output_bits);
        out
    }

    /// Fixes the answer to `q`. Only allowed before the first query.
    pub fn program(&mut self, q: &[u8], value: &[u8]) -> Result<(), ProtocolError> {
        if self.query_count > 0 {
            return Err(ProtocolError::OracleConflict);
        }
        if value.len() != self.output_bytes() {
            return Err(ProtocolError::WidthMismatch { expected: self.output_bytes() * 8, found: value.len() * 8 });
        }
        let mut v = value.to_vec();
        mask_tail(&mut v, self.output_bits);
        self.programmed.insert(self.full_query(q), v);
        Ok(())
    }
}

impl RandomOracle for OracleTable {
    fn output_bits(&self) -> usize {
        self.output_bits
    }

    fn query(&mut self, q: &[u8]) -> Vec<u8> {
        self.query_count += 1;
        let full = self.full_query(q);
        match self.programmed.get(&full) {
            Some(v) => v.clone(),
            None => self.expand(&full),
        }
    }

    fn query_count(&self) -> usize {
        self.query_count
    }
}

/// `H[z, G]`: answers `G(x)` on queries `z ‖ x` and `H(q)` on everything else.
#[derive(Debug, Clone)]
pub struct ReprogrammedOracle {
    pub base: OracleTable,
    pub salt: Vec<u8>,
    pub fresh: OracleTable,
}

impl ReprogrammedOracle {
    pub fn new(base: OracleTable, salt: &[u8], fresh: OracleTable) -> Result<Self, ProtocolError> {
        if base.output_bits != fresh.output_bits {
            return Err(ProtocolError::WidthMismatch { expected: base.output_bits, found: fresh.output_bits });
        }
        Ok(Self { base, salt: salt.to_vec(), fresh })
    }
}

impl RandomOracle for ReprogrammedOracle {
    fn output_bits(&self) -> usize {
        self.base.output_bits
    }

    fn query(&mut self, q: &[u8]) -> Vec<u8> {
        match q.strip_prefix(self.salt.as_slice()) {
            Some(rest) => self.fresh.query(rest),
            None => self.base.query(q),
        }
    }

    fn query_count(&self) -> usize {
        self.base.query_count + self.fresh.query_count
    }
}

fn mask_tail(bytes: &mut [u8], bits: usize) {
    let extra = bytes.len() * 8 - bits;
    if extra > 0 {
        if let Some(last) = bytes.last_mut() {
            *last &= 0xffu8 << extra;
        }
    }
}

/// First `n` bits of `bytes`, most significant first, one per byte.
pub fn leading_bits(bytes: &[u8], n: usize) -> Vec<u8> {
    (0..n).map(|k| (bytes[k / 8] >> (7 - k % 8)) & 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lazy_sampling_is_deterministic() {
        let mut a = OracleTable::new(7, 20).unwrap();
        let mut b = OracleTable::new(7, 20).unwrap();
        let x = a.query(b"hello");
        assert_eq!(x, a.query(b"hello"));
        assert_eq!(x, b.query(b"hello"));
        assert_eq!(a.query_count(), 2);
        assert_eq!(x.len(), 3);
        assert_eq!(x[2] & 0x0f, 0);
        assert_ne!(x, OracleTable::new(8, 20).unwrap().query(b"hello"));
    }

    #[test]
    fn programming_only_before_first_query() {
        let mut t = OracleTable::new(1, 8).unwrap();
        t.program(b"q", &[0xab]).unwrap();
        assert_eq!(t.query(b"q"), vec![0xab]);
        assert_eq!(t.program(b"r", &[0]), Err(ProtocolError::OracleConflict));
        assert!(OracleTable::new(1, 8).unwrap().program(b"q", &[0, 0]).is_err());
    }

    #[test]
    fn salted_table_prefixes_queries() {
        let mut h = OracleTable::new(3, 64).unwrap();
        let mut hz = h.with_salt(b"zz");
        assert_eq!(hz.query(b"x"), h.query(b"zzx"));
        assert_eq!(hz.salt(), Some(&b"zz"[..]));
    }

    // H[z,G](z,·) = G(·) and H[z,G](z',·) = H(z',·), over every 4-bit salt
    #[test]
    fn reprogramming_is_exact_on_small_salt_domain() {
        for z in 0u8..16 {
            let h = OracleTable::new(11, 16).unwrap();
            let g = OracleTable::new(12, 16).unwrap();
            let mut hzg = ReprogrammedOracle::new(h.clone(), &[z], g.clone()).unwrap();
            for z2 in 0u8..16 {
                for x in 0u8..16 {
                    let got = hzg.query(&[z2, x]);
                    if z2 == z {
                        assert_eq!(got, g.clone().query(&[x]));
                    } else {
                        assert_eq!(got, h.clone().query(&[z2, x]));
                    }
                }
            }
        }
    }

    #[test]
    fn leading_bits_are_big_endian() {
        assert_eq!(leading_bits(&[0b1010_0000, 0xff], 5), vec![1, 0, 1, 0, 0]);
        assert_eq!(leading_bits(&[0x00, 0x80], 9), vec![0, 0, 0, 0, 0, 0, 0, 0, 1]);
    }
}
