use serde::{Deserialize, Serialize};

use super::ProtocolError;

/// Problem instance. `yes` is the ground truth the toy protocol is keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub id: u64,
    pub yes: bool,
}

impl Instance {
    pub fn yes(id: u64) -> Self {
        Self { id, yes: true }
    }

    pub fn no(id: u64) -> Self {
        Self { id, yes: false }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = self.id.to_be_bytes().to_vec();
        v.push(self.yes as u8);
        v
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        if b.len() != 9 || b[8] > 1 {
            return Err(ProtocolError::Malformed("instance".into()));
        }
        Ok(Self { id: u64::from_be_bytes(b[..8].try_into().unwrap()), yes: b[8] == 1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Concatenation of `u32` big-endian length-prefixed fields.
pub fn encode_fields<T: AsRef<[u8]>>(fields: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for f in fields {
        let f = f.as_ref();
        out.extend_from_slice(&(f.len() as u32).to_be_bytes());
        out.extend_from_slice(f);
    }
    out
}

pub fn decode_fields(mut bytes: &[u8]) -> Result<Vec<Vec<u8>>, ProtocolError> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        if bytes.len() < 4 {
            return Err(ProtocolError::Malformed("truncated length prefix".into()));
        }
        let n = u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize;
        bytes = &bytes[4..];
        if bytes.len() < n {
            return Err(ProtocolError::Malformed("truncated field".into()));
        }
        out.push(bytes[..n].to_vec());
        bytes = &bytes[n..];
    }
    Ok(out)
}

/// Decodes exactly `n` fields.
pub fn decode_exact(bytes: &[u8], n: usize) -> Result<Vec<Vec<u8>>, ProtocolError> {
    let f = decode_fields(bytes)?;
    if f.len() != n {
        return Err(ProtocolError::Malformed(format!("expected {n} fields, found {}", f.len())));
    }
    Ok(f)
}

/// Messages of one run in order, plus the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub x: Instance,
    pub k: Vec<u8>,
    pub y: Vec<u8>,
    pub c: Vec<u8>,
    pub a: Vec<u8>,
    pub verdict: Verdict,
}

impl Transcript {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode_fields(&[
            self.x.to_bytes(),
            self.k.clone(),
            self.y.clone(),
            self.c.clone(),
            self.a.clone(),
            vec![self.verdict.is_accept() as u8],
        ])
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let f = decode_exact(b, 6)?;
        let verdict = match f[5].as_slice() {
            [1] => Verdict::Accept,
            [0] => Verdict::Reject,
            _ => return Err(ProtocolError::Malformed("verdict".into())),
        };
        Ok(Self {
            x: Instance::from_bytes(&f[0])?,
            k: f[1].clone(),
            y: f[2].clone(),
            c: f[3].clone(),
            a: f[4].clone(),
            verdict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::collection::vec;
    use proptest::prelude::*;

    #[test]
    fn empty_fields_survive() {
        let e: [&[u8]; 3] = [b"", b"a", b""];
        assert_eq!(decode_fields(&encode_fields(&e)).unwrap(), vec![vec![], b"a".to_vec(), vec![]]);
        assert!(decode_fields(&[0, 0, 0, 5, 1]).is_err());
        assert!(decode_fields(&[0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn transcript_round_trips(id in any::<u64>(), yes in any::<bool>(), k in vec(any::<u8>(), 0..40),
                                  y in vec(any::<u8>(), 0..40), c in vec(0u8..2, 0..20),
                                  a in vec(any::<u8>(), 0..40), acc in any::<bool>()) {
            let t = Transcript { x: Instance { id, yes }, k, y, c, a, verdict: Verdict::from_bool(acc) };
            let b = t.to_bytes();
            let back = Transcript::from_bytes(&b).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(back.to_bytes(), b);
        }
    }
}
