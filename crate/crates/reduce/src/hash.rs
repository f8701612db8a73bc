use sha3::{Digest, Sha3_224, Sha3_256, Sha3_384, Sha3_512};

use crate::{ReduceError, ScalarValue};

/// SHA3 output length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HashBits {
    B224,
    #[default]
    B256,
    B384,
    B512,
}

impl HashBits {
    pub const ALL: [HashBits; 4] = [HashBits::B224, HashBits::B256, HashBits::B384, HashBits::B512];

    pub fn bits(self) -> u32 {
        match self {
            HashBits::B224 => 224,
            HashBits::B256 => 256,
            HashBits::B384 => 384,
            HashBits::B512 => 512,
        }
    }

    pub fn from_bits(bits: u32) -> Result<Self, ReduceError> {
        HashBits::ALL
            .into_iter()
            .find(|b| b.bits() == bits)
            .ok_or_else(|| {
                ReduceError::param(format!(
                    "hash output must be 224, 256, 384 or 512 bits, got {bits}"
                ))
            })
    }

    pub fn hex_len(self) -> usize {
        self.bits() as usize / 4
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HashParams {
    pub output_bits: HashBits,
}

impl HashParams {
    pub fn new(output_bits: HashBits) -> Self {
        HashParams { output_bits }
    }
}

fn digest_hex(bytes: &[u8], bits: HashBits) -> String {
    match bits {
        HashBits::B224 => hex::encode(Sha3_224::digest(bytes)),
        HashBits::B256 => hex::encode(Sha3_256::digest(bytes)),
        HashBits::B384 => hex::encode(Sha3_384::digest(bytes)),
        HashBits::B512 => hex::encode(Sha3_512::digest(bytes)),
    }
}

/// Lowercase hex SHA3 digest of the text's UTF-8 bytes. `Null` passes through.
pub fn hash_value(value: &ScalarValue, params: &HashParams) -> Result<ScalarValue, ReduceError> {
    match value {
        ScalarValue::Text(s) => Ok(ScalarValue::Text(digest_hex(s.as_bytes(), params.output_bits))),
        ScalarValue::Null => Ok(ScalarValue::Null),
        other => Err(ReduceError::Type {
            transform: "hash",
            found: other.type_name(),
        }),
    }
}
