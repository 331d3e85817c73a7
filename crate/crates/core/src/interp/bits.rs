use bitvec::prelude::*;
use thiserror::Error;

use crate::syntax::{HeaderTypeDecl, Value};

pub type Bits = BitVec<u8, Msb0>;

/// Input bit stream. Reads past the end yield zeros and are counted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bits: Bits,
    pos: usize,
    /// Number of zero bits supplied beyond the end of the packet.
    pub zero_extended: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed hex packet: {0}")]
pub struct HexError(String);

impl BitStream {
    pub fn from_bits(bits: Bits) -> Self {
        BitStream {
            bits,
            pos: 0,
            zero_extended: 0,
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitStream::from_bits(Bits::from_slice(bytes))
    }

    /// Hex digits, most significant bit first. Whitespace and `_` are ignored.
    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        let clean: String = s
            .trim()
            .trim_start_matches("0x")
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .collect();
        let mut bits = Bits::new();
        for c in clean.chars() {
            let d = c.to_digit(16).ok_or_else(|| HexError(format!("unexpected character `{c}`")))?;
            for i in (0..4).rev() {
                bits.push(d & (1 << i) != 0);
            }
        }
        Ok(BitStream::from_bits(bits))
    }

    pub fn remaining(&self) -> &BitSlice<u8, Msb0> {
        &self.bits[self.pos.min(self.bits.len())..]
    }

    /// Consume `n` bits, zero-extending past the end.
    pub fn take(&mut self, n: usize) -> Bits {
        let avail = self.bits.len().saturating_sub(self.pos);
        let real = n.min(avail);
        let mut out: Bits = self.bits[self.pos..self.pos + real].to_bitvec();
        out.resize(n, false);
        self.pos += real;
        self.zero_extended += n - real;
        out
    }
}

/// Field values of one header instance, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldRecord {
    pub values: Vec<Value>,
}

impl FieldRecord {
    pub fn get(&self, ht: &HeaderTypeDecl, field: &str) -> Option<Value> {
        ht.field(field).map(|(i, _)| self.values[i])
    }
}

pub fn bits_to_u128(bits: &BitSlice<u8, Msb0>) -> u128 {
    bits.iter().fold(0u128, |acc, b| (acc << 1) | (*b as u128))
}

pub fn u128_to_bits(value: u128, width: u32, out: &mut Bits) {
    for i in (0..width).rev() {
        out.push(value >> i & 1 == 1);
    }
}

/// Fill the fields of `ht` from the front of `input`.
pub fn deserialize(ht: &HeaderTypeDecl, input: &mut BitStream) -> FieldRecord {
    let values = ht
        .fields
        .iter()
        .map(|f| Value::bits(f.width, bits_to_u128(&input.take(f.width as usize))))
        .collect();
    FieldRecord { values }
}

/// Concatenate the fields of `r` in declaration order.
pub fn serialize(ht: &HeaderTypeDecl, r: &FieldRecord) -> Bits {
    let mut out = Bits::new();
    for (f, v) in ht.fields.iter().zip(&r.values) {
        let value = match v {
            Value::Bits { value, .. } => *value,
            Value::Bool(b) => *b as u128,
        };
        u128_to_bits(value, f.width, &mut out);
    }
    out
}

/// All fields zero.
pub fn init_value(ht: &HeaderTypeDecl) -> FieldRecord {
    FieldRecord {
        values: ht.fields.iter().map(|f| Value::bits(f.width, 0)).collect(),
    }
}

/// Hex rendering, padded with zero bits to a whole number of nibbles.
pub fn to_hex(bits: &BitSlice<u8, Msb0>) -> String {
    let mut s = String::with_capacity(bits.len() / 4 + 1);
    for chunk in bits.chunks(4) {
        let mut v = bits_to_u128(chunk) as u32;
        v <<= 4 - chunk.len();
        s.push(char::from_digit(v, 16).unwrap_or('0'));
    }
    s
}

pub fn to_bit_string(bits: &BitSlice<u8, Msb0>) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}
