//! Binary polynomials, the octal/hex notations used for parity-check and CRC
//! polynomials, and CRC encoding/checking.
//!
//! Coefficients are stored lowest power first (bit `i` of the word is the
//! coefficient of `x^i`). Textual forms are written highest power first, so
//! `"13"` (octal) is `x^3 + x + 1` and `"0xD"` (hex) is `x^3 + x^2 + 1`.
//!
//! Bit sequences are `u8` slices holding 0/1. When a sequence is read as a
//! polynomial its first element is the highest-order coefficient.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported degree for parity-check and CRC polynomials.
pub const MAX_DEGREE: u32 = 16;

/// A polynomial over GF(2) of degree at most 31.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryPolynomial {
    bits: u32,
}

impl BinaryPolynomial {
    pub const ZERO: Self = Self { bits: 0 };
    pub const ONE: Self = Self { bits: 1 };

    pub const fn from_bits(bits: u32) -> Self {
        Self { bits }
    }

    /// Builds a polynomial from coefficients listed lowest power first.
    pub fn from_coefficients(coeffs: &[u8]) -> Self {
        assert!(coeffs.len() <= 32, "at most 32 coefficients");
        let bits = coeffs
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &c)| acc | (u32::from(c & 1) << i));
        Self { bits }
    }

    pub const fn bits(self) -> u32 {
        self.bits
    }

    pub const fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Degree of the polynomial; the zero polynomial reports 0.
    pub const fn degree(self) -> u32 {
        if self.bits == 0 {
            0
        } else {
            31 - self.bits.leading_zeros()
        }
    }

    pub const fn coeff(self, power: u32) -> u8 {
        if power >= 32 {
            0
        } else {
            ((self.bits >> power) & 1) as u8
        }
    }

    /// Coefficients lowest power first, `degree + 1` entries.
    pub fn coefficients(self) -> Vec<u8> {
        (0..=self.degree()).map(|i| self.coeff(i)).collect()
    }

    pub const fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Reverses the coefficient order over `degree + 1` positions.
    pub fn reciprocal(self) -> Self {
        if self.bits == 0 {
            return self;
        }
        let d = self.degree();
        Self {
            bits: self.bits.reverse_bits() >> (31 - d),
        }
    }
}

impl fmt::Debug for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPolynomial({self})")
    }
}

impl fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return f.write_str("0");
        }
        let mut first = true;
        for p in (0..=self.degree()).rev() {
            if self.coeff(p) == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match p {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{p}")?,
            }
        }
        Ok(())
    }
}

fn parse_radix(text: &str, radix: u32) -> Result<u64> {
    if text.is_empty() {
        return Err(Error::EmptyLiteral);
    }
    let mut value: u64 = 0;
    for c in text.chars() {
        let d = c.to_digit(radix).ok_or(Error::InvalidDigit(c))?;
        value = value
            .checked_mul(u64::from(radix))
            .and_then(|x| x.checked_add(u64::from(d)))
            .ok_or_else(|| Error::WidthOverflow {
                text: text.to_string(),
                bits: 64,
                max: 32,
            })?;
    }
    Ok(value)
}

fn bit_width(value: u64) -> u32 {
    64 - value.leading_zeros()
}

/// Parses an octal parity-check polynomial `[h_v, ..., h_0]` of degree at most `v`.
pub fn parse_octal(text: &str, v: u32) -> Result<BinaryPolynomial> {
    if v > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(v));
    }
    let text = text.trim();
    let value = parse_radix(text, 8)?;
    let bits = bit_width(value);
    if bits > v + 1 {
        return Err(Error::WidthOverflow {
            text: text.to_string(),
            bits,
            max: v + 1,
        });
    }
    Ok(BinaryPolynomial::from_bits(value as u32))
}

pub fn format_octal(poly: BinaryPolynomial) -> String {
    format!("{:o}", poly.bits())
}

/// A degree-`m` CRC polynomial `1 + p_1 x + ... + x^m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrcPolynomial {
    poly: BinaryPolynomial,
}

impl CrcPolynomial {
    pub fn new(poly: BinaryPolynomial) -> Result<Self> {
        let m = poly.degree();
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(m));
        }
        if poly.coeff(0) != 1 {
            return Err(Error::CrcEndpoints(format!("0x{:X}", poly.bits())));
        }
        Ok(Self { poly })
    }

    pub fn poly(self) -> BinaryPolynomial {
        self.poly
    }

    pub fn degree(self) -> u32 {
        self.poly.degree()
    }

    /// Every degree-`m` polynomial with `p_0 = p_m = 1`, in ascending hex order.
    pub fn candidates(m: u32) -> Result<Vec<CrcPolynomial>> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(m));
        }
        let top = 1u32 << m;
        Ok((0..(1u32 << (m - 1)))
            .map(|mid| Self {
                poly: BinaryPolynomial::from_bits(top | (mid << 1) | 1),
            })
            .collect())
    }

    /// `x^i mod p` for `i = 0..len`, each as a coefficient word.
    pub fn power_residues(self, len: usize) -> Vec<u32> {
        let m = self.degree();
        let p = self.poly.bits();
        let mut out = Vec::with_capacity(len);
        let mut r = 1u32;
        for _ in 0..len {
            out.push(r);
            r <<= 1;
            if r >> m & 1 == 1 {
                r ^= p;
            }
        }
        out
    }
}

impl fmt::Display for CrcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:X}", self.poly.bits())
    }
}

impl fmt::Debug for CrcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CrcPolynomial({self})")
    }
}

/// Parses a hex CRC polynomial such as `"0x59F"` and checks it has degree `m`.
pub fn parse_hex_crc(text: &str, m: u32) -> Result<CrcPolynomial> {
    let raw = text.trim();
    let digits = raw
        .strip_prefix("0x")
        .or_else(|| raw.strip_prefix("0X"))
        .unwrap_or(raw);
    let value = parse_radix(digits, 16)?;
    if value > u64::from(u32::MAX) {
        return Err(Error::WidthOverflow {
            text: raw.to_string(),
            bits: bit_width(value),
            max: MAX_DEGREE + 1,
        });
    }
    let poly = BinaryPolynomial::from_bits(value as u32);
    if poly.is_zero() || poly.coeff(0) != 1 {
        return Err(Error::CrcEndpoints(raw.to_string()));
    }
    if poly.degree() != m {
        return Err(Error::CrcDegree {
            text: raw.to_string(),
            found: poly.degree(),
            expected: m,
        });
    }
    CrcPolynomial::new(poly)
}

/// Parses a hex CRC polynomial and infers its degree from the leading bit.
pub fn parse_hex_crc_any(text: &str) -> Result<CrcPolynomial> {
    let raw = text.trim();
    let digits = raw
        .strip_prefix("0x")
        .or_else(|| raw.strip_prefix("0X"))
        .unwrap_or(raw);
    let value = parse_radix(digits, 16)?;
    let m = bit_width(value).saturating_sub(1);
    parse_hex_crc(raw, m)
}

pub fn format_hex(p: CrcPolynomial) -> String {
    p.to_string()
}

/// Remainder of `dividend` (highest power first) modulo `divisor`.
///
/// The result has `deg(divisor)` entries, highest power first.
pub fn poly_mod(dividend: &[u8], divisor: BinaryPolynomial) -> Result<Vec<u8>> {
    if divisor.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let m = divisor.degree();
    let r = remainder_word(dividend, divisor);
    Ok((0..m).rev().map(|i| ((r >> i) & 1) as u8).collect())
}

fn remainder_word(dividend: &[u8], divisor: BinaryPolynomial) -> u32 {
    let m = divisor.degree();
    let p = divisor.bits();
    let mut r = 0u32;
    for &b in dividend {
        r = (r << 1) | u32::from(b & 1);
        if r >> m & 1 == 1 {
            r ^= p;
        }
    }
    r
}

/// Appends the `m` parity bits of `message * x^m mod p` to the message.
pub fn crc_encode(message: &[u8], p: CrcPolynomial) -> Vec<u8> {
    let m = p.degree() as usize;
    let mut out = Vec::with_capacity(message.len() + m);
    out.extend_from_slice(message);
    out.extend(std::iter::repeat_n(0, m));
    let r = remainder_word(&out, p.poly());
    for i in 0..m {
        out[message.len() + i] = ((r >> (m - 1 - i)) & 1) as u8;
    }
    out
}

/// True when `bits`, read as a polynomial, is divisible by `p`.
pub fn crc_check(bits: &[u8], p: CrcPolynomial) -> Result<bool> {
    let m = p.degree();
    if bits.len() <= m as usize {
        return Err(Error::SequenceTooShort {
            len: bits.len(),
            m,
        });
    }
    Ok(remainder_word(bits, p.poly()) == 0)
}
