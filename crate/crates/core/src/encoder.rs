//! Systematic `(omega, omega-1, v)` feedback convolutional encoding.
//!
//! The encoder is realised in observer canonical form of the parity-check
//! matrix: the state holds the `v` pending partial sums of the syndrome
//! former, and one output stream (the parity stream) is solved from the
//! check equation at every section. All remaining streams copy the inputs.

use std::fmt;

use crate::dual_trellis::ZtPatterns;
use crate::error::{Error, Result};
use crate::gf2poly::{parse_octal, BinaryPolynomial, MAX_DEGREE};

/// Largest number of output streams accepted.
pub const MAX_OMEGA: usize = 16;

/// Zero-terminated or tail-biting framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    #[serde(alias = "ZT")]
    Zt,
    #[serde(alias = "TB")]
    Tb,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Zt => "zt",
            Termination::Tb => "tb",
        })
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zt" => Ok(Termination::Zt),
            "tb" => Ok(Termination::Tb),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Parity-check matrix `H(D) = [h^(omega-1), ..., h^(0)]` of a rate
/// `(omega-1)/omega` code with overall constraint length `v`.
#[derive(Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    omega: usize,
    v: u32,
    /// `h[j]` is `h^(j)`, indexed by stream.
    h: Vec<BinaryPolynomial>,
    lambda: usize,
    parity: usize,
}

impl ParityCheckMatrix {
    /// Builds the matrix from polynomials listed as written, `h^(omega-1)` first.
    pub fn new(listed: &[BinaryPolynomial], v: u32) -> Result<Self> {
        let omega = listed.len();
        if !(2..=MAX_OMEGA).contains(&omega) {
            return Err(Error::InvalidCode(format!(
                "need between 2 and {MAX_OMEGA} polynomials, got {omega}"
            )));
        }
        if v == 0 || v > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(v));
        }
        let h: Vec<_> = listed.iter().rev().copied().collect();
        if let Some(p) = h.iter().find(|p| p.degree() > v) {
            return Err(Error::InvalidCode(format!("{p} has degree above v={v}")));
        }
        if !h.iter().any(|p| !p.is_zero() && p.degree() == v) {
            return Err(Error::InvalidCode(format!(
                "no polynomial has degree exactly v={v}"
            )));
        }
        let lambda = (0..omega)
            .rev()
            .find(|&j| h[j].coeff(0) == 1)
            .ok_or(Error::NoInstantResponse)?;
        let parity = if h[0].coeff(0) == 1 { 0 } else { lambda };
        Ok(Self {
            omega,
            v,
            h,
            lambda,
            parity,
        })
    }

    /// Parses an octal tuple such as `"(107,135,133,141)"`.
    pub fn parse(text: &str, v: u32) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let polys = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| parse_octal(s, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&polys, v)
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn rails(&self) -> usize {
        self.omega - 1
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn num_states(&self) -> usize {
        1 << self.v
    }

    /// `h^(j)` for stream `j`.
    pub fn stream_poly(&self, j: usize) -> BinaryPolynomial {
        self.h[j]
    }

    /// Maximum instant response order: the largest `j` with `h_0^(j) = 1`.
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Stream whose bit is solved from the check equation.
    ///
    /// Stream 0 when `h^(0)` has a constant term, otherwise `lambda`.
    pub fn parity_stream(&self) -> usize {
        self.parity
    }

    /// Output stream carrying input rail `r` (0-based).
    pub fn rail_stream(&self, r: usize) -> usize {
        if r < self.parity {
            r
        } else {
            r + 1
        }
    }

    /// Polynomials in written order, `h^(omega-1)` first, as octal.
    pub fn to_octal(&self) -> String {
        let parts: Vec<String> = self
            .h
            .iter()
            .rev()
            .map(|p| crate::gf2poly::format_octal(*p))
            .collect();
        format!("({})", parts.join(","))
    }

    /// One trellis section: consumes `omega-1` input bits, writes `omega`
    /// output bits in stream order and returns the next state.
    pub fn step(&self, state: EncoderState, inputs: &[u8], outputs: &mut [u8]) -> EncoderState {
        debug_assert_eq!(inputs.len(), self.omega - 1);
        debug_assert_eq!(outputs.len(), self.omega);
        let mut s = state.0;
        let mut rail = 0;
        for (j, out) in outputs.iter_mut().enumerate() {
            if j == self.parity {
                continue;
            }
            *out = inputs[rail] & 1;
            rail += 1;
            if *out == 1 {
                s ^= self.h[j].bits();
            }
        }
        let p = (s & 1) as u8;
        outputs[self.parity] = p;
        if p == 1 {
            s ^= self.h[self.parity].bits();
        }
        debug_assert_eq!(s & 1, 0);
        EncoderState(s >> 1)
    }

    /// Like [`step`](Self::step) but with the inputs packed into a word,
    /// rail `r` at bit `r`. Returns the next state and the output weight.
    pub fn step_packed(&self, state: EncoderState, inputs: u32) -> (EncoderState, u32, u32) {
        let mut s = state.0;
        let mut out = 0u32;
        for r in 0..self.rails() {
            if inputs >> r & 1 == 1 {
                let j = self.rail_stream(r);
                s ^= self.h[j].bits();
                out |= 1 << j;
            }
        }
        if s & 1 == 1 {
            s ^= self.h[self.parity].bits();
            out |= 1 << self.parity;
        }
        (EncoderState(s >> 1), out.count_ones(), out)
    }
}

impl fmt::Debug for ParityCheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H={} v={}", self.to_octal(), self.v)
    }
}

impl fmt::Display for ParityCheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_octal())
    }
}

/// Partial sums `[s_(v-1), ..., s_0]` of the observer-canonical register,
/// bit `i` holding `s_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EncoderState(pub u32);

/// Which zero-terminated paths count as codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZtCodeSet {
    /// Every zero-to-zero path of `N/omega` sections; the message is read
    /// from the payload sections and the tail inputs are free.
    #[default]
    AllPaths,
    /// Only paths whose tail equals the encoder's termination pattern.
    EncoderTail,
}

impl std::str::FromStr for ZtCodeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all-paths" | "all" => Ok(Self::AllPaths),
            "encoder-tail" | "encoder" => Ok(Self::EncoderTail),
            other => Err(Error::Config(format!("unknown ZT code set {other:?}"))),
        }
    }
}

/// How the CRC-encoded sequence is spread over the input rails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RailMap {
    /// Section `k` takes bits `(omega-1)k .. (omega-1)(k+1)`, rail by rail.
    #[default]
    Stepwise,
    /// Rail `r` takes the `r`-th contiguous block of `(K+m)/(omega-1)` bits.
    Blockwise,
}

impl RailMap {
    /// Index in the payload of the bit carried by rail `r` in section `k`.
    pub fn position(self, section: usize, rail: usize, rails: usize, sections: usize) -> usize {
        match self {
            RailMap::Stepwise => section * rails + rail,
            RailMap::Blockwise => rail * sections + section,
        }
    }
}

impl std::str::FromStr for RailMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stepwise" => Ok(RailMap::Stepwise),
            "blockwise" => Ok(RailMap::Blockwise),
            other => Err(Error::Config(format!("unknown rail map {other:?}"))),
        }
    }
}

/// Splits `bits` into per-section input tuples.
pub fn map_rails(bits: &[u8], rails: usize, policy: RailMap) -> Result<Vec<Vec<u8>>> {
    if rails == 0 || !bits.len().is_multiple_of(rails) {
        return Err(Error::Layout(format!(
            "{} bits cannot be split over {rails} rails",
            bits.len()
        )));
    }
    let sections = bits.len() / rails;
    Ok((0..sections)
        .map(|k| {
            (0..rails)
                .map(|r| bits[policy.position(k, r, rails, sections)])
                .collect()
        })
        .collect())
}

/// Inverse of [`map_rails`].
pub fn unmap_rails(tuples: &[Vec<u8>], policy: RailMap) -> Vec<u8> {
    let sections = tuples.len();
    let rails = tuples.first().map_or(0, Vec::len);
    let mut out = vec![0; sections * rails];
    for (k, t) in tuples.iter().enumerate() {
        for (r, &b) in t.iter().enumerate() {
            out[policy.position(k, r, rails, sections)] = b;
        }
    }
    out
}

/// Blocklength and rate bookkeeping for a CRC-aided frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub k: usize,
    pub m: usize,
    pub omega: usize,
    pub v: u32,
    pub mode: Termination,
}

impl FrameLayout {
    pub fn new(k: usize, m: usize, omega: usize, v: u32, mode: Termination) -> Result<Self> {
        if k == 0 {
            return Err(Error::Layout("K must be positive".into()));
        }
        if omega < 2 {
            return Err(Error::Layout("omega must be at least 2".into()));
        }
        if !(k + m).is_multiple_of(omega - 1) {
            return Err(Error::Layout(format!(
                "K+m={} is not divisible by omega-1={}",
                k + m,
                omega - 1
            )));
        }
        Ok(Self {
            k,
            m,
            omega,
            v,
            mode,
        })
    }

    /// Layout whose blocklength is exactly `n`; `K` is derived.
    pub fn for_blocklength(
        n: usize,
        m: usize,
        omega: usize,
        v: u32,
        mode: Termination,
    ) -> Result<Self> {
        if omega < 2 || !n.is_multiple_of(omega) {
            return Err(Error::Layout(format!("N={n} is not a multiple of omega")));
        }
        let rails = omega - 1;
        let tail = match mode {
            Termination::Zt => Self::tail_sections_for(v, omega) * rails,
            Termination::Tb => 0,
        };
        let payload = n / omega * rails;
        if payload <= tail + m {
            return Err(Error::Layout(format!("N={n} leaves no room for information bits")));
        }
        Self::new(payload - tail - m, m, omega, v, mode)
    }

    fn tail_sections_for(v: u32, omega: usize) -> usize {
        (v as usize).div_ceil(omega - 1)
    }

    pub fn rails(&self) -> usize {
        self.omega - 1
    }

    /// CRC-encoded payload length `K + m`.
    pub fn payload_len(&self) -> usize {
        self.k + self.m
    }

    /// Sections carrying payload bits.
    pub fn payload_sections(&self) -> usize {
        self.payload_len() / self.rails()
    }

    /// Termination sections appended in ZT mode, `ceil(v/(omega-1))`.
    pub fn tail_sections(&self) -> usize {
        match self.mode {
            Termination::Zt => Self::tail_sections_for(self.v, self.omega),
            Termination::Tb => 0,
        }
    }

    /// Trellis length `N/omega` in sections.
    pub fn sections(&self) -> usize {
        self.payload_sections() + self.tail_sections()
    }

    /// Blocklength `N`.
    pub fn blocklength(&self) -> usize {
        self.sections() * self.omega
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.blocklength() as f64
    }
}

/// Systematic encoder for a fixed frame layout.
#[derive(Debug, Clone)]
pub struct ConvEncoder {
    h: ParityCheckMatrix,
    layout: FrameLayout,
    rail_map: RailMap,
    zt: Option<ZtPatterns>,
}

/// A tail-biting codeword together with its circular state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TbCodeword {
    pub bits: Vec<u8>,
    pub initial_state: EncoderState,
}

impl ConvEncoder {
    pub fn new(h: ParityCheckMatrix, layout: FrameLayout, rail_map: RailMap) -> Result<Self> {
        if layout.omega != h.omega() || layout.v != h.v() {
            return Err(Error::Layout(format!(
                "layout (omega={}, v={}) does not match the code (omega={}, v={})",
                layout.omega,
                layout.v,
                h.omega(),
                h.v()
            )));
        }
        let zt = match layout.mode {
            Termination::Zt => Some(ZtPatterns::compute(&h)?),
            Termination::Tb => None,
        };
        Ok(Self {
            h,
            layout,
            rail_map,
            zt,
        })
    }

    pub fn code(&self) -> &ParityCheckMatrix {
        &self.h
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn rail_map(&self) -> RailMap {
        self.rail_map
    }

    pub fn zt_patterns(&self) -> Option<&ZtPatterns> {
        self.zt.as_ref()
    }

    fn check_payload(&self, payload: &[u8]) -> Result<Vec<Vec<u8>>> {
        if payload.len() != self.layout.payload_len() {
            return Err(Error::LengthMismatch {
                expected: self.layout.payload_len(),
                found: payload.len(),
            });
        }
        map_rails(payload, self.h.rails(), self.rail_map)
    }

    fn run(&self, start: EncoderState, tuples: &[Vec<u8>], out: &mut Vec<u8>) -> EncoderState {
        let omega = self.h.omega();
        let mut s = start;
        for t in tuples {
            let base = out.len();
            out.resize(base + omega, 0);
            s = self.h.step(s, t, &mut out[base..]);
        }
        s
    }

    /// Encodes in the layout's framing; TB codewords drop their state.
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        match self.layout.mode {
            Termination::Zt => self.encode_zt(payload),
            Termination::Tb => self.encode_tb(payload).map(|c| c.bits),
        }
    }

    /// Zero-terminated encoding: payload sections followed by the
    /// termination pattern of the state they reach.
    pub fn encode_zt(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let tuples = self.check_payload(payload)?;
        let patterns = match &self.zt {
            Some(p) => p.clone(),
            None => ZtPatterns::compute(&self.h)?,
        };
        let mut out = Vec::with_capacity(self.layout.sections() * self.h.omega());
        let s = self.run(EncoderState(0), &tuples, &mut out);
        let pattern = patterns.get(s);
        out.extend_from_slice(pattern.outputs);
        Ok(out)
    }

    /// Tail-biting encoding. Initial states are tried in ascending order and
    /// the first one that the frame returns to is used.
    pub fn encode_tb(&self, payload: &[u8]) -> Result<TbCodeword> {
        let tuples = self.check_payload(payload)?;
        let mut out = Vec::with_capacity(self.layout.sections() * self.h.omega());
        for s0 in 0..self.h.num_states() as u32 {
            out.clear();
            let end = self.run(EncoderState(s0), &tuples, &mut out);
            if end.0 == s0 {
                return Ok(TbCodeword {
                    bits: out,
                    initial_state: EncoderState(s0),
                });
            }
        }
        Err(Error::NoTailBitingState)
    }

    /// Reads the payload back from the systematic positions of a codeword.
    pub fn payload_of(&self, codeword: &[u8]) -> Vec<u8> {
        let omega = self.h.omega();
        let tuples: Vec<Vec<u8>> = (0..self.layout.payload_sections())
            .map(|k| {
                (0..self.h.rails())
                    .map(|r| codeword[k * omega + self.h.rail_stream(r)])
                    .collect()
            })
            .collect();
        unmap_rails(&tuples, self.rail_map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_trellis::{is_codeword, CodewordCheck};
    use proptest::prelude::*;

    pub(crate) fn toy() -> ParityCheckMatrix {
        ParityCheckMatrix::parse("(2,5,7,6)", 2).unwrap()
    }

    #[test]
    fn parse_orders_streams() {
        let h = ParityCheckMatrix::parse("(33,25,37,31)", 4).unwrap();
        assert_eq!(h.omega(), 4);
        assert_eq!(h.stream_poly(3).bits(), 0o33);
        assert_eq!(h.stream_poly(0).bits(), 0o31);
        assert_eq!(h.lambda(), 3);
        assert_eq!(h.parity_stream(), 0);
        assert_eq!(h.to_octal(), "(33,25,37,31)");
        let t = toy();
        assert_eq!(t.lambda(), 2);
        assert_eq!(t.parity_stream(), 2);
        assert_eq!((0..3).map(|r| t.rail_stream(r)).collect::<Vec<_>>(), [0, 1, 3]);
    }

    #[test]
    fn invalid_codes() {
        assert_eq!(
            ParityCheckMatrix::parse("(2,4,6,2)", 2),
            Err(Error::NoInstantResponse)
        );
        assert!(matches!(
            ParityCheckMatrix::parse("(0,0,0)", 3),
            Err(Error::InvalidCode(_))
        ));
        assert!(matches!(
            ParityCheckMatrix::parse("(7)", 2),
            Err(Error::InvalidCode(_))
        ));
    }

    #[test]
    fn zero_step() {
        let h = ParityCheckMatrix::parse("(13,15,17)", 3).unwrap();
        let mut out = [9u8; 3];
        let s = h.step(EncoderState(0), &[0, 0], &mut out);
        assert_eq!(s, EncoderState(0));
        assert_eq!(out, [0, 0, 0]);
    }

    #[test]
    fn single_step_by_hand() {
        // H=(13,15,17): h2 = x^3+x+1, h1 = x^3+x^2+1, h0 = x^3+x^2+x+1.
        // Inputs (1,0) on rails 1,2 -> y1=1, y2=0. s = 0 ^ h1 = 1101b,
        // s_0 = 1 so y0 = 1 and s ^= h0 -> 0010b, shifted -> 001b.
        let h = ParityCheckMatrix::parse("(13,15,17)", 3).unwrap();
        let mut out = [0u8; 3];
        let s = h.step(EncoderState(0), &[1, 0], &mut out);
        assert_eq!(out, [1, 1, 0]);
        assert_eq!(s, EncoderState(0b001));
        // parity check at time 0: sum_j y^(j) h_0^(j) = 1 + 1 + 0 = 0
        let syndrome0: u8 = (0..3).map(|j| out[j] & h.stream_poly(j).coeff(0)).sum::<u8>() % 2;
        assert_eq!(syndrome0, 0);
        // remaining partial sums: contributions of y at higher delays
        let pending = (0..3)
            .filter(|&j| out[j] == 1)
            .fold(0u32, |acc, j| acc ^ h.stream_poly(j).bits());
        assert_eq!(pending >> 1, s.0);
    }

    #[test]
    fn rail_maps() {
        assert_eq!(
            map_rails(&[0; 6], 3, RailMap::Stepwise).unwrap(),
            vec![vec![0, 0, 0], vec![0, 0, 0]]
        );
        let bits = [1, 0, 1, 1, 0, 1];
        let step = map_rails(&bits, 3, RailMap::Stepwise).unwrap();
        assert_eq!(step, vec![vec![1, 0, 1], vec![1, 0, 1]]);
        let block = map_rails(&bits, 3, RailMap::Blockwise).unwrap();
        assert_eq!(block, vec![vec![1, 1, 0], vec![0, 1, 1]]);
        assert_ne!(step, block);
        assert_eq!(unmap_rails(&block, RailMap::Blockwise), bits);
        assert!(map_rails(&[0; 5], 3, RailMap::Stepwise).is_err());
    }

    #[test]
    fn layout_formulas() {
        let zt = FrameLayout::new(87, 3, 4, 4, Termination::Zt).unwrap();
        assert_eq!(zt.blocklength(), 128);
        assert_eq!(zt.tail_sections(), 2);
        let tb = FrameLayout::new(93, 3, 4, 6, Termination::Tb).unwrap();
        assert_eq!(tb.blocklength(), 128);
        assert_eq!(format!("{:.3}", tb.rate()), "0.727");
        assert_eq!(
            FrameLayout::for_blocklength(128, 10, 4, 6, Termination::Tb).unwrap().k,
            86
        );
        assert!(FrameLayout::new(10, 1, 4, 2, Termination::Zt).is_err());
        // omega=4, v=6: termination adds 6 input and 8 output bits
        let l = FrameLayout::new(84, 6, 4, 6, Termination::Zt).unwrap();
        assert_eq!(l.tail_sections() * l.rails(), 6);
        assert_eq!(l.tail_sections() * l.omega, 8);
    }

    #[test]
    fn toy_zt_codeword_is_16_bits() {
        let layout = FrameLayout::new(6, 3, 4, 2, Termination::Zt).unwrap();
        let enc = ConvEncoder::new(toy(), layout, RailMap::Stepwise).unwrap();
        let cw = enc.encode_zt(&[1, 0, 1, 1, 1, 0, 0, 1, 1]).unwrap();
        assert_eq!(cw.len(), 16);
        assert_eq!(
            is_codeword(&cw, enc.code(), Termination::Zt).unwrap(),
            CodewordCheck {
                valid: true,
                start: 0,
                end: 0
            }
        );
        assert_eq!(enc.encode_zt(&[0; 9]).unwrap(), vec![0; 16]);
    }

    #[test]
    fn tb_zero_payload_uses_state_zero() {
        let h = ParityCheckMatrix::parse("(33,25,37,31)", 4).unwrap();
        let layout = FrameLayout::new(93, 3, 4, 4, Termination::Tb).unwrap();
        assert_eq!(layout.blocklength(), 128);
        let enc = ConvEncoder::new(h, layout, RailMap::Stepwise).unwrap();
        let cw = enc.encode_tb(&[0; 96]).unwrap();
        assert_eq!(cw.initial_state, EncoderState(0));
        assert!(cw.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn toy_tb_exhaustive_state_trial() {
        let layout = FrameLayout::new(6, 3, 4, 2, Termination::Tb).unwrap();
        let enc = ConvEncoder::new(toy(), layout, RailMap::Stepwise).unwrap();
        let mut ok = 0;
        for x in 0u32..512 {
            let payload: Vec<u8> = (0..9).map(|i| (x >> i & 1) as u8).collect();
            // independent trial over all 4 initial states
            let tuples = map_rails(&payload, 3, RailMap::Stepwise).unwrap();
            let closing: Vec<u32> = (0..4)
                .filter(|&s0| {
                    let mut s = EncoderState(s0);
                    let mut out = [0u8; 4];
                    for t in &tuples {
                        s = enc.code().step(s, t, &mut out);
                    }
                    s.0 == s0
                })
                .collect();
            match enc.encode_tb(&payload) {
                Ok(cw) => {
                    ok += 1;
                    assert_eq!(cw.initial_state.0, closing[0]);
                    let check = is_codeword(&cw.bits, enc.code(), Termination::Tb).unwrap();
                    assert!(check.valid);
                    assert_eq!(enc.payload_of(&cw.bits), payload);
                }
                Err(e) => {
                    assert_eq!(e, Error::NoTailBitingState);
                    assert!(closing.is_empty());
                }
            }
        }
        assert!(ok > 0);
    }

    proptest! {
        #[test]
        fn zt_systematic_and_linear(x in any::<u32>(), y in any::<u32>()) {
            let h = ParityCheckMatrix::parse("(33,25,37,31)", 4).unwrap();
            let layout = FrameLayout::new(27, 3, 4, 4, Termination::Zt).unwrap();
            let enc = ConvEncoder::new(h, layout, RailMap::Stepwise).unwrap();
            let px: Vec<u8> = (0..30).map(|i| (x >> i & 1) as u8).collect();
            let py: Vec<u8> = (0..30).map(|i| (y >> i & 1) as u8).collect();
            let pxy: Vec<u8> = px.iter().zip(&py).map(|(a, b)| a ^ b).collect();
            let cx = enc.encode_zt(&px).unwrap();
            let cy = enc.encode_zt(&py).unwrap();
            prop_assert_eq!(enc.payload_of(&cx), px);
            let sum: Vec<u8> = cx.iter().zip(&cy).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(enc.encode_zt(&pxy).unwrap(), sum);
            prop_assert!(is_codeword(&cx, enc.code(), Termination::Zt).unwrap().valid);
        }

        #[test]
        fn tb_systematic(x in any::<u64>(), block in any::<bool>()) {
            let h = ParityCheckMatrix::parse("(47,73,57,75)", 5).unwrap();
            let layout = FrameLayout::new(42, 6, 4, 5, Termination::Tb).unwrap();
            let map = if block { RailMap::Blockwise } else { RailMap::Stepwise };
            let enc = ConvEncoder::new(h, layout, map).unwrap();
            let p: Vec<u8> = (0..48).map(|i| (x >> i & 1) as u8).collect();
            let cw = enc.encode_tb(&p).unwrap();
            prop_assert_eq!(enc.payload_of(&cw.bits), p);
            let check = is_codeword(&cw.bits, enc.code(), Termination::Tb).unwrap();
            prop_assert!(check.valid);
            prop_assert_eq!(check.start, cw.initial_state.0);
        }
    }
}
