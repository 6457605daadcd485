//! Exhaustive references for small codes: every path and every payload is
//! enumerated directly, without error events.

use std::cmp::Ordering;

use super::dso::Spectrum;
use super::paths::ZtCodeSet;
use crate::encoder::{
    map_rails, ConvEncoder, EncoderState, FrameLayout, ParityCheckMatrix, RailMap, Termination,
};
use crate::error::{Error, Result};
use crate::gf2poly::{crc_encode, CrcPolynomial};

/// Largest number of enumerated input bits the oracles accept.
pub const MAX_ORACLE_BITS: usize = 24;

/// A trellis path found by direct enumeration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawPath {
    pub start_state: u32,
    pub inputs: Vec<u32>,
    pub weight: u32,
}

/// Every path of the frame length with output weight in `1..d_tilde`:
/// zero-to-zero for ZT, closed loops from every state for TB.
pub fn brute_force_paths(
    code: &ParityCheckMatrix,
    layout: &FrameLayout,
    d_tilde: u32,
) -> Result<Vec<RawPath>> {
    let n = layout.sections();
    let rails = code.rails();
    if n * rails > MAX_ORACLE_BITS {
        return Err(Error::TooLarge(n * rails));
    }
    let starts: Vec<u32> = match layout.mode {
        Termination::Zt => vec![0],
        Termination::Tb => (0..code.num_states() as u32).collect(),
    };
    let mut out = Vec::new();
    for &s0 in &starts {
        for word in 0..1u64 << (n * rails) {
            let mut s = EncoderState(s0);
            let mut w = 0;
            let mut inputs = Vec::with_capacity(n);
            for k in 0..n {
                let u = (word >> (k * rails)) as u32 & ((1 << rails) - 1);
                let (ns, dw, _) = code.step_packed(s, u);
                s = ns;
                w += dw;
                inputs.push(u);
            }
            if s.0 == s0 && w > 0 && w < d_tilde {
                out.push(RawPath {
                    start_state: s0,
                    inputs,
                    weight: w,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

fn run(code: &ParityCheckMatrix, start: u32, tuples: &[Vec<u8>], weight: &mut u32) -> u32 {
    let mut out = vec![0u8; code.omega()];
    let mut s = EncoderState(start);
    for t in tuples {
        s = code.step(s, t, &mut out);
        *weight += out.iter().map(|&b| u32::from(b)).sum::<u32>();
    }
    s.0
}

/// Weight distribution of the codewords whose message is nonzero and whose
/// payload passes `crc`, found by encoding all `2^K` messages.
pub fn brute_force_spectrum(
    code: &ParityCheckMatrix,
    layout: &FrameLayout,
    rail_map: RailMap,
    crc: CrcPolynomial,
    zt_code: ZtCodeSet,
) -> Result<Spectrum> {
    let rails = code.rails();
    let tail_bits = layout.tail_sections() * rails;
    if layout.k + tail_bits > MAX_ORACLE_BITS {
        return Err(Error::TooLarge(layout.k + tail_bits));
    }
    let encoder = ConvEncoder::new(code.clone(), *layout, rail_map)?;
    let mut spectrum = Spectrum::new();
    let mut add = |w: u32| *spectrum.entry(w).or_insert(0) += 1;
    for msg in 1..1u64 << layout.k {
        let message: Vec<u8> = (0..layout.k).map(|i| (msg >> i & 1) as u8).collect();
        let payload = crc_encode(&message, crc);
        let tuples = map_rails(&payload, rails, rail_map)?;
        match (layout.mode, zt_code) {
            (Termination::Zt, ZtCodeSet::EncoderTail) => {
                let cw = encoder.encode_zt(&payload)?;
                add(cw.iter().map(|&b| u32::from(b)).sum());
            }
            (Termination::Zt, ZtCodeSet::AllPaths) => {
                let mut w0 = 0;
                let s = run(code, 0, &tuples, &mut w0);
                for tail in 0..1u64 << tail_bits {
                    let t: Vec<Vec<u8>> = (0..layout.tail_sections())
                        .map(|k| {
                            (0..rails)
                                .map(|r| (tail >> (k * rails + r) & 1) as u8)
                                .collect()
                        })
                        .collect();
                    let mut w = w0;
                    if run(code, s, &t, &mut w) == 0 {
                        add(w);
                    }
                }
            }
            (Termination::Tb, _) => {
                for s0 in 0..code.num_states() as u32 {
                    let mut w = 0;
                    if run(code, s0, &tuples, &mut w) == s0 {
                        add(w);
                    }
                }
            }
        }
    }
    Ok(spectrum)
}

/// Lexicographic comparison of spectra in ascending weight; a smaller count
/// at the first differing weight ranks better.
pub fn compare_spectra(a: &Spectrum, b: &Spectrum) -> Ordering {
    let weights: std::collections::BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
    for w in weights {
        let (x, y) = (a.get(&w).copied().unwrap_or(0), b.get(&w).copied().unwrap_or(0));
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

/// Winner and minimum undetected weight by exhaustive encoding, ranking on
/// weights below `d_tilde`.
pub fn brute_force_dso(
    code: &ParityCheckMatrix,
    layout: &FrameLayout,
    rail_map: RailMap,
    zt_code: ZtCodeSet,
    d_tilde: u32,
) -> Result<(CrcPolynomial, u32)> {
    let mut best: Option<(CrcPolynomial, Spectrum)> = None;
    for p in CrcPolynomial::candidates(layout.m as u32)? {
        let mut s = brute_force_spectrum(code, layout, rail_map, p, zt_code)?;
        s.retain(|&w, _| w < d_tilde);
        let better = match &best {
            None => true,
            Some((_, b)) => compare_spectra(&s, b) == Ordering::Less,
        };
        if better {
            best = Some((p, s));
        }
    }
    let (p, s) = best.expect("at least one candidate");
    let d_min = s.keys().next().copied().ok_or(Error::InsufficientThreshold {
        d_tilde,
        crc: p.to_string(),
    })?;
    Ok((p, d_min))
}
