//! Candidate ranking by undetected-error spectrum.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::paths::{PayloadSet, MAX_PAYLOAD};
use crate::error::{Error, Result};
use crate::gf2poly::CrcPolynomial;

/// Undetected-path counts per output weight, below the collection threshold.
pub type Spectrum = BTreeMap<u32, u64>;

/// Outcome of ranking every candidate of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub winner: CrcPolynomial,
    pub d_min: u32,
    pub spectrum: Spectrum,
    /// Candidates sharing the winner's minimum undetected weight.
    pub dmin_tied: Vec<CrcPolynomial>,
    /// Candidates whose whole spectrum below the threshold equals the winner's.
    pub fully_tied: Vec<CrcPolynomial>,
    pub candidates: usize,
    /// Paths examined, over all weight classes.
    pub paths: usize,
}

impl Ranking {
    /// True when the smallest-hex rule had to pick among identical spectra.
    pub fn tie_broken(&self) -> bool {
        self.fully_tied.len() > 1
    }
}

/// Byte-sliced residue table: entry `[j][b]` is the residue of the payload
/// whose only set bits are those of byte value `b` at byte `j`.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    table: Vec<[u32; 256]>,
}

impl ResidueTable {
    /// Position `i` of a `len`-bit payload carries `x^(len-1-i)`.
    pub fn new(p: CrcPolynomial, len: usize) -> Self {
        assert!(len <= MAX_PAYLOAD, "payload longer than a mask");
        let powers = p.power_residues(len);
        let pos = |i: usize| powers[len - 1 - i];
        let table = (0..len.div_ceil(8))
            .map(|j| {
                let mut row = [0u32; 256];
                for b in 1..256usize {
                    let low = b.trailing_zeros() as usize;
                    let i = 8 * j + low;
                    let r = if i < len { pos(i) } else { 0 };
                    row[b] = row[b & (b - 1)] ^ r;
                }
                row
            })
            .collect();
        Self { table }
    }

    #[inline]
    pub fn residue(&self, mask: u128) -> u32 {
        self.table
            .iter()
            .enumerate()
            .fold(0, |acc, (j, row)| acc ^ row[(mask >> (8 * j)) as usize & 0xFF])
    }

    pub fn count_divisible(&self, payloads: &[u128]) -> u64 {
        payloads.iter().filter(|&&p| self.residue(p) == 0).count() as u64
    }
}

/// Full undetected spectrum of one polynomial over a payload set.
pub fn undetected_spectrum(paths: &PayloadSet, p: CrcPolynomial) -> Spectrum {
    let table = ResidueTable::new(p, paths.payload_len);
    paths
        .classes
        .iter()
        .filter_map(|(&w, class)| {
            let c = table.count_divisible(class);
            (c > 0).then_some((w, c))
        })
        .collect()
}

/// Picks the degree-`m` polynomial whose undetected spectrum, read in
/// ascending weight, is lexicographically smallest; ties go to the smallest
/// hex value.
pub fn find_dso_crc(paths: &PayloadSet, m: u32, d_tilde: u32) -> Result<Ranking> {
    let weights: Vec<u32> = paths.classes.keys().copied().filter(|&w| w < d_tilde).collect();
    rank_classes(m, paths.payload_len, d_tilde, weights, |w, sink| {
        let class = paths.classes.get(&w).map_or(&[][..], Vec::as_slice);
        if !class.is_empty() {
            sink(class);
        }
        Ok(class.len())
    })
}

/// Ranking over weight classes produced on demand, in the order of
/// `weights` (which must ascend and stay below `d_tilde`). `class(w, sink)`
/// feeds the payloads of weight `w` to `sink` in chunks and returns their
/// number.
pub fn rank_classes(
    m: u32,
    payload_len: usize,
    d_tilde: u32,
    weights: impl IntoIterator<Item = u32>,
    mut class: impl FnMut(u32, &mut dyn FnMut(&[u128])) -> Result<usize>,
) -> Result<Ranking> {
    if payload_len > MAX_PAYLOAD {
        return Err(Error::TooLarge(payload_len));
    }
    let candidates = CrcPolynomial::candidates(m)?;
    let tables: Vec<ResidueTable> = candidates
        .par_iter()
        .map(|&p| ResidueTable::new(p, payload_len))
        .collect();
    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    let mut dmin_tied: Option<Vec<usize>> = None;
    let mut spectrum = Spectrum::new();
    let mut paths = 0;
    for w in weights {
        debug_assert!(w < d_tilde);
        let mut counts = vec![0u64; alive.len()];
        let n = class(w, &mut |chunk| {
            let add: Vec<u64> = alive
                .par_iter()
                .map(|&c| tables[c].count_divisible(chunk))
                .collect();
            counts.iter_mut().zip(add).for_each(|(c, a)| *c += a);
        })?;
        paths += n;
        if n == 0 {
            continue;
        }
        let best = *counts.iter().min().expect("candidate list is never empty");
        if best > 0 {
            spectrum.insert(w, best);
            dmin_tied.get_or_insert_with(|| alive.clone());
        }
        alive = alive
            .into_iter()
            .zip(counts)
            .filter(|&(_, c)| c == best)
            .map(|(i, _)| i)
            .collect();
    }
    let winner = candidates[alive[0]];
    let Some(dmin_tied) = dmin_tied else {
        return Err(Error::InsufficientThreshold {
            d_tilde,
            crc: winner.to_string(),
        });
    };
    let d_min = *spectrum.keys().next().expect("winner has undetected paths");
    Ok(Ranking {
        winner,
        d_min,
        spectrum,
        dmin_tied: dmin_tied.into_iter().map(|i| candidates[i]).collect(),
        fully_tied: alive.into_iter().map(|i| candidates[i]).collect(),
        candidates: candidates.len(),
        paths,
    })
}
