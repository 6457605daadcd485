//! The dual (syndrome-former) trellis of an `(omega, omega-1, v)` code.
//!
//! One primal section is expanded into `omega` single-bit phases. The state
//! is the `(v+1)`-bit vector of partial sums `[s_v, ..., s_0]`, bit `i` of
//! the index holding `s_i`. Phase `j` adds `y^(j) h^(j)`; the last phase
//! also shifts the register right by one. At phase `lambda` only the branch
//! `y = s_0` exists, which leaves at most two branches per state and exactly
//! one at `lambda`.
//!
//! The branch structure is identical in every section, so it is stored once
//! per phase.

use std::fmt::Write as _;

use crate::encoder::{EncoderState, ParityCheckMatrix, Termination};
use crate::error::{Error, Result};
use crate::gf2poly::BinaryPolynomial;

/// Marker for an absent branch or predecessor.
pub const NONE: u32 = u32::MAX;

/// `lambda = max { j : h_0^(j) = 1 }` for polynomials listed `h^(omega-1)` first.
pub fn max_instant_response(listed: &[BinaryPolynomial]) -> Result<usize> {
    let omega = listed.len();
    listed
        .iter()
        .enumerate()
        .find(|(_, p)| p.coeff(0) == 1)
        .map(|(i, _)| omega - 1 - i)
        .ok_or(Error::NoInstantResponse)
}

/// Branch table for one phase.
#[derive(Debug, Clone)]
pub struct Phase {
    /// `next[s][b]`: state reached from `s` on output bit `b`, or [`NONE`].
    pub next: Vec<[u32; 2]>,
    /// `incoming[s']`: up to two `(previous state, bit)` pairs, ordered by
    /// previous state.
    pub incoming: Vec<[(u32, u8); 2]>,
    /// Whether `s` is reachable at the start of this phase.
    pub reachable: Vec<bool>,
}

/// Per-phase branch census, used by `inspect` and the structural tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCensus {
    pub phase: usize,
    pub states: usize,
    pub single_branch: usize,
    pub double_branch: usize,
    pub max_in_degree: usize,
}

#[derive(Debug, Clone)]
pub struct DualTrellis {
    omega: usize,
    v: u32,
    lambda: usize,
    sections: usize,
    h: Vec<u32>,
    phases: Vec<Phase>,
    /// Pruned phases of the last sections, one per position, when the tail
    /// is restricted to the encoder's termination trajectories.
    tail: Vec<Phase>,
}

impl DualTrellis {
    pub fn build(code: &ParityCheckMatrix, sections: usize) -> Result<Self> {
        if sections == 0 {
            return Err(Error::Layout("the trellis needs at least one section".into()));
        }
        let omega = code.omega();
        let v = code.v();
        let lambda = code.lambda();
        let h: Vec<u32> = (0..omega).map(|j| code.stream_poly(j).bits()).collect();
        let width = 1usize << (v + 1);
        let mut reach = vec![false; width];
        reach[..1 << v].iter_mut().for_each(|r| *r = true);
        let mut phases = Vec::with_capacity(omega);
        for (j, &hj) in h.iter().enumerate() {
            let mut next = vec![[NONE; 2]; width];
            let mut incoming = vec![[(NONE, 0u8); 2]; width];
            let mut reach_next = vec![false; width];
            for s in (0..width).filter(|&s| reach[s]) {
                for b in 0..2u32 {
                    if j == lambda && b != (s as u32 & 1) {
                        continue;
                    }
                    let mut ns = s as u32 ^ if b == 1 { hj } else { 0 };
                    if j == omega - 1 {
                        debug_assert_eq!(ns & 1, 0, "s_0 must be cleared before the shift");
                        ns >>= 1;
                    }
                    next[s][b as usize] = ns;
                    reach_next[ns as usize] = true;
                    let slot = &mut incoming[ns as usize];
                    if slot[0].0 == NONE {
                        slot[0] = (s as u32, b as u8);
                    } else if slot[1].0 == NONE {
                        slot[1] = (s as u32, b as u8);
                    } else {
                        return Err(Error::InvalidCode(format!(
                            "state {ns} at phase {} has more than two predecessors",
                            (j + 1) % omega
                        )));
                    }
                }
            }
            phases.push(Phase {
                next,
                incoming,
                reachable: reach,
            });
            reach = reach_next;
        }
        Ok(Self {
            omega,
            v,
            lambda,
            sections,
            h,
            phases,
            tail: Vec::new(),
        })
    }

    /// Restricts the last sections to the termination trajectories of
    /// `patterns`: from the boundary state entering the tail, only the
    /// pattern of that state survives. Fails if two trajectories demand
    /// different bits at a shared node.
    pub fn with_zt_tail(mut self, patterns: &ZtPatterns) -> Result<Self> {
        let omega = self.omega;
        let tail_len = patterns.tail_sections() * omega;
        if patterns.tail_sections() > self.sections {
            return Err(Error::Layout(format!(
                "termination needs {} sections, the trellis has {}",
                patterns.tail_sections(),
                self.sections
            )));
        }
        const FREE: u8 = 2;
        let width = self.width();
        let mut required = vec![vec![FREE; width]; tail_len];
        for s in 0..self.boundary_states() as u32 {
            let mut x = s;
            for (i, &b) in patterns.get(EncoderState(s)).outputs.iter().enumerate() {
                let slot = &mut required[i][x as usize];
                if *slot != FREE && *slot != b {
                    return Err(Error::InvalidCode(
                        "termination trajectories disagree on the dual trellis".into(),
                    ));
                }
                *slot = b;
                x = self.phases[i % omega].next[x as usize][usize::from(b)];
                if x == NONE {
                    return Err(Error::InvalidCode(
                        "termination pattern leaves the dual trellis".into(),
                    ));
                }
            }
            if x != 0 {
                return Err(Error::Unterminable {
                    state: s,
                    sections: patterns.tail_sections(),
                });
            }
        }
        let mut reach = self.phases[0].reachable.clone();
        self.tail = required
            .iter()
            .enumerate()
            .map(|(i, req)| {
                let base = &self.phases[i % omega];
                let mut next = vec![[NONE; 2]; width];
                let mut incoming = vec![[(NONE, 0u8); 2]; width];
                let mut reach_next = vec![false; width];
                for x in (0..width).filter(|&x| reach[x] && req[x] != FREE) {
                    let b = req[x];
                    let nx = base.next[x][usize::from(b)];
                    next[x][usize::from(b)] = nx;
                    reach_next[nx as usize] = true;
                    let slot = &mut incoming[nx as usize];
                    let k = usize::from(slot[0].0 != NONE);
                    slot[k] = (x as u32, b);
                }
                Phase {
                    next,
                    incoming,
                    reachable: std::mem::replace(&mut reach, reach_next),
                }
            })
            .collect();
        Ok(self)
    }

    /// Positions at the end of the frame covered by a restricted tail.
    pub fn tail_len(&self) -> usize {
        self.tail.len()
    }

    /// Branch table used at position `t` of the frame.
    pub fn phase_at(&self, t: usize) -> &Phase {
        let start = self.len() - self.tail.len();
        if t >= start {
            &self.tail[t - start]
        } else {
            &self.phases[t % self.omega]
        }
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    /// Number of single-bit steps, `omega * sections`.
    pub fn len(&self) -> usize {
        self.omega * self.sections
    }

    pub fn is_empty(&self) -> bool {
        self.sections == 0
    }

    /// Size of the state index space, `2^(v+1)`.
    pub fn width(&self) -> usize {
        1 << (self.v + 1)
    }

    pub fn boundary_states(&self) -> usize {
        1 << self.v
    }

    pub fn phase(&self, j: usize) -> &Phase {
        &self.phases[j]
    }

    pub fn census(&self) -> Vec<PhaseCensus> {
        self.phases
            .iter()
            .enumerate()
            .map(|(j, ph)| {
                let mut c = PhaseCensus {
                    phase: j,
                    states: 0,
                    single_branch: 0,
                    double_branch: 0,
                    max_in_degree: 0,
                };
                for s in (0..self.width()).filter(|&s| ph.reachable[s]) {
                    c.states += 1;
                    match ph.next[s].iter().filter(|&&n| n != NONE).count() {
                        1 => c.single_branch += 1,
                        2 => c.double_branch += 1,
                        _ => {}
                    }
                }
                c.max_in_degree = ph
                    .incoming
                    .iter()
                    .map(|inc| inc.iter().filter(|p| p.0 != NONE).count())
                    .max()
                    .unwrap_or(0);
                c
            })
            .collect()
    }

    /// Adjacency listing, one `phase state bit next` line per branch.
    pub fn dump(&self) -> String {
        let mut out = String::from("# phase state bit next\n");
        for (j, ph) in self.phases.iter().enumerate() {
            for s in (0..self.width()).filter(|&s| ph.reachable[s]) {
                for b in 0..2 {
                    let n = ph.next[s][b];
                    if n != NONE {
                        let _ = writeln!(out, "{j} {s} {b} {n}");
                    }
                }
            }
        }
        out
    }

    /// Walks `bits` from `start`; `None` if a bit contradicts the forced
    /// branch at phase `lambda`.
    pub fn traverse(&self, start: u32, bits: &[u8]) -> Option<u32> {
        let mut s = start;
        for (t, &b) in bits.iter().enumerate() {
            let j = t % self.omega;
            if j == self.lambda && u32::from(b & 1) != (s & 1) {
                return None;
            }
            if b & 1 == 1 {
                s ^= self.h[j];
            }
            if j == self.omega - 1 {
                s >>= 1;
            }
        }
        Some(s)
    }
}

/// Outcome of [`is_codeword`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodewordCheck {
    pub valid: bool,
    pub start: u32,
    pub end: u32,
}

/// Checks that `bits` trace a zero-to-zero path (ZT) or a path ending in its
/// own starting state (TB).
pub fn is_codeword(bits: &[u8], code: &ParityCheckMatrix, mode: Termination) -> Result<CodewordCheck> {
    let omega = code.omega();
    if bits.is_empty() || !bits.len().is_multiple_of(omega) {
        return Err(Error::LengthMismatch {
            expected: (bits.len() / omega).max(1) * omega,
            found: bits.len(),
        });
    }
    let trellis = DualTrellis::build(code, bits.len() / omega)?;
    let invalid = CodewordCheck {
        valid: false,
        start: 0,
        end: 0,
    };
    match mode {
        Termination::Zt => Ok(match trellis.traverse(0, bits) {
            Some(end) => CodewordCheck {
                valid: end == 0,
                start: 0,
                end,
            },
            None => invalid,
        }),
        Termination::Tb => {
            let mut first = None;
            for s in 0..trellis.boundary_states() as u32 {
                if let Some(end) = trellis.traverse(s, bits) {
                    if end == s {
                        return Ok(CodewordCheck {
                            valid: true,
                            start: s,
                            end,
                        });
                    }
                    first.get_or_insert(CodewordCheck {
                        valid: false,
                        start: s,
                        end,
                    });
                }
            }
            Ok(first.unwrap_or(invalid))
        }
    }
}

/// Zero-termination input/output patterns, one per boundary state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZtPatterns {
    tail_sections: usize,
    inputs: Vec<Vec<u8>>,
    outputs: Vec<Vec<u8>>,
}

/// The termination trajectory from one state.
#[derive(Debug, Clone, Copy)]
pub struct ZtPattern<'a> {
    /// `(omega-1) * tail_sections` input bits, rail order within a section.
    pub inputs: &'a [u8],
    /// `omega * tail_sections` output bits, stream order within a section.
    pub outputs: &'a [u8],
}

impl ZtPatterns {
    /// For every state, the lexicographically smallest output pattern among
    /// all `ceil(v/(omega-1))`-section trajectories ending in the zero state.
    ///
    /// The table is filled backwards section by section: `best[r][s]` is the
    /// smallest output string that reaches zero from `s` in exactly `r`
    /// sections.
    pub fn compute(code: &ParityCheckMatrix) -> Result<Self> {
        let rails = code.rails();
        let omega = code.omega();
        let tail = (code.v() as usize).div_ceil(rails);
        let states = code.num_states();
        let mut best: Vec<Option<(Vec<u8>, Vec<u8>)>> = vec![None; states];
        best[0] = Some((Vec::new(), Vec::new()));
        let mut out = vec![0u8; omega];
        let mut inp = vec![0u8; rails];
        for _ in 0..tail {
            let mut next: Vec<Option<(Vec<u8>, Vec<u8>)>> = vec![None; states];
            for (s, slot) in next.iter_mut().enumerate() {
                for u in 0..(1u32 << rails) {
                    for (r, b) in inp.iter_mut().enumerate() {
                        *b = (u >> r & 1) as u8;
                    }
                    let ns = code.step(EncoderState(s as u32), &inp, &mut out);
                    let Some((rest_out, rest_in)) = &best[ns.0 as usize] else {
                        continue;
                    };
                    let better = match slot {
                        None => true,
                        Some((cur, _)) => {
                            out.iter().chain(rest_out).lt(cur.iter())
                        }
                    };
                    if better {
                        let o: Vec<u8> = out.iter().chain(rest_out).copied().collect();
                        let i: Vec<u8> = inp.iter().chain(rest_in).copied().collect();
                        *slot = Some((o, i));
                    }
                }
            }
            best = next;
        }
        let mut inputs = Vec::with_capacity(states);
        let mut outputs = Vec::with_capacity(states);
        for (s, b) in best.into_iter().enumerate() {
            let (o, i) = b.ok_or(Error::Unterminable {
                state: s as u32,
                sections: tail,
            })?;
            outputs.push(o);
            inputs.push(i);
        }
        Ok(Self {
            tail_sections: tail,
            inputs,
            outputs,
        })
    }

    pub fn tail_sections(&self) -> usize {
        self.tail_sections
    }

    pub fn get(&self, state: EncoderState) -> ZtPattern<'_> {
        ZtPattern {
            inputs: &self.inputs[state.0 as usize],
            outputs: &self.outputs[state.0 as usize],
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}
