//! Reconstruction of every low-weight frame-length path from error events.

use std::collections::BTreeMap;

use super::events::{Collection, PrimalTrellis};
use crate::dual_trellis::ZtPatterns;
pub use crate::encoder::ZtCodeSet;
use crate::encoder::{EncoderState, FrameLayout, RailMap, Termination};
use crate::error::{Error, Result};

/// A full-length path seen during reconstruction.
#[derive(Debug)]
pub struct PathView<'a> {
    /// Packed input tuple per section.
    pub inputs: &'a [u32],
    /// Boundary states, `inputs.len() + 1` entries.
    pub states: &'a [u32],
    pub weight: u32,
}

/// Payload masks of low-weight paths grouped by output weight; bit `i`
/// of a mask is payload position `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PayloadSet {
    pub payload_len: usize,
    pub classes: BTreeMap<u32, Vec<u128>>,
}

impl PayloadSet {
    pub fn new(payload_len: usize) -> Self {
        Self {
            payload_len,
            classes: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.values().all(Vec::is_empty)
    }

    pub fn push(&mut self, weight: u32, payload: u128) {
        self.classes.entry(weight).or_default().push(payload);
    }
}

/// Longest payload a mask can hold.
/// Payloads buffered per chunk while streaming a weight class.
pub const CLASS_CHUNK: usize = 1 << 22;

pub const MAX_PAYLOAD: usize = 128;

/// Everything needed to turn a section-level path into payload positions.
#[derive(Debug, Clone)]
pub struct Reconstruction<'a> {
    pub layout: FrameLayout,
    pub rail_map: RailMap,
    pub zt_code: ZtCodeSet,
    pub patterns: Option<&'a ZtPatterns>,
    pub trellis: &'a PrimalTrellis,
    /// Stop with [`Error::TooManyPaths`] past this many paths in one class
    /// (or in total, for [`reconstruct`](Self::reconstruct)).
    pub max_paths: usize,
}

impl Reconstruction<'_> {
    /// Payload mask carried by a section-level input sequence.
    pub fn payload_mask(&self, inputs: &[u32]) -> u128 {
        let rails = self.layout.rails();
        let sections = self.layout.payload_sections();
        let mut mask = 0u128;
        for (k, &u) in inputs.iter().take(sections).enumerate() {
            let mut bits = u;
            while bits != 0 {
                let r = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                mask |= 1u128 << self.rail_map.position(k, r, rails, sections);
            }
        }
        mask
    }

    fn tail_matches(&self, view: &PathView<'_>) -> bool {
        let Some(patterns) = self.patterns else {
            return true;
        };
        let l = self.layout.payload_sections();
        let rails = self.layout.rails();
        let pat = patterns.get(EncoderState(view.states[l]));
        view.inputs[l..].iter().enumerate().all(|(i, &u)| {
            (0..rails).all(|r| (u >> r & 1) as u8 == pat.inputs[i * rails + r])
        })
    }

    /// Visits every path of the frame length whose weight is below
    /// `d_tilde`, excluding the all-zero path.
    pub fn for_each_path(
        &self,
        events: &Collections<'_>,
        d_tilde: u32,
        mut visit: impl FnMut(&PathView<'_>) -> Result<()>,
    ) -> Result<()> {
        let n = self.layout.sections();
        match (self.layout.mode, events) {
            (Termination::Zt, Collections::Zt(c)) => {
                let mut inputs = vec![0u32; n];
                let mut states = vec![0u32; n + 1];
                let mut fill = Fill {
                    events: c,
                    trellis: self.trellis,
                    n,
                    d_tilde,
                };
                fill.zt(0, 0, false, &mut inputs, &mut states, &mut visit)
            }
            (Termination::Tb, Collections::Tb(map)) => {
                let mut base_in = Vec::with_capacity(n);
                let mut base_st = Vec::with_capacity(n + 1);
                let mut rot_in = vec![0u32; n];
                let mut rot_st = vec![0u32; n + 1];
                for (&sigma, c) in map.iter() {
                    base_in.clear();
                    base_st.clear();
                    base_st.push(sigma);
                    let mut fill = Fill {
                        events: c,
                        trellis: self.trellis,
                        n,
                        d_tilde,
                    };
                    fill.tb(
                        0,
                        0,
                        &mut base_in,
                        &mut base_st,
                        &mut |b_in: &[u32], b_st: &[u32], w: u32, last_len: usize| {
                            for q in 0..last_len {
                                for k in 0..n {
                                    rot_in[k] = b_in[(k + n - q) % n];
                                    rot_st[k] = b_st[(k + n - q) % n];
                                }
                                rot_st[n] = rot_st[0];
                                visit(&PathView {
                                    inputs: &rot_in,
                                    states: &rot_st,
                                    weight: w,
                                })?;
                            }
                            Ok(())
                        },
                    )?;
                }
                Ok(())
            }
            _ => Err(Error::Config("event collection does not match the frame mode".into())),
        }
    }

    /// Payload mask of `view` if it can be an undetected error: nonzero
    /// payload, and for [`ZtCodeSet::EncoderTail`] the encoder's own tail.
    fn candidate_payload(&self, view: &PathView<'_>) -> Option<u128> {
        if self.layout.mode == Termination::Zt
            && self.zt_code == ZtCodeSet::EncoderTail
            && !self.tail_matches(view)
        {
            return None;
        }
        let mask = self.payload_mask(view.inputs);
        (mask != 0).then_some(mask)
    }

    fn check_width(&self) -> Result<()> {
        if self.layout.payload_len() > MAX_PAYLOAD {
            return Err(Error::TooLarge(self.layout.payload_len()));
        }
        Ok(())
    }

    /// Payloads of the candidate paths of weight exactly `weight`.
    pub fn payload_class(&self, events: &Collections<'_>, weight: u32) -> Result<Vec<u128>> {
        let mut out = Vec::new();
        self.stream_class(events, weight, CLASS_CHUNK, &mut |c| out.extend_from_slice(c))?;
        Ok(out)
    }

    /// Feeds the payloads of weight exactly `weight` to `sink` in chunks of
    /// at most `chunk`; returns how many were produced.
    pub fn stream_class(
        &self,
        events: &Collections<'_>,
        weight: u32,
        chunk: usize,
        sink: &mut dyn FnMut(&[u128]),
    ) -> Result<usize> {
        self.check_width()?;
        let chunk = chunk.max(1);
        let mut buf = Vec::with_capacity(chunk.min(CLASS_CHUNK));
        let mut count = 0usize;
        self.for_each_path(events, weight + 1, |view| {
            if view.weight != weight {
                return Ok(());
            }
            if let Some(mask) = self.candidate_payload(view) {
                if count >= self.max_paths {
                    return Err(Error::TooManyPaths(self.max_paths));
                }
                count += 1;
                buf.push(mask);
                if buf.len() == chunk {
                    sink(&buf);
                    buf.clear();
                }
            }
            Ok(())
        })?;
        if !buf.is_empty() {
            sink(&buf);
        }
        Ok(count)
    }

    /// Payloads of every candidate path below `d_tilde`.
    pub fn reconstruct(&self, events: &Collections<'_>, d_tilde: u32) -> Result<PayloadSet> {
        self.check_width()?;
        let mut set = PayloadSet::new(self.layout.payload_len());
        let mut count = 0usize;
        self.for_each_path(events, d_tilde, |view| {
            if let Some(mask) = self.candidate_payload(view) {
                if count >= self.max_paths {
                    return Err(Error::TooManyPaths(self.max_paths));
                }
                count += 1;
                set.push(view.weight, mask);
            }
            Ok(())
        })?;
        Ok(set)
    }
}

/// Event collections for either framing.
#[derive(Debug, Clone, Copy)]
pub enum Collections<'a> {
    Zt(&'a Collection),
    Tb(&'a BTreeMap<u32, Collection>),
}

/// Concatenation of the events of one anchor into full-length paths.
struct Fill<'a> {
    events: &'a Collection,
    trellis: &'a PrimalTrellis,
    n: usize,
    d_tilde: u32,
}

impl Fill<'_> {
    /// Writes the inputs and states of `inputs` from `states[at]` on.
    fn place(&self, at: usize, ev: &[u16], inputs: &mut [u32], states: &mut [u32]) {
        for (i, &u) in ev.iter().enumerate() {
            inputs[at + i] = u32::from(u);
            states[at + i + 1] = self.trellis.next(states[at + i], u32::from(u));
        }
    }

    /// Zero-state events separated by idle sections.
    fn zt(
        &mut self,
        pos: usize,
        weight: u32,
        nonzero: bool,
        inputs: &mut [u32],
        states: &mut [u32],
        visit: &mut impl FnMut(&PathView<'_>) -> Result<()>,
    ) -> Result<()> {
        let n = self.n;
        if nonzero {
            // remaining sections idle
            for k in pos..n {
                inputs[k] = 0;
                states[k + 1] = 0;
            }
            visit(&PathView {
                inputs,
                states,
                weight,
            })?;
        }
        for start in pos..n {
            for k in pos..start {
                inputs[k] = 0;
                states[k + 1] = 0;
            }
            for i in 0..self.events.len() {
                let e = self.events.get(i);
                if weight + e.weight >= self.d_tilde {
                    break;
                }
                if start + e.len() > n {
                    continue;
                }
                self.place(start, e.inputs, inputs, states);
                self.zt(start + e.len(), weight + e.weight, true, inputs, states, visit)?;
            }
        }
        Ok(())
    }

    /// Back-to-back events of the anchor filling all `n` sections; `emit`
    /// also receives the length of the last event.
    fn tb(
        &mut self,
        weight: u32,
        last_len: usize,
        inputs: &mut Vec<u32>,
        states: &mut Vec<u32>,
        emit: &mut impl FnMut(&[u32], &[u32], u32, usize) -> Result<()>,
    ) -> Result<()> {
        let used = inputs.len();
        if used == self.n {
            if weight > 0 {
                emit(inputs, states, weight, last_len)?;
            }
            return Ok(());
        }
        for i in 0..self.events.len() {
            let e = self.events.get(i);
            if weight + e.weight >= self.d_tilde {
                break;
            }
            if used + e.len() > self.n {
                continue;
            }
            for &u in e.inputs {
                let s = *states.last().expect("anchor pushed");
                inputs.push(u32::from(u));
                states.push(self.trellis.next(s, u32::from(u)));
            }
            self.tb(weight + e.weight, e.len(), inputs, states, emit)?;
            inputs.truncate(used);
            states.truncate(used + 1);
        }
        Ok(())
    }
}

/// Output bits of a reconstructed path, for cross-checking against encoders.
pub fn path_codeword(
    code: &crate::encoder::ParityCheckMatrix,
    view: &PathView<'_>,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(view.inputs.len() * code.omega());
    for (k, &u) in view.inputs.iter().enumerate() {
        let (ns, _, word) = code.step_packed(EncoderState(view.states[k]), u);
        debug_assert_eq!(ns.0, view.states[k + 1]);
        out.extend((0..code.omega()).map(|j| (word >> j & 1) as u8));
    }
    out
}
