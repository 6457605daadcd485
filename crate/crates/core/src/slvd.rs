//! Serial list Viterbi decoding over the dual trellis.
//!
//! A forward pass keeps, for every node, the survivor edge and the metric
//! gap of the discarded edge. Paths are then extracted in non-decreasing
//! metric order: each extracted path spawns one candidate per node where it
//! may still deviate onto a discarded edge, and candidates wait in a single
//! min-ordered heap. Tail-biting frames end in a virtual root fed by every
//! boundary state with a zero-cost edge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dual_trellis::{DualTrellis, NONE};
use crate::encoder::{ConvEncoder, Termination, ZtCodeSet};
use crate::error::{Error, Result};
use crate::gf2poly::{crc_check, CrcPolynomial};
use crate::Scalar;

/// Received channel values for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftWord<T> {
    pub values: Vec<T>,
    /// BPSK amplitude: bit `b` is sent as `(1 - 2b) * amplitude`.
    pub amplitude: T,
}

impl<T: Scalar> SoftWord<T> {
    pub fn new(values: Vec<T>, amplitude: T) -> Self {
        Self { values, amplitude }
    }

    /// Noiseless image of `bits`.
    pub fn noiseless(bits: &[u8], amplitude: T) -> Self {
        Self {
            values: bits.iter().map(|&b| bpsk(b, amplitude)).collect(),
            amplitude,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Squared Euclidean distance to the BPSK image of `bits`.
    pub fn distance(&self, bits: &[u8]) -> T {
        self.values
            .iter()
            .zip(bits)
            .fold(T::zero(), |acc, (&r, &b)| acc + branch_metric(r, b, self.amplitude))
    }
}

#[inline]
pub fn bpsk<T: Scalar>(bit: u8, amplitude: T) -> T {
    if bit & 1 == 0 {
        amplitude
    } else {
        -amplitude
    }
}

#[inline]
fn branch_metric<T: Scalar>(r: T, bit: u8, amplitude: T) -> T {
    let d = r - bpsk(bit, amplitude);
    d * d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Success,
    ListExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult<T> {
    /// The `K` message bits, absent when the list ran out.
    pub message: Option<Vec<u8>>,
    /// The accepted codeword, or the rank-one path when the list ran out.
    pub codeword: Vec<u8>,
    pub list_rank: usize,
    pub insertions: u64,
    pub metric: T,
    pub status: DecodeStatus,
}

/// One line of the optional per-frame trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<T> {
    pub rank: usize,
    pub metric: T,
    pub start: u32,
    pub end: u32,
    pub crc_ok: bool,
    pub tb_ok: bool,
}

impl<T: Scalar> std::fmt::Display for TraceEntry<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rank={} metric={:.6} start={} end={} crc={} tb={}",
            self.rank,
            self.metric,
            self.start,
            self.end,
            u8::from(self.crc_ok),
            u8::from(self.tb_ok)
        )
    }
}

/// A path produced by the list enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedPath<T> {
    pub bits: Vec<u8>,
    pub metric: T,
    pub start: u32,
    pub end: u32,
}

/// A candidate path: its parent plus one deviation.
#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    /// Index of the parent candidate, or [`NONE`] for a root-level path.
    parent: u32,
    /// Time of the deviation node; for root-level paths the final state is in `node`.
    time: u32,
    node: u32,
    metric: T,
}

#[derive(Debug, Clone, Copy)]
struct HeapKey<T> {
    metric: T,
    seq: u64,
    index: u32,
}

impl<T: Scalar> PartialEq for HeapKey<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for HeapKey<T> {}

impl<T: Scalar> PartialOrd for HeapKey<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for HeapKey<T> {
    /// Reversed so that `BinaryHeap` pops the smallest metric, oldest first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .metric
            .partial_cmp(&self.metric)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

/// Survivor memory and metrics of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass<T> {
    steps: usize,
    width: usize,
    metric: Vec<T>,
    /// Packed `prev << 1 | bit` of the survivor edge, [`NONE`] if unreachable.
    survivor: Vec<u32>,
    /// Packed discarded edge, or [`NONE`].
    alternative: Vec<u32>,
    /// Metric gap of the discarded edge over the survivor.
    gap: Vec<T>,
}

impl<T: Scalar> Default for ForwardPass<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ForwardPass<T> {
    /// An empty pass; buffers grow on the first [`run`](Self::run).
    pub fn new() -> Self {
        Self {
            steps: 0,
            width: 0,
            metric: Vec::new(),
            survivor: Vec::new(),
            alternative: Vec::new(),
            gap: Vec::new(),
        }
    }

    /// Runs the add-compare-select recursion over `received`.
    pub fn run(
        &mut self,
        trellis: &DualTrellis,
        received: &SoftWord<T>,
        mode: Termination,
    ) -> Result<()> {
        if received.len() != trellis.len() {
            return Err(Error::LengthMismatch {
                expected: trellis.len(),
                found: received.len(),
            });
        }
        let steps = trellis.len();
        let width = trellis.width();
        let nodes = (steps + 1) * width;
        self.steps = steps;
        self.width = width;
        self.metric.clear();
        self.metric.resize(nodes, T::infinity());
        self.survivor.clear();
        self.survivor.resize(nodes, NONE);
        self.alternative.clear();
        self.alternative.resize(nodes, NONE);
        self.gap.clear();
        self.gap.resize(nodes, T::zero());
        match mode {
            Termination::Zt => self.metric[0] = T::zero(),
            Termination::Tb => self.metric[..trellis.boundary_states()].fill(T::zero()),
        }
        let a = received.amplitude;
        for t in 0..steps {
            let phase = trellis.phase_at(t);
            let r = received.values[t];
            let bm = [branch_metric(r, 0, a), branch_metric(r, 1, a)];
            let (prev, cur) = self.metric.split_at_mut((t + 1) * width);
            let prev = &prev[t * width..];
            for (s, inc) in phase.incoming.iter().enumerate() {
                let mut best: Option<(T, u32)> = None;
                let mut second: Option<(T, u32)> = None;
                for &(p, b) in inc {
                    if p == NONE {
                        continue;
                    }
                    let m = prev[p as usize];
                    if m.is_infinite() {
                        continue;
                    }
                    let m = m + bm[b as usize];
                    let edge = p << 1 | u32::from(b);
                    match best {
                        Some((bmv, _)) if m >= bmv => second = Some((m, edge)),
                        Some(old) => {
                            second = Some(old);
                            best = Some((m, edge));
                        }
                        None => best = Some((m, edge)),
                    }
                }
                if let Some((m, edge)) = best {
                    let idx = (t + 1) * width + s;
                    cur[s] = m;
                    self.survivor[idx] = edge;
                    if let Some((m2, e2)) = second {
                        self.alternative[idx] = e2;
                        self.gap[idx] = m2 - m;
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn idx(&self, t: usize, s: u32) -> usize {
        t * self.width + s as usize
    }

    /// Final metric of state `s`.
    pub fn final_metric(&self, s: u32) -> T {
        self.metric[self.idx(self.steps, s)]
    }

    /// Metric of node `(t, s)`.
    pub fn node_metric(&self, t: usize, s: u32) -> T {
        self.metric[self.idx(t, s)]
    }
}

/// Serial list enumeration over a completed forward pass.
pub struct PathList<'a, T> {
    pass: &'a ForwardPass<T>,
    mode: Termination,
    boundary_states: u32,
    candidates: Vec<Candidate<T>>,
    heap: BinaryHeap<HeapKey<T>>,
    seq: u64,
    insertions: u64,
    extracted: usize,
    states: Vec<u32>,
    devs: Vec<(u32, u32)>,
}

impl<'a, T: Scalar> PathList<'a, T> {
    pub fn new(pass: &'a ForwardPass<T>, trellis: &DualTrellis, mode: Termination) -> Self {
        let boundary_states = trellis.boundary_states() as u32;
        let mut list = Self {
            pass,
            mode,
            boundary_states,
            candidates: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            insertions: 0,
            extracted: 0,
            states: vec![0; pass.steps + 1],
            devs: Vec::new(),
        };
        let end = match mode {
            Termination::Zt => Some(0),
            Termination::Tb => (0..boundary_states)
                .filter(|&s| pass.final_metric(s).is_finite())
                .min_by(|&a, &b| {
                    pass.final_metric(a)
                        .partial_cmp(&pass.final_metric(b))
                        .unwrap_or(Ordering::Equal)
                        .then(a.cmp(&b))
                }),
        };
        if let Some(end) = end.filter(|&e| pass.final_metric(e).is_finite()) {
            list.push(Candidate {
                parent: NONE,
                time: pass.steps as u32 + 1,
                node: end,
                metric: pass.final_metric(end),
            });
        }
        list
    }

    fn push(&mut self, c: Candidate<T>) {
        let index = self.candidates.len() as u32;
        self.candidates.push(c);
        self.heap.push(HeapKey {
            metric: c.metric,
            seq: self.seq,
            index,
        });
        self.seq += 1;
    }

    fn insert(&mut self, c: Candidate<T>) {
        self.push(c);
        self.insertions += 1;
    }

    /// Ordered-list insertions so far, not counting the rank-one path.
    pub fn insertions(&self) -> u64 {
        self.insertions
    }

    /// Paths extracted so far.
    pub fn extracted(&self) -> usize {
        self.extracted
    }

    /// Traces candidate `index` back to time zero, filling `self.states`.
    fn trace(&mut self, index: u32, bits: &mut [u8]) -> (u32, u32) {
        self.devs.clear();
        let mut i = index;
        let end = loop {
            let c = self.candidates[i as usize];
            if c.parent == NONE {
                break c.node;
            }
            self.devs.push((c.time, c.node));
            i = c.parent;
        };
        // deviations were collected leaf first, i.e. in ascending time
        let pass = self.pass;
        let mut s = end;
        let mut next_dev = self.devs.len();
        for t in (1..=pass.steps).rev() {
            self.states[t] = s;
            let idx = pass.idx(t, s);
            let take_alt = next_dev > 0 && self.devs[next_dev - 1] == (t as u32, s);
            let edge = if take_alt {
                next_dev -= 1;
                pass.alternative[idx]
            } else {
                pass.survivor[idx]
            };
            debug_assert_ne!(edge, NONE);
            bits[t - 1] = (edge & 1) as u8;
            s = edge >> 1;
        }
        self.states[0] = s;
        (s, end)
    }

    /// Next path in non-decreasing metric order.
    pub fn next_path(&mut self) -> Option<ExtractedPath<T>> {
        let key = self.heap.pop()?;
        let c = self.candidates[key.index as usize];
        let mut bits = vec![0u8; self.pass.steps];
        let (start, end) = self.trace(key.index, &mut bits);
        let frontier = if c.parent == NONE {
            self.pass.steps
        } else {
            c.time as usize - 1
        };
        if self.extracted == 0 && self.mode == Termination::Tb {
            for s in (0..self.boundary_states).filter(|&s| s != c.node) {
                let m = self.pass.final_metric(s);
                if m.is_finite() {
                    self.insert(Candidate {
                        parent: NONE,
                        time: self.pass.steps as u32 + 1,
                        node: s,
                        metric: m,
                    });
                }
            }
        }
        for t in 1..=frontier {
            let s = self.states[t];
            let idx = self.pass.idx(t, s);
            if self.pass.alternative[idx] != NONE {
                self.insert(Candidate {
                    parent: key.index,
                    time: t as u32,
                    node: s,
                    metric: c.metric + self.pass.gap[idx],
                });
            }
        }
        self.extracted += 1;
        Some(ExtractedPath {
            bits,
            metric: c.metric,
            start,
            end,
        })
    }
}

impl<T: Scalar> Iterator for PathList<'_, T> {
    type Item = ExtractedPath<T>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_path()
    }
}

/// Dual trellis of a frame. Zero-terminated frames decoded as
/// [`ZtCodeSet::EncoderTail`] keep only the encoder's termination
/// trajectories in the tail.
pub fn frame_trellis(encoder: &ConvEncoder, zt_code: ZtCodeSet) -> Result<DualTrellis> {
    let layout = encoder.layout();
    let trellis = DualTrellis::build(encoder.code(), layout.sections())?;
    match (layout.mode, encoder.zt_patterns(), zt_code) {
        (Termination::Zt, Some(p), ZtCodeSet::EncoderTail) => trellis.with_zt_tail(p),
        _ => Ok(trellis),
    }
}

/// Default list cap `2^(m+2)`.
pub fn default_max_list(m: usize) -> usize {
    1usize << (m + 2).min(40)
}

/// CRC-aided serial list decoder for one frame layout; reusable across frames.
pub struct SlvdDecoder<'a, T> {
    trellis: &'a DualTrellis,
    encoder: &'a ConvEncoder,
    crc: CrcPolynomial,
    max_list: usize,
    pass: ForwardPass<T>,
}

impl<'a, T: Scalar> SlvdDecoder<'a, T> {
    pub fn new(
        trellis: &'a DualTrellis,
        encoder: &'a ConvEncoder,
        crc: CrcPolynomial,
        max_list: usize,
    ) -> Result<Self> {
        if max_list < 1 {
            return Err(Error::EmptyList);
        }
        if trellis.len() != encoder.layout().blocklength() {
            return Err(Error::LengthMismatch {
                expected: encoder.layout().blocklength(),
                found: trellis.len(),
            });
        }
        if crc.degree() as usize != encoder.layout().m {
            return Err(Error::CrcDegree {
                text: crc.to_string(),
                found: crc.degree(),
                expected: encoder.layout().m as u32,
            });
        }
        Ok(Self {
            trellis,
            encoder,
            crc,
            max_list,
            pass: ForwardPass::new(),
        })
    }

    pub fn max_list(&self) -> usize {
        self.max_list
    }

    pub fn decode(&mut self, received: &SoftWord<T>) -> Result<DecodeResult<T>> {
        self.decode_inner(received, None)
    }

    /// Like [`decode`](Self::decode), also recording every extracted path.
    pub fn decode_traced(
        &mut self,
        received: &SoftWord<T>,
    ) -> Result<(DecodeResult<T>, Vec<TraceEntry<T>>)> {
        let mut trace = Vec::new();
        let r = self.decode_inner(received, Some(&mut trace))?;
        Ok((r, trace))
    }

    fn decode_inner(
        &mut self,
        received: &SoftWord<T>,
        mut trace: Option<&mut Vec<TraceEntry<T>>>,
    ) -> Result<DecodeResult<T>> {
        let mode = self.encoder.layout().mode;
        self.pass.run(self.trellis, received, mode)?;
        let mut list = PathList::new(&self.pass, self.trellis, mode);
        let k = self.encoder.layout().k;
        let mut first: Option<ExtractedPath<T>> = None;
        let mut last_metric = T::neg_infinity();
        while list.extracted() < self.max_list {
            let Some(path) = list.next_path() else { break };
            debug_assert!(path.metric >= last_metric, "list metrics must not decrease");
            last_metric = path.metric;
            let payload = self.encoder.payload_of(&path.bits);
            let crc_ok = crc_check(&payload, self.crc)?;
            let tb_ok = path.start == path.end;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TraceEntry {
                    rank: list.extracted(),
                    metric: path.metric,
                    start: path.start,
                    end: path.end,
                    crc_ok,
                    tb_ok,
                });
            }
            if crc_ok && tb_ok {
                return Ok(DecodeResult {
                    message: Some(payload[..k].to_vec()),
                    codeword: path.bits,
                    list_rank: list.extracted(),
                    insertions: list.insertions(),
                    metric: path.metric,
                    status: DecodeStatus::Success,
                });
            }
            if first.is_none() {
                first = Some(path);
            }
        }
        let first = first.ok_or(Error::EmptyList)?;
        Ok(DecodeResult {
            message: None,
            codeword: first.bits,
            list_rank: list.extracted(),
            insertions: list.insertions(),
            metric: first.metric,
            status: DecodeStatus::ListExhausted,
        })
    }
}

/// Operation counts of the complexity model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComplexityReport<T> {
    pub k: usize,
    pub m: usize,
    pub v: u32,
    pub expected_list_rank: T,
    pub expected_insertions: T,
    pub mode: Termination,
    pub c_ssv: T,
    pub c_trace: T,
    pub c_list: T,
    pub c_slvd: T,
}

/// Weights and logarithm base of the complexity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityWeights<T> {
    /// Cost of one traceback step.
    pub c1: T,
    /// Cost of one ordered-list comparison.
    pub c2: T,
    pub log_base: T,
}

impl<T: Scalar> Default for ComplexityWeights<T> {
    fn default() -> Self {
        Self {
            c1: T::one(),
            c2: T::one(),
            log_base: T::from_f64(2.0).expect("representable"),
        }
    }
}

/// Upper estimate of the mean insertion count, `(K+m) E[L]`, plus
/// `2^v - 1` root insertions for tail-biting frames.
pub fn expected_insertions<T: Scalar>(k: usize, m: usize, v: u32, el: T, mode: Termination) -> T {
    let km = T::from_usize(k + m).expect("representable");
    let base = km * el;
    match mode {
        Termination::Zt => base,
        Termination::Tb => base + T::from_u64((1u64 << v) - 1).expect("representable"),
    }
}

/// Evaluates the decoding complexity model at list rank `el`, using the
/// insertion estimate of [`expected_insertions`].
pub fn complexity_estimate<T: Scalar>(
    k: usize,
    m: usize,
    v: u32,
    el: T,
    mode: Termination,
    weights: ComplexityWeights<T>,
) -> ComplexityReport<T> {
    let ei = expected_insertions(k, m, v, el, mode);
    complexity_with_insertions(k, m, v, el, ei, mode, weights)
}

/// Evaluates the complexity model with a measured insertion mean `ei`.
pub fn complexity_with_insertions<T: Scalar>(
    k: usize,
    m: usize,
    v: u32,
    el: T,
    ei: T,
    mode: Termination,
    weights: ComplexityWeights<T>,
) -> ComplexityReport<T> {
    let f = |x: f64| T::from_f64(x).expect("representable");
    let km = f((k + m) as f64);
    let vv = f(f64::from(v));
    let two_v = f((1u64 << v) as f64);
    let two_v1 = f((1u64 << (v + 1)) as f64);
    let one = T::one();
    let two = f(2.0);
    let c15 = f(1.5);
    let c35 = f(3.5);
    let ComplexityWeights { c1, c2, log_base } = weights;
    let (c_ssv, c_trace) = match mode {
        Termination::Zt => {
            let tail = two_v1 - two;
            let per_path = two * (km + vv) + c15 * km;
            (
                tail + c15 * tail + c15 * (km - vv) * two_v1 + c1 * per_path,
                c1 * (el - one) * per_path,
            )
        }
        Termination::Tb => (
            c15 * km * two_v1 + two_v + c35 * c1 * km,
            c35 * c1 * (el - one) * km,
        ),
    };
    let c_list = if ei > T::zero() {
        c2 * ei * ei.log(log_base)
    } else {
        T::zero()
    };
    ComplexityReport {
        k,
        m,
        v,
        expected_list_rank: el,
        expected_insertions: ei,
        mode,
        c_ssv,
        c_trace,
        c_list,
        c_slvd: c_ssv + c_trace + c_list,
    }
}
