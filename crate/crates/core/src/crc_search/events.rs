//! Irreducible error event collection on the primal (encoder-state) trellis.

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;

use crate::encoder::{EncoderState, ParityCheckMatrix};

/// Primal trellis: `2^v` states, `2^(omega-1)` branches per state.
///
/// Inputs are packed with rail `r` at bit `r`.
#[derive(Debug, Clone)]
pub struct PrimalTrellis {
    rails: usize,
    states: usize,
    next: Vec<u32>,
    weight: Vec<u32>,
}

impl PrimalTrellis {
    pub fn new(code: &ParityCheckMatrix) -> Self {
        let rails = code.rails();
        let states = code.num_states();
        let fan = 1usize << rails;
        let mut next = vec![0; states * fan];
        let mut weight = vec![0; states * fan];
        for s in 0..states {
            for u in 0..fan {
                let (ns, w, _) = code.step_packed(EncoderState(s as u32), u as u32);
                next[s * fan + u] = ns.0;
                weight[s * fan + u] = w;
            }
        }
        Self {
            rails,
            states,
            next,
            weight,
        }
    }

    pub fn rails(&self) -> usize {
        self.rails
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn fan_out(&self) -> usize {
        1 << self.rails
    }

    #[inline]
    pub fn next(&self, s: u32, u: u32) -> u32 {
        self.next[(s as usize) << self.rails | u as usize]
    }

    #[inline]
    pub fn weight(&self, s: u32, u: u32) -> u32 {
        self.weight[(s as usize) << self.rails | u as usize]
    }

    /// Smallest output weight from every state to `target`, moving only
    /// through states accepted by `allowed` before arriving.
    fn distances_to(&self, target: u32, allowed: impl Fn(u32) -> bool) -> Vec<u32> {
        let mut rev: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.states];
        for s in 0..self.states as u32 {
            for u in 0..self.fan_out() as u32 {
                rev[self.next(s, u) as usize].push((s, self.weight(s, u)));
            }
        }
        let mut dist = vec![u32::MAX; self.states];
        dist[target as usize] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u32, target))]);
        while let Some(Reverse((d, s))) = heap.pop() {
            if d > dist[s as usize] {
                continue;
            }
            // Paths may pass through `s` only when it is an allowed
            // intermediate state or the target itself.
            if s != target && !allowed(s) {
                continue;
            }
            for &(p, w) in &rev[s as usize] {
                let nd = d + w;
                if nd < dist[p as usize] {
                    dist[p as usize] = nd;
                    heap.push(Reverse((nd, p)));
                }
            }
        }
        dist
    }

    /// Free distance: the lightest path leaving zero and returning to it.
    pub fn free_distance(&self) -> u32 {
        let dist = self.distances_to(0, |s| s != 0);
        (1..self.fan_out() as u32)
            .filter_map(|u| {
                let n = self.next(0, u);
                let tail = if n == 0 { 0 } else { dist[n as usize] };
                (tail != u32::MAX).then(|| self.weight(0, u) + tail)
            })
            .min()
            .unwrap_or(u32::MAX)
    }
}

/// A path that leaves its anchor state once and returns to it once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorEvent {
    pub start_state: u32,
    /// Packed input tuples, one per section.
    pub inputs: Vec<u32>,
    /// States visited, `inputs.len() + 1` entries starting and ending at the anchor.
    pub states: Vec<u32>,
    pub output_weight: u32,
}

impl ErrorEvent {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_bits(&self, rails: usize) -> Vec<u8> {
        self.inputs
            .iter()
            .flat_map(|&u| (0..rails).map(move |r| (u >> r & 1) as u8))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Record {
    offset: u32,
    len: u16,
    weight: u16,
}

/// A stored event: packed inputs over one shared buffer.
#[derive(Debug, Clone, Copy)]
pub struct EventRef<'a> {
    pub inputs: &'a [u16],
    pub weight: u32,
}

impl EventRef<'_> {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Events of one anchor found by a collection pass, sorted by weight, then
/// length, then inputs.
#[derive(Debug, Clone, Default)]
pub struct Collection {
    pub anchor: u32,
    records: Vec<Record>,
    buffer: Vec<u16>,
    /// Set when the length cap cut off a branch that could still have
    /// produced an event below the threshold.
    pub truncated: bool,
}

impl Collection {
    fn new(anchor: u32) -> Self {
        Self {
            anchor,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn push(&mut self, inputs: &[u32], weight: u32) {
        let offset = u32::try_from(self.buffer.len()).expect("event buffer exceeds 2^32 entries");
        self.buffer.extend(inputs.iter().map(|&u| u as u16));
        self.records.push(Record {
            offset,
            len: inputs.len() as u16,
            weight: weight as u16,
        });
    }

    fn get_record(&self, r: Record) -> EventRef<'_> {
        let start = r.offset as usize;
        EventRef {
            inputs: &self.buffer[start..start + usize::from(r.len)],
            weight: u32::from(r.weight),
        }
    }

    pub fn get(&self, i: usize) -> EventRef<'_> {
        self.get_record(self.records[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = EventRef<'_>> + '_ {
        self.records.iter().map(|&r| self.get_record(r))
    }

    fn sort(&mut self) {
        let mut records = std::mem::take(&mut self.records);
        records.sort_by(|&a, &b| {
            let (x, y) = (self.get_record(a), self.get_record(b));
            (x.weight, x.len(), x.inputs).cmp(&(y.weight, y.len(), y.inputs))
        });
        self.records = records;
    }

    /// Owned copy of event `i` with its state sequence.
    pub fn event(&self, trellis: &PrimalTrellis, i: usize) -> ErrorEvent {
        let e = self.get(i);
        let mut states = vec![self.anchor];
        for &u in e.inputs {
            let s = *states.last().expect("nonempty");
            states.push(trellis.next(s, u32::from(u)));
        }
        ErrorEvent {
            start_state: self.anchor,
            inputs: e.inputs.iter().map(|&u| u32::from(u)).collect(),
            states,
            output_weight: e.weight,
        }
    }

    /// Owned copies of every event.
    pub fn events(&self, trellis: &PrimalTrellis) -> Vec<ErrorEvent> {
        (0..self.len()).map(|i| self.event(trellis, i)).collect()
    }
}

struct Dfs<'a> {
    trellis: &'a PrimalTrellis,
    anchor: u32,
    d_tilde: u32,
    max_len: usize,
    dist: Vec<u32>,
    allowed: &'a dyn Fn(u32) -> bool,
    inputs: Vec<u32>,
    out: Collection,
}

impl Dfs<'_> {
    fn extend(&mut self, s: u32, weight: u32) {
        for u in 0..self.trellis.fan_out() as u32 {
            let ns = self.trellis.next(s, u);
            let w = weight + self.trellis.weight(s, u);
            if w >= self.d_tilde {
                continue;
            }
            let first = self.inputs.is_empty();
            if ns == self.anchor {
                // the anchor's zero-weight self-loop is the idle step, not an event
                if first && w == 0 && self.anchor == 0 {
                    continue;
                }
                self.inputs.push(u);
                self.out.push(&self.inputs, w);
                self.inputs.pop();
                continue;
            }
            if !(self.allowed)(ns) {
                continue;
            }
            let rest = self.dist[ns as usize];
            if rest == u32::MAX || w + rest >= self.d_tilde {
                continue;
            }
            if self.inputs.len() + 1 >= self.max_len {
                self.out.truncated = true;
                continue;
            }
            self.inputs.push(u);
            self.extend(ns, w);
            self.inputs.pop();
        }
    }
}

fn collect_anchor(
    trellis: &PrimalTrellis,
    anchor: u32,
    d_tilde: u32,
    max_len: usize,
    allowed: &dyn Fn(u32) -> bool,
) -> Collection {
    assert!(trellis.rails() <= 16, "inputs are stored in 16 bits");
    let dist = trellis.distances_to(anchor, allowed);
    let mut dfs = Dfs {
        trellis,
        anchor,
        d_tilde: d_tilde.min(u32::from(u16::MAX)),
        max_len: max_len.clamp(1, usize::from(u16::MAX)),
        dist,
        allowed,
        inputs: Vec::new(),
        out: Collection::new(anchor),
    };
    if d_tilde > 0 && max_len > 0 {
        dfs.extend(anchor, 0);
    }
    dfs.out.sort();
    dfs.out
}

/// Zero-state events of output weight below `d_tilde` and at most `max_len` sections.
pub fn collect_iee_zt(code: &ParityCheckMatrix, d_tilde: u32, max_len: usize) -> Collection {
    collect_iee_zt_on(&PrimalTrellis::new(code), d_tilde, max_len)
}

pub fn collect_iee_zt_on(trellis: &PrimalTrellis, d_tilde: u32, max_len: usize) -> Collection {
    collect_anchor(trellis, 0, d_tilde, max_len, &|s| s != 0)
}

/// Events anchored at every state `sigma`, whose intermediate states all
/// exceed `sigma`. For `sigma = 0` the zero-weight idle loop is included as
/// a length-one event.
pub fn collect_iee_tb(
    code: &ParityCheckMatrix,
    d_tilde: u32,
    max_len: usize,
) -> BTreeMap<u32, Collection> {
    collect_iee_tb_on(&PrimalTrellis::new(code), d_tilde, max_len)
}

pub fn collect_iee_tb_on(
    trellis: &PrimalTrellis,
    d_tilde: u32,
    max_len: usize,
) -> BTreeMap<u32, Collection> {
    (0..trellis.states() as u32)
        .map(|sigma| {
            let mut c = collect_anchor(trellis, sigma, d_tilde, max_len, &move |s| s > sigma);
            if sigma == 0 && d_tilde > 0 && trellis.next(0, 0) == 0 && trellis.weight(0, 0) == 0 {
                c.push(&[0], 0);
                c.sort();
            }
            (sigma, c)
        })
        .collect()
}
