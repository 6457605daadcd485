//! Distance-spectrum-optimal CRC search.
//!
//! Low-weight paths of the convolutional code are rebuilt from irreducible
//! error events collected on the encoder-state trellis; every candidate CRC
//! is then scored by the weights of the paths whose payload it divides.

pub mod dso;
pub mod events;
pub mod oracle;
pub mod paths;

use std::collections::BTreeMap;
use std::fmt;

pub use dso::{find_dso_crc, rank_classes, undetected_spectrum, Ranking, ResidueTable, Spectrum};
pub use events::{
    collect_iee_tb, collect_iee_tb_on, collect_iee_zt, collect_iee_zt_on, Collection, ErrorEvent,
    EventRef, PrimalTrellis,
};
pub use paths::{Collections, PathView, PayloadSet, Reconstruction, ZtCodeSet, CLASS_CHUNK, MAX_PAYLOAD};

use crate::dual_trellis::ZtPatterns;
use crate::encoder::{FrameLayout, ParityCheckMatrix, RailMap, Termination};
use crate::error::{Error, Result};
use crate::gf2poly::CrcPolynomial;

/// Knobs of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub code: ParityCheckMatrix,
    pub layout: FrameLayout,
    pub rail_map: RailMap,
    pub zt_code: ZtCodeSet,
    /// Starting threshold; defaults to `d_free + 2*ceil(m/2)`.
    pub d_tilde: Option<u32>,
    /// Added to the threshold after each insufficient round.
    pub d_tilde_step: u32,
    /// Highest threshold tried before giving up.
    pub d_tilde_max: u32,
    pub max_paths: usize,
}

impl SearchConfig {
    pub fn new(code: ParityCheckMatrix, layout: FrameLayout) -> Self {
        Self {
            code,
            layout,
            rail_map: RailMap::default(),
            zt_code: ZtCodeSet::default(),
            d_tilde: None,
            d_tilde_step: 2,
            d_tilde_max: 64,
            max_paths: 4_000_000_000,
        }
    }
}

/// A searched CRC together with the frame it was optimized for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub code: String,
    pub v: u32,
    pub omega: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub mode: Termination,
    pub crc: CrcPolynomial,
    pub d_min: u32,
    pub spectrum: Spectrum,
    pub d_tilde: u32,
    pub candidates: usize,
    pub dmin_tied: Vec<CrcPolynomial>,
    pub fully_tied: Vec<CrcPolynomial>,
    pub paths: usize,
}

impl SearchResult {
    pub fn tie_broken(&self) -> bool {
        self.fully_tied.len() > 1
    }
}

fn join(list: &[CrcPolynomial]) -> String {
    list.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SearchResult {
    /// One `key=value` record per line, terminated by a blank line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code={}", self.code)?;
        writeln!(f, "v={}", self.v)?;
        writeln!(f, "omega={}", self.omega)?;
        writeln!(f, "K={}", self.k)?;
        writeln!(f, "m={}", self.m)?;
        writeln!(f, "N={}", self.n)?;
        writeln!(f, "mode={}", self.mode)?;
        writeln!(f, "crc={}", self.crc)?;
        writeln!(f, "d_min={}", self.d_min)?;
        let spectrum: Vec<String> = self.spectrum.iter().map(|(d, b)| format!("{d}:{b}")).collect();
        writeln!(f, "spectrum={}", spectrum.join(","))?;
        writeln!(f, "d_tilde={}", self.d_tilde)?;
        writeln!(f, "candidates={}", self.candidates)?;
        writeln!(f, "paths={}", self.paths)?;
        writeln!(f, "tie_broken={}", self.tie_broken())?;
        writeln!(f, "dmin_tied={}", join(&self.dmin_tied))?;
        writeln!(f, "fully_tied={}", join(&self.fully_tied))
    }
}

/// Error events of the framed code below `d_tilde`.
#[derive(Debug, Clone)]
pub enum EventSet {
    Zt(Collection),
    Tb(BTreeMap<u32, Collection>),
}

impl EventSet {
    pub fn collect(trellis: &PrimalTrellis, layout: &FrameLayout, d_tilde: u32) -> Self {
        let n = layout.sections();
        match layout.mode {
            Termination::Zt => Self::Zt(collect_iee_zt_on(trellis, d_tilde, n)),
            Termination::Tb => Self::Tb(collect_iee_tb_on(trellis, d_tilde, n)),
        }
    }

    pub fn view(&self) -> Collections<'_> {
        match self {
            Self::Zt(c) => Collections::Zt(c),
            Self::Tb(c) => Collections::Tb(c),
        }
    }

    /// Number of events over all anchors.
    pub fn len(&self) -> usize {
        match self {
            Self::Zt(c) => c.len(),
            Self::Tb(c) => c.values().map(Collection::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn reconstruction<'a>(
    cfg: &SearchConfig,
    trellis: &'a PrimalTrellis,
    patterns: Option<&'a ZtPatterns>,
) -> Reconstruction<'a> {
    Reconstruction {
        layout: cfg.layout,
        rail_map: cfg.rail_map,
        zt_code: cfg.zt_code,
        patterns,
        trellis,
        max_paths: cfg.max_paths,
    }
}

fn tail_patterns(cfg: &SearchConfig) -> Result<Option<ZtPatterns>> {
    Ok(match (cfg.layout.mode, cfg.zt_code) {
        (Termination::Zt, ZtCodeSet::EncoderTail) => Some(ZtPatterns::compute(&cfg.code)?),
        _ => None,
    })
}

/// Payloads of all candidate paths of the framed code below `d_tilde`.
pub fn low_weight_payloads(cfg: &SearchConfig, d_tilde: u32) -> Result<PayloadSet> {
    let trellis = PrimalTrellis::new(&cfg.code);
    let patterns = tail_patterns(cfg)?;
    let events = EventSet::collect(&trellis, &cfg.layout, d_tilde);
    reconstruction(cfg, &trellis, patterns.as_ref()).reconstruct(&events.view(), d_tilde)
}

/// Initial threshold `d_free + 2*ceil(m/2)`.
pub fn initial_threshold(code: &ParityCheckMatrix, m: u32) -> u32 {
    PrimalTrellis::new(code)
        .free_distance()
        .saturating_add(2 * m.div_ceil(2))
}

/// Searches the DSO CRC of degree `layout.m`, raising the threshold until
/// every candidate has an undetected path below it. Weight classes are
/// rebuilt one at a time, so memory holds a single class.
pub fn search_dso(cfg: &SearchConfig) -> Result<SearchResult> {
    let m = cfg.layout.m as u32;
    if m == 0 {
        return Err(Error::UnsupportedDegree(0));
    }
    let trellis = PrimalTrellis::new(&cfg.code);
    let patterns = tail_patterns(cfg)?;
    let rec = reconstruction(cfg, &trellis, patterns.as_ref());
    let mut d_tilde = cfg.d_tilde.unwrap_or_else(|| initial_threshold(&cfg.code, m));
    loop {
        let events = EventSet::collect(&trellis, &cfg.layout, d_tilde);
        let view = events.view();
        let ranked = rank_classes(m, cfg.layout.payload_len(), d_tilde, 1..d_tilde, |w, sink| {
            rec.stream_class(&view, w, CLASS_CHUNK, sink)
        });
        match ranked {
            Ok(r) => {
                return Ok(SearchResult {
                    code: cfg.code.to_octal(),
                    v: cfg.code.v(),
                    omega: cfg.code.omega(),
                    k: cfg.layout.k,
                    m: cfg.layout.m,
                    n: cfg.layout.blocklength(),
                    mode: cfg.layout.mode,
                    crc: r.winner,
                    d_min: r.d_min,
                    spectrum: r.spectrum,
                    d_tilde,
                    candidates: r.candidates,
                    dmin_tied: r.dmin_tied,
                    fully_tied: r.fully_tied,
                    paths: r.paths,
                })
            }
            Err(Error::InsufficientThreshold { .. }) if d_tilde < cfg.d_tilde_max => {
                d_tilde = (d_tilde + cfg.d_tilde_step.max(1)).min(cfg.d_tilde_max);
            }
            Err(e) => return Err(e),
        }
    }
}
