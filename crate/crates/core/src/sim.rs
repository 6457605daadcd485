//! BI-AWGN Monte-Carlo simulation of CRC-aided list decoding.
//!
//! Frame `i` at SNR index `j` draws from its own ChaCha stream (`j`) at word
//! offset `i << 32`, and outcomes are folded in frame order, so results do
//! not depend on the worker count.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::crc_search::Spectrum;
use crate::dual_trellis::DualTrellis;
use crate::encoder::{ConvEncoder, Termination, ZtCodeSet};
use crate::error::{Error, Result};
use crate::gf2poly::{crc_check, crc_encode, CrcPolynomial};
use crate::slvd::{frame_trellis, DecodeStatus, SlvdDecoder, SoftWord};
use crate::Scalar;

/// Per-symbol SNR `10 log10(A^2)` and the matching BPSK amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig<T> {
    pub snr_db: T,
    pub amplitude: T,
}

impl<T: Scalar> ChannelConfig<T> {
    pub fn from_snr_db(snr_db: T) -> Self {
        let twenty = T::from_f64(20.0).expect("representable");
        let ten = T::from_f64(10.0).expect("representable");
        Self {
            snr_db,
            amplitude: ten.powf(snr_db / twenty),
        }
    }
}

/// BPSK with unit-variance Gaussian noise.
pub fn transmit<T: Scalar, R: Rng + ?Sized>(bits: &[u8], amplitude: T, rng: &mut R) -> SoftWord<T>
where
    StandardNormal: Distribution<T>,
{
    let values = bits
        .iter()
        .map(|&b| crate::slvd::bpsk(b, amplitude) + StandardNormal.sample(rng))
        .collect();
    SoftWord::new(values, amplitude)
}

/// `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Truncated union bound `sum_d B_d Q(A sqrt(d))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionBound<T> {
    pub value: T,
    /// Terms at or above this weight were not collected.
    pub truncated_at: Option<u32>,
}

pub fn union_bound<T: Scalar>(spectrum: &Spectrum, amplitude: T, d_tilde: Option<u32>) -> UnionBound<T> {
    let a = amplitude.to_f64().expect("finite amplitude");
    let value: f64 = spectrum
        .iter()
        .map(|(&d, &b)| b as f64 * q_function(a * f64::from(d).sqrt()))
        .sum();
    UnionBound {
        value: T::from_f64(value).expect("representable"),
        truncated_at: d_tilde,
    }
}

/// When a point stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StopRule {
    pub max_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_errors: 400,
            max_frames: 100_000_000,
        }
    }
}

/// Everything a sweep needs besides the code itself.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub crc: CrcPolynomial,
    pub max_list: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub stop: StopRule,
    /// Frames decoded between stop-rule checks.
    pub batch: usize,
    /// Code the decoder searches in zero-terminated frames.
    pub zt_decode: ZtCodeSet,
}

/// Outcome of one decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub undetected: bool,
    pub exhausted: bool,
    pub list_rank: u64,
    pub insertions: u64,
    /// Payload draws rejected for lacking a tail-biting state.
    pub resampled: u64,
    /// Accepted path heavier than the transmitted codeword.
    pub ml_violation: bool,
}

impl FrameOutcome {
    pub fn is_error(&self) -> bool {
        self.undetected || self.exhausted
    }
}

/// Counters of one SNR point; merging is plain addition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FerStats {
    pub snr_db: f64,
    pub seed: u64,
    pub frames: u64,
    pub undetected_errors: u64,
    pub list_exhausted: u64,
    pub resampled: u64,
    pub ml_violations: u64,
    pub sum_l: f64,
    pub sum_l2: f64,
    pub sum_i: f64,
    pub sum_i2: f64,
    pub sum_li: f64,
}

/// Two-sided 95% normal quantile.
pub fn z95() -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.975)
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

impl FerStats {
    pub fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.undetected_errors += u64::from(o.undetected);
        self.list_exhausted += u64::from(o.exhausted);
        self.resampled += o.resampled;
        self.ml_violations += u64::from(o.ml_violation);
        let (l, i) = (o.list_rank as f64, o.insertions as f64);
        self.sum_l += l;
        self.sum_l2 += l * l;
        self.sum_i += i;
        self.sum_i2 += i * i;
        self.sum_li += l * i;
    }

    pub fn errors(&self) -> u64 {
        self.undetected_errors + self.list_exhausted
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.errors() as f64 / self.frames as f64
        }
    }

    pub fn fer_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors(), self.frames, z95())
    }

    pub fn avg_list_rank(&self) -> f64 {
        self.sum_l / self.frames.max(1) as f64
    }

    pub fn avg_insertions(&self) -> f64 {
        self.sum_i / self.frames.max(1) as f64
    }

    /// Mean and standard error of `I - a L` per frame.
    pub fn insertion_excess(&self, a: f64) -> (f64, f64) {
        let n = self.frames.max(1) as f64;
        let mean = (self.sum_i - a * self.sum_l) / n;
        let second = (self.sum_i2 - 2.0 * a * self.sum_li + a * a * self.sum_l2) / n;
        let var = (second - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }
}

/// Random-number stream of frame `frame` at SNR index `point`.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point);
    rng.set_word_pos(u128::from(frame) << 32);
    rng
}

/// Simulates one frame: random message, CRC, encoding, channel, decoding.
pub fn simulate_frame<T: Scalar>(
    encoder: &ConvEncoder,
    decoder: &mut SlvdDecoder<'_, T>,
    crc: CrcPolynomial,
    amplitude: T,
    rng: &mut ChaCha8Rng,
) -> Result<FrameOutcome>
where
    StandardNormal: Distribution<T>,
{
    let k = encoder.layout().k;
    let mut resampled = 0;
    let (message, codeword) = loop {
        let message: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2u8)).collect();
        match encoder.encode(&crc_encode(&message, crc)) {
            Ok(cw) => break (message, cw),
            Err(Error::NoTailBitingState) => resampled += 1,
            Err(e) => return Err(e),
        }
    };
    let rx = transmit(&codeword, amplitude, rng);
    let r = decoder.decode(&rx)?;
    let mut out = FrameOutcome {
        list_rank: r.list_rank as u64,
        insertions: r.insertions,
        resampled,
        ..FrameOutcome::default()
    };
    match r.status {
        DecodeStatus::ListExhausted => out.exhausted = true,
        DecodeStatus::Success => {
            out.undetected = r.message.as_deref() != Some(&message[..]);
            if out.undetected {
                let payload = encoder.payload_of(&r.codeword);
                assert!(crc_check(&payload, crc)?, "accepted payload fails its CRC");
            }
            let sent = rx.distance(&codeword);
            let tol = T::from_f64(1e-9).expect("representable") * (T::one() + sent);
            out.ml_violation = r.metric > sent + tol;
        }
    }
    Ok(out)
}

/// Runs one SNR point until the stop rule fires.
pub fn run_point<T: Scalar>(
    encoder: &ConvEncoder,
    trellis: &DualTrellis,
    cfg: &SimConfig,
    snr_db: T,
    point: u64,
) -> Result<FerStats>
where
    StandardNormal: Distribution<T>,
{
    let channel = ChannelConfig::from_snr_db(snr_db);
    let mut stats = FerStats {
        snr_db: snr_db.to_f64().unwrap_or(f64::NAN),
        seed: cfg.seed,
        ..FerStats::default()
    };
    let batch = cfg.batch.max(1) as u64;
    let mut next = 0u64;
    while stats.errors() < cfg.stop.max_errors && stats.frames < cfg.stop.max_frames {
        let end = (next + batch).min(cfg.stop.max_frames);
        let outcomes: Vec<Result<FrameOutcome>> = (next..end)
            .into_par_iter()
            .map_init(
                || SlvdDecoder::<T>::new(trellis, encoder, cfg.crc, cfg.max_list),
                |dec, i| {
                    let dec = dec.as_mut().map_err(|e| e.clone())?;
                    let mut rng = frame_rng(cfg.seed, point, i);
                    simulate_frame(encoder, dec, cfg.crc, channel.amplitude, &mut rng)
                },
            )
            .collect();
        for o in outcomes {
            stats.add(&o?);
            if stats.errors() >= cfg.stop.max_errors {
                break;
            }
        }
        next = end;
    }
    Ok(stats)
}

/// Runs every SNR point, each on its own stream.
pub fn run_fer<T: Scalar>(
    encoder: &ConvEncoder,
    cfg: &SimConfig,
    snrs_db: &[T],
) -> Result<Vec<FerStats>>
where
    StandardNormal: Distribution<T>,
{
    if cfg.crc.degree() as usize != encoder.layout().m {
        return Err(Error::CrcDegree {
            text: cfg.crc.to_string(),
            found: cfg.crc.degree(),
            expected: encoder.layout().m as u32,
        });
    }
    let trellis = frame_trellis(encoder, cfg.zt_decode)?;
    let run = || {
        snrs_db
            .iter()
            .enumerate()
            .map(|(j, &s)| run_point(encoder, &trellis, cfg, s, j as u64))
            .collect()
    };
    if cfg.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)
    }
}

/// One CSV row.
#[derive(Debug, serde::Serialize)]
struct CsvRow {
    snr_db: f64,
    frames: u64,
    undetected_errors: u64,
    list_exhausted: u64,
    fer: f64,
    fer_ci_low: f64,
    fer_ci_high: f64,
    #[serde(rename = "avg_L")]
    avg_l: f64,
    #[serde(rename = "avg_I")]
    avg_i: f64,
    seed: u64,
}

/// Writes `#`-prefixed comment lines, then a header and one row per point.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], stats: &[FerStats]) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    for c in comments {
        writeln!(out, "# {c}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    for s in stats {
        let (lo, hi) = s.fer_interval();
        w.serialize(CsvRow {
            snr_db: s.snr_db,
            frames: s.frames,
            undetected_errors: s.undetected_errors,
            list_exhausted: s.list_exhausted,
            fer: s.fer(),
            fer_ci_low: lo,
            fer_ci_high: hi,
            avg_l: s.avg_list_rank(),
            avg_i: s.avg_insertions(),
            seed: s.seed,
        })
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush().map_err(io)
}

/// Extra insertions allowed per frame by the complexity model.
pub fn insertion_allowance(mode: Termination, v: u32) -> f64 {
    match mode {
        Termination::Zt => 0.0,
        Termination::Tb => ((1u64 << v) - 1) as f64,
    }
}
