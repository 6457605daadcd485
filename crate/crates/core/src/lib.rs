//! High-rate convolutional codes with CRC-aided serial list Viterbi decoding
//! over the dual (syndrome-former) trellis.
//!
//! Soft-valued code (decoder, channel, complexity model) is generic over
//! [`Scalar`]; the aliases below fix it to `f64`.

pub mod cli;
pub mod crc_search;
pub mod dual_trellis;
pub mod encoder;
pub mod error;
pub mod gf2poly;
pub mod sim;
pub mod slvd;

pub use error::{Error, Result};

/// Floating-point type carrying channel values and path metrics.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + std::iter::Sum
        + Send
        + Sync
        + 'static
{
}

pub type SoftWord = slvd::SoftWord<f64>;
pub type DecodeResult = slvd::DecodeResult<f64>;
pub type SlvdDecoder<'a> = slvd::SlvdDecoder<'a, f64>;
pub type ComplexityReport = slvd::ComplexityReport<f64>;
pub type ChannelConfig = sim::ChannelConfig<f64>;
