//! LDPC belief-propagation decoders with spiking-neuron check-node updates.
//!
//! * [`code`]: Tanner graphs, random regular construction, alist I/O.
//! * [`channel`]: BPSK over AWGN with matched or fixed LLR scaling.
//! * [`neuron`]: discrete-time LIF / LI neurons.
//! * [`decoder`]: SPA, min-sum variants and the multi-level SCNU decoders.
//! * [`sim`]: reproducible parallel Monte Carlo BER estimation.
//! * [`sweep`]: threshold line search and SCNU transfer curves.

pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod neuron;
pub mod sim;
pub mod sweep;

pub use code::{construct_regular_code, CodeSpec, RegularConstruction, TannerGraph};
pub use decoder::{Algorithm, DecodeResult, Decoder, DecoderConfig, ScnuConfig};
pub use error::{Error, Result};
