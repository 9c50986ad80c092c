//! Relay beamforming for the two-way multi-antenna relay channel with
//! analogue network coding.
//!
//! The crate computes optimal relay matrices through an exact SDP relaxation,
//! traces achievable rate regions by rate-profile bisection, evaluates the
//! MRR-MRT and ZFR-ZFT schemes, closed-form capacity bounds and a
//! decode-and-forward baseline. See `examples/` for one program per feature.

pub mod bounds;
pub mod channel;
pub mod df;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod optimal;
pub mod oracle;
pub mod region;
pub mod sdp;
pub mod suboptimal;
pub mod validate;

pub use error::{Error, Result};
