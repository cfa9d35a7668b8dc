//! Joint radar-communications simulator and receiver for a bistatic SAR
//! with a geosynchronous transmitter and an airborne receiver.
//!
//! The signal chain is generic over the floating-point type through
//! [`Real`]; the `f64` aliases at the crate root cover the common case.

pub mod comm;
pub mod container;
pub mod echo;
pub mod error;
pub mod geometry;
pub mod sar;
pub mod scalar;
pub mod scenario;
pub mod waveform;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real, SPEED_OF_LIGHT};

pub type PlatformTrack = geometry::PlatformTrack<f64>;
pub type HeaveModel = geometry::HeaveModel<f64>;
pub type TargetMotion = geometry::TargetMotion<f64>;
pub type PulseTrain = waveform::PulseTrain<f64>;
pub type Transmitter = waveform::Transmitter<f64>;
