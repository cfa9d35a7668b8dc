//! SAR half of the joint receiver: range compression with the decoded
//! references, motion estimation along the range-migration line, and
//! compensated Range-Doppler focusing.

mod compress;
mod doppler;
mod estimate;
mod focus;
mod metrics;
mod music;
mod track;


pub use compress::{peak_to_background_db, range_compress, RangeCompressed};
pub use doppler::{extract_doppler_history, remove_linear_component, DopplerHistory};
pub use estimate::{estimate_wave_amplitudes, EstimatorConfig, MotionEstimate, MotionEstimator};
pub use focus::{compensate_and_focus, FocusGeometry, FocusMethod, FocusReport, PointMetrics};
pub use metrics::{brightest, contrast, cut_metrics, entropy, irf_metrics, CutMetrics, IrfMetrics, ISLR_HALF_WINDOW};
pub use music::{root_music_frequencies, MusicConfig, MusicEstimate};
pub use track::{extract_rcm_line, RcmLine, RcmTrack};
