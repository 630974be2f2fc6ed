//! Coverage modelling for wall-assisted bistatic Wi-Fi sensing.

pub mod channel;
pub mod coverage;
pub mod csiproc;
pub mod geometry;
pub mod placement;
pub mod scenario;
