//! File formats, build pipeline and benchmark harness around `viscount-core`.

pub mod bench;
pub mod config;
pub mod persist;
pub mod pipeline;
pub mod sceneio;

pub use config::RunConfig;
