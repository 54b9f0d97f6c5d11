//! The chapters of the guide under `book/src`, compiled so that their code
//! listings run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/signals.md")]
pub mod signals {}

#[doc = include_str!("../../../book/src/hrv.md")]
pub mod hrv {}

#[doc = include_str!("../../../book/src/eeg.md")]
pub mod eeg {}

#[doc = include_str!("../../../book/src/temperature.md")]
pub mod temperature {}

#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/fusion.md")]
pub mod fusion {}

#[doc = include_str!("../../../book/src/synth.md")]
pub mod synth {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
