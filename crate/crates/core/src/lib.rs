//! Units-aware evaluation of continuous spontaneous localization (CSL) rate
//! formulas and the experimental constraints they face.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::module_inception
)]

pub mod channel;
pub mod config;
pub mod correlation;
pub mod cslcore;
pub mod error;
pub mod lower_channels;
pub mod oracle;
pub mod phonon;
pub mod projections;
pub mod registry;
pub mod report;
pub mod scan;
pub mod units;
pub mod upper_channels;

pub use error::{Error, Result};
