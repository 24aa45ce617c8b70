//! Truncated power-series algebra in one and two indeterminates.

pub mod bi;
pub mod uni;

pub use bi::{compose_uni_bi, idx, xy_to_zw, zw_to_xy, BiSeries, SparseBi};
pub use uni::{Reality, UniSeries};
