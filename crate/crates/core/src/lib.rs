//! Closed-form inter-cell interference, SINR and coverage for dynamic-TDD
//! hexagonal networks, validated against brute-force oracles.
//!
//! Dynamic TDD lets every cell pick its transmission direction per cycle,
//! which adds two cross-link interference paths on top of the classic ones:
//! mobile-to-mobile (UL→DL) and base-to-base (DL→UL). This crate evaluates
//! all four interference-to-signal ratios in closed form on the hexagonal
//! macro lattice ([`isr`]), extends the dominant DL→UL path to a clustered
//! small-cell layer with SINR and coverage distributions ([`cluster`]), and
//! ships independent truncated-lattice, quadrature and Monte-Carlo reference
//! implementations ([`oracle`]) that every closed form is tested against.
//!
//! The series all share the kernel of [`specfun`]: log-gamma, the zeta pair,
//! and the hexagonal lattice weight ω(z).

// Domain guards use the negated form `!(v > 0.0)` on purpose: it rejects NaN,
// which the un-negated comparison would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod error;
pub mod isr;
pub mod lattice;
pub mod oracle;
pub mod quad;
pub mod specfun;

pub use cluster::{ClusterParams, NoiseTerm, Sinr, SmallCellQuery};
pub use error::{CoreError, Result};
pub use isr::{IsrBreakdown, MobileQuery, NetworkParams, SeriesControl, TrafficMix};
pub use lattice::{EpsteinSum, LatticePoint, LatticeSpec};
pub use oracle::{DlUlConstant, OracleConfig, OracleResult};
pub use specfun::SpecFunAccuracy;
