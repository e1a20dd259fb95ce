//! Secrecy-rate resource allocation for amplify-and-forward (AF) relay-assisted
//! multi-carrier downlinks.
//!
//! The crate covers the whole pipeline from seeded multipath channels to the
//! allocation schemes compared in the experiments:
//!
//! - [`channel`]: tap channels, their per-sub-carrier gains, and full network tensors.
//! - [`rate`]: amplification factor, exact and high-SNR secrecy rates, sums over an assignment.
//! - [`kkt`]: per-sub-carrier maximizers of the Lagrangian subproblems, with a numeric oracle.
//! - [`single_link`]: OPT, Sub-OPT and Non-OPT for one relay and one user.
//! - [`joint`]: J-OPT, joint power allocation, relay selection and sub-carrier assignment.
//! - [`restricted`]: Sub-OPT-I, Sub-OPT-II and the multi-relay Non-OPT baseline.
//! - [`experiments`]: seeded experiment runner writing CSV datasets.
//!
//! Rates follow the half-duplex convention: every reported secrecy rate carries
//! the factor 1/2, while the dual subproblems are written without it.

pub mod alloc;
pub mod channel;
mod dual;
pub mod error;
pub mod experiments;
pub mod joint;
pub mod kkt;
pub mod numeric;
pub mod rate;
pub mod report;
pub mod restricted;
pub mod single_link;

pub use alloc::{Assignment, Budgets, Link, PowerAllocation};
pub use channel::{ChannelModel, NetworkChannels, NoiseModel, TapChannel};
pub use error::{Error, Result};
pub use kkt::{DualPrices, InnerSolution, Objective, PowerBox, SolveMethod};
pub use rate::{ClipPolicy, PowerPair, RateMode, SubcarrierGains};
pub use report::{DualTrace, MultiDualState, Scheme, SolveReport, SolverParams};
