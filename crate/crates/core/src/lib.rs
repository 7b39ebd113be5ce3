//! Downlink coverage of K-tier heterogeneous cellular networks in which users
//! are clustered around small-cell base stations.
//!
//! [`Analyzer`] evaluates association probabilities, coverage, its bounds and
//! the independent-user limit; [`sim`] estimates the same quantities by Monte
//! Carlo; [`config`] and [`experiment`] drive sweeps from a config file.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod error;
pub mod experiment;
pub mod network;
pub mod sim;
pub mod special;

pub use analytic::{Analyzer, CoverageReport};
pub use error::{Error, Result};
pub use network::{
    effective_network, ClusterModel, EffectiveNetwork, GeneralRadial, NetworkConfig, TierParams,
};
pub use special::QuadratureSpec;
