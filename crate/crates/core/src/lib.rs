//! Consensus distributions and misinformation spread in gossip networks
//! where some agents push their beliefs on others without listening back.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod bound;
pub mod cuts;
pub mod error;
pub mod gossip;
pub mod graph;
pub mod influence;
pub mod kernel;
pub mod linalg;
pub mod markov;
pub mod network;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::Matrix<f64>;
pub type Network = network::SocialNetwork<f64>;
pub type Decomposition = kernel::InteractionDecomposition<f64>;
pub type Stationary = markov::StationaryDistribution<f64>;
pub type Passage = markov::PassageTimes<f64>;
pub type Graph = cuts::WeightedGraph<f64>;
pub type Cut = cuts::CutResult<f64>;
pub type Excess = influence::ExcessInfluence<f64>;
pub type Bounds = influence::BoundsReport<f64>;
pub type Estimate = gossip::ConsensusEstimate<f64>;
pub type Run = gossip::RunResult<f64>;
