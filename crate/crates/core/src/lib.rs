//! Greedy rejection sampling and the channel simulation divergence family.
//!
//! A target/proposal pair ([`PairSpec`], [`DistributionPair`]) is reduced to
//! its width function w(h) = P(dQ/dP ≥ h) ([`WidthFunction`]). From w the
//! crate computes D_KL, D_CS, D_ACS and the general D^φ
//! ([`divergences`]), the exact law of the greedy rejection sampling index
//! ([`grs_index_distribution`]), and runs the sampler itself
//! ([`grs_sample`]). The [`experiments`] module sweeps parameter grids and
//! checks every codelength and runtime bound on a suite of pairs.
//!
//! ```
//! use crs_toolkit::{grs_index_distribution, width_eval, PairSpec};
//!
//! let spec = PairSpec::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]);
//! let index = grs_index_distribution(&width_eval(&spec)?, 1e-12)?;
//! assert!((index.entropy_bits - 2.0).abs() < 1e-9);
//! # Ok::<(), crs_toolkit::Error>(())
//! ```

pub mod cli;
pub mod divergences;
pub mod error;
pub mod experiments;
pub mod gof;
pub mod grs;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod width;

pub use divergences::{
    dcs_integral_representation_check, dcs_laplace_closed, divergence, kl_divergence, kl_sandwich,
    optimal_family_values, quad_phi_integral, DivergenceKind, DivergenceReport, KlRoute, Method, OptimalFamily, Phi,
    SandwichBounds,
};
pub use error::{Error, Result};
pub use grs::{grs_empirical, grs_index_distribution, grs_sample, GrsState, GrsTrajectory, IndexDistribution};
pub use measures::{make_pair, sample_proposal, DistributionPair, PairSpec, Point, SyntheticWidth};
pub use rng::stream;
pub use width::{d_infinity, superlevel_measures, width_eval, width_mc_estimate, WidthFunction};
