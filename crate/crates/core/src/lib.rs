//! Finite-dimensional reduction for concentrating solutions of the slightly subcritical
//! Brezis–Nirenberg problem `−Δu = u^{(N+2)/(N−2)−ε}` with Dirichlet data.
//!
//! The crate computes Green and Robin functions of a bounded domain, assembles the reduced
//! energy `Ψ_k` and interaction matrix `M_k`, locates and classifies critical points of `Ψ_k`,
//! counts the predicted blow-up solutions, checks Pohozaev-type surface identities by sphere
//! quadrature, and turns critical points into blow-up predictions.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases below fix `f64`.

pub mod bubble;
pub mod critical;
pub mod domain;
pub mod error;
pub mod green;
pub mod linalg;
pub mod pohozaev;
pub mod predictor;
pub mod psi;
pub mod quadrature;
pub mod sampling;
pub mod scalar;

pub use bubble::{BubbleParams, Dimension, UniversalConstants};
pub use critical::{CountReport, CriticalPoint, SearchConfig};
pub use domain::{BallSpec, DomainSpec, Shape, SurfaceSpec};
pub use error::{Error, Result};
pub use green::{make_provider, GreenFunction, GreenProvider, Kernel, Order, RobinEvaluation};
pub use pohozaev::{ClosedForms, IdentityResidual, IdentitySettings};
pub use predictor::{BlowupPrediction, FieldSamples, ValidityNote};
pub use psi::{InteractionMatrix, PeakConfig};
pub use quadrature::{Estimate, Scheme, SphereQuadrature};
pub use scalar::Real;

pub type GreenProvider64 = GreenProvider<f64>;
pub type GreenProvider32 = GreenProvider<f32>;
pub type UniversalConstants64 = UniversalConstants<f64>;
pub type BubbleParams64 = BubbleParams<f64>;
pub type PeakConfig64 = PeakConfig<f64>;
pub type CriticalPoint64 = CriticalPoint<f64>;
pub type SearchConfig64 = SearchConfig<f64>;
pub type BlowupPrediction64 = BlowupPrediction<f64>;
