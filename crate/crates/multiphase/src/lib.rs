//! Global estimation of one or two phases with no prior knowledge, measured
//! in bits: covariant phase-measurement densities, mutual information between
//! phases and discretized estimators, Heisenberg/standard-quantum-limit
//! bounds and probe optimization.
//!
//! The building blocks:
//!
//! - [`hilbert`]: the non-degenerate symmetric basis for `k` phases and `N`
//!   resources, with exact combinatorial weights.
//! - [`probes`]: the equatorial product state, the uniform
//!   (Holland-Burnett) state, and the geometric measure of entanglement.
//! - [`channel`]: conditional densities induced by the covariant
//!   measurement: direct sums, Fejer and two-phase closed forms, the
//!   discretization prescription and Gaussian approximants.
//! - [`information`]: mutual information and Bayesian cost functionals by
//!   covariance-reduced adaptive quadrature, with an independent
//!   discrete-estimator route as cross-check.
//! - [`bounds`]: every closed-form limit and asymptotic constant.
//! - [`optimizer`]: multi-start search over probe amplitudes and the
//!   parallel/sequential crossover locator.
//!
//! Angles are in turns throughout: a phase offset gamma lives on `[0, 1)`
//! and the encoding kernel is `e^{2 pi i n gamma}`.
//!
//! ```
//! use multiphase::{holland_burnett, mutual_information, bounds};
//!
//! // one-phase uniform probe on a single resource: I = log2(e) - 1 bits
//! let probe = holland_burnett(1, 1).unwrap();
//! let mi = mutual_information(&probe, 1e-8).unwrap();
//! assert!((mi.value - (std::f64::consts::LOG2_E - 1.0)).abs() < 1e-8);
//!
//! // and it can never exceed the subspace bound log2 C(N+k, N)
//! assert!(mi.value <= bounds::hb_k(1, 1));
//! ```

pub mod bounds;
pub mod channel;
mod fft;
pub mod hilbert;
pub mod information;
mod nm;
pub mod optimizer;
pub mod probes;
pub mod quadrature;

pub use channel::{density, discrete_prob, double_hb_density, fejer_density, gaussian_approx};
pub use channel::{EvalMode, ReducedDensity};
pub use hilbert::{dimension, enumerate_basis, BasisCatalog, SimplexIndex};
pub use information::{
    bayes_cost, mutual_information, mutual_information_discrete, CostFunction, CostMode,
};
pub use optimizer::{crossover, local_optimal_probe, optimize_probe, OptimizationRun};
pub use probes::{
    eg_asymptotic, equatorial_product, geometric_entanglement, holland_burnett, EntanglementResult,
    ProbeState,
};
pub use quadrature::{QuadratureError, QuadratureResult};
