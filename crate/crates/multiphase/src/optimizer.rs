//! Multi-start derivative-free search over pure probe amplitudes maximizing
//! the mutual information, plus the crossover locator between the two named
//! probe families.

use crate::hilbert;
use crate::information::{self, MiOptions};
use crate::nm;
use crate::probes::{equatorial_product, holland_burnett, ProbeError, ProbeState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimError {
    #[error("dimension {dim} exceeds the optimizer cap of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("search supports k in {{1,2}}, got k={0}")]
    UnsupportedK(usize),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("no crossover found up to N_max={n_max}")]
    CrossoverNotFound { n_max: u32 },
    #[error(transparent)]
    Info(#[from] information::InfoError),
}

const MAX_DIMENSION: usize = 200;

/// Outcome of a probe optimization.
#[derive(Debug, Clone)]
pub struct OptimizationRun {
    pub best_probe: ProbeState,
    pub best_mi: f64,
    pub starts: usize,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

/// Maximize the mutual information over real non-negative normalized
/// amplitude vectors by multi-start Nelder-Mead on the unit sphere.
///
/// The equatorial product and the uniform probe are always among the starts;
/// the remaining `starts - 2` points are drawn from `seed`. Deterministic
/// for fixed `(seed, tol, starts)`. Ties between starts resolve to the
/// lowest start index.
pub fn optimize_probe(
    k: usize,
    n: u32,
    tol: f64,
    starts: usize,
    seed: u64,
) -> Result<OptimizationRun, OptimError> {
    if k == 0 || k > 2 {
        return Err(OptimError::UnsupportedK(k));
    }
    let dim = hilbert::dimension(k, n).map_err(ProbeError::from)? as usize;
    if dim > MAX_DIMENSION {
        return Err(OptimError::DimensionTooLarge {
            dim,
            max: MAX_DIMENSION,
        });
    }

    let mi_of = |reals: &[f64]| -> f64 {
        let probe = match ProbeState::from_real_normalized(k, n, reals) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        match information::mutual_information_opts(
            &probe,
            &MiOptions {
                tol,
                ..Default::default()
            },
        ) {
            Ok(r) => r.value,
            Err(information::InfoError::Quadrature(q)) => q.partial().value,
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut rng = StdRng::seed_from_u64(seed);
    let mut start_points: Vec<Vec<f64>> = Vec::with_capacity(starts.max(2));
    start_points.push(
        equatorial_product(k, n)?
            .amplitudes()
            .iter()
            .map(|c| c.re)
            .collect(),
    );
    start_points.push(
        holland_burnett(k, n)?
            .amplitudes()
            .iter()
            .map(|c| c.re)
            .collect(),
    );
    for _ in 2..starts {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        start_points.push(v.into_iter().map(|x| x / norm).collect());
    }

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut iterations = 0usize;
    let mut converged = false;
    for (i, x0) in start_points.iter().enumerate() {
        let out = nm::nelder_mead(|x| -mi_of(x), x0, 0.08, tol, 400 * dim);
        iterations += out.iterations;
        let value = -out.fx;
        let better = match &best {
            None => true,
            Some((_, b, _)) => value > *b,
        };
        if better {
            converged = out.converged;
            best = Some((i, value, out.x));
        }
    }

    let (_, best_mi, best_x) = best.expect("at least two starts");
    let abs: Vec<f64> = best_x.iter().map(|x| x.abs()).collect();
    let best_probe = ProbeState::from_real_normalized(k, n, &abs)?;
    Ok(OptimizationRun {
        best_probe,
        best_mi,
        starts: start_points.len(),
        iterations,
        converged,
        seed,
    })
}

/// The closed-form local optimum of the protocol: the uniform probe.
pub fn local_optimal_probe(k: usize, n: u32) -> Result<ProbeState, OptimError> {
    Ok(holland_burnett(k, n)?)
}

/// Smallest `N*` such that the uniform probe beats the product probe by more
/// than `tol` bits for every `N in [N*, n_max]`.
pub fn crossover(k: usize, n_max: u32, tol: f64) -> Result<u32, OptimError> {
    if k == 0 || k > 2 {
        return Err(OptimError::UnsupportedK(k));
    }
    assert!(n_max >= 2, "crossover needs N_max >= 2");
    let quad_tol = (tol / 4.0).min(1e-4);
    let mut candidate: Option<u32> = None;
    for n in 1..=n_max {
        let ip = information::mutual_information(&equatorial_product(k, n)?, quad_tol)?.value;
        let ih = information::mutual_information(&holland_burnett(k, n)?, quad_tol)?.value;
        if ih > ip + tol {
            candidate.get_or_insert(n);
        } else {
            candidate = None; // ordering not yet stable
        }
    }
    candidate.ok_or(OptimError::CrossoverNotFound { n_max })
}
