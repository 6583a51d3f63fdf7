//! Mutual information, conditional-entropy cost functionals and their
//! discretized counterparts, computed from the covariant density.
//!
//! Covariance collapses the double phase average to a single integral over
//! the offset `gamma`, so the continuous mutual information is
//! `I = int_{[0,1)^k} g log2 g` with `0 log 0 = 0`. The discrete route
//! (`H(m) - H(m|phi)`) exists as an independent cross-check and must agree.
//!
//! All logs are base 2 (bits); natural logs appear only inside log-gamma.

use crate::channel::{EvalMode, ReducedDensity};
use crate::fft::fft_inplace;
use crate::probes::ProbeState;
use crate::quadrature::{self, QuadratureError, QuadratureResult};
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;
use thiserror::Error;

/// Default evaluation budgets (integrand evaluations).
pub const DEFAULT_BUDGET_K1: u64 = 10_000_000;
pub const DEFAULT_BUDGET_K2: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("mutual information is implemented for k in {{1,2}}, got k={0}")]
    UnsupportedK(usize),
    #[error(
        "the surprise cost depends on the conditional density itself, so its \
         Bayesian average is not discretization-invariant; continuous and \
         discrete surprise averages differ by construction. Evaluate the \
         surprise in continuous mode instead"
    )]
    SurpriseNotDiscrete,
}

/// Cost functions for the Bayesian mean deviation, on offsets in turns.
#[derive(Clone)]
pub enum CostFunction {
    /// `4 sin^2(pi gamma)`: periodic, even, non-positive Fourier tail.
    HolevoSine,
    /// `-log2 g(gamma)`: the cost whose average is the conditional entropy.
    Surprise,
    /// Arbitrary user cost on the offset.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl CostFunction {
    fn eval(&self, gamma: f64, density: f64) -> f64 {
        match self {
            CostFunction::HolevoSine => {
                let s = (std::f64::consts::PI * gamma).sin();
                4.0 * s * s
            }
            CostFunction::Surprise => {
                if density > 0.0 {
                    -density.log2()
                } else {
                    0.0
                }
            }
            CostFunction::Custom(f) => f(gamma),
        }
    }
}

impl std::fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostFunction::HolevoSine => write!(f, "HolevoSine"),
            CostFunction::Surprise => write!(f, "Surprise"),
            CostFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode {
    Continuous,
    Discrete,
}

/// Optional knobs for the mutual-information drivers.
#[derive(Default)]
pub struct MiOptions<'a> {
    /// Absolute-error target.
    pub tol: f64,
    /// Integrand-evaluation budget; per-k default when `None`.
    pub budget: Option<u64>,
    /// Called with a completed fraction during long 2-D passes.
    pub progress: Option<&'a (dyn Fn(f64) + Sync)>,
}

fn xlog2x(g: f64) -> f64 {
    if g > 0.0 {
        g * g.log2()
    } else {
        0.0
    }
}

/// Mutual information `I = int g log2 g` of the probe's covariant density.
pub fn mutual_information(probe: &ProbeState, tol: f64) -> Result<QuadratureResult, InfoError> {
    mutual_information_opts(
        probe,
        &MiOptions {
            tol,
            ..Default::default()
        },
    )
}

/// [`mutual_information`] with explicit budget and progress reporting.
pub fn mutual_information_opts(
    probe: &ProbeState,
    opts: &MiOptions,
) -> Result<QuadratureResult, InfoError> {
    let tol = opts.tol;
    assert!(tol > 0.0, "tolerance must be positive");
    match probe.k() {
        1 => {
            let budget = opts.budget.unwrap_or(DEFAULT_BUDGET_K1);
            let rd = ReducedDensity::new(probe.clone());
            let f = |g: f64| xlog2x(rd.eval(&[g]));
            let n_init = 4 * (probe.n() as usize + 1).max(2);
            Ok(quadrature::adaptive_1d(&f, 0.0, 1.0, n_init, tol, budget)?)
        }
        2 => {
            let budget = opts.budget.unwrap_or(DEFAULT_BUDGET_K2);
            let rd = ReducedDensity::new(probe.clone());
            match rd.mode() {
                EvalMode::ClosedFormDouble => {
                    let f = |a: f64, b: f64| xlog2x(rd.eval(&[a, b]));
                    let n_axis = 4 * (probe.n() as usize + 1).max(2);
                    Ok(quadrature::adaptive_2d(
                        &f,
                        (0.0, 1.0),
                        (0.0, 1.0),
                        (n_axis, n_axis),
                        tol,
                        budget,
                        opts.progress,
                    )?)
                }
                _ => mi_k2_grid(probe, tol, budget),
            }
        }
        other => Err(InfoError::UnsupportedK(other)),
    }
}

/// Exact uniform-grid evaluation of the k=2 mutual information for
/// band-limited amplitude vectors (every probe here is one): the amplitude
/// sum is a trig polynomial of degree <= N per axis, so its values on a
/// power-of-two grid come from zero-padded FFTs with no approximation. The
/// grid doubles until the change from the half grid is below tol.
fn mi_k2_grid(probe: &ProbeState, tol: f64, budget: u64) -> Result<QuadratureResult, InfoError> {
    let n = probe.n() as usize;
    let mut p = ((2 * (n + 1)).next_power_of_two()).max(64);
    let mut evals: u64 = 0;
    let mut last: Option<QuadratureResult> = None;

    loop {
        if evals + (p as u64) * (p as u64) > budget {
            let partial = last.unwrap_or(QuadratureResult {
                value: 0.0,
                abs_error_estimate: f64::INFINITY,
                evaluations: evals,
            });
            return Err(InfoError::Quadrature(QuadratureError::BudgetExhausted {
                partial,
                budget,
            }));
        }
        let (full, half) = mi_grid_pass(probe, p);
        evals += (p as u64) * (p as u64);
        let err = (full - half).abs();
        let result = QuadratureResult {
            value: full,
            abs_error_estimate: err,
            evaluations: evals,
        };
        if err <= tol {
            return Ok(result);
        }
        last = Some(result);
        p *= 2;
    }
}

/// One grid pass: returns the grid mean of `g log2 g` at resolution `P` and,
/// from the even-indexed sub-lattice, the same mean at `P/2`.
fn mi_grid_pass(probe: &ProbeState, p: usize) -> (f64, f64) {
    let n = probe.n() as usize;
    let amps = probe.amplitudes();

    // stage 1: row transforms over n2 for each n1 (rows of the coefficient
    // triangle), stored column-major for the stage-2 gathers
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut pos = 0usize;
    for n1 in 0..=n {
        row_offsets.push(pos);
        pos += n + 1 - n1;
    }

    let rows: Vec<Vec<Complex64>> = (0..=n)
        .into_par_iter()
        .map(|n1| {
            let mut buf = vec![Complex64::new(0.0, 0.0); p];
            let off = row_offsets[n1];
            let len = n - n1 + 1;
            buf[..len].copy_from_slice(&amps[off..off + len]);
            fft_inplace(&mut buf, true);
            buf
        })
        .collect();

    // transpose to column-major so each stage-2 gather is contiguous
    let mut cols = vec![Complex64::new(0.0, 0.0); (n + 1) * p];
    for (n1, row) in rows.iter().enumerate() {
        for (j2, &v) in row.iter().enumerate() {
            cols[j2 * (n + 1) + n1] = v;
        }
    }
    drop(rows);

    // stage 2: per column, transform over n1 and fold g log2 g
    let col_sums: Vec<(f64, f64)> = (0..p)
        .into_par_iter()
        .map(|j2| {
            let mut buf = vec![Complex64::new(0.0, 0.0); p];
            buf[..=n].copy_from_slice(&cols[j2 * (n + 1)..j2 * (n + 1) + n + 1]);
            fft_inplace(&mut buf, true);
            let mut full = 0.0;
            let mut even = 0.0;
            for (j1, v) in buf.iter().enumerate() {
                let h = xlog2x(v.norm_sqr());
                full += h;
                if j1 % 2 == 0 {
                    even += h;
                }
            }
            (full, even)
        })
        .collect();

    let mut full = 0.0;
    let mut half = 0.0;
    for (j2, (f, e)) in col_sums.iter().enumerate() {
        full += f;
        if j2 % 2 == 0 {
            half += e;
        }
    }
    let pf = p as f64;
    (full / (pf * pf), half / (pf * pf / 4.0))
}

/// Discrete-estimator mutual information `H(m) - H(m|phi)`, evaluated as
/// `k log2(N+1) + (N+1)^k int_cell sum_m p log2 p` over one covariance cell
/// `[0, 1/(N+1))^k`. Cross-checks [`mutual_information`].
pub fn mutual_information_discrete(
    probe: &ProbeState,
    tol: f64,
) -> Result<QuadratureResult, InfoError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = probe.n();
    let nf = n as f64 + 1.0;
    let step = 1.0 / nf;
    let rd = ReducedDensity::new(probe.clone());
    match probe.k() {
        1 => {
            let f = |phi: f64| {
                let mut acc = 0.0;
                for m in 0..=n {
                    let p = rd.eval(&[m as f64 * step - phi]) / nf;
                    acc += xlog2x(p);
                }
                acc
            };
            let inner = quadrature::adaptive_1d(&f, 0.0, step, 16, tol / nf, DEFAULT_BUDGET_K1)?;
            Ok(QuadratureResult {
                value: nf.log2() + nf * inner.value,
                abs_error_estimate: nf * inner.abs_error_estimate,
                evaluations: inner.evaluations,
            })
        }
        2 => {
            let f = |phi1: f64, phi2: f64| {
                let mut acc = 0.0;
                for m1 in 0..=n {
                    for m2 in 0..=n {
                        let p = rd.eval(&[m1 as f64 * step - phi1, m2 as f64 * step - phi2])
                            / (nf * nf);
                        acc += xlog2x(p);
                    }
                }
                acc
            };
            let inner = quadrature::adaptive_2d(
                &f,
                (0.0, step),
                (0.0, step),
                (8, 8),
                tol / (nf * nf),
                DEFAULT_BUDGET_K2,
                None,
            )?;
            Ok(QuadratureResult {
                value: 2.0 * nf.log2() + nf * nf * inner.value,
                abs_error_estimate: nf * nf * inner.abs_error_estimate,
                evaluations: inner.evaluations,
            })
        }
        other => Err(InfoError::UnsupportedK(other)),
    }
}

/// Bayesian mean deviation of a cost over the covariant density (k=1).
///
/// Continuous mode integrates `g(gamma) c(gamma)` over one period; discrete
/// mode averages the cost against the gridded outcome probabilities. For
/// costs in the Holevo class the two coincide for every N; the surprise is
/// refused in discrete mode because its discrete average provably differs.
pub fn bayes_cost(
    probe: &ProbeState,
    cost: &CostFunction,
    mode: CostMode,
    tol: f64,
) -> Result<QuadratureResult, InfoError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if probe.k() != 1 {
        return Err(InfoError::UnsupportedK(probe.k()));
    }
    let n = probe.n();
    let nf = n as f64 + 1.0;
    let rd = ReducedDensity::new(probe.clone());
    let n_init = 4 * (n as usize + 1).max(2);
    match mode {
        CostMode::Continuous => {
            let f = |g: f64| {
                let dens = rd.eval(&[g]);
                dens * cost.eval(g, dens)
            };
            Ok(quadrature::adaptive_1d(
                &f,
                0.0,
                1.0,
                n_init,
                tol,
                DEFAULT_BUDGET_K1,
            )?)
        }
        CostMode::Discrete => {
            if matches!(cost, CostFunction::Surprise) {
                return Err(InfoError::SurpriseNotDiscrete);
            }
            let step = 1.0 / nf;
            let f = |phi: f64| {
                let mut acc = 0.0;
                for m in 0..=n {
                    let offset = phi - m as f64 * step;
                    let p = rd.eval(&[offset]) / nf;
                    acc += p * cost.eval(offset, p * nf);
                }
                acc
            };
            Ok(quadrature::adaptive_1d(
                &f,
                0.0,
                1.0,
                n_init,
                tol,
                DEFAULT_BUDGET_K1,
            )?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel;
    use crate::hilbert;
    use crate::probes::{equatorial_product, holland_burnett, ProbeState};

    const LOG2_E: f64 = std::f64::consts::LOG2_E;

    /// Force the direct-sum adaptive route for a k=2 probe (cross-check).
    fn mi_k2_adaptive_direct(probe: &ProbeState, tol: f64) -> QuadratureResult {
        let f = |a: f64, b: f64| xlog2x(channel::density(probe, &[a, b]));
        let n_axis = 4 * (probe.n() as usize + 1);
        quadrature::adaptive_2d(
            &f,
            (0.0, 1.0),
            (0.0, 1.0),
            (n_axis, n_axis),
            tol,
            DEFAULT_BUDGET_K2,
            None,
        )
        .unwrap()
    }

    #[test]
    fn analytic_point_hb_1_1() {
        let r = mutual_information(&holland_burnett(1, 1).unwrap(), 1e-9).unwrap();
        assert!((r.value - (LOG2_E - 1.0)).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn zero_resources_zero_information() {
        for probe in [
            holland_burnett(1, 0).unwrap(),
            equatorial_product(1, 0).unwrap(),
            holland_burnett(2, 0).unwrap(),
            equatorial_product(2, 0).unwrap(),
        ] {
            let r = mutual_information(&probe, 1e-9).unwrap();
            assert!(r.value.abs() < 1e-9, "k={} N=0: {}", probe.k(), r.value);
        }
    }

    #[test]
    fn unsupported_k_is_rejected() {
        let probe = holland_burnett(3, 2).unwrap();
        assert!(matches!(
            mutual_information(&probe, 1e-6),
            Err(InfoError::UnsupportedK(3))
        ));
    }

    #[test]
    fn discrete_route_matches_continuous_k1() {
        for n in [1u32, 3, 4, 6] {
            for probe in [
                equatorial_product(1, n).unwrap(),
                holland_burnett(1, n).unwrap(),
            ] {
                let tol = 1e-7;
                let a = mutual_information(&probe, tol).unwrap();
                let b = mutual_information_discrete(&probe, tol).unwrap();
                assert!(
                    (a.value - b.value).abs()
                        <= 2.0 * tol + a.abs_error_estimate + b.abs_error_estimate,
                    "N={n}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn route_equivalence_equatorial_1_4() {
        let probe = equatorial_product(1, 4).unwrap();
        let a = mutual_information(&probe, 1e-8).unwrap();
        let b = mutual_information_discrete(&probe, 1e-8).unwrap();
        assert!((a.value - b.value).abs() < 1e-6);
    }

    #[test]
    fn grid_route_matches_adaptive_direct_sum_k2() {
        for n in [2u32, 4, 6] {
            let probe = equatorial_product(2, n).unwrap();
            let grid = mutual_information(&probe, 1e-8).unwrap();
            let adaptive = mi_k2_adaptive_direct(&probe, 1e-8);
            assert!(
                (grid.value - adaptive.value).abs() < 1e-6,
                "N={n}: {} vs {}",
                grid.value,
                adaptive.value
            );
        }
    }

    #[test]
    fn closed_form_adaptive_matches_grid_for_uniform_k2() {
        // the HB probe runs the seeded adaptive mesh; push the same probe
        // through the band-limited grid route by wrapping its amplitudes
        let n = 5u32;
        let hb = holland_burnett(2, n).unwrap();
        let adaptive = mutual_information(&hb, 1e-8).unwrap();
        let grid = mi_k2_grid(&hb, 1e-8, DEFAULT_BUDGET_K2).unwrap();
        assert!(
            (adaptive.value - grid.value).abs() < 1e-6,
            "{} vs {}",
            adaptive.value,
            grid.value
        );
    }

    #[test]
    fn hb_accumulates_toward_heisenberg() {
        // I(HB) = log2(N+1) - c_N with c_N around 1.2 for moderate N
        let r = mutual_information(&holland_burnett(1, 64).unwrap(), 1e-7).unwrap();
        let deficit = (65f64).log2() - r.value;
        assert!(deficit > 1.0 && deficit < 1.3, "deficit {deficit}");
    }

    #[test]
    fn monotone_in_n_k1() {
        let mut last = (-1.0, -1.0);
        for n in 0..=30u32 {
            let ip = mutual_information(&equatorial_product(1, n).unwrap(), 1e-7)
                .unwrap()
                .value;
            let ih = mutual_information(&holland_burnett(1, n).unwrap(), 1e-7)
                .unwrap()
                .value;
            assert!(ip >= last.0 - 1e-6, "product dropped at N={n}");
            assert!(ih >= last.1 - 1e-6, "hb dropped at N={n}");
            last = (ip, ih);
        }
    }

    #[test]
    fn information_bounded_by_subspace_entropy() {
        let tol = 1e-7;
        for (k, n) in [(1usize, 7u32), (1, 20), (2, 6)] {
            for probe in [
                equatorial_product(k, n).unwrap(),
                holland_burnett(k, n).unwrap(),
            ] {
                let r = mutual_information(&probe, tol).unwrap();
                let bound = (hilbert::dimension(k, n).unwrap() as f64).log2();
                assert!(r.value <= bound + tol, "k={k} N={n}: {} > {bound}", r.value);
            }
        }
    }

    #[test]
    fn halving_tol_is_consistent() {
        let probe = equatorial_product(1, 9).unwrap();
        let coarse = mutual_information(&probe, 1e-5).unwrap();
        let fine = mutual_information(&probe, 5e-6).unwrap();
        assert!(
            (coarse.value - fine.value).abs()
                <= coarse.abs_error_estimate + fine.abs_error_estimate,
            "{} vs {}",
            coarse.value,
            fine.value
        );
    }

    #[test]
    fn budget_error_carries_partial() {
        let probe = holland_burnett(1, 128).unwrap();
        let err = mutual_information_opts(
            &probe,
            &MiOptions {
                tol: 1e-12,
                budget: Some(2000),
                progress: None,
            },
        )
        .unwrap_err();
        match err {
            InfoError::Quadrature(QuadratureError::BudgetExhausted { partial, budget }) => {
                assert_eq!(budget, 2000);
                assert!(partial.value.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn discrete_indicator_for_uniform_probe() {
        // p(m|phi) is the exact indicator at grid phases: conditional entropy
        // contribution vanishes and I equals log2(N+1) minus the cell average
        let n = 4u32;
        let probe = holland_burnett(1, n).unwrap();
        let r = mutual_information_discrete(&probe, 1e-7).unwrap();
        let cont = mutual_information(&probe, 1e-7).unwrap();
        assert!((r.value - cont.value).abs() < 1e-5);
    }

    #[test]
    fn holevo_sine_flat_density_costs_two() {
        // N=0: g = 1, integral of 4 sin^2(pi gamma) = 2
        let probe = holland_burnett(1, 0).unwrap();
        let r = bayes_cost(
            &probe,
            &CostFunction::HolevoSine,
            CostMode::Continuous,
            1e-10,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn holevo_sine_equatorial_n1_costs_one() {
        // g = 1 + cos(2 pi gamma), c = 2 - 2 cos(2 pi gamma): integral = 1
        let probe = equatorial_product(1, 1).unwrap();
        let r = bayes_cost(
            &probe,
            &CostFunction::HolevoSine,
            CostMode::Continuous,
            1e-10,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn holevo_class_discretization_invariance() {
        for n in [1u32, 5, 9, 16] {
            let probe = holland_burnett(1, n).unwrap();
            let c = bayes_cost(
                &probe,
                &CostFunction::HolevoSine,
                CostMode::Continuous,
                1e-11,
            )
            .unwrap();
            let d =
                bayes_cost(&probe, &CostFunction::HolevoSine, CostMode::Discrete, 1e-11).unwrap();
            assert!(
                (c.value - d.value).abs() < 1e-9,
                "N={n}: {} vs {}",
                c.value,
                d.value
            );
        }
    }

    #[test]
    fn surprise_discrete_is_refused() {
        let probe = holland_burnett(1, 3).unwrap();
        assert!(matches!(
            bayes_cost(&probe, &CostFunction::Surprise, CostMode::Discrete, 1e-8),
            Err(InfoError::SurpriseNotDiscrete)
        ));
    }

    #[test]
    fn surprise_continuous_is_negative_information() {
        let probe = holland_burnett(1, 5).unwrap();
        let s = bayes_cost(&probe, &CostFunction::Surprise, CostMode::Continuous, 1e-9).unwrap();
        let i = mutual_information(&probe, 1e-9).unwrap();
        assert!((s.value + i.value).abs() < 1e-7);
    }

    #[test]
    fn custom_cost_matches_builtin() {
        let probe = equatorial_product(1, 3).unwrap();
        let custom = CostFunction::Custom(Arc::new(|g: f64| {
            4.0 * (std::f64::consts::PI * g).sin().powi(2)
        }));
        let a = bayes_cost(
            &probe,
            &CostFunction::HolevoSine,
            CostMode::Continuous,
            1e-10,
        )
        .unwrap();
        let b = bayes_cost(&probe, &custom, CostMode::Continuous, 1e-10).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn holevo_sine_is_periodic_and_even() {
        let c = CostFunction::HolevoSine;
        for g in [0.03, 0.21, 0.48, 0.77] {
            assert!((c.eval(g, 1.0) - c.eval(-g, 1.0)).abs() < 1e-12);
            assert!((c.eval(g, 1.0) - c.eval(g + 1.0, 1.0)).abs() < 1e-12);
        }
    }
}
