//! Conditional densities induced by the covariant phase measurement.
//!
//! Units convention: every phase and estimator in this crate is measured in
//! TURNS, so offsets live on [0, 1)^k and the encoding kernel is
//! `e^{2 pi i n . gamma}`. Densities are normalized against the turns
//! measure, `int_{[0,1)^k} g = 1`.

use crate::probes::ProbeState;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("estimator index {m:?} out of range for N={n}")]
    IndexOutOfRange { m: Vec<u32>, n: u32 },
    #[error("estimator index has {got} entries, expected k={expected}")]
    WrongArity { got: usize, expected: usize },
    #[error("gaussian approximant is defined for k in {{1,2}}, got k={0}")]
    UnsupportedK(usize),
}

/// Evaluation strategy for a probe's conditional density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Literal amplitude sum in catalog order; works for every probe.
    DirectSum,
    /// Fejer-kernel closed form; only for the uniform probe at k=1.
    ClosedFormFejer,
    /// Two-phase closed form; only for the uniform probe at k=2.
    ClosedFormDouble,
}

/// A probe bundled with the cheapest correct way to evaluate its density
/// `g(gamma) = |sum_idx c_idx e^{2 pi i idx . gamma}|^2`.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    probe: ProbeState,
    mode: EvalMode,
}

impl ReducedDensity {
    /// Pick the closed form automatically when the probe is uniform.
    pub fn new(probe: ProbeState) -> Self {
        let mode = if probe.is_uniform() {
            match probe.k() {
                1 => EvalMode::ClosedFormFejer,
                2 => EvalMode::ClosedFormDouble,
                _ => EvalMode::DirectSum,
            }
        } else {
            EvalMode::DirectSum
        };
        Self { probe, mode }
    }

    pub fn with_mode(probe: ProbeState, mode: EvalMode) -> Self {
        Self { probe, mode }
    }

    pub fn probe(&self) -> &ProbeState {
        &self.probe
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// Evaluate `g(gamma)`; `gamma` is reduced mod 1 internally.
    pub fn eval(&self, gamma: &[f64]) -> f64 {
        debug_assert_eq!(gamma.len(), self.probe.k());
        match self.mode {
            EvalMode::DirectSum => density(&self.probe, gamma),
            EvalMode::ClosedFormFejer => fejer_density(self.probe.n(), gamma[0]),
            EvalMode::ClosedFormDouble => double_hb_density(self.probe.n(), gamma[0], gamma[1]),
        }
    }
}

/// `g(gamma) = |sum c_idx e^{2 pi i idx . gamma}|^2` by direct summation in
/// catalog order.
pub fn density(probe: &ProbeState, gamma: &[f64]) -> f64 {
    assert_eq!(gamma.len(), probe.k(), "gamma arity must match k");
    let n = probe.n();
    let amps = probe.amplitudes();
    match probe.k() {
        1 => {
            let z = phasor(gamma[0]);
            let mut w = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in amps {
                acc += c * w;
                w *= z;
            }
            acc.norm_sqr()
        }
        2 => {
            let z1 = phasor(gamma[0]);
            let z2 = phasor(gamma[1]);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut w1 = Complex64::new(1.0, 0.0);
            let mut pos = 0usize;
            for n1 in 0..=n {
                let row_len = (n - n1 + 1) as usize;
                let mut w = w1;
                for c in &amps[pos..pos + row_len] {
                    acc += c * w;
                    w *= z2;
                }
                pos += row_len;
                w1 *= z1;
            }
            acc.norm_sqr()
        }
        _ => {
            let catalog = probe.catalog();
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, c) in catalog.iter().zip(amps) {
                let phase: f64 = idx.iter().zip(gamma).map(|(&nj, &gj)| nj as f64 * gj).sum();
                acc += c * phasor(phase);
            }
            acc.norm_sqr()
        }
    }
}

fn phasor(turns: f64) -> Complex64 {
    let ang = 2.0 * PI * turns.rem_euclid(1.0);
    Complex64::new(ang.cos(), ang.sin())
}

/// Density of the uniform single-phase probe:
/// `sin^2((N+1) pi gamma) / ((N+1) sin^2(pi gamma))`, with the removable
/// singularity at integer gamma giving `N+1`. Near the singular set the
/// direct sum takes over.
pub fn fejer_density(n: u32, gamma: f64) -> f64 {
    let s = (PI * gamma).sin();
    if s.abs() < 1e-8 {
        // direct-sum path for the uniform probe
        let z = phasor(gamma);
        let mut w = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..=n {
            acc += w;
            w *= z;
        }
        return acc.norm_sqr() / (n as f64 + 1.0);
    }
    let t = ((n as f64 + 1.0) * PI * gamma).sin();
    t * t / ((n as f64 + 1.0) * s * s)
}

/// Dirichlet-style kernel `sin((N+1) pi x)/sin(pi x)` with the limit value at
/// integer x.
fn dirichlet_ratio(n: u32, x: f64) -> f64 {
    let s = (PI * x).sin();
    if s.abs() < 1e-9 {
        let j = x.round() as i64;
        let sign = if (n as i64 * j) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * (n as f64 + 1.0);
    }
    ((n as f64 + 1.0) * PI * x).sin() / s
}

/// Density of the uniform two-phase probe, closed form.
///
/// With `K_x = sin((N+1) pi x)/sin(pi x)` and all angles in turns:
///
/// `g = [ (K_{a-b} - K_a)^2 + 4 K_{a-b} K_a sin^2((N+2) pi b / 2) ]
///      / (4 sin^2(pi b) M)`,  `M = (N+1)(N+2)/2`.
///
/// The form is written as a sum of two like-signed terms so it stays accurate
/// near the singular lines; by the a<->b symmetry of the density the variable
/// with the larger |sin| is moved into the outer denominator. Whenever any of
/// |sin(pi a)|, |sin(pi b)|, |sin(pi(a-b))| drops below 1e-6 the direct
/// double sum takes over.
pub fn double_hb_density(n: u32, dphi: f64, dtheta: f64) -> f64 {
    let m = ((n as f64 + 1.0) * (n as f64 + 2.0)) / 2.0;
    let sa = (PI * dphi).sin();
    let sb = (PI * dtheta).sin();
    let sab = (PI * (dphi - dtheta)).sin();
    if sa.abs().min(sb.abs()).min(sab.abs()) < 1e-6 {
        return double_hb_direct(n, dphi, dtheta) / m;
    }
    let (a, b) = if sb.abs() >= sa.abs() {
        (dphi, dtheta)
    } else {
        (dtheta, dphi)
    };
    let k_ab = dirichlet_ratio(n, a - b);
    let k_a = dirichlet_ratio(n, a);
    let shalf = ((n as f64 + 2.0) * PI * b / 2.0).sin();
    let num = (k_ab - k_a) * (k_ab - k_a) + 4.0 * k_ab * k_a * shalf * shalf;
    let den = 4.0 * (PI * b).sin().powi(2);
    (num / den / m).max(0.0)
}

/// |sum over the simplex of e^{2 pi i (n1 a + n2 b)}|^2, the ground truth for
/// the two-phase closed form.
fn double_hb_direct(n: u32, a: f64, b: f64) -> f64 {
    let z1 = phasor(a);
    let z2 = phasor(b);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w1 = Complex64::new(1.0, 0.0);
    for n1 in 0..=n {
        let mut w = w1;
        for _ in 0..=(n - n1) {
            acc += w;
            w *= z2;
        }
        w1 *= z1;
    }
    acc.norm_sqr()
}

/// Discrete outcome probability under the estimator grid `m/(N+1)`:
/// `p(m | phi) = g(m/(N+1) - phi) / (N+1)^k`.
pub fn discrete_prob(probe: &ProbeState, m: &[u32], phi: &[f64]) -> Result<f64, ChannelError> {
    let k = probe.k();
    if m.len() != k {
        return Err(ChannelError::WrongArity {
            got: m.len(),
            expected: k,
        });
    }
    if phi.len() != k {
        return Err(ChannelError::WrongArity {
            got: phi.len(),
            expected: k,
        });
    }
    let n = probe.n();
    if m.iter().any(|&mj| mj > n) {
        return Err(ChannelError::IndexOutOfRange { m: m.to_vec(), n });
    }
    let step = 1.0 / (n as f64 + 1.0);
    let gamma: Vec<f64> = m
        .iter()
        .zip(phi)
        .map(|(&mj, &pj)| mj as f64 * step - pj)
        .collect();
    let dens = ReducedDensity::new(probe.clone()).eval(&gamma);
    Ok(dens / (n as f64 + 1.0).powi(k as i32))
}

/// Gaussian approximant to the equatorial-product discrete density at offset
/// `delta = phi - m/(N+1)` (turns, reduced to the principal period).
pub fn gaussian_approx(k: usize, n: u32, delta: &[f64]) -> Result<f64, ChannelError> {
    assert!(n >= 1, "gaussian approximant requires N >= 1");
    let nf = n as f64;
    let principal = |d: f64| {
        let r = d.rem_euclid(1.0);
        if r > 0.5 {
            r - 1.0
        } else {
            r
        }
    };
    match k {
        1 => {
            if delta.len() != 1 {
                return Err(ChannelError::WrongArity {
                    got: delta.len(),
                    expected: 1,
                });
            }
            let d = principal(delta[0]);
            Ok((2.0 * PI * nf).sqrt() / (nf + 1.0) * (-2.0 * nf * PI * PI * d * d).exp())
        }
        2 => {
            if delta.len() != 2 {
                return Err(ChannelError::WrongArity {
                    got: delta.len(),
                    expected: 2,
                });
            }
            let d1 = principal(delta[0]);
            let d2 = principal(delta[1]);
            let quad = d1 * d1 + d2 * d2 - d1 * d2;
            let pref = (8.0 * 3f64.sqrt() / 9.0) * PI * nf / ((nf + 1.0) * (nf + 1.0));
            Ok(pref * (-16.0 / 9.0 * nf * PI * PI * quad).exp())
        }
        other => Err(ChannelError::UnsupportedK(other)),
    }
}
