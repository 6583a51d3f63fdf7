//! Probe states on the non-degenerate subspace and their multipartite
//! entanglement content (geometric measure).

use crate::hilbert::{self, BasisCatalog, HilbertError};
use crate::nm;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("amplitude vector has length {got}, expected dimension {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("amplitude vector is not normalized: |c|^2 = {norm}")]
    NotNormalized { norm: f64 },
    #[error("operation requires real non-negative amplitudes (product-state phases cannot be assumed zero otherwise)")]
    UnsupportedAmplitudes,
    #[error("unsupported phase count k={0} for this operation")]
    UnsupportedK(usize),
}

/// A pure probe state: `k` phases, `N` resources and a normalized amplitude
/// vector aligned with the catalog order of [`hilbert::enumerate_basis`].
#[derive(Debug, Clone)]
pub struct ProbeState {
    k: usize,
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl ProbeState {
    /// Wrap an amplitude vector, checking length and normalization (1e-12).
    pub fn new(k: usize, n: u32, amplitudes: Vec<Complex64>) -> Result<Self, ProbeError> {
        let dim = hilbert::dimension(k, n)? as usize;
        if amplitudes.len() != dim {
            return Err(ProbeError::WrongLength {
                got: amplitudes.len(),
                expected: dim,
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ProbeError::NotNormalized { norm });
        }
        Ok(Self { k, n, amplitudes })
    }

    /// Build from real amplitudes, normalizing the vector first.
    pub fn from_real_normalized(k: usize, n: u32, reals: &[f64]) -> Result<Self, ProbeError> {
        let norm: f64 = reals.iter().map(|r| r * r).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(ProbeError::NotNormalized { norm: 0.0 });
        }
        let amplitudes = reals
            .iter()
            .map(|&r| Complex64::new(r / norm, 0.0))
            .collect();
        Self::new(k, n, amplitudes)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn catalog(&self) -> BasisCatalog {
        hilbert::enumerate_basis(self.k, self.n).expect("catalog existed at construction")
    }

    /// True when every amplitude equals 1/sqrt(dim) (the uniform probe).
    pub fn is_uniform(&self) -> bool {
        let target = 1.0 / (self.amplitudes.len() as f64).sqrt();
        self.amplitudes
            .iter()
            .all(|c| c.im == 0.0 && (c.re - target).abs() < 1e-14)
    }

    /// True when every amplitude is real and non-negative (up to 1e-12).
    pub fn is_real_nonnegative(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|c| c.im.abs() <= 1e-12 && c.re >= -1e-12)
    }
}

/// `N` copies of the balanced (k+1)-level equatorial state, expanded on the
/// non-degenerate basis: `c = sqrt(multinomial / (k+1)^N)`.
pub fn equatorial_product(k: usize, n: u32) -> Result<ProbeState, ProbeError> {
    let catalog = hilbert::enumerate_basis(k, n)?;
    let ln_base = (k as f64 + 1.0).ln();
    let amplitudes: Vec<Complex64> = catalog
        .iter()
        .map(|idx| {
            let n0 = n - idx.iter().sum::<u32>();
            let lm = hilbert::log_multiplicity_parts(n, n0, idx);
            Complex64::new((0.5 * (lm - n as f64 * ln_base)).exp(), 0.0)
        })
        .collect();
    // normalized exactly by the multinomial sum identity; renormalize away
    // the tiny floating residue so ProbeState::new never trips
    renormalized(k, n, amplitudes)
}

/// Uniform superposition over the whole basis (the locally optimal probe).
pub fn holland_burnett(k: usize, n: u32) -> Result<ProbeState, ProbeError> {
    let dim = hilbert::dimension(k, n)? as usize;
    let a = 1.0 / (dim as f64).sqrt();
    ProbeState::new(k, n, vec![Complex64::new(a, 0.0); dim])
}

fn renormalized(k: usize, n: u32, mut amps: Vec<Complex64>) -> Result<ProbeState, ProbeError> {
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amps {
        *c /= norm;
    }
    ProbeState::new(k, n, amps)
}

/// Result of the geometric-measure maximization.
#[derive(Debug, Clone)]
pub struct EntanglementResult {
    /// Geometric measure, `1 - max_p F(p)`, in `[0, 1)`.
    pub eg: f64,
    /// The maximizing probability vector over the k+1 levels (sums to 1).
    pub argmax_probs: Vec<f64>,
    /// Number of overlap evaluations spent.
    pub evaluations: u64,
}

/// Geometric measure of entanglement of a real non-negative probe.
///
/// Maximizes the squared overlap with symmetric product states
/// `F(p) = |sum_idx c_idx sqrt(mult(N, idx)) prod_j p_j^(n_j/2)|^2`
/// over probability vectors `p` on the (k+1)-simplex (the `n0` exponent is
/// included). Dense grid seeding (65 points per free dimension) followed by a
/// derivative-free polish down to `tol` on `F`.
pub fn geometric_entanglement(
    probe: &ProbeState,
    tol: f64,
) -> Result<EntanglementResult, ProbeError> {
    if !probe.is_real_nonnegative() {
        return Err(ProbeError::UnsupportedAmplitudes);
    }
    let k = probe.k();
    if k > 2 {
        return Err(ProbeError::UnsupportedK(k));
    }
    let n = probe.n();
    let catalog = probe.catalog();

    // per-entry c * sqrt(mult) and exponent table (n0 first, then n1..nk)
    let dim = probe.dimension();
    let mut weights = Vec::with_capacity(dim);
    let mut exps: Vec<Vec<u32>> = Vec::with_capacity(dim);
    for (idx, c) in catalog.iter().zip(probe.amplitudes()) {
        let n0 = n - idx.iter().sum::<u32>();
        let lm = hilbert::log_multiplicity_parts(n, n0, idx);
        weights.push(c.re * (0.5 * lm).exp());
        let mut e = Vec::with_capacity(k + 1);
        e.push(n0);
        e.extend_from_slice(idx);
        exps.push(e);
    }

    let evals = std::cell::Cell::new(0u64);
    let overlap_sq = |probs: &[f64]| -> f64 {
        evals.set(evals.get() + 1);
        let mut acc = 0.0;
        'entry: for (w, e) in weights.iter().zip(&exps) {
            let mut ln_term = 0.0;
            for (&p, &nj) in probs.iter().zip(e) {
                if nj == 0 {
                    continue;
                }
                if p <= 0.0 {
                    continue 'entry; // term vanishes
                }
                ln_term += 0.5 * nj as f64 * p.ln();
            }
            acc += w * ln_term.exp();
        }
        acc * acc
    };

    const GRID: usize = 64;
    let (best_probs, best_f) = match k {
        1 => {
            let f1 = |p: f64| overlap_sq(&[p, 1.0 - p]);
            let mut best = (0.5, f1(0.5));
            for i in 0..=GRID {
                let p = i as f64 / GRID as f64;
                let v = f1(p);
                if v > best.1 {
                    best = (p, v);
                }
            }
            // golden-section polish on [best - h, best + h]
            let h = 1.0 / GRID as f64;
            let (p, fval) = golden_max(&f1, (best.0 - h).max(0.0), (best.0 + h).min(1.0), tol);
            let p = if fval >= best.1 { p } else { best.0 };
            let fv = fval.max(best.1);
            (vec![p, 1.0 - p], fv)
        }
        2 => {
            let f2 = |x: &[f64]| {
                let (p, q) = (x[0], x[1]);
                let r = 1.0 - p - q;
                if p < 0.0 || q < 0.0 || r < 0.0 {
                    return 0.0;
                }
                overlap_sq(&[p, q, r])
            };
            let mut best = (vec![1.0 / 3.0, 1.0 / 3.0], f2(&[1.0 / 3.0, 1.0 / 3.0]));
            for i in 0..=GRID {
                for j in 0..=(GRID - i) {
                    let p = i as f64 / GRID as f64;
                    let q = j as f64 / GRID as f64;
                    let v = f2(&[p, q]);
                    if v > best.1 {
                        best = (vec![p, q], v);
                    }
                }
            }
            let out = nm::nelder_mead(|x| -f2(x), &best.0, 0.5 / GRID as f64, tol, 4000);
            let (x, fv) = if -out.fx >= best.1 {
                (out.x, -out.fx)
            } else {
                best
            };
            (vec![x[0], x[1], 1.0 - x[0] - x[1]], fv)
        }
        _ => unreachable!(),
    };

    let mut probs = best_probs;
    for p in &mut probs {
        *p = p.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }

    Ok(EntanglementResult {
        eg: (1.0 - best_f).max(0.0),
        argmax_probs: probs,
        evaluations: evals.get(),
    })
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (fc - fd).abs() <= tol && (b - a) < 1e-10 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Closed-form large-N asymptotics of the geometric measure of the uniform
/// probe: `1 - sqrt(2 pi N)/(N+1)` for k=1 and `1 - 8 pi N/(3 sqrt(3) M)`
/// with `M = C(N+2, 2)` for k=2. May fall below 0 at small N, where the
/// asymptotic regime does not apply; callers flag that in their output.
pub fn eg_asymptotic(k: usize, n: u32) -> Result<f64, ProbeError> {
    assert!(n >= 1, "eg_asymptotic requires N >= 1");
    match k {
        1 => {
            let nf = n as f64;
            Ok(1.0 - (2.0 * std::f64::consts::PI * nf).sqrt() / (nf + 1.0))
        }
        2 => {
            let nf = n as f64;
            let m = hilbert::dimension(2, n)? as f64;
            Ok(1.0 - 8.0 * std::f64::consts::PI * nf / (3.0 * 3f64.sqrt() * m))
        }
        other => Err(ProbeError::UnsupportedK(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn equatorial_qubit_amplitudes() {
        let p = equatorial_product(1, 2).unwrap();
        let expect = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (c, e) in p.amplitudes().iter().zip(expect) {
            assert!((c.re - e).abs() < 1e-14 && c.im == 0.0);
        }
    }

    #[test]
    fn equatorial_empty_product() {
        let p = equatorial_product(1, 0).unwrap();
        assert_eq!(p.dimension(), 1);
        assert!((p.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equatorial_qutrit_matches_tensor_expansion() {
        // expand ((|0>+|1>+|2>)/sqrt(3))^{x2} over all 9 product terms by hand:
        // amplitude on (n1, n2) is sqrt(mult)/3
        let p = equatorial_product(2, 2).unwrap();
        let catalog = p.catalog();
        let mut norm = 0.0;
        for (idx, c) in catalog.iter().zip(p.amplitudes()) {
            let n0 = 2 - idx.iter().sum::<u32>();
            let mult: f64 = match (n0, idx[0], idx[1]) {
                (2, 0, 0) | (0, 2, 0) | (0, 0, 2) => 1.0,
                _ => 2.0,
            };
            assert!((c.re - mult.sqrt() / 3.0).abs() < 1e-14);
            norm += c.norm_sqr();
        }
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn holland_burnett_uniform() {
        let p = holland_burnett(1, 7).unwrap();
        for c in p.amplitudes() {
            assert!((c.re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
        let p = holland_burnett(2, 4).unwrap();
        assert_eq!(p.dimension(), 15);
        for c in p.amplitudes() {
            assert!((c.re - 1.0 / 15f64.sqrt()).abs() < 1e-15);
        }
        // N = 0 coincides with the empty product
        let hb0 = holland_burnett(1, 0).unwrap();
        let eq0 = equatorial_product(1, 0).unwrap();
        assert_eq!(hb0.amplitudes(), eq0.amplitudes());
        assert!(p.is_uniform());
    }

    #[test]
    fn probe_validation() {
        assert!(matches!(
            ProbeState::new(1, 2, vec![Complex64::new(1.0, 0.0); 2]),
            Err(ProbeError::WrongLength {
                got: 2,
                expected: 3
            })
        ));
        assert!(matches!(
            ProbeState::new(1, 1, vec![Complex64::new(1.0, 0.0); 2]),
            Err(ProbeError::NotNormalized { .. })
        ));
    }

    #[test]
    fn entanglement_of_single_qubit_is_zero() {
        let r = geometric_entanglement(&holland_burnett(1, 1).unwrap(), 1e-12).unwrap();
        assert!(r.eg.abs() < 1e-12, "eg = {}", r.eg);
    }

    #[test]
    fn entanglement_hb_n2_matches_golden_oracle() {
        // F(p) = (1 + sqrt(2 p q))^2 / 3 maximized by golden section
        let f = |p: f64| {
            let q = 1.0 - p;
            (1.0 + (2.0 * p * q).sqrt()).powi(2) / 3.0
        };
        let (p_star, f_star) = super::golden_max(&f, 0.0, 1.0, 1e-15);
        let r = geometric_entanglement(&holland_burnett(1, 2).unwrap(), 1e-13).unwrap();
        assert!((r.eg - (1.0 - f_star)).abs() < 1e-9);
        assert!((r.eg - 0.0286).abs() < 2e-4);
        assert!((r.argmax_probs[0] - p_star).abs() < 1e-5);
        assert!((r.argmax_probs[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn entanglement_of_products_is_zero() {
        for k in 1..=2usize {
            for n in [1u32, 3, 5, 8, 12] {
                if k == 2 && n > 8 {
                    continue;
                }
                let r = geometric_entanglement(&equatorial_product(k, n).unwrap(), 1e-12).unwrap();
                assert!(r.eg <= 1e-10, "k={k} N={n}: eg = {}", r.eg);
            }
        }
    }

    #[test]
    fn qutrit_argmax_is_balanced() {
        let r = geometric_entanglement(&holland_burnett(2, 8).unwrap(), 1e-13).unwrap();
        for p in &r.argmax_probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-4, "{:?}", r.argmax_probs);
        }
    }

    #[test]
    fn qubit_ratio_tracks_asymptote() {
        for n in (50..=200).step_by(30) {
            let r = geometric_entanglement(&holland_burnett(1, n).unwrap(), 1e-13).unwrap();
            let asym = (2.0 * PI * n as f64).sqrt() / (n as f64 + 1.0);
            let ratio = (1.0 - r.eg) / asym;
            assert!((0.98..=1.02).contains(&ratio), "N={n}: ratio {ratio}");
        }
    }

    #[test]
    fn complex_probe_is_rejected() {
        let mut amps = holland_burnett(1, 3).unwrap().amplitudes().to_vec();
        amps[1] *= Complex64::new(0.0, 1.0);
        let p = ProbeState::new(1, 3, amps).unwrap();
        assert!(matches!(
            geometric_entanglement(&p, 1e-10),
            Err(ProbeError::UnsupportedAmplitudes)
        ));
    }

    #[test]
    fn asymptotic_values() {
        let e = eg_asymptotic(1, 200).unwrap();
        assert!((e - (1.0 - (400.0 * PI).sqrt() / 201.0)).abs() < 1e-15);
        let e = eg_asymptotic(2, 200).unwrap();
        let m = 20301.0; // C(202, 2)
        assert!((e - (1.0 - 1600.0 * PI / (3.0 * 3f64.sqrt() * m))).abs() < 1e-15);
        // out-of-regime at N=1: negative value is returned as-is
        assert!(eg_asymptotic(1, 1).unwrap() < 0.0);
        assert!(matches!(
            eg_asymptotic(3, 10),
            Err(ProbeError::UnsupportedK(3))
        ));
    }

    proptest! {
        #[test]
        fn eg_invariant_under_level_swap(raw in prop::collection::vec(0.01f64..1.0, 5)) {
            // reversing the qubit amplitude vector permutes the two levels
            let probe = ProbeState::from_real_normalized(1, 4, &raw).unwrap();
            let mut rev = raw.clone();
            rev.reverse();
            let probe_rev = ProbeState::from_real_normalized(1, 4, &rev).unwrap();
            let a = geometric_entanglement(&probe, 1e-11).unwrap();
            let b = geometric_entanglement(&probe_rev, 1e-11).unwrap();
            prop_assert!((a.eg - b.eg).abs() < 1e-8);
        }

        #[test]
        fn argmax_is_a_probability_vector(n in 1u32..10) {
            let r = geometric_entanglement(&holland_burnett(1, n).unwrap(), 1e-12).unwrap();
            let total: f64 = r.argmax_probs.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(r.argmax_probs.iter().all(|&p| p >= 0.0));
            prop_assert!(r.eg >= 0.0 && r.eg < 1.0);
        }
    }
}
