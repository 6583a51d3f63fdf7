//! Acceptance suite: one test per numbered criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see the lines for passing
//! criteria too). Tolerances are pinned in code, not configurable.

use multiphase::bounds;
use multiphase::information::{self, CostFunction, CostMode, MiOptions};
use multiphase::probes::{equatorial_product, holland_burnett, ProbeState};
use multiphase::{channel, hilbert, optimizer};
use std::sync::Mutex;
use std::time::Instant;

/// Every mutual information computed in this suite flows through here, which
/// enforces the subspace-entropy bound `I <= log2 C(N+k, N) + 10 tol` at the
/// point of computation (criterion 14) and records the check.
static BOUND_CHECKS: Mutex<Vec<(usize, u32, f64, f64)>> = Mutex::new(Vec::new());

/// Criteria with runtime clauses need the whole machine to themselves, so
/// every test serializes on this lock (poisoning from an earlier failed
/// criterion is deliberately ignored).
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|p| p.into_inner())
}

fn checked_mi(probe: &ProbeState, tol: f64) -> f64 {
    checked_mi_opts(probe, tol, None)
}

fn checked_mi_opts(probe: &ProbeState, tol: f64, budget: Option<u64>) -> f64 {
    let r = information::mutual_information_opts(
        probe,
        &MiOptions {
            tol,
            budget,
            progress: None,
        },
    )
    .unwrap_or_else(|e| panic!("MI failed for k={} N={}: {e}", probe.k(), probe.n()));
    let bound = (hilbert::dimension(probe.k(), probe.n()).unwrap() as f64).log2();
    assert!(
        r.value <= bound + 10.0 * tol,
        "information bound violated: k={} N={} I={} > {bound} + 10 tol",
        probe.k(),
        probe.n(),
        r.value
    );
    BOUND_CHECKS
        .lock()
        .unwrap()
        .push((probe.k(), probe.n(), r.value, bound));
    r.value
}

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: FAIL - {detail}");
}

#[test]
fn criterion_01_analytic_mi_point() {
    let _serial = serial();
    let t0 = Instant::now();
    let got = checked_mi(&holland_burnett(1, 1).unwrap(), 1e-6);
    let expect = std::f64::consts::LOG2_E - 1.0;
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (got - expect).abs() < 1e-6 && elapsed < 1.0;
    verdict(
        1,
        pass,
        &format!("MI(uniform,k=1,N=1) = {got:.9} vs log2(e)-1 = {expect:.9} in {elapsed:.3}s"),
    );
}

#[test]
fn criterion_02_parallel_single_phase_asymptote() {
    let _serial = serial();
    let t0 = Instant::now();
    let n = 4096u32;
    let mi = checked_mi(&equatorial_product(1, n).unwrap(), 1e-4);
    let dev = mi - bounds::sql(n as u64).unwrap();
    let target = 0.60440;
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (dev - target).abs() < 0.02 && elapsed < 60.0;
    verdict(
        2,
        pass,
        &format!(
            "I(product,4096) - SQL = {dev:.5} vs {target} (|diff| = {:.2e}) in {elapsed:.1}s",
            (dev - target).abs()
        ),
    );
}

#[test]
fn criterion_03_sequential_single_phase_asymptote() {
    let _serial = serial();
    let t0 = Instant::now();
    let target = -1.21990;
    let mut deviations = Vec::new();
    for n in [128u32, 512, 2048] {
        let mi = checked_mi(&holland_burnett(1, n).unwrap(), 1e-6);
        deviations.push((mi - bounds::hb(n as u64) - target).abs());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let within = deviations[2] < 0.03;
    let monotone = deviations[0] > deviations[1] && deviations[1] > deviations[2];
    verdict(
        3,
        within && monotone && elapsed < 60.0,
        &format!(
            "|I(uniform,N) - HB(N) - ({target})| over N=128,512,2048: {:.5}, {:.5}, {:.5} in {elapsed:.1}s",
            deviations[0], deviations[1], deviations[2]
        ),
    );
}

#[test]
fn criterion_04_two_phase_sequential_constant() {
    let _serial = serial();
    let t0 = Instant::now();
    let n = 500u32;
    let mi = checked_mi_opts(&holland_burnett(2, n).unwrap(), 0.02, Some(1_000_000_000));
    let dev = mi - 2.0 * bounds::hb(n as u64);
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (dev - (-3.79)).abs() <= 0.05 && elapsed < 1800.0;
    verdict(
        4,
        pass,
        &format!("I(uniform,k=2,N=500) - 2 HB(500) = {dev:.4} vs -3.79 +- 0.05 in {elapsed:.0}s"),
    );
}

#[test]
fn criterion_05_two_phase_parallel_asymptote() {
    let _serial = serial();
    let t0 = Instant::now();
    let n = 1024u32;
    let mi = checked_mi(&equatorial_product(2, n).unwrap(), 1e-3);
    let dev = mi - 2.0 * bounds::sql(n as u64).unwrap();
    let target = 0.83137;
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (dev - target).abs() < 0.03;
    verdict(
        5,
        pass,
        &format!("I(product,k=2,N=1024) - 2 SQL = {dev:.5} vs {target} (|diff| = {:.2e}) in {elapsed:.0}s",
            (dev - target).abs()),
    );
}

#[test]
fn criterion_06_crossover_ordering() {
    let _serial = serial();
    // stated requirement: product strictly ahead through N = 9, uniform
    // strictly ahead from N = 10 on. The quadrature-level truth puts the
    // flip at N = 8; this criterion is implemented as stated and reports
    // the honest per-N orderings.
    let tol = 1e-7;
    let mut violations = Vec::new();
    for n in 2..=30u32 {
        let ip = checked_mi(&equatorial_product(1, n).unwrap(), tol);
        let ih = checked_mi(&holland_burnett(1, n).unwrap(), tol);
        let expected_product_ahead = n <= 9;
        let product_ahead = ip > ih;
        if product_ahead != expected_product_ahead {
            violations.push(format!("N={n}: I_product={ip:.7} I_uniform={ih:.7}"));
        }
    }
    verdict(
        6,
        violations.is_empty(),
        &if violations.is_empty() {
            "ordering product>uniform for N<=9 and reversed for 10..=30 as stated".to_string()
        } else {
            format!(
                "stated ordering violated at {} point(s): {} (measured crossover is N*=8)",
                violations.len(),
                violations.join("; ")
            )
        },
    );
}

#[test]
fn criterion_07_two_phase_advantage() {
    let _serial = serial();
    let tol = 1e-6;
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for n in (4..=20u32).step_by(2) {
        let half = n / 2;
        for family in ["product", "uniform"] {
            let (p2, p1) = match family {
                "product" => (
                    equatorial_product(2, n).unwrap(),
                    equatorial_product(1, half).unwrap(),
                ),
                _ => (
                    holland_burnett(2, n).unwrap(),
                    holland_burnett(1, half).unwrap(),
                ),
            };
            let i2 = checked_mi(&p2, tol);
            let i1 = checked_mi(&p1, tol);
            let gap = i2 - 2.0 * i1;
            worst = worst.min(gap);
            if gap <= 0.0 {
                pass = false;
            }
        }
    }
    verdict(
        7,
        pass,
        &format!("I2(N) - 2 I1(N/2) > 0 for even N in [4,20], both families; min gap {worst:.4}"),
    );
}

#[test]
fn criterion_08_bound_regimes() {
    let _serial = serial();
    let diag = bounds::hb_k(1000, 1000) / 1000.0;
    let diag_ok = (diag - 2.0).abs() < 0.01;

    let (adv2_total, _) = bounds::multiphase_advantage(2);
    let adv2_ok = adv2_total == 1.0;

    let (_, per) = bounds::multiphase_advantage(1_000_000);
    let log2e = std::f64::consts::LOG2_E;
    let per_ok = (per - log2e).abs() / log2e < 1e-5;

    verdict(
        8,
        diag_ok && adv2_ok && per_ok,
        &format!(
            "HB(N,N)/N at 1000 = {diag:.4}; advantage(2) = {adv2_total} bit; per-phase(1e6) = {per:.7} vs log2(e) rel diff {:.2e}",
            (per - log2e).abs() / log2e
        ),
    );
}

#[test]
fn criterion_09_parseval_normalization() {
    let _serial = serial();
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(90210);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let k = if trial % 2 == 0 { 1 } else { 2 };
        let n = rng.gen_range(0..=40u32);
        let dim = hilbert::dimension(k, n).unwrap() as usize;
        let reals: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let probe = ProbeState::from_real_normalized(k, n, &reals).unwrap();
        let phi: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let side = n as usize + 1;
        let mut total = 0.0;
        for flat in 0..side.pow(k as u32) {
            let m: Vec<u32> = (0..k)
                .map(|j| ((flat / side.pow(j as u32)) % side) as u32)
                .collect();
            total += channel::discrete_prob(&probe, &m, &phi).unwrap();
        }
        worst = worst.max((total - 1.0).abs());
    }
    verdict(
        9,
        worst < 1e-12,
        &format!("max |sum_m p(m|phi) - 1| over 100 random probes = {worst:.2e}"),
    );
}

#[test]
fn criterion_10_discretization_invariance() {
    let _serial = serial();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for k in [1usize, 2] {
        let tol = if k == 1 { 1e-6 } else { 1e-5 };
        for n in 0..=8u32 {
            for family in ["product", "uniform"] {
                let probe = match family {
                    "product" => equatorial_product(k, n).unwrap(),
                    _ => holland_burnett(k, n).unwrap(),
                };
                let cont = checked_mi(&probe, tol);
                let disc = information::mutual_information_discrete(&probe, tol)
                    .unwrap()
                    .value;
                let gap = (cont - disc).abs();
                worst = worst.max(gap);
                if gap > 2.0 * tol {
                    pass = false;
                }
            }
        }
    }
    verdict(
        10,
        pass,
        &format!("max |MI_continuous - MI_discrete| over k<=2, N<=8, both families = {worst:.2e}"),
    );
}

#[test]
fn criterion_11_holevo_cost_invariance() {
    let _serial = serial();
    let mut worst: f64 = 0.0;
    for n in 1..=16u32 {
        let probe = holland_burnett(1, n).unwrap();
        let c = information::bayes_cost(
            &probe,
            &CostFunction::HolevoSine,
            CostMode::Continuous,
            1e-11,
        )
        .unwrap()
        .value;
        let d =
            information::bayes_cost(&probe, &CostFunction::HolevoSine, CostMode::Discrete, 1e-11)
                .unwrap()
                .value;
        worst = worst.max((c - d).abs());
    }
    verdict(
        11,
        worst < 1e-9,
        &format!("max |continuous - discrete| holevo-sine cost over N in [1,16] = {worst:.2e}"),
    );
}

#[test]
fn criterion_12_closed_form_fidelity() {
    let _serial = serial();
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(1212);

    let mut worst_fejer: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let n = rng.gen_range(0..=12u32);
        let g: f64 = rng.gen_range(0.0..1.0);
        if ((std::f64::consts::PI * g).sin()).abs() < 1e-4 {
            continue; // singular set has its own direct-sum path
        }
        let probe = holland_burnett(1, n).unwrap();
        let direct = channel::density(&probe, &[g]);
        let closed = channel::fejer_density(n, g);
        worst_fejer = worst_fejer.max((closed - direct).abs() / direct.abs().max(1e-12));
        count += 1;
    }

    let mut worst_double: f64 = 0.0;
    count = 0;
    while count < 1000 {
        let n = rng.gen_range(0..=12u32);
        let a: f64 = rng.gen_range(0.0..1.0);
        let b: f64 = rng.gen_range(0.0..1.0);
        let s = |x: f64| (std::f64::consts::PI * x).sin().abs();
        if s(a).min(s(b)).min(s(a - b)) < 1e-4 {
            continue;
        }
        let probe = holland_burnett(2, n).unwrap();
        let direct = channel::density(&probe, &[a, b]);
        let closed = channel::double_hb_density(n, a, b);
        worst_double = worst_double.max((closed - direct).abs() / direct.abs().max(1e-12));
        count += 1;
    }

    verdict(
        12,
        worst_fejer < 1e-9 && worst_double < 1e-9,
        &format!(
            "max relative closed-vs-direct error over 1000 points each: fejer {worst_fejer:.2e}, two-phase {worst_double:.2e}"
        ),
    );
}

#[test]
fn criterion_13_entanglement() {
    let _serial = serial();
    let mut worst_product: f64 = 0.0;
    for (k, ns) in [(1usize, vec![1u32, 2, 3, 5, 8, 12]), (2, vec![1, 2, 4, 6])] {
        for n in ns {
            let r = multiphase::geometric_entanglement(&equatorial_product(k, n).unwrap(), 1e-12)
                .unwrap();
            worst_product = worst_product.max(r.eg);
        }
    }

    let n = 200u32;
    let r = multiphase::geometric_entanglement(&holland_burnett(1, n).unwrap(), 1e-13).unwrap();
    let asym = (2.0 * std::f64::consts::PI * n as f64).sqrt() / (n as f64 + 1.0);
    let ratio = (1.0 - r.eg) / asym;

    verdict(
        13,
        worst_product < 1e-10 && (0.98..=1.02).contains(&ratio),
        &format!(
            "max E_G over product probes = {worst_product:.2e}; uniform qubit fidelity ratio at N=200 = {ratio:.4}"
        ),
    );
}

#[test]
fn criterion_14_holevo_information_bound() {
    let _serial = serial();
    // the bound is enforced inline at every checked_mi call site; here a
    // fresh sweep re-verifies it explicitly and reports the collector size
    let tol = 1e-6;
    let mut worst_slack = f64::INFINITY;
    for (k, n) in [(1usize, 1u32), (1, 8), (1, 30), (2, 4), (2, 12)] {
        for family in ["product", "uniform"] {
            let probe = match family {
                "product" => equatorial_product(k, n).unwrap(),
                _ => holland_burnett(k, n).unwrap(),
            };
            let mi = checked_mi(&probe, tol);
            let bound = (hilbert::dimension(k, n).unwrap() as f64).log2();
            worst_slack = worst_slack.min(bound + 10.0 * tol - mi);
        }
    }
    let seen = BOUND_CHECKS.lock().unwrap().len();
    verdict(
        14,
        worst_slack >= 0.0,
        &format!(
            "I <= log2 C(N+k,N) + 10 tol held at every call site ({seen} checks recorded); min slack {worst_slack:.4} bits"
        ),
    );
}

#[test]
fn optimizer_floor_sanity() {
    let _serial = serial();
    // not a numbered criterion: the optimizer must never fall below its
    // seeded starts (guards the acceptance claim that probe optimization is
    // exercised end to end)
    let run = optimizer::optimize_probe(1, 4, 1e-5, 3, 1).unwrap();
    let floor = checked_mi(&equatorial_product(1, 4).unwrap(), 1e-5)
        .max(checked_mi(&holland_burnett(1, 4).unwrap(), 1e-5));
    assert!(run.best_mi >= floor - 2e-5);
}
