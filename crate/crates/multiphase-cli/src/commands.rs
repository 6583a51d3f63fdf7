//! Subcommand execution and exit-code policy.

use crate::output::{fmt, Sink};
use crate::{Command, CostKind, CostModeArg, Format, ProbeFamily, Range};
use anyhow::{anyhow, Context, Result};
use multiphase::information::{CostFunction, CostMode, InfoError, MiOptions};
use multiphase::probes::ProbeState;
use multiphase::quadrature::QuadratureError;
use multiphase::{bounds, information, optimizer, probes};
use serde::Serialize;
use std::collections::HashMap;

/// Configuration problems exit with code 2.
#[derive(Debug)]
pub struct ValidationError(String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}
impl std::error::Error for ValidationError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(ValidationError(msg.into()))
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ValidationError>().is_some() {
            return 2;
        }
        if matches!(
            cause.downcast_ref::<QuadratureError>(),
            Some(QuadratureError::BudgetExhausted { .. })
        ) {
            return 3;
        }
        if matches!(
            cause.downcast_ref::<InfoError>(),
            Some(InfoError::Quadrature(
                QuadratureError::BudgetExhausted { .. }
            ))
        ) {
            return 3;
        }
    }
    1
}

fn check_k(k: usize) -> Result<()> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(invalid(format!("k must be 1 or 2, got {k}")))
    }
}

fn make_probe(family: ProbeFamily, k: usize, n: u32) -> Result<ProbeState> {
    match family {
        ProbeFamily::Product => Ok(probes::equatorial_product(k, n)?),
        ProbeFamily::Hb => Ok(probes::holland_burnett(k, n)?),
        ProbeFamily::Both => Err(invalid("this command needs a single probe family")),
    }
}

fn family_rows(family: ProbeFamily) -> Vec<(&'static str, ProbeFamily)> {
    match family {
        ProbeFamily::Product => vec![("product", ProbeFamily::Product)],
        ProbeFamily::Hb => vec![("hb", ProbeFamily::Hb)],
        ProbeFamily::Both => vec![("product", ProbeFamily::Product), ("hb", ProbeFamily::Hb)],
    }
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::ScanMi {
            k,
            n_range,
            step,
            probe,
            tol,
            budget,
            output,
        } => scan_mi(k, n_range, step, probe, tol, budget, &output.out),
        Command::Bounds {
            k,
            diagonal,
            k_range,
            n,
            n_range,
            step,
            output,
        } => bounds_cmd(k, diagonal, k_range, n, n_range, step, &output.out),
        Command::Crossover {
            k,
            n_max,
            tol,
            output,
        } => crossover_cmd(k, n_max, tol, &output.out),
        Command::Entanglement {
            k,
            n_range,
            step,
            tol,
            output,
        } => entanglement_cmd(k, n_range, step, tol, &output.out),
        Command::Optimize {
            k,
            n,
            tol,
            starts,
            seed,
            format,
            output,
        } => optimize_cmd(k, n, tol, starts, seed, format, &output.out),
        Command::Density {
            probe,
            k,
            n,
            points,
            offset,
            radians,
            output,
        } => density_cmd(probe, k, n, points, offset, radians, &output.out),
        Command::Cost {
            probe,
            n_range,
            step,
            cost,
            mode,
            tol,
            output,
        } => cost_cmd(probe, n_range, step, cost, mode, tol, &output.out),
    }
}

fn mi_with_progress(
    probe: &ProbeState,
    tol: f64,
    budget: Option<u64>,
) -> Result<multiphase::QuadratureResult> {
    let long_run = probe.k() == 2 && probe.n() >= 64;
    let progress = |frac: f64| {
        eprintln!("progress: {:>3.0}%", frac * 100.0);
    };
    let opts = MiOptions {
        tol,
        budget,
        progress: if long_run { Some(&progress) } else { None },
    };
    information::mutual_information_opts(probe, &opts)
        .with_context(|| format!("mutual information for k={} N={}", probe.k(), probe.n()))
}

fn scan_mi(
    k: usize,
    n_range: Range,
    step: u32,
    probe: ProbeFamily,
    tol: f64,
    budget: Option<u64>,
    out: &str,
) -> Result<()> {
    check_k(k)?;
    if tol <= 0.0 {
        return Err(invalid("tol must be positive"));
    }
    let mut sink = Sink::create(out)?;
    let base = "N,probe,k,mi_bits,err_est,evals,sql_bits,hb_bits";
    if k == 2 {
        sink.line(&format!("{base},two_i1_half_bits"))?;
    } else {
        sink.line(base)?;
    }

    let mut half_cache: HashMap<(&'static str, u32), f64> = HashMap::new();
    for n in n_range.iter(step) {
        for (label, fam) in family_rows(probe) {
            let p = make_probe(fam, k, n)?;
            let r = mi_with_progress(&p, tol, budget)?;
            let sql_cell = if n >= 1 {
                fmt(k as f64 * bounds::sql(n as u64).unwrap())
            } else {
                String::new()
            };
            let hb_cell = fmt(k as f64 * bounds::hb(n as u64));
            let mut row = format!(
                "{n},{label},{k},{},{},{},{sql_cell},{hb_cell}",
                fmt(r.value),
                fmt(r.abs_error_estimate),
                r.evaluations
            );
            if k == 2 {
                let cell = if n % 2 == 0 && n >= 2 {
                    let half = n / 2;
                    let i1 = match half_cache.get(&(label, half)) {
                        Some(&v) => v,
                        None => {
                            let p1 = make_probe(fam, 1, half)?;
                            let v = mi_with_progress(&p1, tol, budget)?.value;
                            half_cache.insert((label, half), v);
                            v
                        }
                    };
                    fmt(2.0 * i1)
                } else {
                    String::new()
                };
                row.push(',');
                row.push_str(&cell);
            }
            sink.line(&row)?;
            eprintln!("scan-mi: N={n} {label} done");
        }
    }
    sink.finish()
}

fn bounds_cmd(
    k: Option<u64>,
    diagonal: bool,
    k_range: Option<Range>,
    n: Option<u64>,
    n_range: Option<Range>,
    step: u32,
    out: &str,
) -> Result<()> {
    let mut sink = Sink::create(out)?;
    sink.line("k,N,hb_bits,hb_per_phase,regime,asymptote")?;
    let mut emit = |kk: u64, nn: u64| -> Result<()> {
        let r = bounds::report(kk, nn).map_err(|e| invalid(e.to_string()))?;
        sink.line(&format!(
            "{kk},{nn},{},{},{},{}",
            fmt(r.hb),
            fmt(r.hb_per_phase),
            r.regime.tag(),
            fmt(r.regime_asymptote)
        ))
    };
    match (k, diagonal, k_range, n, n_range) {
        (Some(kk), false, None, None, Some(range)) => {
            if range.lo < 1 {
                return Err(invalid("bounds sweeps need N >= 1"));
            }
            for nn in range.iter(step) {
                emit(kk, nn as u64)?;
            }
        }
        (None, true, None, None, Some(range)) => {
            if range.lo < 1 {
                return Err(invalid("bounds sweeps need N >= 1"));
            }
            for nn in range.iter(step) {
                emit(nn as u64, nn as u64)?;
            }
        }
        (None, false, Some(range), Some(nn), None) => {
            if range.lo < 1 || nn < 1 {
                return Err(invalid("bounds sweeps need k >= 1 and N >= 1"));
            }
            for kk in range.iter(step) {
                emit(kk as u64, nn)?;
            }
        }
        _ => {
            return Err(invalid(
                "choose exactly one family: --k with --n-range, --diagonal with --n-range, \
                 or --k-range with --n",
            ))
        }
    }
    sink.finish()
}

fn crossover_cmd(k: usize, n_max: u32, tol: f64, out: &str) -> Result<()> {
    check_k(k)?;
    if n_max < 2 {
        return Err(invalid("--n-max must be at least 2"));
    }
    let mut sink = Sink::create(out)?;
    sink.line("k,N_star")?;
    match optimizer::crossover(k, n_max, tol) {
        Ok(n_star) => sink.line(&format!("{k},{n_star}"))?,
        Err(optimizer::OptimError::CrossoverNotFound { n_max }) => {
            eprintln!("no stable crossover found up to N_max={n_max}");
            sink.line(&format!("{k},"))?;
        }
        Err(e) => return Err(e.into()),
    }
    sink.finish()
}

fn entanglement_cmd(k: usize, n_range: Range, step: u32, tol: f64, out: &str) -> Result<()> {
    check_k(k)?;
    if n_range.lo < 1 {
        return Err(invalid("entanglement sweep needs N >= 1"));
    }
    let mut sink = Sink::create(out)?;
    sink.line("k,N,eg_exact,eg_asymptotic,asymptote_valid")?;
    for n in n_range.iter(step) {
        let probe = probes::holland_burnett(k, n)?;
        let exact = probes::geometric_entanglement(&probe, tol)?;
        let asym = probes::eg_asymptotic(k, n)?;
        let valid = (0.0..1.0).contains(&asym);
        sink.line(&format!("{k},{n},{},{},{valid}", fmt(exact.eg), fmt(asym)))?;
        eprintln!("entanglement: N={n} done");
    }
    sink.finish()
}

#[derive(Serialize)]
struct OptimizeReport {
    k: usize,
    n: u32,
    best_mi_bits: f64,
    starts: usize,
    iterations: usize,
    converged: bool,
    seed: u64,
    best_amplitudes: Vec<f64>,
}

fn optimize_cmd(
    k: usize,
    n: u32,
    tol: f64,
    starts: usize,
    seed: u64,
    format: Format,
    out: &str,
) -> Result<()> {
    check_k(k)?;
    if format != Format::Json {
        return Err(invalid("optimize emits a nested report; use --format json"));
    }
    if starts < 2 {
        return Err(invalid(
            "--starts must be at least 2 (the two named probes)",
        ));
    }
    let run = optimizer::optimize_probe(k, n, tol, starts, seed).map_err(|e| match e {
        optimizer::OptimError::DimensionTooLarge { .. }
        | optimizer::OptimError::UnsupportedK(_) => invalid(e.to_string()),
        other => anyhow!(other),
    })?;
    let report = OptimizeReport {
        k,
        n,
        best_mi_bits: run.best_mi,
        starts: run.starts,
        iterations: run.iterations,
        converged: run.converged,
        seed: run.seed,
        best_amplitudes: run.best_probe.amplitudes().iter().map(|c| c.re).collect(),
    };
    let mut sink = Sink::create(out)?;
    sink.line(&serde_json::to_string_pretty(&report)?)?;
    sink.finish()
}

fn density_cmd(
    probe: ProbeFamily,
    k: usize,
    n: u32,
    points: usize,
    offset: f64,
    radians: bool,
    out: &str,
) -> Result<()> {
    check_k(k)?;
    if points == 0 {
        return Err(invalid("--points must be positive"));
    }
    let offset_turns = if radians {
        offset / (2.0 * std::f64::consts::PI)
    } else {
        offset
    };
    let p = make_probe(probe, k, n)?;
    let rd = multiphase::ReducedDensity::new(p);
    let mut sink = Sink::create(out)?;
    match k {
        1 => {
            sink.line("gamma,density")?;
            for i in 0..points {
                let g = offset_turns + i as f64 / points as f64;
                sink.line(&format!("{},{}", fmt(g), fmt(rd.eval(&[g]))))?;
            }
        }
        _ => {
            sink.line("gamma1,gamma2,density")?;
            for i in 0..points {
                let g1 = offset_turns + i as f64 / points as f64;
                for j in 0..points {
                    let g2 = offset_turns + j as f64 / points as f64;
                    sink.line(&format!(
                        "{},{},{}",
                        fmt(g1),
                        fmt(g2),
                        fmt(rd.eval(&[g1, g2]))
                    ))?;
                }
            }
        }
    }
    sink.finish()
}

fn cost_cmd(
    probe: ProbeFamily,
    n_range: Range,
    step: u32,
    _cost: CostKind,
    mode: CostModeArg,
    tol: f64,
    out: &str,
) -> Result<()> {
    let modes: Vec<(&str, CostMode)> = match mode {
        CostModeArg::Continuous => vec![("continuous", CostMode::Continuous)],
        CostModeArg::Discrete => vec![("discrete", CostMode::Discrete)],
        CostModeArg::Both => vec![
            ("continuous", CostMode::Continuous),
            ("discrete", CostMode::Discrete),
        ],
    };
    let mut sink = Sink::create(out)?;
    sink.line("N,mode,cost_value")?;
    for n in n_range.iter(step) {
        let p = make_probe(probe, 1, n)?;
        for (label, m) in &modes {
            let r = information::bayes_cost(&p, &CostFunction::HolevoSine, *m, tol)
                .with_context(|| format!("cost at N={n}"))?;
            sink.line(&format!("{n},{label},{}", fmt(r.value)))?;
        }
    }
    sink.finish()
}
