//! Adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Both drivers start from a caller-chosen uniform mesh (so that known
//! oscillation grids are resolved before any adaptation happens), then
//! bisect the worst cell until the summed error estimate meets an absolute
//! tolerance. Evaluation is parallel per cell; reductions run in a fixed
//! cell order so repeated runs agree bit for bit.

use rayon::prelude::*;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Outcome of a quadrature: value, an absolute-error estimate and the number
/// of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("evaluation budget {budget} exhausted before reaching tol; partial value {partial:?}")]
    BudgetExhausted {
        partial: QuadratureResult,
        budget: u64,
    },
    #[error("subdivision stalled at machine precision; partial value {partial:?}")]
    RoundoffStall { partial: QuadratureResult },
}

impl QuadratureError {
    /// The best value obtained before the failure.
    pub fn partial(&self) -> QuadratureResult {
        match self {
            QuadratureError::BudgetExhausted { partial, .. } => *partial,
            QuadratureError::RoundoffStall { partial } => *partial,
        }
    }
}

// 15-point Kronrod / 7-point Gauss rule (QUADPACK constants).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

pub(crate) const GK15_POINTS: u64 = 15;
pub(crate) const GK15X15_POINTS: u64 = 225;

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Single 15-point Kronrod evaluation over `[a, b]`; returns (value, error).
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * sum;
        }
        res_k += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let err = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    (value, err)
}

// 15 tensor abscissae in [-1, 1] with Kronrod and (zero-padded) Gauss weights.
fn tensor_nodes() -> ([f64; 15], [f64; 15], [f64; 15]) {
    let mut t = [0.0f64; 15];
    let mut wk = [0.0f64; 15];
    let mut wg = [0.0f64; 15];
    for j in 0..7 {
        t[j] = -XGK[j];
        t[14 - j] = XGK[j];
        wk[j] = WGK[j];
        wk[14 - j] = WGK[j];
    }
    t[7] = 0.0;
    wk[7] = WGK[7];
    wg[7] = WG[3];
    for j in [1usize, 3, 5] {
        wg[j] = WG[j / 2];
        wg[14 - j] = WG[j / 2];
    }
    (t, wk, wg)
}

/// Tensor 15x15 Kronrod evaluation over a rectangle; returns (value, error).
pub(crate) fn gk15_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> (f64, f64) {
    let (t, wk, wg) = tensor_nodes();
    let cx = 0.5 * (x0 + x1);
    let hx = 0.5 * (x1 - x0);
    let cy = 0.5 * (y0 + y1);
    let hy = 0.5 * (y1 - y0);

    let mut vals = [[0.0f64; 15]; 15];
    for (i, ti) in t.iter().enumerate() {
        let x = cx + hx * ti;
        for (j, tj) in t.iter().enumerate() {
            vals[i][j] = f(x, cy + hy * tj);
        }
    }

    let mut res_k = 0.0;
    let mut res_g = 0.0;
    let mut res_abs = 0.0;
    for i in 0..15 {
        for j in 0..15 {
            let v = vals[i][j];
            res_k += wk[i] * wk[j] * v;
            res_g += wg[i] * wg[j] * v;
            res_abs += wk[i] * wk[j] * v.abs();
        }
    }
    // sum of Kronrod weights is 2 per axis, so the unit-square mean is res_k/4
    let mean = res_k * 0.25;
    let mut res_asc = 0.0;
    for i in 0..15 {
        for j in 0..15 {
            res_asc += wk[i] * wk[j] * (vals[i][j] - mean).abs();
        }
    }

    let area = hx * hy;
    let value = res_k * area;
    let err = rescale_error(
        (res_k - res_g) * area,
        res_abs * area.abs(),
        res_asc * area.abs(),
    );
    (value, err)
}

#[derive(Clone, Copy)]
struct HeapEntry {
    err: f64,
    seq: u64,
    idx: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on error, deterministic tie-break on insertion order
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Adaptive 1-D quadrature of `f` over `[a, b]` starting from `n_init`
/// uniform cells, targeting absolute error `tol` within `budget` evaluations.
pub fn adaptive_1d<F>(
    f: &F,
    a: f64,
    b: f64,
    n_init: usize,
    tol: f64,
    budget: u64,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64 + Sync,
{
    assert!(tol > 0.0 && b > a && n_init >= 1);
    let affordable = ((budget / GK15_POINTS) as usize).max(1);
    let n_cells = n_init.min(affordable);
    let width = (b - a) / n_cells as f64;

    // (a, b, value, err); dead cells marked by err = -1
    let mut cells: Vec<(f64, f64, f64, f64)> = (0..n_cells)
        .into_par_iter()
        .map(|i| {
            let ca = a + i as f64 * width;
            let cb = if i + 1 == n_cells {
                b
            } else {
                a + (i + 1) as f64 * width
            };
            let (v, e) = gk15(f, ca, cb);
            (ca, cb, v, e)
        })
        .collect();
    let mut evals = GK15_POINTS * n_cells as u64;

    let finish = |cells: &[(f64, f64, f64, f64)], evals: u64| -> QuadratureResult {
        let mut live: Vec<&(f64, f64, f64, f64)> = cells.iter().filter(|c| c.3 >= 0.0).collect();
        live.sort_by(|p, q| p.0.total_cmp(&q.0));
        QuadratureResult {
            value: kahan_sum(live.iter().map(|c| c.2)),
            abs_error_estimate: kahan_sum(live.iter().map(|c| c.3)),
            evaluations: evals,
        }
    };

    if n_cells < n_init {
        return Err(QuadratureError::BudgetExhausted {
            partial: finish(&cells, evals),
            budget,
        });
    }

    let mut heap: BinaryHeap<HeapEntry> = cells
        .iter()
        .enumerate()
        .map(|(idx, c)| HeapEntry {
            err: c.3,
            seq: idx as u64,
            idx,
        })
        .collect();
    let mut seq = cells.len() as u64;
    let mut err_sum = kahan_sum(cells.iter().map(|c| c.3));

    while err_sum > tol {
        // trust the incremental estimate only after an exact confirmation
        let exact = kahan_sum(cells.iter().filter(|c| c.3 >= 0.0).map(|c| c.3));
        if exact <= tol {
            break;
        }
        err_sum = exact;

        let mut stalled = true;
        while err_sum > tol {
            let top = match heap.pop() {
                Some(t) => t,
                None => break,
            };
            let (ca, cb, _, ce) = cells[top.idx];
            if ce < 0.0 || ce != top.err {
                continue; // stale entry
            }
            if cb - ca < 1e-13 * (b - a).abs() {
                // can't split further; freeze this cell
                continue;
            }
            if evals + 2 * GK15_POINTS > budget {
                return Err(QuadratureError::BudgetExhausted {
                    partial: finish(&cells, evals),
                    budget,
                });
            }
            stalled = false;
            let mid = 0.5 * (ca + cb);
            let (v1, e1) = gk15(f, ca, mid);
            let (v2, e2) = gk15(f, mid, cb);
            evals += 2 * GK15_POINTS;
            cells[top.idx].3 = -1.0;
            err_sum += e1 + e2 - ce;
            for (na, nb, nv, ne) in [(ca, mid, v1, e1), (mid, cb, v2, e2)] {
                cells.push((na, nb, nv, ne));
                heap.push(HeapEntry {
                    err: ne,
                    seq,
                    idx: cells.len() - 1,
                });
                seq += 1;
            }
        }
        if stalled {
            let partial = finish(&cells, evals);
            if partial.abs_error_estimate <= tol {
                return Ok(partial);
            }
            return Err(QuadratureError::RoundoffStall { partial });
        }
    }

    Ok(finish(&cells, evals))
}

/// Adaptive 2-D quadrature over `[x0,x1] x [y0,y1]` from an `nx x ny` uniform
/// mesh. Very large initial meshes run a streaming pass first and only
/// materialize cells that actually need refinement. `progress`, when given,
/// is called with a completed fraction in [0, 1].
pub fn adaptive_2d<F>(
    f: &F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    (nx, ny): (usize, usize),
    tol: f64,
    budget: u64,
    progress: Option<&(dyn Fn(f64) + Sync)>,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    assert!(tol > 0.0 && x1 > x0 && y1 > y0 && nx >= 1 && ny >= 1);
    let total_cells = nx * ny;
    let wx = (x1 - x0) / nx as f64;
    let wy = (y1 - y0) / ny as f64;
    let rect = move |ix: usize, iy: usize| -> (f64, f64, f64, f64) {
        (
            x0 + ix as f64 * wx,
            if ix + 1 == nx {
                x1
            } else {
                x0 + (ix + 1) as f64 * wx
            },
            y0 + iy as f64 * wy,
            if iy + 1 == ny {
                y1
            } else {
                y0 + (iy + 1) as f64 * wy
            },
        )
    };

    if (total_cells as u64) * GK15X15_POINTS > budget {
        // not enough budget for even the initial mesh: coarse fallback report
        let coarse = gk15_2d(f, x0, x1, y0, y1);
        return Err(QuadratureError::BudgetExhausted {
            partial: QuadratureResult {
                value: coarse.0,
                abs_error_estimate: coarse.1,
                evaluations: GK15X15_POINTS,
            },
            budget,
        });
    }

    let done_rows = std::sync::atomic::AtomicUsize::new(0);
    let report_every = (ny / 50).max(1);

    // streaming pass over rows: per-row (value, error) plus per-cell f32 errors
    let rows: Vec<(f64, f64, Vec<f32>)> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            let mut row_v = 0.0;
            let mut row_e = 0.0;
            let mut errs = Vec::with_capacity(nx);
            for ix in 0..nx {
                let (a, b, c, d) = rect(ix, iy);
                let (v, e) = gk15_2d(f, a, b, c, d);
                row_v += v;
                row_e += e;
                errs.push(e as f32);
            }
            if let Some(p) = progress {
                let done = done_rows.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if done.is_multiple_of(report_every) {
                    p(done as f64 / ny as f64);
                }
            }
            (row_v, row_e, errs)
        })
        .collect();

    let mut evals = total_cells as u64 * GK15X15_POINTS;
    let mut value = kahan_sum(rows.iter().map(|r| r.0));
    let mut err_sum = kahan_sum(rows.iter().map(|r| r.1));

    if err_sum <= tol {
        return Ok(QuadratureResult {
            value,
            abs_error_estimate: err_sum,
            evaluations: evals,
        });
    }

    // refinement: materialize only the cells carrying meaningful error
    let threshold = (0.25 * tol / total_cells as f64) as f32;
    let mut cells: Vec<(f64, f64, f64, f64, f64, f64)> = Vec::new(); // x0,x1,y0,y1,v,e
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut seq = 0u64;
    for (iy, row) in rows.iter().enumerate() {
        for (ix, &e32) in row.2.iter().enumerate() {
            if e32 > threshold {
                let (a, b, c, d) = rect(ix, iy);
                let (v, e) = gk15_2d(f, a, b, c, d); // bitwise identical to pass one
                evals += GK15X15_POINTS;
                cells.push((a, b, c, d, v, e));
                heap.push(HeapEntry {
                    err: e,
                    seq,
                    idx: cells.len() - 1,
                });
                seq += 1;
                if evals + GK15X15_POINTS > budget {
                    return Err(QuadratureError::BudgetExhausted {
                        partial: QuadratureResult {
                            value,
                            abs_error_estimate: err_sum,
                            evaluations: evals,
                        },
                        budget,
                    });
                }
            }
        }
    }
    drop(rows);

    let min_w = 1e-13 * ((x1 - x0).abs() + (y1 - y0).abs());
    while err_sum > tol {
        let top = match heap.pop() {
            Some(t) => t,
            None => {
                let partial = QuadratureResult {
                    value,
                    abs_error_estimate: err_sum,
                    evaluations: evals,
                };
                return Err(QuadratureError::RoundoffStall { partial });
            }
        };
        let (a, b, c, d, v, e) = cells[top.idx];
        if e < 0.0 || e != top.err {
            continue;
        }
        if b - a < min_w && d - c < min_w {
            continue;
        }
        if evals + 4 * GK15X15_POINTS > budget {
            return Err(QuadratureError::BudgetExhausted {
                partial: QuadratureResult {
                    value,
                    abs_error_estimate: err_sum,
                    evaluations: evals,
                },
                budget,
            });
        }
        // split along both axes
        let mx = 0.5 * (a + b);
        let my = 0.5 * (c + d);
        let quads = [
            (a, mx, c, my),
            (mx, b, c, my),
            (a, mx, my, d),
            (mx, b, my, d),
        ];
        cells[top.idx].5 = -1.0;
        value -= v;
        err_sum -= e;
        for (qa, qb, qc, qd) in quads {
            let (nv, ne) = gk15_2d(f, qa, qb, qc, qd);
            evals += GK15X15_POINTS;
            value += nv;
            err_sum += ne;
            cells.push((qa, qb, qc, qd, nv, ne));
            heap.push(HeapEntry {
                err: ne,
                seq,
                idx: cells.len() - 1,
            });
            seq += 1;
        }
    }

    Ok(QuadratureResult {
        value,
        abs_error_estimate: err_sum.max(0.0),
        evaluations: evals,
    })
}
