//! Small Nelder-Mead simplex minimizer shared by the probe optimizer and the
//! entanglement maximizer. Deterministic for fixed inputs.

pub(crate) struct NmOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with an axis-aligned initial simplex of
/// edge `step`. Stops when the simplex function spread falls below `ftol`.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    ftol: f64,
    max_iter: usize,
) -> NmOutcome {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;

        // order (stable sort keeps ties deterministic)
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| fv[i].total_cmp(&fv[j]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let refv: Vec<f64> = order.iter().map(|&i| fv[i]).collect();
        simplex = reordered;
        fv = refv;

        if fv[d] - fv[0] <= ftol {
            converged = true;
            break;
        }

        // centroid of all but worst
        let mut centroid = vec![0.0; d];
        for v in simplex.iter().take(d) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }

        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = lerp(ALPHA);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = lerp(GAMMA);
            let fe = f(&xe);
            if fe < fr {
                simplex[d] = xe;
                fv[d] = fe;
            } else {
                simplex[d] = xr;
                fv[d] = fr;
            }
        } else if fr < fv[d - 1] {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            let xc = if fr < fv[d] { lerp(RHO) } else { lerp(-RHO) };
            let fc = f(&xc);
            if fc < fv[d].min(fr) {
                simplex[d] = xc;
                fv[d] = fc;
            } else {
                // shrink toward the best vertex
                let best = simplex[0].clone();
                for i in 1..=d {
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    fv[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    NmOutcome {
        x: simplex[best].clone(),
        fx: fv[best],
        iterations,
        converged,
    }
}
