//! Small derivative-free optimizers: scanned golden-section search in one
//! dimension and Nelder–Mead in a few.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximize `f` on `[lo, hi]`: scan `scan` equally spaced points (ends
/// included), then golden-section refine around the best scan point.
/// Returns `(argmax, max)`; the endpoints are legitimate answers.
pub fn scan_maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let scan = scan.max(3);
    let step = (hi - lo) / (scan - 1) as f64;
    let mut best_k = 0;
    let mut best_f = f64::NEG_INFINITY;
    let mut best_end = (lo, f64::NEG_INFINITY);
    for k in 0..scan {
        let x = if k == scan - 1 { hi } else { lo + step * k as f64 };
        let v = f(x);
        if v > best_f {
            best_f = v;
            best_k = k;
        }
        if (k == 0 || k == scan - 1) && v > best_end.1 {
            best_end = (x, v);
        }
    }
    let a = lo + step * best_k.saturating_sub(1) as f64;
    let b = (lo + step * (best_k + 1) as f64).min(hi);
    let (x, v) = golden_section_max(&f, a, b, 1e-12 * (1.0 + hi.abs().max(lo.abs())));
    if v >= best_end.1 {
        (x, v)
    } else {
        best_end
    }
}

/// Golden-section search for a maximum on `[a, b]`, down to bracket width
/// `xtol`. Returns the best point seen (ends included).
pub fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let fa = f(a);
    let fb = f(b);
    let mut best = if fa >= fb { (a, fa) } else { (b, fb) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` from `start` with initial simplex edge lengths `step`.
/// Convergence: simplex value spread below `ftol` and size below `xtol`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: &[f64],
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> NelderMeadResult {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let size = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= ftol && size <= xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<f64> = (0..n)
                        .map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]))
                        .collect();
                    values[i] = f(&p);
                    simplex[i] = p;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    NelderMeadResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}
