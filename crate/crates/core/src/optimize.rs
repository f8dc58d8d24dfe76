//! Derivative-free minimization (Nelder-Mead simplex) and finite-difference Hessians.

/// Outcome of [`nelder_mead`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Options for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Initial simplex edge length per coordinate.
    pub step: f64,
    /// Stop when the spread of function values and of vertices both fall below these.
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { step: 0.5, f_tol: 1e-11, x_tol: 1e-9, max_iter: 5000 }
    }
}

/// Minimize `f` from `x0`. Non-finite values are treated as `+inf`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: NelderMead) -> Minimum {
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut fs: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    let mut restarts = 0;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();

        let f_spread = (fs[n] - fs[0]).abs();
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol * (1.0 + fs[0].abs()) && x_spread <= opts.x_tol * 1e3 || x_spread <= opts.x_tol {
            // Restart once around the best point to escape premature collapse.
            if restarts < 2 && fs[0].is_finite() {
                restarts += 1;
                let best = simplex[0].clone();
                let fb = fs[0];
                simplex = vec![best.clone()];
                fs = vec![fb];
                for i in 0..n {
                    let mut v = best.clone();
                    v[i] += opts.step * 0.1;
                    fs.push(eval(&v));
                    simplex.push(v);
                }
                continue;
            }
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for j in 0..n {
                centroid[j] += v[j] / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect()
        };

        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < fs[0] {
            let xe = along(-alpha * gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                fs[n] = fe;
            } else {
                simplex[n] = xr;
                fs[n] = fr;
            }
        } else if fr < fs[n - 1] {
            simplex[n] = xr;
            fs[n] = fr;
        } else {
            let (xc, fc) = if fr < fs[n] {
                let xc = along(-alpha * rho);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(rho);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fs[n].min(fr) {
                simplex[n] = xc;
                fs[n] = fc;
            } else {
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    }
                    fs[i] = eval(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), fx: fs[best], iterations, converged }
}

/// Central-difference Hessian of `f` at `x` with step `h`.
pub fn hessian(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    let f0 = f(x);
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x.to_vec();
        y[di] += si * h;
        y[dj] += sj * h;
        f(&y)
    };
    for i in 0..n {
        let mut y = x.to_vec();
        y[i] += h;
        let fp = f(&y);
        y[i] -= 2.0 * h;
        let fm = f(&y);
        out[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0))
                / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], NelderMead::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn one_dimensional() {
        let m = nelder_mead(|x| (x[0] - 3.0).powi(2), &[0.0], NelderMead::default());
        assert!((m.x[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) + x[1] * x[1] };
        let m = nelder_mead(f, &[2.0, 1.0], NelderMead::default());
        assert!((m.x[0] - 0.5).abs() < 1e-6 && m.x[1].abs() < 1e-6);
    }

    #[test]
    fn quadratic_hessian() {
        let f = |x: &[f64]| 2.0 * x[0] * x[0] + 3.0 * x[0] * x[1] + 5.0 * x[1] * x[1];
        let h = hessian(f, &[0.3, -0.7], 1e-4);
        assert!((h[0][0] - 4.0).abs() < 1e-6);
        assert!((h[0][1] - 3.0).abs() < 1e-6 && (h[1][0] - 3.0).abs() < 1e-6);
        assert!((h[1][1] - 10.0).abs() < 1e-6);
    }
}
