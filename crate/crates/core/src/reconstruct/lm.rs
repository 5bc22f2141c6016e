//! Small dense Levenberg–Marquardt solver with a central-difference Jacobian.

pub(super) struct LmOptions {
    pub max_iterations: usize,
    pub step: f64,
    pub tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 200, step: 1e-7, tolerance: 1e-30 }
    }
}

/// Minimizes `Σ r(p)²`; returns the parameters and the final cost.
pub(super) fn levenberg_marquardt<F>(mut params: Vec<f64>, residuals: F, opts: &LmOptions) -> (Vec<f64>, f64)
where
    F: Fn(&[f64], &mut Vec<f64>),
{
    let n = params.len();
    let eval = |p: &[f64]| {
        let mut r = Vec::new();
        residuals(p, &mut r);
        r
    };
    let cost_of = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();

    let mut r = eval(&params);
    let mut cost = cost_of(&r);
    if n == 0 {
        return (params, cost);
    }
    let mut lambda = 1e-3;
    let mut probe = params.clone();

    for _ in 0..opts.max_iterations {
        if cost <= opts.tolerance {
            break;
        }
        // Jacobian, column k = ∂r/∂p_k
        let rows = r.len();
        let mut jac = vec![0.0; rows * n];
        for k in 0..n {
            probe[k] = params[k] + opts.step;
            let plus = eval(&probe);
            probe[k] = params[k] - opts.step;
            let minus = eval(&probe);
            probe[k] = params[k];
            for i in 0..rows {
                jac[i * n + k] = (plus[i] - minus[i]) / (2.0 * opts.step);
            }
        }
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for i in 0..rows {
            let row = &jac[i * n..(i + 1) * n];
            for a in 0..n {
                jtr[a] += row[a] * r[i];
                for b in a..n {
                    jtj[a * n + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a * n + b] = jtj[b * n + a];
            }
        }
        if jtr.iter().map(|g| g.abs()).fold(0.0, f64::max) < 1e-18 {
            break;
        }

        let mut improved = false;
        for _ in 0..30 {
            let mut system = jtj.clone();
            for a in 0..n {
                system[a * n + a] += lambda * (jtj[a * n + a] + 1e-12);
            }
            let Some(delta) = cholesky_solve(&mut system, &jtr, n) else {
                lambda *= 10.0;
                continue;
            };
            let candidate: Vec<f64> = params.iter().zip(&delta).map(|(p, d)| p - d).collect();
            let cand_r = eval(&candidate);
            let cand_cost = cost_of(&cand_r);
            if cand_cost < cost {
                let relative = (cost - cand_cost) / cost.max(f64::MIN_POSITIVE);
                params = candidate;
                probe.copy_from_slice(&params);
                r = cand_r;
                cost = cand_cost;
                lambda = (lambda / 3.0).max(1e-15);
                improved = relative > 1e-14;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (params, cost)
}

/// Solves `A x = b` for symmetric positive-definite `A` (overwritten).
fn cholesky_solve(a: &mut [f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i * n + k] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k * n + i] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_rosenbrock() {
        let res = |p: &[f64], out: &mut Vec<f64>| {
            out.push(10.0 * (p[1] - p[0] * p[0]));
            out.push(1.0 - p[0]);
        };
        let (p, cost) = levenberg_marquardt(vec![-1.2, 1.0], res, &LmOptions::default());
        assert!(cost < 1e-20, "{cost}");
        assert!((p[0] - 1.0).abs() < 1e-8 && (p[1] - 1.0).abs() < 1e-8);
    }
}
