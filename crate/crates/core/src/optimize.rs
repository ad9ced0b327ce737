//! Derivative-free minimization.

/// Nelder–Mead with dimension-adaptive coefficients.
#[derive(Clone, Debug)]
pub struct NelderMead {
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { diameter_tol: 1e-6, max_evals: 20_000, initial_step: 0.5 }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lerp(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(toward).map(|(b, w)| b + t * (w - b)).collect()
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let d = x0.len();
        assert!(d >= 1);
        let df = d as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / df, 0.75 - 1.0 / (2.0 * df), 1.0 - 1.0 / df);

        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            f(x)
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..d {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = &simplex[0].0;
            let diameter = simplex[1..].iter().map(|(x, _)| dist(x, best)).fold(0.0, f64::max);
            if diameter < self.diameter_tol {
                converged = true;
                break;
            }
            if evals >= self.max_evals {
                break;
            }

            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / df;
                }
            }
            let worst = simplex[d].clone();
            let second_worst = simplex[d - 1].1;
            let best_val = simplex[0].1;

            let reflected = lerp(&centroid, &worst.0, -alpha);
            let fr = eval(&reflected, &mut evals);
            if fr < best_val {
                let expanded = lerp(&centroid, &worst.0, -alpha * gamma);
                let fe = eval(&expanded, &mut evals);
                simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < second_worst {
                simplex[d] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < worst.1 {
                let c = lerp(&centroid, &reflected, rho);
                let v = eval(&c, &mut evals);
                (c, v)
            } else {
                let c = lerp(&centroid, &worst.0, rho);
                let v = eval(&c, &mut evals);
                (c, v)
            };
            if fc < worst.1.min(fr) {
                simplex[d] = (contracted, fc);
                continue;
            }
            let best_x = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&best_x, &vertex.0, sigma);
                let v = eval(&x, &mut evals);
                *vertex = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, evals, converged }
    }
}
