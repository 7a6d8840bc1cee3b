//! Derivative-free simplex minimization.

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn affine(from: &[f64], towards: &[f64], t: f64) -> Vec<f64> {
    from.iter()
        .zip(towards)
        .map(|(a, b)| a + t * (b - a))
        .collect()
}

pub(crate) fn minimize<F>(f: F, start: &[f64], opts: Options) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < opts.diameter_tol {
            return Minimum {
                point: simplex.swap_remove(0),
                value: values[0],
                converged: true,
            };
        }
        if evals >= opts.max_evals {
            return Minimum {
                point: simplex.swap_remove(0),
                value: values[0],
                converged: false,
            };
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let f_worst = values[n];

        let reflected = affine(&centroid, &worst, -REFLECT);
        let f_reflected = f(&reflected);
        evals += 1;

        if f_reflected < values[0] {
            let expanded = affine(&centroid, &worst, -EXPAND);
            let f_expanded = f(&expanded);
            evals += 1;
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
            continue;
        }

        // Inside contraction must strictly improve; once values tie at machine
        // precision the simplex shrinks instead of cycling one vertex.
        let (contracted, f_contracted, accept) = if f_reflected < f_worst {
            let c = affine(&centroid, &reflected, CONTRACT);
            let fc = f(&c);
            (c, fc, fc <= f_reflected)
        } else {
            let c = affine(&centroid, &worst, CONTRACT);
            let fc = f(&c);
            (c, fc, fc < f_worst)
        };
        evals += 1;
        if accept {
            simplex[n] = contracted;
            values[n] = f_contracted;
            continue;
        }

        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = affine(&best, &simplex[i], SHRINK);
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }
}
