//! Derivative-free simplex minimizer (Nelder-Mead) for the small dense
//! objectives in this crate. Standard coefficients: reflection 1,
//! expansion 2, contraction 0.5, shrink 0.5.

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub f: f64,
    /// True iff the improvement-window stop fired before `max_iters`.
    pub converged: bool,
}

/// Minimize `f` from `x0`, with the initial simplex spanned by
/// per-coordinate `steps`. Stops when the best value improves by less
/// than `tol` over the trailing `window` iterations, or at `max_iters`.
///
/// The objective may return `f64::INFINITY` to reject a point; it must
/// never return NaN.
pub(crate) fn nelder_mead(
    f: &(impl Fn(&[f64]) -> f64 + ?Sized),
    x0: &[f64],
    steps: &[f64],
    max_iters: usize,
    tol: f64,
    window: usize,
) -> SimplexResult {
    let dim = x0.len();
    assert_eq!(steps.len(), dim, "one step per coordinate");
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut best_history: Vec<f64> = Vec::with_capacity(max_iters + 1);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        // Order ascending by value; index 0 best, index dim worst.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        best_history.push(values[best]);
        if iterations >= window {
            let then = best_history[iterations - window];
            if then - values[best] < tol {
                converged = true;
                break;
            }
        }
        iterations += 1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for &i in &order[..dim] {
            for (c, xi) in centroid.iter_mut().zip(&simplex[i]) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let f_reflected = f(&reflected);

        if f_reflected < values[best] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + 2.0 * (r - c))
                .collect();
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            // Contract toward the better of the reflected/worst points.
            let (target, f_target) = if f_reflected < values[worst] {
                (&reflected, f_reflected)
            } else {
                (&simplex[worst], values[worst])
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(target)
                .map(|(c, t)| c + 0.5 * (t - c))
                .collect();
            let f_contracted = f(&contracted);
            if f_contracted < f_target {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // Shrink everything toward the best vertex.
                let anchor = simplex[best].clone();
                for i in 0..=dim {
                    if i == best {
                        continue;
                    }
                    for (xi, ai) in simplex[i].iter_mut().zip(&anchor) {
                        *xi = ai + 0.5 * (*xi - ai);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("no NaN"))
        .map(|(i, _)| i)
        .expect("nonempty simplex");
    SimplexResult {
        x: simplex[best].clone(),
        f: values[best],
        converged,
    }
}
