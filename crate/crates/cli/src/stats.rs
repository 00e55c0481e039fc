//! Rank statistics for sweep analysis.
//!
//! Spearman correlation is Pearson correlation applied to average ranks;
//! ties within either sample share the mean of the rank positions they
//! occupy.

/// Average-rank transform: ranks start at 1, tied values share the mean
/// of their positions.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("rank input must be finite"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) hold one tie group.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation coefficient. `None` when fewer than two points or
/// either sample has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average ties. `None` when fewer than
/// two points or either sample is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn monotone_maps_have_unit_rank_correlation() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 7.0 - 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.exp() + 2.0 * x).collect();
        assert_relative_eq!(spearman(&xs, &ys).unwrap(), 1.0, epsilon = 1e-12);
        let neg: Vec<f64> = ys.iter().map(|&y| -y).collect();
        assert_relative_eq!(spearman(&xs, &neg).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn ties_share_average_ranks() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 30.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn matches_hand_computed_example() {
        // Ranks of xs: [1, 2, 3, 4, 5]; ranks of ys: [2, 1, 4, 3, 5].
        // Sum of squared rank differences is 4, so
        // rho = 1 - 6 * 4 / (5 * 24) = 0.8.
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [0.2, 0.1, 0.8, 0.7, 0.9];
        assert_relative_eq!(spearman(&xs, &ys).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs_yield_none() {
        assert!(spearman(&[1.0], &[2.0]).is_none());
        assert!(spearman(&[1.0, 2.0], &[3.0, 3.0]).is_none());
        assert!(pearson(&[1.0, 2.0], &[3.0]).is_none());
    }

    #[test]
    fn pearson_is_scale_invariant() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys = [3.0, 1.0, 4.0, 1.5];
        let scaled: Vec<f64> = ys.iter().map(|&y| 100.0 * y - 7.0).collect();
        assert_relative_eq!(
            pearson(&xs, &ys).unwrap(),
            pearson(&xs, &scaled).unwrap(),
            epsilon = 1e-12
        );
    }
}
