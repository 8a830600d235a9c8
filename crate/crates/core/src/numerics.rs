//! Deterministic reductions and quadrature helpers shared by the diagnostics.

/// Neumaier-compensated sum, accumulated strictly in iteration order.
///
/// Every integral in the crate goes through this so results do not depend on
/// how per-cell work was split across threads.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Cumulative trapezoid integral of `values` sampled at `times`.
///
/// Returns a series of the same length starting at 0.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(times.len(), values.len());
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    let mut comp = 0.0;
    for k in 0..times.len() {
        if k > 0 {
            let inc = 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
            // Kahan step keeps long runs from drifting.
            let y = inc - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        out.push(acc);
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(vals), 2.0);
    }

    #[test]
    fn trapezoid_is_exact_for_linear_integrands() {
        let t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * t + 1.0).collect();
        let acc = cumulative_trapezoid(&t, &v);
        assert_eq!(acc[0], 0.0);
        assert!((acc[10] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&x, &y) - 2.0).abs() < 1e-15);
    }
}

/// Counter-based generator for item `index` of a seeded ensemble.
///
/// Item `k` always sees the same stream whatever order items are drawn in.
pub fn stream_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
