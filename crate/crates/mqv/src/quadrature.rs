//! Integration rules on uniform grids.

/// Composite Simpson over uniformly spaced samples. Falls back to Simpson 3/8 on the
/// last four points when the number of intervals is odd.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        3 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) { (n - 1, false) } else { (n - 4, true) };
            let mut total = 0.0;
            if even_end > 0 {
                let mut acc = y[0] + y[even_end];
                for (i, v) in y.iter().enumerate().take(even_end).skip(1) {
                    acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                total = acc * h / 3.0;
            }
            if tail {
                let k = even_end;
                total += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
            }
            total
        }
    }
}

/// Simpson of the pointwise product.
pub fn simpson_product(a: &[f64], b: &[f64], h: f64) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    simpson(&p, h)
}

/// `out[i] = integral from t_i to t_end`, trapezoid rule.
pub fn tail_integral(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        out[i] = out[i + 1] + 0.5 * h * (y[i] + y[i + 1]);
    }
    out
}

/// Trapezoid rule.
pub fn trapezoid(y: &[f64], h: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    h * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[y.len() - 1]))
}
