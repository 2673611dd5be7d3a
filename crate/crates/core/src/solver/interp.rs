//! Hermite interpolation on solution grids.

/// Quintic Hermite interpolant through value, first and second derivative
/// at both ends of `[x0, x1]`; returns value and first derivative at `x`.
pub fn quintic(x0: f64, x1: f64, a: [f64; 3], b: [f64; 3], x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h3 = 0.5 * t3 - t4 + 0.5 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    let d3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let value = a[0] * h0 + h * a[1] * h1 + h * h * (a[2] * h2 + b[2] * h3) + h * b[1] * h4 + b[0] * h5;
    let slope = (a[0] * d0 + b[0] * d5) / h + a[1] * d1 + b[1] * d4 + h * (a[2] * d2 + b[2] * d3);
    (value, slope)
}

/// Cubic Hermite interpolant through value and first derivative at both ends.
pub fn cubic(x0: f64, x1: f64, a: [f64; 2], b: [f64; 2], x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = a[0] * h00 + h * a[1] * h10 + b[0] * h01 + h * b[1] * h11;
    let slope = (a[0] * (6.0 * t2 - 6.0 * t) + b[0] * (6.0 * t - 6.0 * t2)) / h
        + a[1] * (3.0 * t2 - 4.0 * t + 1.0)
        + b[1] * (3.0 * t2 - 2.0 * t);
    (value, slope)
}

/// Index `i` with `xs[i] ≤ x ≤ xs[i+1]`, or `None` outside the grid.
pub fn bracket(xs: &[f64], x: f64) -> Option<usize> {
    let n = xs.len();
    if n < 2 || !(x >= xs[0] && x <= xs[n - 1]) {
        return None;
    }
    let i = xs.partition_point(|&g| g <= x);
    Some(i.saturating_sub(1).min(n - 2))
}
