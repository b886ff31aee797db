use crate::error::{Error, Result};

/// Finite-difference derivative of order 1 or 2 on a uniform grid.
///
/// Interior points use central differences; the two ends use second-order
/// one-sided stencils, so the series needs at least `order + 2` points.
pub fn finite_diff(values: &[f64], spacing: f64, order: usize) -> Result<Vec<f64>> {
    if !(spacing > 0.0) {
        return Err(Error::invalid(format!(
            "grid spacing must be positive, got {spacing}"
        )));
    }
    let n = values.len();
    match order {
        1 | 2 => {}
        _ => {
            return Err(Error::invalid(format!(
                "derivative order {order} unsupported (1 or 2)"
            )))
        }
    }
    if n < order + 2 {
        return Err(Error::invalid(format!(
            "{n} points are too few for a derivative of order {order}"
        )));
    }
    let v = values;
    let h = spacing;
    let mut out = vec![0.0; n];
    if order == 1 {
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        }
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    } else {
        let h2 = h * h;
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        }
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    }
    Ok(out)
}

/// Spacing of a uniform grid, or an error when the grid is not uniform.
pub fn uniform_spacing(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    for w in grid.windows(2) {
        if !(w[1] > w[0]) || ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::invalid(
                "grid is not uniform and strictly increasing",
            ));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_slope() {
        let v: Vec<f64> = (0..6).map(|i| 3.0 * i as f64 * 0.5 + 1.0).collect();
        for d in finite_diff(&v, 0.5, 1).unwrap() {
            assert!((d - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_curvature() {
        let v: Vec<f64> = (0..7)
            .map(|i| {
                let x = i as f64 * 0.1;
                2.0 * x * x - x
            })
            .collect();
        for d in finite_diff(&v, 0.1, 2).unwrap() {
            assert!((d - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn short_grid_rejected() {
        assert!(finite_diff(&[1.0, 2.0, 3.0], 1.0, 2).is_err());
        assert!(finite_diff(&[1.0, 2.0], 1.0, 1).is_err());
        assert!(finite_diff(&[1.0, 2.0, 3.0], 1.0, 1).is_ok());
    }
}
