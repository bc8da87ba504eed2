//! Log-linear fit `estimate ≈ ĉ₁ ĉ₀^N`.

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub c0: f64,
    pub c1: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    /// Rows that entered the fit.
    pub used: usize,
}

impl DecayFit {
    pub fn at(&self, n: usize) -> f64 {
        self.c1 * self.c0.powi(n as i32)
    }
}

/// Least squares of `ln estimate` against `N` over the positive rows.
pub fn fit_decay(rows: &[(usize, f64)]) -> Result<DecayFit, CliError> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|(_, y)| *y > 0.0).map(|&(n, y)| (n as f64, y.ln())).collect();
    if pts.len() < 3 {
        return Err(CliError::Fit(format!("needs at least 3 positive rows, got {}", pts.len())));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(CliError::Fit("needs at least two distinct N".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(DecayFit { c0: slope.exp(), c1: intercept.exp(), residual: (sse / k).sqrt(), used: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_geometric() {
        let f = fit_decay(&[(0, 1.0), (1, 0.5), (2, 0.25), (3, 0.125)]).unwrap();
        assert!((f.c0 - 0.5).abs() < 1e-12 && (f.c1 - 1.0).abs() < 1e-12 && f.residual < 1e-12);
    }

    #[test]
    fn constant_rows() {
        let f = fit_decay(&[(1, 0.3), (2, 0.3), (3, 0.3)]).unwrap();
        assert!((f.c0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeros_are_skipped() {
        assert!(fit_decay(&[(0, 1.0), (1, 0.5), (2, 0.0), (3, 0.0)]).is_err());
    }
}
