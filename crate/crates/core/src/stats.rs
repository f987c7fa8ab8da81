use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact two-point fit).
    pub slope_stderr: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub points: usize,
}

/// Least-squares fit; needs at least `min_points` distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64], min_points: usize) -> Result<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < min_points.max(2) {
        return Err(Error::FitDegenerate(format!(
            "{n} points, need at least {}",
            min_points.max(2)
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * xs.iter().map(|x| x * x).sum::<f64>() {
        return Err(Error::FitDegenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        rms_residual: (ss_res / nf).sqrt(),
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = linear_fit(&xs, &ys, 3).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            linear_fit(&[1.0, 2.0], &[1.0, 2.0], 3),
            Err(Error::FitDegenerate(_))
        ));
    }

    #[test]
    fn stderr_of_noisy_fit() {
        // Residuals +-1 alternating about y = x: slope 1 is not exact but close.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 0.0, 3.0, 2.0, 5.0, 4.0];
        let fit = linear_fit(&xs, &ys, 3).unwrap();
        assert!(fit.slope_stderr > 0.0);
        assert!((fit.slope - 0.8285714285714286).abs() < 1e-12);
    }
}
