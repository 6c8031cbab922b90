//! Summary statistics and their JSON form.

use serde::Serialize;

/// Linear-interpolation quantile of a sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quartiles(values: &[f64]) -> Quartiles {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Quartiles {
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    pub seconds: f64,
    pub final_rel_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub rho: Option<f64>,
    pub lambda_min_eh: Option<f64>,
    pub trace_a: f64,
    pub lambda_min_a: f64,
    pub lambda_max_a: f64,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinationSummary {
    pub solver: String,
    pub sketch: Option<String>,
    pub schedule: Option<String>,
    pub tau: Option<usize>,
    pub runs: Vec<RunSummary>,
    pub iterations: Quartiles,
    pub seconds: Quartiles,
    pub converged_fraction: f64,
    pub certificate: Option<CertificateSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub config: crate::config::BenchConfig,
    pub m: usize,
    pub route: String,
    pub tau: usize,
    pub setup_seconds: f64,
    pub combinations: Vec<CombinationSummary>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate_linearly() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.25), 1.75);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);

        let q = quartiles(&[5.0, 1.0, 3.0]);
        assert_eq!(q.median, 3.0);
        assert_eq!(q.q1, 2.0);
        assert_eq!(q.q3, 4.0);
    }
}
