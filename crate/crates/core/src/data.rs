//! Plain result containers shared by the physics modules and the CLI.

/// A sampled real function of time.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(t.len(), values.len(), "time series lengths differ");
        TimeSeries { t, values }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Largest pointwise difference against a series on the same grid.
    pub fn max_diff(&self, other: &TimeSeries) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A real scalar sampled on a rectangular (x, t) grid; `values[i][j]` is at (x[i], t[j]).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMap {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl FieldMap {
    pub fn max_diff(&self, other: &FieldMap) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Least-squares slope of ln y against ln x.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "fit inputs differ in length");
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// n points spaced evenly in log between a and b inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp()).collect()
}
