//! Day-of-week dummy regressions.
//!
//! The strong model regresses the deviation of the daily count from one
//! reference weekday's mean on all seven weekday indicators, without an
//! intercept. Repeating this for every reference day yields an
//! antisymmetric 7×7 coefficient matrix whose entry (k, j) equals
//! mean_j − mean_k. The weak model tests a single weekday dummy against an
//! intercept.

use std::io::Write;

use serde::Serialize;

use crate::calendar::{
    weekday_totals, DailyEventSeries, EventCategory, DAYS_PER_WEEK, WEEKDAY_NAMES,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};
use crate::special::t_two_sided;

/// Weekday indicator matrix: entry (t, k) is 1 iff day t falls on weekday k.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    weekdays: Vec<usize>,
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.weekdays.len()
    }

    pub fn cols(&self) -> usize {
        DAYS_PER_WEEK
    }

    pub fn get(&self, t: usize, k: usize) -> f64 {
        if self.weekdays[t] == k {
            1.0
        } else {
            0.0
        }
    }

    pub fn weekday(&self, t: usize) -> usize {
        self.weekdays[t]
    }

    pub fn column_sums(&self) -> [usize; DAYS_PER_WEEK] {
        let mut sums = [0; DAYS_PER_WEEK];
        for &k in &self.weekdays {
            sums[k] += 1;
        }
        sums
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows(), DAYS_PER_WEEK);
        for (t, &k) in self.weekdays.iter().enumerate() {
            m[(t, k)] = 1.0;
        }
        m
    }
}

pub fn build_design(series: &DailyEventSeries) -> DesignMatrix {
    DesignMatrix {
        weekdays: (0..series.len()).map(|t| series.weekday_at(t)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OlsResult {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// rss / (rows − cols)
    pub sigma2: f64,
    /// sigma2 · (XᵀX)⁻¹, row-major.
    pub covariance: Vec<Vec<f64>>,
    pub rows: usize,
    pub cols: usize,
}

impl OlsResult {
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.cols).map(|i| self.covariance[i][i].sqrt()).collect()
    }
}

/// Ordinary least squares via Householder QR.
pub fn ols(x: &Matrix, y: &[f64]) -> Result<OlsResult> {
    let (rows, cols) = (x.rows(), x.cols());
    if y.len() != rows {
        return Err(Error::Shape(format!("{rows} design rows but {} responses", y.len())));
    }
    if rows < cols {
        return Err(Error::Shape(format!("{rows} rows < {cols} columns")));
    }
    let qr = Qr::new(x)?;
    let beta = qr.solve_least_squares(y);
    let fitted = x.mul_vec(&beta);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = rows - cols;
    let sigma2 = if dof > 0 { rss / dof as f64 } else { f64::NAN };
    let gram_inv = qr.gram_inverse();
    let covariance = (0..cols)
        .map(|i| (0..cols).map(|j| sigma2 * gram_inv[(i, j)]).collect())
        .collect();
    Ok(OlsResult {
        beta,
        residuals,
        rss,
        sigma2,
        covariance,
        rows,
        cols,
    })
}

/// Strong-model coefficients. Row k is the reference day whose mean is
/// subtracted, column j the regressor day.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaMatrix {
    pub category: Option<EventCategory>,
    pub values: [[f64; DAYS_PER_WEEK]; DAYS_PER_WEEK],
}

impl BetaMatrix {
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k][j]
    }

    /// Largest |values[k][k]|.
    pub fn max_diagonal(&self) -> f64 {
        (0..DAYS_PER_WEEK).map(|k| self.values[k][k].abs()).fold(0.0, f64::max)
    }

    /// Largest |values[k][j] + values[j][k]|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..DAYS_PER_WEEK {
            for j in 0..DAYS_PER_WEEK {
                worst = worst.max((self.values[k][j] + self.values[j][k]).abs());
            }
        }
        worst
    }

    /// Column of the largest entry in row `k`.
    pub fn row_argmax(&self, k: usize) -> usize {
        let row = &self.values[k];
        let mut best = 0;
        for j in 1..DAYS_PER_WEEK {
            if row[j] > row[best] {
                best = j;
            }
        }
        best
    }

    /// Table layout: header `k,Sun,...,Sat`, one row per reference day,
    /// four decimals.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["k".to_string()];
        header.extend(WEEKDAY_NAMES.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for (k, row) in self.values.iter().enumerate() {
            let mut rec = vec![k.to_string()];
            rec.extend(row.iter().map(|v| format_4dp(*v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Four-decimal rendering; tiny negative values keep their sign (`-0.0000`).
pub fn format_4dp(v: f64) -> String {
    format!("{v:.4}")
}

/// Strong model for one category: seven no-intercept dummy regressions, one
/// per reference weekday.
pub fn strong_model(series: &DailyEventSeries, category: EventCategory) -> Result<BetaMatrix> {
    let summary = weekday_totals(series, category)?;
    if let Some(k) = summary.occurrences.iter().position(|&o| o == 0) {
        return Err(Error::Singular {
            dependent_columns: vec![k],
        });
    }
    let weekdays: Vec<usize> = (0..series.len()).map(|t| series.weekday_at(t)).collect();
    let mut beta = strong_model_values(&series.values(category), &weekdays)?;
    beta.category = Some(category);
    Ok(beta)
}

/// Strong model on a real-valued daily sequence with known weekday labels.
pub fn strong_model_values(values: &[f64], weekdays: &[usize]) -> Result<BetaMatrix> {
    if values.len() != weekdays.len() {
        return Err(Error::Shape(format!(
            "{} values but {} weekday labels",
            values.len(),
            weekdays.len()
        )));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("strong model on empty window"));
    }
    let x = DesignMatrix {
        weekdays: weekdays.to_vec(),
    }
    .to_matrix();
    let qr = Qr::new(&x)?;
    // Reference-day means <Y>_k, the shift subtracted in row k.
    let mut sums = [0.0; DAYS_PER_WEEK];
    let mut counts = [0usize; DAYS_PER_WEEK];
    for (&v, &k) in values.iter().zip(weekdays) {
        sums[k] += v;
        counts[k] += 1;
    }
    let mut values_out = [[0.0; DAYS_PER_WEEK]; DAYS_PER_WEEK];
    for (k, row) in values_out.iter_mut().enumerate() {
        let mean_k = sums[k] / counts[k] as f64;
        let shifted: Vec<f64> = values.iter().map(|v| v - mean_k).collect();
        row.copy_from_slice(&qr.solve_least_squares(&shifted));
    }
    Ok(BetaMatrix {
        category: None,
        values: values_out,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakModelResult {
    pub day: usize,
    pub alpha0: f64,
    pub alpha1: f64,
    pub std_err_alpha1: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub rss: f64,
    pub df: usize,
}

/// y_t = α₀ + α₁·[day t is `day`] + e_t.
pub fn weak_model_values(y: &[f64], weekdays: &[usize], day: usize) -> Result<WeakModelResult> {
    if day >= DAYS_PER_WEEK {
        return Err(Error::Validation(format!("weekday index {day} out of range")));
    }
    let intercept = vec![1.0; y.len()];
    let dummy: Vec<f64> = weekdays.iter().map(|&k| f64::from(u8::from(k == day))).collect();
    let x = Matrix::from_columns(&[intercept, dummy])?;
    let fit = ols(&x, y)?;
    let df = fit.rows - fit.cols;
    let se = fit.covariance[1][1].sqrt();
    let alpha1 = fit.beta[1];
    let (t_stat, p_value) = if se > 0.0 {
        let t = alpha1 / se;
        (t, t_two_sided(t, df as f64))
    } else if alpha1 == 0.0 {
        (0.0, 1.0)
    } else {
        (f64::INFINITY.copysign(alpha1), 0.0)
    };
    Ok(WeakModelResult {
        day,
        alpha0: fit.beta[0],
        alpha1,
        std_err_alpha1: se,
        t_stat,
        p_value,
        rss: fit.rss,
        df,
    })
}

pub fn weak_model(series: &DailyEventSeries, category: EventCategory, day: usize) -> Result<WeakModelResult> {
    let weekdays: Vec<usize> = (0..series.len()).map(|t| series.weekday_at(t)).collect();
    weak_model_values(&series.values(category), &weekdays, day)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n − 1.
    Sample,
}

pub fn variance(values: &[f64], convention: VarianceConvention) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "variance",
            needed: 2,
            got: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(match convention {
        VarianceConvention::Population => ss / n as f64,
        VarianceConvention::Sample => ss / (n - 1) as f64,
    })
}

/// Variance of a category's daily counts over `[from, to]`.
pub fn interval_variance(
    series: &DailyEventSeries,
    category: EventCategory,
    from: chrono::NaiveDate,
    to: chrono::NaiveDate,
    convention: VarianceConvention,
) -> Result<f64> {
    let window = series.slice_window(from, to)?;
    variance(&window.values(category), convention)
}
