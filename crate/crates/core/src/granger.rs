//! Pairwise Granger causality between daily event series.
//!
//! Both regressions include an intercept and share the effective sample
//! t = lags..n−1, so the restricted and unrestricted fits are nested.

use std::io::Write;

use serde::Serialize;

use crate::calendar::{DailyEventSeries, EventCategory};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};
use crate::regression::ols;
use crate::special::{chi2_upper_tail, f_upper_tail};

/// Heteroskedasticity-consistent (HC1) Wald test of the joint restriction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustWald {
    pub stat: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrangerReport {
    pub cause: Option<EventCategory>,
    pub effect: Option<EventCategory>,
    pub lags: usize,
    pub f_stat: f64,
    pub p_value: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub n_restricted: usize,
    pub n_unrestricted: usize,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub robust_wald: Option<RobustWald>,
}

impl GrangerReport {
    /// `effect = f(cause)`, e.g. `N_a = f(N_r)`.
    pub fn direction_label(&self) -> String {
        match (self.effect, self.cause) {
            (Some(e), Some(c)) => format!("{} = f({})", symbol(e), symbol(c)),
            _ => "y = f(x)".to_string(),
        }
    }

    /// `***` when significant at 10% but not at 5%; `**` at 5%.
    pub fn stars(&self) -> &'static str {
        significance_stars(self.p_value)
    }
}

/// Short symbol of a category, e.g. `N_a`.
pub fn symbol(category: EventCategory) -> &'static str {
    match category {
        EventCategory::Submitted => "N_s",
        EventCategory::Accepted => "N_a",
        EventCategory::Rejected => "N_r",
        EventCategory::DeskRejected => "N_dr",
        EventCategory::Withdrawn => "N_w",
    }
}

/// `**` for p < 0.05; `***` flags significance at 10% but not 5%.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "***"
    } else {
        ""
    }
}

fn lagged_design(effect: &[f64], cause: Option<&[f64]>, lags: usize) -> Matrix {
    let n = effect.len();
    let rows = n - lags;
    let cols = 1 + lags + cause.map_or(0, |_| lags);
    let mut x = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let t = r + lags;
        x[(r, 0)] = 1.0;
        for j in 1..=lags {
            x[(r, j)] = effect[t - j];
            if let Some(c) = cause {
                x[(r, lags + j)] = c[t - j];
            }
        }
    }
    x
}

/// Does `cause` Granger-cause `effect` at order `lags`?
pub fn granger_test(effect: &[f64], cause: &[f64], lags: usize) -> Result<GrangerReport> {
    if lags == 0 {
        return Err(Error::Contract("Granger test needs lags >= 1".into()));
    }
    if effect.len() != cause.len() {
        return Err(Error::Shape(format!(
            "series lengths differ: {} vs {}",
            effect.len(),
            cause.len()
        )));
    }
    let n = effect.len();
    let needed = 3 * lags + 6;
    if n < needed {
        return Err(Error::InsufficientData {
            what: "Granger test",
            needed,
            got: n,
        });
    }

    let y = &effect[lags..];
    let restricted = ols(&lagged_design(effect, None, lags), y)?;
    let xu = lagged_design(effect, Some(cause), lags);
    let unrestricted = ols(&xu, y)?;

    let n_eff = n - lags;
    let df_den = n_eff - 2 * lags - 1;
    let rss_r = restricted.rss;
    let rss_u = unrestricted.rss;
    let f_stat = (((rss_r - rss_u) / lags as f64) / (rss_u / df_den as f64)).max(0.0);
    if !f_stat.is_finite() {
        return Err(Error::Numeric(format!(
            "Granger F undefined (rss_r={rss_r}, rss_u={rss_u})"
        )));
    }

    Ok(GrangerReport {
        cause: None,
        effect: None,
        lags,
        f_stat,
        p_value: f_upper_tail(f_stat, lags as f64, df_den as f64),
        df_num: lags,
        df_den,
        n_restricted: n_eff,
        n_unrestricted: n_eff,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        robust_wald: hc1_wald(&xu, &unrestricted.beta, &unrestricted.residuals, lags),
    })
}

/// HC1 Wald statistic for β_{lags+1..2·lags} = 0; `None` if the robust
/// covariance block is singular.
fn hc1_wald(x: &Matrix, beta: &[f64], resid: &[f64], lags: usize) -> Option<RobustWald> {
    let (n, k) = (x.rows(), x.cols());
    let bread = Qr::new(x).ok()?.gram_inverse();
    // meat = Σ e_t² x_t x_tᵀ
    let mut meat = Matrix::zeros(k, k);
    for t in 0..n {
        let row = x.row(t);
        let e2 = resid[t] * resid[t];
        for i in 0..k {
            for j in 0..k {
                meat[(i, j)] += e2 * row[i] * row[j];
            }
        }
    }
    let scale = n as f64 / (n - k) as f64;
    let idx: Vec<usize> = (1 + lags..1 + 2 * lags).collect();
    // V_sub = scale · (bread · meat · bread)[idx, idx]
    let mut bm = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            bm[(i, j)] = (0..k).map(|l| bread[(i, l)] * meat[(l, j)]).sum();
        }
    }
    let m = idx.len();
    let mut v = vec![vec![0.0; m]; m];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            v[a][b] = scale * (0..k).map(|l| bm[(i, l)] * bread[(l, j)]).sum::<f64>();
        }
    }
    let rb: Vec<f64> = idx.iter().map(|&i| beta[i]).collect();
    let w = solve_spd(v, &rb)?;
    let stat: f64 = rb.iter().zip(&w).map(|(a, b)| a * b).sum();
    (stat.is_finite() && stat >= 0.0).then(|| RobustWald {
        stat,
        p: chi2_upper_tail(stat, lags as f64),
    })
}

/// Cholesky solve of a symmetric positive-definite system.
fn solve_spd(mut a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= a[i][k] * z[k];
        }
        z[i] /= a[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            z[i] -= a[k][i] * z[k];
        }
        z[i] /= a[i][i];
    }
    Some(z)
}

/// The six directed pairs among submitted, accepted and rejected counts.
pub const TABLE_PAIRS: [(EventCategory, EventCategory); 6] = [
    (EventCategory::Submitted, EventCategory::Accepted),
    (EventCategory::Accepted, EventCategory::Submitted),
    (EventCategory::Submitted, EventCategory::Rejected),
    (EventCategory::Rejected, EventCategory::Submitted),
    (EventCategory::Accepted, EventCategory::Rejected),
    (EventCategory::Rejected, EventCategory::Accepted),
];

/// Granger tests for every (effect, cause) pair of [`TABLE_PAIRS`].
pub fn granger_table(series: &DailyEventSeries, lags: usize) -> Result<Vec<GrangerReport>> {
    TABLE_PAIRS
        .iter()
        .map(|&(effect, cause)| {
            let mut r = granger_test(&series.values(effect), &series.values(cause), lags)?;
            r.effect = Some(effect);
            r.cause = Some(cause);
            Ok(r)
        })
        .collect()
}

pub fn write_table_csv<W: Write>(reports: &[GrangerReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "direction", "effect", "cause", "lags", "f_stat", "p_value", "stars", "df_num", "df_den",
        "n_restricted", "n_unrestricted", "robust_wald", "robust_p",
    ])?;
    for r in reports {
        let (rw, rp) = r
            .robust_wald
            .map_or((String::new(), String::new()), |w| (format!("{:.4}", w.stat), format!("{:.4}", w.p)));
        w.write_record([
            r.direction_label(),
            r.effect.map(|c| c.to_string()).unwrap_or_default(),
            r.cause.map(|c| c.to_string()).unwrap_or_default(),
            r.lags.to_string(),
            format!("{:.4}", r.f_stat),
            format!("{:.4}", r.p_value),
            r.stars().to_string(),
            r.df_num.to_string(),
            r.df_den.to_string(),
            r.n_restricted.to_string(),
            r.n_unrestricted.to_string(),
            rw,
            rp,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lags_is_contract_error() {
        let v = vec![0.0; 100];
        assert!(matches!(granger_test(&v, &v, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn short_series_rejected() {
        let v: Vec<f64> = (0..20).map(|t| t as f64).collect();
        assert!(matches!(granger_test(&v, &v, 7), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn identical_series_singular() {
        let v: Vec<f64> = (0..200).map(|t| ((t * 7919) % 13) as f64).collect();
        assert!(matches!(granger_test(&v, &v, 3), Err(Error::Singular { .. })));
    }

    #[test]
    fn degrees_of_freedom() {
        let y: Vec<f64> = (0..730).map(|t| ((t * 31) % 17) as f64).collect();
        let x: Vec<f64> = (0..730).map(|t| ((t * 7) % 11) as f64).collect();
        let r = granger_test(&y, &x, 7).unwrap();
        assert_eq!(r.n_unrestricted, 723);
        assert_eq!(r.df_den, 708);
        assert_eq!(r.df_num, 7);
        assert!(r.rss_restricted >= r.rss_unrestricted - 1e-9);
    }

    #[test]
    fn star_rendering() {
        let r = GrangerReport {
            cause: Some(EventCategory::Rejected),
            effect: Some(EventCategory::Accepted),
            lags: 7,
            f_stat: 1.8717,
            p_value: 0.0714,
            df_num: 7,
            df_den: 708,
            n_restricted: 723,
            n_unrestricted: 723,
            rss_restricted: 0.0,
            rss_unrestricted: 0.0,
            robust_wald: None,
        };
        assert_eq!(r.direction_label(), "N_a = f(N_r)");
        assert_eq!(r.stars(), "***");
        let mut out = Vec::new();
        write_table_csv(&[r], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("N_a = f(N_r),accepted,rejected,7,1.8717,0.0714,***"), "{text}");
    }
}
