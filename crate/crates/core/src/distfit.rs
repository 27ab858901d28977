//! Distribution-shape identification: Weibull probability-plot correlation,
//! Weibull maximum likelihood, exponential decay of weekday profiles and
//! Tukey HSD comparisons between weekdays.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::calendar::{DailyEventSeries, EventCategory, WeekdaySummary, DAYS_PER_WEEK, WEEKDAY_NAMES};
use crate::error::{Error, Result};
use crate::special::{find_root, studentized_range_upper_tail};

pub const MIN_FIT_SAMPLE: usize = 5;

/// Shape grid used by [`weibull_ppcc`]: 200 log-spaced points on [0.1, 10].
pub fn default_shape_grid() -> Vec<f64> {
    log_grid(0.1, 10.0, 200)
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Filliben's order-statistic medians for a sample of size `n`.
pub fn filliben_positions(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let last = 0.5f64.powf(1.0 / nf);
    (1..=n)
        .map(|i| {
            if i == 1 {
                1.0 - last
            } else if i == n {
                last
            } else {
                (i as f64 - 0.3175) / (nf + 0.365)
            }
        })
        .collect()
}

/// Quantile of a unit-scale Weibull distribution.
pub fn weibull_quantile(p: f64, shape: f64) -> f64 {
    (-(-p).ln_1p()).powf(1.0 / shape)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PpccCurve {
    pub shapes: Vec<f64>,
    pub ppcc: Vec<f64>,
    pub best_shape: f64,
    pub best_ppcc: f64,
}

impl PpccCurve {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["shape", "ppcc"])?;
        for (s, r) in self.shapes.iter().zip(&self.ppcc) {
            w.write_record([format!("{s:.6}"), format!("{r:.8}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_positive_sample(sample: &[f64]) -> Result<()> {
    if sample.len() < MIN_FIT_SAMPLE {
        return Err(Error::InsufficientData {
            what: "distribution fit",
            needed: MIN_FIT_SAMPLE,
            got: sample.len(),
        });
    }
    if let Some(bad) = sample.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "Weibull support is x > 0, found {bad}"
        )));
    }
    if sample.iter().all(|&x| x == sample[0]) {
        return Err(Error::Degenerate("all sample values are equal".into()));
    }
    Ok(())
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    sxy / (sxx * syy).sqrt()
}

/// Probability-plot correlation of the sorted sample against Weibull
/// quantiles, over the default shape grid.
pub fn weibull_ppcc(sample: &[f64]) -> Result<PpccCurve> {
    weibull_ppcc_on_grid(sample, &default_shape_grid())
}

pub fn weibull_ppcc_on_grid(sample: &[f64], shapes: &[f64]) -> Result<PpccCurve> {
    check_positive_sample(sample)?;
    if shapes.is_empty() || shapes.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::Domain("shape grid must be nonempty and positive".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let positions = filliben_positions(sorted.len());

    let ppcc: Vec<f64> = shapes
        .iter()
        .map(|&c| {
            let q: Vec<f64> = positions.iter().map(|&m| weibull_quantile(m, c)).collect();
            pearson(&q, &sorted)
        })
        .collect();
    let mut best = 0;
    for (i, &r) in ppcc.iter().enumerate() {
        if r > ppcc[best] {
            best = i;
        }
    }
    Ok(PpccCurve {
        shapes: shapes.to_vec(),
        best_shape: shapes[best],
        best_ppcc: ppcc[best],
        ppcc,
    })
}

/// (theoretical quantile, ordered observation) pairs for a Weibull
/// probability plot at `shape`.
pub fn weibull_quantile_plot(sample: &[f64], shape: f64) -> Result<Vec<(f64, f64)>> {
    check_positive_sample(sample)?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(filliben_positions(sorted.len())
        .into_iter()
        .map(|m| weibull_quantile(m, shape))
        .zip(sorted)
        .collect())
}

/// Positive entries of a count sequence and the fraction of zero days.
/// Weibull fits run on the positive part only.
pub fn positive_part(counts: &[f64]) -> (Vec<f64>, f64) {
    let positive: Vec<f64> = counts.iter().copied().filter(|&x| x > 0.0).collect();
    let zero_fraction = if counts.is_empty() {
        0.0
    } else {
        (counts.len() - positive.len()) as f64 / counts.len() as f64
    };
    (positive, zero_fraction)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Weibull,
    ExponentialDecay,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub family: FitFamily,
    /// Weibull: `shape`, `scale`. Decay: `amplitude`, `slope` and, when the
    /// profile decays, `relaxation_time`.
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub log_likelihood: Option<f64>,
    pub r_squared: Option<f64>,
    /// Decay fit whose slope is not negative.
    pub non_decaying: bool,
    pub zero_fraction: Option<f64>,
}

impl FitReport {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

/// Sufficient pieces of the Weibull likelihood at shape `c`, computed with
/// the largest log-value factored out.
struct LogSample {
    logs: Vec<f64>,
    max_log: f64,
    mean_log: f64,
}

impl LogSample {
    fn new(sample: &[f64]) -> Self {
        let logs: Vec<f64> = sample.iter().map(|x| x.ln()).collect();
        let max_log = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;
        Self { logs, max_log, mean_log }
    }

    /// (ln Σ x^c, Σ x^c ln x / Σ x^c)
    fn power_sums(&self, c: f64) -> (f64, f64) {
        let (mut s0, mut s1) = (0.0, 0.0);
        for &l in &self.logs {
            let w = (c * (l - self.max_log)).exp();
            s0 += w;
            s1 += w * l;
        }
        (c * self.max_log + s0.ln(), s1 / s0)
    }

    fn n(&self) -> f64 {
        self.logs.len() as f64
    }

    /// Profile equation g(c) = Σx^c ln x / Σx^c − 1/c − mean(ln x); increasing in c.
    fn profile_equation(&self, c: f64) -> f64 {
        self.power_sums(c).1 - 1.0 / c - self.mean_log
    }
}

/// Weibull log-likelihood with the scale eliminated at its conditional
/// optimum λ(c) = (Σ x^c / n)^{1/c}.
pub fn weibull_profile_log_likelihood(sample: &[f64], shape: f64) -> f64 {
    let ls = LogSample::new(sample);
    let n = ls.n();
    let (log_s0, _) = ls.power_sums(shape);
    n * shape.ln() - n * (log_s0 - n.ln()) + (shape - 1.0) * n * ls.mean_log - n
}

/// Analytic derivative of [`weibull_profile_log_likelihood`] in the shape.
pub fn weibull_profile_score(sample: &[f64], shape: f64) -> f64 {
    let ls = LogSample::new(sample);
    -ls.n() * ls.profile_equation(shape)
}

/// Full two-parameter Weibull log-likelihood.
pub fn weibull_log_likelihood(sample: &[f64], shape: f64, scale: f64) -> f64 {
    let n = sample.len() as f64;
    let sum_log: f64 = sample.iter().map(|x| x.ln()).sum();
    let sum_pow: f64 = sample.iter().map(|x| (x / scale).powf(shape)).sum();
    n * shape.ln() - n * shape * scale.ln() + (shape - 1.0) * sum_log - sum_pow
}

pub fn weibull_mle(sample: &[f64]) -> Result<FitReport> {
    check_positive_sample(sample)?;
    let ls = LogSample::new(sample);
    let g = |c: f64| ls.profile_equation(c);

    let (mut lo, mut hi) = (1.0, 1.0);
    let mut steps = 0;
    while g(lo) >= 0.0 {
        lo /= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::Numeric(format!(
                "Weibull MLE: profile equation non-negative down to shape {lo:e} (g = {})",
                g(lo)
            )));
        }
    }
    steps = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::Numeric(format!(
                "Weibull MLE: profile equation non-positive up to shape {hi:e} (g = {})",
                g(hi)
            )));
        }
    }
    let shape = find_root(g, lo, hi, 1e-11)?;
    let (log_s0, _) = ls.power_sums(shape);
    let scale = ((log_s0 - ls.n().ln()) / shape).exp();

    let mut params = BTreeMap::new();
    params.insert("shape".to_string(), shape);
    params.insert("scale".to_string(), scale);
    Ok(FitReport {
        family: FitFamily::Weibull,
        params,
        n: sample.len(),
        log_likelihood: Some(weibull_log_likelihood(sample, shape, scale)),
        r_squared: None,
        non_decaying: false,
        zero_fraction: None,
    })
}

/// Log-linear fit of a weekday profile, ln y_k = a + b k over k = 0..6.
/// Zero cells are left out.
pub fn exp_decay_fit(summary: &WeekdaySummary) -> Result<FitReport> {
    let profile: Vec<f64> = summary.totals.iter().map(|&t| t as f64).collect();
    exp_decay_fit_profile(&profile)
}

pub fn exp_decay_fit_profile(profile: &[f64]) -> Result<FitReport> {
    let points: Vec<(f64, f64)> = profile
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0)
        .map(|(k, &y)| (k as f64, y.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            what: "exponential decay fit (positive cells)",
            needed: 3,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = (syy > 0.0).then(|| (1.0 - rss / syy).min(1.0));

    // Slopes within rounding of zero count as flat.
    let non_decaying = slope >= -1e-12 * (1.0 + my.abs());
    let mut params = BTreeMap::new();
    params.insert("amplitude".to_string(), intercept.exp());
    params.insert("slope".to_string(), slope);
    if !non_decaying {
        params.insert("relaxation_time".to_string(), -1.0 / slope);
    }
    Ok(FitReport {
        family: FitFamily::ExponentialDecay,
        params,
        n: points.len(),
        log_likelihood: None,
        r_squared,
        non_decaying,
        zero_fraction: Some((profile.len() - points.len()) as f64 / profile.len() as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TukeyPair {
    pub first: usize,
    pub second: usize,
    pub label: String,
    /// mean(first) − mean(second)
    pub mean_difference: f64,
    /// Studentized range statistic |Δ| / √(MSW/2 · (1/n_i + 1/n_j)).
    pub q_statistic: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TukeyReport {
    pub group_means: Vec<f64>,
    pub group_sizes: Vec<usize>,
    pub overall_msw: f64,
    pub df_within: usize,
    pub pairs: Vec<TukeyPair>,
}

impl TukeyReport {
    /// mean(j) − mean(k).
    pub fn difference(&self, j: usize, k: usize) -> f64 {
        self.group_means[j] - self.group_means[k]
    }

    pub fn pair(&self, j: usize, k: usize) -> Option<&TukeyPair> {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.pairs.iter().find(|p| p.first == a && p.second == b)
    }
}

/// Tukey HSD (Tukey-Kramer for unequal sizes) over all group pairs of a
/// one-way layout.
pub fn tukey_pairwise(groups: &[Vec<f64>]) -> Result<TukeyReport> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::InsufficientData {
            what: "Tukey comparison (groups)",
            needed: 2,
            got: k,
        });
    }
    if let Some(small) = groups.iter().map(Vec::len).find(|&n| n < 2) {
        return Err(Error::InsufficientData {
            what: "Tukey comparison (group size)",
            needed: 2,
            got: small,
        });
    }
    let group_sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let group_means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let ss_within: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    let total: usize = group_sizes.iter().sum();
    let df_within = total - k;
    let msw = ss_within / df_within as f64;
    if !(msw > 0.0) {
        return Err(Error::Degenerate("zero within-group variance".into()));
    }

    let label = |i: usize| {
        if k == DAYS_PER_WEEK {
            WEEKDAY_NAMES[i].to_string()
        } else {
            format!("g{i}")
        }
    };
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let diff = group_means[i] - group_means[j];
            let se = (0.5 * msw * (1.0 / group_sizes[i] as f64 + 1.0 / group_sizes[j] as f64)).sqrt();
            let q = diff.abs() / se;
            pairs.push(TukeyPair {
                first: i,
                second: j,
                label: format!("{}-{}", label(i), label(j)),
                mean_difference: diff,
                q_statistic: q,
                p_value: studentized_range_upper_tail(q, k, df_within as f64)?,
            });
        }
    }
    Ok(TukeyReport {
        group_means,
        group_sizes,
        overall_msw: msw,
        df_within,
        pairs,
    })
}

/// Daily counts of one category grouped by weekday (Sunday first).
pub fn weekday_groups(series: &DailyEventSeries, category: EventCategory) -> Vec<Vec<f64>> {
    let mut groups = vec![Vec::new(); DAYS_PER_WEEK];
    for (t, c) in series.days().iter().enumerate() {
        groups[series.weekday_at(t)].push(f64::from(c.get(category)));
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filliben_endpoints() {
        let m = filliben_positions(10);
        assert!((m[9] - 0.5f64.powf(0.1)).abs() < 1e-15);
        assert!((m[0] + m[9] - 1.0).abs() < 1e-15);
        assert!((m[4] - (5.0 - 0.3175) / 10.365).abs() < 1e-15);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_shape() {
        let g = default_shape_grid();
        assert_eq!(g.len(), 200);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[199] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn ppcc_perfect_fit_peaks_at_true_shape() {
        let grid = default_shape_grid();
        let c0 = grid[120];
        let sample: Vec<f64> = filliben_positions(50)
            .into_iter()
            .map(|m| weibull_quantile(m, c0))
            .collect();
        let curve = weibull_ppcc(&sample).unwrap();
        assert_eq!(curve.best_shape, c0);
        assert!(curve.ppcc.iter().all(|r| r.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn fit_input_errors() {
        assert!(matches!(weibull_ppcc(&[1.0, 2.0, 0.0, 3.0, 4.0]), Err(Error::Domain(_))));
        assert!(matches!(weibull_ppcc(&[2.0; 8]), Err(Error::Degenerate(_))));
        assert!(matches!(weibull_mle(&[1.0; 10]), Err(Error::Degenerate(_))));
        assert!(matches!(weibull_mle(&[1.0, 2.0]), Err(Error::InsufficientData { .. })));
        assert!(matches!(weibull_mle(&[1.0, 2.0, -1.0, 3.0, 4.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn noiseless_decay() {
        for tau in [3.460, 2.545] {
            let profile: Vec<f64> = (0..7).map(|k| 100.0 * (-(k as f64) / tau).exp()).collect();
            let fit = exp_decay_fit_profile(&profile).unwrap();
            assert!((fit.param("relaxation_time").unwrap() - tau).abs() < 1e-9);
            assert!((fit.r_squared.unwrap() - 1.0).abs() < 1e-12);
            assert!((fit.param("amplitude").unwrap() - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rounded_decay_counts() {
        let profile: Vec<f64> = (0..7)
            .map(|k| (100.0 * (-(k as f64) / 3.460).exp()).round())
            .collect();
        let fit = exp_decay_fit_profile(&profile).unwrap();
        let tau = fit.param("relaxation_time").unwrap();
        assert!((3.29..=3.63).contains(&tau), "{tau}");
        assert!(fit.r_squared.unwrap() >= 0.99);
    }

    #[test]
    fn flat_profile_is_non_decaying() {
        let fit = exp_decay_fit_profile(&[12.0; 7]).unwrap();
        assert!(fit.non_decaying);
        assert_eq!(fit.param("relaxation_time"), None);
        assert!(matches!(
            exp_decay_fit_profile(&[5.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn tukey_structure() {
        let groups: Vec<Vec<f64>> = (0..7)
            .map(|g| (0..10).map(|i| (g * 3 + i % 4) as f64).collect())
            .collect();
        let r = tukey_pairwise(&groups).unwrap();
        assert_eq!(r.pairs.len(), 21);
        assert_eq!(r.df_within, 63);
        for j in 0..7 {
            for k in 0..7 {
                assert_eq!(r.difference(j, k), -r.difference(k, j));
            }
        }
        assert!(r.pairs.iter().all(|p| (0.0..=1.0).contains(&p.p_value)));
        assert_eq!(r.pairs[0].label, "Sun-Mon");
    }

    #[test]
    fn tukey_rejects_tiny_groups() {
        let mut groups = vec![vec![1.0, 2.0]; 7];
        groups[3] = vec![1.0];
        assert!(matches!(tukey_pairwise(&groups), Err(Error::InsufficientData { .. })));
        assert!(matches!(tukey_pairwise(&[vec![1.0, 1.0], vec![2.0, 2.0]]), Err(Error::Degenerate(_))));
    }
}
