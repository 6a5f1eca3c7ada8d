use std::io::Write;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::AnalyticsError;

/// Which lagged-correlation estimator to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AcfForm {
    /// Overall mean and overall variance; accurate when `N ≫ k`.
    #[default]
    Approximate,
    /// Separate means and variances for the leading and lagged segments.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correlogram {
    /// `1..=K`.
    pub lags: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub confidence_bound: f64,
    /// Share of coefficients with `|r_k| <= confidence_bound`.
    pub proportion_within: f64,
    pub sample_size: usize,
}

impl Correlogram {
    pub fn outside(&self) -> usize {
        self.coefficients.iter().filter(|r| r.abs() > self.confidence_bound).count()
    }

    /// `lag,r` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lag", "r"])?;
        for (k, r) in self.lags.iter().zip(&self.coefficients) {
            w.write_record([k.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "N = {}\nlags = 1..{}\nbound = ±{:.4}\nwithin = {:.2}% ({} of {} outside)\n",
            self.sample_size,
            self.lags.len(),
            self.confidence_bound,
            100.0 * self.proportion_within,
            self.outside(),
            self.lags.len()
        )
    }
}

/// `2 / √N`.
pub fn confidence_bound(n: usize) -> Result<f64, AnalyticsError> {
    if n < 1 {
        return Err(AnalyticsError::EmptySeries);
    }
    Ok(2.0 / (n as f64).sqrt())
}

pub fn autocorrelation(series: &[f64], max_lag: usize, form: AcfForm) -> Result<Correlogram, AnalyticsError> {
    let n = series.len();
    if n == 0 {
        return Err(AnalyticsError::EmptySeries);
    }
    if max_lag == 0 || max_lag >= n {
        return Err(AnalyticsError::LagRange { max_lag, n });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let y: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let var: f64 = y.iter().map(|v| v * v).sum();
    if var <= f64::EPSILON * n as f64 * mean.abs().max(1.0) {
        return Err(AnalyticsError::ConstantSeries);
    }
    let acf = lagged_products(&y, max_lag);
    let coefficients: Vec<f64> = match form {
        AcfForm::Approximate => acf[1..].iter().map(|c| c / var).collect(),
        AcfForm::Exact => {
            // prefix sums of y and y² give segment means and variances
            let mut s1 = vec![0.0; n + 1];
            let mut s2 = vec![0.0; n + 1];
            for (i, v) in y.iter().enumerate() {
                s1[i + 1] = s1[i] + v;
                s2[i + 1] = s2[i] + v * v;
            }
            (1..=max_lag)
                .map(|k| {
                    let m = (n - k) as f64;
                    let (sum_a, sq_a) = (s1[n - k], s2[n - k]);
                    let (sum_b, sq_b) = (s1[n] - s1[k], s2[n] - s2[k]);
                    let (ma, mb) = (sum_a / m, sum_b / m);
                    let num = acf[k] - m * ma * mb;
                    let den = ((sq_a - m * ma * ma) * (sq_b - m * mb * mb)).sqrt();
                    if den > 0.0 {
                        num / den
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    let bound = confidence_bound(n)?;
    let within = coefficients.iter().filter(|r| r.abs() <= bound).count();
    Ok(Correlogram {
        lags: (1..=max_lag).collect(),
        proportion_within: within as f64 / max_lag as f64,
        coefficients,
        confidence_bound: bound,
        sample_size: n,
    })
}

/// `Σ_t y_t y_{t+k}` for `k = 0..=max_lag`, via zero-padded FFT.
fn lagged_products(y: &[f64], max_lag: usize) -> Vec<f64> {
    let len = (y.len() + max_lag + 1).next_power_of_two();
    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in &mut buf {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf[..=max_lag].iter().map(|c| c.re / len as f64).collect()
}
