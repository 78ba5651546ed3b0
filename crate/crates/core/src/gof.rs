//! Goodness-of-fit statistics for comparing empirical histograms and
//! samples against analytic distributions.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::sim::Histogram;

/// Pearson χ² test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2Report {
    pub stat: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Cells actually compared after merging low-expectation bins.
    pub n_cells: usize,
}

/// Pearson χ² of a histogram against analytic per-bin masses.
///
/// `masses[i]` is the model probability of bin i; the residual mass
/// 1 - Σ masses is paired with the histogram's out-of-range count as
/// one extra cell. Adjacent cells are merged until every expected
/// count reaches 5 (the usual validity rule), and the degrees of
/// freedom are the merged cell count minus one.
pub fn chi_square_gof(hist: &Histogram, masses: &[f64]) -> Result<Chi2Report> {
    if masses.len() != hist.counts().len() {
        return Err(Error::Invalid {
            field: "masses",
            reason: "length must match the histogram bin count",
            value: masses.len() as f64,
        });
    }
    let n = hist.n_total() as f64;
    if n < 1.0 {
        return Err(Error::Invalid { field: "hist", reason: "must hold samples", value: n });
    }
    let in_range: f64 = masses.iter().sum();
    let outside = (1.0 - in_range).max(0.0);

    let mut cells: Vec<(f64, f64)> = hist
        .counts()
        .iter()
        .zip(masses)
        .map(|(&c, &m)| (c as f64, m * n))
        .collect();
    cells.push((hist.n_overflow() as f64, outside * n));

    // Merge forward until each cell expects at least 5 counts; fold a
    // trailing light cell into its neighbor.
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(cells.len());
    let mut acc = (0.0, 0.0);
    for (obs, exp) in cells {
        acc.0 += obs;
        acc.1 += exp;
        if acc.1 >= 5.0 {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }
    if merged.len() < 2 {
        return Err(Error::Invalid {
            field: "masses",
            reason: "fewer than two usable cells after merging",
            value: merged.len() as f64,
        });
    }

    let stat: f64 = merged.iter().map(|&(obs, exp)| (obs - exp) * (obs - exp) / exp).sum();
    let dof = merged.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|c| c.sf(stat))
        .unwrap_or(f64::NAN);
    Ok(Chi2Report { stat, dof, p_value, n_cells: merged.len() })
}

/// Kolmogorov–Smirnov test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Survival function of the Kolmogorov distribution; the theta-series
/// form below λ ≈ 1.18 avoids the slow alternating series there.
fn kolmogorov_sf(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let t = (-PI * PI / (8.0 * lambda * lambda)).exp();
        let cdf = (2.0 * PI).sqrt() / lambda * (t + t.powi(9) + t.powi(25) + t.powi(49));
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let sign = if j % 2 == 1 { 2.0 } else { -2.0 };
            let term = sign * (-2.0 * jf * jf * lambda * lambda).exp();
            sum += term;
            if term.abs() < 1e-16 {
                break;
            }
        }
        sum.clamp(0.0, 1.0)
    }
}

/// One-sample KS test of `samples` against the CDF `cdf`, with the
/// Stephens small-sample correction on the asymptotic Kolmogorov
/// distribution.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsReport> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::Invalid { field: "samples", reason: "must be non-empty", value: 0.0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let lambda = (nf.sqrt() + 0.12 + 0.11 / nf.sqrt()) * d;
    Ok(KsReport { statistic: d, p_value: kolmogorov_sf(lambda), n })
}

/// Sample summary with standard errors for the mean and the standard
/// deviation (the latter by the fourth-moment delta method, valid for
/// non-Gaussian data).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub se_mean: f64,
    pub se_std: f64,
}

pub fn sample_stats(data: &[f64]) -> Result<SampleStats> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Invalid {
            field: "data",
            reason: "need at least two samples",
            value: n as f64,
        });
    }
    let nf = n as f64;
    let mean = data.iter().sum::<f64>() / nf;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in data {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= nf;
    m4 /= nf;
    let var = m2 * nf / (nf - 1.0);
    let std = var.sqrt();
    let se_mean = std / nf.sqrt();
    let se_std = if m2 > 0.0 { ((m4 - m2 * m2) / (4.0 * m2 * nf)).max(0.0).sqrt() } else { 0.0 };
    Ok(SampleStats { n, mean, std, se_mean, se_std })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{BinSpec, Histogram};
    use approx::assert_relative_eq;

    fn hist_from(samples: &[f64], spec: &BinSpec) -> Histogram {
        let mut h = Histogram::new(spec).unwrap();
        for &s in samples {
            h.record(s);
        }
        h
    }

    #[test]
    fn chi2_uniform_counts_reference() {
        // Counts 28/31/40/35 against equal probabilities: stat and
        // p-value cross-checked against scipy.stats.chisquare.
        let spec = BinSpec { start: 0.0, width: 1.0, count: 4 };
        let mut samples = Vec::new();
        for (i, &c) in [28u32, 31, 40, 35].iter().enumerate() {
            samples.extend(std::iter::repeat_n(i as f64 + 0.5, c as usize));
        }
        let h = hist_from(&samples, &spec);
        let r = chi_square_gof(&h, &[0.25; 4]).unwrap();
        assert_relative_eq!(r.stat, 2.417910447761194, max_relative = 1e-12);
        assert_eq!(r.dof, 3);
        assert_relative_eq!(r.p_value, 0.49030930696538823, max_relative = 1e-9);
    }

    #[test]
    fn chi2_rejects_mismatched_masses() {
        let spec = BinSpec { start: 0.0, width: 1.0, count: 4 };
        let h = hist_from(&[0.5, 1.5], &spec);
        assert!(chi_square_gof(&h, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn chi2_merges_light_bins() {
        let spec = BinSpec { start: 0.0, width: 1.0, count: 3 };
        let mut samples = vec![0.5; 50];
        samples.extend(vec![1.5; 50]);
        let h = hist_from(&samples, &spec);
        // Last bin and the outside cell expect ~0 counts each; they
        // must be folded rather than dividing by ~0.
        let r = chi_square_gof(&h, &[0.499, 0.499, 0.001]).unwrap();
        assert!(r.p_value.is_finite());
        assert!(r.n_cells <= 3);
    }

    #[test]
    fn ks_detects_match_and_mismatch() {
        // Deterministic uniform grid vs the uniform CDF: tiny D.
        let samples: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_test(&samples, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic < 1e-3);
        assert!(r.p_value > 0.999);
        // Same samples against a wrong CDF: decisive rejection.
        let r = ks_test(&samples, |x| (x * x).clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn sample_stats_on_known_data() {
        let data = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let s = sample_stats(&data).unwrap();
        assert_relative_eq!(s.mean, 5.0, max_relative = 1e-15);
        assert_relative_eq!(s.std * s.std, 32.0 / 7.0, max_relative = 1e-14);
        assert!(s.se_mean > 0.0 && s.se_std > 0.0);
        assert!(sample_stats(&[1.0]).is_err());
    }
}
