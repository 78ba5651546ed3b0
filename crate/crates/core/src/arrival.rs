//! Exact and asymptotic first-passage maps from the latent Gaussian
//! variable ξ to the arrival time at the detector, their inverse, and
//! the analytic position/arrival densities.
//!
//! The position outcome at time t is X_t = x_c(t) + ξ·σ(t) with ξ a
//! standard normal variable; the arrival time T_x is the first t with
//! X_t = x, which pins ξ ≤ x/σ and gives a closed-form strictly
//! decreasing map T(ξ). Arrival statistics are conditional on
//! ξ ≤ x/σ, with normalization Φ(x/σ).

use crate::error::{Error, Result};
use crate::math::{std_normal_cdf_c, std_normal_pdf};
use crate::model::{derive_scales, DerivedScales, PhysicalParams};

/// Immutable arrival-time distribution for one parameter set.
///
/// Shareable across threads; every method is pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToaDistribution {
    params: PhysicalParams,
    scales: DerivedScales,
    /// Domain edge x/σ: realizations with ξ beyond it start below the
    /// detector and carry no arrival time.
    xi_max: f64,
    /// Normalization Φ(x/σ) of the conditioned ξ law.
    norm: f64,
    /// (β/2)², the constant term inside the map's inner square root.
    c2: f64,
}

impl ToaDistribution {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        let scales = derive_scales(&params)?;
        let xi_max = params.x / params.sigma;
        // 1 - Φc rather than Φ(xi_max) directly, so that the CDF below
        // saturates at exactly 1.
        let norm = 1.0 - std_normal_cdf_c(xi_max);
        let half_beta = 0.5 * scales.beta;
        Ok(Self { params, scales, xi_max, norm, c2: half_beta * half_beta })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn scales(&self) -> &DerivedScales {
        &self.scales
    }

    /// Upper edge x/σ of the ξ domain.
    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    /// Normalization constant Φ(x/σ) ∈ (1/2, 1].
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Classical path x_c(t) = g t²/2, measured downward from release.
    pub fn position_mean(&self, t: f64) -> f64 {
        0.5 * self.params.g * t * t
    }

    /// Packet spread σ(t) = σ√(1 + t²/τ²).
    pub fn position_sigma(&self, t: f64) -> f64 {
        let rt = t / self.scales.tau;
        self.params.sigma * (1.0 + rt * rt).sqrt()
    }

    /// Gaussian position density at height `xpt` and time `t`.
    pub fn position_pdf(&self, xpt: f64, t: f64) -> f64 {
        let s = self.position_sigma(t);
        let z = (xpt - self.position_mean(t)) / s;
        std_normal_pdf(z) / s
    }

    /// P(X_t ≤ xpt) for the unconditioned position outcome.
    pub fn position_cdf(&self, xpt: f64, t: f64) -> f64 {
        let s = self.position_sigma(t);
        let z = (xpt - self.position_mean(t)) / s;
        1.0 - std_normal_cdf_c(z)
    }

    fn inner_sqrt(&self, u: f64) -> f64 {
        (1.0 + u * u + self.c2).sqrt()
    }

    /// Radicand of the arrival-time map, evaluated in a form that
    /// keeps relative accuracy across the whole domain.
    ///
    /// For ξ ≤ 0 every term is positive. For ξ > 0 the naive
    /// 1 + 2u² - 2uS loses all digits near the zero at ξ = x/σ, so the
    /// numerator is rationalized: (1+2u²)² - 4u²S² = 1 - (σξ/x)²
    /// exactly, giving R = (1-s)(1+s)/(1 + 2u² + 2uS) with s = ξ/(x/σ).
    fn radicand(&self, xi: f64) -> f64 {
        let u = self.scales.q * xi;
        let s_inner = self.inner_sqrt(u);
        if xi <= 0.0 {
            1.0 + 2.0 * u * u + 2.0 * u.abs() * s_inner
        } else {
            let s = xi / self.xi_max;
            (1.0 - s) * (1.0 + s) / (1.0 + 2.0 * u * u + 2.0 * u * s_inner)
        }
    }

    fn check_domain(&self, xi: f64) -> Result<()> {
        if xi > self.xi_max || xi.is_nan() {
            return Err(Error::XiOutOfDomain { xi, xi_max: self.xi_max });
        }
        Ok(())
    }

    /// Exact arrival time T(ξ) = t_c·√(1 + 2q²ξ² - 2qξ√(1 + q²ξ² + β²/4)).
    ///
    /// Strictly decreasing from +∞ down to 0 on ξ ∈ (-∞, x/σ];
    /// T(0) = t_c and T(x/σ) = 0 exactly.
    pub fn toa_map(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        Ok(self.scales.t_c * self.radicand(xi).sqrt())
    }

    /// T(ξ) - t_c without cancellation, for accurate small-deviation
    /// statistics deep in the semiclassical regime.
    pub fn toa_map_delta(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        let u = self.scales.q * xi;
        let s_inner = self.inner_sqrt(u);
        let r_minus_1 = if xi <= 0.0 {
            2.0 * u * u + 2.0 * u.abs() * s_inner
        } else {
            let s = xi / self.xi_max;
            let den = 1.0 + 2.0 * u * u + 2.0 * u * s_inner;
            -(s * s + 2.0 * u * u + 2.0 * u * s_inner) / den
        };
        Ok(self.scales.t_c * r_minus_1 / ((1.0 + r_minus_1).max(0.0).sqrt() + 1.0))
    }

    /// Far-field approximation T ≈ t_c(√(1+q²ξ²) - qξ), valid for
    /// σ/x ≪ q.
    pub fn toa_map_farfield(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        let u = self.scales.q * xi;
        let root = (1.0 + u * u).sqrt();
        Ok(if u <= 0.0 { self.scales.t_c * (root - u) } else { self.scales.t_c / (root + u) })
    }

    /// Near-field approximation T ≈ t_c·√(1 - (σ/x)ξ), valid for
    /// σ/x ≫ max(1, q, q²).
    pub fn toa_map_nearfield(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        let s = xi / self.xi_max;
        Ok(self.scales.t_c * (1.0 - s).sqrt())
    }

    /// Inverse of the arrival-time map:
    /// ξ(t) = (x - g t²/2)/(σ√(1 + t²/τ²)), strictly decreasing in t.
    pub fn xi_of_time(&self, t: f64) -> f64 {
        let rt = t / self.scales.tau;
        let numer = self.params.x - 0.5 * self.params.g * t * t;
        numer / (self.params.sigma * (1.0 + rt * rt).sqrt())
    }

    /// Arrival-time density Π_x(t) = φ(ξ(t))·|dξ/dt|/Φ(x/σ), using the
    /// analytic derivative of ξ(t). Zero for t ≤ 0.
    pub fn toa_pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let tau2 = self.scales.tau * self.scales.tau;
        let s2 = 1.0 + t * t / tau2;
        let dxi_dt = t * (self.params.g + (0.5 * self.params.g * t * t + self.params.x) / tau2)
            / (self.params.sigma * s2 * s2.sqrt());
        std_normal_pdf(self.xi_of_time(t)) * dxi_dt / self.norm
    }

    /// P(T_x ≤ t) = [Φ(x/σ) - Φ(ξ(t))]/Φ(x/σ), evaluated through the
    /// complementary tail so it starts at exactly 0 and saturates at
    /// exactly 1.
    pub fn toa_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let xi = self.xi_of_time(t);
        let p = (std_normal_cdf_c(xi) - std_normal_cdf_c(self.xi_max)) / self.norm;
        p.clamp(0.0, 1.0)
    }

    /// Arrival-time quantile, by bisection on the monotone CDF.
    pub fn toa_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Invalid { field: "p", reason: "must lie in (0, 1)", value: p });
        }
        let mut hi = self.scales.t_c;
        let mut n = 0;
        while self.toa_cdf(hi) < p {
            hi *= 2.0;
            n += 1;
            if n > 2000 {
                return Err(Error::Invalid {
                    field: "p",
                    reason: "quantile bracket did not close",
                    value: p,
                });
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.toa_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
